#include "mdv/track/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "mdv/core/config.hpp"
#include "mdv/track/hungarian.hpp"

namespace mdv::track {

Tracker::Tracker(TrackerParams params) : params_(params) {
  if (!(params_.gate_distance > 0.0)) throw std::invalid_argument("tracker gate distance must be > 0");
  if (!(params_.range_scale_m > 0.0) || !(params_.angle_scale_deg > 0.0)) {
    throw std::invalid_argument("tracker cost scales must be > 0");
  }
}

TrackState Tracker::predict(const Trajectory& t, std::size_t frame) {
  const double dt = static_cast<double>(frame) - static_cast<double>(t.last_frame());
  TrackState p = t.state;
  p.range_m += p.range_rate * dt;
  p.angle_deg += p.angle_rate * dt;
  return p;
}

double Tracker::cost(const TrackState& p, const Detection& d) const {
  const double dr = (d.range_m - p.range_m) / params_.range_scale_m;
  const double da = (d.angle_deg - p.angle_deg) / params_.angle_scale_deg;
  return std::sqrt(dr * dr + da * da);
}

std::vector<long long> Tracker::step(std::size_t frame, std::span<const Detection> dets) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (tracks_[i].active) live.push_back(i);
  }
  std::vector<long long> joined(dets.size(), -1);

  if (!live.empty() && !dets.empty()) {
    // Pairs outside the gate get a sentinel that always loses to a gated
    // pair, so gating never changes which in-gate pairs are optimal.
    const double sentinel = params_.gate_distance * 1e3 * static_cast<double>(live.size() + dets.size());
    std::vector<double> c(live.size() * dets.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      const TrackState p = predict(tracks_[live[i]], frame);
      for (std::size_t j = 0; j < dets.size(); ++j) {
        const double v = cost(p, dets[j]);
        c[i * dets.size() + j] = v < params_.gate_distance ? v : sentinel;
      }
    }
    const Assignment a = hungarian(c, live.size(), dets.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      const long long j = a.row_to_col[i];
      if (j < 0 || c[i * dets.size() + static_cast<std::size_t>(j)] >= params_.gate_distance) continue;
      Trajectory& t = tracks_[live[i]];
      const Detection& d = dets[static_cast<std::size_t>(j)];
      const double dt = static_cast<double>(frame) - static_cast<double>(t.last_frame());
      if (dt > 0.0) {
        const double g = params_.rate_gain;
        t.state.range_rate = (1.0 - g) * t.state.range_rate + g * (d.range_m - t.state.range_m) / dt;
        t.state.angle_rate = (1.0 - g) * t.state.angle_rate + g * (d.angle_deg - t.state.angle_deg) / dt;
      }
      t.state.range_m = d.range_m;
      t.state.angle_deg = d.angle_deg;
      t.points.push_back(d);
      t.points.back().frame = frame;
      t.missed_count = 0;
      joined[static_cast<std::size_t>(j)] = t.id;
    }
  }

  for (std::size_t i : live) {
    Trajectory& t = tracks_[i];
    if (t.last_frame() == frame) continue;
    if (++t.missed_count > params_.max_missed) t.active = false;
  }

  // Leftovers spawn strongest first. One inside the gate of an active track,
  // including a track spawned earlier in this frame, is a fragment of that
  // target, not a new one.
  std::vector<std::size_t> leftovers;
  for (std::size_t j = 0; j < dets.size(); ++j) {
    if (joined[j] < 0) leftovers.push_back(j);
  }
  std::stable_sort(leftovers.begin(), leftovers.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].snr_db > dets[b].snr_db; });
  for (std::size_t j : leftovers) {
    const bool duplicate = std::any_of(tracks_.begin(), tracks_.end(), [&](const Trajectory& t) {
      return t.active && cost(t.state, dets[j]) < params_.gate_distance;
    });
    if (duplicate) continue;
    Trajectory t;
    t.id = next_id_++;
    t.points.push_back(dets[j]);
    t.points.back().frame = frame;
    t.state = {dets[j].range_m, dets[j].angle_deg, 0.0, 0.0};
    joined[j] = t.id;
    tracks_.push_back(std::move(t));
  }
  return joined;
}

std::vector<Trajectory> Tracker::finish() const {
  std::vector<Trajectory> out;
  for (const Trajectory& t : tracks_) {
    if (t.points.size() >= params_.min_length) out.push_back(t);
  }
  return out;
}

std::vector<Trajectory> track(const std::vector<std::vector<Detection>>& frames, const TrackerParams& params) {
  Tracker tracker(params);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    std::vector<Detection> dets = frames[f];
    for (Detection& d : dets) d.frame = f;
    tracker.step(f, dets);
  }
  return tracker.finish();
}

void write_trajectories_csv(std::span<const Trajectory> trajectories, const std::filesystem::path& path) {
  std::vector<std::tuple<std::size_t, long long, const Detection*>> rows;
  for (const Trajectory& t : trajectories) {
    for (const Detection& d : t.points) rows.emplace_back(d.frame, t.id, &d);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  out << "frame,id,range_m,angle_deg,snr_db\n";
  for (const auto& [frame, id, d] : rows) {
    out << frame << "," << id << "," << d->range_m << "," << d->angle_deg << "," << d->snr_db << "\n";
  }
}

}  // namespace mdv::track
