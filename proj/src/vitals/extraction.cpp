#include "mdv/vitals/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mdv::vitals {

double window_energy(const rd::RangeDopplerFrame& frame, std::size_t doppler, std::size_t range,
                     const EnergyExtractionConfig& cfg) {
  const std::size_t d0 = doppler > cfg.delta_doppler_bins ? doppler - cfg.delta_doppler_bins : 0;
  const std::size_t d1 = std::min(doppler + cfg.delta_doppler_bins, frame.doppler_bins - 1);
  const std::size_t r0 = range > cfg.delta_range_bins ? range - cfg.delta_range_bins : 0;
  const std::size_t r1 = std::min(range + cfg.delta_range_bins, frame.range_bins - 1);
  double e = 0.0;
  for (std::size_t m = 0; m < frame.rx; ++m) {
    for (std::size_t d = d0; d <= d1; ++d) {
      for (std::size_t k = r0; k <= r1; ++k) e += std::norm(frame.at(m, d, k));
    }
  }
  return e;
}

std::vector<spatial::Cell> trajectory_cells(const track::Trajectory& t, std::size_t num_frames) {
  if (t.points.empty()) throw std::invalid_argument("trajectory has no points");
  std::vector<spatial::Cell> cells(num_frames);
  std::size_t next = 0;
  spatial::Cell held{t.points.front().doppler_bin, t.points.front().range_bin};
  for (std::size_t f = 0; f < num_frames; ++f) {
    while (next < t.points.size() && t.points[next].frame <= f) {
      held = {t.points[next].doppler_bin, t.points[next].range_bin};
      ++next;
    }
    cells[f] = held;
  }
  return cells;
}

SlowTimeSeries extract_energy(const rd::RangeDopplerStack& stack, const track::Trajectory& t,
                              const EnergyExtractionConfig& cfg) {
  const auto cells = trajectory_cells(t, stack.frames.size());
  SlowTimeSeries out{std::vector<double>(cells.size()), stack.slow_time_rate_hz};
  for (std::size_t f = 0; f < cells.size(); ++f) {
    out.values[f] = window_energy(stack.frames[f], cells[f].doppler, cells[f].range, cfg);
  }
  return out;
}

double PhaseUnwrapper::push(Complex z) {
  if (z == Complex{}) return last_wrapped_ + offset_;
  const double w = std::arg(z);
  if (started_) {
    const double jump = w - last_wrapped_;
    // Wrapped values differ by less than 2 pi, so one fold suffices.
    if (jump > std::numbers::pi) {
      offset_ -= 2.0 * std::numbers::pi;
    } else if (jump < -std::numbers::pi) {
      offset_ += 2.0 * std::numbers::pi;
    }
  }
  started_ = true;
  last_wrapped_ = w;
  return w + offset_;
}

SlowTimeSeries extract_phase_baseline(const rd::RangeDopplerStack& stack, const track::Trajectory& t) {
  const auto cells = trajectory_cells(t, stack.frames.size());
  SlowTimeSeries out{std::vector<double>(cells.size()), stack.slow_time_rate_hz};
  PhaseUnwrapper unwrap;
  for (std::size_t f = 0; f < cells.size(); ++f) {
    out.values[f] = unwrap.push(stack.frames[f].at(0, cells[f].doppler, cells[f].range));
  }
  return out;
}

}  // namespace mdv::vitals
