#pragma once

#include <cstddef>
#include <vector>

#include "mdv/core/types.hpp"
#include "mdv/rd/range_doppler.hpp"
#include "mdv/spatial/music.hpp"
#include "mdv/track/tracker.hpp"

namespace mdv::vitals {

struct EnergyExtractionConfig {
  std::size_t delta_range_bins = 2;
  std::size_t delta_doppler_bins = 3;
};

/// Sum over antennas of |S|^2 in the (2 dr + 1) x (2 dd + 1) window around
/// (doppler, range), clipped at the map edges.
double window_energy(const rd::RangeDopplerFrame& frame, std::size_t doppler, std::size_t range,
                     const EnergyExtractionConfig& config);

/// The trajectory's cell in every frame of [0, num_frames): its own point
/// where it has one, otherwise the last cell held (the first cell before
/// the first point). Throws std::invalid_argument for an empty trajectory.
std::vector<spatial::Cell> trajectory_cells(const track::Trajectory& trajectory, std::size_t num_frames);

/// Micro-Doppler energy E(i) along a trajectory.
SlowTimeSeries extract_energy(const rd::RangeDopplerStack& stack, const track::Trajectory& trajectory,
                              const EnergyExtractionConfig& config = {});

/// Running phase unwrapper: consecutive jumps larger than pi are folded by
/// 2 pi. A zero sample repeats the previous phase.
class PhaseUnwrapper {
 public:
  double push(Complex z);

 private:
  bool started_ = false;
  double last_wrapped_ = 0.0;
  double offset_ = 0.0;
};

/// Unwrapped phase of antenna 0 at the trajectory's cell.
SlowTimeSeries extract_phase_baseline(const rd::RangeDopplerStack& stack, const track::Trajectory& trajectory);

}  // namespace mdv::vitals
