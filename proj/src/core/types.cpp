#include "mdv/core/types.hpp"

#include <cmath>
#include <string>

namespace mdv {

DataCube::DataCube(RadarConfig config)
    : DataCube(config, config.num_frames, config.num_rx, config.chirps_per_frame,
               config.samples_per_chirp) {}

DataCube::DataCube(RadarConfig config, std::size_t frames, std::size_t rx, std::size_t chirps,
                   std::size_t samples)
    : config_(config),
      frames_(frames),
      rx_(rx),
      chirps_(chirps),
      samples_(samples),
      data_(frames * rx * chirps * samples) {}

const DataCube& validate_cube(const DataCube& cube) {
  const RadarConfig& c = cube.config();
  c.validate();
  auto check = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw DimensionError(std::string("data cube ") + what + " = " + std::to_string(got) +
                           ", config expects " + std::to_string(want));
    }
  };
  check(cube.frames(), c.num_frames, "frames");
  check(cube.rx(), c.num_rx, "rx antennas");
  check(cube.chirps(), c.chirps_per_frame, "chirps per frame");
  check(cube.samples(), c.samples_per_chirp, "samples per chirp");

  const auto data = cube.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].real()) || !std::isfinite(data[i].imag())) {
      throw DataError("data cube holds a non-finite sample at flat index " + std::to_string(i));
    }
  }
  return cube;
}

}  // namespace mdv
