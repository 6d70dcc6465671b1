#include "mdv/track/cfar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mdv::track {

namespace {

// (rows + 1) x (cols + 1) summed-area table.
std::vector<double> integral_image(std::span<const double> map, std::size_t rows, std::size_t cols) {
  std::vector<double> s((rows + 1) * (cols + 1), 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double line = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      line += map[r * cols + c];
      s[(r + 1) * (cols + 1) + c + 1] = s[r * (cols + 1) + c + 1] + line;
    }
  }
  return s;
}

struct Rect {
  std::size_t r0, r1, c0, c1;  // half-open
  std::size_t area() const { return (r1 - r0) * (c1 - c0); }
};

Rect clip(long long r, long long c, std::size_t hr, std::size_t hc, std::size_t rows, std::size_t cols) {
  const auto lo = [](long long v, std::size_t h) { return static_cast<std::size_t>(std::max(0LL, v - static_cast<long long>(h))); };
  const auto hi = [](long long v, std::size_t h, std::size_t n) {
    return static_cast<std::size_t>(std::min(static_cast<long long>(n), v + static_cast<long long>(h) + 1));
  };
  return {lo(r, hr), hi(r, hr, rows), lo(c, hc), hi(c, hc, cols)};
}

double rect_sum(const std::vector<double>& s, std::size_t cols, const Rect& q) {
  const std::size_t w = cols + 1;
  return s[q.r1 * w + q.c1] - s[q.r0 * w + q.c1] - s[q.r1 * w + q.c0] + s[q.r0 * w + q.c0];
}

}  // namespace

void CfarConfig::validate() const {
  if (training_range < 1 || training_doppler < 1) throw std::invalid_argument("CFAR training cells must be >= 1");
  if (!(probability_false_alarm > 0.0 && probability_false_alarm < 1.0)) {
    throw std::invalid_argument("CFAR probability of false alarm must lie in (0, 1)");
  }
}

double ca_cfar_scale(std::size_t n, double pfa) {
  if (n == 0) throw std::invalid_argument("ca_cfar_scale: no training cells");
  const double nd = static_cast<double>(n);
  return nd * (std::pow(pfa, -1.0 / nd) - 1.0);
}

std::vector<CfarCell> cfar_2d(std::span<const double> map, std::size_t rows, std::size_t cols,
                              const CfarConfig& cfg) {
  cfg.validate();
  if (map.size() != rows * cols) throw std::invalid_argument("cfar_2d: map size does not match rows x cols");
  std::vector<CfarCell> out;
  if (rows == 0 || cols == 0) return out;

  const std::vector<double> sat = integral_image(map, rows, cols);
  const std::size_t outer_r = cfg.guard_doppler + cfg.training_doppler;
  const std::size_t outer_c = cfg.guard_range + cfg.training_range;
  const std::size_t centre = rows / 2;
  std::unordered_map<std::size_t, double> alpha_cache;

  for (std::size_t d = 0; d < rows; ++d) {
    if (cfg.zero_doppler_exclusion_bins > 0) {
      const std::size_t dist = d > centre ? d - centre : centre - d;
      if (dist <= cfg.zero_doppler_exclusion_bins) continue;
    }
    for (std::size_t k = 0; k < cols; ++k) {
      const double v = map[d * cols + k];
      const auto dd = static_cast<long long>(d), kk = static_cast<long long>(k);
      const Rect outer = clip(dd, kk, outer_r, outer_c, rows, cols);
      const Rect inner = clip(dd, kk, cfg.guard_doppler, cfg.guard_range, rows, cols);
      const std::size_t n = outer.area() - inner.area();
      if (n == 0) continue;
      const double mean = (rect_sum(sat, cols, outer) - rect_sum(sat, cols, inner)) / static_cast<double>(n);
      auto [it, fresh] = alpha_cache.try_emplace(n, 0.0);
      if (fresh) it->second = ca_cfar_scale(n, cfg.probability_false_alarm);
      const double threshold = it->second * mean;
      if (v > threshold) out.push_back({d, k, v, threshold, mean});
    }
  }
  return out;
}

}  // namespace mdv::track
