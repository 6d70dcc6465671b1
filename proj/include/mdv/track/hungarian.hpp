#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdv::track {

struct Assignment {
  /// row_to_col[i] is the column given to row i, or -1 when unassigned
  /// (only possible when there are more rows than columns).
  std::vector<long long> row_to_col;
  double total_cost = 0.0;
};

/// Minimum-cost assignment of a rows x cols matrix (row-major) by the
/// shortest augmenting path method with potentials, O(n^2 m). Every row
/// (or every column, whichever is fewer) is assigned. Throws
/// std::invalid_argument on non-finite costs.
Assignment hungarian(std::span<const double> cost, std::size_t rows, std::size_t cols);

}  // namespace mdv::track
