#pragma once

#include <vector>

namespace riseg {

/// Minimum-cost assignment on a dense rows x cols matrix (row-major). Either
/// side may be larger; min(rows, cols) pairs are assigned. Returns, for every
/// row, the assigned column or -1.
std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols);

}  // namespace riseg
