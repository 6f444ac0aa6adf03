#ifndef TRAJREC_ASSIGNMENT_HPP_
#define TRAJREC_ASSIGNMENT_HPP_

#include <cstddef>
#include <vector>

#include "trajrec/matrix.hpp"

namespace trajrec {

// Square matrix of finite, non-negative assignment costs.
// Rows are assignees, columns are assignments.
class CostMatrix {
 public:
  CostMatrix() = default;
  // Throws InputError if `values` is not square or holds a negative or
  // non-finite entry.
  explicit CostMatrix(Matrix<double> values);

  std::size_t size() const { return values_.rows(); }
  double operator()(std::size_t row, std::size_t col) const { return values_(row, col); }
  const Matrix<double>& values() const { return values_; }

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  Matrix<double> values_;
};

struct Assignment {
  std::vector<std::size_t> mapping;  // row -> column, a permutation
  double total_cost = 0.0;
};

// Minimum-cost assignment in O(n^3). Among optimal assignments the
// lexicographically smallest mapping is returned, so results never depend on
// solver internals.
Assignment solve_min(const CostMatrix& costs);

inline constexpr std::size_t kMaxBruteForceSize = 10;

// Exhaustive search over all n! permutations with the same tie-break as
// solve_min(). Throws InputError for n > kMaxBruteForceSize.
Assignment solve_min_brute(const CostMatrix& costs);

}  // namespace trajrec

#endif  // TRAJREC_ASSIGNMENT_HPP_
