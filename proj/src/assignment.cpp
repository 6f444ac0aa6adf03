#include "trajrec/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "trajrec/error.hpp"

namespace trajrec {

CostMatrix::CostMatrix(Matrix<double> values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw InputError("cost matrix must be square, got " + std::to_string(values_.rows()) + "x" +
                     std::to_string(values_.cols()));
  }
  for (const double v : values_.values()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InputError("cost matrix entries must be finite and non-negative");
    }
  }
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double total(const CostMatrix& costs, const std::vector<std::size_t>& mapping) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mapping.size(); ++i) sum += costs(i, mapping[i]);
  return sum;
}

struct DualSolution {
  std::vector<std::size_t> row_to_col;
  std::vector<double> row_potential;
  std::vector<double> col_potential;
};

// Shortest augmenting path Hungarian method with row/column potentials.
DualSolution hungarian(const CostMatrix& costs) {
  const std::size_t n = costs.size();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based internally; index 0 is the virtual source column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    owner[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t row0 = owner[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double slack = costs(row0 - 1, col - 1) - u[row0] - v[col];
        if (slack < min_slack[col]) {
          min_slack[col] = slack;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[owner[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  DualSolution out{std::vector<std::size_t>(n), std::vector<double>(u.begin() + 1, u.end()),
                   std::vector<double>(v.begin() + 1, v.end())};
  for (std::size_t col = 1; col <= n; ++col) out.row_to_col[owner[col] - 1] = col - 1;
  return out;
}

// With an optimal dual, the optimal assignments are exactly the perfect
// matchings on zero-reduced-cost edges. Walk rows in order and move each to
// the smallest tight column that still leaves the later rows perfectly
// matchable, rerouting them along an alternating path.
void make_lexicographically_smallest(const CostMatrix& costs, DualSolution& dual) {
  const std::size_t n = costs.size();
  double scale = 1.0;
  for (const double c : costs.values().values()) scale = std::max(scale, c);
  const double tolerance = 1e-9 * scale;

  const auto tight = [&](std::size_t row, std::size_t col) {
    return costs(row, col) - dual.row_potential[row] - dual.col_potential[col] <= tolerance;
  };

  std::vector<std::size_t>& match = dual.row_to_col;
  std::vector<std::size_t> owner(n);
  for (std::size_t row = 0; row < n; ++row) owner[match[row]] = row;

  std::vector<std::size_t> next(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t current = match[row];
    bool improvable = false;
    for (std::size_t col = 0; col < current && !improvable; ++col) improvable = tight(row, col);
    if (!improvable) continue;

    // Columns that can be vacated by shifting later rows, ending with
    // `current` taken over. next[c] is where c's owner moves.
    std::fill(next.begin(), next.end(), kNone);
    next[current] = current;
    queue.assign(1, current);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t freed = queue[head];
      for (std::size_t other = row + 1; other < n; ++other) {
        const std::size_t held = match[other];
        if (next[held] == kNone && tight(other, freed)) {
          next[held] = freed;
          queue.push_back(held);
        }
      }
    }

    std::size_t target = current;
    for (std::size_t col = 0; col < current; ++col) {
      if (next[col] != kNone && tight(row, col)) {
        target = col;
        break;
      }
    }
    if (target == current) continue;

    std::size_t col = target;
    std::vector<std::pair<std::size_t, std::size_t>> moves;
    while (col != current) {
      moves.emplace_back(owner[col], next[col]);
      col = next[col];
    }
    for (const auto& [mover, destination] : moves) {
      match[mover] = destination;
      owner[destination] = mover;
    }
    match[row] = target;
    owner[target] = row;
  }
}

}  // namespace

Assignment solve_min(const CostMatrix& costs) {
  if (costs.size() == 0) return {};
  DualSolution dual = hungarian(costs);
  make_lexicographically_smallest(costs, dual);
  Assignment result{std::move(dual.row_to_col), 0.0};
  result.total_cost = total(costs, result.mapping);
  return result;
}

Assignment solve_min_brute(const CostMatrix& costs) {
  const std::size_t n = costs.size();
  if (n > kMaxBruteForceSize) {
    throw InputError("brute-force assignment is limited to n <= " +
                     std::to_string(kMaxBruteForceSize) + ", got " + std::to_string(n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Assignment best{perm, total(costs, perm)};
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double cost = total(costs, perm);
    if (cost < best.total_cost) best = {perm, cost};
  }
  return best;
}

}  // namespace trajrec
