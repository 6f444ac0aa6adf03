#include "trajrec/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "trajrec/assignment.hpp"
#include "trajrec/error.hpp"

namespace trajrec {
namespace {

constexpr std::size_t kMaxTabulatedCells = 1024;

// Distances between cell centers, tabulated for small grids.
class CenterDistances {
 public:
  explicit CenterDistances(const GridSpec& grid) : centers_(grid.cell_centers()) {
    const std::size_t m = centers_.size();
    if (m <= kMaxTabulatedCells) {
      table_.resize(m * m);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) table_[a * m + b] = distance(centers_[a], centers_[b]);
      }
    }
  }

  double operator()(CellId a, CellId b) const {
    if (!table_.empty()) return table_[a.index * centers_.size() + b.index];
    return distance(centers_[a.index], centers_[b.index]);
  }

  double path(std::span<const CellId> a, std::span<const CellId> b) const {
    double sum = 0.0;
    for (std::size_t s = 0; s < a.size(); ++s) sum += (*this)(a[s], b[s]);
    return sum;
  }

 private:
  std::vector<GeoPoint> centers_;
  std::vector<double> table_;
};

void check_compatible(const TrajectorySet& predicted, const TrajectorySet& truth) {
  if (predicted.size() != truth.size()) {
    throw InputError("predicted set has " + std::to_string(predicted.size()) +
                     " trajectories but truth has " + std::to_string(truth.size()));
  }
  if (predicted.length() != truth.length()) {
    throw InputError("predicted trajectories cover " + std::to_string(predicted.length()) +
                     " steps but truth covers " + std::to_string(truth.length()));
  }
  if (!(predicted.grid == truth.grid)) throw InputError("predicted and truth grids differ");
  for (const auto* set : {&predicted, &truth}) {
    for (const CellSequence& cells : set->trajectories) {
      if (cells.size() != set->length()) throw InputError("trajectories differ in length");
      for (const CellId c : cells) {
        if (!set->grid.is_valid(c)) throw InputError("cell " + std::to_string(c.index) + " is outside the grid");
      }
    }
  }
}

void check_mapping(const TrajectorySet& predicted, const TrajectoryMapping& mapping) {
  if (mapping.truth_of.size() != predicted.size()) {
    throw InputError("mapping does not cover every predicted trajectory");
  }
}

}  // namespace

double trajectory_error(std::span<const CellId> a, std::span<const CellId> b, const GridSpec& grid) {
  if (a.size() != b.size()) throw InputError("trajectories differ in length");
  double sum = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) sum += distance(grid.cell_center(a[s]), grid.cell_center(b[s]));
  return sum;
}

TrajectoryMapping map_predictions(const TrajectorySet& predicted, const TrajectorySet& truth) {
  check_compatible(predicted, truth);
  const std::size_t n = predicted.size();
  const CenterDistances distances(predicted.grid);
  Matrix<double> costs(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      costs(i, j) = distances.path(predicted.trajectories[i], truth.trajectories[j]);
    }
  }
  const CostMatrix cost_matrix(std::move(costs));
  const Assignment assignment = solve_min(cost_matrix);

  TrajectoryMapping mapping{assignment.mapping, std::vector<double>(n), assignment.total_cost};
  for (std::size_t i = 0; i < n; ++i) mapping.pair_error_m[i] = cost_matrix(i, assignment.mapping[i]);
  return mapping;
}

double accuracy(const TrajectorySet& predicted, const TrajectorySet& truth,
                const TrajectoryMapping& mapping) {
  check_mapping(predicted, mapping);
  if (predicted.size() == 0 || predicted.length() == 0) return 0.0;
  const auto t = static_cast<double>(predicted.length());
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const CellSequence& a = predicted.trajectories[i];
    const CellSequence& b = truth.trajectories[mapping.truth_of[i]];
    std::size_t hits = 0;
    for (std::size_t s = 0; s < a.size(); ++s) hits += a[s] == b[s] ? 1 : 0;
    sum += static_cast<double>(hits) / t;
  }
  return sum / static_cast<double>(predicted.size());
}

std::size_t levenshtein_distance(std::span<const CellId> a, std::span<const CellId> b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> previous(b.size() + 1), current(b.size() + 1);
  std::iota(previous.begin(), previous.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    current[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitute});
    }
    std::swap(previous, current);
  }
  return previous[b.size()];
}

double levenshtein_accuracy(const TrajectorySet& predicted, const TrajectorySet& truth,
                            const TrajectoryMapping& mapping) {
  check_mapping(predicted, mapping);
  if (predicted.size() == 0 || predicted.length() == 0) return 0.0;
  const auto t = static_cast<double>(predicted.length());
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const std::size_t d =
        levenshtein_distance(predicted.trajectories[i], truth.trajectories[mapping.truth_of[i]]);
    sum += static_cast<double>(predicted.length() - std::min(d, predicted.length())) / t;
  }
  return sum / static_cast<double>(predicted.size());
}

double recovery_error(const TrajectorySet& predicted, const TrajectorySet& truth,
                      const TrajectoryMapping& mapping) {
  check_mapping(predicted, mapping);
  const CenterDistances distances(predicted.grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    sum += distances.path(predicted.trajectories[i], truth.trajectories[mapping.truth_of[i]]);
  }
  return sum;
}

std::vector<CellId> top_k_signature(std::span<const CellId> cells, std::size_t k) {
  std::map<CellId, std::size_t> counts;
  for (const CellId c : cells) ++counts[c];
  std::vector<std::pair<CellId, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  ranked.resize(std::min(k, ranked.size()));
  std::vector<CellId> signature;
  for (const auto& [cell, count] : ranked) signature.push_back(cell);
  std::sort(signature.begin(), signature.end());
  return signature;
}

double topk_uniqueness(std::span<const CellSequence> trajectories, std::size_t k) {
  if (k == 0) throw InputError("top-k uniqueness needs k >= 1");
  if (trajectories.empty()) return 0.0;
  std::vector<std::vector<CellId>> signatures;
  std::map<std::vector<CellId>, std::size_t> frequency;
  for (const CellSequence& cells : trajectories) {
    signatures.push_back(top_k_signature(cells, k));
    ++frequency[signatures.back()];
  }
  const auto unique = std::count_if(signatures.begin(), signatures.end(),
                                    [&](const auto& s) { return frequency[s] == 1; });
  return static_cast<double>(unique) / static_cast<double>(trajectories.size());
}

double topk_uniqueness(const TrajectorySet& set, std::size_t k) {
  return topk_uniqueness(set.trajectories, k);
}

MetricsReport full_report(const TrajectorySet& predicted, const TrajectorySet& truth,
                          std::size_t max_k) {
  return full_report(predicted, truth, map_predictions(predicted, truth), max_k);
}

MetricsReport full_report(const TrajectorySet& predicted, const TrajectorySet& truth,
                          const TrajectoryMapping& mapping, std::size_t max_k) {
  MetricsReport report;
  report.accuracy = accuracy(predicted, truth, mapping);
  report.levenshtein_accuracy = levenshtein_accuracy(predicted, truth, mapping);
  report.recovery_error_m = recovery_error(predicted, truth, mapping);
  for (std::size_t k = 1; k <= max_k; ++k) {
    report.uniqueness_predicted[k] = topk_uniqueness(predicted, k);
    report.uniqueness_truth[k] = topk_uniqueness(truth, k);
  }
  return report;
}

}  // namespace trajrec
