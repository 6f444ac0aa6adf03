#ifndef TRAJREC_EVALUATION_HPP_
#define TRAJREC_EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "trajrec/trajectory.hpp"

namespace trajrec {

// Optimal one-to-one matching of recovered slots onto true users.
struct TrajectoryMapping {
  std::vector<std::size_t> truth_of;  // recovered slot -> truth index
  std::vector<double> pair_error_m;   // recovery error of each matched pair
  double total_error_m = 0.0;
};

// Sum over steps of the distance between the two trajectories' cell centers.
double trajectory_error(std::span<const CellId> a, std::span<const CellId> b, const GridSpec& grid);

// Minimum-total-error matching via solve_min(). Throws InputError when the
// sets differ in size, length or grid.
TrajectoryMapping map_predictions(const TrajectorySet& predicted, const TrajectorySet& truth);

// Mean fraction of steps where a recovered trajectory equals its match.
double accuracy(const TrajectorySet& predicted, const TrajectorySet& truth,
                const TrajectoryMapping& mapping);

// Unit-cost insert / delete / substitute distance over cell ids.
std::size_t levenshtein_distance(std::span<const CellId> a, std::span<const CellId> b);

// Mean of 1 - levenshtein_distance / t over matched pairs.
double levenshtein_accuracy(const TrajectorySet& predicted, const TrajectorySet& truth,
                            const TrajectoryMapping& mapping);

// Total meters between matched predicted and true positions.
double recovery_error(const TrajectorySet& predicted, const TrajectorySet& truth,
                      const TrajectoryMapping& mapping);

// The k most frequent cells (ties to the smaller index), ascending. Holds
// every distinct cell when there are fewer than k.
std::vector<CellId> top_k_signature(std::span<const CellId> cells, std::size_t k);

// Fraction of trajectories whose top-k signature no other trajectory shares.
double topk_uniqueness(std::span<const CellSequence> trajectories, std::size_t k);
double topk_uniqueness(const TrajectorySet& set, std::size_t k);

struct MetricsReport {
  double accuracy = 0.0;
  double levenshtein_accuracy = 0.0;
  double recovery_error_m = 0.0;
  std::map<std::size_t, double> uniqueness_predicted;
  std::map<std::size_t, double> uniqueness_truth;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Maps once, then computes every metric against that mapping. Uniqueness is
// reported for k in [1, max_k] on both sets.
MetricsReport full_report(const TrajectorySet& predicted, const TrajectorySet& truth,
                          std::size_t max_k = 5);
MetricsReport full_report(const TrajectorySet& predicted, const TrajectorySet& truth,
                          const TrajectoryMapping& mapping, std::size_t max_k = 5);

}  // namespace trajrec

#endif  // TRAJREC_EVALUATION_HPP_
