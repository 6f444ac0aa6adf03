#ifndef TRAJREC_BASELINE_HPP_
#define TRAJREC_BASELINE_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "trajrec/assignment.hpp"
#include "trajrec/ingest.hpp"
#include "trajrec/step_costs.hpp"
#include "trajrec/trajectory.hpp"

namespace trajrec {

// n anonymous sub-trajectories for one day (the last day may be partial).
struct DayPrediction {
  std::size_t day_index = 0;
  StepRange steps;
  std::vector<CellSequence> sub_trajectories;

  friend bool operator==(const DayPrediction&, const DayPrediction&) = default;
};

// Called with (day, cost matrix) for every day linkage that is solved.
using LinkageObserver = std::function<void(std::size_t, const CostMatrix&)>;

// Whether the move into `step` is scored by plain distance: the first move
// of a day (no velocity history yet) and every move landing in [00:00, 06:00].
bool uses_distance_cost(const TemporalSpec& temporal, std::size_t step, std::size_t offset_in_day);

// Night stage then velocity stage for one day, starting from the trivial
// first-step assignment.
DayPrediction recover_day(const AggregatedDataset& data, std::size_t day_index);
DayPrediction recover_day(const AggregatedDataset& data, std::size_t day_index,
                          const CellCenters& centers);

// Entropy-based information gain (bits) between two sub-trajectories:
// H(a + b) - (|a| H(a) + |b| H(b)) / (|a| + |b|). Zero for identical cell
// distributions; lower means more similar.
double information_gain(std::span<const CellId> a, std::span<const CellId> b);

// cost[u][v] = min over the last `window` completed days x - i of
// information_gain(u's day x - i, v). `linked` must cover days [0, last_day].
CostMatrix linkage_costs(const TrajectorySet& linked, std::size_t last_day,
                         const DayPrediction& next, std::size_t window);

// Matches `next_day` onto the trajectories that cover every earlier day and
// appends it. Uses the single-day information-gain cost.
TrajectorySet link_days(const TrajectorySet& previous, const DayPrediction& next_day,
                        const LinkageObserver& observer = {});

// Starts a trajectory set from day 0's prediction.
TrajectorySet start_trajectories(const DayPrediction& first_day, const GridSpec& grid,
                                 const TemporalSpec& temporal);

struct BaselineOptions {
  // Days are independent; 0 picks the hardware concurrency.
  unsigned threads = 1;
  LinkageObserver on_linkage;
};

// Validates `data`, recovers every day, then links days in order.
TrajectorySet recover_all(const AggregatedDataset& data, const BaselineOptions& options = {});

}  // namespace trajrec

#endif  // TRAJREC_BASELINE_HPP_
