#ifndef TRAJREC_ENHANCED_HPP_
#define TRAJREC_ENHANCED_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "trajrec/baseline.hpp"

namespace trajrec {

// m x m counts of predicted transitions: count(i, j) is how often cell j was
// predicted to follow cell i.
class BigramMatrix {
 public:
  explicit BigramMatrix(std::size_t locations) : counts_(locations, locations, 0) {}

  std::size_t locations() const { return counts_.rows(); }
  std::int64_t count(CellId from, CellId to) const { return counts_(from.index, to.index); }
  std::int64_t total() const { return total_; }
  void increment(CellId from, CellId to) {
    ++counts_(from.index, to.index);
    ++total_;
  }

  const Matrix<std::int64_t>& counts() const { return counts_; }

  friend bool operator==(const BigramMatrix&, const BigramMatrix&) = default;

 private:
  Matrix<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

// Cells tied for the largest positive count in `cell`'s row, ascending;
// empty when the row is all zeros.
std::vector<CellId> frequent_successors(const BigramMatrix& bigram, CellId cell);

struct LinkageConfig {
  // Number of past days a new sub-trajectory may be compared against.
  std::size_t k = 3;
};

// Per individual: distance from each column to the nearest of the
// extrapolated point q and the centers of the current cell's frequent
// successors.
CostMatrix enhanced_step_costs(std::span<const CellId> previous_cells,
                               std::span<const CellId> current_cells, const ExpandedRecord& next,
                               const CellCenters& centers, const BigramMatrix& bigram);

// min over the last min(k, last_day + 1) days of information_gain(u's day, v).
double windowed_linkage_cost(std::span<const CellId> trajectory, std::span<const CellId> candidate,
                             const TemporalSpec& temporal, const LinkageConfig& config,
                             std::size_t last_day);

// Everything carried from one day to the next.
struct OnlineState {
  TrajectorySet linked;  // days [0, last_day]
  BigramMatrix bigram;
  std::optional<std::size_t> last_day;  // last fully predicted day, if any

  explicit OnlineState(const AggregatedDataset& data)
      : linked{{}, {}, data.grid(), data.temporal()}, bigram(data.locations()) {}

  std::size_t next_day() const { return last_day ? *last_day + 1 : 0; }
};

// Step 0 trivial, step 1 by distance, the rest by enhanced_step_costs with the
// bigram as it stood at the end of the previous day. Throws InputError when
// `day_index` is not the state's next day.
DayPrediction recover_day_enhanced(const AggregatedDataset& data, std::size_t day_index,
                                   const OnlineState& state);
DayPrediction recover_day_enhanced(const AggregatedDataset& data, std::size_t day_index,
                                   const OnlineState& state, const CellCenters& centers);

// Links `day` onto state.linked with the k-day window (or starts the set on
// day 0). Leaves the bigram and cursor untouched.
void link_day(OnlineState& state, const DayPrediction& day, const LinkageConfig& config,
              const LinkageObserver& observer = {});

// Counts the newest linked day's transitions, including the pair crossing
// from the previous day, and advances the cursor to that day.
void update_bigram(OnlineState& state);

using SnapshotSink = std::function<void(std::size_t, std::shared_ptr<const TrajectorySet>)>;

// Day-by-day driver. Each advance() recovers, links and records one day;
// snapshot() is an immutable copy of the trajectories so far and may be
// handed to other threads.
class OnlineAttack {
 public:
  OnlineAttack(const AggregatedDataset& data, LinkageConfig config);

  bool done() const { return state_.next_day() >= data_.temporal().day_count(); }
  std::size_t days_completed() const { return state_.next_day(); }
  const OnlineState& state() const { return state_; }

  void set_linkage_observer(LinkageObserver observer) { observer_ = std::move(observer); }

  // Throws InputError once every day is processed.
  void advance();
  std::shared_ptr<const TrajectorySet> snapshot() const;

 private:
  const AggregatedDataset& data_;
  LinkageConfig config_;
  CellCenters centers_;
  OnlineState state_;
  LinkageObserver observer_;
};

struct OnlineOptions {
  LinkageConfig linkage;
  SnapshotSink sink;
  LinkageObserver on_linkage;
};

// Validates `data` and runs every day, emitting one snapshot per day.
TrajectorySet run_online(const AggregatedDataset& data, const OnlineOptions& options = {});

}  // namespace trajrec

#endif  // TRAJREC_ENHANCED_HPP_
