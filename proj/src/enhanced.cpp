#include "trajrec/enhanced.hpp"

#include <algorithm>
#include <limits>

#include "trajrec/error.hpp"
#include "linkage_detail.hpp"

namespace trajrec {

std::vector<CellId> frequent_successors(const BigramMatrix& bigram, CellId cell) {
  if (cell.index >= bigram.locations()) {
    throw InputError("cell " + std::to_string(cell.index) + " is outside the bigram matrix");
  }
  const auto row = bigram.counts().row(cell.index);
  const std::int64_t best = *std::max_element(row.begin(), row.end());
  std::vector<CellId> successors;
  if (best <= 0) return successors;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] == best) successors.push_back(CellId{static_cast<std::uint32_t>(j)});
  }
  return successors;
}

namespace {

// Frequent-successor anchors per cell, filled on first use. Valid while the
// bigram it reads is unchanged.
class SuccessorAnchors {
 public:
  SuccessorAnchors(const BigramMatrix& bigram, const CellCenters& centers)
      : bigram_(bigram), centers_(centers), cache_(bigram.locations()) {}

  const std::vector<GeoPoint>& operator()(CellId cell) {
    auto& slot = cache_[cell.index];
    if (!slot) {
      slot.emplace();
      for (const CellId s : frequent_successors(bigram_, cell)) slot->push_back(centers_[s]);
    }
    return *slot;
  }

 private:
  const BigramMatrix& bigram_;
  const CellCenters& centers_;
  std::vector<std::optional<std::vector<GeoPoint>>> cache_;
};

CostMatrix enhanced_costs(std::span<const CellId> previous_cells,
                          std::span<const CellId> current_cells, const ExpandedRecord& next,
                          const CellCenters& centers, SuccessorAnchors& successors) {
  if (previous_cells.size() != current_cells.size()) {
    throw InputError("previous and current steps differ in population");
  }
  std::vector<std::vector<GeoPoint>> anchors(current_cells.size());
  for (std::size_t i = 0; i < current_cells.size(); ++i) {
    anchors[i] = successors(current_cells[i]);
    anchors[i].push_back(
        extrapolate(centers[previous_cells[i]], centers[current_cells[i]], centers.grid()));
  }
  return anchored_costs(anchors, next, centers);
}

}  // namespace

CostMatrix enhanced_step_costs(std::span<const CellId> previous_cells,
                               std::span<const CellId> current_cells, const ExpandedRecord& next,
                               const CellCenters& centers, const BigramMatrix& bigram) {
  SuccessorAnchors successors(bigram, centers);
  return enhanced_costs(previous_cells, current_cells, next, centers, successors);
}

double windowed_linkage_cost(std::span<const CellId> trajectory, std::span<const CellId> candidate,
                             const TemporalSpec& temporal, const LinkageConfig& config,
                             std::size_t last_day) {
  if (config.k == 0) throw InputError("linkage window k must be at least 1");
  if (candidate.empty()) throw InputError("empty sub-trajectory");
  if (trajectory.size() < temporal.day(last_day).end) {
    throw InputError("trajectory does not cover day " + std::to_string(last_day));
  }
  const detail::Histogram next = detail::histogram(candidate);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(config.k, last_day + 1); ++i) {
    const StepRange range = temporal.day(last_day - i);
    best = std::min(best, detail::information_gain(
                              detail::histogram(trajectory.subspan(range.begin, range.size())), next));
  }
  return best;
}

DayPrediction recover_day_enhanced(const AggregatedDataset& data, std::size_t day_index,
                                   const OnlineState& state) {
  const CellCenters centers(data.grid());
  return recover_day_enhanced(data, day_index, state, centers);
}

DayPrediction recover_day_enhanced(const AggregatedDataset& data, std::size_t day_index,
                                   const OnlineState& state, const CellCenters& centers) {
  if (day_index != state.next_day()) {
    throw InputError("day " + std::to_string(day_index) + " delivered out of order; expected day " +
                     std::to_string(state.next_day()));
  }
  if (state.bigram.locations() != data.locations()) {
    throw InputError("bigram matrix does not match the dataset's locations");
  }
  const StepRange range = data.temporal().day(day_index);
  SuccessorAnchors successors(state.bigram, centers);

  std::vector<CellSequence> by_step;
  by_step.reserve(range.size());
  by_step.push_back(trivial_first_step(expand_record(data.record(range.begin))));
  const std::size_t n = by_step.front().size();

  for (std::size_t step = range.begin + 1; step < range.end; ++step) {
    const std::size_t offset = step - range.begin;
    const ExpandedRecord next = detail::expand_checked(data, step, n);
    const CostMatrix costs =
        offset == 1 ? night_step_costs(by_step[0], next, centers)
                    : enhanced_costs(by_step[offset - 2], by_step[offset - 1], next, centers, successors);
    by_step.push_back(apply_assignment(solve_min(costs), next));
  }
  return {day_index, range, detail::transpose_steps(by_step)};
}

void link_day(OnlineState& state, const DayPrediction& day, const LinkageConfig& config,
              const LinkageObserver& observer) {
  if (config.k == 0) throw InputError("linkage window k must be at least 1");
  if (day.day_index != state.next_day()) {
    throw InputError("day " + std::to_string(day.day_index) + " delivered out of order; expected day " +
                     std::to_string(state.next_day()));
  }
  if (day.day_index == 0) {
    if (state.linked.length() != 0) throw InputError("day 0 is already linked");
    state.linked.labels = slot_labels(day.sub_trajectories.size());
    state.linked.trajectories = day.sub_trajectories;
    return;
  }
  if (state.linked.length() != day.steps.begin) {
    throw InputError("day " + std::to_string(day.day_index) + " is already linked");
  }
  const CostMatrix costs = linkage_costs(state.linked, *state.last_day, day, config.k);
  if (observer) observer(day.day_index, costs);
  detail::append_linked(state.linked, day, solve_min(costs));
}

void update_bigram(OnlineState& state) {
  const std::size_t day = state.next_day();
  const StepRange range = state.linked.temporal.day(day);
  if (state.linked.length() != range.end) {
    throw InputError("day " + std::to_string(day) + " has not been linked yet");
  }
  const std::size_t from = day == 0 ? range.begin : range.begin - 1;
  for (const CellSequence& cells : state.linked.trajectories) {
    for (std::size_t s = from; s + 1 < range.end; ++s) state.bigram.increment(cells[s], cells[s + 1]);
  }
  state.last_day = day;
}

OnlineAttack::OnlineAttack(const AggregatedDataset& data, LinkageConfig config)
    : data_(data), config_(config), centers_(data.grid()), state_(data) {
  if (config_.k == 0) throw InputError("linkage window k must be at least 1");
}

void OnlineAttack::advance() {
  if (done()) throw InputError("every day has already been processed");
  const DayPrediction day = recover_day_enhanced(data_, state_.next_day(), state_, centers_);
  link_day(state_, day, config_, observer_);
  update_bigram(state_);
}

std::shared_ptr<const TrajectorySet> OnlineAttack::snapshot() const {
  return std::make_shared<const TrajectorySet>(state_.linked);
}

TrajectorySet run_online(const AggregatedDataset& data, const OnlineOptions& options) {
  require_valid(data);
  OnlineAttack attack(data, options.linkage);
  attack.set_linkage_observer(options.on_linkage);
  while (!attack.done()) {
    attack.advance();
    if (options.sink) options.sink(attack.days_completed() - 1, attack.snapshot());
  }
  return attack.state().linked;
}

}  // namespace trajrec
