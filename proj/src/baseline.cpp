#include "trajrec/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "trajrec/error.hpp"
#include "linkage_detail.hpp"

namespace trajrec {

bool uses_distance_cost(const TemporalSpec& temporal, std::size_t step, std::size_t offset_in_day) {
  return offset_in_day < 2 || temporal.time_of_day(step) <= kNightEndSeconds;
}

namespace detail {

std::vector<CellSequence> transpose_steps(const std::vector<CellSequence>& by_step) {
  const std::size_t n = by_step.empty() ? 0 : by_step.front().size();
  std::vector<CellSequence> out(n, CellSequence(by_step.size()));
  for (std::size_t s = 0; s < by_step.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) out[i][s] = by_step[s][i];
  }
  return out;
}

ExpandedRecord expand_checked(const AggregatedDataset& data, std::size_t step, std::size_t n) {
  ExpandedRecord record = expand_record(data.record(step));
  if (record.size() != n) {
    throw DataError("record " + std::to_string(step) + " holds " + std::to_string(record.size()) +
                    " individuals, expected " + std::to_string(n));
  }
  return record;
}

}  // namespace detail

DayPrediction recover_day(const AggregatedDataset& data, std::size_t day_index) {
  const CellCenters centers(data.grid());
  return recover_day(data, day_index, centers);
}

DayPrediction recover_day(const AggregatedDataset& data, std::size_t day_index,
                          const CellCenters& centers) {
  const TemporalSpec& temporal = data.temporal();
  const StepRange range = temporal.day(day_index);

  std::vector<CellSequence> by_step;
  by_step.reserve(range.size());
  by_step.push_back(trivial_first_step(expand_record(data.record(range.begin))));
  const std::size_t n = by_step.front().size();

  for (std::size_t step = range.begin + 1; step < range.end; ++step) {
    const std::size_t offset = step - range.begin;
    const ExpandedRecord next = detail::expand_checked(data, step, n);
    const CostMatrix costs =
        uses_distance_cost(temporal, step, offset)
            ? night_step_costs(by_step[offset - 1], next, centers)
            : velocity_step_costs(by_step[offset - 2], by_step[offset - 1], next, centers);
    by_step.push_back(apply_assignment(solve_min(costs), next));
  }
  return {day_index, range, detail::transpose_steps(by_step)};
}

namespace detail {

Histogram histogram(std::span<const CellId> cells) {
  std::vector<std::uint32_t> sorted;
  sorted.reserve(cells.size());
  for (const CellId c : cells) sorted.push_back(c.index);
  std::sort(sorted.begin(), sorted.end());
  Histogram h;
  h.total = sorted.size();
  for (const std::uint32_t c : sorted) {
    if (h.bins.empty() || h.bins.back().first != c) {
      h.bins.emplace_back(c, 1);
    } else {
      ++h.bins.back().second;
    }
  }
  h.entropy = 0.0;
  for (const auto& [cell, count] : h.bins) {
    const double p = static_cast<double>(count) / static_cast<double>(h.total);
    h.entropy -= p * std::log2(p);
  }
  return h;
}

double information_gain(const Histogram& a, const Histogram& b) {
  const std::size_t total = a.total + b.total;
  const auto total_d = static_cast<double>(total);
  double merged = 0.0;
  const auto add = [&](std::size_t count) {
    const double p = static_cast<double>(count) / total_d;
    merged -= p * std::log2(p);
  };
  auto ia = a.bins.begin();
  auto ib = b.bins.begin();
  while (ia != a.bins.end() || ib != b.bins.end()) {
    if (ib == b.bins.end() || (ia != a.bins.end() && ia->first < ib->first)) {
      add(ia++->second);
    } else if (ia == a.bins.end() || ib->first < ia->first) {
      add(ib++->second);
    } else {
      add(ia++->second + ib++->second);
    }
  }
  const double weight_a = static_cast<double>(a.total) / total_d;
  const double weight_b = static_cast<double>(b.total) / total_d;
  return std::max(0.0, merged - (weight_a * a.entropy + weight_b * b.entropy));
}

}  // namespace detail

double information_gain(std::span<const CellId> a, std::span<const CellId> b) {
  if (a.empty() || b.empty()) throw InputError("information gain needs non-empty sub-trajectories");
  return detail::information_gain(detail::histogram(a), detail::histogram(b));
}

CostMatrix linkage_costs(const TrajectorySet& linked, std::size_t last_day,
                         const DayPrediction& next, std::size_t window) {
  if (window == 0) throw InputError("linkage window must be at least one day");
  const std::size_t n = linked.size();
  if (next.sub_trajectories.size() != n) {
    throw InputError("cannot link " + std::to_string(next.sub_trajectories.size()) +
                     " sub-trajectories onto " + std::to_string(n) + " trajectories");
  }
  const TemporalSpec& temporal = linked.temporal;
  if (linked.length() != temporal.day(last_day).end) {
    throw InputError("linked trajectories do not end with day " + std::to_string(last_day));
  }

  const std::size_t days = std::min(window, last_day + 1);
  // past[u * days + i] is u's sub-trajectory on day last_day - i.
  std::vector<detail::Histogram> past;
  past.reserve(n * days);
  for (const CellSequence& cells : linked.trajectories) {
    for (std::size_t i = 0; i < days; ++i) {
      const StepRange range = temporal.day(last_day - i);
      past.push_back(detail::histogram(std::span(cells).subspan(range.begin, range.size())));
    }
  }
  std::vector<detail::Histogram> candidates;
  candidates.reserve(n);
  for (const CellSequence& cells : next.sub_trajectories) {
    if (cells.empty()) throw InputError("empty sub-trajectory");
    candidates.push_back(detail::histogram(cells));
  }

  Matrix<double> values(n, n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < days; ++i) {
        best = std::min(best, detail::information_gain(past[u * days + i], candidates[v]));
      }
      values(u, v) = best;
    }
  }
  return CostMatrix(std::move(values));
}

void detail::append_linked(TrajectorySet& set, const DayPrediction& next, const Assignment& assignment) {
  for (std::size_t u = 0; u < set.size(); ++u) {
    const CellSequence& piece = next.sub_trajectories[assignment.mapping[u]];
    set.trajectories[u].insert(set.trajectories[u].end(), piece.begin(), piece.end());
  }
}

TrajectorySet link_days(const TrajectorySet& previous, const DayPrediction& next_day,
                        const LinkageObserver& observer) {
  if (next_day.day_index == 0 || previous.length() != next_day.steps.begin) {
    throw InputError("day " + std::to_string(next_day.day_index) +
                     " does not immediately follow the linked trajectories");
  }
  const CostMatrix costs = linkage_costs(previous, next_day.day_index - 1, next_day, 1);
  if (observer) observer(next_day.day_index, costs);
  TrajectorySet linked = previous;
  detail::append_linked(linked, next_day, solve_min(costs));
  return linked;
}

TrajectorySet start_trajectories(const DayPrediction& first_day, const GridSpec& grid,
                                 const TemporalSpec& temporal) {
  if (first_day.day_index != 0) throw InputError("trajectories must start from day 0");
  return {slot_labels(first_day.sub_trajectories.size()), first_day.sub_trajectories, grid,
          temporal};
}

TrajectorySet recover_all(const AggregatedDataset& data, const BaselineOptions& options) {
  require_valid(data);
  const CellCenters centers(data.grid());
  const std::size_t days = data.temporal().day_count();

  std::vector<DayPrediction> predictions(days);
  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t day = 0; day < days; ++day) predictions[day] = recover_day(data, day, centers);
  } else {
    for (std::size_t first = 0; first < days; first += threads) {
      std::vector<std::future<DayPrediction>> batch;
      for (std::size_t day = first; day < std::min<std::size_t>(days, first + threads); ++day) {
        batch.push_back(std::async(std::launch::async, [&data, &centers, day] {
          return recover_day(data, day, centers);
        }));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) predictions[first + k] = batch[k].get();
    }
  }

  TrajectorySet linked = start_trajectories(predictions.front(), data.grid(), data.temporal());
  for (std::size_t day = 1; day < days; ++day) {
    linked = link_days(linked, predictions[day], options.on_linkage);
  }
  return linked;
}

}  // namespace trajrec
