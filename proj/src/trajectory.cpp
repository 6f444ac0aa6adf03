#include "trajrec/trajectory.hpp"

#include "trajrec/error.hpp"

namespace trajrec {

TrajectorySet make_trajectory_set(std::span<const DiscreteTrajectory> trajectories,
                                  const GridSpec& grid, const TemporalSpec& temporal) {
  TrajectorySet set{{}, {}, grid, temporal};
  for (const DiscreteTrajectory& t : trajectories) {
    if (t.cells.size() != temporal.steps()) {
      throw InputError("trajectory '" + t.user_id + "' does not cover every step");
    }
    set.labels.push_back(t.user_id);
    set.trajectories.push_back(t.cells);
  }
  return set;
}

std::vector<std::string> slot_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

TrajectorySet truncate(const TrajectorySet& set, std::size_t steps) {
  TrajectorySet out{set.labels, {}, set.grid, set.temporal};
  out.trajectories.reserve(set.size());
  for (const CellSequence& cells : set.trajectories) {
    if (steps > cells.size()) throw InputError("cannot truncate beyond the trajectory length");
    out.trajectories.emplace_back(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(steps));
  }
  return out;
}

CountMatrix count_cells(const TrajectorySet& set) {
  CountMatrix counts(set.length(), set.grid.cell_count());
  for (const CellSequence& cells : set.trajectories) {
    for (std::size_t step = 0; step < cells.size(); ++step) ++counts(step, cells[step].index);
  }
  return counts;
}

}  // namespace trajrec
