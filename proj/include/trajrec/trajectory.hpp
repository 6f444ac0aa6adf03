#ifndef TRAJREC_TRAJECTORY_HPP_
#define TRAJREC_TRAJECTORY_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "trajrec/geo.hpp"
#include "trajrec/ingest.hpp"

namespace trajrec {

// n cell sequences over one grid and time axis. Recovered sets label their
// anonymous slots "0".."n-1"; ground-truth sets carry user ids.
struct TrajectorySet {
  std::vector<std::string> labels;
  std::vector<CellSequence> trajectories;
  GridSpec grid;
  TemporalSpec temporal;

  std::size_t size() const { return trajectories.size(); }
  // Number of steps covered (all trajectories share one length).
  std::size_t length() const { return trajectories.empty() ? 0 : trajectories.front().size(); }

  friend bool operator==(const TrajectorySet&, const TrajectorySet&) = default;
};

TrajectorySet make_trajectory_set(std::span<const DiscreteTrajectory> trajectories,
                                  const GridSpec& grid, const TemporalSpec& temporal);

std::vector<std::string> slot_labels(std::size_t n);

// First `steps` steps of every trajectory.
TrajectorySet truncate(const TrajectorySet& set, std::size_t steps);

// Re-aggregates the covered prefix into per-step cell counts.
CountMatrix count_cells(const TrajectorySet& set);

}  // namespace trajrec

#endif  // TRAJREC_TRAJECTORY_HPP_
