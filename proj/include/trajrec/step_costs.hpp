#ifndef TRAJREC_STEP_COSTS_HPP_
#define TRAJREC_STEP_COSTS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "trajrec/assignment.hpp"
#include "trajrec/geo.hpp"

namespace trajrec {

// One time step's counts unrolled into one column per individual, each cell
// repeated by its count, ascending by cell index.
struct ExpandedRecord {
  CellSequence columns;

  std::size_t size() const { return columns.size(); }
};

ExpandedRecord expand_record(std::span<const std::int64_t> record);

// Individual i starts at columns[i].
CellSequence trivial_first_step(const ExpandedRecord& record);

// Cell centers of a grid, computed once and shared by the cost builders.
class CellCenters {
 public:
  explicit CellCenters(const GridSpec& grid) : grid_(&grid), centers_(grid.cell_centers()) {}

  const GridSpec& grid() const { return *grid_; }
  const GeoPoint& operator[](CellId cell) const { return centers_[cell.index]; }

 private:
  const GridSpec* grid_;
  std::vector<GeoPoint> centers_;
};

// q = p + (p - p_prev), computed in the grid's local east/north plane.
GeoPoint extrapolate(const GeoPoint& previous, const GeoPoint& current, const GridSpec& grid);

// cost[i][j] = distance from current_cells[i] to next.columns[j].
CostMatrix night_step_costs(std::span<const CellId> current_cells, const ExpandedRecord& next,
                            const CellCenters& centers);

// cost[i][j] = distance from next.columns[j] to individual i's linear
// extrapolation, which is not snapped to a cell.
CostMatrix velocity_step_costs(std::span<const CellId> previous_cells,
                               std::span<const CellId> current_cells,
                               const ExpandedRecord& next, const CellCenters& centers);

// Shared kernel: cost[i][j] = min over anchors[i] of distance(center(column j), anchor).
CostMatrix anchored_costs(std::span<const std::vector<GeoPoint>> anchors,
                          const ExpandedRecord& next, const CellCenters& centers);

// Applies the solver's assignment: individual i moves to columns[mapping[i]].
CellSequence apply_assignment(const Assignment& assignment, const ExpandedRecord& next);

}  // namespace trajrec

#endif  // TRAJREC_STEP_COSTS_HPP_
