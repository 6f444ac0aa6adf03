#include "trajrec/step_costs.hpp"

#include <algorithm>
#include <limits>

#include "trajrec/error.hpp"

namespace trajrec {

ExpandedRecord expand_record(std::span<const std::int64_t> record) {
  ExpandedRecord expanded;
  for (std::size_t cell = 0; cell < record.size(); ++cell) {
    if (record[cell] < 0) throw InputError("negative count in record");
    expanded.columns.insert(expanded.columns.end(), static_cast<std::size_t>(record[cell]),
                            CellId{static_cast<std::uint32_t>(cell)});
  }
  return expanded;
}

CellSequence trivial_first_step(const ExpandedRecord& record) { return record.columns; }

GeoPoint extrapolate(const GeoPoint& previous, const GeoPoint& current, const GridSpec& grid) {
  const LocalPoint p0 = grid.to_local(previous);
  const LocalPoint p1 = grid.to_local(current);
  return grid.from_local({p1.east + (p1.east - p0.east), p1.north + (p1.north - p0.north)});
}

CostMatrix anchored_costs(std::span<const std::vector<GeoPoint>> anchors,
                          const ExpandedRecord& next, const CellCenters& centers) {
  const std::size_t n = next.size();
  if (anchors.size() != n) {
    throw InputError("cost matrix needs " + std::to_string(n) + " individuals, got " +
                     std::to_string(anchors.size()));
  }
  // Columns are sorted, so equal cells form runs; distances are computed once
  // per distinct cell.
  std::vector<CellId> distinct;
  std::vector<std::size_t> run_of(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (distinct.empty() || distinct.back() != next.columns[j]) distinct.push_back(next.columns[j]);
    run_of[j] = distinct.size() - 1;
  }

  Matrix<double> values(n, n);
  std::vector<double> per_cell(distinct.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < distinct.size(); ++c) {
      const GeoPoint& center = centers[distinct[c]];
      double best = std::numeric_limits<double>::infinity();
      for (const GeoPoint& anchor : anchors[i]) best = std::min(best, distance(center, anchor));
      per_cell[c] = best;
    }
    for (std::size_t j = 0; j < n; ++j) values(i, j) = per_cell[run_of[j]];
  }
  return CostMatrix(std::move(values));
}

CostMatrix night_step_costs(std::span<const CellId> current_cells, const ExpandedRecord& next,
                            const CellCenters& centers) {
  std::vector<std::vector<GeoPoint>> anchors;
  anchors.reserve(current_cells.size());
  for (const CellId cell : current_cells) anchors.push_back({centers[cell]});
  return anchored_costs(anchors, next, centers);
}

CostMatrix velocity_step_costs(std::span<const CellId> previous_cells,
                               std::span<const CellId> current_cells,
                               const ExpandedRecord& next, const CellCenters& centers) {
  if (previous_cells.size() != current_cells.size()) {
    throw InputError("previous and current steps differ in population");
  }
  std::vector<std::vector<GeoPoint>> anchors;
  anchors.reserve(current_cells.size());
  for (std::size_t i = 0; i < current_cells.size(); ++i) {
    anchors.push_back(
        {extrapolate(centers[previous_cells[i]], centers[current_cells[i]], centers.grid())});
  }
  return anchored_costs(anchors, next, centers);
}

CellSequence apply_assignment(const Assignment& assignment, const ExpandedRecord& next) {
  CellSequence cells(assignment.mapping.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = next.columns[assignment.mapping[i]];
  return cells;
}

}  // namespace trajrec
