#ifndef TRAJREC_SRC_LINKAGE_DETAIL_HPP_
#define TRAJREC_SRC_LINKAGE_DETAIL_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "trajrec/baseline.hpp"

namespace trajrec::detail {

// Sorted (cell, count) bins of a sub-trajectory plus its entropy in bits.
struct Histogram {
  std::vector<std::pair<std::uint32_t, std::size_t>> bins;
  std::size_t total = 0;
  double entropy = 0.0;
};

Histogram histogram(std::span<const CellId> cells);
double information_gain(const Histogram& a, const Histogram& b);

std::vector<CellSequence> transpose_steps(const std::vector<CellSequence>& by_step);

// Expands the record at `step`, throwing DataError unless it holds n people.
ExpandedRecord expand_checked(const AggregatedDataset& data, std::size_t step, std::size_t n);

// Extends trajectory u with sub-trajectory assignment.mapping[u].
void append_linked(TrajectorySet& set, const DayPrediction& next, const Assignment& assignment);

}  // namespace trajrec::detail

#endif  // TRAJREC_SRC_LINKAGE_DETAIL_HPP_
