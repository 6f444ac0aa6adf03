#ifndef TRAJREC_TESTS_SUPPORT_HPP_
#define TRAJREC_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "trajrec/trajrec.hpp"

namespace trajrec::testing {

// 2008-10-20 00:00 UTC
inline constexpr Timestamp kMidnight = 1'224'460'800;

// rows x cols grid of exactly `side`-meter cells.
inline GridSpec square_grid(std::size_t rows, std::size_t cols, double side = 1'000.0,
                            GeoPoint southwest = {39.9, 116.3}) {
  constexpr double kMetersPerDegree = kEarthRadiusMeters * std::numbers::pi / 180.0;
  const double ne_lat = southwest.latitude + static_cast<double>(rows) * side / kMetersPerDegree;
  const double midline = (southwest.latitude + ne_lat) / 2.0 * std::numbers::pi / 180.0;
  const double ne_lon = southwest.longitude +
                        static_cast<double>(cols) * side / (kMetersPerDegree * std::cos(midline));
  return GridSpec::from_parts(southwest, {ne_lat, ne_lon}, side, rows, cols);
}

inline CellSequence cells(std::initializer_list<std::uint32_t> ids) {
  CellSequence out;
  for (const auto id : ids) out.push_back(CellId{id});
  return out;
}

inline TrajectorySet make_set(std::vector<CellSequence> trajectories, const GridSpec& grid,
                              const TemporalSpec& temporal) {
  return {slot_labels(trajectories.size()), std::move(trajectories), grid, temporal};
}

inline std::vector<DiscreteTrajectory> as_discrete(const TrajectorySet& set) {
  std::vector<DiscreteTrajectory> out;
  for (std::size_t u = 0; u < set.size(); ++u) out.push_back({set.labels[u], set.trajectories[u]});
  return out;
}

// Users wander between neighbouring cells; every record sums to n.
inline std::vector<DiscreteTrajectory> random_walks(std::mt19937_64& rng, std::size_t n,
                                                    std::size_t rows, std::size_t cols,
                                                    std::size_t steps, double move = 0.4) {
  std::uniform_int_distribution<std::size_t> row_of(0, rows - 1);
  std::uniform_int_distribution<std::size_t> col_of(0, cols - 1);
  std::uniform_int_distribution<int> delta(-1, 1);
  std::bernoulli_distribution moves(move);
  std::vector<DiscreteTrajectory> out;
  for (std::size_t u = 0; u < n; ++u) {
    std::size_t r = row_of(rng);
    std::size_t c = col_of(rng);
    DiscreteTrajectory t{"user" + std::to_string(u), {}};
    for (std::size_t s = 0; s < steps; ++s) {
      if (s > 0 && moves(rng)) {
        r = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(r) + delta(rng), 0, static_cast<long>(rows) - 1));
        c = static_cast<std::size_t>(std::clamp<long>(static_cast<long>(c) + delta(rng), 0, static_cast<long>(cols) - 1));
      }
      t.cells.push_back(CellId{static_cast<std::uint32_t>(r * cols + c)});
    }
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<double> row_values(const CostMatrix& m, std::size_t row) {
  const auto r = m.values().row(row);
  return {r.begin(), r.end()};
}

}  // namespace trajrec::testing

#endif  // TRAJREC_TESTS_SUPPORT_HPP_
