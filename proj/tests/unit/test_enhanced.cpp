#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "trajrec/enhanced.hpp"
#include "trajrec/error.hpp"

namespace trajrec {
namespace {

using testing::cells;
using testing::kMidnight;
using testing::square_grid;

BigramMatrix bigram_with_row(std::uint32_t from, std::initializer_list<int> row) {
  BigramMatrix b(row.size());
  std::uint32_t to = 0;
  for (const int count : row) {
    for (int i = 0; i < count; ++i) b.increment(CellId{from}, CellId{to});
    ++to;
  }
  return b;
}

AggregatedDataset walk_dataset(std::uint64_t seed, std::size_t n, std::size_t side, std::size_t steps,
                               std::int64_t interval = 3'600) {
  std::mt19937_64 rng(seed);
  return aggregate(testing::random_walks(rng, n, side, side, steps), TemporalSpec(kMidnight, interval, steps),
                   square_grid(side, side));
}

TEST(FrequentSuccessors, ZeroRowIsEmpty) {
  EXPECT_TRUE(frequent_successors(BigramMatrix(4), CellId{2}).empty());
}

TEST(FrequentSuccessors, TiedMaximaBothIncluded) {
  EXPECT_EQ(frequent_successors(bigram_with_row(0, {0, 5, 5, 1}), CellId{0}), cells({1, 2}));
}

TEST(FrequentSuccessors, SinglePositive) {
  EXPECT_EQ(frequent_successors(bigram_with_row(3, {0, 0, 2, 0}), CellId{3}), cells({2}));
}

TEST(FrequentSuccessors, OutOfRangeThrows) {
  EXPECT_THROW(frequent_successors(BigramMatrix(2), CellId{2}), InputError);
}

TEST(EnhancedStepCosts, EmptyBigramEqualsVelocityExactly) {
  const GridSpec g = square_grid(4, 4);
  const CellCenters centers(g);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::uint32_t> cell(0, 15);
  for (int trial = 0; trial < 50; ++trial) {
    CellSequence prev(7), cur(7), next(7);
    for (std::size_t i = 0; i < 7; ++i) {
      prev[i] = CellId{cell(rng)};
      cur[i] = CellId{cell(rng)};
      next[i] = CellId{cell(rng)};
    }
    std::sort(next.begin(), next.end());
    const ExpandedRecord record{next};
    EXPECT_EQ(enhanced_step_costs(prev, cur, record, centers, BigramMatrix(16)),
              velocity_step_costs(prev, cur, record, centers));
  }
}

TEST(EnhancedStepCosts, FavouriteSuccessorCostsZero) {
  const GridSpec g = square_grid(3, 3);
  const CellCenters centers(g);
  BigramMatrix b(9);
  b.increment(CellId{4}, CellId{0});
  // Moving 3 -> 4 extrapolates to 5, yet cell 0 is free because 4 -> 0 is
  // the historical favourite.
  const CostMatrix c = enhanced_step_costs(cells({3}), cells({4}), ExpandedRecord{cells({0})}, centers, b);
  EXPECT_EQ(c(0, 0), 0.0);
  const CostMatrix v = velocity_step_costs(cells({3}), cells({4}), ExpandedRecord{cells({0})}, centers);
  EXPECT_GT(v(0, 0), 2'000.0);
}

TEST(EnhancedStepCosts, HomeBeatsOffGridExtrapolation) {
  // One row of five cells. User 0 moves 3 -> 4 so q lies 1 km east of the
  // grid; its favourite successor of cell 4 is home (cell 0).
  const GridSpec g = square_grid(1, 5);
  const CellCenters centers(g);
  BigramMatrix b(5);
  b.increment(CellId{4}, CellId{0});
  const CellSequence prev = cells({3, 1, 1, 2, 2});
  const CellSequence cur = cells({4, 1, 1, 2, 2});
  const ExpandedRecord next{cells({0, 1, 2, 3, 4})};
  const CostMatrix c = enhanced_step_costs(prev, cur, next, centers, b);
  const auto row = testing::row_values(c, 0);
  EXPECT_EQ(row[0], 0.0);
  for (std::size_t j = 1; j < 5; ++j) EXPECT_GT(row[j], 0.0);
  // Velocity-only would rank cell 4 (1 km from q) first.
  const CostMatrix v = velocity_step_costs(prev, cur, next, centers);
  EXPECT_NEAR(v(0, 4), 1'000.0, 2.0);
  EXPECT_NEAR(v(0, 0), 5'000.0, 5.0);
  EXPECT_NEAR(row[4], 1'000.0, 2.0);
}

TEST(RecoverDayEnhanced, DayZeroIsStageReducedBaseline) {
  const AggregatedDataset data = walk_dataset(3, 6, 3, 24);
  const CellCenters centers(data.grid());
  // Hand-rolled: trivial, one distance step, then velocity throughout.
  std::vector<CellSequence> by_step{trivial_first_step(expand_record(data.record(0)))};
  for (std::size_t s = 1; s < 24; ++s) {
    const ExpandedRecord next = expand_record(data.record(s));
    const CostMatrix c = s == 1 ? night_step_costs(by_step[0], next, centers)
                                : velocity_step_costs(by_step[s - 2], by_step[s - 1], next, centers);
    by_step.push_back(apply_assignment(solve_min(c), next));
  }
  const DayPrediction p = recover_day_enhanced(data, 0, OnlineState(data));
  for (std::size_t s = 0; s < 24; ++s) {
    for (std::size_t u = 0; u < 6; ++u) EXPECT_EQ(p.sub_trajectories[u][s], by_step[s][u]);
  }
}

TEST(RecoverDayEnhanced, ImmobileMatchesBaseline) {
  const GridSpec g = square_grid(3, 3);
  const TemporalSpec t(kMidnight, 3'600, 48);
  std::vector<DiscreteTrajectory> truth;
  for (std::uint32_t c : {1u, 1u, 4u, 8u}) truth.push_back({"u", CellSequence(48, CellId{c})});
  const AggregatedDataset data = aggregate(truth, t, g);
  OnlineState state(data);
  const DayPrediction day0 = recover_day_enhanced(data, 0, state);
  EXPECT_EQ(day0, recover_day(data, 0));
  link_day(state, day0, {});
  update_bigram(state);
  EXPECT_EQ(recover_day_enhanced(data, 1, state), recover_day(data, 1));
}

TEST(RecoverDayEnhanced, OutOfOrderDayThrows) {
  const AggregatedDataset data = walk_dataset(4, 3, 3, 72);
  EXPECT_THROW(recover_day_enhanced(data, 1, OnlineState(data)), InputError);
}

TEST(RecoverDayEnhanced, LearnedTurnBeatsOvershoot) {
  // 5 x 5 grid, hourly steps, the same day three times.
  // a: home at (0,0), east at 09:00 and 10:00, turns north at 11:00, stays.
  // b: home at (0,4), walks west at 11:00 and 12:00, stays.
  const GridSpec g = square_grid(5, 5);
  const TemporalSpec t(kMidnight, 3'600, 72);
  CellSequence a, b;
  for (int h = 0; h < 24; ++h) {
    a.push_back(CellId{static_cast<std::uint32_t>(h < 9 ? 0 : h == 9 ? 1 : h == 10 ? 2 : 7)});
    b.push_back(CellId{static_cast<std::uint32_t>(h < 11 ? 4 : h == 11 ? 3 : 2)});
  }
  std::vector<DiscreteTrajectory> truth{{"a", {}}, {"b", {}}};
  for (int d = 0; d < 3; ++d) {
    truth[0].cells.insert(truth[0].cells.end(), a.begin(), a.end());
    truth[1].cells.insert(truth[1].cells.end(), b.begin(), b.end());
  }
  const AggregatedDataset data = aggregate(truth, t, g);

  OnlineState state(data);
  for (std::size_t d = 0; d < 2; ++d) {
    link_day(state, recover_day_enhanced(data, d, state), {});
    update_bigram(state);
  }
  const DayPrediction enhanced = recover_day_enhanced(data, 2, state);
  const DayPrediction baseline = recover_day(data, 2);

  // Slot 0 starts in cell 0, i.e. it is user a. At 11:00 the velocity model
  // expects a to keep heading east into cell 3.
  EXPECT_EQ(baseline.sub_trajectories[0][11], CellId{3});
  EXPECT_EQ(enhanced.sub_trajectories[0][11], CellId{7});
  EXPECT_EQ(enhanced.sub_trajectories[0], a);
  EXPECT_EQ(enhanced.sub_trajectories[1], b);
}

TEST(WindowedLinkage, KOneIsBaselineCost) {
  const AggregatedDataset data = walk_dataset(5, 5, 3, 24 * 4);
  OnlineState state(data);
  for (std::size_t d = 0; d < 3; ++d) {
    link_day(state, recover_day_enhanced(data, d, state), {});
    update_bigram(state);
  }
  const DayPrediction next = recover_day_enhanced(data, 3, state);
  const CostMatrix baseline = linkage_costs(state.linked, 2, next, 1);
  for (std::size_t u = 0; u < 5; ++u) {
    for (std::size_t v = 0; v < 5; ++v) {
      const auto& traj = state.linked.trajectories[u];
      const double windowed = windowed_linkage_cost(traj, next.sub_trajectories[v], data.temporal(), {1}, 2);
      EXPECT_EQ(windowed, baseline(u, v));
      const StepRange last = data.temporal().day(2);
      EXPECT_EQ(windowed, information_gain(std::span(traj).subspan(last.begin, last.size()), next.sub_trajectories[v]));
    }
  }
}

TEST(WindowedLinkage, IdenticalOlderDayInsideWindow) {
  const TemporalSpec t(kMidnight, 3'600, 24 * 3);
  CellSequence traj;
  const CellSequence d0 = [] {
    CellSequence s(24, CellId{1});
    s[10] = CellId{2};
    return s;
  }();
  traj.insert(traj.end(), d0.begin(), d0.end());
  traj.insert(traj.end(), 24, CellId{5});
  traj.insert(traj.end(), 24, CellId{6});
  EXPECT_EQ(windowed_linkage_cost(traj, d0, t, {3}, 2), 0.0);
  EXPECT_GT(windowed_linkage_cost(traj, d0, t, {2}, 2), 0.0);
}

TEST(WindowedLinkage, NonIncreasingInK) {
  const AggregatedDataset data = walk_dataset(6, 4, 3, 24 * 6);
  const TrajectorySet set = recover_all(data);
  const StepRange last = data.temporal().day(5);
  for (std::size_t u = 0; u < 4; ++u) {
    const auto candidate = std::span(set.trajectories[(u + 1) % 4]).subspan(last.begin, last.size());
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= 8; ++k) {
      const double c = windowed_linkage_cost(set.trajectories[u], candidate, data.temporal(), {k}, 4);
      EXPECT_LE(c, previous);
      previous = c;
    }
  }
}

TEST(WindowedLinkage, RejectsZeroK) {
  const TemporalSpec t(kMidnight, 3'600, 24);
  const CellSequence s(24, CellId{0});
  EXPECT_THROW(windowed_linkage_cost(s, s, t, {0}, 0), InputError);
}

TEST(UpdateBigram, FirstDayPairs) {
  const GridSpec g = square_grid(1, 2);
  const TemporalSpec t(kMidnight, 8 * 3'600, 3);
  const std::vector<DiscreteTrajectory> truth{{"a", cells({0, 0, 1})}};
  const AggregatedDataset data = aggregate(truth, t, g);
  OnlineState state(data);
  link_day(state, recover_day_enhanced(data, 0, state), {});
  update_bigram(state);
  EXPECT_EQ(state.bigram.count(CellId{0}, CellId{0}), 1);
  EXPECT_EQ(state.bigram.count(CellId{0}, CellId{1}), 1);
  EXPECT_EQ(state.bigram.total(), 2);
  EXPECT_EQ(state.last_day, std::optional<std::size_t>(0));
}

TEST(UpdateBigram, IncrementTotalsPerDay) {
  const std::size_t n = 5, d = 24;
  const AggregatedDataset data = walk_dataset(8, n, 3, d * 3);
  OnlineState state(data);
  std::int64_t before = 0;
  for (std::size_t day = 0; day < 3; ++day) {
    link_day(state, recover_day_enhanced(data, day, state), {});
    update_bigram(state);
    const std::int64_t expected = day == 0 ? static_cast<std::int64_t>(n * (d - 1)) : static_cast<std::int64_t>(n * d);
    EXPECT_EQ(state.bigram.total() - before, expected);
    before = state.bigram.total();
  }
}

TEST(UpdateBigram, CountsMatchLinkedPairs) {
  const AggregatedDataset data = walk_dataset(9, 4, 3, 24 * 2);
  OnlineState state(data);
  for (std::size_t day = 0; day < 2; ++day) {
    link_day(state, recover_day_enhanced(data, day, state), {});
    update_bigram(state);
  }
  BigramMatrix expected(9);
  for (const auto& s : state.linked.trajectories) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) expected.increment(s[i], s[i + 1]);
  }
  EXPECT_EQ(state.bigram, expected);
}

TEST(RunOnline, OneSnapshotPerDayGrowing) {
  const AggregatedDataset data = walk_dataset(10, 5, 3, 24 * 3 + 5);
  std::vector<std::size_t> days, lengths;
  OnlineOptions options;
  options.sink = [&](std::size_t day, std::shared_ptr<const TrajectorySet> s) {
    days.push_back(day);
    lengths.push_back(s->length());
  };
  const TrajectorySet out = run_online(data, options);
  EXPECT_EQ(days, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(lengths, (std::vector<std::size_t>{24, 48, 72, 77}));
  EXPECT_EQ(out.length(), 77u);
  EXPECT_EQ(count_cells(out), data.counts());
}

TEST(RunOnline, LastSnapshotEqualsResult) {
  const AggregatedDataset data = walk_dataset(11, 6, 3, 24 * 4);
  std::shared_ptr<const TrajectorySet> last;
  OnlineOptions options;
  options.sink = [&](std::size_t, std::shared_ptr<const TrajectorySet> s) { last = s; };
  const TrajectorySet out = run_online(data, options);
  ASSERT_TRUE(last);
  EXPECT_EQ(*last, out);
}

TEST(RunOnline, EarlyStopIsPrefixOfFullRun) {
  const AggregatedDataset data = walk_dataset(12, 6, 4, 24 * 7);
  const TrajectorySet full = run_online(data);
  OnlineAttack attack(data, {});
  for (int i = 0; i < 3; ++i) attack.advance();
  EXPECT_EQ(*attack.snapshot(), truncate(full, 72));
}

TEST(RunOnline, SnapshotsAreReaggregationConsistent) {
  const AggregatedDataset data = walk_dataset(13, 7, 3, 24 * 3);
  OnlineOptions options;
  options.sink = [&](std::size_t, std::shared_ptr<const TrajectorySet> s) {
    const CountMatrix counts = count_cells(*s);
    for (std::size_t i = 0; i < counts.rows(); ++i) {
      for (std::size_t j = 0; j < counts.cols(); ++j) EXPECT_EQ(counts(i, j), data.counts()(i, j));
    }
  };
  run_online(data, options);
}

TEST(RunOnline, AdvancePastEndThrows) {
  const AggregatedDataset data = walk_dataset(14, 2, 2, 24);
  OnlineAttack attack(data, {});
  attack.advance();
  EXPECT_TRUE(attack.done());
  EXPECT_THROW(attack.advance(), InputError);
}

TEST(LinkDay, KOneMatchesBaselineLinkage) {
  const AggregatedDataset data = walk_dataset(15, 6, 3, 24 * 5);
  OnlineState state(data);
  for (std::size_t d = 0; d < 5; ++d) {
    const DayPrediction day = recover_day_enhanced(data, d, state);
    if (d > 0) {
      CostMatrix from_baseline, from_enhanced;
      const TrajectorySet base = link_days(state.linked, day, [&](std::size_t, const CostMatrix& c) { from_baseline = c; });
      link_day(state, day, {1}, [&](std::size_t, const CostMatrix& c) { from_enhanced = c; });
      EXPECT_EQ(from_enhanced, from_baseline);
      EXPECT_EQ(state.linked, base);
    } else {
      link_day(state, day, {1});
    }
    update_bigram(state);
  }
}

}  // namespace
}  // namespace trajrec
