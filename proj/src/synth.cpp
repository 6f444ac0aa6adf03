#include "trajrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "trajrec/error.hpp"

namespace trajrec {

const char* to_string(MobilityProfile profile) {
  switch (profile) {
    case MobilityProfile::kStatic: return "static";
    case MobilityProfile::kCommuter: return "commuter";
    case MobilityProfile::kRandomWalk: return "random-walk";
  }
  return "unknown";
}

MobilityProfile parse_profile(std::string_view name) {
  if (name == "static") return MobilityProfile::kStatic;
  if (name == "commuter") return MobilityProfile::kCommuter;
  if (name == "random-walk") return MobilityProfile::kRandomWalk;
  throw InputError("unknown mobility profile '" + std::string(name) +
                   "' (expected static, commuter or random-walk)");
}

namespace {

// std distributions are implementation-defined; these draws are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct Cell {
  std::int64_t row;
  std::int64_t col;
};

class Layout {
 public:
  Layout(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  CellId id(const Cell& c) const {
    return CellId{static_cast<std::uint32_t>(c.row * static_cast<std::int64_t>(cols_) + c.col)};
  }
  Cell cell(std::size_t index) const {
    return {static_cast<std::int64_t>(index / cols_), static_cast<std::int64_t>(index % cols_)};
  }
  std::size_t size() const { return rows_ * cols_; }

  Cell neighbour(const Cell& c, Rng& rng) const {
    std::vector<Cell> options;
    for (std::int64_t dr = -1; dr <= 1; ++dr) {
      for (std::int64_t dc = -1; dc <= 1; ++dc) {
        const Cell n{c.row + dr, c.col + dc};
        if ((dr != 0 || dc != 0) && inside(n)) options.push_back(n);
      }
    }
    return options.empty() ? c : options[rng.below(options.size())];
  }

 private:
  bool inside(const Cell& c) const {
    return c.row >= 0 && c.col >= 0 && c.row < static_cast<std::int64_t>(rows_) &&
           c.col < static_cast<std::int64_t>(cols_);
  }

  std::size_t rows_;
  std::size_t cols_;
};

// Distinct cells while the grid has room, otherwise independent draws.
std::vector<std::size_t> pick_cells(std::size_t count, std::size_t cells, Rng& rng) {
  std::vector<std::size_t> picked;
  if (count <= cells) {
    std::vector<std::size_t> pool(cells);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(pool[i], pool[i + rng.below(cells - i)]);
      picked.push_back(pool[i]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) picked.push_back(rng.below(cells));
  }
  return picked;
}

Cell lerp(const Cell& from, const Cell& to, std::int64_t k, std::int64_t steps) {
  const auto along = [&](std::int64_t a, std::int64_t b) {
    return a + static_cast<std::int64_t>(std::lround(static_cast<double>((b - a) * k) /
                                                     static_cast<double>(steps)));
  };
  return {along(from.row, to.row), along(from.col, to.col)};
}

struct Commute {
  Cell home;
  Cell work;
  std::int64_t leave_home;  // seconds after midnight
  std::int64_t leave_work;
  std::int64_t travel_steps;
};

Cell commuter_position(const Commute& c, std::int64_t time_of_day, std::int64_t interval) {
  const std::int64_t travel = c.travel_steps * interval;
  if (time_of_day < c.leave_home) return c.home;
  if (time_of_day < c.leave_home + travel) {
    return lerp(c.home, c.work, (time_of_day - c.leave_home) / interval + 1, c.travel_steps);
  }
  if (time_of_day < c.leave_work) return c.work;
  if (time_of_day < c.leave_work + travel) {
    return lerp(c.work, c.home, (time_of_day - c.leave_work) / interval + 1, c.travel_steps);
  }
  return c.home;
}

bool moving_at(const std::vector<Cell>& day, std::size_t s) {
  const auto same = [](const Cell& a, const Cell& b) { return a.row == b.row && a.col == b.col; };
  return (s > 0 && !same(day[s - 1], day[s])) || (s + 1 < day.size() && !same(day[s], day[s + 1]));
}

// Number of steps at which two users come within two cells of each other
// while one of them travels, or share a cell at all.
std::size_t conflicts(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  std::size_t count = 0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    const std::int64_t gap = std::max(std::abs(a[s].row - b[s].row), std::abs(a[s].col - b[s].col));
    if (gap == 0 || (gap <= 2 && (moving_at(a, s) || moving_at(b, s)))) ++count;
  }
  return count;
}

// Homes and workplaces are all distinct while the grid has room. Each
// plan is redrawn until the user keeps clear of earlier users (or the
// attempts run out, in which case the least conflicting draw is kept).
std::vector<Commute> plan_commuters(std::size_t users, const Layout& layout, std::int64_t interval,
                                    Rng& rng) {
  constexpr int kAttempts = 1000;
  const std::size_t m = layout.size();
  const auto slots = [&](std::int64_t window) {
    return static_cast<std::size_t>(window / interval + 1);
  };

  std::vector<bool> used(m, false);
  std::size_t free_cells = m;
  // Uniform over the cells no earlier user lives or works in, when any remain.
  const auto draw_cell = [&](std::size_t exclude) {
    const std::size_t available = free_cells - (exclude < m && !used[exclude] ? 1 : 0);
    if (available == 0) return rng.below(m);
    std::size_t pick = rng.below(available);
    for (std::size_t c = 0;; ++c) {
      if (used[c] || c == exclude) continue;
      if (pick-- == 0) return c;
    }
  };
  std::vector<std::vector<Cell>> placed;
  std::vector<Commute> plans;
  for (std::size_t u = 0; u < users; ++u) {
    Commute best{};
    std::vector<Cell> best_day;
    std::size_t best_conflicts = std::numeric_limits<std::size_t>::max();
    for (int attempt = 0; attempt < kAttempts && best_conflicts > 0; ++attempt) {
      Commute c{};
      const std::size_t home = draw_cell(m);
      c.home = layout.cell(home);
      c.work = layout.cell(draw_cell(home));
      c.leave_home = 7 * 3'600 + static_cast<std::int64_t>(rng.below(slots(2 * 3'600))) * interval;
      c.leave_work = 16 * 3'600 + static_cast<std::int64_t>(rng.below(slots(3 * 3'600))) * interval;
      c.travel_steps = std::max<std::int64_t>(
          1, std::max(std::abs(c.work.row - c.home.row), std::abs(c.work.col - c.home.col)));
      std::vector<Cell> day;
      for (std::int64_t tod = 0; tod < kSecondsPerDay; tod += interval) {
        day.push_back(commuter_position(c, tod, interval));
      }
      std::size_t total = 0;
      for (const std::vector<Cell>& other : placed) total += conflicts(day, other);
      if (total < best_conflicts) {
        best = c;
        best_day = std::move(day);
        best_conflicts = total;
      }
    }
    for (const Cell& anchor : {best.home, best.work}) {
      const std::size_t index = layout.id(anchor).index;
      if (!used[index]) {
        used[index] = true;
        --free_cells;
      }
    }
    placed.push_back(std::move(best_day));
    plans.push_back(best);
  }
  return plans;
}

GridSpec make_grid(const SynthConfig& config) {
  constexpr double kMetersPerDegree = kEarthRadiusMeters * std::numbers::pi / 180.0;
  const double north = static_cast<double>(config.rows) * config.cell_side_m;
  const double east = static_cast<double>(config.cols) * config.cell_side_m;
  const double ne_lat = config.southwest.latitude + north / kMetersPerDegree;
  const double midline = (config.southwest.latitude + ne_lat) / 2.0 * std::numbers::pi / 180.0;
  const double ne_lon = config.southwest.longitude + east / (kMetersPerDegree * std::cos(midline));
  return GridSpec::from_parts(config.southwest, {ne_lat, ne_lon}, config.cell_side_m, config.rows,
                              config.cols);
}

}  // namespace

SynthDataset synthesize(const SynthConfig& config) {
  if (config.users == 0) throw InputError("synthetic population must be positive");
  if (config.days == 0) throw InputError("synthetic dataset needs at least one day");
  if (config.interval_seconds <= 0 || kSecondsPerDay % config.interval_seconds != 0) {
    throw InputError("interval must be positive and evenly divide 86400 seconds");
  }
  if (config.rows == 0 || config.cols == 0) throw InputError("grid must have at least one cell");
  if (!(config.noise >= 0.0 && config.noise <= 1.0)) throw InputError("noise must lie in [0, 1]");

  const std::size_t steps_per_day = static_cast<std::size_t>(kSecondsPerDay / config.interval_seconds);
  SynthDataset out{make_grid(config),
                   TemporalSpec(config.start, config.interval_seconds, steps_per_day * config.days),
                   {}};
  const Layout layout(config.rows, config.cols);
  Rng rng(config.seed);
  const std::int64_t interval = config.interval_seconds;
  const std::size_t t = out.temporal.steps();

  std::vector<Commute> commutes;
  std::vector<std::size_t> homes;
  if (config.profile == MobilityProfile::kCommuter) {
    commutes = plan_commuters(config.users, layout, interval, rng);
    for (const Commute& c : commutes) homes.push_back(layout.id(c.home).index);
  } else {
    homes = pick_cells(config.users, layout.size(), rng);
  }
  for (std::size_t u = 0; u < config.users; ++u) {
    char label[16];
    std::snprintf(label, sizeof(label), "u%04zu", u);
    DiscreteTrajectory trajectory{label, CellSequence(t)};
    const Cell home = layout.cell(homes[u]);

    switch (config.profile) {
      case MobilityProfile::kStatic:
        for (std::size_t s = 0; s < t; ++s) trajectory.cells[s] = layout.id(home);
        break;
      case MobilityProfile::kCommuter: {
        const Commute& commute = commutes[u];
        for (std::size_t s = 0; s < t; ++s) {
          trajectory.cells[s] =
              layout.id(commuter_position(commute, out.temporal.time_of_day(s), interval));
        }
        break;
      }
      case MobilityProfile::kRandomWalk: {
        Cell at = home;
        for (std::size_t s = 0; s < t; ++s) {
          if (s > 0 && rng.unit() < 0.5) at = layout.neighbour(at, rng);
          trajectory.cells[s] = layout.id(at);
        }
        break;
      }
    }

    if (config.noise > 0.0) {
      for (std::size_t s = 0; s < t; ++s) {
        if (rng.unit() < config.noise) {
          const CellId c = trajectory.cells[s];
          trajectory.cells[s] = layout.id(layout.neighbour(layout.cell(c.index), rng));
        }
      }
    }
    out.truth.push_back(std::move(trajectory));
  }
  return out;
}

std::vector<RawTrajectory> to_raw(const SynthDataset& dataset) {
  std::vector<RawTrajectory> raw;
  raw.reserve(dataset.truth.size());
  for (const DiscreteTrajectory& t : dataset.truth) {
    RawTrajectory r{t.user_id, {}};
    r.points.reserve(t.cells.size());
    for (std::size_t s = 0; s < t.cells.size(); ++s) {
      r.points.push_back({dataset.temporal.instant(s), dataset.grid.cell_center(t.cells[s])});
    }
    raw.push_back(std::move(r));
  }
  return raw;
}

}  // namespace trajrec
