#include "trajrec/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

#include "trajrec/error.hpp"

namespace trajrec {

TemporalSpec::TemporalSpec(Timestamp start, std::int64_t interval_seconds,
                           std::size_t steps)
    : start_(start), interval_(interval_seconds), steps_(steps) {
  if (interval_seconds <= 0) throw InputError("interval must be positive");
  if (steps == 0) throw InputError("a temporal grid needs at least one step");
}

std::size_t TemporalSpec::steps_per_day() const {
  return static_cast<std::size_t>(std::max<std::int64_t>(1, kSecondsPerDay / interval_));
}

Timestamp TemporalSpec::instant(std::size_t step) const {
  return start_ + static_cast<std::int64_t>(step) * interval_;
}

std::int64_t TemporalSpec::time_of_day(std::size_t step) const {
  const std::int64_t r = instant(step) % kSecondsPerDay;
  return r < 0 ? r + kSecondsPerDay : r;
}

std::size_t TemporalSpec::day_count() const {
  const std::size_t d = steps_per_day();
  return (steps_ + d - 1) / d;
}

StepRange TemporalSpec::day(std::size_t day_index) const {
  if (day_index >= day_count()) {
    throw InputError("day " + std::to_string(day_index) + " is out of range (" +
                     std::to_string(day_count()) + " days)");
  }
  const std::size_t d = steps_per_day();
  const std::size_t begin = day_index * d;
  return {begin, std::min(begin + d, steps_)};
}

AggregatedDataset::AggregatedDataset(CountMatrix counts, TemporalSpec temporal,
                                     GridSpec grid)
    : counts_(std::move(counts)), temporal_(temporal), grid_(grid) {
  if (counts_.rows() != temporal_.steps()) {
    throw InputError("dataset has " + std::to_string(counts_.rows()) +
                     " records but the temporal grid has " +
                     std::to_string(temporal_.steps()) + " steps");
  }
  if (counts_.cols() != grid_.cell_count()) {
    throw InputError("dataset has " + std::to_string(counts_.cols()) +
                     " locations but the grid has " + std::to_string(grid_.cell_count()) +
                     " cells");
  }
}

std::int64_t AggregatedDataset::population() const {
  const auto first = record(0);
  return std::accumulate(first.begin(), first.end(), std::int64_t{0});
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kRowSum: return "row_sum";
    case ViolationKind::kInterval: return "interval";
    case ViolationKind::kStartTime: return "start_time";
    case ViolationKind::kNegativeCount: return "negative_count";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* name) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
  }
  return value;
}

struct Row {
  Timestamp timestamp;
  std::size_t order;
  GeoPoint location;
};

}  // namespace

std::vector<RawTrajectory> parse_trajectories(std::istream& source, InputFormat format) {
  if (format != InputFormat::kCsv) throw InputError("unsupported input format");

  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (!have_header && std::getline(source, line)) {
    ++line_number;
    std::string_view view = line;
    if (line_number == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (view.empty()) continue;
    const auto header = split_fields(view);
    if (header != std::vector<std::string_view>{"user_id", "timestamp", "lat", "lon"}) {
      throw ParseError(line_number, "expected header 'user_id,timestamp,lat,lon'");
    }
    have_header = true;
  }
  if (!have_header) throw ParseError(std::max<std::size_t>(line_number, 1), "missing header");

  std::map<std::string, std::vector<Row>, std::less<>> by_user;
  std::size_t order = 0;
  while (std::getline(source, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split_fields(view);
    if (fields.size() != 4) {
      throw ParseError(line_number, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(line_number, "empty user_id");
    const auto timestamp = parse_number<Timestamp>(fields[1], line_number, "timestamp");
    const auto lat = parse_number<double>(fields[2], line_number, "lat");
    const auto lon = parse_number<double>(fields[3], line_number, "lon");
    if (!(lat >= -90.0 && lat <= 90.0)) {
      throw ParseError(line_number, "lat " + std::string(fields[2]) + " outside [-90, 90]");
    }
    if (!(lon >= -180.0 && lon <= 180.0)) {
      throw ParseError(line_number, "lon " + std::string(fields[3]) + " outside [-180, 180]");
    }
    auto it = by_user.find(fields[0]);
    if (it == by_user.end()) it = by_user.emplace(std::string(fields[0]), std::vector<Row>{}).first;
    it->second.push_back({timestamp, order++, {lat, lon}});
  }

  std::vector<RawTrajectory> trajectories;
  trajectories.reserve(by_user.size());
  for (auto& [user, rows] : by_user) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.order < b.order;
    });
    RawTrajectory trajectory{user, {}};
    trajectory.points.reserve(rows.size());
    for (const Row& row : rows) {
      if (!trajectory.points.empty() && trajectory.points.back().timestamp == row.timestamp) {
        trajectory.points.back().location = row.location;
      } else {
        trajectory.points.push_back({row.timestamp, row.location});
      }
    }
    trajectories.push_back(std::move(trajectory));
  }
  return trajectories;
}

RawTrajectory resample(const RawTrajectory& trajectory, const TemporalSpec& temporal) {
  std::vector<TimedPoint> points = trajectory.points;
  std::stable_sort(points.begin(), points.end(),
                   [](const TimedPoint& a, const TimedPoint& b) { return a.timestamp < b.timestamp; });

  const Timestamp start = temporal.start();
  const Timestamp end = temporal.instant(temporal.steps());
  RawTrajectory out{trajectory.user_id, {}};
  for (const TimedPoint& p : points) {
    if (p.timestamp < start || p.timestamp >= end) continue;
    const Timestamp floored =
        start + (p.timestamp - start) / temporal.interval() * temporal.interval();
    if (!out.points.empty() && out.points.back().timestamp == floored) {
      out.points.back().location = p.location;
    } else {
      out.points.push_back({floored, p.location});
    }
  }
  if (out.points.empty()) {
    throw DataError("trajectory '" + trajectory.user_id + "' has no points inside the time window");
  }
  return out;
}

DiscreteTrajectory static_interpolate(const RawTrajectory& trajectory,
                                      const TemporalSpec& temporal, const GridSpec& grid) {
  const std::size_t t = temporal.steps();
  std::vector<std::optional<GeoPoint>> known(t);
  bool any = false;
  for (const TimedPoint& p : trajectory.points) {
    if (p.timestamp < temporal.start()) continue;
    const auto step =
        static_cast<std::size_t>((p.timestamp - temporal.start()) / temporal.interval());
    if (step >= t) continue;
    known[step] = p.location;
    any = true;
  }
  if (!any) {
    throw DataError("trajectory '" + trajectory.user_id + "' is empty inside the time window");
  }

  DiscreteTrajectory out{trajectory.user_id, CellSequence(t)};
  const auto first = std::find_if(known.begin(), known.end(),
                                  [](const auto& p) { return p.has_value(); });
  GeoPoint current = **first;
  for (std::size_t i = 0; i < t; ++i) {
    if (known[i]) current = *known[i];
    out.cells[i] = grid.assign_cell(grid.clamp(current));
  }
  return out;
}

AggregatedDataset aggregate(std::span<const DiscreteTrajectory> trajectories,
                            const TemporalSpec& temporal, const GridSpec& grid) {
  if (trajectories.empty()) throw InputError("cannot aggregate an empty population");
  CountMatrix counts(temporal.steps(), grid.cell_count());
  for (const DiscreteTrajectory& trajectory : trajectories) {
    if (trajectory.cells.size() != temporal.steps()) {
      throw InputError("trajectory '" + trajectory.user_id + "' has " +
                       std::to_string(trajectory.cells.size()) + " steps, expected " +
                       std::to_string(temporal.steps()));
    }
    for (std::size_t step = 0; step < trajectory.cells.size(); ++step) {
      const CellId cell = trajectory.cells[step];
      if (!grid.is_valid(cell)) {
        throw InputError("trajectory '" + trajectory.user_id + "' uses cell " +
                         std::to_string(cell.index) + " outside the grid");
      }
      ++counts(step, cell.index);
    }
  }
  return AggregatedDataset(std::move(counts), temporal, grid);
}

ValidationReport validate_dataset(const AggregatedDataset& data) {
  ValidationReport report;
  const TemporalSpec& temporal = data.temporal();

  std::vector<std::int64_t> sums(data.steps());
  for (std::size_t i = 0; i < data.steps(); ++i) {
    const auto record = data.record(i);
    sums[i] = std::accumulate(record.begin(), record.end(), std::int64_t{0});
  }
  // The most common row sum is taken as n so that a single bad row is the
  // one reported, wherever it sits.
  std::map<std::int64_t, std::size_t> frequency;
  for (const auto s : sums) ++frequency[s];
  const auto n = std::max_element(frequency.begin(), frequency.end(), [](const auto& a, const auto& b) {
                   return a.second < b.second;
                 })->first;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (sums[i] != n) {
      report.violations.push_back({ViolationKind::kRowSum, i,
                                   "record " + std::to_string(i) + " sums to " +
                                       std::to_string(sums[i]) + ", expected " + std::to_string(n)});
    }
  }

  if (!temporal.divides_day()) {
    report.violations.push_back({ViolationKind::kInterval, std::nullopt,
                                 "interval of " + std::to_string(temporal.interval()) +
                                     " s does not evenly divide 24 hours"});
  }
  const std::int64_t start_of_day = temporal.time_of_day(0);
  if (start_of_day >= kNightEndSeconds) {
    report.violations.push_back({ViolationKind::kStartTime, std::nullopt,
                                 "records start at " + std::to_string(start_of_day) +
                                     " s after midnight, outside [00:00, 06:00)"});
  }

  for (std::size_t i = 0; i < data.steps(); ++i) {
    const auto record = data.record(i);
    if (std::any_of(record.begin(), record.end(), [](std::int64_t c) { return c < 0; })) {
      report.violations.push_back({ViolationKind::kNegativeCount, i,
                                   "record " + std::to_string(i) + " has a negative count"});
    }
  }
  return report;
}

void require_valid(const AggregatedDataset& data) {
  const ValidationReport report = validate_dataset(data);
  if (report.ok()) {
    if (data.population() <= 0) throw DataError("dataset has no individuals");
    return;
  }
  std::ostringstream message;
  message << "dataset fails " << report.violations.size() << " requirement(s):";
  for (std::size_t i = 0; i < std::min<std::size_t>(report.violations.size(), 5); ++i) {
    message << "\n  " << report.violations[i].message;
  }
  throw DataError(message.str());
}

}  // namespace trajrec
