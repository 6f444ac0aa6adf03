#ifndef TRAJREC_INGEST_HPP_
#define TRAJREC_INGEST_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trajrec/geo.hpp"
#include "trajrec/matrix.hpp"

namespace trajrec {

using Timestamp = std::int64_t;  // Unix seconds

inline constexpr std::int64_t kSecondsPerDay = 86'400;
inline constexpr std::int64_t kNightEndSeconds = 6 * 3'600;

struct TimedPoint {
  Timestamp timestamp = 0;
  GeoPoint location;

  friend bool operator==(const TimedPoint&, const TimedPoint&) = default;
};

// One user's GPS record, strictly increasing in time.
struct RawTrajectory {
  std::string user_id;
  std::vector<TimedPoint> points;

  friend bool operator==(const RawTrajectory&, const RawTrajectory&) = default;
};

// Half-open range of global step indices [begin, end).
struct StepRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }

  friend bool operator==(const StepRange&, const StepRange&) = default;
};

// The regular time grid: `steps` instants `interval` seconds apart.
//
// Construction only requires positive values so that datasets breaking the
// attack requirements (interval not dividing a day, late start) can still be
// represented and reported by validate_dataset(). Days are consecutive blocks
// of steps_per_day() steps counted from step 0; the last may be partial.
class TemporalSpec {
 public:
  TemporalSpec(Timestamp start, std::int64_t interval_seconds, std::size_t steps);

  Timestamp start() const { return start_; }
  std::int64_t interval() const { return interval_; }
  std::size_t steps() const { return steps_; }
  std::size_t steps_per_day() const;
  bool divides_day() const { return kSecondsPerDay % interval_ == 0; }

  Timestamp instant(std::size_t step) const;
  // Seconds since midnight (UTC) of the instant at `step`.
  std::int64_t time_of_day(std::size_t step) const;

  std::size_t day_count() const;
  StepRange day(std::size_t day_index) const;

  friend bool operator==(const TemporalSpec&, const TemporalSpec&) = default;

 private:
  Timestamp start_;
  std::int64_t interval_;
  std::size_t steps_;
};

// A user's location at every instant of a TemporalSpec.
struct DiscreteTrajectory {
  std::string user_id;
  CellSequence cells;

  friend bool operator==(const DiscreteTrajectory&, const DiscreteTrajectory&) = default;
};

using CountMatrix = Matrix<std::int64_t>;

// The attack input: counts(step, cell) people per cell per step.
//
// Construction checks shape only; population constancy and the other
// attack requirements are checked by validate_dataset().
class AggregatedDataset {
 public:
  AggregatedDataset(CountMatrix counts, TemporalSpec temporal, GridSpec grid);

  const CountMatrix& counts() const { return counts_; }
  const TemporalSpec& temporal() const { return temporal_; }
  const GridSpec& grid() const { return grid_; }

  std::size_t steps() const { return counts_.rows(); }
  std::size_t locations() const { return counts_.cols(); }
  std::span<const std::int64_t> record(std::size_t step) const { return counts_.row(step); }

  // Sum of the first record.
  std::int64_t population() const;

  friend bool operator==(const AggregatedDataset&, const AggregatedDataset&) = default;

 private:
  CountMatrix counts_;
  TemporalSpec temporal_;
  GridSpec grid_;
};

enum class ViolationKind {
  kRowSum,
  kInterval,
  kStartTime,
  kNegativeCount,
};

struct Violation {
  ViolationKind kind;
  std::optional<std::size_t> row;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

const char* to_string(ViolationKind kind);

enum class InputFormat { kCsv };

// Reads `user_id,timestamp,lat,lon` rows. Trajectories are returned sorted by
// user id, points sorted by time; a repeated (user, timestamp) keeps the row
// that appears last. Throws ParseError on malformed rows.
std::vector<RawTrajectory> parse_trajectories(std::istream& source,
                                              InputFormat format = InputFormat::kCsv);

// Floors every timestamp onto the time grid, keeps the last point per instant
// and drops points outside the window. Throws DataError if nothing remains.
RawTrajectory resample(const RawTrajectory& trajectory, const TemporalSpec& temporal);

// Fills every instant (forward fill, head back-filled from the first point),
// clamps to the grid and assigns cells.
DiscreteTrajectory static_interpolate(const RawTrajectory& trajectory,
                                      const TemporalSpec& temporal, const GridSpec& grid);

AggregatedDataset aggregate(std::span<const DiscreteTrajectory> trajectories,
                            const TemporalSpec& temporal, const GridSpec& grid);

ValidationReport validate_dataset(const AggregatedDataset& data);

// Throws DataError listing the violations unless the report is clean.
void require_valid(const AggregatedDataset& data);

}  // namespace trajrec

#endif  // TRAJREC_INGEST_HPP_
