#ifndef TRAJREC_IO_HPP_
#define TRAJREC_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "trajrec/evaluation.hpp"
#include "trajrec/ingest.hpp"
#include "trajrec/trajectory.hpp"

// File formats:
//   raw points        user_id,timestamp,lat,lon
//   aggregated counts step,cell_0,...,cell_{m-1}  (+ sidecar JSON, below)
//   ground truth      user_id,step,cell
//   recovered set     user_slot,step,cell[,lat,lon]
//   sidecar JSON      {"temporal": {...}, "grid": {sw_lat, sw_lon, ne_lat,
//                      ne_lon, cell_side_m, rows, cols}}
//   metrics JSON      {accuracy, levenshtein_accuracy, recovery_error_m,
//                      uniqueness: {pred: {k: v}, truth: {k: v}}}
// Floating-point values are written with round-trip precision.
namespace trajrec {

std::string grid_to_json(const GridSpec& grid);
GridSpec grid_from_json(std::string_view text);

struct DatasetMeta {
  TemporalSpec temporal;
  GridSpec grid;
};

std::string meta_to_json(const TemporalSpec& temporal, const GridSpec& grid);
DatasetMeta meta_from_json(std::string_view text);

void write_raw_csv(std::ostream& out, std::span<const RawTrajectory> trajectories);

void write_counts_csv(std::ostream& out, const CountMatrix& counts);
CountMatrix read_counts_csv(std::istream& in);

void save_dataset(const AggregatedDataset& data, const std::filesystem::path& counts_csv,
                  const std::filesystem::path& meta_json);
AggregatedDataset load_dataset(const std::filesystem::path& counts_csv,
                               const std::filesystem::path& meta_json);

void write_ground_truth(std::ostream& out, std::span<const DiscreteTrajectory> trajectories);

void write_trajectory_set(std::ostream& out, const TrajectorySet& set, bool with_coordinates);

// Reads either ground-truth or recovered-set rows. Every trajectory must
// cover the same steps 0..L-1 with L <= temporal.steps(); trajectories keep
// their first-appearance order.
TrajectorySet read_trajectory_set(std::istream& in, const GridSpec& grid,
                                  const TemporalSpec& temporal);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(std::string_view text);

std::string read_file(const std::filesystem::path& path);

// Writes to a temporary sibling then renames, so readers never observe a
// partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace trajrec

#endif  // TRAJREC_IO_HPP_
