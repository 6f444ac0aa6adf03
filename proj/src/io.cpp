#include "trajrec/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "trajrec/error.hpp"

namespace trajrec {

using nlohmann::json;

namespace {

json grid_json(const GridSpec& grid) {
  return {{"sw_lat", grid.southwest().latitude}, {"sw_lon", grid.southwest().longitude},
          {"ne_lat", grid.northeast().latitude}, {"ne_lon", grid.northeast().longitude},
          {"cell_side_m", grid.cell_side()},     {"rows", grid.rows()},
          {"cols", grid.cols()}};
}

GridSpec grid_of(const json& j) {
  return GridSpec::from_parts({j.at("sw_lat").get<double>(), j.at("sw_lon").get<double>()},
                              {j.at("ne_lat").get<double>(), j.at("ne_lon").get<double>()},
                              j.at("cell_side_m").get<double>(), j.at("rows").get<std::size_t>(),
                              j.at("cols").get<std::size_t>());
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

template <typename F>
auto with_json_errors(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON document: ") + e.what());
  }
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(kSpace) - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    fields.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) return fields;
    pos = comma + 1;
  }
}

template <typename T>
T number(std::string_view field, std::size_t line) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc{} || ptr != end) {
    throw ParseError(line, "invalid number '" + std::string(field) + "'");
  }
  return value;
}

json uniqueness_json(const std::map<std::size_t, double>& values) {
  json out = json::object();
  for (const auto& [k, v] : values) out[std::to_string(k)] = v;
  return out;
}

std::map<std::size_t, double> uniqueness_of(const json& j) {
  std::map<std::size_t, double> out;
  for (const auto& [k, v] : j.items()) out[std::stoul(k)] = v.get<double>();
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string grid_to_json(const GridSpec& grid) { return grid_json(grid).dump(2); }

GridSpec grid_from_json(std::string_view text) {
  const json j = parse_json(text);
  return with_json_errors([&] { return grid_of(j); });
}

std::string meta_to_json(const TemporalSpec& temporal, const GridSpec& grid) {
  const json j = {{"temporal",
                   {{"start_timestamp", temporal.start()},
                    {"interval_s", temporal.interval()},
                    {"steps", temporal.steps()},
                    {"steps_per_day", temporal.steps_per_day()}}},
                  {"grid", grid_json(grid)}};
  return j.dump(2);
}

DatasetMeta meta_from_json(std::string_view text) {
  const json j = parse_json(text);
  return with_json_errors([&] {
    const json& t = j.at("temporal");
    return DatasetMeta{TemporalSpec(t.at("start_timestamp").get<Timestamp>(),
                                    t.at("interval_s").get<std::int64_t>(),
                                    t.at("steps").get<std::size_t>()),
                       grid_of(j.at("grid"))};
  });
}

void write_raw_csv(std::ostream& out, std::span<const RawTrajectory> trajectories) {
  out << "user_id,timestamp,lat,lon\n";
  for (const RawTrajectory& t : trajectories) {
    for (const TimedPoint& p : t.points) {
      out << t.user_id << ',' << p.timestamp << ',' << format_double(p.location.latitude) << ','
          << format_double(p.location.longitude) << '\n';
    }
  }
}

void write_counts_csv(std::ostream& out, const CountMatrix& counts) {
  out << "step";
  for (std::size_t j = 0; j < counts.cols(); ++j) out << ",cell_" << j;
  out << '\n';
  for (std::size_t i = 0; i < counts.rows(); ++i) {
    out << i;
    for (const auto c : counts.row(i)) out << ',' << c;
    out << '\n';
  }
}

CountMatrix read_counts_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const auto header = split(trim(line));
  if (header.empty() || header[0] != "step") throw ParseError(1, "expected header 'step,cell_0,...'");
  const std::size_t m = header.size() - 1;
  for (std::size_t j = 0; j < m; ++j) {
    if (header[j + 1] != "cell_" + std::to_string(j)) {
      throw ParseError(1, "expected column 'cell_" + std::to_string(j) + "'");
    }
  }
  std::vector<std::int64_t> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (fields.size() != m + 1) {
      throw ParseError(line_number, "expected " + std::to_string(m + 1) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    if (number<std::size_t>(fields[0], line_number) != rows) {
      throw ParseError(line_number, "steps must be consecutive from 0");
    }
    for (std::size_t j = 0; j < m; ++j) values.push_back(number<std::int64_t>(fields[j + 1], line_number));
    ++rows;
  }
  CountMatrix counts(rows, m);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < m; ++j) counts(i, j) = values[i * m + j];
  }
  return counts;
}

void save_dataset(const AggregatedDataset& data, const std::filesystem::path& counts_csv,
                  const std::filesystem::path& meta_json) {
  std::ostringstream counts;
  write_counts_csv(counts, data.counts());
  write_file_atomic(counts_csv, counts.str());
  write_file_atomic(meta_json, meta_to_json(data.temporal(), data.grid()) + "\n");
}

AggregatedDataset load_dataset(const std::filesystem::path& counts_csv,
                               const std::filesystem::path& meta_json) {
  DatasetMeta meta = meta_from_json(read_file(meta_json));
  std::ifstream in(counts_csv);
  if (!in) throw InputError("cannot open " + counts_csv.string());
  return AggregatedDataset(read_counts_csv(in), meta.temporal, meta.grid);
}

void write_ground_truth(std::ostream& out, std::span<const DiscreteTrajectory> trajectories) {
  out << "user_id,step,cell\n";
  for (const DiscreteTrajectory& t : trajectories) {
    for (std::size_t s = 0; s < t.cells.size(); ++s) out << t.user_id << ',' << s << ',' << t.cells[s].index << '\n';
  }
}

void write_trajectory_set(std::ostream& out, const TrajectorySet& set, bool with_coordinates) {
  out << (with_coordinates ? "user_slot,step,cell,lat,lon\n" : "user_slot,step,cell\n");
  const std::vector<GeoPoint> centers = with_coordinates ? set.grid.cell_centers() : std::vector<GeoPoint>{};
  for (std::size_t u = 0; u < set.size(); ++u) {
    const CellSequence& cells = set.trajectories[u];
    for (std::size_t s = 0; s < cells.size(); ++s) {
      out << set.labels[u] << ',' << s << ',' << cells[s].index;
      if (with_coordinates) {
        const GeoPoint& c = centers[cells[s].index];
        out << ',' << format_double(c.latitude) << ',' << format_double(c.longitude);
      }
      out << '\n';
    }
  }
}

TrajectorySet read_trajectory_set(std::istream& in, const GridSpec& grid, const TemporalSpec& temporal) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  const auto header = split(trim(line));
  if (header.size() < 3 || (header[0] != "user_id" && header[0] != "user_slot") ||
      header[1] != "step" || header[2] != "cell") {
    throw ParseError(1, "expected header 'user_id,step,cell' or 'user_slot,step,cell'");
  }

  TrajectorySet set{{}, {}, grid, temporal};
  std::map<std::string, std::size_t, std::less<>> index;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto fields = split(view);
    if (fields.size() != header.size()) {
      throw ParseError(line_number, "expected " + std::to_string(header.size()) + " fields");
    }
    auto it = index.find(fields[0]);
    if (it == index.end()) {
      it = index.emplace(std::string(fields[0]), set.labels.size()).first;
      set.labels.emplace_back(fields[0]);
      set.trajectories.emplace_back();
    }
    CellSequence& cells = set.trajectories[it->second];
    const auto step = number<std::size_t>(fields[1], line_number);
    const auto cell = number<std::uint32_t>(fields[2], line_number);
    if (step != cells.size()) {
      throw ParseError(line_number, "steps for '" + std::string(fields[0]) + "' must be consecutive from 0");
    }
    if (!grid.is_valid(CellId{cell})) {
      throw ParseError(line_number, "cell " + std::to_string(cell) + " is outside the grid");
    }
    cells.push_back(CellId{cell});
  }
  for (const CellSequence& cells : set.trajectories) {
    if (cells.size() != set.length()) throw InputError("trajectories in the file differ in length");
  }
  if (set.length() > temporal.steps()) throw InputError("trajectories are longer than the time grid");
  return set;
}

std::string report_to_json(const MetricsReport& report) {
  const json j = {{"accuracy", report.accuracy},
                  {"levenshtein_accuracy", report.levenshtein_accuracy},
                  {"recovery_error_m", report.recovery_error_m},
                  {"uniqueness",
                   {{"pred", uniqueness_json(report.uniqueness_predicted)},
                    {"truth", uniqueness_json(report.uniqueness_truth)}}}};
  return j.dump(2);
}

MetricsReport report_from_json(std::string_view text) {
  const json j = parse_json(text);
  return with_json_errors([&] {
    MetricsReport report;
    report.accuracy = j.at("accuracy").get<double>();
    report.levenshtein_accuracy = j.at("levenshtein_accuracy").get<double>();
    report.recovery_error_m = j.at("recovery_error_m").get<double>();
    report.uniqueness_predicted = uniqueness_of(j.at("uniqueness").at("pred"));
    report.uniqueness_truth = uniqueness_of(j.at("uniqueness").at("truth"));
    return report;
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path temporary = path;
  temporary += ".tmp";
  {
    std::ofstream out(temporary, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temporary.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("failed writing " + temporary.string());
  }
  std::filesystem::rename(temporary, path);
}

}  // namespace trajrec
