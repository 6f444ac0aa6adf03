#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trajrec/trajrec.hpp"

namespace trajrec::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Io {
  std::ostream& out;
  std::ostream& err;
  bool quiet = false;

  std::ostream& log() { return quiet ? null_stream() : out; }

  static std::ostream& null_stream() {
    static std::ostream sink(nullptr);
    return sink;
  }
};

void write_echo(const fs::path& path, const std::string& command, const json& parameters) {
  const json echo = {{"command", command}, {"version", kVersion}, {"parameters", parameters}};
  write_file_atomic(path, echo.dump(2) + "\n");
}

// --- preprocess -----------------------------------------------------------

struct PreprocessArgs {
  std::string input;
  std::string out_dir;
  std::int64_t interval = 600;
  std::optional<Timestamp> start;
  std::optional<std::size_t> steps;
  double cell_area = 1'000'000.0;
  double lower_percentile = 0.01;
  double upper_percentile = 0.995;
  bool allow_invalid = false;
};

int preprocess(const PreprocessArgs& args, Io& io) {
  if (args.interval <= 0 || kSecondsPerDay % args.interval != 0) {
    throw UsageError("--interval " + std::to_string(args.interval) +
                     " must be a positive divisor of 86400 seconds");
  }
  if (!(args.lower_percentile >= 0.0 && args.lower_percentile < args.upper_percentile &&
        args.upper_percentile <= 1.0)) {
    throw UsageError("percentiles must satisfy 0 <= lower < upper <= 1");
  }
  if (!(args.cell_area > 0.0)) throw UsageError("--cell-area must be positive");
  if (args.steps && *args.steps == 0) throw UsageError("--steps must be positive");

  std::ifstream in(args.input);
  if (!in) throw UsageError("cannot open " + args.input);
  const std::vector<RawTrajectory> raw = parse_trajectories(in);
  if (raw.empty()) throw DataError("input holds no trajectories");

  std::vector<GeoPoint> points;
  Timestamp first = std::numeric_limits<Timestamp>::max();
  Timestamp last = std::numeric_limits<Timestamp>::min();
  for (const RawTrajectory& t : raw) {
    for (const TimedPoint& p : t.points) {
      points.push_back(p.location);
      first = std::min(first, p.timestamp);
      last = std::max(last, p.timestamp);
    }
  }
  const GridSpec grid =
      build_grid(points, args.lower_percentile, args.upper_percentile, args.cell_area);

  const auto floor_to = [](Timestamp t, std::int64_t step) {
    const Timestamp r = t % step;
    return r < 0 ? t - r - step : t - r;
  };
  const Timestamp start = args.start.value_or(floor_to(first, args.interval));
  std::size_t steps = 0;
  if (args.steps) {
    steps = *args.steps;
  } else if (last >= start) {
    steps = static_cast<std::size_t>((last - start) / args.interval) + 1;
  }
  if (steps == 0) throw DataError("no points fall at or after the chosen start time");
  const TemporalSpec temporal(start, args.interval, steps);

  std::vector<DiscreteTrajectory> discrete;
  for (const RawTrajectory& t : raw) {
    try {
      discrete.push_back(static_interpolate(resample(t, temporal), temporal, grid));
    } catch (const DataError& e) {
      io.err << "warning: skipping user '" << t.user_id << "': " << e.what() << '\n';
    }
  }
  if (discrete.empty()) throw DataError("no user has points inside the time window");
  const AggregatedDataset data = aggregate(discrete, temporal, grid);
  const ValidationReport report = validate_dataset(data);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  save_dataset(data, dir / "aggregate.csv", dir / "aggregate.json");
  std::ostringstream truth;
  write_ground_truth(truth, discrete);
  write_file_atomic(dir / "truth.csv", truth.str());
  write_echo(dir / "preprocess.config.json", "preprocess",
             {{"input", args.input},
              {"out_dir", args.out_dir},
              {"interval", args.interval},
              {"start", start},
              {"steps", steps},
              {"cell_area", args.cell_area},
              {"lower_percentile", args.lower_percentile},
              {"upper_percentile", args.upper_percentile},
              {"allow_invalid", args.allow_invalid}});

  io.log() << "users: " << discrete.size() << ", locations: " << grid.cell_count() << " ("
           << grid.rows() << "x" << grid.cols() << "), steps: " << steps << '\n';
  if (report.ok()) {
    io.log() << "validation: ok\n";
    return kSuccess;
  }
  std::ostream& sink = args.allow_invalid ? io.log() : io.err;
  sink << "validation: " << report.violations.size() << " violation(s)\n";
  for (const Violation& v : report.violations) sink << "  [" << to_string(v.kind) << "] " << v.message << '\n';
  return args.allow_invalid ? kSuccess : kDataError;
}

// --- attack ---------------------------------------------------------------

struct AttackArgs {
  std::string counts;
  std::string meta;
  std::string out;
  std::string variant = "baseline";
  std::optional<std::size_t> k;
  std::string snapshot_dir;
  std::string debug_costs;
  bool with_coordinates = false;
  unsigned threads = 1;
};

json matrix_json(const CostMatrix& costs) {
  json rows = json::array();
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto row = costs.values().row(i);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

int attack(const AttackArgs& args, Io& io) {
  const bool enhanced = args.variant == "enhanced";
  if (!enhanced && args.variant != "baseline") {
    throw UsageError("--variant must be 'baseline' or 'enhanced'");
  }
  if (!enhanced && args.k) throw UsageError("--k applies to the enhanced variant only");
  if (!enhanced && !args.snapshot_dir.empty()) {
    throw UsageError("--emit-snapshots applies to the enhanced variant only");
  }
  const LinkageConfig linkage{args.k.value_or(3)};
  if (linkage.k == 0) throw UsageError("--k must be at least 1");

  json stages = json::object();
  auto clock = Clock::now();
  const AggregatedDataset data = load_dataset(args.counts, args.meta);
  stages["load_s"] = seconds_since(clock);

  clock = Clock::now();
  require_valid(data);
  stages["validate_s"] = seconds_since(clock);

  std::optional<std::ofstream> debug;
  if (!args.debug_costs.empty()) {
    debug.emplace(args.debug_costs, std::ios::trunc);
    if (!*debug) throw UsageError("cannot write " + args.debug_costs);
  }
  const LinkageObserver observer = [&debug](std::size_t day, const CostMatrix& costs) {
    if (debug) *debug << json{{"day", day}, {"costs", matrix_json(costs)}}.dump() << '\n';
  };

  clock = Clock::now();
  std::optional<TrajectorySet> recovered;
  json per_day = json::array();
  if (enhanced) {
    std::optional<std::ofstream> index;
    if (!args.snapshot_dir.empty()) {
      fs::create_directories(args.snapshot_dir);
      index.emplace(fs::path(args.snapshot_dir) / "snapshots.ndjson", std::ios::trunc);
    }
    auto day_clock = Clock::now();
    OnlineOptions options;
    options.linkage = linkage;
    options.on_linkage = observer;
    options.sink = [&](std::size_t day, std::shared_ptr<const TrajectorySet> snapshot) {
      per_day.push_back(seconds_since(day_clock));
      if (index) {
        const fs::path file = fs::path(args.snapshot_dir) / ("day_" + std::to_string(day) + ".csv");
        std::ostringstream csv;
        write_trajectory_set(csv, *snapshot, args.with_coordinates);
        write_file_atomic(file, csv.str());
        *index << json{{"day", day}, {"trajectories_csv_path", file.string()}}.dump() << std::endl;
      }
      day_clock = Clock::now();
    };
    recovered = run_online(data, options);
  } else {
    BaselineOptions options;
    options.threads = args.threads;
    options.on_linkage = observer;
    recovered = recover_all(data, options);
  }
  stages["attack_s"] = seconds_since(clock);
  if (enhanced) stages["per_day_s"] = per_day;

  clock = Clock::now();
  std::ostringstream csv;
  write_trajectory_set(csv, *recovered, args.with_coordinates);
  write_file_atomic(args.out, csv.str());
  stages["write_s"] = seconds_since(clock);

  const json parameters = {{"counts", args.counts},
                           {"meta", args.meta},
                           {"out", args.out},
                           {"variant", args.variant},
                           {"k", enhanced ? json(linkage.k) : json(nullptr)},
                           {"emit_snapshots", args.snapshot_dir},
                           {"debug_costs", args.debug_costs},
                           {"with_coordinates", args.with_coordinates},
                           {"threads", args.threads}};
  write_echo(args.out + ".config.json", "attack", parameters);
  const json run_log = {{"variant", args.variant},
                        {"users", recovered->size()},
                        {"steps", recovered->length()},
                        {"days", data.temporal().day_count()},
                        {"stages", stages}};
  write_file_atomic(args.out + ".runlog.json", run_log.dump(2) + "\n");

  io.log() << "recovered " << recovered->size() << " trajectories over " << recovered->length()
           << " steps (" << args.variant << ") -> " << args.out << '\n';
  return kSuccess;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string predicted;
  std::string truth;
  std::string meta;
  std::string out_dir;
  std::size_t max_k = 5;
};

TrajectorySet load_set(const std::string& path, const DatasetMeta& meta) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return read_trajectory_set(in, meta.grid, meta.temporal);
}

int evaluate(const EvaluateArgs& args, Io& io) {
  if (args.max_k == 0) throw UsageError("--max-k must be at least 1");
  const DatasetMeta meta = meta_from_json(read_file(args.meta));
  const TrajectorySet predicted = load_set(args.predicted, meta);
  const TrajectorySet truth = load_set(args.truth, meta);

  const TrajectoryMapping mapping = map_predictions(predicted, truth);
  const MetricsReport report = full_report(predicted, truth, mapping, args.max_k);

  std::ostringstream accuracy_csv;
  accuracy_csv << "metric,value\n"
               << "accuracy," << format_double(report.accuracy) << '\n'
               << "levenshtein_accuracy," << format_double(report.levenshtein_accuracy) << '\n';
  std::ostringstream uniqueness_csv;
  uniqueness_csv << "source,k,uniqueness\n";
  for (const auto& [k, v] : report.uniqueness_predicted) uniqueness_csv << "pred," << k << ',' << format_double(v) << '\n';
  for (const auto& [k, v] : report.uniqueness_truth) uniqueness_csv << "truth," << k << ',' << format_double(v) << '\n';
  std::ostringstream error_csv;
  error_csv << "predicted_slot,truth_user,recovery_error_m\n";
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    error_csv << predicted.labels[i] << ',' << truth.labels[mapping.truth_of[i]] << ','
              << format_double(mapping.pair_error_m[i]) << '\n';
  }

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  write_file_atomic(dir / "metrics.json", report_to_json(report) + "\n");
  write_file_atomic(dir / "accuracy.csv", accuracy_csv.str());
  write_file_atomic(dir / "uniqueness.csv", uniqueness_csv.str());
  write_file_atomic(dir / "recovery_error.csv", error_csv.str());
  write_echo(dir / "evaluate.config.json", "evaluate",
             {{"predicted", args.predicted},
              {"truth", args.truth},
              {"meta", args.meta},
              {"out_dir", args.out_dir},
              {"max_k", args.max_k}});

  io.log() << "accuracy " << report.accuracy << ", levenshtein accuracy "
           << report.levenshtein_accuracy << ", recovery error " << report.recovery_error_m << " m\n";
  return kSuccess;
}

// --- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  SynthConfig config;
  std::string profile = "commuter";
};

int synth(SynthArgs args, Io& io) {
  try {
    args.config.profile = parse_profile(args.profile);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  std::optional<SynthDataset> generated;
  try {
    generated = synthesize(args.config);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  const SynthDataset& dataset = *generated;

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  std::ostringstream raw;
  write_raw_csv(raw, to_raw(dataset));
  write_file_atomic(dir / "raw.csv", raw.str());
  std::ostringstream truth;
  write_ground_truth(truth, dataset.truth);
  write_file_atomic(dir / "truth.csv", truth.str());
  write_file_atomic(dir / "meta.json", meta_to_json(dataset.temporal, dataset.grid) + "\n");
  const SynthConfig& c = args.config;
  write_echo(dir / "synth.config.json", "synth",
             {{"out_dir", args.out_dir},
              {"users", c.users},
              {"days", c.days},
              {"interval", c.interval_seconds},
              {"rows", c.rows},
              {"cols", c.cols},
              {"cell_side", c.cell_side_m},
              {"start", c.start},
              {"profile", args.profile},
              {"noise", c.noise},
              {"seed", c.seed}});

  io.log() << "wrote " << c.users << " " << args.profile << " users over " << c.days << " days to "
           << args.out_dir << '\n';
  return kSuccess;
}

// `--config FILE` values are appended after the command line so that they
// win under the take-last policy.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (!path) return args;
  json config;
  try {
    config = json::parse(read_file(*path));
  } catch (const json::exception& e) {
    throw UsageError("invalid config file " + *path + ": " + e.what());
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  if (!config.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (!value.is_null()) {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Io io{out, err};
  CLI::App app{"Trajectory recovery from aggregated mobility data", "trajrec"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON file whose keys override command-line flags");
  app.add_flag("--quiet", io.quiet, "Suppress progress output");

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Raw GPS CSV -> aggregated dataset + ground truth");
  pre_cmd->add_option("--input", pre.input, "Raw CSV (user_id,timestamp,lat,lon)")->required();
  pre_cmd->add_option("--out-dir", pre.out_dir, "Output directory")->required();
  pre_cmd->add_option("--interval", pre.interval, "Seconds between steps (divides 86400)");
  pre_cmd->add_option("--start", pre.start, "First instant (Unix s); default: first point floored");
  pre_cmd->add_option("--steps", pre.steps, "Number of steps; default: through the last point");
  pre_cmd->add_option("--cell-area", pre.cell_area, "Cell area in square meters");
  pre_cmd->add_option("--lower-percentile", pre.lower_percentile, "Southwest corner percentile");
  pre_cmd->add_option("--upper-percentile", pre.upper_percentile, "Northeast corner percentile");
  pre_cmd->add_flag("--allow-invalid", pre.allow_invalid, "Exit 0 even if validation fails");

  AttackArgs atk;
  auto* atk_cmd = app.add_subcommand("attack", "Recover trajectories from an aggregated dataset");
  atk_cmd->add_option("--counts", atk.counts, "Aggregated counts CSV")->required()->check(CLI::ExistingFile);
  atk_cmd->add_option("--meta", atk.meta, "Sidecar JSON")->required()->check(CLI::ExistingFile);
  atk_cmd->add_option("--out", atk.out, "Recovered trajectory CSV")->required();
  atk_cmd->add_option("--variant", atk.variant, "baseline | enhanced");
  atk_cmd->add_option("--k", atk.k, "Linkage window in days (enhanced only, default 3)");
  atk_cmd->add_option("--emit-snapshots", atk.snapshot_dir, "Directory for per-day snapshots (enhanced only)");
  atk_cmd->add_option("--debug-costs", atk.debug_costs, "NDJSON dump of day-linkage cost matrices");
  atk_cmd->add_flag("--with-coordinates", atk.with_coordinates, "Add lat,lon of cell centers");
  atk_cmd->add_option("--threads", atk.threads, "Threads for independent day recovery (baseline)");

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Compare recovered trajectories with ground truth");
  ev_cmd->add_option("--predicted", ev.predicted, "Recovered trajectory CSV")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--truth", ev.truth, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--meta", ev.meta, "Sidecar JSON")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--out-dir", ev.out_dir, "Output directory")->required();
  ev_cmd->add_option("--max-k", ev.max_k, "Largest k for top-k uniqueness");

  SynthArgs syn;
  auto* syn_cmd = app.add_subcommand("synth", "Generate a synthetic raw trajectory dataset");
  syn_cmd->add_option("--out-dir", syn.out_dir, "Output directory")->required();
  syn_cmd->add_option("--users", syn.config.users, "Number of users");
  syn_cmd->add_option("--days", syn.config.days, "Number of days");
  syn_cmd->add_option("--interval", syn.config.interval_seconds, "Seconds between steps");
  syn_cmd->add_option("--rows", syn.config.rows, "Grid rows");
  syn_cmd->add_option("--cols", syn.config.cols, "Grid columns");
  syn_cmd->add_option("--cell-side", syn.config.cell_side_m, "Cell side in meters");
  syn_cmd->add_option("--start", syn.config.start, "First instant (Unix s)");
  syn_cmd->add_option("--profile", syn.profile, "static | commuter | random-walk");
  syn_cmd->add_option("--noise", syn.config.noise, "Per-step displacement probability");
  syn_cmd->add_option("--seed", syn.config.seed, "Random seed");

  try {
    std::vector<std::string> args = apply_config_file(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (pre_cmd->parsed()) return preprocess(pre, io);
    if (atk_cmd->parsed()) return attack(atk, io);
    if (ev_cmd->parsed()) return evaluate(ev, io);
    if (syn_cmd->parsed()) return synth(syn, io);
    return kUsageError;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace trajrec::cli
