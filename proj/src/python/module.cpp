#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trajrec/trajrec.hpp"

namespace py = pybind11;
using namespace trajrec;

namespace {

// Trajectories cross the boundary as {label: [cell, ...]} style lists.
std::vector<std::vector<std::uint32_t>> to_lists(const TrajectorySet& set) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& t : set.trajectories) {
    std::vector<std::uint32_t> row;
    for (const CellId c : t) row.push_back(c.index);
    out.push_back(std::move(row));
  }
  return out;
}

CellSequence to_cells(const std::vector<std::uint32_t>& ids) {
  CellSequence out;
  for (const auto id : ids) out.push_back(CellId{id});
  return out;
}

TrajectorySet to_set(const std::vector<std::vector<std::uint32_t>>& lists, const AggregatedDataset& data) {
  TrajectorySet set{slot_labels(lists.size()), {}, data.grid(), data.temporal()};
  for (const auto& l : lists) set.trajectories.push_back(to_cells(l));
  return set;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Trajectory recovery from aggregated location counts";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  py::class_<AggregatedDataset>(m, "AggregatedDataset")
      .def_property_readonly("steps", &AggregatedDataset::steps)
      .def_property_readonly("locations", &AggregatedDataset::locations)
      .def_property_readonly("population", &AggregatedDataset::population)
      .def_property_readonly("interval", [](const AggregatedDataset& d) { return d.temporal().interval(); })
      .def_property_readonly("start", [](const AggregatedDataset& d) { return d.temporal().start(); })
      .def_property_readonly("rows", [](const AggregatedDataset& d) { return d.grid().rows(); })
      .def_property_readonly("cols", [](const AggregatedDataset& d) { return d.grid().cols(); })
      .def("counts",
           [](const AggregatedDataset& d) {
             std::vector<std::vector<std::int64_t>> rows;
             for (std::size_t s = 0; s < d.steps(); ++s) {
               const auto r = d.record(s);
               rows.emplace_back(r.begin(), r.end());
             }
             return rows;
           })
      .def("violations", [](const AggregatedDataset& d) {
        std::vector<std::string> out;
        for (const auto& v : validate_dataset(d).violations) out.push_back(v.message);
        return out;
      });

  m.def(
      "synthesize",
      [](std::size_t users, std::size_t days, std::int64_t interval, std::size_t rows, std::size_t cols,
         const std::string& profile, double noise, std::uint64_t seed) {
        SynthConfig c;
        c.users = users;
        c.days = days;
        c.interval_seconds = interval;
        c.rows = rows;
        c.cols = cols;
        c.profile = parse_profile(profile);
        c.noise = noise;
        c.seed = seed;
        const SynthDataset d = synthesize(c);
        const AggregatedDataset data = aggregate(d.truth, d.temporal, d.grid);
        std::vector<std::vector<std::uint32_t>> truth;
        for (const auto& t : d.truth) {
          std::vector<std::uint32_t> row;
          for (const CellId cell : t.cells) row.push_back(cell.index);
          truth.push_back(std::move(row));
        }
        return py::make_tuple(data, truth);
      },
      py::arg("users") = 10, py::arg("days") = 7, py::arg("interval") = 600, py::arg("rows") = 20,
      py::arg("cols") = 20, py::arg("profile") = "commuter", py::arg("noise") = 0.0, py::arg("seed") = 1,
      "Synthetic dataset; returns (aggregated dataset, true cell sequences).");

  m.def(
      "aggregate",
      [](const std::vector<std::vector<std::uint32_t>>& trajectories, const AggregatedDataset& like) {
        std::vector<DiscreteTrajectory> discrete;
        for (const auto& t : trajectories) discrete.push_back({"", to_cells(t)});
        return aggregate(discrete, like.temporal(), like.grid());
      },
      py::arg("trajectories"), py::arg("like"),
      "Counts cell sequences on the grid and time axis of `like`.");

  m.def(
      "recover_all",
      [](const AggregatedDataset& data, unsigned threads) {
        BaselineOptions options;
        options.threads = threads;
        py::gil_scoped_release release;
        return to_lists(recover_all(data, options));
      },
      py::arg("data"), py::arg("threads") = 1, "Baseline attack.");

  m.def(
      "run_online",
      [](const AggregatedDataset& data, std::size_t k, std::function<void(std::size_t)> on_day) {
        OnlineOptions options;
        options.linkage.k = k;
        if (on_day) {
          options.sink = [&on_day](std::size_t day, std::shared_ptr<const TrajectorySet>) {
            py::gil_scoped_acquire acquire;
            on_day(day);
          };
        }
        py::gil_scoped_release release;
        return to_lists(run_online(data, options));
      },
      py::arg("data"), py::arg("k") = 3, py::arg("on_day") = nullptr, "Enhanced attack, one day at a time.");

  m.def(
      "metrics",
      [](const std::vector<std::vector<std::uint32_t>>& predicted,
         const std::vector<std::vector<std::uint32_t>>& truth, const AggregatedDataset& data, std::size_t max_k) {
        const MetricsReport r = full_report(to_set(predicted, data), to_set(truth, data), max_k);
        py::dict out;
        out["accuracy"] = r.accuracy;
        out["levenshtein_accuracy"] = r.levenshtein_accuracy;
        out["recovery_error_m"] = r.recovery_error_m;
        out["uniqueness_pred"] = r.uniqueness_predicted;
        out["uniqueness_truth"] = r.uniqueness_truth;
        return out;
      },
      py::arg("predicted"), py::arg("truth"), py::arg("data"), py::arg("max_k") = 5);

#ifdef VERSION_INFO
#define TRAJREC_STRINGIFY(x) #x
#define TRAJREC_TO_STRING(x) TRAJREC_STRINGIFY(x)
  m.attr("__version__") = TRAJREC_TO_STRING(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
