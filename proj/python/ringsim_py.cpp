// Python bindings: scenario loading, seed runs, run-directory comparison,
// and the per-switch marking primitives for interactive use.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ringsim/config.hpp"
#include "ringsim/experiment.hpp"
#include "ringsim/symphony.hpp"

namespace py = pybind11;
using namespace ringsim;

namespace {

py::dict job_dict(const JobSummary& j) {
  py::dict d;
  d["job_id"] = j.job_id;
  d["complete"] = j.complete;
  d["cct_ms"] = j.cct.millis();
  d["jct_ms"] = j.jct.millis();
  d["max_overlap"] = j.max_overlap;
  d["final_step_span_ms"] = j.final_step_span.millis();
  d["red_marks"] = j.red_marks;
  d["symphony_marks"] = j.symphony_marks;
  return d;
}

py::dict run_dict(const RunSummary& s) {
  py::list jobs;
  for (const JobSummary& j : s.jobs) jobs.append(job_dict(j));
  py::dict d;
  d["seed"] = s.seed;
  d["truncated"] = s.truncated;
  d["jobs"] = jobs;
  return d;
}

}  // namespace

PYBIND11_MODULE(ringsim, m) {
  m.doc() = "Packet-level ring collective simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RunError>(m, "RunError", PyExc_RuntimeError);

  py::class_<ScenarioConfig>(m, "Scenario")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readwrite("seeds", &ScenarioConfig::seeds)
      .def_property(
          "symphony_enabled", [](const ScenarioConfig& c) { return c.symphony.enabled; },
          [](ScenarioConfig& c, bool on) { c.symphony.enabled = on; })
      .def("set", &apply_sweep, py::arg("param"), py::arg("value"), "set a sweepable parameter")
      .def("to_toml", &serialize_scenario)
      .def("hash", &config_hash);

  m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<config>");
  m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));
  m.def("sweep_parameters", &sweep_parameters);

  m.def(
      "run",
      [](const ScenarioConfig& cfg, unsigned workers) {
        std::vector<SeedRun> runs;
        {
          py::gil_scoped_release release;
          runs = run_seeds(cfg, workers == 0 ? default_workers() : workers);
        }
        py::list out;
        for (const SeedRun& r : runs) out.append(run_dict(r.summary));
        return out;
      },
      py::arg("scenario"), py::arg("workers") = 0, "run every seed and return per-seed summaries");

  m.def(
      "run_to_dir",
      [](const ScenarioConfig& cfg, const std::filesystem::path& dir, unsigned workers) {
        py::gil_scoped_release release;
        return run_scenario(cfg, dir, workers == 0 ? default_workers() : workers).config_hash;
      },
      py::arg("scenario"), py::arg("out"), py::arg("workers") = 0, "run and write the output directory");

  m.def(
      "compare",
      [](const std::filesystem::path& a, const std::filesystem::path& b) {
        const ComparisonReport r = compare(a, b);
        py::list jobs;
        for (const JobComparison& j : r.jobs) {
          py::dict d;
          d["job_id"] = j.job_id;
          d["seeds"] = j.seeds;
          d["cct_improvement"] = j.cct_improvement;
          d["jct_improvement"] = j.jct_improvement;
          d["median_cct_improvement"] = stats(j.cct_improvement).median;
          jobs.append(d);
        }
        return jobs;
      },
      py::arg("baseline"), py::arg("treatment"));

  py::class_<symphony::SymphonyParams>(m, "MarkerParams")
      .def(py::init<>())
      .def_readwrite("k", &symphony::SymphonyParams::k)
      .def_readwrite("n_warmup", &symphony::SymphonyParams::n_warmup)
      .def_readwrite("n_sample", &symphony::SymphonyParams::n_sample)
      .def_property(
          "tau", [](const symphony::SymphonyParams& p) { return p.tau.value(); },
          [](symphony::SymphonyParams& p, double v) { p.tau = symphony::DyadicRatio::from_double(v); })
      .def_property(
          "t_win_ns", [](const symphony::SymphonyParams& p) { return p.t_win.ns; },
          [](symphony::SymphonyParams& p, std::int64_t v) { p.t_win = nanoseconds(v); });

  py::class_<symphony::PerJobStateBlock>(m, "MarkerState")
      .def(py::init<>())
      .def_readwrite("step_min", &symphony::PerJobStateBlock::step_min)
      .def_readwrite("psn_rec", &symphony::PerJobStateBlock::psn_rec)
      .def_readwrite("alpha", &symphony::PerJobStateBlock::alpha)
      .def_readwrite("cnt_total", &symphony::PerJobStateBlock::cnt_total)
      .def_readwrite("cnt_op", &symphony::PerJobStateBlock::cnt_op);

  py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed") = 0);

  m.def(
      "process_packet",
      [](symphony::PerJobStateBlock& s, std::uint32_t step, std::uint32_t psn, bool last,
         const symphony::SymphonyParams& p, Rng& coin) {
        const auto d = symphony::process_packet(s, step, psn, last, p, coin);
        return py::make_tuple(std::string(symphony::to_string(d.classified_as)), d.delta, d.probability, d.mark);
      },
      py::arg("state"), py::arg("step"), py::arg("psn"), py::arg("last"), py::arg("params"), py::arg("rng"),
      "returns (classification, delta, probability, marked)");
  m.def(
      "window_tick",
      [](symphony::PerJobStateBlock& s, const symphony::SymphonyParams& p, std::int64_t now_ns) {
        symphony::window_tick(s, p, nanoseconds(now_ns));
      },
      py::arg("state"), py::arg("params"), py::arg("now_ns"));
}
