#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "byzrun/checks.hpp"
#include "byzrun/cli.hpp"

namespace py = pybind11;
using namespace byzrun;

namespace {

Scenario scenario_from(const std::string& path_or_json) {
  std::string trimmed = path_or_json;
  size_t first = trimmed.find_first_not_of(" \t\n");
  if (first != std::string::npos && trimmed[first] == '{') {
    return parse_scenario(Json::parse(trimmed), "<inline>");
  }
  return load_scenario(path_or_json);
}

RunOptions options_from(long budget, int horizon, long long seed,
                        bool exhaustive, bool witnesses) {
  RunOptions o;
  o.budget = budget;
  if (horizon >= 0) o.horizon = horizon;
  if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
  if (exhaustive) o.exhaustive = true;
  o.emit_witnesses = witnesses;
  return o;
}

std::string report_json(const Report& report, bool allow_pending) {
  Json results = Json::array();
  for (const auto& r : report.results) {
    Json rec{{"check", r.check},     {"law", r.law},
             {"verdict", r.verdict}, {"horizon", r.horizon},
             {"detail", r.detail}};
    if (!r.witness.is_null()) rec["witness"] = r.witness;
    results.push_back(std::move(rec));
  }
  return Json{{"scenario", report.scenario},
              {"results", results},
              {"exit_code", report.exit_code(allow_pending)}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_byzrun, m) {
  m.doc() = "byzantine run systems, filter-composed extensions and epistemic "
            "checks over their finite models";

  m.def("composability",
        [](const std::string& left, const std::string& top) {
          return to_string(composability(impl_class_from_name(left),
                                         impl_class_from_name(top)));
        },
        py::arg("left"), py::arg("top"),
        "composability cell for two implementation classes "
        "('c', 'f', 'r' or '')");

  m.def("composability_table",
        []() { return composability_table_json().dump(); },
        "the full 17x17 class table as a json string");

  m.def("impl_classes", []() {
    std::vector<std::string> out;
    for (auto c : all_impl_classes()) out.push_back(to_string(c));
    return out;
  });

  m.def("run_checks",
        [](const std::string& scenario, long budget, int horizon,
           long long seed, bool exhaustive, bool witnesses,
           bool allow_pending) {
          Scenario s = scenario_from(scenario);
          Report report = run_scenario_checks(
              s, options_from(budget, horizon, seed, exhaustive, witnesses));
          return report_json(report, allow_pending);
        },
        py::arg("scenario"), py::arg("budget") = 100000,
        py::arg("horizon") = -1, py::arg("seed") = -1,
        py::arg("exhaustive") = false, py::arg("witnesses") = false,
        py::arg("allow_pending") = false,
        "run a scenario's checks; returns the report as a json string");

  m.def("enumerate_system",
        [](const std::string& scenario, long budget, int horizon) {
          Scenario s = scenario_from(scenario);
          AgentContext ctx = build_context(s);
          Timestamp h = horizon >= 0 ? horizon : s.params.horizon;
          RunSystem system = enumerate_runs(ctx, h, s.adversary, budget);
          return json_of(system).dump();
        },
        py::arg("scenario"), py::arg("budget") = 100000,
        py::arg("horizon") = -1,
        "enumerate the scenario's run system; returns json");

  m.def("brainvat",
        [](const std::string& scenario, const std::string& claim, int t,
           int brain, int other) {
          Scenario s = scenario_from(scenario);
          Json args{{"check", "brainvat"}, {"brain", brain}, {"other", other}};
          if (claim != "all") args["claims"] = Json::array({claim});
          if (t >= 0) args["t"] = t;
          if (s.extension_expr == "LSS") args["variant"] = "lockstep";
          RunOptions options;
          options.emit_witnesses = true;
          Report report;
          report.scenario = s.name;
          auto results = run_check(CheckSpec{"brainvat", args}, s, options);
          report.results = results;
          return report_json(report, false);
        },
        py::arg("scenario"), py::arg("claim") = "all", py::arg("t") = -1,
        py::arg("brain") = 1, py::arg("other") = 2,
        "construct and verify brain-in-a-vat witnesses; returns json");

  m.def("eval_formula",
        [](const std::string& scenario, const std::string& formula,
           const std::string& expect) {
          Scenario s = scenario_from(scenario);
          Json args{{"check", "formula"},
                    {"formula", formula},
                    {"expect", expect}};
          RunOptions options;
          options.emit_witnesses = false;
          auto results = run_check(CheckSpec{"formula", args}, s, options);
          Report report;
          report.scenario = s.name;
          report.results = results;
          return report_json(report, false);
        },
        py::arg("scenario"), py::arg("formula"),
        py::arg("expect") = "all_points",
        "evaluate an epistemic formula over the enumerated model");

  m.def("canonical_hap",
        [](const std::string& text) {
          return to_string(parse_global_hap(text));
        },
        py::arg("text"), "parse and reprint a global hap");

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "invoke the command line in-process");
}
