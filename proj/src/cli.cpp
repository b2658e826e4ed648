#include "byzrun/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "byzrun/checks.hpp"

namespace byzrun {

namespace {

struct CommonFlags {
  std::string scenario_path;
  std::string out_path;
  std::string format = "human";
  long budget = 100000;
  int horizon_raw = -1;
  long long seed_raw = -1;
  bool exhaustive = false;
  bool allow_pending = false;

  RunOptions options() const {
    RunOptions o;
    o.budget = budget;
    if (horizon_raw >= 0) o.horizon = horizon_raw;
    if (seed_raw >= 0) o.seed = static_cast<std::uint64_t>(seed_raw);
    if (exhaustive) o.exhaustive = true;
    o.emit_witnesses = format == "records";
    return o;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_scenario) {
  auto* opt = cmd->add_option("--scenario", flags.scenario_path,
                              "scenario file (json, schema 1)");
  if (needs_scenario) opt->required();
  cmd->add_option("--out", flags.out_path, "write the report here");
  cmd->add_option("--format", flags.format, "human | records")
      ->check(CLI::IsMember({"human", "records"}));
  cmd->add_option("--budget", flags.budget, "run budget for enumeration");
  cmd->add_option("--horizon", flags.horizon_raw,
                  "override the scenario horizon");
  cmd->add_option("--seed", flags.seed_raw, "seeded adversary");
  cmd->add_flag("--exhaustive", flags.exhaustive, "exhaustive adversary");
  cmd->add_flag("--allow-pending", flags.allow_pending,
                "pending verdicts do not fail the exit code");
}

int emit_report(const Report& report, const CommonFlags& flags,
                std::ostream& out) {
  std::string text =
      flags.format == "records" ? report.to_records() : report.to_human();
  if (!flags.out_path.empty()) {
    std::ofstream f(flags.out_path, std::ios::binary);
    f << text;
  } else {
    out << text;
  }
  return report.exit_code(flags.allow_pending);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"bounded-horizon run systems and epistemic checks for "
               "byzantine multi-agent models"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string claim = "all";
  int claim_t = -1;
  AgentId brain = 1;
  AgentId other = 0;
  std::string expr;
  std::string left, top;
  bool whole_table = false;

  auto* cmd_enum = app.add_subcommand("enumerate", "enumerate the run system");
  add_common(cmd_enum, flags, true);

  auto* cmd_check = app.add_subcommand("check", "run the scenario's checks");
  add_common(cmd_check, flags, true);

  auto* cmd_vat = app.add_subcommand(
      "brainvat", "construct and verify a brain-in-a-vat witness");
  add_common(cmd_vat, flags, true);
  cmd_vat->add_option("--claim", claim,
                      "occurred | self_correct | other_faulty | other_correct "
                      "| all");
  cmd_vat->add_option("--t", claim_t, "timestamp of the claim (-1 = all)");
  cmd_vat->add_option("--brain", brain, "the isolated agent");
  cmd_vat->add_option("--other", other, "the other agent for other-* claims");

  auto* cmd_compose = app.add_subcommand(
      "compose", "build and validate an extension composition");
  add_common(cmd_compose, flags, true);
  cmd_compose->add_option("--expr", expr, "extension expression override");

  auto* cmd_matrix =
      app.add_subcommand("matrix", "implementation-class composability");
  cmd_matrix->add_option("left", left, "row class");
  cmd_matrix->add_option("top", top, "column class");
  cmd_matrix->add_flag("--all", whole_table, "print the whole table");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (cmd_matrix->parsed()) {
      if (whole_table || left.empty()) {
        Json table = composability_table_json();
        for (size_t i = 0; i < table["classes"].size(); ++i) {
          out << table["classes"][i].get<std::string>() << ":";
          for (const auto& cell : table["cells"][i]) {
            std::string c = cell.get<std::string>();
            out << " " << (c.empty() ? "." : c);
          }
          out << "\n";
        }
        return 0;
      }
      if (top.empty()) {
        err << "matrix needs two classes or --all\n";
        return 2;
      }
      auto cell = composability(impl_class_from_name(left),
                                impl_class_from_name(top));
      out << (to_string(cell).empty() ? "." : to_string(cell)) << "\n";
      return 0;
    }

    Scenario scenario = load_scenario(flags.scenario_path);
    RunOptions options = flags.options();

    if (cmd_enum->parsed()) {
      Scenario with_enum = scenario;
      with_enum.checks = {CheckSpec{"enumerate", Json{{"check", "enumerate"}}}};
      options.emit_witnesses = true;
      Report report = run_scenario_checks(with_enum, options);
      return emit_report(report, flags, out);
    }
    if (cmd_check->parsed()) {
      Report report = run_scenario_checks(scenario, options);
      return emit_report(report, flags, out);
    }
    if (cmd_vat->parsed()) {
      Json args_json{{"check", "brainvat"}, {"brain", brain}};
      if (other != 0) args_json["other"] = other;
      if (claim != "all") args_json["claims"] = Json::array({claim});
      if (claim_t >= 0) args_json["t"] = claim_t;
      Scenario with_vat = scenario;
      with_vat.checks = {CheckSpec{"brainvat", args_json}};
      Report report = run_scenario_checks(with_vat, options);
      return emit_report(report, flags, out);
    }
    if (cmd_compose->parsed()) {
      Json args_json{{"check", "compose"}};
      if (!expr.empty()) args_json["expr"] = expr;
      Scenario with_compose = scenario;
      with_compose.checks = {CheckSpec{"compose", args_json}};
      Report report = run_scenario_checks(with_compose, options);
      return emit_report(report, flags, out);
    }
  } catch (const BudgetExceeded& e) {
    err << "budget: " << e.what() << "\n";
    return 3;
  } catch (const ScenarioError& e) {
    err << "scenario: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace byzrun
