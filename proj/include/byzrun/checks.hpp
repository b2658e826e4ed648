#pragma once

#include "byzrun/scenario.hpp"

namespace byzrun {

struct RunOptions {
  long budget = 100000;
  std::optional<Timestamp> horizon;       // override
  std::optional<std::uint64_t> seed;      // override
  std::optional<bool> exhaustive;         // override
  bool emit_witnesses = true;
};

// Scan one named law over a run; empty result means the law holds.
std::optional<std::string> scan_run_law(const std::string& law, const Run& run,
                                        const AgentContext& ctx,
                                        const Extension& ext);

// The full composability table, row/column labels included.
Json composability_table_json();

// Execute one check spec against the scenario.
std::vector<CheckResult> run_check(const CheckSpec& spec,
                                   const Scenario& scenario,
                                   const RunOptions& options);

// Execute every check in the scenario and assemble the report.
Report run_scenario_checks(const Scenario& scenario,
                           const RunOptions& options);

}  // namespace byzrun
