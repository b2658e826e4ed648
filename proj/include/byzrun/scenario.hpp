#pragma once

#include <json.hpp>

#include "byzrun/epistemics.hpp"
#include "byzrun/extensions.hpp"

namespace byzrun {

using Json = nlohmann::json;

// ---- canonical serialization ----------------------------------------------

Json json_of(const HapSet& set);
Json json_of(const LocalHistory& h);
Json json_of(const GlobalState& state);
Json json_of(const Run& run);
Json json_of(const RunSystem& system);

// ---- scenario files ---------------------------------------------------------

struct CheckSpec {
  std::string kind;
  Json args;
};

struct Scenario {
  std::string name;
  ModelParams params;
  std::string extension_expr = "B";
  EnvProtocol env;
  JointProtocol joint;
  std::vector<GlobalState> initial_states;
  Adversary adversary = Adversary::exhaust();
  std::vector<CheckSpec> checks;
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const Json& doc, const std::string& origin);

// B | S | RC(ch) | TC(bound) | SC(ch) | MC(groups) | BC | LSS | compose(...)
Extension build_extension(const std::string& expr, const ModelParams& params);
// The parts of a compose(...) expression, or the sole extension.
std::vector<Extension> extension_parts(const std::string& expr,
                                       const ModelParams& params);

AgentContext build_context(const Scenario& scenario);

// ---- reports ----------------------------------------------------------------

struct CheckResult {
  std::string check;    // the check that produced this line
  std::string law;      // which result it instantiates
  std::string verdict;  // pass | fail | pending
  Timestamp horizon = 0;
  std::string detail;
  Json witness;  // serialized runs or tables; null when absent

  bool passed() const { return verdict == "pass"; }
};

struct Report {
  std::string scenario;
  bool exhaustive = true;
  std::uint64_t seed = 0;
  Timestamp horizon = 0;
  std::vector<CheckResult> results;

  // Line-delimited records; byte-stable for a fixed scenario and seed.
  std::string to_records() const;
  std::string to_human() const;
  int exit_code(bool allow_pending) const;
};

}  // namespace byzrun
