#pragma once

#include "byzrun/runner.hpp"

namespace byzrun {

// ---- implementation classes ----------------------------------------------

enum class ImplClass {
  Adm,
  JP,
  JP_AFB,
  EnvJP,
  EnvJP_AFB,
  EvFJP,
  EvFJP_AFB,
  EvFEnvJP,
  EvFEnvJP_AFB,
  Others,
  JP_DC,
  EnvJP_DC,
  EvFJP_DC,
  EvFEnvJP_DC,
  Others_DC,
  EvFEnvJP_DCmono,
  Others_DCmono,
};

constexpr int kImplClassCount = 17;
std::string to_string(ImplClass c);
ImplClass impl_class_from_name(const std::string& name);
std::vector<ImplClass> all_impl_classes();

// Which mechanisms a class may manipulate, and the properties its safety
// property / filters must keep.
struct ClassTraits {
  bool admissibility = false;
  bool initial_states = false;
  bool joint_protocols = false;
  bool env_protocols = false;
  bool event_filter = false;
  bool standard_action_filters = false;
  bool arbitrary_action_filters = false;
  bool downward_closed = false;
  bool monotonic_filters = false;
};
ClassTraits class_traits(ImplClass c);

enum class Composability { Both, ForthOnly, ReverseOnly, None };
std::string to_string(Composability c);

// Cell (left, top) of the class-composability table.
Composability composability(ImplClass left, ImplClass top);

// ---- operational safety properties ---------------------------------------

struct SafetyProperty {
  std::string name;
  // Does the property admit appending this tuple to this prefix?
  std::function<bool(const GlobalState&, const PerformedTuple&)> admits;
  // Finite tuple generator at desk scale; used to decide S(h) != {} and to
  // drive the attribute checks.
  std::function<std::vector<PerformedTuple>(const GlobalState&)> generate;
};

// Property that admits a tuple iff round_ok holds for it, and shuts off
// permanently once a history layer violates round_ok (which makes both
// safety attributes hold by construction).
SafetyProperty make_prefix_safety(
    std::string name,
    std::function<bool(Timestamp, const PerformedTuple&)> round_ok,
    std::function<std::vector<PerformedTuple>(const GlobalState&)> generate);

SafetyProperty safety_time_bounded(const UpperBoundStructure& bounds,
                                   const ModelParams& params);
SafetyProperty safety_no_faults(const ModelParams& params);
// Deliberately not downward closed: each round must contain go(1).
SafetyProperty safety_requires_go1(const ModelParams& params);

struct SafetyCheckResult {
  bool pass = false;
  std::string detail;
};

SafetyCheckResult check_downward_closed(const SafetyProperty& s,
                                        const std::vector<GlobalState>& states,
                                        std::uint64_t seed);
SafetyCheckResult check_safety_attributes(
    const SafetyProperty& s, const std::vector<GlobalState>& initials,
    int depth);
// Once S(r(t)) is empty it stays empty along the run.
SafetyCheckResult check_once_empty_stays_empty(const SafetyProperty& s,
                                               const RunSystem& system);

// ---- extensions -----------------------------------------------------------

struct ProbeContext {
  ModelParams params;
  std::vector<LocalHistory> histories;
};

struct Extension {
  std::string name;
  std::optional<ImplClass> impl_class;
  bool restricts_joint = false;  // which mechanisms the extension touches
  bool restricts_env = false;
  std::function<bool(const EnvProtocol&, const JointProtocol&,
                     const ProbeContext&)>
      protocol_pairs;
  std::function<bool(const std::vector<GlobalState>&)> initial_families;
  EventFilter event_filter;
  ActionFilter action_filter;
  AdmissibilityCond admissibility;
  // Delivery deadlines the environment-protocol family enforces.
  std::optional<UpperBoundStructure> delivery_bounds;
  std::optional<MulticastProblem> multicast;  // channel groups, when restricted
  std::vector<SafetyProperty> safeties;   // constituent safety properties
  std::vector<std::string> run_laws;      // names of per-run laws to scan
};

// B | S | RC(C) | TC(bounds) | SC(C) | MC(Ch) | BC | LSS
Extension ext_byzantine(const ModelParams& params);
Extension ext_synchronous(const ModelParams& params);
Extension ext_reliable(const std::set<std::pair<AgentId, AgentId>>& channels,
                       const ModelParams& params);
Extension ext_time_bounded(const UpperBoundStructure& bounds,
                           const ModelParams& params);
Extension ext_sync_comm(const std::set<std::pair<AgentId, AgentId>>& channels,
                        const ModelParams& params);
Extension ext_multicast(const MulticastProblem& ch, const ModelParams& params);
Extension ext_broadcast(const ModelParams& params);
Extension ext_lockstep(const ModelParams& params);

// compose(a, b): b's restrictions applied first in the filter order.
Extension compose_extensions(const Extension& a, const Extension& b);

TransitionTemplate template_of(const Extension& e);

// Does the declared implementation class cover what the extension actually
// manipulates? Empty result means the declaration lints clean.
std::vector<std::string> lint_impl_class(const Extension& e,
                                         ImplClass declared,
                                         const ModelParams& params,
                                         std::uint64_t seed);

struct CompatReport {
  bool compatible = false;
  std::string detail;
  int witness_runs = 0;
};

// Intersection witnesses plus one transitional run of a witness context.
CompatReport check_compatible(const std::vector<Extension>& exts,
                              const ModelParams& params, Timestamp horizon);

std::set<std::pair<AgentId, AgentId>> all_channels(int agents);

}  // namespace byzrun
