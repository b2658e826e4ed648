#pragma once

#include <map>
#include <optional>

#include "byzrun/filters.hpp"
#include "byzrun/params.hpp"
#include "byzrun/state.hpp"

namespace byzrun {

// ---- agent side ---------------------------------------------------------

struct ProtocolRule {
  int when_length = -1;  // match histories of this length; -1 matches all
  std::vector<std::vector<LocalAction>> choices;
};

// Deterministic map from a local history to a non-empty menu of action sets.
struct AgentProtocol {
  enum class Kind { Table, SilentTick, BroadcastAll };
  Kind kind = Kind::SilentTick;
  std::vector<ProtocolRule> rules;  // for Table

  std::vector<std::vector<LocalAction>> choices(const LocalHistory& h,
                                                const ModelParams& params) const;
};

AgentProtocol silent_tick_protocol();
// Every activation ticks and broadcasts one message to all agents
// (one menu entry per message in the alphabet).
AgentProtocol broadcast_all_protocol();

using JointProtocol = std::vector<AgentProtocol>;  // index 0 holds agent 1

// ---- environment side ---------------------------------------------------

struct EnvRule {
  int when_time = -1;  // match round t; -1 matches all
  // Each choice is a list of entries; an entry is a global hap in canonical
  // text (the token $t stands for the current round) or one of the macros
  // @go_all, @go_all_except(i), @deliver_all_same_round.
  std::vector<std::vector<std::string>> choices;
};

struct EnvCapabilities {
  std::set<AgentId> fallible;
  std::set<AgentId> delayable;
  std::set<AgentId> gullible;
};

// Time-indexed family of t-coherent event sets. The rules give the base
// menu enumeration draws from; the capabilities close the family under the
// per-agent fault operations, which membership tests honour symbolically.
class EnvProtocol {
 public:
  std::vector<EnvRule> rules;
  EnvCapabilities caps;
  ModelParams params;

  // Base menu for round t. Throws if a rule produces an incoherent set.
  std::vector<HapSet> choices(Timestamp t) const;

  // Membership in the closed family.
  bool contains(Timestamp t, const HapSet& x) const;

  // The bounded fault alphabet fault injections for agent i draw from.
  std::vector<GlobalHap> fault_alphabet(AgentId i, Timestamp t) const;

  // Base menu plus single capability applications, for property checks.
  std::vector<HapSet> sample_family(Timestamp t, size_t cap = 256) const;
};

EnvProtocol silent_env(const ModelParams& params);

// ---- problem structures -------------------------------------------------

struct MulticastProblem {
  // groups[i-1] = the multicast groups agent i may address
  std::vector<std::set<std::set<AgentId>>> groups;

  static MulticastProblem broadcast(int agents);
};

struct UpperBoundStructure {
  // nullopt encodes an unbounded channel
  std::map<std::pair<AgentId, AgentId>, std::optional<int>> per_channel;
  std::optional<int> fallback;  // bound for channels not listed

  std::optional<int> delta(AgentId from, AgentId to) const;

  static UpperBoundStructure unbounded();
  static UpperBoundStructure synchronous(
      const std::set<std::pair<AgentId, AgentId>>& channels);
};

std::set<std::pair<AgentId, AgentId>> all_channels(int agents);

// ---- validators and classification --------------------------------------

bool validate_synchronous(const JointProtocol& joint,
                          const std::vector<LocalHistory>& probe,
                          const ModelParams& params);

bool validate_multicast(const JointProtocol& joint, const MulticastProblem& ch,
                        const std::vector<LocalHistory>& probe,
                        const ModelParams& params);

bool validate_time_bounded(const EnvProtocol& env,
                           const UpperBoundStructure& bounds,
                           Timestamp horizon);

enum class FaultCapability { Fallible, Delayable, Gullible };

std::set<FaultCapability> classify_agent(const EnvProtocol& env, AgentId i,
                                         Timestamp horizon);

// ---- context ------------------------------------------------------------

struct AdmissibilityCond {
  enum class Kind { All, EDel } kind = Kind::All;
  std::set<std::pair<AgentId, AgentId>> channels;  // EDel obligations
  // Delivery deadlines known from the environment-protocol family; lets a
  // missed deadline turn Pending into Violated.
  std::optional<UpperBoundStructure> bounds;

  static AdmissibilityCond all() { return {}; }
  static AdmissibilityCond edel(
      std::set<std::pair<AgentId, AgentId>> channels,
      std::optional<UpperBoundStructure> bounds = std::nullopt);
};

struct AgentContext {
  EnvProtocol env;
  std::vector<GlobalState> initial_states;
  TransitionTemplate templ;
  AdmissibilityCond admissibility;
  JointProtocol joint;
  ModelParams params;
};

// All distinct local histories occurring in the states reachable within the
// horizon; the default probe set for the protocol validators.
std::vector<LocalHistory> reachable_local_histories(const AgentContext& ctx,
                                                    Timestamp horizon,
                                                    long budget);

}  // namespace byzrun
