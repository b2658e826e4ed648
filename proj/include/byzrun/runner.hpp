#pragma once

#include <cstdint>
#include <stdexcept>

#include "byzrun/protocols.hpp"

namespace byzrun {

// Attempted (alpha) and performed (beta) sets of one round, retained so the
// record-level atomic propositions stay decidable after the fact.
struct RoundRecord {
  Timestamp t = 0;
  HapSet attempted_events;
  std::vector<HapSet> attempted_actions;
  HapSet performed_events;
  std::vector<HapSet> performed_actions;

  const HapSet& performed_of(AgentId i) const {
    return performed_actions.at(static_cast<size_t>(i - 1));
  }
  bool operator==(const RoundRecord&) const = default;
};

struct Run {
  std::vector<GlobalState> states;  // indexed by timestamp, 0..horizon
  std::vector<RoundRecord> rounds;  // one per elapsed round
  std::vector<int> choice_trace;    // adversary picks, for stable ordering

  Timestamp horizon() const { return static_cast<Timestamp>(rounds.size()); }
  const GlobalState& at(Timestamp t) const {
    return states.at(static_cast<size_t>(t));
  }
  bool operator==(const Run&) const = default;
};

enum class Verdict { Holds, Pending, Violated };
std::string to_string(Verdict v);

struct RunSystem {
  std::vector<Run> runs;
  std::vector<Verdict> verdicts;
  Timestamp horizon = 0;
};

struct Adversary {
  bool exhaustive = true;
  std::uint64_t seed = 0;
  int samples = 1;

  static Adversary exhaust() { return {true, 0, 0}; }
  static Adversary seeded(std::uint64_t seed, int samples = 1) {
    return {false, seed, samples};
  }
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepChoice {
  int env_index = 0;
  std::vector<int> action_indices;
};

// One round of the transition relation: label the chosen action sets,
// filter events then actions (the action filters see the performed events),
// and update the histories.
std::pair<GlobalState, RoundRecord> step(const GlobalState& state,
                                         const AgentContext& ctx,
                                         const StepChoice& choice, Timestamp t);

// Every weakly consistent run to the horizon (exhaustive mode), or a
// reproducible sample of them (seeded mode). Throws BudgetExceeded rather
// than silently truncating.
RunSystem enumerate_runs(const AgentContext& ctx, Timestamp horizon,
                         const Adversary& adversary, long budget = 100000);

// Bounded-horizon verdict for the run's delivery obligations.
Verdict check_admissibility(const Run& run, const AdmissibilityCond& cond);

// Unmatched send obligations (channel-restricted) left open at the horizon.
std::vector<Gmi> open_obligations(const Run& run,
                                  const AdmissibilityCond& cond);

// True when every weakly consistent prefix below the horizon extends to a
// run whose verdict at the horizon is Holds or Pending.
bool check_non_excluding(const AgentContext& ctx, Timestamp horizon,
                         long budget = 100000);

// Is `to` reachable from `from` in one transition under ctx? Tries the base
// menus plus the performed-set extracted from `to` (membership-checked).
bool is_transition(const AgentContext& ctx, const GlobalState& from,
                   const GlobalState& to, Timestamp t);

// Performed sets recoverable from a state's round layer.
PerformedTuple performed_of_layer(const HapSet& layer, int agents);

// Attribution of a local record to round (t-1) of the run: did o enter
// agent i's history through a byzantine event (faulty cause), or through a
// correct event or performed action (correct cause)? Both may hold.
bool caused_faultily(const Run& run, AgentId i, Timestamp t, const LocalHap& o);
bool caused_correctly(const Run& run, AgentId i, Timestamp t,
                      const LocalHap& o);

}  // namespace byzrun
