#pragma once

#include "byzrun/runner.hpp"

// Interventions and adjustments: per-round overrides of the performed sets
// used to build counterfactual runs indistinguishable for one agent.

namespace byzrun {

struct Intervention {
  enum class Kind { Freeze, FFreeze, Fake, FakePrime, Custom };
  Kind kind = Kind::Freeze;
  AgentId agent = 0;      // owner of the intervention
  HapSet custom_events;   // Kind::Custom only
  HapSet custom_actions;  // Kind::Custom only

  // The (actions, events) this intervention prescribes for round m of run r.
  std::pair<HapSet, HapSet> evaluate(const Run& r, Timestamp m) const;
};

Intervention freeze(AgentId i);
Intervention freeze_faulty(AgentId i);   // emits fail(i)
Intervention fake_rule(AgentId i);       // replays the round as imagination
Intervention fake_prime_rule(AgentId i); // ... with performed halves erased
Intervention custom_events_rule(AgentId i, HapSet events,
                                HapSet actions = {});

// Evaluated forms of the two replay rules, exposed for direct inspection.
std::pair<HapSet, HapSet> fake_intervention(AgentId i, Timestamp m,
                                            const Run& r);
std::pair<HapSet, HapSet> fake_prime_intervention(AgentId i, Timestamp m,
                                                  const Run& r);

struct JointIntervention {
  std::vector<Intervention> per_agent;  // index 0 holds agent 1
};

struct Adjustment {
  std::vector<JointIntervention> rounds;  // index m applies at round m

  Timestamp extent() const {
    return static_cast<Timestamp>(rounds.size()) - 1;
  }
};

struct AdjustmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs obtained from r by the adjustment: same initial state, prescribed
// rounds through the extent, transitions beyond it. Throws AdjustmentError
// when a prescribed round is not coherent.
std::vector<Run> apply_adjustment(const Run& r, const Adjustment& adj,
                                  const AgentContext& ctx, Timestamp horizon,
                                  const Adversary& adversary);

// ---- the brain-in-a-vat construction --------------------------------------

struct BrainScenario {
  AgentId brain = 1;
  std::map<AgentId, Intervention::Kind> others;  // Freeze or FFreeze
  Timestamp extent = 0;                          // rounds 0..extent replayed
  enum class Variant { Sync, LockStep } variant = Variant::Sync;
};

Adjustment brain_adjustment(const BrainScenario& scenario, int agents);

// One-round delay adjustments used to reduce time-0 claims to later rounds:
// the brain perceives nothing in round 0 while the round marks it (or some
// other agent) faulty.
Adjustment delay_adjustment_faulty_brain(AgentId brain, int agents);
Adjustment delay_adjustment_faulty_other(AgentId brain, AgentId other,
                                         int agents);

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct BrainReport {
  std::vector<PropertyResult> properties;
  bool all_pass() const;
};

// Machine-checks the indistinguishability, freezing, fault-attribution and
// transitionality properties of a modified run against its source, plus the
// lock-step isolation properties and the no-correct-occurrence law.
BrainReport verify_brain_properties(const Run& source, const Run& modified,
                                    const BrainScenario& scenario,
                                    const AgentContext& ctx);

}  // namespace byzrun
