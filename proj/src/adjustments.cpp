#include "byzrun/adjustments.hpp"

#include <algorithm>

namespace byzrun {

std::pair<HapSet, HapSet> fake_intervention(AgentId i, Timestamp m,
                                            const Run& r) {
  if (m >= r.horizon()) {
    throw AdjustmentError("fake intervention needs the round record of round " +
                          std::to_string(m));
  }
  const RoundRecord& rec = r.rounds.at(static_cast<size_t>(m));
  HapSet events = byz_events_of(rec.performed_events, i);
  for (const auto& hap : correct_events_of(rec.performed_events, i)) {
    events.insert(ByzEvent{i, std::get<CorrectEvent>(hap)});
  }
  for (const auto& hap : rec.performed_of(i)) {
    events.insert(ByzAction{i, std::nullopt, std::get<CorrectAction>(hap)});
  }
  HapSet sys = system_events_of(rec.performed_events, i);
  bool go_or_sleep =
      sys.size() == 1 &&
      std::get<SystemEvent>(*sys.begin()).kind != SystemEventKind::Hibernate;
  events.insert(make_system(
      i, go_or_sleep ? SystemEventKind::Sleep : SystemEventKind::Hibernate));
  return {HapSet{}, events};
}

std::pair<HapSet, HapSet> fake_prime_intervention(AgentId i, Timestamp m,
                                                  const Run& r) {
  auto [actions, events] = fake_intervention(i, m, r);
  HapSet adjusted;
  for (const auto& hap : events) {
    if (const auto* b = std::get_if<ByzAction>(&hap)) {
      // erase the performed half, keep only what the agent records
      adjusted.insert(ByzAction{b->agent, std::nullopt, b->recorded});
    } else {
      adjusted.insert(hap);
    }
  }
  return {actions, adjusted};
}

std::pair<HapSet, HapSet> Intervention::evaluate(const Run& r,
                                                 Timestamp m) const {
  switch (kind) {
    case Kind::Freeze: return {HapSet{}, HapSet{}};
    case Kind::FFreeze: return {HapSet{}, hap_set({make_fail(agent)})};
    case Kind::Fake: return fake_intervention(agent, m, r);
    case Kind::FakePrime: return fake_prime_intervention(agent, m, r);
    case Kind::Custom: return {custom_actions, custom_events};
  }
  throw std::logic_error("unreachable");
}

Intervention freeze(AgentId i) {
  return Intervention{Intervention::Kind::Freeze, i, {}, {}};
}
Intervention freeze_faulty(AgentId i) {
  return Intervention{Intervention::Kind::FFreeze, i, {}, {}};
}
Intervention fake_rule(AgentId i) {
  return Intervention{Intervention::Kind::Fake, i, {}, {}};
}
Intervention fake_prime_rule(AgentId i) {
  return Intervention{Intervention::Kind::FakePrime, i, {}, {}};
}
Intervention custom_events_rule(AgentId i, HapSet events, HapSet actions) {
  return Intervention{Intervention::Kind::Custom, i, std::move(events),
                      std::move(actions)};
}

std::vector<Run> apply_adjustment(const Run& r, const Adjustment& adj,
                                  const AgentContext& ctx, Timestamp horizon,
                                  const Adversary& adversary) {
  Timestamp extent = adj.extent();
  if (extent >= horizon) {
    throw AdjustmentError("adjustment extent " + std::to_string(extent) +
                          " reaches past the horizon " +
                          std::to_string(horizon));
  }
  Run prefix;
  prefix.states.push_back(r.at(0));  // clause (a): same initial state
  for (Timestamp m = 0; m <= extent; ++m) {
    const JointIntervention& joint = adj.rounds.at(static_cast<size_t>(m));
    if (static_cast<int>(joint.per_agent.size()) != ctx.params.agents) {
      throw AdjustmentError("joint intervention at round " + std::to_string(m) +
                            " does not cover every agent");
    }
    PerformedTuple x;
    x.actions.resize(static_cast<size_t>(ctx.params.agents));
    for (AgentId i = 1; i <= ctx.params.agents; ++i) {
      auto [acts, evs] =
          joint.per_agent[static_cast<size_t>(i - 1)].evaluate(r, m);
      x.actions[static_cast<size_t>(i - 1)] = std::move(acts);
      x.events.insert(evs.begin(), evs.end());
    }
    auto violations = coherence_violations(x.events, m);
    if (!violations.empty()) {
      throw AdjustmentError(
          "clauses (b)-(c): joint intervention at round " + std::to_string(m) +
          " prescribes an incoherent event set: " + violations.front());
    }
    RoundRecord rec;
    rec.t = m;
    rec.attempted_events = x.events;
    rec.attempted_actions = x.actions;
    rec.performed_events = x.events;
    rec.performed_actions = x.actions;
    prefix.states.push_back(update_global(prefix.states.back(), x));
    prefix.rounds.push_back(std::move(rec));
  }

  // beyond the extent the template takes over
  std::vector<Run> out;
  if (extent + 1 >= horizon) {
    out.push_back(std::move(prefix));
    return out;
  }
  struct Continue {
    const AgentContext& ctx;
    Timestamp horizon;
    std::vector<Run>& out;

    void dfs(Run run, Timestamp t) {
      if (t == horizon) {
        out.push_back(std::move(run));
        return;
      }
      const GlobalState& state = run.states.back();
      auto env_menu = ctx.env.choices(t);
      std::vector<size_t> menu_sizes;
      for (AgentId i = 1; i <= ctx.params.agents; ++i) {
        menu_sizes.push_back(ctx.joint.at(static_cast<size_t>(i - 1))
                                 .choices(state.local(i), ctx.params)
                                 .size());
      }
      for (size_t e = 0; e < env_menu.size(); ++e) {
        std::vector<int> picks(static_cast<size_t>(ctx.params.agents), 0);
        while (true) {
          auto [next_state, rec] =
              step(state, ctx, StepChoice{static_cast<int>(e), picks}, t);
          Run extended = run;
          extended.states.push_back(std::move(next_state));
          extended.rounds.push_back(std::move(rec));
          dfs(std::move(extended), t + 1);
          size_t slot = 0;
          while (slot < picks.size()) {
            if (static_cast<size_t>(++picks[slot]) < menu_sizes[slot]) break;
            picks[slot++] = 0;
          }
          if (slot == picks.size()) break;
        }
      }
    }
  };
  if (adversary.exhaustive) {
    Continue c{ctx, horizon, out};
    c.dfs(std::move(prefix), extent + 1);
  } else {
    std::mt19937_64 rng(adversary.seed);
    Run run = prefix;
    for (Timestamp t = extent + 1; t < horizon; ++t) {
      const GlobalState& state = run.states.back();
      auto env_menu = ctx.env.choices(t);
      std::uniform_int_distribution<size_t> env_pick(0, env_menu.size() - 1);
      StepChoice choice;
      choice.env_index = static_cast<int>(env_pick(rng));
      for (AgentId i = 1; i <= ctx.params.agents; ++i) {
        auto menu = ctx.joint.at(static_cast<size_t>(i - 1))
                        .choices(state.local(i), ctx.params);
        std::uniform_int_distribution<size_t> pick(0, menu.size() - 1);
        choice.action_indices.push_back(static_cast<int>(pick(rng)));
      }
      auto [next_state, rec] = step(state, ctx, choice, t);
      run.states.push_back(std::move(next_state));
      run.rounds.push_back(std::move(rec));
    }
    out.push_back(std::move(run));
  }
  return out;
}

Adjustment brain_adjustment(const BrainScenario& scenario, int agents) {
  Adjustment adj;
  for (Timestamp m = 0; m <= scenario.extent; ++m) {
    JointIntervention joint;
    for (AgentId i = 1; i <= agents; ++i) {
      if (i == scenario.brain) {
        joint.per_agent.push_back(
            scenario.variant == BrainScenario::Variant::LockStep
                ? fake_prime_rule(i)
                : fake_rule(i));
      } else {
        auto it = scenario.others.find(i);
        bool faulty =
            it != scenario.others.end() && it->second == Intervention::Kind::FFreeze;
        joint.per_agent.push_back(faulty ? freeze_faulty(i) : freeze(i));
      }
    }
    adj.rounds.push_back(std::move(joint));
  }
  return adj;
}

Adjustment delay_adjustment_faulty_brain(AgentId brain, int agents) {
  Adjustment adj;
  JointIntervention joint;
  for (AgentId i = 1; i <= agents; ++i) {
    if (i == brain) {
      // hibernate keeps the local history untouched while marking i faulty
      joint.per_agent.push_back(custom_events_rule(
          i, hap_set({make_system(i, SystemEventKind::Hibernate)})));
    } else {
      joint.per_agent.push_back(freeze(i));
    }
  }
  adj.rounds.push_back(std::move(joint));
  return adj;
}

Adjustment delay_adjustment_faulty_other(AgentId brain, AgentId other,
                                         int agents) {
  Adjustment adj;
  JointIntervention joint;
  for (AgentId i = 1; i <= agents; ++i) {
    if (i == other) {
      joint.per_agent.push_back(freeze_faulty(i));
    } else {
      joint.per_agent.push_back(freeze(i));
    }
  }
  (void)brain;
  adj.rounds.push_back(std::move(joint));
  return adj;
}

bool BrainReport::all_pass() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.pass; });
}

BrainReport verify_brain_properties(const Run& source, const Run& modified,
                                    const BrainScenario& scenario,
                                    const AgentContext& ctx) {
  BrainReport report;
  AgentId brain = scenario.brain;
  Timestamp t = scenario.extent + 1;  // the reference time of the claims

  {
    PropertyResult p{"modified_run_transitional", true, ""};
    for (Timestamp m = 0; m < modified.horizon(); ++m) {
      if (!is_transition(ctx, modified.at(m), modified.at(m + 1), m)) {
        p.pass = false;
        p.detail = "no transition justifies round " + std::to_string(m);
        break;
      }
    }
    report.properties.push_back(std::move(p));
  }
  {
    PropertyResult p{"brain_cannot_distinguish", true, ""};
    for (Timestamp m = 0; m <= t && m <= modified.horizon(); ++m) {
      if (!(modified.at(m).local(brain) == source.at(m).local(brain))) {
        p.pass = false;
        p.detail = "brain histories differ at time " + std::to_string(m);
        break;
      }
    }
    report.properties.push_back(std::move(p));
  }
  {
    PropertyResult p{"others_stay_initial", true, ""};
    for (AgentId j = 1; j <= ctx.params.agents; ++j) {
      if (j == brain) continue;
      for (Timestamp m = 0; m <= t && m <= modified.horizon(); ++m) {
        if (!(modified.at(m).local(j) == modified.at(0).local(j))) {
          p.pass = false;
          p.detail = "agent " + std::to_string(j) + " moved by time " +
                     std::to_string(m);
        }
      }
    }
    report.properties.push_back(std::move(p));
  }
  {
    PropertyResult p{"brain_faulty_from_start", true, ""};
    const GlobalState& end = modified.at(std::min(t, modified.horizon()));
    for (Timestamp m = 1; m <= t && m <= modified.horizon(); ++m) {
      if (!agent_faulty_at(end, brain, m)) {
        p.pass = false;
        p.detail = "brain not failed by time " + std::to_string(m);
        break;
      }
    }
    report.properties.push_back(std::move(p));
  }
  {
    PropertyResult p{"others_faulty_iff_ffreeze", true, ""};
    const GlobalState& end = modified.at(std::min(t, modified.horizon()));
    for (AgentId j = 1; j <= ctx.params.agents; ++j) {
      if (j == brain) continue;
      auto it = scenario.others.find(j);
      bool expect = it != scenario.others.end() &&
                    it->second == Intervention::Kind::FFreeze;
      if (agent_faulty_at(end, j, t) != expect) {
        p.pass = false;
        p.detail = "agent " + std::to_string(j) + " fault status unexpected";
      }
    }
    report.properties.push_back(std::move(p));
  }
  {
    PropertyResult p{"nothing_occurred_correctly", true, ""};
    for (Timestamp m = 1; m <= t && m <= modified.horizon(); ++m) {
      for (AgentId i = 1; i <= ctx.params.agents; ++i) {
        for (const auto& o : ctx.params.local_hap_alphabet(i)) {
          if (caused_correctly(modified, i, m, o)) {
            p.pass = false;
            p.detail = to_string(o) + " occurred correctly to agent " +
                       std::to_string(i) + " at round " + std::to_string(m - 1);
          }
        }
      }
    }
    report.properties.push_back(std::move(p));
  }
  if (scenario.variant == BrainScenario::Variant::LockStep) {
    {
      PropertyResult p{"others_events_at_most_fail", true, ""};
      for (Timestamp m = 0; m <= scenario.extent; ++m) {
        const RoundRecord& rec = modified.rounds.at(static_cast<size_t>(m));
        for (AgentId j = 1; j <= ctx.params.agents; ++j) {
          if (j == brain) continue;
          HapSet evs = events_of_agent(rec.performed_events, j);
          auto it = scenario.others.find(j);
          bool ffreeze = it != scenario.others.end() &&
                         it->second == Intervention::Kind::FFreeze;
          HapSet expect =
              ffreeze ? hap_set({make_fail(j)}) : HapSet{};
          if (evs != expect) {
            p.pass = false;
            p.detail = "agent " + std::to_string(j) + " events at round " +
                       std::to_string(m) + " not " +
                       (ffreeze ? "{fail}" : "empty");
          }
        }
      }
      report.properties.push_back(std::move(p));
    }
    {
      PropertyResult p{"brain_no_correct_events", true, ""};
      for (Timestamp m = 0; m <= scenario.extent; ++m) {
        const RoundRecord& rec = modified.rounds.at(static_cast<size_t>(m));
        if (!correct_events_of(rec.performed_events, brain).empty()) {
          p.pass = false;
          p.detail = "correct event for the brain at round " + std::to_string(m);
        }
      }
      report.properties.push_back(std::move(p));
    }
    {
      PropertyResult p{"no_actions_before_extent", true, ""};
      for (Timestamp m = 0; m <= scenario.extent; ++m) {
        const RoundRecord& rec = modified.rounds.at(static_cast<size_t>(m));
        for (AgentId j = 1; j <= ctx.params.agents; ++j) {
          if (!rec.performed_of(j).empty()) {
            p.pass = false;
            p.detail = "agent " + std::to_string(j) + " acted at round " +
                       std::to_string(m);
          }
        }
      }
      report.properties.push_back(std::move(p));
    }
    {
      PropertyResult p{"no_delivery_obligations", true, ""};
      auto open = open_obligations(modified, ctx.admissibility);
      if (!open.empty()) {
        p.pass = false;
        p.detail = "unmatched send " + to_string(open.front()) +
                   " obligates a delivery";
      }
      report.properties.push_back(std::move(p));
    }
    {
      PropertyResult p{"strongly_consistent", true, ""};
      Verdict v = check_admissibility(modified, ctx.admissibility);
      if (v == Verdict::Violated) {
        p.pass = false;
        p.detail = "admissibility violated at the horizon";
      }
      report.properties.push_back(std::move(p));
    }
  }
  return report;
}

}  // namespace byzrun
