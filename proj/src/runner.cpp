#include "byzrun/runner.hpp"

#include <algorithm>

namespace byzrun {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Pending: return "pending";
    case Verdict::Violated: return "violated";
  }
  return "?";
}

std::pair<GlobalState, RoundRecord> step(const GlobalState& state,
                                         const AgentContext& ctx,
                                         const StepChoice& choice,
                                         Timestamp t) {
  auto env_menu = ctx.env.choices(t);
  if (choice.env_index < 0 ||
      static_cast<size_t>(choice.env_index) >= env_menu.size()) {
    throw std::out_of_range("step: env choice out of range");
  }
  RoundRecord rec;
  rec.t = t;
  rec.attempted_events = env_menu[static_cast<size_t>(choice.env_index)];

  int n = ctx.params.agents;
  rec.attempted_actions.resize(static_cast<size_t>(n));
  for (AgentId i = 1; i <= n; ++i) {
    auto menu = ctx.joint.at(static_cast<size_t>(i - 1))
                    .choices(state.local(i), ctx.params);
    int pick = choice.action_indices.at(static_cast<size_t>(i - 1));
    if (pick < 0 || static_cast<size_t>(pick) >= menu.size()) {
      throw std::out_of_range("step: action choice out of range for agent " +
                              std::to_string(i));
    }
    HapSet labeled;
    for (const auto& a : menu[static_cast<size_t>(pick)]) {
      labeled.insert(GlobalHap{to_global(i, t, a)});
    }
    rec.attempted_actions[static_cast<size_t>(i - 1)] = std::move(labeled);
  }

  rec.performed_events =
      ctx.templ.event(state, rec.attempted_events, rec.attempted_actions);
  rec.performed_actions.resize(static_cast<size_t>(n));
  for (AgentId i = 1; i <= n; ++i) {
    rec.performed_actions[static_cast<size_t>(i - 1)] =
        ctx.templ.action(i, rec.attempted_actions, rec.performed_events);
  }

  PerformedTuple x{rec.performed_events, rec.performed_actions};
  return {update_global(state, x), rec};
}

namespace {

struct Enumerator {
  const AgentContext& ctx;
  Timestamp horizon;
  long budget;
  RunSystem out;

  void dfs(Run run, Timestamp t) {
    if (t == horizon) {
      if (static_cast<long>(out.runs.size()) >= budget) {
        throw BudgetExceeded("run budget of " + std::to_string(budget) +
                             " exceeded");
      }
      out.runs.push_back(std::move(run));
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
        StepChoice choice{static_cast<int>(e), picks};
        auto [next_state, rec] = step(state, ctx, choice, t);
        Run extended = run;
        extended.states.push_back(std::move(next_state));
        extended.rounds.push_back(std::move(rec));
        extended.choice_trace.push_back(static_cast<int>(e));
        for (int p : picks) extended.choice_trace.push_back(p);
        dfs(std::move(extended), t + 1);
        // advance the mixed-radix counter over agent menus
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

}  // namespace

RunSystem enumerate_runs(const AgentContext& ctx, Timestamp horizon,
                         const Adversary& adversary, long budget) {
  RunSystem system;
  system.horizon = horizon;
  if (ctx.initial_states.empty()) {
    throw std::invalid_argument("agent context without initial states");
  }
  if (adversary.exhaustive) {
    Enumerator en{ctx, horizon, budget, {}};
    for (size_t s = 0; s < ctx.initial_states.size(); ++s) {
      Run seed;
      seed.states.push_back(ctx.initial_states[s]);
      seed.choice_trace.push_back(static_cast<int>(s));
      en.dfs(std::move(seed), 0);
    }
    system.runs = std::move(en.out.runs);
  } else {
    std::mt19937_64 rng(adversary.seed);
    for (int s = 0; s < std::max(1, adversary.samples); ++s) {
      std::uniform_int_distribution<size_t> init_pick(
          0, ctx.initial_states.size() - 1);
      Run run;
      size_t init_index = init_pick(rng);
      run.states.push_back(ctx.initial_states[init_index]);
      run.choice_trace.push_back(static_cast<int>(init_index));
      for (Timestamp t = 0; t < horizon; ++t) {
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
        run.choice_trace.push_back(choice.env_index);
        for (int p : choice.action_indices) run.choice_trace.push_back(p);
      }
      system.runs.push_back(std::move(run));
      if (static_cast<long>(system.runs.size()) > budget) {
        throw BudgetExceeded("run budget of " + std::to_string(budget) +
                             " exceeded");
      }
    }
  }
  system.verdicts.reserve(system.runs.size());
  for (const auto& run : system.runs) {
    system.verdicts.push_back(check_admissibility(run, ctx.admissibility));
  }
  return system;
}

std::vector<Gmi> open_obligations(const Run& run,
                                  const AdmissibilityCond& cond) {
  std::vector<Gmi> open;
  if (cond.kind == AdmissibilityCond::Kind::All) return open;
  const GlobalState& final_state = run.states.back();
  std::set<std::string> delivered;
  std::vector<Gmi> sent;
  for (const auto& layer : final_state.env.layers) {
    for (const auto& hap : layer) {
      if (const auto* recv = std::get_if<CorrectEvent>(&hap)) {
        delivered.insert(to_string(recv->gmi));
      }
      if (auto gmi = performed_send_gmi(hap)) {
        if (cond.channels.count({gmi->sender, gmi->recipient})) {
          sent.push_back(*gmi);
        }
      }
    }
  }
  for (const auto& gmi : sent) {
    if (!delivered.count(to_string(gmi))) open.push_back(gmi);
  }
  return open;
}

Verdict check_admissibility(const Run& run, const AdmissibilityCond& cond) {
  auto open = open_obligations(run, cond);
  if (open.empty()) return Verdict::Holds;
  if (cond.bounds) {
    Timestamp now = static_cast<Timestamp>(run.states.back().env.length());
    for (const auto& gmi : open) {
      auto d = cond.bounds->delta(gmi.sender, gmi.recipient);
      if (d && gmi.send_time + *d < now) return Verdict::Violated;
    }
  }
  return Verdict::Pending;
}

bool check_non_excluding(const AgentContext& ctx, Timestamp horizon,
                         long budget) {
  RunSystem system = enumerate_runs(ctx, horizon, Adversary::exhaust(), budget);
  if (system.runs.empty()) return false;
  // group runs by prefix depth; every prefix needs a non-violated extension
  for (Timestamp depth = 0; depth < horizon; ++depth) {
    std::map<std::string, bool> prefix_ok;
    for (size_t r = 0; r < system.runs.size(); ++r) {
      std::string key;
      const auto& run = system.runs[r];
      // trace layout: [initial-state index, (env, a_1..a_n) per round]
      size_t per_round = 1 + static_cast<size_t>(ctx.params.agents);
      for (size_t c = 0; c < 1 + per_round * static_cast<size_t>(depth); ++c) {
        key += std::to_string(run.choice_trace.at(c)) + ",";
      }
      bool ok = system.verdicts[r] != Verdict::Violated;
      auto [it, inserted] = prefix_ok.emplace(key, ok);
      if (!inserted) it->second = it->second || ok;
    }
    for (const auto& [key, ok] : prefix_ok) {
      if (!ok) return false;
    }
  }
  return true;
}

bool caused_faultily(const Run& run, AgentId i, Timestamp t,
                     const LocalHap& o) {
  if (t < 1 || t > run.horizon()) return false;
  const RoundRecord& rec = run.rounds.at(static_cast<size_t>(t - 1));
  for (const auto& hap : byz_events_of(rec.performed_events, i)) {
    if (localize_one(hap).count(o)) return true;
  }
  return false;
}

bool caused_correctly(const Run& run, AgentId i, Timestamp t,
                      const LocalHap& o) {
  if (t < 1 || t > run.horizon()) return false;
  const RoundRecord& rec = run.rounds.at(static_cast<size_t>(t - 1));
  for (const auto& hap : correct_events_of(rec.performed_events, i)) {
    if (localize_one(hap).count(o)) return true;
  }
  for (const auto& hap : rec.performed_of(i)) {
    if (localize_one(hap).count(o)) return true;
  }
  return false;
}

PerformedTuple performed_of_layer(const HapSet& layer, int agents) {
  PerformedTuple out;
  out.actions.resize(static_cast<size_t>(agents));
  for (const auto& hap : layer) {
    if (is_correct_action(hap)) {
      out.actions.at(static_cast<size_t>(agent_of(hap) - 1)).insert(hap);
    } else {
      out.events.insert(hap);
    }
  }
  return out;
}

bool is_transition(const AgentContext& ctx, const GlobalState& from,
                   const GlobalState& to, Timestamp t) {
  if (to.env.length() != from.env.length() + 1) return false;
  PerformedTuple target = performed_of_layer(to.env.round_layer(t), ctx.params.agents);

  // candidate environment picks: the base menu plus the performed events
  // themselves when the closed family admits them
  std::vector<HapSet> env_candidates = ctx.env.choices(t);
  if (std::find(env_candidates.begin(), env_candidates.end(), target.events) ==
          env_candidates.end() &&
      ctx.env.contains(t, target.events)) {
    env_candidates.push_back(target.events);
  }

  int n = ctx.params.agents;
  std::vector<std::vector<std::vector<LocalAction>>> menus;
  for (AgentId i = 1; i <= n; ++i) {
    menus.push_back(ctx.joint.at(static_cast<size_t>(i - 1))
                        .choices(from.local(i), ctx.params));
  }
  for (const auto& x_env : env_candidates) {
    std::vector<size_t> picks(static_cast<size_t>(n), 0);
    while (true) {
      std::vector<HapSet> labeled(static_cast<size_t>(n));
      for (AgentId i = 1; i <= n; ++i) {
        for (const auto& a :
             menus[static_cast<size_t>(i - 1)][picks[static_cast<size_t>(i - 1)]]) {
          labeled[static_cast<size_t>(i - 1)].insert(
              GlobalHap{to_global(i, t, a)});
        }
      }
      HapSet beta_env = ctx.templ.event(from, x_env, labeled);
      if (beta_env == target.events) {
        bool actions_match = true;
        std::vector<HapSet> beta_actions(static_cast<size_t>(n));
        for (AgentId i = 1; i <= n && actions_match; ++i) {
          beta_actions[static_cast<size_t>(i - 1)] =
              ctx.templ.action(i, labeled, beta_env);
          actions_match = beta_actions[static_cast<size_t>(i - 1)] ==
                          target.actions[static_cast<size_t>(i - 1)];
        }
        if (actions_match) {
          PerformedTuple x{beta_env, beta_actions};
          if (update_global(from, x) == to) return true;
        }
      }
      size_t slot = 0;
      while (slot < picks.size()) {
        if (++picks[slot] < menus[slot].size()) break;
        picks[slot++] = 0;
      }
      if (slot == picks.size()) break;
    }
  }
  return false;
}

std::vector<LocalHistory> reachable_local_histories(const AgentContext& ctx,
                                                    Timestamp horizon,
                                                    long budget) {
  RunSystem system = enumerate_runs(ctx, horizon, Adversary::exhaust(), budget);
  std::vector<LocalHistory> out;
  auto push = [&](const LocalHistory& h) {
    if (std::find(out.begin(), out.end(), h) == out.end()) out.push_back(h);
  };
  for (const auto& run : system.runs) {
    for (const auto& state : run.states) {
      for (const auto& local : state.locals) push(local);
    }
  }
  return out;
}

}  // namespace byzrun
