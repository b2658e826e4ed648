#include "byzrun/extensions.hpp"

#include <algorithm>
#include <array>

namespace byzrun {

namespace {

// Row/column order of the composability table.
constexpr std::array<ImplClass, kImplClassCount> kTableOrder = {
    ImplClass::Adm,          ImplClass::JP,
    ImplClass::EnvJP,        ImplClass::EvFJP,
    ImplClass::EvFEnvJP,     ImplClass::JP_AFB,
    ImplClass::EnvJP_AFB,    ImplClass::EvFJP_AFB,
    ImplClass::EvFEnvJP_AFB, ImplClass::Others,
    ImplClass::JP_DC,        ImplClass::EnvJP_DC,
    ImplClass::EvFJP_DC,     ImplClass::EvFEnvJP_DC,
    ImplClass::Others_DC,    ImplClass::EvFEnvJP_DCmono,
    ImplClass::Others_DCmono,
};

// c = composable both ways, f = forth only, r = reverse only, . = neither.
constexpr std::array<const char*, kImplClassCount> kComposability = {
    "ccccccccccccccccc",  // Adm
    "ccccccccccccccccc",  // JP
    "ccccccccccccccccc",  // EnvJP
    "cc.r.c.r..cccffcc",  // EvFJP
    "cc.r.c.r..cccffcc",  // EvFEnvJP
    "c....cccc.ccccfcc",  // JP-AFB
    "c....cccc.ccccfcc",  // EnvJP-AFB
    "c....c.r..cccffcc",  // EvFJP-AFB
    "c....c.r..cccffcc",  // EvFEnvJP-AFB
    "c.........cccffcc",  // Others
    "ccccccccccccccccc",  // JP_DC
    "ccccccccccccccccc",  // EnvJP_DC
    "cc.r.c.r..cccffcc",  // EvFJP_DC
    "cc.r.c.r..cccffcc",  // EvFEnvJP_DC
    "c.........cccffcc",  // Others_DC
    "cc.r.c.r..cccffcc",  // EvFEnvJP_DCmono
    "c.........cccffcc",  // Others_DCmono
};

int table_index(ImplClass c) {
  for (int i = 0; i < kImplClassCount; ++i) {
    if (kTableOrder[static_cast<size_t>(i)] == c) return i;
  }
  throw std::logic_error("unknown implementation class");
}

}  // namespace

std::string to_string(ImplClass c) {
  switch (c) {
    case ImplClass::Adm: return "Adm";
    case ImplClass::JP: return "JP";
    case ImplClass::JP_AFB: return "JP-AFB";
    case ImplClass::EnvJP: return "EnvJP";
    case ImplClass::EnvJP_AFB: return "EnvJP-AFB";
    case ImplClass::EvFJP: return "EvFJP";
    case ImplClass::EvFJP_AFB: return "EvFJP-AFB";
    case ImplClass::EvFEnvJP: return "EvFEnvJP";
    case ImplClass::EvFEnvJP_AFB: return "EvFEnvJP-AFB";
    case ImplClass::Others: return "Others";
    case ImplClass::JP_DC: return "JP_DC";
    case ImplClass::EnvJP_DC: return "EnvJP_DC";
    case ImplClass::EvFJP_DC: return "EvFJP_DC";
    case ImplClass::EvFEnvJP_DC: return "EvFEnvJP_DC";
    case ImplClass::Others_DC: return "Others_DC";
    case ImplClass::EvFEnvJP_DCmono: return "EvFEnvJP_DCmono";
    case ImplClass::Others_DCmono: return "Others_DCmono";
  }
  return "?";
}

ImplClass impl_class_from_name(const std::string& name) {
  for (auto c : all_impl_classes()) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown implementation class '" + name + "'");
}

std::vector<ImplClass> all_impl_classes() {
  return std::vector<ImplClass>(kTableOrder.begin(), kTableOrder.end());
}

ClassTraits class_traits(ImplClass c) {
  ClassTraits t;
  t.admissibility = true;
  t.initial_states = true;
  switch (c) {
    case ImplClass::Adm: break;
    case ImplClass::JP:
    case ImplClass::JP_DC: t.joint_protocols = true; break;
    case ImplClass::JP_AFB:
      t.joint_protocols = t.standard_action_filters = true;
      break;
    case ImplClass::EnvJP:
    case ImplClass::EnvJP_DC:
      t.joint_protocols = t.env_protocols = true;
      break;
    case ImplClass::EnvJP_AFB:
      t.joint_protocols = t.env_protocols = t.standard_action_filters = true;
      break;
    case ImplClass::EvFJP:
    case ImplClass::EvFJP_DC:
      t.joint_protocols = t.event_filter = true;
      break;
    case ImplClass::EvFJP_AFB:
      t.joint_protocols = t.event_filter = t.standard_action_filters = true;
      break;
    case ImplClass::EvFEnvJP:
    case ImplClass::EvFEnvJP_DC:
    case ImplClass::EvFEnvJP_DCmono:
      t.joint_protocols = t.env_protocols = t.event_filter = true;
      break;
    case ImplClass::EvFEnvJP_AFB:
      t.joint_protocols = t.env_protocols = t.event_filter =
          t.standard_action_filters = true;
      break;
    case ImplClass::Others:
    case ImplClass::Others_DC:
    case ImplClass::Others_DCmono:
      t.joint_protocols = t.env_protocols = t.event_filter =
          t.arbitrary_action_filters = true;
      break;
  }
  switch (c) {
    case ImplClass::JP_DC:
    case ImplClass::EnvJP_DC:
    case ImplClass::EvFJP_DC:
    case ImplClass::EvFEnvJP_DC:
    case ImplClass::Others_DC:
    case ImplClass::EvFEnvJP_DCmono:
    case ImplClass::Others_DCmono: t.downward_closed = true; break;
    default: break;
  }
  if (c == ImplClass::EvFEnvJP_DCmono || c == ImplClass::Others_DCmono) {
    t.monotonic_filters = true;
  }
  return t;
}

std::string to_string(Composability c) {
  switch (c) {
    case Composability::Both: return "c";
    case Composability::ForthOnly: return "f";
    case Composability::ReverseOnly: return "r";
    case Composability::None: return "";
  }
  return "";
}

Composability composability(ImplClass left, ImplClass top) {
  char cell = kComposability[static_cast<size_t>(table_index(left))]
                            [table_index(top)];
  switch (cell) {
    case 'c': return Composability::Both;
    case 'f': return Composability::ForthOnly;
    case 'r': return Composability::ReverseOnly;
    default: return Composability::None;
  }
}

// ---- safety properties ----------------------------------------------------

SafetyProperty make_prefix_safety(
    std::string name,
    std::function<bool(Timestamp, const PerformedTuple&)> round_ok,
    std::function<std::vector<PerformedTuple>(const GlobalState&)> generate) {
  SafetyProperty s;
  s.name = std::move(name);
  auto clean = [round_ok](const GlobalState& h) {
    for (Timestamp m = 0; m < h.time(); ++m) {
      if (!round_ok(m, performed_of_layer(h.env.round_layer(m),
                                          h.agent_count()))) {
        return false;
      }
    }
    return true;
  };
  s.admits = [round_ok, clean](const GlobalState& h, const PerformedTuple& x) {
    return clean(h) && round_ok(h.time(), x);
  };
  s.generate = std::move(generate);
  return s;
}

namespace {

std::vector<PerformedTuple> default_tuple_menu(const ModelParams& params,
                                               const GlobalState& h) {
  Timestamp now = h.time();
  std::vector<PerformedTuple> out;
  auto blank = [&] {
    PerformedTuple x;
    x.actions.resize(static_cast<size_t>(params.agents));
    return x;
  };
  out.push_back(blank());  // empty round
  {
    PerformedTuple x = blank();
    for (AgentId i = 1; i <= params.agents; ++i) {
      x.events.insert(make_system(i, SystemEventKind::Go));
    }
    out.push_back(x);
  }
  {
    PerformedTuple x = blank();
    for (AgentId i = 2; i <= params.agents; ++i) {
      x.events.insert(make_system(i, SystemEventKind::Go));
    }
    out.push_back(x);  // go for everyone but agent 1
  }
  {
    PerformedTuple x = blank();
    x.events.insert(make_fail(1));
    out.push_back(x);
  }
  {
    PerformedTuple x = blank();
    x.events.insert(make_system(1, SystemEventKind::Sleep));
    out.push_back(x);
  }
  if (!params.messages.empty() && params.agents >= 2) {
    const Message& msg = params.messages.front();
    {
      // same-round delivery with its performed send
      PerformedTuple x = blank();
      Gmi gmi = make_gmi(1, 2, msg, 0, now);
      x.events.insert(make_system(1, SystemEventKind::Go));
      x.events.insert(make_system(2, SystemEventKind::Go));
      x.events.insert(make_delivery(gmi));
      x.actions[0].insert(GlobalHap{to_global(1, now, SendAction{2, msg, 0})});
      out.push_back(x);
    }
    {
      // stale delivery: sent in round 0, delivered now
      PerformedTuple x = blank();
      x.events.insert(make_delivery(make_gmi(1, 2, msg, 0, 0)));
      out.push_back(x);
    }
  }
  return out;
}

bool tuple_has_fault(const PerformedTuple& x) {
  return std::any_of(x.events.begin(), x.events.end(), is_fault_event);
}

}  // namespace

SafetyProperty safety_time_bounded(const UpperBoundStructure& bounds,
                                   const ModelParams& params) {
  auto round_ok = [bounds](Timestamp t, const PerformedTuple& x) {
    for (const auto& hap : x.events) {
      const auto* recv = std::get_if<CorrectEvent>(&hap);
      if (!recv) continue;
      auto d = bounds.delta(recv->gmi.sender, recv->gmi.recipient);
      if (d && recv->gmi.send_time + *d < t) return false;
    }
    return true;
  };
  return make_prefix_safety(
      "time_bounded_delivery", round_ok,
      [params](const GlobalState& h) { return default_tuple_menu(params, h); });
}

SafetyProperty safety_no_faults(const ModelParams& params) {
  auto round_ok = [](Timestamp, const PerformedTuple& x) {
    return !tuple_has_fault(x);
  };
  return make_prefix_safety(
      "no_faults", round_ok,
      [params](const GlobalState& h) { return default_tuple_menu(params, h); });
}

SafetyProperty safety_requires_go1(const ModelParams& params) {
  auto round_ok = [](Timestamp, const PerformedTuple& x) {
    return x.events.count(make_system(1, SystemEventKind::Go)) > 0;
  };
  return make_prefix_safety(
      "every_round_activates_agent1", round_ok,
      [params](const GlobalState& h) { return default_tuple_menu(params, h); });
}

SafetyCheckResult check_downward_closed(const SafetyProperty& s,
                                        const std::vector<GlobalState>& states,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto& h : states) {
    for (const auto& x : s.generate(h)) {
      if (!s.admits(h, x)) continue;
      std::vector<PerformedTuple> shrunk;
      for (const auto& hap : x.events) {
        PerformedTuple y = x;
        y.events.erase(hap);
        shrunk.push_back(std::move(y));
      }
      for (size_t i = 0; i < x.actions.size(); ++i) {
        if (x.actions[i].empty()) continue;
        PerformedTuple y = x;
        y.actions[i].clear();
        shrunk.push_back(std::move(y));
      }
      {
        PerformedTuple y = x;
        HapSet kept;
        std::uniform_int_distribution<int> coin(0, 1);
        for (const auto& hap : y.events) {
          if (coin(rng)) kept.insert(hap);
        }
        y.events = kept;
        shrunk.push_back(std::move(y));
      }
      for (const auto& y : shrunk) {
        if (!s.admits(h, y)) {
          return {false, s.name + ": admitted tuple has a rejected subset"};
        }
      }
    }
  }
  return {true, s.name + ": closed under componentwise subsets on samples"};
}

SafetyCheckResult check_safety_attributes(
    const SafetyProperty& s, const std::vector<GlobalState>& initials,
    int depth) {
  auto nonempty = [&](const GlobalState& h) {
    auto menu = s.generate(h);
    return std::any_of(menu.begin(), menu.end(), [&](const PerformedTuple& x) {
      return s.admits(h, x);
    });
  };
  bool attr1 = std::any_of(initials.begin(), initials.end(), nonempty);
  if (!attr1) {
    return {false, s.name + ": no safe initial state (attribute 1)"};
  }
  struct Node {
    GlobalState state;
    bool safely_reached;
  };
  std::vector<Node> frontier;
  for (const auto& h : initials) frontier.push_back({h, true});
  for (int d = 0; d < depth; ++d) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (const auto& x : s.generate(node.state)) {
        bool admitted = s.admits(node.state, x);
        GlobalState child = update_global(node.state, x);
        bool safely_reachable = node.safely_reached && admitted;
        bool child_nonempty = nonempty(child);
        if (safely_reachable != child_nonempty) {
          return {false, s.name + ": attribute 2 fails at depth " +
                             std::to_string(d + 1) + " (safely reachable " +
                             (safely_reachable ? "yes" : "no") +
                             ", extendable " +
                             (child_nonempty ? "yes" : "no") + ")"};
        }
        next.push_back({std::move(child), safely_reachable});
      }
    }
    frontier = std::move(next);
  }
  return {true, s.name + ": attributes 1-2 hold to depth " +
                    std::to_string(depth)};
}

SafetyCheckResult check_once_empty_stays_empty(const SafetyProperty& s,
                                               const RunSystem& system) {
  for (const auto& run : system.runs) {
    bool seen_empty = false;
    for (const auto& state : run.states) {
      auto menu = s.generate(state);
      bool nonempty =
          std::any_of(menu.begin(), menu.end(), [&](const PerformedTuple& x) {
            return s.admits(state, x);
          });
      if (seen_empty && nonempty) {
        return {false, s.name + ": admitted set became non-empty again"};
      }
      if (!nonempty) seen_empty = true;
    }
  }
  return {true, s.name + ": empty admitted sets stay empty on all runs"};
}

// ---- built-in extensions ---------------------------------------------------

namespace {

std::function<bool(const EnvProtocol&, const JointProtocol&,
                   const ProbeContext&)>
any_pair() {
  return [](const EnvProtocol&, const JointProtocol&, const ProbeContext&) {
    return true;
  };
}

std::function<bool(const std::vector<GlobalState>&)> any_nonempty_initials() {
  return [](const std::vector<GlobalState>& states) { return !states.empty(); };
}

}  // namespace

Extension ext_byzantine(const ModelParams&) {
  Extension e;
  e.name = "B";
  e.impl_class = ImplClass::EvFJP_AFB;
  e.protocol_pairs = any_pair();
  e.initial_families = any_nonempty_initials();
  e.event_filter = causal_event();
  e.action_filter = standard_action();
  e.admissibility = AdmissibilityCond::all();
  e.run_laws = {"causal_support"};
  return e;
}

Extension ext_synchronous(const ModelParams&) {
  Extension e;
  e.name = "S";
  e.impl_class = ImplClass::EvFJP_AFB;
  e.restricts_joint = true;
  e.protocol_pairs = [](const EnvProtocol&, const JointProtocol& joint,
                        const ProbeContext& probe) {
    return validate_synchronous(joint, probe.histories, probe.params);
  };
  e.initial_families = any_nonempty_initials();
  e.event_filter = sync_event();
  e.action_filter = standard_action();
  e.admissibility = AdmissibilityCond::all();
  e.run_laws = {"go_iff_action", "protocol_only_in_synced_rounds"};
  return e;
}

Extension ext_reliable(const std::set<std::pair<AgentId, AgentId>>& channels,
                       const ModelParams&) {
  Extension e;
  e.name = "RC";
  e.impl_class = ImplClass::Adm;
  e.protocol_pairs = any_pair();
  e.initial_families = any_nonempty_initials();
  e.event_filter = neutral_event();
  e.action_filter = neutral_action();
  e.admissibility = AdmissibilityCond::edel(channels);
  return e;
}

Extension ext_time_bounded(const UpperBoundStructure& bounds,
                           const ModelParams& params) {
  Extension e;
  e.name = "TC";
  e.impl_class = ImplClass::EnvJP_DC;
  e.restricts_env = true;
  e.protocol_pairs = [bounds](const EnvProtocol& env, const JointProtocol&,
                              const ProbeContext& probe) {
    return validate_time_bounded(env, bounds, probe.params.horizon);
  };
  e.initial_families = any_nonempty_initials();
  e.event_filter = neutral_event();
  e.action_filter = neutral_action();
  e.admissibility = AdmissibilityCond::all();
  e.delivery_bounds = bounds;
  e.safeties = {safety_time_bounded(bounds, params)};
  e.run_laws = {"recv_within_bounds"};
  return e;
}

Extension ext_sync_comm(const std::set<std::pair<AgentId, AgentId>>& channels,
                        const ModelParams& params) {
  Extension e = ext_time_bounded(UpperBoundStructure::synchronous(channels),
                                 params);
  e.name = "SC";
  return e;
}

Extension ext_multicast(const MulticastProblem& ch, const ModelParams&) {
  Extension e;
  e.name = "MC";
  e.impl_class = ImplClass::JP_AFB;
  e.restricts_joint = true;
  e.protocol_pairs = [ch](const EnvProtocol&, const JointProtocol& joint,
                          const ProbeContext& probe) {
    return validate_multicast(joint, ch, probe.histories, probe.params);
  };
  e.initial_families = any_nonempty_initials();
  e.event_filter = neutral_event();
  e.action_filter = standard_action();
  e.admissibility = AdmissibilityCond::all();
  e.multicast = ch;
  e.run_laws = {"multicast_pattern"};
  return e;
}

Extension ext_broadcast(const ModelParams& params) {
  Extension e = ext_multicast(MulticastProblem::broadcast(params.agents),
                              params);
  e.name = "BC";
  return e;
}

Extension ext_lockstep(const ModelParams& params) {
  auto channels = all_channels(params.agents);
  auto bounds = UpperBoundStructure::synchronous(channels);
  Extension e;
  e.name = "LSS";
  e.impl_class = ImplClass::EvFEnvJP_AFB;
  e.restricts_joint = true;
  e.restricts_env = true;
  auto mc = MulticastProblem::broadcast(params.agents);
  e.protocol_pairs = [bounds, mc](const EnvProtocol& env,
                                  const JointProtocol& joint,
                                  const ProbeContext& probe) {
    return validate_time_bounded(env, bounds, probe.params.horizon) &&
           validate_synchronous(joint, probe.histories, probe.params) &&
           validate_multicast(joint, mc, probe.histories, probe.params);
  };
  e.initial_families = any_nonempty_initials();
  e.event_filter = compose_event(causal_event(), sync_event());
  e.action_filter = standard_action();
  e.admissibility = AdmissibilityCond::edel(channels, bounds);
  e.delivery_bounds = bounds;
  e.multicast = mc;
  e.safeties = {safety_time_bounded(bounds, params)};
  e.run_laws = {"causal_support", "go_iff_action",
                "protocol_only_in_synced_rounds", "recv_within_bounds",
                "same_round_broadcast"};
  return e;
}

namespace {

UpperBoundStructure merge_bounds(const UpperBoundStructure& a,
                                 const UpperBoundStructure& b) {
  auto tighter = [](std::optional<int> x, std::optional<int> y) {
    if (!x) return y;
    if (!y) return x;
    return std::optional<int>(std::min(*x, *y));
  };
  UpperBoundStructure out;
  out.fallback = tighter(a.fallback, b.fallback);
  for (const auto& [ch, d] : a.per_channel) {
    out.per_channel[ch] = tighter(d, b.delta(ch.first, ch.second));
  }
  for (const auto& [ch, d] : b.per_channel) {
    if (!out.per_channel.count(ch)) {
      out.per_channel[ch] = tighter(d, a.delta(ch.first, ch.second));
    }
  }
  return out;
}

}  // namespace

Extension compose_extensions(const Extension& a, const Extension& b) {
  Extension e;
  e.name = "compose(" + a.name + "," + b.name + ")";
  e.impl_class = std::nullopt;
  e.restricts_joint = a.restricts_joint || b.restricts_joint;
  e.restricts_env = a.restricts_env || b.restricts_env;
  auto pa = a.protocol_pairs;
  auto pb = b.protocol_pairs;
  e.protocol_pairs = [pa, pb](const EnvProtocol& env, const JointProtocol& j,
                              const ProbeContext& probe) {
    return pa(env, j, probe) && pb(env, j, probe);
  };
  auto ia = a.initial_families;
  auto ib = b.initial_families;
  e.initial_families = [ia, ib](const std::vector<GlobalState>& states) {
    return ia(states) && ib(states);
  };
  e.event_filter = compose_event(a.event_filter, b.event_filter);
  e.action_filter = compose_action(a.action_filter, b.action_filter);
  // admissibility conditions intersect
  if (a.admissibility.kind == AdmissibilityCond::Kind::All) {
    e.admissibility = b.admissibility;
  } else if (b.admissibility.kind == AdmissibilityCond::Kind::All) {
    e.admissibility = a.admissibility;
  } else {
    std::set<std::pair<AgentId, AgentId>> channels = a.admissibility.channels;
    channels.insert(b.admissibility.channels.begin(),
                    b.admissibility.channels.end());
    e.admissibility = AdmissibilityCond::edel(channels);
  }
  if (a.delivery_bounds && b.delivery_bounds) {
    e.delivery_bounds = merge_bounds(*a.delivery_bounds, *b.delivery_bounds);
  } else {
    e.delivery_bounds = a.delivery_bounds ? a.delivery_bounds
                                          : b.delivery_bounds;
  }
  if (e.admissibility.kind == AdmissibilityCond::Kind::EDel) {
    e.admissibility.bounds = e.delivery_bounds;
  }
  e.multicast = a.multicast ? a.multicast : b.multicast;
  e.safeties = a.safeties;
  e.safeties.insert(e.safeties.end(), b.safeties.begin(), b.safeties.end());
  e.run_laws = a.run_laws;
  for (const auto& law : b.run_laws) {
    if (std::find(e.run_laws.begin(), e.run_laws.end(), law) ==
        e.run_laws.end()) {
      e.run_laws.push_back(law);
    }
  }
  return e;
}

TransitionTemplate template_of(const Extension& e) {
  return TransitionTemplate{e.event_filter, e.action_filter};
}

std::vector<std::string> lint_impl_class(const Extension& e,
                                         ImplClass declared,
                                         const ModelParams& params,
                                         std::uint64_t seed) {
  std::vector<std::string> problems;
  ClassTraits traits = class_traits(declared);
  if (e.restricts_joint && !traits.joint_protocols) {
    problems.push_back("restricts joint protocols but class " +
                       to_string(declared) + " does not");
  }
  if (e.restricts_env && !traits.env_protocols) {
    problems.push_back("restricts environment protocols but class " +
                       to_string(declared) + " does not");
  }
  bool neutral_ev = e.event_filter.name == "neutral";
  if (!neutral_ev && !traits.event_filter) {
    problems.push_back("uses event filter '" + e.event_filter.name +
                       "' but class " + to_string(declared) +
                       " allows only the neutral one");
  }
  const std::string& an = e.action_filter.name;
  bool neutral_ac = an == "neutral";
  bool standard_ac = an == "standard_action";
  if (standard_ac && !traits.standard_action_filters &&
      !traits.arbitrary_action_filters) {
    problems.push_back("uses the standard action filter but class " +
                       to_string(declared) + " does not");
  }
  if (!neutral_ac && !standard_ac && !traits.arbitrary_action_filters) {
    problems.push_back("uses action filter '" + an + "' but class " +
                       to_string(declared) +
                       " does not allow arbitrary action filters");
  }
  if (traits.downward_closed) {
    GlobalState init = make_initial_state(params.agents);
    for (const auto& s : e.safeties) {
      auto res = check_downward_closed(s, {init}, seed);
      if (!res.pass) {
        problems.push_back("declared downward closed but " + res.detail);
      }
    }
  }
  if (traits.monotonic_filters) {
    auto samples = make_samples(params, seed, 64);
    std::mt19937_64 rng(seed + 1);
    if (!check_monotone(e.event_filter, samples, rng) ||
        !check_monotone(e.action_filter, samples, rng)) {
      problems.push_back("declared monotonic but a filter is not monotone "
                         "over the sampled coherent domain");
    }
  }
  return problems;
}

CompatReport check_compatible(const std::vector<Extension>& exts,
                              const ModelParams& params, Timestamp horizon) {
  if (exts.empty()) return {false, "no extensions given", 0};
  Extension composite = exts.front();
  for (size_t i = 1; i < exts.size(); ++i) {
    composite = compose_extensions(composite, exts[i]);
  }

  // witness protocol pairs, tried in order
  std::vector<std::pair<EnvProtocol, JointProtocol>> candidates;
  {
    JointProtocol ticks(static_cast<size_t>(params.agents),
                        silent_tick_protocol());
    candidates.emplace_back(silent_env(params), ticks);
    JointProtocol casts(static_cast<size_t>(params.agents),
                        broadcast_all_protocol());
    candidates.emplace_back(silent_env(params), casts);
  }

  for (auto& [env, joint] : candidates) {
    AgentContext ctx;
    ctx.env = env;
    ctx.initial_states = {make_initial_state(params.agents)};
    ctx.templ = template_of(composite);
    ctx.admissibility = composite.admissibility;
    ctx.joint = joint;
    ctx.params = params;

    ProbeContext probe{params, reachable_local_histories(ctx, horizon, 10000)};
    bool accepted = composite.protocol_pairs(env, joint, probe);
    for (const auto& e : exts) {
      accepted = accepted && e.protocol_pairs(env, joint, probe);
      accepted = accepted && e.initial_families(ctx.initial_states);
    }
    if (!accepted) continue;

    RunSystem system = enumerate_runs(ctx, horizon, Adversary::exhaust(), 10000);
    int good = 0;
    for (auto v : system.verdicts) {
      if (v != Verdict::Violated) ++good;
    }
    if (good > 0) {
      return {true,
              "witness context found (protocol pair accepted by every "
              "extension, " +
                  std::to_string(good) + " admissible run(s) to horizon " +
                  std::to_string(horizon) + ")",
              good};
    }
  }
  return {false, "no witness agent-context produced an admissible run", 0};
}

}  // namespace byzrun
