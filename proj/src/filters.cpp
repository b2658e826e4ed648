#include "byzrun/filters.hpp"

#include <algorithm>
#include <stdexcept>

namespace byzrun {

std::vector<LocalAction> ModelParams::action_alphabet(AgentId) const {
  std::vector<LocalAction> out;
  out.push_back(TickAction{});
  for (AgentId j = 1; j <= agents; ++j) {
    for (const auto& msg : messages) {
      for (int k = 0; k < max_copies; ++k) {
        out.push_back(SendAction{j, msg, k});
      }
    }
  }
  return out;
}

std::vector<LocalHap> ModelParams::local_hap_alphabet(AgentId i) const {
  std::vector<LocalHap> out;
  for (const auto& a : action_alphabet(i)) out.push_back(LocalHap{a});
  for (AgentId j = 1; j <= agents; ++j) {
    for (const auto& msg : messages) {
      out.push_back(LocalHap{RecvEvent{j, msg}});
    }
  }
  return out;
}

EventFilter neutral_event() {
  return EventFilter{"neutral",
                     [](const GlobalState&, const HapSet& x_env,
                        const std::vector<HapSet>&) { return x_env; }};
}

ActionFilter neutral_action() {
  return ActionFilter{"neutral",
                      [](AgentId i, const std::vector<HapSet>& x_agents,
                         const HapSet&) { return x_agents.at(i - 1); }};
}

ActionFilter standard_action() {
  return ActionFilter{
      "standard_action",
      [](AgentId i, const std::vector<HapSet>& x_agents, const HapSet& x_env) {
        if (x_env.count(make_system(i, SystemEventKind::Go))) {
          return x_agents.at(i - 1);
        }
        return HapSet{};
      }};
}

namespace {

// A send matching `gmi` performed inside `hap` (correctly or as the
// performed half of a byzantine action).
bool performs_send(const GlobalHap& hap, const Gmi& gmi) {
  auto performed = performed_send_gmi(hap);
  return performed && *performed == gmi;
}

bool history_supports(const EnvHistory& env, const Gmi& gmi) {
  for (const auto& layer : env.layers) {
    for (const auto& hap : layer) {
      if (performs_send(hap, gmi)) return true;
    }
  }
  return false;
}

bool fake_send_in(const HapSet& set, const Gmi& gmi) {
  for (const auto& hap : set) {
    if (std::holds_alternative<ByzAction>(hap) && performs_send(hap, gmi)) {
      return true;
    }
  }
  return false;
}

}  // namespace

EventFilter causal_event() {
  return EventFilter{
      "causal",
      [](const GlobalState& h, const HapSet& x_env,
         const std::vector<HapSet>& x_agents) {
        HapSet out;
        for (const auto& hap : x_env) {
          const auto* recv = std::get_if<CorrectEvent>(&hap);
          if (!recv) {
            out.insert(hap);
            continue;
          }
          const Gmi& gmi = recv->gmi;
          AgentId sender = gmi.sender;
          bool no_send_in_history = !history_supports(h.env, gmi);
          bool no_fake_in_history = true;
          for (const auto& layer : h.env.layers) {
            if (fake_send_in(layer, gmi)) no_fake_in_history = false;
          }
          GlobalHap send_act{to_global(
              sender, gmi.send_time,
              SendAction{gmi.recipient, gmi.msg, gmi.copy})};
          bool sender_not_sending =
              sender < 1 || static_cast<size_t>(sender) > x_agents.size() ||
              !x_agents[static_cast<size_t>(sender - 1)].count(send_act) ||
              !x_env.count(make_system(sender, SystemEventKind::Go));
          bool no_fake_now = !fake_send_in(x_env, gmi);
          if (no_send_in_history && no_fake_in_history && sender_not_sending &&
              no_fake_now) {
            continue;  // causally impossible, drop it
          }
          out.insert(hap);
        }
        return out;
      }};
}

EventFilter sync_event() {
  return EventFilter{
      "sync", [](const GlobalState& h, const HapSet& x_env,
                 const std::vector<HapSet>&) {
        for (AgentId i = 1; i <= h.agent_count(); ++i) {
          if (system_events_of(x_env, i).empty()) {
            HapSet out;
            for (const auto& hap : x_env) {
              const auto* s = std::get_if<SystemEvent>(&hap);
              if (s && s->kind == SystemEventKind::Go) continue;
              out.insert(hap);
            }
            return out;
          }
        }
        return x_env;
      }};
}

EventFilter compose_event(const EventFilter& outer, const EventFilter& inner) {
  auto out_fn = outer.fn;
  auto in_fn = inner.fn;
  return EventFilter{
      "compose(" + outer.name + "," + inner.name + ")",
      [out_fn, in_fn](const GlobalState& h, const HapSet& x_env,
                      const std::vector<HapSet>& x_agents) {
        return out_fn(h, in_fn(h, x_env, x_agents), x_agents);
      }};
}

ActionFilter compose_action(const ActionFilter& outer,
                            const ActionFilter& inner) {
  auto out_fn = outer.fn;
  auto in_fn = inner.fn;
  return ActionFilter{
      "compose(" + outer.name + "," + inner.name + ")",
      [out_fn, in_fn](AgentId i, const std::vector<HapSet>& x_agents,
                      const HapSet& x_env) {
        std::vector<HapSet> patched = x_agents;
        patched.at(static_cast<size_t>(i - 1)) = in_fn(i, x_agents, x_env);
        return out_fn(i, patched, x_env);
      }};
}

EventFilter event_filter_by_name(const std::string& name) {
  if (name == "neutral") return neutral_event();
  if (name == "causal") return causal_event();
  if (name == "sync") return sync_event();
  auto open = name.find("compose(");
  if (open == 0 && name.back() == ')') {
    std::string inner = name.substr(8, name.size() - 9);
    int depth = 0;
    for (size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] == '(') ++depth;
      if (inner[i] == ')') --depth;
      if (inner[i] == ',' && depth == 0) {
        return compose_event(event_filter_by_name(inner.substr(0, i)),
                             event_filter_by_name(inner.substr(i + 1)));
      }
    }
  }
  throw std::invalid_argument("unknown event filter '" + name + "'");
}

ActionFilter action_filter_by_name(const std::string& name) {
  if (name == "neutral") return neutral_action();
  if (name == "standard_action" || name == "standard") return standard_action();
  throw std::invalid_argument("unknown action filter '" + name + "'");
}

// ---- sampling -----------------------------------------------------------

FilterSampler::FilterSampler(ModelParams params, std::uint64_t seed)
    : params_(std::move(params)), rng_(seed) {}

std::vector<GlobalHap> FilterSampler::event_alphabet(Timestamp t) const {
  std::vector<GlobalHap> out;
  for (AgentId i = 1; i <= params_.agents; ++i) {
    out.push_back(make_system(i, SystemEventKind::Go));
    out.push_back(make_system(i, SystemEventKind::Sleep));
    out.push_back(make_system(i, SystemEventKind::Hibernate));
    out.push_back(make_fail(i));
    for (AgentId j = 1; j <= params_.agents; ++j) {
      for (const auto& msg : params_.messages) {
        for (int k = 0; k < params_.max_copies; ++k) {
          for (Timestamp ts = 0; ts <= t; ++ts) {
            Gmi gmi = make_gmi(j, i, msg, k, ts);
            out.push_back(make_delivery(gmi));
            out.push_back(make_fake_delivery(gmi));
          }
          // byzantine action faults: imagined and performed sends
          CorrectAction send = to_global(i, t, SendAction{j, msg, k});
          out.push_back(ByzAction{i, std::nullopt, send});
          out.push_back(ByzAction{i, send, std::nullopt});
        }
      }
    }
    out.push_back(ByzAction{i, std::nullopt, to_global(i, t, TickAction{})});
  }
  return out;
}

HapSet FilterSampler::coherent_events(Timestamp t) {
  auto alphabet = event_alphabet(t);
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> size_dist(0, 6);
  HapSet out;
  int want = size_dist(rng_);
  for (int attempts = 0; attempts < 40 && static_cast<int>(out.size()) < want;
       ++attempts) {
    const GlobalHap& cand = alphabet[pick(rng_)];
    HapSet trial = out;
    trial.insert(cand);
    if (is_t_coherent(trial, t)) out = std::move(trial);
  }
  return out;
}

FilterSample FilterSampler::next() {
  FilterSample s;
  std::uniform_int_distribution<Timestamp> tdist(0, params_.horizon);
  s.t = tdist(rng_);
  s.state = make_initial_state(params_.agents);
  for (Timestamp m = 0; m < s.t; ++m) {
    PerformedTuple x;
    x.events = coherent_events(m);
    x.actions.resize(static_cast<size_t>(params_.agents));
    s.state = update_global(s.state, x);
  }
  s.x_env = coherent_events(s.t);
  s.x_agents.resize(static_cast<size_t>(params_.agents));
  std::uniform_int_distribution<int> act_count(0, 2);
  for (AgentId i = 1; i <= params_.agents; ++i) {
    auto actions = params_.action_alphabet(i);
    std::uniform_int_distribution<size_t> pick(0, actions.size() - 1);
    int n = act_count(rng_);
    for (int c = 0; c < n; ++c) {
      s.x_agents[static_cast<size_t>(i - 1)].insert(
          GlobalHap{to_global(i, s.t, actions[pick(rng_)])});
    }
  }
  return s;
}

std::vector<FilterSample> make_samples(const ModelParams& params,
                                       std::uint64_t seed, int count) {
  FilterSampler sampler(params, seed);
  std::vector<FilterSample> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

namespace {

bool subset(const HapSet& a, const HapSet& b) {
  return std::all_of(a.begin(), a.end(),
                     [&](const GlobalHap& h) { return b.count(h) > 0; });
}

HapSet random_subset(const HapSet& s, std::mt19937_64& rng) {
  HapSet out;
  std::uniform_int_distribution<int> coin(0, 1);
  for (const auto& h : s) {
    if (coin(rng)) out.insert(h);
  }
  return out;
}

}  // namespace

bool check_basic_filter_property(const EventFilter& f,
                                 std::vector<FilterSample> samples) {
  for (const auto& s : samples) {
    if (!subset(f(s.state, s.x_env, s.x_agents), s.x_env)) return false;
  }
  return true;
}

bool check_basic_filter_property(const ActionFilter& f,
                                 std::vector<FilterSample> samples) {
  for (const auto& s : samples) {
    for (AgentId i = 1; i <= s.state.agent_count(); ++i) {
      if (!subset(f(i, s.x_agents, s.x_env),
                  s.x_agents[static_cast<size_t>(i - 1)])) {
        return false;
      }
    }
  }
  return true;
}

bool check_monotone(const EventFilter& f, std::vector<FilterSample> samples,
                    std::mt19937_64& rng) {
  for (const auto& s : samples) {
    HapSet smaller = random_subset(s.x_env, rng);
    if (!subset(f(s.state, smaller, s.x_agents),
                f(s.state, s.x_env, s.x_agents))) {
      return false;
    }
  }
  return true;
}

bool check_monotone(const ActionFilter& f, std::vector<FilterSample> samples,
                    std::mt19937_64& rng) {
  for (const auto& s : samples) {
    for (AgentId i = 1; i <= s.state.agent_count(); ++i) {
      auto smaller_agents = s.x_agents;
      smaller_agents[static_cast<size_t>(i - 1)] =
          random_subset(s.x_agents[static_cast<size_t>(i - 1)], rng);
      if (!subset(f(i, smaller_agents, s.x_env), f(i, s.x_agents, s.x_env))) {
        return false;
      }
    }
  }
  return true;
}

bool check_idempotent(const ActionFilter& f,
                      std::vector<FilterSample> samples) {
  for (const auto& s : samples) {
    for (AgentId i = 1; i <= s.state.agent_count(); ++i) {
      HapSet once = f(i, s.x_agents, s.x_env);
      auto patched = s.x_agents;
      patched[static_cast<size_t>(i - 1)] = once;
      if (f(i, patched, s.x_env) != once) return false;
    }
  }
  return true;
}

}  // namespace byzrun
