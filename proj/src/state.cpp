#include "byzrun/state.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace byzrun {

bool LocalHistory::records(const LocalHap& hap) const {
  for (const auto& layer : layers) {
    if (layer.count(hap)) return true;
  }
  return false;
}

int LocalHistory::count_ticks() const {
  int n = 0;
  for (const auto& layer : layers) {
    for (const auto& hap : layer) {
      if (const auto* a = std::get_if<LocalAction>(&hap)) {
        if (is_tick(*a)) ++n;
      }
    }
  }
  return n;
}

const HapSet& EnvHistory::round_layer(Timestamp t) const {
  int len = length();
  if (t < 0 || t >= len) {
    throw std::out_of_range("round_layer: round " + std::to_string(t) +
                            " of a history of length " + std::to_string(len));
  }
  return layers[static_cast<size_t>(len - 1 - t)];
}

bool EnvHistory::happens(const GlobalHap& hap) const {
  for (const auto& layer : layers) {
    if (layer.count(hap)) return true;
  }
  return false;
}

bool EnvHistory::happens_before(const GlobalHap& hap, Timestamp t) const {
  for (Timestamp m = 0; m < std::min(t, static_cast<Timestamp>(length())); ++m) {
    if (round_layer(m).count(hap)) return true;
  }
  return false;
}

GlobalState make_initial_state(int agents, const std::string& token) {
  GlobalState s;
  s.locals.resize(static_cast<size_t>(agents));
  for (auto& l : s.locals) l.initial = token;
  return s;
}

LocalHistory update_agent(const LocalHistory& h, AgentId i, const HapSet& x_i,
                          const HapSet& x_env) {
  HapSet x_env_i = events_of_agent(x_env, i);
  HapSet sys = system_events_of(x_env_i, i);

  bool woken = sys.size() == 1 &&
               std::get<SystemEvent>(*sys.begin()).kind != SystemEventKind::Hibernate;
  LocalHapSet perceived = localize(x_env_i);
  if (perceived.empty() && !woken) return h;

  HapSet merged = x_env_i;
  merged.insert(x_i.begin(), x_i.end());
  LocalHistory out = h;
  out.layers.insert(out.layers.begin(), localize(merged));
  return out;
}

EnvHistory update_env(const EnvHistory& h, const PerformedTuple& x) {
  HapSet layer = x.events;
  for (const auto& acts : x.actions) layer.insert(acts.begin(), acts.end());
  EnvHistory out = h;
  out.layers.insert(out.layers.begin(), std::move(layer));
  return out;
}

GlobalState update_global(const GlobalState& h, const PerformedTuple& x) {
  GlobalState out;
  out.env = update_env(h.env, x);
  out.locals.reserve(h.locals.size());
  for (AgentId i = 1; i <= h.agent_count(); ++i) {
    const HapSet empty;
    const HapSet& x_i =
        static_cast<size_t>(i - 1) < x.actions.size() ? x.actions[i - 1] : empty;
    out.locals.push_back(update_agent(h.local(i), i, x_i, x.events));
  }
  return out;
}

std::vector<std::string> coherence_violations(const HapSet& events,
                                              Timestamp t) {
  std::vector<std::string> out;
  std::map<AgentId, int> sys_count;
  for (const auto& hap : events) {
    if (is_correct_action(hap)) {
      out.push_back("actions may not appear among round events: " +
                    to_string(hap));
      continue;
    }
    if (const auto* s = std::get_if<SystemEvent>(&hap)) {
      if (++sys_count[s->agent] == 2) {
        out.push_back("more than one system event for agent " +
                      std::to_string(s->agent));
      }
      continue;
    }
    if (const auto* b = std::get_if<ByzAction>(&hap)) {
      // condition 1: a performed fake send must carry the current round time
      if (b->performed && b->performed->gmi &&
          b->performed->gmi->send_time != t) {
        out.push_back("faked send " + to_string(hap) +
                      " is not stamped with round " + std::to_string(t));
      }
      continue;
    }
    if (const auto* e = std::get_if<CorrectEvent>(&hap)) {
      // condition 3: the identical faked copy may not coexist
      if (events.count(ByzEvent{e->agent, *e})) {
        out.push_back("both correct and faked copy of " + to_string(hap));
      }
      // condition 4: no faked receive of the same (sender, msg)
      for (const auto& other : events) {
        if (const auto* f = std::get_if<ByzEvent>(&other)) {
          if (f->agent == e->agent && f->faked.event == e->event &&
              f->faked.gmi != e->gmi) {
            out.push_back("correct receive " + to_string(hap) +
                          " next to faked receive " + to_string(other));
          }
        }
      }
      continue;
    }
    // condition 5 is the mirror image of 4 and is caught above; nothing
    // more to check for a lone ByzEvent.
  }
  return out;
}

bool is_t_coherent(const HapSet& events, Timestamp t) {
  return coherence_violations(events, t).empty();
}

HapSet events_of_agent(const HapSet& haps, AgentId i) {
  HapSet out;
  for (const auto& h : haps) {
    if (is_event(h) && agent_of(h) == i) out.insert(h);
  }
  return out;
}

HapSet system_events_of(const HapSet& haps, AgentId i) {
  HapSet out;
  for (const auto& h : haps) {
    if (is_system_event(h) && agent_of(h) == i) out.insert(h);
  }
  return out;
}

HapSet byz_events_of(const HapSet& haps, AgentId i) {
  HapSet out;
  for (const auto& h : haps) {
    if (is_byz_event(h) && agent_of(h) == i) out.insert(h);
  }
  return out;
}

HapSet correct_events_of(const HapSet& haps, AgentId i) {
  HapSet out;
  for (const auto& h : haps) {
    if (is_correct_event(h) && agent_of(h) == i) out.insert(h);
  }
  return out;
}

bool layer_is_synced(const HapSet& layer, int agents) {
  for (AgentId i = 1; i <= agents; ++i) {
    if (system_events_of(layer, i).empty()) return false;
  }
  return true;
}

int synced_rounds(const GlobalState& h) {
  int count = 0;
  for (const auto& layer : h.env.layers) {
    if (layer_is_synced(layer, h.agent_count())) ++count;
  }
  return count;
}

std::set<std::pair<AgentId, Timestamp>> byzantine_nodes(const GlobalState& h,
                                                        Timestamp t) {
  std::set<std::pair<AgentId, Timestamp>> out;
  std::vector<Timestamp> first_fault(static_cast<size_t>(h.agent_count()) + 1,
                                     -1);
  Timestamp limit = std::min(t, static_cast<Timestamp>(h.env.length()));
  for (Timestamp m = 0; m < limit; ++m) {
    for (const auto& hap : h.env.round_layer(m)) {
      if (is_fault_event(hap)) {
        AgentId i = agent_of(hap);
        if (first_fault[static_cast<size_t>(i)] < 0) {
          first_fault[static_cast<size_t>(i)] = m + 1;
        }
      }
    }
  }
  for (AgentId i = 1; i <= h.agent_count(); ++i) {
    Timestamp from = first_fault[static_cast<size_t>(i)];
    if (from < 0) continue;
    for (Timestamp m = from; m <= t; ++m) out.insert({i, m});
  }
  return out;
}

bool agent_faulty_at(const GlobalState& h, AgentId i, Timestamp t) {
  Timestamp limit = std::min(t, static_cast<Timestamp>(h.env.length()));
  for (Timestamp m = 0; m < limit; ++m) {
    for (const auto& hap : h.env.round_layer(m)) {
      if (is_fault_event(hap) && agent_of(hap) == i) return true;
    }
  }
  return false;
}

}  // namespace byzrun
