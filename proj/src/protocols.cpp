#include "byzrun/protocols.hpp"

#include <algorithm>
#include <stdexcept>

namespace byzrun {

std::vector<std::vector<LocalAction>> AgentProtocol::choices(
    const LocalHistory& h, const ModelParams& params) const {
  switch (kind) {
    case Kind::SilentTick:
      return {{TickAction{}}};
    case Kind::BroadcastAll: {
      std::vector<std::vector<LocalAction>> out;
      for (const auto& msg : params.messages) {
        std::vector<LocalAction> d{TickAction{}};
        for (AgentId j = 1; j <= params.agents; ++j) {
          d.push_back(SendAction{j, msg, 0});
        }
        out.push_back(std::move(d));
      }
      if (out.empty()) out.push_back({TickAction{}});
      return out;
    }
    case Kind::Table:
      for (const auto& rule : rules) {
        if (rule.when_length < 0 || rule.when_length == h.length()) {
          if (rule.choices.empty()) {
            throw std::runtime_error("protocol rule with empty menu");
          }
          return rule.choices;
        }
      }
      throw std::runtime_error(
          "table protocol has no rule for a history of length " +
          std::to_string(h.length()));
  }
  throw std::logic_error("unreachable");
}

AgentProtocol silent_tick_protocol() {
  return AgentProtocol{AgentProtocol::Kind::SilentTick, {}};
}

AgentProtocol broadcast_all_protocol() {
  return AgentProtocol{AgentProtocol::Kind::BroadcastAll, {}};
}

// ---- environment --------------------------------------------------------

namespace {

std::string substitute_time(const std::string& entry, Timestamp t) {
  std::string out;
  for (size_t i = 0; i < entry.size(); ++i) {
    if (entry[i] == '$' && i + 1 < entry.size() && entry[i + 1] == 't') {
      out += std::to_string(t);
      ++i;
    } else {
      out += entry[i];
    }
  }
  return out;
}

void expand_entry(const std::string& raw, Timestamp t,
                  const ModelParams& params, HapSet& into) {
  if (raw.empty()) throw std::invalid_argument("empty env menu entry");
  if (raw[0] != '@') {
    into.insert(parse_global_hap(substitute_time(raw, t)));
    return;
  }
  if (raw == "@go_all") {
    for (AgentId i = 1; i <= params.agents; ++i) {
      into.insert(make_system(i, SystemEventKind::Go));
    }
    return;
  }
  if (raw.rfind("@go_all_except(", 0) == 0 && raw.back() == ')') {
    AgentId skip = std::stoi(raw.substr(15, raw.size() - 16));
    for (AgentId i = 1; i <= params.agents; ++i) {
      if (i != skip) into.insert(make_system(i, SystemEventKind::Go));
    }
    return;
  }
  if (raw == "@deliver_all_same_round") {
    for (AgentId from = 1; from <= params.agents; ++from) {
      for (AgentId to = 1; to <= params.agents; ++to) {
        for (const auto& msg : params.messages) {
          for (int k = 0; k < params.max_copies; ++k) {
            into.insert(make_delivery(make_gmi(from, to, msg, k, t)));
          }
        }
      }
    }
    return;
  }
  throw std::invalid_argument("unknown env menu macro '" + raw + "'");
}

}  // namespace

std::vector<HapSet> EnvProtocol::choices(Timestamp t) const {
  for (const auto& rule : rules) {
    if (rule.when_time >= 0 && rule.when_time != t) continue;
    std::vector<HapSet> out;
    for (const auto& choice : rule.choices) {
      HapSet set;
      for (const auto& entry : choice) expand_entry(entry, t, params, set);
      auto violations = coherence_violations(set, t);
      if (!violations.empty()) {
        throw std::runtime_error("env menu for round " + std::to_string(t) +
                                 " is not coherent: " + violations.front());
      }
      out.push_back(std::move(set));
    }
    if (out.empty()) throw std::runtime_error("env rule with empty menu");
    return out;
  }
  // an environment protocol is total; with no matching rule it offers only
  // the empty round
  return {HapSet{}};
}

bool EnvProtocol::contains(Timestamp t, const HapSet& x) const {
  if (!is_t_coherent(x, t)) return false;
  for (const auto& hap : x) {
    if (is_correct_action(hap)) return false;
  }
  auto slice_ok = [&](AgentId a, const HapSet& base_slice,
                      const HapSet& x_slice) {
    if (x_slice == base_slice) return true;
    if (caps.gullible.count(a)) {
      bool all_faults = std::all_of(
          x_slice.begin(), x_slice.end(),
          [](const GlobalHap& h) { return is_fault_event(h); });
      if (all_faults) return true;
    }
    if (caps.delayable.count(a) && x_slice.empty()) return true;
    if (caps.fallible.count(a)) {
      HapSet with_fail = base_slice;
      with_fail.insert(make_fail(a));
      if (x_slice == with_fail) return true;
      if (caps.delayable.count(a) && x_slice == hap_set({make_fail(a)})) {
        return true;
      }
    }
    return false;
  };
  for (const auto& base : choices(t)) {
    bool ok = true;
    for (AgentId a = 1; a <= params.agents && ok; ++a) {
      ok = slice_ok(a, events_of_agent(base, a), events_of_agent(x, a));
    }
    if (ok) return true;
  }
  return false;
}

std::vector<GlobalHap> EnvProtocol::fault_alphabet(AgentId i,
                                                   Timestamp t) const {
  std::vector<GlobalHap> out;
  out.push_back(make_fail(i));
  out.push_back(make_system(i, SystemEventKind::Sleep));
  out.push_back(make_system(i, SystemEventKind::Hibernate));
  for (AgentId j = 1; j <= params.agents; ++j) {
    for (const auto& msg : params.messages) {
      for (int k = 0; k < params.max_copies; ++k) {
        for (Timestamp ts = 0; ts <= std::max(t, params.horizon); ++ts) {
          out.push_back(make_fake_delivery(make_gmi(j, i, msg, k, ts)));
        }
        CorrectAction send = to_global(i, t, SendAction{j, msg, k});
        out.push_back(ByzAction{i, std::nullopt, send});
        out.push_back(ByzAction{i, send, std::nullopt});
      }
    }
  }
  out.push_back(ByzAction{i, std::nullopt, to_global(i, t, TickAction{})});
  return out;
}

std::vector<HapSet> EnvProtocol::sample_family(Timestamp t, size_t cap) const {
  std::vector<HapSet> family = choices(t);
  auto push = [&](HapSet s) {
    if (family.size() >= cap) return;
    if (std::find(family.begin(), family.end(), s) == family.end()) {
      family.push_back(std::move(s));
    }
  };
  std::vector<HapSet> base = family;
  for (const auto& x : base) {
    for (AgentId a = 1; a <= params.agents; ++a) {
      if (caps.delayable.count(a) || caps.gullible.count(a)) {
        HapSet stripped;
        for (const auto& h : x) {
          if (!(is_event(h) && agent_of(h) == a)) stripped.insert(h);
        }
        push(stripped);
      }
      if (caps.fallible.count(a)) {
        HapSet with_fail = x;
        with_fail.insert(make_fail(a));
        push(with_fail);
      }
      if (caps.gullible.count(a)) {
        HapSet stripped;
        for (const auto& h : x) {
          if (!(is_event(h) && agent_of(h) == a)) stripped.insert(h);
        }
        for (const auto& fault : fault_alphabet(a, t)) {
          HapSet y = stripped;
          y.insert(fault);
          if (is_t_coherent(y, t)) push(y);
        }
      }
    }
  }
  return family;
}

EnvProtocol silent_env(const ModelParams& params) {
  EnvProtocol env;
  env.params = params;
  env.rules.push_back(EnvRule{-1, {{}}});
  return env;
}

// ---- problem structures -------------------------------------------------

MulticastProblem MulticastProblem::broadcast(int agents) {
  MulticastProblem out;
  std::set<AgentId> everyone;
  for (AgentId i = 1; i <= agents; ++i) everyone.insert(i);
  out.groups.assign(static_cast<size_t>(agents), {everyone});
  return out;
}

std::optional<int> UpperBoundStructure::delta(AgentId from, AgentId to) const {
  auto it = per_channel.find({from, to});
  if (it != per_channel.end()) return it->second;
  return fallback;
}

UpperBoundStructure UpperBoundStructure::unbounded() {
  return UpperBoundStructure{{}, std::nullopt};
}

UpperBoundStructure UpperBoundStructure::synchronous(
    const std::set<std::pair<AgentId, AgentId>>& channels) {
  UpperBoundStructure out;
  out.fallback = std::nullopt;
  for (const auto& ch : channels) out.per_channel[ch] = 0;
  return out;
}

std::set<std::pair<AgentId, AgentId>> all_channels(int agents) {
  std::set<std::pair<AgentId, AgentId>> out;
  for (AgentId i = 1; i <= agents; ++i) {
    for (AgentId j = 1; j <= agents; ++j) out.insert({i, j});
  }
  return out;
}

// ---- validators ---------------------------------------------------------

bool validate_synchronous(const JointProtocol& joint,
                          const std::vector<LocalHistory>& probe,
                          const ModelParams& params) {
  if (probe.empty()) {
    throw std::invalid_argument("validate_synchronous: empty probe set");
  }
  for (const auto& proto : joint) {
    for (const auto& h : probe) {
      for (const auto& d : proto.choices(h, params)) {
        if (std::none_of(d.begin(), d.end(), is_tick)) return false;
      }
    }
  }
  return true;
}

bool validate_multicast(const JointProtocol& joint, const MulticastProblem& ch,
                        const std::vector<LocalHistory>& probe,
                        const ModelParams& params) {
  if (probe.empty()) {
    throw std::invalid_argument("validate_multicast: empty probe set");
  }
  for (AgentId i = 1; i <= static_cast<AgentId>(joint.size()); ++i) {
    const auto& groups = ch.groups.at(static_cast<size_t>(i - 1));
    for (const auto& h : probe) {
      for (const auto& d : joint[static_cast<size_t>(i - 1)].choices(h, params)) {
        // recipients per (message, copy)
        std::map<std::pair<Message, int>, std::set<AgentId>> recipients;
        for (const auto& a : d) {
          if (const auto* s = std::get_if<SendAction>(&a)) {
            recipients[{s->msg, s->copy}].insert(s->to);
          }
        }
        for (const auto& [key, rec] : recipients) {
          if (!rec.empty() && !groups.count(rec)) return false;
        }
      }
    }
  }
  return true;
}

bool validate_time_bounded(const EnvProtocol& env,
                           const UpperBoundStructure& bounds,
                           Timestamp horizon) {
  for (Timestamp t = 0; t <= horizon; ++t) {
    for (const auto& x : env.sample_family(t)) {
      for (const auto& hap : x) {
        const auto* recv = std::get_if<CorrectEvent>(&hap);
        if (!recv) continue;
        auto d = bounds.delta(recv->gmi.sender, recv->gmi.recipient);
        if (!d) continue;  // unbounded channel
        if (recv->gmi.send_time + *d < t) return false;
      }
    }
  }
  return true;
}

std::set<FaultCapability> classify_agent(const EnvProtocol& env, AgentId i,
                                         Timestamp horizon) {
  bool fallible = true;
  bool delayable = true;
  bool gullible = true;
  for (Timestamp t = 0; t <= horizon; ++t) {
    auto family = env.sample_family(t);
    auto fault_letters = env.fault_alphabet(i, t);
    // fault injections: exhaustive over small alphabets, else empty set,
    // singletons and one pair
    std::vector<HapSet> injections;
    if (fault_letters.size() <= 6) {
      size_t n = fault_letters.size();
      for (size_t bits = 0; bits < (size_t{1} << n); ++bits) {
        HapSet y;
        for (size_t b = 0; b < n; ++b) {
          if (bits & (size_t{1} << b)) y.insert(fault_letters[b]);
        }
        injections.push_back(std::move(y));
      }
    } else {
      injections.push_back({});
      for (const auto& f : fault_letters) injections.push_back(hap_set({f}));
      injections.push_back(hap_set({fault_letters[0], fault_letters[1]}));
    }
    for (const auto& x : family) {
      HapSet with_fail = x;
      with_fail.insert(make_fail(i));
      if (!env.contains(t, with_fail)) fallible = false;

      HapSet stripped;
      for (const auto& h : x) {
        if (!(is_event(h) && agent_of(h) == i)) stripped.insert(h);
      }
      if (!env.contains(t, stripped)) delayable = false;

      for (const auto& y : injections) {
        HapSet replaced = stripped;
        replaced.insert(y.begin(), y.end());
        if (is_t_coherent(replaced, t) && !env.contains(t, replaced)) {
          gullible = false;
          break;
        }
      }
      if (!fallible && !delayable && !gullible) break;
    }
  }
  std::set<FaultCapability> out;
  if (fallible) out.insert(FaultCapability::Fallible);
  if (delayable) out.insert(FaultCapability::Delayable);
  if (gullible) out.insert(FaultCapability::Gullible);
  return out;
}

AdmissibilityCond AdmissibilityCond::edel(
    std::set<std::pair<AgentId, AgentId>> channels,
    std::optional<UpperBoundStructure> bounds) {
  AdmissibilityCond out;
  out.kind = Kind::EDel;
  out.channels = std::move(channels);
  out.bounds = std::move(bounds);
  return out;
}

}  // namespace byzrun
