#pragma once

#include <utility>

#include "byzrun/haps.hpp"

// Layered histories and the state update machinery. Layers are stored
// newest-first, mirroring the prepend that a round performs.

namespace byzrun {

struct LocalHistory {
  std::vector<LocalHapSet> layers;  // [newest, ..., oldest appended]
  std::string initial;              // the initial-state token

  int length() const { return static_cast<int>(layers.size()); }
  bool operator==(const LocalHistory&) const = default;

  bool records(const LocalHap& hap) const;
  int count_ticks() const;
};

struct EnvHistory {
  std::vector<HapSet> layers;  // [newest, ..., round-0 layer]

  int length() const { return static_cast<int>(layers.size()); }
  bool operator==(const EnvHistory&) const = default;

  // Layer appended by round t (0-based round index). Throws if out of range.
  const HapSet& round_layer(Timestamp t) const;
  bool happens(const GlobalHap& hap) const;
  bool happens_before(const GlobalHap& hap, Timestamp t) const;  // rounds < t
};

struct GlobalState {
  EnvHistory env;
  std::vector<LocalHistory> locals;  // index 0 holds agent 1

  int agent_count() const { return static_cast<int>(locals.size()); }
  Timestamp time() const { return env.length(); }
  const LocalHistory& local(AgentId i) const { return locals.at(i - 1); }
  LocalHistory& local(AgentId i) { return locals.at(i - 1); }
  bool operator==(const GlobalState&) const = default;
};

GlobalState make_initial_state(int agents, const std::string& token = "s0");

// A round's performed haps: events chosen by the environment plus the
// per-agent performed action sets.
struct PerformedTuple {
  HapSet events;                      // X_epsilon
  std::vector<HapSet> actions;        // X_i as global CorrectAction sets

  bool operator==(const PerformedTuple&) const = default;
};

// update_i: unchanged when nothing is perceived and the round's system
// event for i is neither exactly {go} nor exactly {sleep}; otherwise a new
// (possibly empty) layer of localized haps is prepended.
LocalHistory update_agent(const LocalHistory& h, AgentId i, const HapSet& x_i,
                          const HapSet& x_env);

EnvHistory update_env(const EnvHistory& h, const PerformedTuple& x);

GlobalState update_global(const GlobalState& h, const PerformedTuple& x);

// ---- round coherence ----------------------------------------------------

// The five mutual-compatibility conditions on one round's event set.
bool is_t_coherent(const HapSet& events, Timestamp t);
// Empty when coherent; otherwise one message per violated condition.
std::vector<std::string> coherence_violations(const HapSet& events,
                                              Timestamp t);

// ---- derived views ------------------------------------------------------

HapSet events_of_agent(const HapSet& haps, AgentId i);       // X_eps_i
HapSet system_events_of(const HapSet& haps, AgentId i);      // beta^g_i
HapSet byz_events_of(const HapSet& haps, AgentId i);         // beta^byz_i
HapSet correct_events_of(const HapSet& haps, AgentId i);

bool layer_is_synced(const HapSet& layer, int agents);

// Number of synced rounds recorded in the state.
int synced_rounds(const GlobalState& h);

// Agent i is byzantine by time t iff some fault event of i happens in the
// first t layers. Returns the (i, t') pairs with t' <= t.
std::set<std::pair<AgentId, Timestamp>> byzantine_nodes(const GlobalState& h,
                                                        Timestamp t);
bool agent_faulty_at(const GlobalState& h, AgentId i, Timestamp t);

}  // namespace byzrun
