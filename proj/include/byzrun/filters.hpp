#pragma once

#include <functional>
#include <random>
#include <string>

#include "byzrun/params.hpp"
#include "byzrun/state.hpp"

// Event and action filter functions: named first-class values so templates
// built from them can be inspected and compared.

namespace byzrun {

struct EventFilter {
  std::string name;
  std::function<HapSet(const GlobalState&, const HapSet&,
                       const std::vector<HapSet>&)>
      fn;

  HapSet operator()(const GlobalState& h, const HapSet& x_env,
                    const std::vector<HapSet>& x_agents) const {
    return fn(h, x_env, x_agents);
  }
};

struct ActionFilter {
  std::string name;
  std::function<HapSet(AgentId, const std::vector<HapSet>&, const HapSet&)> fn;

  HapSet operator()(AgentId i, const std::vector<HapSet>& x_agents,
                    const HapSet& x_env) const {
    return fn(i, x_agents, x_env);
  }
};

// The filtering machinery of a transition relation. Action filtering is
// uniform across agents for every template in use here.
struct TransitionTemplate {
  EventFilter event;
  ActionFilter action;
};

EventFilter neutral_event();
ActionFilter neutral_action();

// Strips all of X_i unless go(i) is among the performed events.
ActionFilter standard_action();

// Removes receive events lacking causal support: no matching send (correct
// or faked) in the history, none attempted this round.
EventFilter causal_event();

// Removes every go when some agent has no system event this round.
EventFilter sync_event();

// compose(b, a): apply a first, then b.
EventFilter compose_event(const EventFilter& outer, const EventFilter& inner);
ActionFilter compose_action(const ActionFilter& outer,
                            const ActionFilter& inner);

EventFilter event_filter_by_name(const std::string& name);
ActionFilter action_filter_by_name(const std::string& name);

// ---- law checking -------------------------------------------------------

struct FilterSample {
  GlobalState state;
  HapSet x_env;
  std::vector<HapSet> x_agents;
  Timestamp t = 0;
};

// Deterministic sampler over the scenario's t-coherent domain.
class FilterSampler {
 public:
  FilterSampler(ModelParams params, std::uint64_t seed);

  FilterSample next();
  // A coherent subset of the event alphabet for round t.
  HapSet coherent_events(Timestamp t);
  std::vector<GlobalHap> event_alphabet(Timestamp t) const;

 private:
  ModelParams params_;
  std::mt19937_64 rng_;
};

bool check_basic_filter_property(const EventFilter& f,
                                 std::vector<FilterSample> samples);
bool check_basic_filter_property(const ActionFilter& f,
                                 std::vector<FilterSample> samples);
bool check_monotone(const EventFilter& f, std::vector<FilterSample> samples,
                    std::mt19937_64& rng);
bool check_monotone(const ActionFilter& f, std::vector<FilterSample> samples,
                    std::mt19937_64& rng);
bool check_idempotent(const ActionFilter& f,
                      std::vector<FilterSample> samples);

std::vector<FilterSample> make_samples(const ModelParams& params,
                                       std::uint64_t seed, int count);

}  // namespace byzrun
