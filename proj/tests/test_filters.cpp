#include <doctest.h>

#include <stdexcept>

#include "byzrun/filters.hpp"

using namespace byzrun;

namespace {

GlobalHap go(AgentId i) { return make_system(i, SystemEventKind::Go); }

ModelParams small_params() {
  ModelParams p;
  p.agents = 2;
  p.messages = {"m"};
  p.max_copies = 1;
  p.horizon = 3;
  return p;
}

}  // namespace

TEST_CASE("neutral filters are identities") {
  GlobalState h = make_initial_state(2);
  HapSet x = hap_set({go(1)});
  std::vector<HapSet> agents(2);
  CHECK(neutral_event()(h, {}, agents).empty());
  CHECK(neutral_event()(h, x, agents) == x);
  agents[0] = hap_set({GlobalHap{to_global(1, 0, TickAction{})}});
  CHECK(neutral_action()(1, agents, x) == agents[0]);
}

TEST_CASE("standard action filter gates on activation") {
  std::vector<HapSet> agents(2);
  agents[0] = hap_set({GlobalHap{to_global(1, 0, TickAction{})}});
  CHECK(standard_action()(1, agents, hap_set({go(1)})) == agents[0]);
  CHECK(standard_action()(
            1, agents, hap_set({make_system(1, SystemEventKind::Sleep)}))
            .empty());
  // idempotence: filtering a filtered slot changes nothing
  auto samples = make_samples(small_params(), 11, 200);
  CHECK(check_idempotent(standard_action(), samples));
}

TEST_CASE("causal filter keeps supported receives") {
  Gmi gmi = make_gmi(1, 2, "m", 0, 0);
  GlobalHap recv = make_delivery(gmi);
  std::vector<HapSet> agents(2);

  SUBCASE("support from history") {
    GlobalState h = make_initial_state(2);
    PerformedTuple x;
    x.actions.resize(2);
    x.actions[0] = hap_set({GlobalHap{to_global(1, 0, SendAction{2, "m", 0})}});
    x.events = hap_set({go(1)});
    h = update_global(h, x);
    CHECK(causal_event()(h, hap_set({recv}), agents) == hap_set({recv}));
  }
  SUBCASE("support from the current round") {
    GlobalState h = make_initial_state(2);
    agents[0] = hap_set({GlobalHap{to_global(1, 0, SendAction{2, "m", 0})}});
    HapSet x = hap_set({recv, go(1)});
    CHECK(causal_event()(h, x, agents) == x);
  }
  SUBCASE("no support, removed") {
    GlobalState h = make_initial_state(2);
    CHECK(causal_event()(h, hap_set({recv}), agents).empty());
  }
  SUBCASE("support from a faked send in the same round") {
    GlobalState h = make_initial_state(2);
    ByzAction fake_send{1, to_global(1, 0, SendAction{2, "m", 0}),
                        std::nullopt};
    HapSet x = hap_set({recv, GlobalHap{fake_send}});
    CHECK(causal_event()(h, x, agents) == x);
  }
  SUBCASE("attempted send without activation is no support") {
    GlobalState h = make_initial_state(2);
    agents[0] = hap_set({GlobalHap{to_global(1, 0, SendAction{2, "m", 0})}});
    CHECK(causal_event()(h, hap_set({recv}), agents).empty());
  }
}

TEST_CASE("sync filter strips activations when someone idles") {
  GlobalState h = make_initial_state(2);
  std::vector<HapSet> agents(2);
  HapSet all = hap_set({go(1), go(2)});
  CHECK(sync_event()(h, all, agents) == all);

  CHECK(sync_event()(h, hap_set({go(1)}), agents).empty());

  HapSet with_hib = hap_set({go(1), make_system(2, SystemEventKind::Hibernate),
                             make_fail(1)});
  CHECK(sync_event()(h, with_hib, agents) == with_hib);

  // non-go events survive the stripping branch
  HapSet mixed = hap_set({go(1), make_fail(1)});
  CHECK(sync_event()(h, mixed, agents) == hap_set({make_fail(1)}));
}

TEST_CASE("composition order matters for causal and sync") {
  ModelParams params = small_params();
  GlobalState h = make_initial_state(2);
  Gmi gmi = make_gmi(1, 2, "m", 0, 0);
  HapSet x_env = hap_set({go(1), make_delivery(gmi)});
  std::vector<HapSet> x_agents(2);
  x_agents[0] = hap_set({GlobalHap{to_global(1, 0, SendAction{2, "m", 0})}});

  auto causal_after_sync = compose_event(causal_event(), sync_event());
  auto sync_after_causal = compose_event(sync_event(), causal_event());

  CHECK(causal_after_sync(h, x_env, x_agents).empty());
  CHECK(sync_after_causal(h, x_env, x_agents) == hap_set({make_delivery(gmi)}));
}

TEST_CASE("composing with neutral changes nothing") {
  auto samples = make_samples(small_params(), 3, 300);
  for (const auto& f : {causal_event(), sync_event()}) {
    auto outer = compose_event(neutral_event(), f);
    auto inner = compose_event(f, neutral_event());
    for (const auto& s : samples) {
      HapSet expect = f(s.state, s.x_env, s.x_agents);
      CHECK(outer(s.state, s.x_env, s.x_agents) == expect);
      CHECK(inner(s.state, s.x_env, s.x_agents) == expect);
    }
  }
  auto action = compose_action(neutral_action(), standard_action());
  for (const auto& s : samples) {
    for (AgentId i = 1; i <= 2; ++i) {
      CHECK(action(i, s.x_agents, s.x_env) ==
            standard_action()(i, s.x_agents, s.x_env));
    }
  }
}

TEST_CASE("built-in filters hold the basic property on samples") {
  auto samples = make_samples(small_params(), 101, 500);
  CHECK(check_basic_filter_property(neutral_event(), samples));
  CHECK(check_basic_filter_property(causal_event(), samples));
  CHECK(check_basic_filter_property(sync_event(), samples));
  CHECK(check_basic_filter_property(neutral_action(), samples));
  CHECK(check_basic_filter_property(standard_action(), samples));

  EventFilter injecting{"broken", [](const GlobalState&, const HapSet& x,
                                     const std::vector<HapSet>&) {
                          HapSet out = x;
                          out.insert(make_system(1, SystemEventKind::Go));
                          return out;
                        }};
  CHECK_FALSE(check_basic_filter_property(injecting, samples));
}

TEST_CASE("sync and standard filters are monotone on the coherent domain") {
  auto samples = make_samples(small_params(), 77, 400);
  std::mt19937_64 rng(5);
  CHECK(check_monotone(sync_event(), samples, rng));
  CHECK(check_monotone(standard_action(), samples, rng));
  CHECK(check_monotone(causal_event(), samples, rng));
}

TEST_CASE("filters never touch haps outside their scope") {
  auto samples = make_samples(small_params(), 13, 300);
  for (const auto& s : samples) {
    HapSet causal_out = causal_event()(s.state, s.x_env, s.x_agents);
    for (const auto& hap : s.x_env) {
      if (!is_correct_event(hap)) CHECK(causal_out.count(hap) == 1);
    }
    HapSet sync_out = sync_event()(s.state, s.x_env, s.x_agents);
    for (const auto& hap : s.x_env) {
      const auto* sys = std::get_if<SystemEvent>(&hap);
      bool is_go = sys && sys->kind == SystemEventKind::Go;
      if (!is_go) CHECK(sync_out.count(hap) == 1);
    }
  }
}

TEST_CASE("filters resolve by name") {
  CHECK(event_filter_by_name("neutral").name == "neutral");
  CHECK(event_filter_by_name("compose(causal,sync)").name ==
        "compose(causal,sync)");
  CHECK(action_filter_by_name("standard_action").name == "standard_action");
  CHECK_THROWS_AS(event_filter_by_name("nope"), std::invalid_argument);
}
