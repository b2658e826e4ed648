#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "byzrun/state.hpp"

using namespace byzrun;

namespace {

GlobalHap go(AgentId i) { return make_system(i, SystemEventKind::Go); }
GlobalHap sleep_ev(AgentId i) { return make_system(i, SystemEventKind::Sleep); }
GlobalHap hib(AgentId i) { return make_system(i, SystemEventKind::Hibernate); }

}  // namespace

TEST_CASE("labeling a send mints the message identifier") {
  CorrectAction a = to_global(1, 3, SendAction{2, "m", 0});
  CHECK(a.agent == 1);
  CHECK(a.time == 3);
  REQUIRE(a.gmi.has_value());
  CHECK(*a.gmi == make_gmi(1, 2, "m", 0, 3));
}

TEST_CASE("labeling a non-send carries no identifier") {
  CorrectAction a = to_global(1, 0, TickAction{});
  CHECK_FALSE(a.gmi.has_value());
}

TEST_CASE("labeling is injective across times") {
  CHECK_FALSE(to_global(1, 3, SendAction{2, "m", 0}) ==
              to_global(1, 4, SendAction{2, "m", 0}));
}

TEST_CASE("labeling and identifiers collide on no random tuples") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> agent(1, 4), copy(0, 2), time(0, 9);
  std::vector<Message> msgs{"a", "b", "c"};
  std::uniform_int_distribution<size_t> msg(0, msgs.size() - 1);
  std::set<std::string> seen_gmis;
  std::map<std::string, std::tuple<int, int, std::string, int, int>> sources;
  for (int i = 0; i < 10000; ++i) {
    auto tuple = std::make_tuple(agent(rng), agent(rng), msgs[msg(rng)],
                                 copy(rng), time(rng));
    Gmi g = make_gmi(std::get<0>(tuple), std::get<1>(tuple),
                     std::get<2>(tuple), std::get<3>(tuple),
                     std::get<4>(tuple));
    auto [it, inserted] = sources.emplace(to_string(g), tuple);
    if (!inserted) CHECK(it->second == tuple);
  }
  // distinct (i, t, action) never map to the same global hap
  std::map<std::string, std::tuple<int, int, std::string>> acts;
  for (int i = 0; i < 10000; ++i) {
    int who = agent(rng);
    int when = time(rng);
    LocalAction a = i % 3 == 0
                        ? LocalAction{TickAction{}}
                        : LocalAction{SendAction{agent(rng), msgs[msg(rng)],
                                                 copy(rng)}};
    auto key = to_string(GlobalHap{to_global(who, when, a)});
    auto val = std::make_tuple(who, when, to_string(a));
    auto [it, inserted] = acts.emplace(key, val);
    if (!inserted) CHECK(it->second == val);
  }
}

TEST_CASE("to_local reverses the labeling") {
  CorrectEvent e{2, RecvEvent{1, "m"}, make_gmi(1, 2, "m", 0, 3)};
  CHECK(to_local(GlobalHap{e}) == LocalHap{RecvEvent{1, "m"}});
  CorrectAction a = to_global(1, 0, TickAction{});
  CHECK(to_local(GlobalHap{a}) == LocalHap{LocalAction{TickAction{}}});
  CHECK_THROWS_AS(to_local(go(1)), std::invalid_argument);
  CHECK_THROWS_AS(to_local(make_fail(1)), std::invalid_argument);
}

TEST_CASE("localization drops system events and unwraps faults") {
  CHECK(localize(hap_set({go(1)})).empty());

  ByzAction recorded_tick{1, std::nullopt, to_global(1, 2, TickAction{})};
  CHECK(localize(hap_set({GlobalHap{recorded_tick}})) ==
        LocalHapSet{LocalHap{LocalAction{TickAction{}}}});

  Gmi g1 = make_gmi(1, 2, "m", 0, 0);
  Gmi g2 = make_gmi(3, 2, "m", 0, 0);
  HapSet mixed = hap_set({make_delivery(g1), make_fake_delivery(g2)});
  LocalHapSet expect{LocalHap{RecvEvent{1, "m"}}, LocalHap{RecvEvent{3, "m"}}};
  CHECK(localize(mixed) == expect);

  // fail(i) records nothing
  CHECK(localize(hap_set({make_fail(1)})).empty());
}

TEST_CASE("localization of labeled non-sends is the identity") {
  for (const LocalAction& a :
       {LocalAction{TickAction{}}, LocalAction{InternalAction{"probe"}}}) {
    auto localized = localize(hap_set({GlobalHap{to_global(1, 5, a)}}));
    CHECK(localized == LocalHapSet{LocalHap{a}});
  }
}

TEST_CASE("agent update ignores hibernation") {
  LocalHistory h;
  h.initial = "s0";
  CHECK(update_agent(h, 1, {}, hap_set({hib(1)})) == h);
}

TEST_CASE("agent update wakes on go with an empty layer") {
  LocalHistory h;
  h.initial = "s0";
  LocalHistory updated = update_agent(h, 1, {}, hap_set({go(1)}));
  REQUIRE(updated.length() == 1);
  CHECK(updated.layers.front().empty());
  // sleeping also wakes
  LocalHistory slept = update_agent(h, 1, {}, hap_set({sleep_ev(1)}));
  CHECK(slept.length() == 1);
}

TEST_CASE("agent update records performed actions") {
  LocalHistory h;
  h.initial = "s0";
  HapSet acts = hap_set({GlobalHap{to_global(1, 0, TickAction{})}});
  LocalHistory updated = update_agent(h, 1, acts, hap_set({go(1)}));
  REQUIRE(updated.length() == 1);
  CHECK(updated.layers.front() ==
        LocalHapSet{LocalHap{LocalAction{TickAction{}}}});
}

TEST_CASE("go or sleep rounds never leave the history unchanged") {
  LocalHistory h;
  h.initial = "s0";
  for (auto kind : {SystemEventKind::Go, SystemEventKind::Sleep}) {
    CHECK_FALSE(update_agent(h, 1, {}, hap_set({make_system(1, kind)})) == h);
  }
}

TEST_CASE("environment update appends exactly one layer") {
  EnvHistory h;
  PerformedTuple empty;
  empty.actions.resize(2);
  EnvHistory one = update_env(h, empty);
  CHECK(one.length() == 1);
  CHECK(one.layers.front().empty());

  PerformedTuple x;
  x.events = hap_set({go(1)});
  x.actions.resize(2);
  x.actions[0] = hap_set({GlobalHap{to_global(1, 1, TickAction{})}});
  EnvHistory two = update_env(one, x);
  REQUIRE(two.length() == 2);
  CHECK(two.layers.front() ==
        hap_set({go(1), GlobalHap{to_global(1, 1, TickAction{})}}));
  CHECK(two.layers.back().empty());
}

TEST_CASE("environment update is injective over sampled inputs") {
  std::vector<std::pair<EnvHistory, PerformedTuple>> inputs;
  EnvHistory empty;
  EnvHistory deep;
  deep.layers.push_back(hap_set({go(2)}));
  for (const auto& base : {empty, deep}) {
    for (const auto& events :
         {HapSet{}, hap_set({go(1)}), hap_set({go(1), sleep_ev(2)})}) {
      PerformedTuple x;
      x.events = events;
      x.actions.resize(2);
      inputs.push_back({base, x});
      PerformedTuple with_action = x;
      with_action.actions[1] =
          hap_set({GlobalHap{to_global(2, 0, TickAction{})}});
      inputs.push_back({base, with_action});
    }
  }
  std::map<std::string, size_t> outputs;
  for (size_t i = 0; i < inputs.size(); ++i) {
    EnvHistory out = update_env(inputs[i].first, inputs[i].second);
    std::string key;
    for (const auto& layer : out.layers) {
      key += "[";
      for (const auto& hap : layer) key += to_string(hap) + ";";
      key += "]";
    }
    auto [it, inserted] = outputs.emplace(key, i);
    CHECK(inserted);
  }
}

TEST_CASE("round coherence") {
  CHECK(is_t_coherent({}, 0));
  CHECK(is_t_coherent({}, 7));

  CHECK_FALSE(is_t_coherent(hap_set({go(1), sleep_ev(1)}), 0));
  CHECK(is_t_coherent(hap_set({go(1), sleep_ev(2)}), 0));

  // a performed fake send must be stamped with the current round
  CorrectAction send = to_global(1, 5, SendAction{2, "m", 0});
  ByzAction fake_send{1, send, std::nullopt};
  CHECK_FALSE(is_t_coherent(hap_set({GlobalHap{fake_send}}), 3));
  CHECK(is_t_coherent(hap_set({GlobalHap{fake_send}}), 5));

  // correct and faked copies of the same event clash
  Gmi g = make_gmi(1, 2, "m", 0, 0);
  CHECK_FALSE(is_t_coherent(hap_set({make_delivery(g), make_fake_delivery(g)}), 0));
  // ... and so do receives of the same content with different identifiers
  Gmi g2 = make_gmi(1, 2, "m", 1, 0);
  CHECK_FALSE(
      is_t_coherent(hap_set({make_delivery(g), make_fake_delivery(g2)}), 0));
  // but distinct contents coexist
  Gmi g3 = make_gmi(1, 2, "x", 0, 0);
  CHECK(is_t_coherent(hap_set({make_delivery(g), make_fake_delivery(g3)}), 0));
}

TEST_CASE("synced round counting") {
  GlobalState s = make_initial_state(2);
  CHECK(synced_rounds(s) == 0);

  auto advance = [&](const HapSet& events) {
    PerformedTuple x;
    x.events = events;
    x.actions.resize(2);
    s = update_global(s, x);
  };
  advance(hap_set({go(1), go(2)}));
  advance(hap_set({go(1), go(2)}));
  advance(hap_set({go(1), sleep_ev(2)}));
  CHECK(synced_rounds(s) == 3);

  GlobalState partial = make_initial_state(2);
  PerformedTuple x;
  x.events = hap_set({go(1)});
  x.actions.resize(2);
  partial = update_global(partial, x);
  x.events = hap_set({go(1), hib(2)});
  partial = update_global(partial, x);
  CHECK(synced_rounds(partial) == 1);
}

TEST_CASE("byzantine node attribution") {
  GlobalState s = make_initial_state(2);
  auto advance = [&](const HapSet& events) {
    PerformedTuple x;
    x.events = events;
    x.actions.resize(2);
    s = update_global(s, x);
  };
  advance(hap_set({go(1), go(2)}));
  CHECK(byzantine_nodes(s, 1).empty());

  GlobalState failed = make_initial_state(2);
  PerformedTuple x;
  x.events = hap_set({make_fail(1)});
  x.actions.resize(2);
  failed = update_global(failed, x);
  x.events = {};
  failed = update_global(failed, x);
  failed = update_global(failed, x);
  std::set<std::pair<AgentId, Timestamp>> expect{{1, 1}, {1, 2}, {1, 3}};
  CHECK(byzantine_nodes(failed, 3) == expect);

  GlobalState slept = make_initial_state(2);
  PerformedTuple y;
  y.actions.resize(2);
  y.events = hap_set({go(1), go(2)});
  slept = update_global(slept, y);
  slept = update_global(slept, y);
  y.events = hap_set({go(1), sleep_ev(2)});
  slept = update_global(slept, y);  // agent 2 sleeps in round 2
  CHECK_FALSE(byzantine_nodes(slept, 3).count({2, 2}));
  CHECK(byzantine_nodes(slept, 3).count({2, 3}));
  CHECK(agent_faulty_at(slept, 2, 3));
  CHECK_FALSE(agent_faulty_at(slept, 1, 3));
}

TEST_CASE("hap text round-trips through the parser") {
  std::vector<GlobalHap> haps{
      go(1),
      sleep_ev(2),
      hib(1),
      make_fail(2),
      make_delivery(make_gmi(1, 2, "m", 0, 3)),
      make_fake_delivery(make_gmi(2, 1, "m", 1, 0)),
      GlobalHap{to_global(1, 3, SendAction{2, "m", 0})},
      GlobalHap{to_global(2, 0, TickAction{})},
      GlobalHap{to_global(1, 1, InternalAction{"probe"})},
      GlobalHap{ByzAction{1, std::nullopt, to_global(1, 2, TickAction{})}},
      GlobalHap{ByzAction{1, to_global(1, 2, SendAction{2, "m", 0}),
                          std::nullopt}},
  };
  for (const auto& hap : haps) {
    CHECK(parse_global_hap(to_string(hap)) == hap);
  }
  CHECK_THROWS_AS(parse_global_hap("deliver(1,2)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_global_hap("warp(1)"), std::invalid_argument);
  // a faulty action may only carry the faulting agent's own actions
  CHECK_THROWS_AS(parse_global_hap("fake_act(2,act(1,tick,0),noop)"),
                  std::invalid_argument);
}
