#include <doctest.h>

#include <stdexcept>

#include "byzrun/extensions.hpp"

using namespace byzrun;

namespace {

ModelParams small_params() {
  ModelParams p;
  p.agents = 2;
  p.messages = {"m"};
  p.max_copies = 1;
  p.horizon = 3;
  return p;
}

}  // namespace

TEST_CASE("built-in extensions carry their implementation classes") {
  ModelParams params = small_params();
  CHECK(ext_synchronous(params).impl_class == ImplClass::EvFJP_AFB);
  CHECK(ext_byzantine(params).impl_class == ImplClass::EvFJP_AFB);
  CHECK(ext_time_bounded(UpperBoundStructure::unbounded(), params).impl_class ==
        ImplClass::EnvJP_DC);
  CHECK(ext_sync_comm(all_channels(2), params).impl_class ==
        ImplClass::EnvJP_DC);
  CHECK(ext_reliable(all_channels(2), params).impl_class == ImplClass::Adm);
  CHECK(ext_broadcast(params).impl_class == ImplClass::JP_AFB);
  CHECK(ext_lockstep(params).impl_class == ImplClass::EvFEnvJP_AFB);
}

TEST_CASE("composability table spot checks") {
  CHECK(composability(ImplClass::Adm, ImplClass::Adm) == Composability::Both);
  CHECK(composability(ImplClass::EvFJP, ImplClass::EvFJP) ==
        Composability::ReverseOnly);
  CHECK(composability(ImplClass::EvFJP, ImplClass::EvFEnvJP_DC) ==
        Composability::ForthOnly);
  CHECK(composability(ImplClass::EvFJP, ImplClass::EnvJP) ==
        Composability::None);
  CHECK(composability(ImplClass::JP_AFB, ImplClass::EvFEnvJP_DC) ==
        Composability::Both);
  CHECK(composability(ImplClass::JP_AFB, ImplClass::Others_DC) ==
        Composability::ForthOnly);
  CHECK(composability(ImplClass::Others, ImplClass::JP) == Composability::None);
  CHECK(composability(ImplClass::Others_DCmono, ImplClass::Others_DCmono) ==
        Composability::Both);
}

TEST_CASE("full rows of always-composable classes") {
  for (auto row : {ImplClass::Adm, ImplClass::JP, ImplClass::EnvJP,
                   ImplClass::JP_DC, ImplClass::EnvJP_DC}) {
    for (auto col : all_impl_classes()) {
      CHECK(composability(row, col) == Composability::Both);
    }
  }
}

TEST_CASE("class names round-trip") {
  for (auto c : all_impl_classes()) {
    CHECK(impl_class_from_name(to_string(c)) == c);
  }
  CHECK_THROWS_AS(impl_class_from_name("JPX"), std::invalid_argument);
}

TEST_CASE("class traits follow the checklist") {
  CHECK_FALSE(class_traits(ImplClass::Adm).joint_protocols);
  CHECK(class_traits(ImplClass::JP).joint_protocols);
  CHECK_FALSE(class_traits(ImplClass::JP).standard_action_filters);
  CHECK(class_traits(ImplClass::EvFJP_AFB).event_filter);
  CHECK(class_traits(ImplClass::EvFJP_AFB).standard_action_filters);
  CHECK_FALSE(class_traits(ImplClass::EvFJP_AFB).env_protocols);
  CHECK(class_traits(ImplClass::Others).arbitrary_action_filters);
  CHECK(class_traits(ImplClass::EnvJP_DC).downward_closed);
  CHECK(class_traits(ImplClass::Others_DCmono).monotonic_filters);
}

TEST_CASE("composing with a neutral extension changes behaviour nowhere") {
  ModelParams params = small_params();
  Extension neutral = ext_reliable({}, params);  // neutral filters, EDel({})
  neutral.admissibility = AdmissibilityCond::all();
  Extension s = ext_synchronous(params);
  Extension composed = compose_extensions(s, neutral);
  auto samples = make_samples(params, 21, 200);
  for (const auto& sample : samples) {
    CHECK(composed.event_filter(sample.state, sample.x_env, sample.x_agents) ==
          s.event_filter(sample.state, sample.x_env, sample.x_agents));
    for (AgentId i = 1; i <= 2; ++i) {
      CHECK(composed.action_filter(i, sample.x_agents, sample.x_env) ==
            s.action_filter(i, sample.x_agents, sample.x_env));
    }
  }
}

TEST_CASE("the lock-step extension equals its composition chain") {
  ModelParams params = small_params();
  Extension chain = compose_extensions(
      compose_extensions(
          compose_extensions(
              compose_extensions(ext_byzantine(params), ext_synchronous(params)),
              ext_broadcast(params)),
          ext_sync_comm(all_channels(2), params)),
      ext_reliable(all_channels(2), params));
  Extension lss = ext_lockstep(params);

  CHECK(chain.admissibility.kind == AdmissibilityCond::Kind::EDel);
  CHECK(chain.admissibility.channels == lss.admissibility.channels);
  REQUIRE(chain.delivery_bounds.has_value());
  for (auto [i, j] : all_channels(2)) {
    CHECK(chain.delivery_bounds->delta(i, j) ==
          lss.delivery_bounds->delta(i, j));
  }

  auto samples = make_samples(params, 31, 300);
  for (const auto& sample : samples) {
    CHECK(chain.event_filter(sample.state, sample.x_env, sample.x_agents) ==
          lss.event_filter(sample.state, sample.x_env, sample.x_agents));
    for (AgentId i = 1; i <= 2; ++i) {
      CHECK(chain.action_filter(i, sample.x_agents, sample.x_env) ==
            lss.action_filter(i, sample.x_agents, sample.x_env));
    }
  }

  // both accept the canonical witness pair and reject a non-synchronous one
  ProbeContext probe{params, {LocalHistory{{}, "s0"}}};
  JointProtocol ticks(2, silent_tick_protocol());
  EnvProtocol env = silent_env(params);
  CHECK(chain.protocol_pairs(env, ticks, probe));
  CHECK(lss.protocol_pairs(env, ticks, probe));
  AgentProtocol lazy;
  lazy.kind = AgentProtocol::Kind::Table;
  lazy.rules.push_back(ProtocolRule{-1, {{}}});
  JointProtocol lazies(2, lazy);
  CHECK_FALSE(chain.protocol_pairs(env, lazies, probe));
  CHECK_FALSE(lss.protocol_pairs(env, lazies, probe));
}

TEST_CASE("compatibility of the lock-step constituents") {
  ModelParams params = small_params();
  std::vector<Extension> parts{
      ext_byzantine(params), ext_synchronous(params), ext_broadcast(params),
      ext_sync_comm(all_channels(2), params),
      ext_reliable(all_channels(2), params)};
  CompatReport report = check_compatible(parts, params, 3);
  CHECK(report.compatible);
  CHECK(report.witness_runs >= 1);
}

TEST_CASE("a single extension is compatible with itself") {
  ModelParams params = small_params();
  CompatReport report = check_compatible({ext_synchronous(params)}, params, 2);
  CHECK(report.compatible);
}

TEST_CASE("extensions with disjoint protocol families are incompatible") {
  ModelParams params = small_params();
  Extension s = ext_synchronous(params);
  Extension no_tick;
  no_tick.name = "no-tick";
  no_tick.protocol_pairs = [](const EnvProtocol&, const JointProtocol& joint,
                              const ProbeContext& probe) {
    for (const auto& proto : joint) {
      for (const auto& h : probe.histories) {
        for (const auto& d : proto.choices(h, probe.params)) {
          for (const auto& a : d) {
            if (is_tick(a)) return false;
          }
        }
      }
    }
    return true;
  };
  no_tick.initial_families = [](const std::vector<GlobalState>& s) {
    return !s.empty();
  };
  no_tick.event_filter = neutral_event();
  no_tick.action_filter = neutral_action();
  no_tick.admissibility = AdmissibilityCond::all();
  CompatReport report = check_compatible({s, no_tick}, params, 2);
  CHECK_FALSE(report.compatible);
}

TEST_CASE("downward closure of the delivery-bound properties") {
  ModelParams params = small_params();
  std::vector<GlobalState> probes{make_initial_state(2)};
  UpperBoundStructure loose;
  loose.fallback = 2;
  CHECK(check_downward_closed(safety_time_bounded(loose, params), probes, 1)
            .pass);
  CHECK(check_downward_closed(
            safety_time_bounded(
                UpperBoundStructure::synchronous(all_channels(2)), params),
            probes, 2)
            .pass);
  CHECK(check_downward_closed(safety_no_faults(params), probes, 3).pass);
  CHECK_FALSE(
      check_downward_closed(safety_requires_go1(params), probes, 4).pass);
}

TEST_CASE("safety attributes at depth three") {
  ModelParams params = small_params();
  std::vector<GlobalState> initials{make_initial_state(2)};
  UpperBoundStructure loose;
  loose.fallback = 2;
  CHECK(check_safety_attributes(safety_time_bounded(loose, params), initials, 3)
            .pass);
  CHECK(check_safety_attributes(safety_no_faults(params), initials, 3).pass);
  CHECK(check_safety_attributes(safety_requires_go1(params), initials, 3).pass);

  SafetyProperty never;
  never.name = "admits-nothing";
  never.admits = [](const GlobalState&, const PerformedTuple&) { return false; };
  never.generate = [](const GlobalState&) {
    return std::vector<PerformedTuple>{PerformedTuple{{}, {{}, {}}}};
  };
  auto res = check_safety_attributes(never, initials, 2);
  CHECK_FALSE(res.pass);
  CHECK(res.detail.find("attribute 1") != std::string::npos);

  // admits a tuple into a state whose own admitted set is empty
  SafetyProperty dead_end;
  dead_end.name = "one-step-dead-end";
  dead_end.admits = [](const GlobalState& h, const PerformedTuple&) {
    return h.time() == 0;
  };
  dead_end.generate = [](const GlobalState&) {
    PerformedTuple x;
    x.actions.resize(2);
    return std::vector<PerformedTuple>{x};
  };
  auto res2 = check_safety_attributes(dead_end, initials, 2);
  CHECK_FALSE(res2.pass);
  CHECK(res2.detail.find("attribute 2") != std::string::npos);
}

TEST_CASE("implementation-class lint") {
  ModelParams params = small_params();
  Extension b = ext_byzantine(params);
  CHECK(lint_impl_class(b, ImplClass::EvFJP_AFB, params, 1).empty());
  CHECK_FALSE(lint_impl_class(b, ImplClass::JP, params, 1).empty());
  Extension tc = ext_time_bounded(UpperBoundStructure::unbounded(), params);
  CHECK(lint_impl_class(tc, ImplClass::EnvJP_DC, params, 1).empty());
  CHECK_FALSE(lint_impl_class(tc, ImplClass::Adm, params, 1).empty());
}

TEST_CASE("filter composition is associative for monotone constituents") {
  ModelParams params = small_params();
  auto samples = make_samples(params, 55, 300);
  auto left = compose_event(compose_event(causal_event(), sync_event()),
                            neutral_event());
  auto right = compose_event(causal_event(),
                             compose_event(sync_event(), neutral_event()));
  for (const auto& s : samples) {
    CHECK(left(s.state, s.x_env, s.x_agents) ==
          right(s.state, s.x_env, s.x_agents));
  }
}

TEST_CASE("a 'both ways' table cell preserves the second safety property") {
  // S (EvFJP-AFB) against TC (EnvJP_DC): the table grants both orders
  ModelParams params = small_params();
  CHECK(composability(ImplClass::EvFJP_AFB, ImplClass::EnvJP_DC) ==
        Composability::Both);
  UpperBoundStructure bounds = UpperBoundStructure::synchronous(all_channels(2));
  Extension s = ext_synchronous(params);
  Extension tc = ext_time_bounded(bounds, params);
  for (const auto& composed :
       {compose_extensions(s, tc), compose_extensions(tc, s)}) {
    AgentContext ctx;
    ctx.params = params;
    ctx.env.params = params;
    ctx.env.rules.push_back(
        EnvRule{-1, {{"@go_all", "@deliver_all_same_round"}, {}}});
    ctx.initial_states = {make_initial_state(2)};
    ctx.templ = template_of(composed);
    ctx.admissibility = composed.admissibility;
    AgentProtocol sender;
    sender.kind = AgentProtocol::Kind::Table;
    sender.rules.push_back(
        ProtocolRule{-1, {{TickAction{}, SendAction{2, "m", 0}}}});
    ctx.joint = {sender, silent_tick_protocol()};
    RunSystem system = enumerate_runs(ctx, 4, Adversary::exhaust());
    SafetyProperty safety = safety_time_bounded(bounds, params);
    for (const auto& run : system.runs) {
      for (Timestamp t = 0; t < run.horizon(); ++t) {
        PerformedTuple x{run.rounds[static_cast<size_t>(t)].performed_events,
                         run.rounds[static_cast<size_t>(t)].performed_actions};
        CHECK(safety.admits(run.at(t), x));
      }
    }
  }
}
