#include "byzrun/checks.hpp"

#include <algorithm>
#include <sstream>

namespace byzrun {

namespace {

std::string verdict_str(bool pass) { return pass ? "pass" : "fail"; }

AgentContext context_for(const Scenario& scenario, const RunOptions& options) {
  AgentContext ctx = build_context(scenario);
  if (options.horizon) ctx.params.horizon = *options.horizon;
  return ctx;
}

Adversary adversary_for(const Scenario& scenario, const RunOptions& options) {
  Adversary adv = scenario.adversary;
  if (options.exhaustive && *options.exhaustive) adv = Adversary::exhaust();
  if (options.seed) adv = Adversary::seeded(*options.seed, adv.samples);
  return adv;
}

Timestamp horizon_for(const Scenario& scenario, const RunOptions& options) {
  return options.horizon.value_or(scenario.params.horizon);
}

}  // namespace

// ---- run laws ----------------------------------------------------------------

std::optional<std::string> scan_run_law(const std::string& law, const Run& run,
                                        const AgentContext& ctx,
                                        const Extension& ext) {
  const GlobalState& final_state = run.states.back();
  int agents = ctx.params.agents;

  if (law == "causal_support") {
    for (Timestamp t = 0; t < run.horizon(); ++t) {
      for (const auto& hap : final_state.env.round_layer(t)) {
        const auto* recv = std::get_if<CorrectEvent>(&hap);
        if (!recv) continue;
        bool supported = false;
        for (Timestamp m = 0; m <= t && !supported; ++m) {
          for (const auto& h : final_state.env.round_layer(m)) {
            auto gmi = performed_send_gmi(h);
            if (gmi && *gmi == recv->gmi) {
              supported = true;
              break;
            }
          }
        }
        if (!supported) {
          return "receive " + to_string(hap) + " in round " +
                 std::to_string(t) + " has no matching send";
        }
      }
    }
    return std::nullopt;
  }

  if (law == "go_iff_action") {
    for (Timestamp t = 0; t < run.horizon(); ++t) {
      const HapSet& layer = final_state.env.round_layer(t);
      for (AgentId i = 1; i <= agents; ++i) {
        bool go = layer.count(make_system(i, SystemEventKind::Go)) > 0;
        bool acted = false;
        for (const auto& hap : layer) {
          if (is_correct_action(hap) && agent_of(hap) == i) acted = true;
        }
        if (go != acted) {
          return "agent " + std::to_string(i) + " in round " +
                 std::to_string(t) + (go ? " activated without acting"
                                         : " acted without activation");
        }
      }
    }
    return std::nullopt;
  }

  if (law == "protocol_only_in_synced_rounds") {
    for (Timestamp t = 0; t < run.horizon(); ++t) {
      const HapSet& layer = final_state.env.round_layer(t);
      bool synced = layer_is_synced(layer, agents);
      for (AgentId i = 1; i <= agents; ++i) {
        if (layer.count(make_system(i, SystemEventKind::Go)) && !synced) {
          return "go(" + std::to_string(i) + ") in unsynced round " +
                 std::to_string(t);
        }
      }
    }
    return std::nullopt;
  }

  if (law == "recv_within_bounds") {
    if (!ext.delivery_bounds) return std::nullopt;
    for (Timestamp t = 0; t < run.horizon(); ++t) {
      for (const auto& hap : final_state.env.round_layer(t)) {
        const auto* recv = std::get_if<CorrectEvent>(&hap);
        if (!recv) continue;
        auto d = ext.delivery_bounds->delta(recv->gmi.sender,
                                            recv->gmi.recipient);
        if (d && recv->gmi.send_time + *d < t) {
          return "receive " + to_string(hap) + " in round " +
                 std::to_string(t) + " breaks the delivery bound";
        }
      }
    }
    return std::nullopt;
  }

  if (law == "multicast_pattern") {
    if (!ext.multicast) return std::nullopt;
    for (Timestamp t = 0; t < run.horizon(); ++t) {
      const HapSet& layer = final_state.env.round_layer(t);
      for (AgentId i = 1; i <= agents; ++i) {
        std::map<std::pair<Message, int>, std::set<AgentId>> recipients;
        for (const auto& hap : layer) {
          const auto* act = std::get_if<CorrectAction>(&hap);
          if (!act || act->agent != i || !act->gmi) continue;
          recipients[{act->gmi->msg, act->gmi->copy}].insert(
              act->gmi->recipient);
        }
        const auto& groups = ext.multicast->groups.at(static_cast<size_t>(i - 1));
        for (const auto& [key, rec] : recipients) {
          if (!rec.empty() && !groups.count(rec)) {
            return "agent " + std::to_string(i) + " round " +
                   std::to_string(t) + " addressed a non-channel group";
          }
        }
      }
    }
    return std::nullopt;
  }

  if (law == "same_round_broadcast") {
    for (Timestamp t = 0; t < run.horizon(); ++t) {
      const HapSet& layer = final_state.env.round_layer(t);
      for (AgentId i = 1; i <= agents; ++i) {
        if (agent_faulty_at(run.at(t + 1), i, t + 1)) continue;
        std::set<std::pair<Message, int>> sent;
        for (const auto& hap : layer) {
          const auto* act = std::get_if<CorrectAction>(&hap);
          if (act && act->agent == i && act->gmi) {
            sent.insert({act->gmi->msg, act->gmi->copy});
          }
        }
        for (const auto& [msg, copy] : sent) {
          for (AgentId j = 1; j <= agents; ++j) {
            Gmi gmi = make_gmi(i, j, msg, copy, t);
            bool send_present =
                layer.count(GlobalHap{to_global(
                    i, t, SendAction{j, msg, copy})}) > 0;
            bool recv_present = layer.count(make_delivery(gmi)) > 0;
            if (!send_present || !recv_present) {
              return "round " + std::to_string(t) + ": correct sender " +
                     std::to_string(i) + " message not " +
                     (send_present ? "received by" : "sent to") + " agent " +
                     std::to_string(j);
            }
          }
        }
      }
    }
    return std::nullopt;
  }

  return "unknown run law '" + law + "'";
}

// ---- composability table --------------------------------------------------------

Json composability_table_json() {
  Json labels = Json::array();
  for (auto c : all_impl_classes()) labels.push_back(to_string(c));
  Json rows = Json::array();
  for (auto left : all_impl_classes()) {
    Json row = Json::array();
    for (auto top : all_impl_classes()) {
      row.push_back(to_string(composability(left, top)));
    }
    rows.push_back(std::move(row));
  }
  return Json{{"classes", labels}, {"cells", rows}};
}

// ---- individual checks -----------------------------------------------------------

namespace {

std::vector<CheckResult> check_enumerate(const CheckSpec& spec,
                                         const Scenario& scenario,
                                         const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  RunSystem system = enumerate_runs(ctx, horizon,
                                    adversary_for(scenario, options),
                                    options.budget);
  int holds = 0, pending = 0, violated = 0;
  for (auto v : system.verdicts) {
    if (v == Verdict::Holds) ++holds;
    if (v == Verdict::Pending) ++pending;
    if (v == Verdict::Violated) ++violated;
  }
  CheckResult r;
  r.check = "enumerate";
  r.law = "run-system-enumeration";
  r.horizon = horizon;
  r.verdict = "pass";
  r.detail = std::to_string(system.runs.size()) + " runs (" +
             std::to_string(holds) + " holds, " + std::to_string(pending) +
             " pending, " + std::to_string(violated) + " violated)";
  if (options.emit_witnesses && spec.args.value("emit", true)) {
    r.witness = json_of(system);
  }
  if (spec.args.contains("expect_runs") &&
      spec.args.at("expect_runs").get<int>() !=
          static_cast<int>(system.runs.size())) {
    r.verdict = "fail";
    r.detail += "; expected " +
                std::to_string(spec.args.at("expect_runs").get<int>()) +
                " runs";
  }
  return {r};
}

std::vector<CheckResult> check_formula(const CheckSpec& spec,
                                       const Scenario& scenario,
                                       const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  RunSystem system =
      enumerate_runs(ctx, horizon, Adversary::exhaust(), options.budget);
  InterpretedSystem model = model_of(system);
  FormulaPtr formula = parse_formula(spec.args.at("formula").get<std::string>());
  if (auto bad = formula_alphabet_violation(*formula, ctx.params)) {
    throw ScenarioError("formula mentions a hap outside the scenario "
                        "alphabet: " + *bad);
  }
  std::string expect = spec.args.value("expect", std::string{"all_points"});

  long satisfied = 0, total = 0;
  std::optional<Point> counterexample;
  for (const auto& p : model.points()) {
    ++total;
    if (eval(model, p, formula)) {
      ++satisfied;
    } else if (!counterexample) {
      counterexample = p;
    }
  }
  bool pass = false;
  if (expect == "all_points") pass = satisfied == total;
  else if (expect == "some_point") pass = satisfied > 0;
  else if (expect == "no_point") pass = satisfied == 0;
  else throw ScenarioError("formula check: unknown expectation '" + expect + "'");

  CheckResult r;
  r.check = "formula";
  r.law = "epistemic-evaluation";
  r.horizon = horizon;
  r.verdict = verdict_str(pass);
  r.detail = formula->text() + " holds at " + std::to_string(satisfied) + "/" +
             std::to_string(total) + " points (expected " + expect + ")";
  if (!pass && counterexample) {
    r.witness = Json{{"run", counterexample->run}, {"t", counterexample->t}};
  }
  return {r};
}

std::vector<CheckResult> check_nsr_awareness(const CheckSpec&,
                                             const Scenario& scenario,
                                             const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  RunSystem system =
      enumerate_runs(ctx, horizon, Adversary::exhaust(), options.budget);
  InterpretedSystem model = model_of(system);
  CheckOutcome outcome = check_hope_nsr(model, ctx.params.agents);
  CheckResult r;
  r.check = "nsr_awareness";
  r.law = "synced-round-awareness";
  r.horizon = horizon;
  r.verdict = verdict_str(outcome.pass);
  r.detail = outcome.detail;
  return {r};
}

std::vector<CheckResult> check_brainvat(const CheckSpec& spec,
                                        const Scenario& scenario,
                                        const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  AgentId brain = spec.args.value("brain", 1);
  AgentId other = spec.args.value("other", brain == 1 ? 2 : 1);
  bool lockstep = scenario.extension_expr == "LSS" ||
                  spec.args.value("variant", std::string{}) == "lockstep";
  auto variant = lockstep ? BrainScenario::Variant::LockStep
                          : BrainScenario::Variant::Sync;

  std::vector<IgnoranceClaim> claims;
  if (!spec.args.contains("claims") ||
      spec.args.at("claims").is_string()) {
    claims = {IgnoranceClaim::OccurredCorrectly, IgnoranceClaim::SelfCorrect,
              IgnoranceClaim::OtherFaulty, IgnoranceClaim::OtherCorrect};
  } else {
    for (const auto& c : spec.args.at("claims")) {
      std::string name = c.get<std::string>();
      if (name == "occurred") claims.push_back(IgnoranceClaim::OccurredCorrectly);
      else if (name == "self_correct") claims.push_back(IgnoranceClaim::SelfCorrect);
      else if (name == "other_faulty") claims.push_back(IgnoranceClaim::OtherFaulty);
      else if (name == "other_correct") claims.push_back(IgnoranceClaim::OtherCorrect);
      else throw ScenarioError("brainvat: unknown claim '" + name + "'");
    }
  }

  std::vector<CheckResult> out;

  // capability preconditions, classified once
  {
    CheckResult r;
    r.check = "brainvat";
    r.law = "fault-capability-preconditions";
    r.horizon = horizon;
    auto brain_caps = classify_agent(ctx.env, brain, horizon);
    bool ok = brain_caps.count(FaultCapability::Gullible) > 0;
    std::string detail = "agent " + std::to_string(brain) +
                         (ok ? " gullible" : " NOT gullible");
    for (AgentId j = 1; j <= ctx.params.agents; ++j) {
      if (j == brain) continue;
      auto caps = classify_agent(ctx.env, j, horizon);
      bool d = caps.count(FaultCapability::Delayable) > 0;
      bool f = caps.count(FaultCapability::Fallible) > 0;
      ok = ok && d && f;
      detail += "; agent " + std::to_string(j) + (d ? " delayable" : " NOT delayable") +
                (f ? " fallible" : " NOT fallible");
    }
    r.verdict = verdict_str(ok);
    r.detail = detail;
    out.push_back(std::move(r));
    if (!ok) return out;
  }

  RunSystem system =
      enumerate_runs(ctx, horizon, Adversary::exhaust(), options.budget);

  std::vector<Timestamp> times;
  if (spec.args.contains("t") && spec.args.at("t").is_number()) {
    times.push_back(spec.args.at("t").get<int>());
  } else {
    for (Timestamp t = 0; t <= horizon; ++t) times.push_back(t);
  }

  // construction properties for every source run and positive time
  {
    CheckResult r;
    r.check = "brainvat";
    r.law = "brain-vat-construction";
    r.horizon = horizon;
    r.verdict = "pass";
    long checked = 0;
    for (const auto& run : system.runs) {
      for (Timestamp t : times) {
        if (t == 0) continue;
        BrainScenario sc;
        sc.brain = brain;
        sc.extent = t - 1;
        sc.variant = variant;
        for (AgentId j = 1; j <= ctx.params.agents; ++j) {
          if (j != brain) sc.others[j] = Intervention::Kind::Freeze;
        }
        Adjustment adj = brain_adjustment(sc, ctx.params.agents);
        auto mods =
            apply_adjustment(run, adj, ctx, horizon, Adversary::seeded(0, 1));
        BrainReport rep = verify_brain_properties(run, mods.front(), sc, ctx);
        ++checked;
        if (!rep.all_pass()) {
          r.verdict = "fail";
          for (const auto& p : rep.properties) {
            if (!p.pass) r.detail += p.name + ": " + p.detail + "; ";
          }
          if (r.witness.is_null()) r.witness = json_of(mods.front());
        }
      }
    }
    if (r.verdict == "pass") {
      r.detail = "vat properties hold for " + std::to_string(checked) +
                 " (run, time) constructions";
    }
    out.push_back(std::move(r));
  }

  for (auto claim : claims) {
    CheckResult r;
    r.check = "brainvat";
    r.law = "no-knowledge-of-" + to_string(claim);
    r.horizon = horizon;
    r.verdict = "pass";
    long confirmed = 0, total = 0;
    for (const auto& run : system.runs) {
      for (Timestamp t : times) {
        ++total;
        WitnessReport w = check_not_knows(ctx, run, t, claim, brain, other,
                                          variant, false);
        if (w.confirmed) {
          ++confirmed;
          if (r.witness.is_null() && options.emit_witnesses && w.witness) {
            r.witness = Json{{"witness_run", json_of(*w.witness)},
                             {"witness_time", w.witness_time},
                             {"detail", w.detail}};
          }
        } else {
          r.verdict = "fail";
          if (r.detail.empty()) {
            r.detail = "run " + std::to_string(&run - system.runs.data()) +
                       " t " + std::to_string(t) + ": " + w.detail;
          }
        }
      }
    }
    if (r.verdict == "pass") {
      r.detail = "ignorance confirmed with witnesses at " +
                 std::to_string(confirmed) + "/" + std::to_string(total) +
                 " points";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> check_fault_detection(const CheckSpec& spec,
                                               const Scenario& scenario,
                                               const RunOptions& options) {
  Timestamp horizon = horizon_for(scenario, options);
  AgentId observer = spec.args.value("observer", 1);
  AgentId suspect = spec.args.value("suspect", 2);
  CheckOutcome outcome = check_lss_fault_detection(scenario.params.agents,
                                                   horizon, observer, suspect);
  CheckResult r;
  r.check = "fault_detection";
  r.law = "hope-based-fault-detection";
  r.horizon = horizon;
  r.verdict = verdict_str(outcome.pass);
  r.detail = outcome.detail;
  return {r};
}

std::vector<CheckResult> check_run_invariants(const CheckSpec& spec,
                                              const Scenario& scenario,
                                              const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  Extension ext = build_extension(scenario.extension_expr, scenario.params);
  RunSystem system =
      enumerate_runs(ctx, horizon, Adversary::exhaust(), options.budget);

  std::vector<std::string> laws;
  if (spec.args.contains("laws")) {
    for (const auto& l : spec.args.at("laws")) {
      laws.push_back(l.get<std::string>());
    }
  } else {
    laws = ext.run_laws;
  }
  std::vector<CheckResult> out;
  for (const auto& law : laws) {
    CheckResult r;
    r.check = "run_invariants";
    r.law = law;
    r.horizon = horizon;
    r.verdict = "pass";
    for (size_t i = 0; i < system.runs.size(); ++i) {
      if (ctx.admissibility.kind == AdmissibilityCond::Kind::EDel &&
          system.verdicts[i] == Verdict::Violated) {
        continue;  // laws are claims about the admissible system
      }
      auto violation = scan_run_law(law, system.runs[i], ctx, ext);
      if (violation) {
        r.verdict = "fail";
        r.detail = "run " + std::to_string(i) + ": " + *violation;
        if (options.emit_witnesses) r.witness = json_of(system.runs[i]);
        break;
      }
    }
    if (r.verdict == "pass") {
      r.detail = "holds on all " + std::to_string(system.runs.size()) +
                 " enumerated runs";
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> check_filter_laws(const CheckSpec& spec,
                                           const Scenario& scenario,
                                           const RunOptions& options) {
  int count = spec.args.value("samples", 1000);
  std::uint64_t seed = spec.args.value("seed", 2024);
  auto samples = make_samples(scenario.params, seed, count);
  Timestamp horizon = horizon_for(scenario, options);

  std::vector<CheckResult> out;
  auto push = [&](const std::string& law, bool pass, const std::string& detail) {
    CheckResult r;
    r.check = "filter_laws";
    r.law = law;
    r.horizon = horizon;
    r.verdict = verdict_str(pass);
    r.detail = detail;
    out.push_back(std::move(r));
  };

  std::vector<EventFilter> evs{neutral_event(), causal_event(), sync_event()};
  std::vector<ActionFilter> acs{neutral_action(), standard_action()};
  bool basic = true;
  for (const auto& f : evs) basic = basic && check_basic_filter_property(f, samples);
  for (const auto& f : acs) basic = basic && check_basic_filter_property(f, samples);
  push("basic-filter-property", basic,
       "all built-in filters return subsets on " + std::to_string(count) +
           " samples");

  push("standard-action-idempotence",
       check_idempotent(standard_action(), samples),
       "applying the standard action filter twice equals once");

  bool neutral_id = true;
  for (const auto& f : evs) {
    auto left = compose_event(neutral_event(), f);
    auto right = compose_event(f, neutral_event());
    for (const auto& s : samples) {
      auto expect = f(s.state, s.x_env, s.x_agents);
      neutral_id = neutral_id && left(s.state, s.x_env, s.x_agents) == expect &&
                   right(s.state, s.x_env, s.x_agents) == expect;
      if (!neutral_id) break;
    }
  }
  push("neutral-composition-identity", neutral_id,
       "composing with the neutral filter changes nothing");

  {
    std::mt19937_64 rng(seed + 7);
    bool mono = check_monotone(sync_event(), samples, rng) &&
                check_monotone(standard_action(), samples, rng);
    push("monotone-over-coherent-domain", mono,
         "sync event and standard action filters are monotone");
  }

  {
    // the canonical order-sensitivity exhibit
    ModelParams params = scenario.params;
    if (params.messages.empty()) params.messages = {"m"};
    GlobalState h = make_initial_state(params.agents);
    Gmi gmi = make_gmi(1, 2, params.messages.front(), 0, 0);
    HapSet x_env = hap_set({make_system(1, SystemEventKind::Go),
                            make_delivery(gmi)});
    std::vector<HapSet> x_agents(static_cast<size_t>(params.agents));
    x_agents[0].insert(GlobalHap{
        to_global(1, 0, SendAction{2, params.messages.front(), 0})});
    auto causal_after_sync = compose_event(causal_event(), sync_event());
    auto sync_after_causal = compose_event(sync_event(), causal_event());
    HapSet strict = causal_after_sync(h, x_env, x_agents);
    HapSet loose = sync_after_causal(h, x_env, x_agents);
    bool pass = strict.empty() && loose == hap_set({make_delivery(gmi)});
    push("filter-order-sensitivity", pass,
         "sync-then-causal drops the unsupported receive; the reverse order "
         "keeps it");
  }
  return out;
}

std::vector<CheckResult> check_safety(const CheckSpec& spec,
                                      const Scenario& scenario,
                                      const RunOptions& options) {
  Timestamp horizon = horizon_for(scenario, options);
  int depth = spec.args.value("depth", 3);
  std::uint64_t seed = spec.args.value("seed", 99);
  ModelParams params = scenario.params;
  if (params.messages.empty()) params.messages = {"m"};

  struct Instance {
    SafetyProperty prop;
    bool expect_dc;
  };
  std::vector<Instance> instances;
  UpperBoundStructure loose;
  loose.fallback = 1;
  instances.push_back({safety_time_bounded(loose, params), true});
  instances.push_back(
      {safety_time_bounded(
           UpperBoundStructure::synchronous(all_channels(params.agents)),
           params),
       true});
  instances.push_back({safety_no_faults(params), true});
  instances.push_back({safety_requires_go1(params), false});

  std::vector<GlobalState> probes{make_initial_state(params.agents)};
  {
    PerformedTuple x;
    x.actions.resize(static_cast<size_t>(params.agents));
    for (AgentId i = 1; i <= params.agents; ++i) {
      x.events.insert(make_system(i, SystemEventKind::Go));
    }
    probes.push_back(update_global(probes.front(), x));
  }

  std::vector<CheckResult> out;
  for (const auto& inst : instances) {
    auto dc = check_downward_closed(inst.prop, probes, seed);
    CheckResult r;
    r.check = "safety";
    r.law = "downward-closure";
    r.horizon = horizon;
    r.verdict = verdict_str(dc.pass == inst.expect_dc);
    r.detail = inst.prop.name + ": " + dc.detail +
               (inst.expect_dc ? "" : " (expected to fail, and it does)");
    if (dc.pass != inst.expect_dc) {
      r.detail = inst.prop.name + ": downward closure " +
                 std::string(dc.pass ? "held" : "failed") + " unexpectedly";
    }
    out.push_back(std::move(r));
  }
  for (const auto& inst : instances) {
    auto attrs = check_safety_attributes(
        inst.prop, {make_initial_state(params.agents)}, depth);
    CheckResult r;
    r.check = "safety";
    r.law = "safety-property-attributes";
    r.horizon = horizon;
    r.verdict = verdict_str(attrs.pass);
    r.detail = attrs.detail;
    out.push_back(std::move(r));
  }
  {
    AgentContext ctx = context_for(scenario, options);
    RunSystem system =
        enumerate_runs(ctx, horizon, Adversary::exhaust(), options.budget);
    auto once = check_once_empty_stays_empty(safety_no_faults(params), system);
    CheckResult r;
    r.check = "safety";
    r.law = "once-empty-stays-empty";
    r.horizon = horizon;
    r.verdict = verdict_str(once.pass);
    r.detail = once.detail;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> check_non_excluding_spec(const CheckSpec& spec,
                                                  const Scenario& scenario,
                                                  const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  bool expect = spec.args.value("expect", true);
  bool actual = check_non_excluding(ctx, horizon, options.budget);
  CheckResult r;
  r.check = "non_excluding";
  r.law = "non-exclusion";
  r.horizon = horizon;
  r.verdict = verdict_str(actual == expect);
  r.detail = std::string("bounded non-exclusion ") +
             (actual ? "holds" : "fails") + " at horizon " +
             std::to_string(horizon) +
             (expect == actual ? "" : " contrary to expectation");
  return {r};
}

std::vector<CheckResult> check_classify(const CheckSpec& spec,
                                        const Scenario& scenario,
                                        const RunOptions& options) {
  AgentContext ctx = context_for(scenario, options);
  Timestamp horizon = horizon_for(scenario, options);
  AgentId agent = spec.args.at("agent").get<int>();
  auto caps = classify_agent(ctx.env, agent, horizon);
  std::set<std::string> names;
  for (auto c : caps) {
    names.insert(c == FaultCapability::Fallible    ? "fallible"
                 : c == FaultCapability::Delayable ? "delayable"
                                                   : "gullible");
  }
  std::set<std::string> expected;
  for (const auto& e : spec.args.value("expect", Json::array())) {
    expected.insert(e.get<std::string>());
  }
  CheckResult r;
  r.check = "classify";
  r.law = "fault-capability-classification";
  r.horizon = horizon;
  std::string got;
  for (const auto& n : names) got += n + " ";
  r.verdict = verdict_str(expected.empty() || expected == names);
  r.detail = "agent " + std::to_string(agent) + ": " +
             (got.empty() ? "none" : got);
  return {r};
}

std::vector<CheckResult> check_compose_validate(const CheckSpec& spec,
                                                const Scenario& scenario,
                                                const RunOptions& options) {
  Timestamp horizon = horizon_for(scenario, options);
  std::string expr = spec.args.value("expr", scenario.extension_expr);
  auto parts = extension_parts(expr, scenario.params);

  std::vector<CheckResult> out;
  {
    CompatReport compat = check_compatible(parts, scenario.params, horizon);
    CheckResult r;
    r.check = "compose";
    r.law = "extension-compatibility";
    r.horizon = horizon;
    r.verdict = verdict_str(compat.compatible);
    r.detail = compat.detail;
    out.push_back(std::move(r));
  }
  if (parts.size() >= 2) {
    CheckResult r;
    r.check = "compose";
    r.law = "composability-table";
    r.horizon = horizon;
    r.verdict = "pass";
    std::string cells;
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!parts[i].impl_class || !parts[i + 1].impl_class) continue;
      auto cell = composability(*parts[i].impl_class, *parts[i + 1].impl_class);
      cells += parts[i].name + "x" + parts[i + 1].name + "=" +
               (to_string(cell).empty() ? "none" : to_string(cell)) + " ";
      if (cell == Composability::None) r.verdict = "fail";
    }
    r.detail = "pairwise class composability: " + cells;
    out.push_back(std::move(r));
  }
  for (const auto& part : parts) {
    if (!part.impl_class) continue;
    auto problems = lint_impl_class(part, *part.impl_class, scenario.params,
                                    spec.args.value("seed", 5));
    CheckResult r;
    r.check = "compose";
    r.law = "implementation-class-lint";
    r.horizon = horizon;
    r.verdict = verdict_str(problems.empty());
    r.detail = part.name + " as " + to_string(*part.impl_class) +
               (problems.empty() ? ": clean" : ": " + problems.front());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckResult> check_matrix(const CheckSpec&, const Scenario&,
                                      const RunOptions&) {
  CheckResult r;
  r.check = "matrix";
  r.law = "composability-table";
  r.horizon = 0;
  r.verdict = "pass";
  r.detail = "17x17 implementation-class composability table";
  r.witness = composability_table_json();
  return {r};
}

}  // namespace

std::vector<CheckResult> run_check(const CheckSpec& spec,
                                   const Scenario& scenario,
                                   const RunOptions& options) {
  if (spec.kind == "enumerate") return check_enumerate(spec, scenario, options);
  if (spec.kind == "formula") return check_formula(spec, scenario, options);
  if (spec.kind == "nsr_awareness") {
    return check_nsr_awareness(spec, scenario, options);
  }
  if (spec.kind == "brainvat") return check_brainvat(spec, scenario, options);
  if (spec.kind == "fault_detection") {
    return check_fault_detection(spec, scenario, options);
  }
  if (spec.kind == "run_invariants") {
    return check_run_invariants(spec, scenario, options);
  }
  if (spec.kind == "filter_laws" || spec.kind == "filter_order_demo") {
    return check_filter_laws(spec, scenario, options);
  }
  if (spec.kind == "safety") return check_safety(spec, scenario, options);
  if (spec.kind == "non_excluding") {
    return check_non_excluding_spec(spec, scenario, options);
  }
  if (spec.kind == "classify") return check_classify(spec, scenario, options);
  if (spec.kind == "compose") {
    return check_compose_validate(spec, scenario, options);
  }
  if (spec.kind == "matrix") return check_matrix(spec, scenario, options);
  throw ScenarioError("unknown check kind '" + spec.kind + "'");
}

Report run_scenario_checks(const Scenario& scenario,
                           const RunOptions& options) {
  Report report;
  report.scenario = scenario.name;
  Adversary adv = adversary_for(scenario, options);
  report.exhaustive = adv.exhaustive;
  report.seed = adv.seed;
  report.horizon = horizon_for(scenario, options);
  for (const auto& spec : scenario.checks) {
    auto results = run_check(spec, scenario, options);
    report.results.insert(report.results.end(), results.begin(), results.end());
  }
  return report;
}

}  // namespace byzrun
