#include <doctest.h>

#include <stdexcept>

#include "byzrun/epistemics.hpp"
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

AgentContext sync_brain_context(const ModelParams& params) {
  AgentContext ctx;
  ctx.params = params;
  ctx.env.params = params;
  ctx.env.rules.push_back(EnvRule{-1, {{"@go_all"}, {}}});
  ctx.env.caps.gullible.insert(1);
  ctx.env.caps.delayable = {1, 2};
  ctx.env.caps.fallible = {2};
  ctx.initial_states = {make_initial_state(2)};
  Extension s = ext_synchronous(params);
  ctx.templ = template_of(s);
  ctx.admissibility = s.admissibility;
  AgentProtocol chooser;
  chooser.kind = AgentProtocol::Kind::Table;
  chooser.rules.push_back(ProtocolRule{
      -1, {{TickAction{}}, {TickAction{}, SendAction{2, "m", 0}}}});
  ctx.joint = {chooser, silent_tick_protocol()};
  return ctx;
}

}  // namespace

TEST_CASE("formula parsing and printing") {
  CHECK(parse_formula("correct(1)")->text() == "correct(1)");
  CHECK(parse_formula("faulty(2)")->text() == "!correct(2)");
  CHECK(parse_formula("nsr(3)")->text() == "nsr(3)");
  CHECK(parse_formula("occurred_ok(tick)")->text() == "occurred_ok(tick)");
  CHECK(parse_formula("occurred_ok(2,recv(1,m))")->kind ==
        Formula::Kind::Designated);
  CHECK(parse_formula("K 1 (p & !q)")->kind == Formula::Kind::Know);
  CHECK_NOTHROW(parse_formula("H 1 (nsr(0))"));
  CHECK_NOTHROW(parse_formula("B 2 (correct(1) -> occurred(1,tick))"));
  CHECK_NOTHROW(parse_formula("fake(1,2,send(2,m,0))"));
  CHECK_THROWS_AS(parse_formula("K (p)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_formula("correct(1) &"), std::invalid_argument);
}

TEST_CASE("boolean and knowledge clauses on a tiny model") {
  AgentContext ctx = sync_brain_context(small_params());
  RunSystem system = enumerate_runs(ctx, 2, Adversary::exhaust());
  InterpretedSystem model = model_of(system);
  REQUIRE(!model.runs.empty());

  // a single-point restriction: K collapses to truth
  InterpretedSystem single;
  single.horizon = 0;
  Run stub;
  stub.states.push_back(ctx.initial_states.front());
  single.runs.push_back(stub);
  single.valuation["p"] = {Point{0, 0}};
  Point origin{0, 0};
  CHECK(eval(single, origin, parse_formula("p")));
  CHECK(eval(single, origin, parse_formula("K 1 (p)")));
  CHECK(eval(single, origin, parse_formula("!q")));
  CHECK(eval(single, origin, parse_formula("q -> p")));
  CHECK_FALSE(eval(single, origin, parse_formula("p & q")));

  // knowledge respects indistinguishability across the real model
  for (const auto& p : model.points()) {
    CHECK(eval(model, p, f_know(1, f_correct(2))) ==
          eval(model, p, f_know(1, f_correct(2))));
    if (eval(model, p, f_know(1, f_correct(2)))) {
      CHECK(eval(model, p, f_correct(2)));  // knowledge is factive
    }
  }
}

TEST_CASE("designated atoms read the round records") {
  AgentContext ctx = sync_brain_context(small_params());
  RunSystem system = enumerate_runs(ctx, 2, Adversary::exhaust());
  InterpretedSystem model = model_of(system);

  // find the run where agent 1 ticked and sent in round 0 (env all-go)
  int busy = -1;
  for (size_t r = 0; r < model.runs.size(); ++r) {
    const auto& rec = model.runs[r].rounds.front();
    if (rec.performed_of(1).size() == 2) {
      busy = static_cast<int>(r);
      break;
    }
  }
  REQUIRE(busy >= 0);
  Point p{busy, 1};
  CHECK(eval(model, p, parse_formula("occurred_ok(tick)")));
  CHECK(eval(model, p, parse_formula("occurred_ok(1,tick)")));
  CHECK(eval(model, p, parse_formula("occurred_ok(1,1,tick)")));
  // the menu delivers nothing in this context, so no receive occurred
  CHECK_FALSE(eval(model, p, parse_formula("occurred_ok(2,recv(1,m))")));
  CHECK(eval(model, p, parse_formula("occurred(1,send(2,m,0))")));
  CHECK_FALSE(eval(model, p, parse_formula("fake(1,1,tick)")));
  CHECK(eval(model, p, parse_formula("correct(1) & correct(2)")));
  CHECK(eval(model, p, parse_formula("nsr(1)")));
  CHECK_FALSE(eval(model, p, parse_formula("nsr(0)")));
  Point origin{busy, 0};
  CHECK_FALSE(eval(model, origin, parse_formula("occurred_ok(tick)")));
}

TEST_CASE("the vat witness refutes knowledge of correct occurrence") {
  AgentContext ctx = sync_brain_context(small_params());
  RunSystem system = enumerate_runs(ctx, 3, Adversary::exhaust());
  const Run& source = system.runs.front();

  WitnessReport w =
      check_not_knows(ctx, source, 2, IgnoranceClaim::OccurredCorrectly, 1, 2,
                      BrainScenario::Variant::Sync);
  CHECK(w.confirmed);
  REQUIRE(w.witness.has_value());

  // assemble the two-point model and evaluate the knowledge claim directly
  InterpretedSystem model = model_of(system);
  int vat_index = static_cast<int>(model.runs.size());
  model.runs.push_back(*w.witness);
  Point original{0, 2};
  Point vat{vat_index, 2};
  CHECK(indistinguishable(model, 1, original, vat));
  for (const auto& o : ctx.params.local_hap_alphabet(1)) {
    CHECK_FALSE(eval(model, original, f_know(1, f_occurred_ok(o))));
  }
  // the vat point itself falsifies the brain's correctness
  CHECK_FALSE(eval(model, vat, f_correct(1)));
  // a frozen bystander with a non-trivial source history can distinguish
  if (!(source.at(2).local(2) == source.at(0).local(2))) {
    CHECK_FALSE(indistinguishable(model, 2, original, vat));
  }
}

TEST_CASE("all four ignorance claims with the time-zero reductions") {
  AgentContext ctx = sync_brain_context(small_params());
  RunSystem system = enumerate_runs(ctx, 3, Adversary::exhaust());
  for (auto claim :
       {IgnoranceClaim::OccurredCorrectly, IgnoranceClaim::SelfCorrect,
        IgnoranceClaim::OtherFaulty, IgnoranceClaim::OtherCorrect}) {
    for (Timestamp t = 0; t <= 3; ++t) {
      WitnessReport w = check_not_knows(ctx, system.runs.back(), t, claim, 1, 2,
                                        BrainScenario::Variant::Sync);
      INFO(to_string(claim), " at t=", t, ": ", w.detail);
      CHECK(w.confirmed);
    }
  }
}

TEST_CASE("precondition failures are explained") {
  AgentContext ctx = sync_brain_context(small_params());
  ctx.env.caps.gullible.clear();  // brain no longer gullible
  RunSystem system = enumerate_runs(ctx, 2, Adversary::exhaust());
  WitnessReport w =
      check_not_knows(ctx, system.runs.front(), 1,
                      IgnoranceClaim::SelfCorrect, 1, 2,
                      BrainScenario::Variant::Sync);
  CHECK_FALSE(w.confirmed);
  CHECK(w.detail.find("gullible") != std::string::npos);
}

TEST_CASE("hope of the synced-round count holds across a branching system") {
  AgentContext ctx = sync_brain_context(small_params());
  RunSystem system = enumerate_runs(ctx, 3, Adversary::exhaust());
  InterpretedSystem model = model_of(system);
  CheckOutcome outcome = check_hope_nsr(model, 2);
  INFO(outcome.detail);
  CHECK(outcome.pass);

  // the count is unique: hoping for the wrong count fails at correct points
  Point someplace{0, 3};
  int actual = synced_rounds(model.state(someplace));
  CHECK(eval(model, someplace, f_hope(2, f_nsr(actual))));
  CHECK_FALSE(eval(model, someplace, f_hope(2, f_nsr(actual + 1))));
}

TEST_CASE("lock-step fault detection by hope") {
  CheckOutcome outcome = check_lss_fault_detection(2, 2, 1, 2);
  INFO(outcome.detail);
  CHECK(outcome.pass);

  CheckOutcome three = check_lss_fault_detection(3, 2, 1, 3);
  INFO(three.detail);
  CHECK(three.pass);
}

TEST_CASE("hope is vacuous for the faulty hoper") {
  // reconstruct the fault-detection model and evaluate at the silenced point
  ModelParams params = small_params();
  EnvProtocol env;
  env.params = params;
  EnvRule rule;
  rule.choices.push_back({"@go_all", "@deliver_all_same_round"});
  rule.choices.push_back(
      {"@go_all_except(2)", "sleep(2)", "@deliver_all_same_round"});
  env.rules.push_back(rule);
  AgentContext ctx;
  ctx.env = env;
  ctx.params = params;
  ctx.initial_states = {make_initial_state(2)};
  Extension lss = ext_lockstep(params);
  ctx.templ = template_of(lss);
  ctx.admissibility = lss.admissibility;
  ctx.joint = JointProtocol(2, broadcast_all_protocol());
  RunSystem system = enumerate_runs(ctx, 2, Adversary::exhaust());
  InterpretedSystem model = model_of(system);
  for (size_t r = 0; r < model.runs.size(); ++r) {
    Point p{static_cast<int>(r), 1};
    if (agent_faulty_at(model.state(p), 2, 1)) {
      CHECK(eval(model, p, f_hope(2, f_faulty(1))));  // antecedent fails
      CHECK(eval(model, p, f_hope(1, f_faulty(2))));  // the detection itself
    }
  }
}

TEST_CASE("knowledge verdicts agree across indistinguishable points") {
  AgentContext ctx = sync_brain_context(small_params());
  RunSystem system = enumerate_runs(ctx, 2, Adversary::exhaust());
  InterpretedSystem model = model_of(system);
  FormulaPtr claim = f_know(1, f_correct(2));
  auto points = model.points();
  for (const auto& p : points) {
    for (const auto& q : points) {
      if (indistinguishable(model, 1, p, q)) {
        CHECK(eval(model, p, claim) == eval(model, q, claim));
      }
    }
  }
}

TEST_CASE("formulas over foreign haps are flagged") {
  ModelParams params = small_params();
  FormulaPtr good = parse_formula("occurred_ok(tick)");
  CHECK_FALSE(formula_alphabet_violation(*good, params).has_value());
  FormulaPtr bad = parse_formula("K 1 (occurred_ok(recv(9,zz)))");
  REQUIRE(formula_alphabet_violation(*bad, params).has_value());
  CHECK(formula_alphabet_violation(*bad, params)->find("zz") !=
        std::string::npos);
}
