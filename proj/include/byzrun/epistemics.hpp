#pragma once

#include <memory>

#include "byzrun/adjustments.hpp"

namespace byzrun {

// ---- designated atoms -----------------------------------------------------

struct DesignatedAtom {
  enum class Kind {
    Correct,          // correct(i): no fault event for i so far
    CorrectAt,        // correct(i,t): none by time t
    FakeAt,           // fake(i,t,o): o entered i's history faultily in round t-1
    OccurredOkAt,     // occurred_ok(i,t,o)
    OccurredOkAgent,  // occurred_ok(i,o): some round so far
    OccurredOkAny,    // occurred_ok(o): some agent
    OccurredAgent,    // occurred(i,o): correctly or faultily
    Nsr,              // nsr(l): exactly l synced rounds elapsed
  };
  Kind kind = Kind::Correct;
  AgentId agent = 0;
  Timestamp t = 0;
  LocalHap hap;
  int count = 0;

  std::string text() const;
};

// ---- formulas ---------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { UserAtom, Designated, Not, And, Know };
  Kind kind = Kind::UserAtom;
  std::string atom;
  DesignatedAtom designated;
  AgentId agent = 0;  // Know
  FormulaPtr lhs, rhs;

  std::string text() const;
};

FormulaPtr f_user(std::string name);
FormulaPtr f_designated(DesignatedAtom atom);
FormulaPtr f_correct(AgentId i);
FormulaPtr f_faulty(AgentId i);  // shorthand for !correct(i)
FormulaPtr f_nsr(int l);
FormulaPtr f_occurred_ok(const LocalHap& o);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_know(AgentId i, FormulaPtr f);
// belief: knowledge under the assumption of own correctness
FormulaPtr f_belief(AgentId i, FormulaPtr f);
// hope: correct(i) -> B_i(f)
FormulaPtr f_hope(AgentId i, FormulaPtr f);

// Surface syntax: `K 1 (phi)`, `B 2 (phi)`, `H 1 (phi)`, `!`, `&`, `->`,
// `correct(i)`, `correct(i,t)`, `faulty(i)`, `fake(i,t,o)`, `occurred_ok(o)`,
// `occurred_ok(i,o)`, `occurred_ok(i,t,o)`, `occurred(i,o)`, `nsr(l)`,
// other identifiers are user atoms.
FormulaPtr parse_formula(const std::string& text);

// Every hap mentioned by a designated atom must come from the scenario's
// local alphabet; returns the offending atom text otherwise.
std::optional<std::string> formula_alphabet_violation(const Formula& f,
                                                      const ModelParams& params);

// ---- interpreted systems ----------------------------------------------------

struct Point {
  int run = 0;
  Timestamp t = 0;
  bool operator==(const Point&) const = default;
  bool operator<(const Point& o) const {
    return std::tie(run, t) < std::tie(o.run, o.t);
  }
};

// The finite Kripke model: a set of runs (the enumerated system plus any
// adjustment-built witnesses) with points (run, time).
struct InterpretedSystem {
  std::vector<Run> runs;
  Timestamp horizon = 0;
  // user atom -> points where it holds
  std::map<std::string, std::set<Point>> valuation;

  std::vector<Point> points() const;
  const GlobalState& state(const Point& p) const {
    return runs.at(static_cast<size_t>(p.run)).at(p.t);
  }
};

InterpretedSystem model_of(const RunSystem& system,
                           bool drop_violated_runs = true);

bool indistinguishable(const InterpretedSystem& model, AgentId i,
                       const Point& a, const Point& b);

bool eval(const InterpretedSystem& model, const Point& p, const Formula& f);
bool eval(const InterpretedSystem& model, const Point& p, const FormulaPtr& f);

// ---- headline checkers -------------------------------------------------------

struct WitnessReport {
  bool confirmed = false;
  std::string claim;
  std::string detail;
  Point at;            // the point the claim was checked at
  std::optional<Run> witness;  // the indistinguishable counterexample run
  Timestamp witness_time = 0;
};

enum class IgnoranceClaim {
  OccurredCorrectly,  // not K_i occurred_ok(o), for every o
  SelfCorrect,        // not K_i correct(i)
  OtherFaulty,        // not K_i faulty(j)
  OtherCorrect,       // not K_i correct(j)
};
std::string to_string(IgnoranceClaim c);

// Construct the vat run appropriate for the claim at (run, t), check the
// construction properties, and confirm the negated knowledge claim there.
// Callers that already verified the capability preconditions can skip the
// (comparatively costly) reclassification.
WitnessReport check_not_knows(const AgentContext& ctx, const Run& run,
                              Timestamp t, IgnoranceClaim claim,
                              AgentId brain, AgentId other,
                              BrainScenario::Variant variant,
                              bool check_preconditions = true);

struct CheckOutcome {
  bool pass = false;
  std::string detail;
  long points_checked = 0;
};

// Every agent can infer the synced-round count under the hope modality, at
// every point of the model.
CheckOutcome check_hope_nsr(const InterpretedSystem& model, int agents);

// Broadcast-every-round lock-step context with one silenced agent: the
// observer's hope of the silenced agent's faultiness holds at the
// constructed point and fails on the fault-free sibling.
CheckOutcome check_lss_fault_detection(int agents, Timestamp horizon,
                                       AgentId observer, AgentId suspect);

}  // namespace byzrun
