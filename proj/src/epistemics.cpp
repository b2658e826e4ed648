#include "byzrun/epistemics.hpp"

#include <algorithm>
#include <sstream>

namespace byzrun {

std::string DesignatedAtom::text() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Correct: os << "correct(" << agent << ")"; break;
    case Kind::CorrectAt: os << "correct(" << agent << "," << t << ")"; break;
    case Kind::FakeAt:
      os << "fake(" << agent << "," << t << "," << to_string(hap) << ")";
      break;
    case Kind::OccurredOkAt:
      os << "occurred_ok(" << agent << "," << t << "," << to_string(hap) << ")";
      break;
    case Kind::OccurredOkAgent:
      os << "occurred_ok(" << agent << "," << to_string(hap) << ")";
      break;
    case Kind::OccurredOkAny:
      os << "occurred_ok(" << to_string(hap) << ")";
      break;
    case Kind::OccurredAgent:
      os << "occurred(" << agent << "," << to_string(hap) << ")";
      break;
    case Kind::Nsr: os << "nsr(" << count << ")"; break;
  }
  return os.str();
}

std::string Formula::text() const {
  switch (kind) {
    case Kind::UserAtom: return atom;
    case Kind::Designated: return designated.text();
    case Kind::Not: return "!" + lhs->text();
    case Kind::And: return "(" + lhs->text() + " & " + rhs->text() + ")";
    case Kind::Know:
      return "K " + std::to_string(agent) + " (" + lhs->text() + ")";
  }
  return "?";
}

FormulaPtr f_user(std::string name) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::UserAtom;
  f->atom = std::move(name);
  return f;
}

FormulaPtr f_designated(DesignatedAtom atom) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Designated;
  f->designated = std::move(atom);
  return f;
}

FormulaPtr f_correct(AgentId i) {
  DesignatedAtom a;
  a.kind = DesignatedAtom::Kind::Correct;
  a.agent = i;
  return f_designated(a);
}

FormulaPtr f_faulty(AgentId i) { return f_not(f_correct(i)); }

FormulaPtr f_nsr(int l) {
  DesignatedAtom a;
  a.kind = DesignatedAtom::Kind::Nsr;
  a.count = l;
  return f_designated(a);
}

FormulaPtr f_occurred_ok(const LocalHap& o) {
  DesignatedAtom a;
  a.kind = DesignatedAtom::Kind::OccurredOkAny;
  a.hap = o;
  return f_designated(a);
}

FormulaPtr f_not(FormulaPtr f) {
  auto out = std::make_shared<Formula>();
  out->kind = Formula::Kind::Not;
  out->lhs = std::move(f);
  return out;
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  auto out = std::make_shared<Formula>();
  out->kind = Formula::Kind::And;
  out->lhs = std::move(a);
  out->rhs = std::move(b);
  return out;
}

FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return f_not(f_and(f_not(std::move(a)), f_not(std::move(b))));
}

FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return f_not(f_and(std::move(a), f_not(std::move(b))));
}

FormulaPtr f_know(AgentId i, FormulaPtr f) {
  auto out = std::make_shared<Formula>();
  out->kind = Formula::Kind::Know;
  out->agent = i;
  out->lhs = std::move(f);
  return out;
}

FormulaPtr f_belief(AgentId i, FormulaPtr f) {
  return f_know(i, f_implies(f_correct(i), std::move(f)));
}

FormulaPtr f_hope(AgentId i, FormulaPtr f) {
  return f_implies(f_correct(i), f_belief(i, std::move(f)));
}

// ---- parser -----------------------------------------------------------------

namespace {

struct FCursor {
  const std::string& text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("formula parse error at column " +
                                std::to_string(pos + 1) + " of '" + text +
                                "': " + what);
  }
  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
  }
  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }
  bool eat_arrow() {
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
      pos += 2;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_')) {
      ++pos;
    }
    if (pos == start) fail("expected identifier");
    return text.substr(start, pos - start);
  }
  int number() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    if (pos == start) fail("expected number");
    return std::stoi(text.substr(start, pos - start));
  }
  // the balanced-paren argument list after an atom head, split on top-level commas
  std::vector<std::string> args() {
    expect('(');
    std::vector<std::string> out;
    std::string current;
    int depth = 0;
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '(') ++depth;
      if (c == ')') {
        if (depth == 0) {
          ++pos;
          out.push_back(current);
          return out;
        }
        --depth;
      }
      if (c == ',' && depth == 0) {
        out.push_back(current);
        current.clear();
        ++pos;
        continue;
      }
      current += c;
      ++pos;
    }
    fail("unterminated argument list");
  }
};

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

FormulaPtr parse_impl(FCursor& c);

FormulaPtr parse_unary(FCursor& c) {
  c.skip_ws();
  if (c.eat('!')) return f_not(parse_unary(c));
  if (c.eat('(')) {
    FormulaPtr inner = parse_impl(c);
    c.expect(')');
    return inner;
  }
  size_t mark = c.pos;
  std::string head = c.ident();
  if ((head == "K" || head == "B" || head == "H")) {
    AgentId i = c.number();
    c.expect('(');
    FormulaPtr inner = parse_impl(c);
    c.expect(')');
    if (head == "K") return f_know(i, inner);
    if (head == "B") return f_belief(i, inner);
    return f_hope(i, inner);
  }
  if (head == "correct" || head == "faulty" || head == "fake" ||
      head == "occurred_ok" || head == "occurred" || head == "nsr") {
    auto args = c.args();
    DesignatedAtom a;
    if (head == "correct") {
      if (args.size() == 1) {
        a.kind = DesignatedAtom::Kind::Correct;
        a.agent = std::stoi(args[0]);
      } else if (args.size() == 2) {
        a.kind = DesignatedAtom::Kind::CorrectAt;
        a.agent = std::stoi(args[0]);
        a.t = std::stoi(args[1]);
      } else {
        c.fail("correct takes 1 or 2 arguments");
      }
      return f_designated(a);
    }
    if (head == "faulty") {
      if (args.size() != 1) c.fail("faulty takes 1 argument");
      return f_faulty(std::stoi(args[0]));
    }
    if (head == "fake") {
      if (args.size() != 3) c.fail("fake takes (agent, time, hap)");
      a.kind = DesignatedAtom::Kind::FakeAt;
      a.agent = std::stoi(args[0]);
      a.t = std::stoi(args[1]);
      a.hap = parse_local_hap(args[2]);
      return f_designated(a);
    }
    if (head == "occurred_ok") {
      if (args.size() == 1) {
        a.kind = DesignatedAtom::Kind::OccurredOkAny;
        a.hap = parse_local_hap(args[0]);
      } else if (args.size() == 2) {
        a.kind = DesignatedAtom::Kind::OccurredOkAgent;
        a.agent = std::stoi(args[0]);
        a.hap = parse_local_hap(args[1]);
      } else if (args.size() == 3) {
        a.kind = DesignatedAtom::Kind::OccurredOkAt;
        a.agent = std::stoi(args[0]);
        a.t = std::stoi(args[1]);
        a.hap = parse_local_hap(args[2]);
      } else {
        c.fail("occurred_ok takes 1, 2 or 3 arguments");
      }
      return f_designated(a);
    }
    if (head == "occurred") {
      if (args.size() != 2) c.fail("occurred takes (agent, hap)");
      a.kind = DesignatedAtom::Kind::OccurredAgent;
      a.agent = std::stoi(args[0]);
      a.hap = parse_local_hap(args[1]);
      return f_designated(a);
    }
    if (args.size() != 1 || !all_digits(args[0])) {
      c.fail("nsr takes a count");
    }
    a.kind = DesignatedAtom::Kind::Nsr;
    a.count = std::stoi(args[0]);
    return f_designated(a);
  }
  // plain user atom
  c.pos = mark;
  return f_user(c.ident());
}

FormulaPtr parse_conj(FCursor& c) {
  FormulaPtr out = parse_unary(c);
  while (c.eat('&')) out = f_and(out, parse_unary(c));
  return out;
}

FormulaPtr parse_impl(FCursor& c) {
  FormulaPtr lhs = parse_conj(c);
  if (c.eat_arrow()) return f_implies(lhs, parse_impl(c));
  return lhs;
}

}  // namespace

FormulaPtr parse_formula(const std::string& text) {
  FCursor c{text};
  FormulaPtr f = parse_impl(c);
  c.skip_ws();
  if (c.pos != text.size()) c.fail("trailing input");
  return f;
}

std::optional<std::string> formula_alphabet_violation(
    const Formula& f, const ModelParams& params) {
  if (f.kind == Formula::Kind::Designated) {
    const DesignatedAtom& a = f.designated;
    bool mentions_hap = a.kind == DesignatedAtom::Kind::FakeAt ||
                        a.kind == DesignatedAtom::Kind::OccurredOkAt ||
                        a.kind == DesignatedAtom::Kind::OccurredOkAgent ||
                        a.kind == DesignatedAtom::Kind::OccurredOkAny ||
                        a.kind == DesignatedAtom::Kind::OccurredAgent;
    if (mentions_hap) {
      std::vector<AgentId> owners;
      if (a.kind == DesignatedAtom::Kind::OccurredOkAny) {
        for (AgentId i = 1; i <= params.agents; ++i) owners.push_back(i);
      } else {
        owners.push_back(a.agent);
      }
      for (AgentId i : owners) {
        for (const auto& o : params.local_hap_alphabet(i)) {
          if (o == a.hap) return std::nullopt;
        }
      }
      return a.text();
    }
    return std::nullopt;
  }
  if (f.lhs) {
    if (auto v = formula_alphabet_violation(*f.lhs, params)) return v;
  }
  if (f.rhs) {
    if (auto v = formula_alphabet_violation(*f.rhs, params)) return v;
  }
  return std::nullopt;
}

// ---- models and evaluation ----------------------------------------------------

std::vector<Point> InterpretedSystem::points() const {
  std::vector<Point> out;
  for (size_t r = 0; r < runs.size(); ++r) {
    for (Timestamp t = 0; t <= runs[r].horizon(); ++t) {
      out.push_back({static_cast<int>(r), t});
    }
  }
  return out;
}

InterpretedSystem model_of(const RunSystem& system, bool drop_violated_runs) {
  InterpretedSystem model;
  model.horizon = system.horizon;
  for (size_t r = 0; r < system.runs.size(); ++r) {
    if (drop_violated_runs && system.verdicts.at(r) == Verdict::Violated) {
      continue;
    }
    model.runs.push_back(system.runs[r]);
  }
  return model;
}

bool indistinguishable(const InterpretedSystem& model, AgentId i,
                       const Point& a, const Point& b) {
  return model.state(a).local(i) == model.state(b).local(i);
}

namespace {

bool eval_designated(const InterpretedSystem& model, const Point& p,
                     const DesignatedAtom& a) {
  const Run& run = model.runs.at(static_cast<size_t>(p.run));
  const GlobalState& state = model.state(p);
  switch (a.kind) {
    case DesignatedAtom::Kind::Correct:
      return !agent_faulty_at(state, a.agent, p.t);
    case DesignatedAtom::Kind::CorrectAt:
      return !agent_faulty_at(state, a.agent, std::min(a.t, p.t));
    case DesignatedAtom::Kind::FakeAt:
      return a.t <= p.t && caused_faultily(run, a.agent, a.t, a.hap);
    case DesignatedAtom::Kind::OccurredOkAt:
      return a.t <= p.t && caused_correctly(run, a.agent, a.t, a.hap);
    case DesignatedAtom::Kind::OccurredOkAgent:
      for (Timestamp m = 1; m <= p.t; ++m) {
        if (caused_correctly(run, a.agent, m, a.hap)) return true;
      }
      return false;
    case DesignatedAtom::Kind::OccurredOkAny:
      for (AgentId i = 1; i <= state.agent_count(); ++i) {
        for (Timestamp m = 1; m <= p.t; ++m) {
          if (caused_correctly(run, i, m, a.hap)) return true;
        }
      }
      return false;
    case DesignatedAtom::Kind::OccurredAgent:
      for (Timestamp m = 1; m <= p.t; ++m) {
        if (caused_correctly(run, a.agent, m, a.hap)) return true;
        if (caused_faultily(run, a.agent, m, a.hap)) return true;
      }
      return false;
    case DesignatedAtom::Kind::Nsr:
      return synced_rounds(state) == a.count;
  }
  return false;
}

}  // namespace

bool eval(const InterpretedSystem& model, const Point& p, const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::UserAtom: {
      auto it = model.valuation.find(f.atom);
      return it != model.valuation.end() && it->second.count(p) > 0;
    }
    case Formula::Kind::Designated:
      return eval_designated(model, p, f.designated);
    case Formula::Kind::Not:
      return !eval(model, p, *f.lhs);
    case Formula::Kind::And:
      return eval(model, p, *f.lhs) && eval(model, p, *f.rhs);
    case Formula::Kind::Know: {
      const LocalHistory& here = model.state(p).local(f.agent);
      for (const auto& q : model.points()) {
        if (model.state(q).local(f.agent) == here &&
            !eval(model, q, *f.lhs)) {
          return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool eval(const InterpretedSystem& model, const Point& p,
          const FormulaPtr& f) {
  return eval(model, p, *f);
}

// ---- ignorance claims -----------------------------------------------------------

std::string to_string(IgnoranceClaim c) {
  switch (c) {
    case IgnoranceClaim::OccurredCorrectly: return "occurred";
    case IgnoranceClaim::SelfCorrect: return "self_correct";
    case IgnoranceClaim::OtherFaulty: return "other_faulty";
    case IgnoranceClaim::OtherCorrect: return "other_correct";
  }
  return "?";
}

namespace {

// Does the negated-claim body hold at (run, t)? These are the facts the
// witness point must refute.
bool claim_refuted_at(const Run& run, Timestamp t, IgnoranceClaim claim,
                      AgentId brain, AgentId other, const ModelParams& params) {
  const GlobalState& state = run.at(t);
  switch (claim) {
    case IgnoranceClaim::OccurredCorrectly:
      for (AgentId i = 1; i <= params.agents; ++i) {
        for (const auto& o : params.local_hap_alphabet(i)) {
          for (Timestamp m = 1; m <= t; ++m) {
            if (caused_correctly(run, i, m, o)) return false;
          }
        }
      }
      return true;
    case IgnoranceClaim::SelfCorrect:
      return agent_faulty_at(state, brain, t);
    case IgnoranceClaim::OtherFaulty:
      return !agent_faulty_at(state, other, t);
    case IgnoranceClaim::OtherCorrect:
      return agent_faulty_at(state, other, t);
  }
  return false;
}

}  // namespace

WitnessReport check_not_knows(const AgentContext& ctx, const Run& run,
                              Timestamp t, IgnoranceClaim claim,
                              AgentId brain, AgentId other,
                              BrainScenario::Variant variant,
                              bool check_preconditions) {
  WitnessReport report;
  report.claim = to_string(claim);
  report.at = Point{-1, t};

  if (check_preconditions) {
    auto brain_caps = classify_agent(ctx.env, brain, ctx.params.horizon);
    if (!brain_caps.count(FaultCapability::Gullible)) {
      report.detail = "the environment protocol does not make agent " +
                      std::to_string(brain) + " gullible";
      return report;
    }
    for (AgentId j = 1; j <= ctx.params.agents; ++j) {
      if (j == brain) continue;
      auto caps = classify_agent(ctx.env, j, ctx.params.horizon);
      if (!caps.count(FaultCapability::Delayable)) {
        report.detail = "agent " + std::to_string(j) + " is not delayable";
        return report;
      }
      if (claim == IgnoranceClaim::OtherCorrect && j == other &&
          !caps.count(FaultCapability::Fallible)) {
        report.detail = "agent " + std::to_string(j) + " is not fallible";
        return report;
      }
    }
  }

  Timestamp horizon = std::max<Timestamp>(run.horizon(), t);

  if (t == 0) {
    switch (claim) {
      case IgnoranceClaim::OccurredCorrectly:
      case IgnoranceClaim::OtherFaulty:
        // refuted at the source point itself: nothing has happened by time 0
        if (claim_refuted_at(run, 0, claim, brain, other, ctx.params)) {
          report.confirmed = true;
          report.witness = run;
          report.witness_time = 0;
          report.detail = "refuted at the run itself at time 0";
        } else {
          report.detail = "claim unexpectedly holds at time 0";
        }
        return report;
      case IgnoranceClaim::SelfCorrect:
      case IgnoranceClaim::OtherCorrect: {
        // delay the brain for one round; the witness lives at time 1
        Adjustment adj =
            claim == IgnoranceClaim::SelfCorrect
                ? delay_adjustment_faulty_brain(brain, ctx.params.agents)
                : delay_adjustment_faulty_other(brain, other,
                                                ctx.params.agents);
        auto mods = apply_adjustment(run, adj, ctx, horizon,
                                     Adversary::seeded(0, 1));
        const Run& vat = mods.front();
        bool indist = vat.at(1).local(brain) == run.at(0).local(brain);
        bool refuted = claim_refuted_at(vat, 1, claim, brain, other, ctx.params);
        bool transitional = true;
        for (Timestamp m = 0; m < vat.horizon(); ++m) {
          transitional = transitional &&
                         is_transition(ctx, vat.at(m), vat.at(m + 1), m);
        }
        bool admissible = check_admissibility(vat, ctx.admissibility) !=
                          Verdict::Violated;
        report.confirmed = indist && refuted && transitional && admissible;
        report.witness = vat;
        report.witness_time = 1;
        report.detail = report.confirmed
                            ? "one-round delay reduction"
                            : std::string("delay reduction failed: ") +
                                  (!indist        ? "distinguishable"
                                   : !refuted     ? "claim not refuted"
                                   : !transitional ? "not transitional"
                                                   : "not admissible");
        return report;
      }
    }
  }

  BrainScenario scenario;
  scenario.brain = brain;
  scenario.extent = t - 1;
  scenario.variant = variant;
  for (AgentId j = 1; j <= ctx.params.agents; ++j) {
    if (j == brain) continue;
    scenario.others[j] = (claim == IgnoranceClaim::OtherCorrect && j == other)
                             ? Intervention::Kind::FFreeze
                             : Intervention::Kind::Freeze;
  }
  Adjustment adj = brain_adjustment(scenario, ctx.params.agents);
  auto mods = apply_adjustment(run, adj, ctx, horizon, Adversary::seeded(0, 1));
  const Run& vat = mods.front();

  BrainReport props = verify_brain_properties(run, vat, scenario, ctx);
  bool refuted = claim_refuted_at(vat, t, claim, brain, other, ctx.params);
  bool indist = vat.at(t).local(brain) == run.at(t).local(brain);

  report.confirmed = props.all_pass() && refuted && indist;
  report.witness = vat;
  report.witness_time = t;
  if (report.confirmed) {
    report.detail = "vat run indistinguishable for agent " +
                    std::to_string(brain) + " refutes the claim";
  } else {
    std::string why;
    for (const auto& p : props.properties) {
      if (!p.pass) why += p.name + "; ";
    }
    if (!refuted) why += "claim not refuted at witness; ";
    if (!indist) why += "witness distinguishable; ";
    report.detail = "construction failed: " + why;
  }
  return report;
}

// ---- synced-round awareness --------------------------------------------------

CheckOutcome check_hope_nsr(const InterpretedSystem& model, int agents) {
  CheckOutcome out;
  out.pass = true;
  for (const auto& p : model.points()) {
    int nsr = synced_rounds(model.state(p));
    for (AgentId k = 1; k <= agents; ++k) {
      ++out.points_checked;
      if (!eval(model, p, f_hope(k, f_nsr(nsr)))) {
        out.pass = false;
        out.detail = "agent " + std::to_string(k) +
                     " fails to infer the synced-round count " +
                     std::to_string(nsr) + " at run " + std::to_string(p.run) +
                     " time " + std::to_string(p.t);
        return out;
      }
    }
  }
  out.detail = "hope-of-synced-round-count holds at every point (" +
               std::to_string(out.points_checked) + " checks)";
  return out;
}

// ---- lock-step fault detection -------------------------------------------------

CheckOutcome check_lss_fault_detection(int agents, Timestamp horizon,
                                       AgentId observer, AgentId suspect) {
  CheckOutcome out;
  ModelParams params;
  params.agents = agents;
  params.messages = {"m"};
  params.max_copies = 1;
  params.horizon = horizon;

  EnvProtocol env;
  env.params = params;
  EnvRule rule;
  rule.when_time = -1;
  rule.choices.push_back({"@go_all", "@deliver_all_same_round"});
  rule.choices.push_back({"@go_all_except(" + std::to_string(suspect) + ")",
                          "sleep(" + std::to_string(suspect) + ")",
                          "@deliver_all_same_round"});
  env.rules.push_back(rule);

  AgentContext ctx;
  ctx.env = env;
  ctx.initial_states = {make_initial_state(agents)};
  ctx.templ = TransitionTemplate{compose_event(causal_event(), sync_event()),
                                 standard_action()};
  ctx.admissibility = AdmissibilityCond::edel(
      all_channels(agents), UpperBoundStructure::synchronous(all_channels(agents)));
  ctx.joint.assign(static_cast<size_t>(agents), broadcast_all_protocol());
  ctx.params = params;

  RunSystem system = enumerate_runs(ctx, horizon, Adversary::exhaust(), 100000);
  InterpretedSystem model = model_of(system);

  int silenced_run = -1;
  int clean_run = -1;
  for (size_t r = 0; r < model.runs.size(); ++r) {
    const HapSet& layer0 = model.runs[r].at(1).env.round_layer(0);
    bool silenced =
        layer0.count(make_system(suspect, SystemEventKind::Sleep)) > 0;
    bool all_go = true;
    for (AgentId i = 1; i <= agents; ++i) {
      all_go = all_go && layer0.count(make_system(i, SystemEventKind::Go)) > 0;
    }
    if (silenced && silenced_run < 0) silenced_run = static_cast<int>(r);
    if (all_go && clean_run < 0) clean_run = static_cast<int>(r);
  }
  if (silenced_run < 0 || clean_run < 0) {
    out.detail = "expected runs missing from the enumerated system";
    return out;
  }
  FormulaPtr hope = f_hope(observer, f_faulty(suspect));
  bool at_silenced = eval(model, Point{silenced_run, 1}, hope);
  bool at_clean = eval(model, Point{clean_run, 1}, hope);
  out.points_checked = 2;
  out.pass = at_silenced && !at_clean;
  out.detail = std::string("hope-of-faultiness ") +
               (at_silenced ? "holds" : "fails") + " at the silenced point and " +
               (at_clean ? "holds" : "fails") + " at the fault-free sibling";
  return out;
}

}  // namespace byzrun
