#include "byzrun/haps.hpp"

#include <sstream>
#include <stdexcept>
#include <tuple>

namespace byzrun {

bool is_send(const LocalAction& a) {
  return std::holds_alternative<SendAction>(a);
}

bool is_tick(const LocalAction& a) {
  return std::holds_alternative<TickAction>(a);
}

Gmi make_gmi(AgentId sender, AgentId recipient, const Message& msg, int copy,
             Timestamp send_time) {
  return Gmi{sender, recipient, msg, copy, send_time};
}

AgentId agent_of(const GlobalHap& hap) {
  return std::visit([](const auto& h) { return h.agent; }, hap);
}

bool is_correct_action(const GlobalHap& hap) {
  return std::holds_alternative<CorrectAction>(hap);
}

bool is_correct_event(const GlobalHap& hap) {
  return std::holds_alternative<CorrectEvent>(hap);
}

bool is_system_event(const GlobalHap& hap) {
  return std::holds_alternative<SystemEvent>(hap);
}

bool is_byz_event(const GlobalHap& hap) {
  return std::holds_alternative<ByzEvent>(hap) ||
         std::holds_alternative<ByzAction>(hap);
}

bool is_event(const GlobalHap& hap) { return !is_correct_action(hap); }

bool is_fault_event(const GlobalHap& hap) {
  if (is_byz_event(hap)) return true;
  if (const auto* s = std::get_if<SystemEvent>(&hap)) {
    return s->kind == SystemEventKind::Sleep ||
           s->kind == SystemEventKind::Hibernate;
  }
  return false;
}

bool is_fail(const GlobalHap& hap) {
  const auto* b = std::get_if<ByzAction>(&hap);
  return b && !b->performed && !b->recorded;
}

std::optional<Gmi> performed_send_gmi(const GlobalHap& hap) {
  if (const auto* a = std::get_if<CorrectAction>(&hap)) return a->gmi;
  if (const auto* b = std::get_if<ByzAction>(&hap)) {
    if (b->performed) return b->performed->gmi;
  }
  return std::nullopt;
}

GlobalHap make_fail(AgentId agent) {
  return ByzAction{agent, std::nullopt, std::nullopt};
}

GlobalHap make_system(AgentId agent, SystemEventKind kind) {
  return SystemEvent{agent, kind};
}

GlobalHap make_delivery(const Gmi& gmi) {
  return CorrectEvent{gmi.recipient, RecvEvent{gmi.sender, gmi.msg}, gmi};
}

GlobalHap make_fake_delivery(const Gmi& gmi) {
  return ByzEvent{gmi.recipient,
                  CorrectEvent{gmi.recipient, RecvEvent{gmi.sender, gmi.msg}, gmi}};
}

CorrectAction to_global(AgentId i, Timestamp t, const LocalAction& a) {
  CorrectAction out{i, a, t, std::nullopt};
  if (const auto* s = std::get_if<SendAction>(&a)) {
    out.gmi = make_gmi(i, s->to, s->msg, s->copy, t);
  }
  return out;
}

LocalHap to_local(const GlobalHap& hap) {
  if (const auto* a = std::get_if<CorrectAction>(&hap)) return a->action;
  if (const auto* e = std::get_if<CorrectEvent>(&hap)) return e->event;
  throw std::invalid_argument("to_local: hap has no local form: " +
                              to_string(hap));
}

LocalHapSet localize_one(const GlobalHap& hap) {
  LocalHapSet out;
  if (is_correct_action(hap) || is_correct_event(hap)) {
    out.insert(to_local(hap));
  } else if (const auto* f = std::get_if<ByzEvent>(&hap)) {
    out.insert(LocalHap{f->faked.event});
  } else if (const auto* b = std::get_if<ByzAction>(&hap)) {
    if (b->recorded) out.insert(LocalHap{b->recorded->action});
  }
  return out;  // system events contribute nothing
}

LocalHapSet localize(const HapSet& haps) {
  LocalHapSet out;
  for (const auto& h : haps) {
    auto one = localize_one(h);
    out.insert(one.begin(), one.end());
  }
  return out;
}

// ---- printing -----------------------------------------------------------

std::string to_string(const LocalAction& a) {
  std::ostringstream os;
  if (const auto* s = std::get_if<SendAction>(&a)) {
    os << "send(" << s->to << "," << s->msg << "," << s->copy << ")";
  } else if (std::holds_alternative<TickAction>(a)) {
    os << "tick";
  } else {
    os << "int(" << std::get<InternalAction>(a).label << ")";
  }
  return os.str();
}

std::string to_string(const LocalHap& h) {
  if (const auto* a = std::get_if<LocalAction>(&h)) return to_string(*a);
  const auto& r = std::get<RecvEvent>(h);
  std::ostringstream os;
  os << "recv(" << r.from << "," << r.msg << ")";
  return os.str();
}

std::string to_string(const Gmi& g) {
  std::ostringstream os;
  os << g.sender << "," << g.recipient << "," << g.msg << "," << g.copy << ","
     << g.send_time;
  return os.str();
}

static std::string act_string(const CorrectAction& a) {
  std::ostringstream os;
  os << "act(" << a.agent << "," << to_string(a.action) << "," << a.time << ")";
  return os.str();
}

std::string to_string(const GlobalHap& h) {
  std::ostringstream os;
  if (const auto* a = std::get_if<CorrectAction>(&h)) {
    os << act_string(*a);
  } else if (const auto* e = std::get_if<CorrectEvent>(&h)) {
    os << "deliver(" << to_string(e->gmi) << ")";
  } else if (const auto* s = std::get_if<SystemEvent>(&h)) {
    switch (s->kind) {
      case SystemEventKind::Go: os << "go(" << s->agent << ")"; break;
      case SystemEventKind::Sleep: os << "sleep(" << s->agent << ")"; break;
      case SystemEventKind::Hibernate:
        os << "hibernate(" << s->agent << ")";
        break;
    }
  } else if (const auto* f = std::get_if<ByzEvent>(&h)) {
    os << "fake_recv(" << to_string(f->faked.gmi) << ")";
  } else {
    const auto& b = std::get<ByzAction>(h);
    if (!b.performed && !b.recorded) {
      os << "fail(" << b.agent << ")";
    } else {
      os << "fake_act(" << b.agent << ","
         << (b.performed ? act_string(*b.performed) : "noop") << ","
         << (b.recorded ? act_string(*b.recorded) : "noop") << ")";
    }
  }
  return os.str();
}

// ---- parsing ------------------------------------------------------------

namespace {

struct Cursor {
  const std::string& text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("hap parse error at column " +
                                std::to_string(pos + 1) + " of '" + text +
                                "': " + what);
  }
  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
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
            text[pos] == '_' || text[pos] == '-')) {
      ++pos;
    }
    if (pos == start) fail("expected identifier");
    return text.substr(start, pos - start);
  }
  int number() {
    skip_ws();
    size_t start = pos;
    if (pos < text.size() && text[pos] == '-') ++pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    if (pos == start) fail("expected number");
    return std::stoi(text.substr(start, pos - start));
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
};

LocalAction parse_action(Cursor& c) {
  std::string head = c.ident();
  if (head == "tick") return TickAction{};
  if (head == "send") {
    c.expect('(');
    AgentId to = c.number();
    c.expect(',');
    std::string msg = c.ident();
    c.expect(',');
    int copy = c.number();
    c.expect(')');
    return SendAction{to, msg, copy};
  }
  if (head == "int") {
    c.expect('(');
    std::string label = c.ident();
    c.expect(')');
    return InternalAction{label};
  }
  c.fail("unknown local action '" + head + "'");
}

LocalHap parse_local(Cursor& c) {
  c.skip_ws();
  size_t mark = c.pos;
  std::string head = c.ident();
  if (head == "recv") {
    c.expect('(');
    AgentId from = c.number();
    c.expect(',');
    std::string msg = c.ident();
    c.expect(')');
    return LocalHap{RecvEvent{from, msg}};
  }
  c.pos = mark;
  return LocalHap{parse_action(c)};
}

Gmi parse_gmi_fields(Cursor& c) {
  Gmi g;
  g.sender = c.number();
  c.expect(',');
  g.recipient = c.number();
  c.expect(',');
  g.msg = c.ident();
  c.expect(',');
  g.copy = c.number();
  c.expect(',');
  g.send_time = c.number();
  return g;
}

CorrectAction parse_act(Cursor& c) {
  // caller consumed "act" already
  c.expect('(');
  AgentId agent = c.number();
  c.expect(',');
  LocalAction a = parse_action(c);
  c.expect(',');
  Timestamp t = c.number();
  c.expect(')');
  return to_global(agent, t, a);
}

GlobalHap parse_global(Cursor& c) {
  std::string head = c.ident();
  if (head == "act") return parse_act(c);
  if (head == "go" || head == "sleep" || head == "hibernate") {
    c.expect('(');
    AgentId agent = c.number();
    c.expect(')');
    SystemEventKind kind = head == "go"      ? SystemEventKind::Go
                           : head == "sleep" ? SystemEventKind::Sleep
                                             : SystemEventKind::Hibernate;
    return SystemEvent{agent, kind};
  }
  if (head == "deliver" || head == "fake_recv") {
    c.expect('(');
    Gmi g = parse_gmi_fields(c);
    c.expect(')');
    return head == "deliver" ? make_delivery(g) : make_fake_delivery(g);
  }
  if (head == "fail") {
    c.expect('(');
    AgentId agent = c.number();
    c.expect(')');
    return make_fail(agent);
  }
  if (head == "fake_act") {
    c.expect('(');
    AgentId agent = c.number();
    c.expect(',');
    ByzAction b;
    b.agent = agent;
    std::string p = c.ident();
    if (p == "act") {
      b.performed = parse_act(c);
    } else if (p != "noop") {
      c.fail("expected act(...) or noop");
    }
    c.expect(',');
    std::string q = c.ident();
    if (q == "act") {
      b.recorded = parse_act(c);
    } else if (q != "noop") {
      c.fail("expected act(...) or noop");
    }
    c.expect(')');
    if ((b.performed && b.performed->agent != agent) ||
        (b.recorded && b.recorded->agent != agent)) {
      c.fail("faulty action components must belong to agent " +
             std::to_string(agent));
    }
    return b;
  }
  c.fail("unknown global hap '" + head + "'");
}

}  // namespace

LocalHap parse_local_hap(const std::string& text) {
  Cursor c{text};
  LocalHap h = parse_local(c);
  if (!c.at_end()) c.fail("trailing input");
  return h;
}

LocalAction parse_local_action(const std::string& text) {
  Cursor c{text};
  LocalAction a = parse_action(c);
  if (!c.at_end()) c.fail("trailing input");
  return a;
}

GlobalHap parse_global_hap(const std::string& text) {
  Cursor c{text};
  GlobalHap h = parse_global(c);
  if (!c.at_end()) c.fail("trailing input");
  return h;
}

// ---- ordering -----------------------------------------------------------

bool HapLess::operator()(const GlobalHap& a, const GlobalHap& b) const {
  auto key = [](const GlobalHap& h) {
    return std::tuple<AgentId, size_t, std::string>(agent_of(h), h.index(),
                                                    to_string(h));
  };
  return key(a) < key(b);
}

bool LocalHapLess::operator()(const LocalHap& a, const LocalHap& b) const {
  auto key = [](const LocalHap& h) {
    return std::tuple<size_t, std::string>(h.index(), to_string(h));
  };
  return key(a) < key(b);
}

HapSet hap_set(std::initializer_list<GlobalHap> haps) {
  return HapSet(haps.begin(), haps.end());
}

}  // namespace byzrun
