#include "byzrun/scenario.hpp"

#include <fstream>
#include <sstream>

namespace byzrun {

// ---- canonical serialization ----------------------------------------------

Json json_of(const HapSet& set) {
  Json out = Json::array();
  for (const auto& hap : set) out.push_back(to_string(hap));
  return out;
}

Json json_of(const LocalHistory& h) {
  Json layers = Json::array();
  for (const auto& layer : h.layers) {
    Json one = Json::array();
    for (const auto& hap : layer) one.push_back(to_string(hap));
    layers.push_back(std::move(one));
  }
  return Json{{"initial", h.initial}, {"layers", layers}};
}

Json json_of(const GlobalState& state) {
  Json env = Json::array();
  for (const auto& layer : state.env.layers) env.push_back(json_of(layer));
  Json locals = Json::array();
  for (const auto& local : state.locals) locals.push_back(json_of(local));
  return Json{{"env", env}, {"locals", locals}};
}

Json json_of(const Run& run) {
  Json rounds = Json::array();
  for (const auto& rec : run.rounds) {
    Json actions = Json::array();
    for (const auto& acts : rec.performed_actions) {
      actions.push_back(json_of(acts));
    }
    rounds.push_back(Json{{"t", rec.t},
                          {"events", json_of(rec.performed_events)},
                          {"actions", actions}});
  }
  int initial = run.choice_trace.empty() ? 0 : run.choice_trace.front();
  return Json{{"initial", initial},
              {"rounds", rounds},
              {"final", json_of(run.states.back())}};
}

Json json_of(const RunSystem& system) {
  Json runs = Json::array();
  for (size_t r = 0; r < system.runs.size(); ++r) {
    Json record = json_of(system.runs[r]);
    record["verdict"] = to_string(system.verdicts[r]);
    runs.push_back(std::move(record));
  }
  return Json{{"horizon", system.horizon},
              {"run_count", system.runs.size()},
              {"runs", runs}};
}

// ---- scenario parsing --------------------------------------------------------

namespace {

[[noreturn]] void fail_at(const std::string& origin, const std::string& where,
                          const std::string& what) {
  throw ScenarioError(origin + ": " + where + ": " + what);
}

LocalAction parse_action_checked(const std::string& origin,
                                 const std::string& where,
                                 const std::string& text) {
  try {
    return parse_local_action(text);
  } catch (const std::invalid_argument& e) {
    fail_at(origin, where, e.what());
  }
}

AgentProtocol parse_agent_protocol(const Json& spec, const std::string& origin,
                                   const std::string& where) {
  if (spec.is_string()) {
    std::string name = spec.get<std::string>();
    if (name == "silent_tick") return silent_tick_protocol();
    if (name == "broadcast_all") return broadcast_all_protocol();
    fail_at(origin, where, "unknown built-in protocol '" + name + "'");
  }
  if (!spec.is_object() || !spec.contains("rules")) {
    fail_at(origin, where, "expected a built-in name or an object with rules");
  }
  AgentProtocol proto;
  proto.kind = AgentProtocol::Kind::Table;
  for (const auto& rule_json : spec.at("rules")) {
    ProtocolRule rule;
    if (rule_json.contains("when_length")) {
      rule.when_length = rule_json.at("when_length").get<int>();
    }
    for (const auto& choice : rule_json.at("choices")) {
      std::vector<LocalAction> actions;
      for (const auto& entry : choice) {
        actions.push_back(parse_action_checked(origin, where,
                                               entry.get<std::string>()));
      }
      rule.choices.push_back(std::move(actions));
    }
    proto.rules.push_back(std::move(rule));
  }
  return proto;
}

}  // namespace

Scenario parse_scenario(const Json& doc, const std::string& origin) {
  if (!doc.is_object()) fail_at(origin, "top level", "expected an object");
  if (!doc.contains("schema") || doc.at("schema").get<int>() != 1) {
    fail_at(origin, "schema", "missing or unsupported schema version");
  }
  Scenario s;
  s.name = doc.value("name", std::string{"unnamed"});
  s.params.agents = doc.value("agents", 2);
  if (s.params.agents < 2) fail_at(origin, "agents", "need at least 2 agents");
  s.params.messages.clear();
  for (const auto& m : doc.value("messages", Json::array())) {
    s.params.messages.push_back(m.get<std::string>());
  }
  s.params.max_copies = doc.value("max_copies", 1);
  s.params.horizon = doc.value("horizon", 3);
  if (s.params.horizon < 1) fail_at(origin, "horizon", "must be at least 1");
  s.extension_expr = doc.value("extension", std::string{"B"});

  const Json protocols = doc.value("protocols", Json::object());
  const Json agent_protos = protocols.value("agent", Json::object());
  AgentProtocol fallback = silent_tick_protocol();
  if (agent_protos.contains("*")) {
    fallback = parse_agent_protocol(agent_protos.at("*"), origin,
                                    "protocols.agent.*");
  }
  for (AgentId i = 1; i <= s.params.agents; ++i) {
    std::string key = std::to_string(i);
    if (agent_protos.contains(key)) {
      s.joint.push_back(parse_agent_protocol(agent_protos.at(key), origin,
                                             "protocols.agent." + key));
    } else {
      s.joint.push_back(fallback);
    }
  }

  s.env.params = s.params;
  const Json env_spec = protocols.value("env", Json::object());
  for (const auto& rule_json : env_spec.value("rules", Json::array())) {
    EnvRule rule;
    if (rule_json.contains("when_time")) {
      rule.when_time = rule_json.at("when_time").get<int>();
    }
    for (const auto& choice : rule_json.at("choices")) {
      std::vector<std::string> entries;
      for (const auto& entry : choice) {
        entries.push_back(entry.get<std::string>());
      }
      rule.choices.push_back(std::move(entries));
    }
    s.env.rules.push_back(std::move(rule));
  }
  if (s.env.rules.empty()) s.env.rules.push_back(EnvRule{-1, {{}}});
  const Json caps = env_spec.value("capabilities", Json::object());
  for (auto it = caps.begin(); it != caps.end(); ++it) {
    AgentId agent = std::stoi(it.key());
    for (const auto& cap : it.value()) {
      std::string c = cap.get<std::string>();
      if (c == "fallible") {
        s.env.caps.fallible.insert(agent);
      } else if (c == "delayable") {
        s.env.caps.delayable.insert(agent);
      } else if (c == "gullible") {
        s.env.caps.gullible.insert(agent);
        s.env.caps.delayable.insert(agent);  // gullibility subsumes delaying
      } else {
        fail_at(origin, "protocols.env.capabilities", "unknown capability '" +
                                                          c + "'");
      }
    }
  }
  // validate the base menus up front
  for (Timestamp t = 0; t < s.params.horizon; ++t) {
    try {
      (void)s.env.choices(t);
    } catch (const std::exception& e) {
      fail_at(origin, "protocols.env.rules", e.what());
    }
  }

  const Json initials = doc.value("initial", Json::array());
  if (initials.empty()) {
    s.initial_states = {make_initial_state(s.params.agents)};
  } else {
    for (const auto& init : initials) {
      GlobalState state = make_initial_state(s.params.agents);
      if (init.is_object()) {
        for (auto it = init.begin(); it != init.end(); ++it) {
          AgentId i = std::stoi(it.key());
          state.local(i).initial = it.value().get<std::string>();
        }
      }
      s.initial_states.push_back(std::move(state));
    }
  }

  if (doc.contains("adversary")) {
    const Json& adv = doc.at("adversary");
    std::string mode = adv.value("mode", std::string{"exhaustive"});
    if (mode == "exhaustive") {
      s.adversary = Adversary::exhaust();
    } else if (mode == "seeded") {
      s.adversary = Adversary::seeded(adv.value("seed", 0ULL),
                                      adv.value("samples", 1));
    } else {
      fail_at(origin, "adversary.mode", "expected exhaustive or seeded");
    }
  }

  for (const auto& check : doc.value("checks", Json::array())) {
    CheckSpec spec;
    spec.kind = check.at("check").get<std::string>();
    spec.args = check;
    s.checks.push_back(std::move(spec));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    // nlohmann reports byte offsets; recover the line for the diagnostic
    std::ifstream again(path);
    std::string text((std::istreambuf_iterator<char>(again)),
                     std::istreambuf_iterator<char>());
    size_t line = 1;
    for (size_t b = 0; b < std::min(text.size(), static_cast<size_t>(e.byte));
         ++b) {
      if (text[b] == '\n') ++line;
    }
    throw ScenarioError(path + ":" + std::to_string(line) + ": " + e.what());
  }
  return parse_scenario(doc, path);
}

// ---- extension expressions ----------------------------------------------------

namespace {

std::vector<std::string> split_top_level(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  int depth = 0;
  for (char c : text) {
    if (c == '(' || c == '{') ++depth;
    if (c == ')' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(current);
      current.clear();
      continue;
    }
    current += c;
  }
  out.push_back(current);
  return out;
}

std::string strip_ws(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::set<std::pair<AgentId, AgentId>> parse_channels(const std::string& text,
                                                     const ModelParams& params) {
  if (text == "all" || text.empty()) return all_channels(params.agents);
  std::set<std::pair<AgentId, AgentId>> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto arrow = part.find("->");
    if (arrow == std::string::npos) {
      throw ScenarioError("channel '" + part + "' is not of the form i->j");
    }
    out.insert({std::stoi(part.substr(0, arrow)),
                std::stoi(part.substr(arrow + 2))});
  }
  return out;
}

MulticastProblem parse_groups(const std::string& text,
                              const ModelParams& params) {
  MulticastProblem out;
  out.groups.assign(static_cast<size_t>(params.agents), {});
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw ScenarioError("multicast groups '" + part +
                          "' are not of the form i:{..}|{..}");
    }
    AgentId agent = std::stoi(part.substr(0, colon));
    std::string rest = part.substr(colon + 1);
    std::stringstream gs(rest);
    std::string group;
    while (std::getline(gs, group, '|')) {
      std::set<AgentId> members;
      std::string digits;
      for (char c : group + ",") {
        if (std::isdigit(static_cast<unsigned char>(c))) {
          digits += c;
        } else if (!digits.empty()) {
          members.insert(std::stoi(digits));
          digits.clear();
        }
      }
      if (!members.empty()) {
        out.groups.at(static_cast<size_t>(agent - 1)).insert(members);
      }
    }
  }
  for (auto& g : out.groups) {
    if (g.empty()) g = {std::set<AgentId>{}};  // never addressable
  }
  return out;
}

}  // namespace

std::vector<Extension> extension_parts(const std::string& expr,
                                       const ModelParams& params) {
  std::string e = strip_ws(expr);
  if (e.rfind("compose(", 0) == 0 && e.back() == ')') {
    std::vector<Extension> out;
    for (const auto& part : split_top_level(e.substr(8, e.size() - 9))) {
      out.push_back(build_extension(strip_ws(part), params));
    }
    return out;
  }
  return {build_extension(e, params)};
}

Extension build_extension(const std::string& expr, const ModelParams& params) {
  std::string e = strip_ws(expr);
  if (e == "B") return ext_byzantine(params);
  if (e == "S") return ext_synchronous(params);
  if (e == "BC") return ext_broadcast(params);
  if (e == "LSS") return ext_lockstep(params);
  if (e.rfind("compose(", 0) == 0 && e.back() == ')') {
    auto parts = extension_parts(e, params);
    Extension out = parts.front();
    for (size_t i = 1; i < parts.size(); ++i) {
      out = compose_extensions(out, parts[i]);
    }
    return out;
  }
  auto open = e.find('(');
  if (open != std::string::npos && e.back() == ')') {
    std::string head = e.substr(0, open);
    std::string arg = e.substr(open + 1, e.size() - open - 2);
    if (head == "RC") return ext_reliable(parse_channels(arg, params), params);
    if (head == "SC") return ext_sync_comm(parse_channels(arg, params), params);
    if (head == "TC") {
      UpperBoundStructure bounds;
      bounds.fallback = (arg == "omega" || arg.empty())
                            ? std::nullopt
                            : std::optional<int>(std::stoi(arg));
      return ext_time_bounded(bounds, params);
    }
    if (head == "MC") return ext_multicast(parse_groups(arg, params), params);
  }
  throw ScenarioError("unknown extension expression '" + expr + "'");
}

AgentContext build_context(const Scenario& scenario) {
  Extension ext = build_extension(scenario.extension_expr, scenario.params);
  AgentContext ctx;
  ctx.env = scenario.env;
  ctx.initial_states = scenario.initial_states;
  ctx.templ = template_of(ext);
  ctx.admissibility = ext.admissibility;
  ctx.joint = scenario.joint;
  ctx.params = scenario.params;
  return ctx;
}

// ---- reports -------------------------------------------------------------------

std::string Report::to_records() const {
  std::ostringstream os;
  for (const auto& r : results) {
    Json rec{{"scenario", scenario}, {"check", r.check},   {"law", r.law},
             {"verdict", r.verdict}, {"horizon", r.horizon}, {"detail", r.detail}};
    if (!r.witness.is_null()) rec["witness"] = r.witness;
    os << rec.dump() << "\n";
  }
  return os.str();
}

std::string Report::to_human() const {
  std::ostringstream os;
  os << "scenario " << scenario << " (horizon " << horizon << ", "
     << (exhaustive ? "exhaustive" : "seed " + std::to_string(seed)) << ")\n";
  int pass = 0, fail = 0, pending = 0;
  for (const auto& r : results) {
    os << "  [" << r.verdict << "] " << r.check << " / " << r.law;
    if (!r.detail.empty()) os << ": " << r.detail;
    os << "\n";
    if (r.verdict == "pass") ++pass;
    else if (r.verdict == "pending") ++pending;
    else ++fail;
  }
  os << pass << " passed, " << fail << " failed, " << pending << " pending\n";
  return os.str();
}

int Report::exit_code(bool allow_pending) const {
  for (const auto& r : results) {
    if (r.verdict == "fail") return 1;
    if (r.verdict == "pending" && !allow_pending) return 1;
  }
  return 0;
}

}  // namespace byzrun
