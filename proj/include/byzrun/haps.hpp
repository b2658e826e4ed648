#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

// Actions and events ("haps") in their agent-local and environment-global
// representations, plus the conversions between the two.

namespace byzrun {

using AgentId = int;    // dense 1..n, n >= 2
using Timestamp = int;  // round t-and-a-half spans (t, t+1]
using Message = std::string;

// ---- local format -------------------------------------------------------

struct SendAction {
  AgentId to = 0;
  Message msg;
  int copy = 0;  // distinguishes re-sends of the same (to, msg) in one round
  bool operator==(const SendAction&) const = default;
};

struct TickAction {  // the internal clock action synchronous protocols emit
  bool operator==(const TickAction&) const = default;
};

struct InternalAction {
  std::string label;
  bool operator==(const InternalAction&) const = default;
};

using LocalAction = std::variant<SendAction, TickAction, InternalAction>;

struct RecvEvent {
  AgentId from = 0;
  Message msg;
  bool operator==(const RecvEvent&) const = default;
};

using LocalEvent = RecvEvent;
using LocalHap = std::variant<LocalAction, LocalEvent>;

bool is_send(const LocalAction& a);
bool is_tick(const LocalAction& a);

// ---- global format ------------------------------------------------------

// Global message identifier. Structural tuple; injective across all fields.
struct Gmi {
  AgentId sender = 0;
  AgentId recipient = 0;
  Message msg;
  int copy = 0;
  Timestamp send_time = 0;
  bool operator==(const Gmi&) const = default;
};

Gmi make_gmi(AgentId sender, AgentId recipient, const Message& msg, int copy,
             Timestamp send_time);

enum class SystemEventKind { Go, Sleep, Hibernate };

struct CorrectAction {
  AgentId agent = 0;
  LocalAction action;
  Timestamp time = 0;
  std::optional<Gmi> gmi;  // present iff action is a send
  bool operator==(const CorrectAction&) const = default;
};

struct CorrectEvent {
  AgentId agent = 0;  // recipient
  RecvEvent event;
  Gmi gmi;
  bool operator==(const CorrectEvent&) const = default;
};

struct SystemEvent {
  AgentId agent = 0;
  SystemEventKind kind = SystemEventKind::Go;
  bool operator==(const SystemEvent&) const = default;
};

// fake(i, E): agent i records event E that never took place.
struct ByzEvent {
  AgentId agent = 0;
  CorrectEvent faked;
  bool operator==(const ByzEvent&) const = default;
};

// fake(i, A -> A'): the environment performs A while i records A'.
// noop is represented by nullopt; fail(i) is the (noop, noop) pair.
struct ByzAction {
  AgentId agent = 0;
  std::optional<CorrectAction> performed;
  std::optional<CorrectAction> recorded;
  bool operator==(const ByzAction&) const = default;
};

using GlobalHap =
    std::variant<CorrectAction, CorrectEvent, SystemEvent, ByzEvent, ByzAction>;

AgentId agent_of(const GlobalHap& hap);

bool is_correct_action(const GlobalHap& hap);
bool is_correct_event(const GlobalHap& hap);
bool is_system_event(const GlobalHap& hap);
bool is_byz_event(const GlobalHap& hap);    // fake(i, E) or fake(i, A -> A')
bool is_event(const GlobalHap& hap);        // anything but CorrectAction
// fault events FEvents_i: byzantine events plus sleep/hibernate
bool is_fault_event(const GlobalHap& hap);
bool is_fail(const GlobalHap& hap);  // fail(i) = fake(i, noop -> noop)

// The send performed by this hap, if any: a CorrectAction send or the
// performed component of a ByzAction when that component is a send.
std::optional<Gmi> performed_send_gmi(const GlobalHap& hap);

GlobalHap make_fail(AgentId agent);
GlobalHap make_system(AgentId agent, SystemEventKind kind);
GlobalHap make_delivery(const Gmi& gmi);  // correct receive event for gmi.recipient
GlobalHap make_fake_delivery(const Gmi& gmi);

// Canonical ordering used for serialized output and set iteration:
// (agent, hap kind, payload lexicographic).
struct HapLess {
  bool operator()(const GlobalHap& a, const GlobalHap& b) const;
};

struct LocalHapLess {
  bool operator()(const LocalHap& a, const LocalHap& b) const;
};

using HapSet = std::set<GlobalHap, HapLess>;
using LocalHapSet = std::set<LocalHap, LocalHapLess>;

HapSet hap_set(std::initializer_list<GlobalHap> haps);

// ---- conversions --------------------------------------------------------

// One-to-one labeling of a local action performed by agent i at time t.
CorrectAction to_global(AgentId i, Timestamp t, const LocalAction& a);

// Inverse of the global labeling; defined on correct haps only.
// Throws std::invalid_argument on system or byzantine haps.
LocalHap to_local(const GlobalHap& hap);

// Localization: correct haps converted, faked events/actions unwrapped to
// their recorded local forms, system events dropped.
LocalHapSet localize(const HapSet& haps);
LocalHapSet localize_one(const GlobalHap& hap);

// ---- canonical text form ------------------------------------------------

std::string to_string(const LocalAction& a);
std::string to_string(const LocalHap& h);
std::string to_string(const Gmi& g);
std::string to_string(const GlobalHap& h);

// Parse the canonical text forms back. Throws std::invalid_argument with a
// position-anchored message on malformed input.
LocalHap parse_local_hap(const std::string& text);
LocalAction parse_local_action(const std::string& text);
GlobalHap parse_global_hap(const std::string& text);

}  // namespace byzrun
