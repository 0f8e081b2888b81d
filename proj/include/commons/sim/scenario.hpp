#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commons/governance.hpp"
#include "commons/reputation.hpp"
#include "commons/types.hpp"

namespace commons::sim {

enum class Role { Researcher, Whale, Attacker, Apathetic };
std::string_view to_string(Role r);

struct SbtRange {
  std::int64_t lo{0};
  std::int64_t hi{0};
};

// One roster line; `count` > 1 expands to name[0] .. name[count-1].
struct AgentSpec {
  std::string name;
  Role role{Role::Researcher};
  Amount tokens{0};
  std::map<reputation::Category, SbtRange> sbts;
  std::int64_t count{1};
};

struct Step {
  Epoch at{1};
  std::string command;
  json args = json::object();
};

struct AttackSpec {
  std::string attacker;
  Amount loan{182'000'000};
};

struct Scenario {
  std::string name;
  std::uint64_t seed{0};
  governance::GovernanceConfig governance;
  json governance_overrides = json::object();
  Amount treasury{0};
  std::vector<AgentSpec> agents;
  std::string council;
  std::vector<Step> script;
  std::optional<AttackSpec> attack;
  std::vector<std::string> metrics;
};

struct Diagnostic {
  Errc code{Errc::ParseError};
  std::string message;
};

// Every problem in the document, in discovery order; empty when it loads.
std::vector<Diagnostic> validate_scenario(std::string_view text);
// Throws Error carrying the first diagnostic's code.
Scenario load_scenario(std::string_view text);

// Expanded agent names in roster order.
std::vector<std::string> agent_names(const Scenario& s);
// "name", "name[i]", "name[a:b]" (half-open) or "all". Throws UnknownAgentRef.
std::vector<std::string> select_agents(const Scenario& s, std::string_view selector);

}  // namespace commons::sim
