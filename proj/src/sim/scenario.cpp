#include "commons/sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace commons::sim {

namespace {

enum class Field { Agent, Selector, Proposal, Round, Asset, Pool, DefProposal, DefRound, DefAsset, DefPool,
                   Int, Number, Bool, String, Object, Any, Split };

struct FieldSpec {
  const char* name;
  Field type;
  bool required;
};

const std::map<std::string, std::vector<FieldSpec>, std::less<>>& commands() {
  static const std::map<std::string, std::vector<FieldSpec>, std::less<>> table{
      {"propose", {{"id", Field::DefProposal, true}, {"by", Field::Agent, true}, {"kind", Field::String, true},
                   {"to", Field::Agent, false}, {"amount", Field::Int, false}, {"key", Field::String, false},
                   {"value", Field::Any, false}, {"changes", Field::Object, false}}},
      {"vote", {{"proposal", Field::Proposal, true}, {"voters", Field::Selector, true},
                {"support", Field::Bool, true}, {"votes", Field::Int, false}}},
      {"turnout", {{"proposal", Field::Proposal, true}, {"voters", Field::Selector, true},
                   {"rate", Field::Number, true}, {"support", Field::Bool, true}, {"votes", Field::Int, false}}},
      {"tally", {{"proposal", Field::Proposal, true}}},
      {"execute", {{"proposal", Field::Proposal, true}}},
      {"veto", {{"proposal", Field::Proposal, true}, {"signers", Field::Selector, true}}},
      {"delegate", {{"from", Field::Selector, true}, {"to", Field::Agent, true}}},
      {"undelegate", {{"from", Field::Selector, true}}},
      {"transfer", {{"from", Field::Agent, true}, {"to", Field::Agent, true}, {"amount", Field::Int, true}}},
      {"mint", {{"to", Field::Selector, true}, {"amount", Field::Int, true}}},
      {"issue_sbt", {{"to", Field::Selector, true}, {"category", Field::String, true}, {"count", Field::Int, false}}},
      {"open_round", {{"id", Field::DefRound, true}, {"pool", Field::Int, true}, {"projects", Field::Selector, true},
                      {"mode", Field::String, false}, {"require_stake", Field::String, false}}},
      {"contribute", {{"round", Field::Round, true}, {"from", Field::Selector, true}, {"project", Field::Agent, true},
                      {"amount", Field::Int, true}}},
      {"settle", {{"round", Field::Round, true}}},
      {"ip_mint", {{"id", Field::DefAsset, true}, {"owner", Field::Agent, true}, {"split", Field::Split, true},
                   {"open_access", Field::Bool, false}}},
      {"fractionalize", {{"asset", Field::Asset, true}, {"id", Field::DefPool, true}, {"by", Field::Agent, true},
                         {"cap", Field::Int, true}, {"base_milli", Field::Int, true}, {"slope_milli", Field::Int, true},
                         {"penalty_bp", Field::Int, true}, {"horizon", Field::Int, true}}},
      {"buy", {{"pool", Field::Pool, true}, {"by", Field::Agent, true}, {"units", Field::Int, true}}},
      {"sell", {{"pool", Field::Pool, true}, {"by", Field::Agent, true}, {"units", Field::Int, true}}},
      {"royalties", {{"asset", Field::Asset, true}, {"payer", Field::Agent, true}, {"revenue", Field::Int, true}}},
      {"license", {{"asset", Field::Asset, true}, {"by", Field::Agent, true}, {"licensee", Field::Agent, true},
                   {"price", Field::Int, true}, {"exclusive", Field::Bool, false}}},
  };
  return table;
}

std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::optional<Role> parse_role(const std::string& s) {
  for (auto r : {Role::Researcher, Role::Whale, Role::Attacker, Role::Apathetic}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

struct Loader {
  std::vector<Diagnostic> diags;
  Scenario s;

  void fail(Errc code, std::string msg) { diags.push_back({code, std::move(msg)}); }

  void load_agents(const json& j) {
    if (!j.is_array() || j.empty()) return fail(Errc::ParseError, "field agents: must be a non-empty list");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto where = "field agents[" + std::to_string(i) + "]";
      const auto& a = j[i];
      if (!a.is_object()) {
        fail(Errc::ParseError, where + ": must be an object");
        continue;
      }
      AgentSpec spec;
      for (const auto& [key, v] : a.items()) {
        if (key == "name" && v.is_string()) {
          spec.name = v.get<std::string>();
        } else if (key == "role" && v.is_string()) {
          auto r = parse_role(v.get<std::string>());
          if (!r) fail(Errc::ParseError, where + ".role: unknown role " + v.get<std::string>());
          else spec.role = *r;
        } else if (key == "tokens" && v.is_number_integer() && v.get<Amount>() >= 0) {
          spec.tokens = v.get<Amount>();
        } else if (key == "count" && v.is_number_integer() && v.get<std::int64_t>() >= 1) {
          spec.count = v.get<std::int64_t>();
        } else if (key == "sbts" && v.is_object()) {
          for (const auto& [cat, range] : v.items()) {
            auto c = reputation::parse_category(cat);
            if (!c) {
              fail(Errc::ParseError, where + ".sbts: unknown category " + cat);
              continue;
            }
            SbtRange r;
            if (range.is_number_integer()) {
              r.lo = r.hi = range.get<std::int64_t>();
            } else if (range.is_array() && range.size() == 2 && range[0].is_number_integer() &&
                       range[1].is_number_integer()) {
              r.lo = range[0].get<std::int64_t>();
              r.hi = range[1].get<std::int64_t>();
            } else {
              fail(Errc::ParseError, where + ".sbts." + cat + ": expected a count or [lo, hi]");
              continue;
            }
            if (r.lo < 0 || r.hi < r.lo) fail(Errc::ParseError, where + ".sbts." + cat + ": need 0 <= lo <= hi");
            spec.sbts[*c] = r;
          }
        } else {
          fail(Errc::ParseError, where + "." + key + ": unexpected or mistyped field");
        }
      }
      if (spec.name.empty() || spec.name.find_first_of("[]: ") != std::string::npos || spec.name == "all") {
        fail(Errc::ParseError, where + ".name: required, without brackets, colons or spaces");
      } else if (!seen.insert(spec.name).second) {
        fail(Errc::ParseError, where + ".name: duplicate agent " + spec.name);
      }
      s.agents.push_back(std::move(spec));
    }
  }

  void check_selector(const std::string& where, const json& v, bool single) {
    if (!v.is_string()) return fail(Errc::ParseError, where + ": expected an agent reference");
    try {
      auto names = select_agents(s, v.get<std::string>());
      if (single && names.size() != 1) fail(Errc::UnknownAgentRef, where + ": must name exactly one agent");
    } catch (const Error& e) {
      fail(e.code(), where + ": " + e.what());
    }
  }

  void load_script(const json& j) {
    if (!j.is_array()) return fail(Errc::ParseError, "field script: must be a list");
    std::map<Field, std::set<std::string>> labels;
    Epoch last = 1;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto where = "field script[" + std::to_string(i) + "]";
      const auto& st = j[i];
      if (!st.is_object()) {
        fail(Errc::ParseError, where + ": must be an object");
        continue;
      }
      Step step;
      if (!st.contains("at") || !st["at"].is_number_integer() || st["at"].get<Epoch>() < 1) {
        fail(Errc::ParseError, where + ".at: required integer >= 1");
      } else {
        step.at = st["at"].get<Epoch>();
        if (step.at < last) fail(Errc::ParseError, where + ".at: steps must be in non-decreasing epoch order");
        last = std::max(last, step.at);
      }
      if (!st.contains("do") || !st["do"].is_string()) {
        fail(Errc::ParseError, where + ".do: required command name");
        continue;
      }
      step.command = st["do"].get<std::string>();
      auto cmd = commands().find(step.command);
      if (cmd == commands().end()) {
        fail(Errc::ParseError, where + ".do: unknown command " + step.command);
        continue;
      }
      std::set<std::string> known{"at", "do"};
      for (const auto& f : cmd->second) {
        known.insert(f.name);
        const auto fw = where + "." + f.name;
        if (!st.contains(f.name)) {
          if (f.required) fail(Errc::ParseError, fw + ": required");
          continue;
        }
        const auto& v = st[f.name];
        step.args[f.name] = v;
        switch (f.type) {
          case Field::Agent: check_selector(fw, v, true); break;
          case Field::Selector: check_selector(fw, v, false); break;
          case Field::Proposal:
          case Field::Round:
          case Field::Asset:
          case Field::Pool: {
            const auto def = static_cast<Field>(static_cast<int>(f.type) + 4);
            if (!v.is_string() || !labels[def].contains(v.get<std::string>())) {
              fail(Errc::ParseError, fw + ": refers to an undefined label");
            }
            break;
          }
          case Field::DefProposal:
          case Field::DefRound:
          case Field::DefAsset:
          case Field::DefPool:
            if (!v.is_string() || !labels[f.type].insert(v.get<std::string>()).second) {
              fail(Errc::ParseError, fw + ": label must be a new string");
            }
            break;
          case Field::Int:
            if (!v.is_number_integer()) fail(Errc::ParseError, fw + ": expected an integer");
            break;
          case Field::Number:
            if (!v.is_number() || v.get<double>() < 0 || v.get<double>() > 1) {
              fail(Errc::ParseError, fw + ": expected a fraction in [0, 1]");
            }
            break;
          case Field::Bool:
            if (!v.is_boolean()) fail(Errc::ParseError, fw + ": expected true or false");
            break;
          case Field::String:
            if (!v.is_string()) fail(Errc::ParseError, fw + ": expected a string");
            break;
          case Field::Object:
            if (!v.is_object()) fail(Errc::ParseError, fw + ": expected an object");
            break;
          case Field::Split:
            if (!v.is_array() || v.empty()) {
              fail(Errc::ParseError, fw + ": expected [[agent, bp], ...]");
              break;
            }
            for (const auto& share : v) {
              if (!share.is_array() || share.size() != 2 || !share[1].is_number_integer()) {
                fail(Errc::ParseError, fw + ": expected [[agent, bp], ...]");
              } else {
                check_selector(fw, share[0], true);
              }
            }
            break;
          case Field::Any: break;
        }
      }
      for (const auto& [key, v] : st.items()) {
        if (!known.contains(key)) fail(Errc::ParseError, where + "." + key + ": unexpected field");
      }
      if (step.command == "propose" && st.contains("kind") && st["kind"].is_string()) {
        try {
          governance::kind_or_throw(st["kind"].get<std::string>());
        } catch (const Error& e) {
          fail(Errc::ParseError, where + ".kind: " + e.what());
        }
      }
      if (step.command == "issue_sbt" && st.contains("category") && st["category"].is_string() &&
          !reputation::parse_category(st["category"].get<std::string>())) {
        fail(Errc::ParseError, where + ".category: unknown category");
      }
      s.script.push_back(std::move(step));
    }
  }

  void load(std::string_view text) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      return fail(Errc::ParseError, "malformed JSON at " + position(text, e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) return fail(Errc::ParseError, "scenario must be a JSON object");
    static const std::set<std::string> keys{"name", "seed", "governance", "treasury", "agents",
                                            "council", "script", "attack", "metrics"};
    for (const auto& [key, v] : doc.items()) {
      if (!keys.contains(key)) fail(Errc::ParseError, "field " + key + ": unexpected top-level field");
    }
    if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty()) {
      fail(Errc::ParseError, "field name: required non-empty string");
    } else {
      s.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) fail(Errc::ParseError, "field seed: expected a non-negative integer");
      else s.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("governance")) {
      try {
        s.governance = governance::config_from_json(doc["governance"]);
        s.governance_overrides = doc["governance"];
        for (auto& m : governance::validate(s.governance)) fail(Errc::BadConfig, "governance: " + m);
      } catch (const Error& e) {
        fail(Errc::BadConfig, std::string("governance: ") + e.what());
      }
    }
    if (doc.contains("treasury")) {
      if (!doc["treasury"].is_number_integer() || doc["treasury"].get<Amount>() < 0) {
        fail(Errc::ParseError, "field treasury: expected a non-negative integer");
      } else {
        s.treasury = doc["treasury"].get<Amount>();
      }
    }
    if (!doc.contains("agents")) fail(Errc::ParseError, "field agents: required");
    else load_agents(doc["agents"]);
    if (doc.contains("council")) {
      check_selector("field council", doc["council"], false);
      if (doc["council"].is_string()) s.council = doc["council"].get<std::string>();
    }
    if (doc.contains("script")) load_script(doc["script"]);
    if (doc.contains("attack")) {
      const auto& a = doc["attack"];
      if (!a.is_object() || !a.contains("attacker")) {
        fail(Errc::ParseError, "field attack: expected {attacker, loan}");
      } else {
        AttackSpec spec;
        check_selector("field attack.attacker", a["attacker"], true);
        if (a["attacker"].is_string()) spec.attacker = a["attacker"].get<std::string>();
        if (a.contains("loan")) {
          if (!a["loan"].is_number_integer() || a["loan"].get<Amount>() <= 0) {
            fail(Errc::ParseError, "field attack.loan: expected a positive integer");
          } else {
            spec.loan = a["loan"].get<Amount>();
          }
        }
        for (const auto& [key, v] : a.items()) {
          if (key != "attacker" && key != "loan") fail(Errc::ParseError, "field attack." + key + ": unexpected field");
        }
        s.attack = spec;
      }
    }
    if (doc.contains("metrics")) {
      static const std::set<std::string> known{"gini", "participation", "treasury"};
      if (!doc["metrics"].is_array()) {
        fail(Errc::ParseError, "field metrics: must be a list");
      } else {
        for (const auto& m : doc["metrics"]) {
          if (!m.is_string() || !known.contains(m.get<std::string>())) {
            fail(Errc::ParseError, "field metrics: unknown metric " + m.dump());
          } else {
            s.metrics.push_back(m.get<std::string>());
          }
        }
      }
    }
  }
};

bool parse_index(std::string_view text, std::int64_t& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && out >= 0;
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Researcher: return "Researcher";
    case Role::Whale: return "Whale";
    case Role::Attacker: return "Attacker";
    case Role::Apathetic: return "Apathetic";
  }
  return "?";
}

std::vector<std::string> agent_names(const Scenario& s) {
  std::vector<std::string> out;
  for (const auto& a : s.agents) {
    if (a.count == 1) {
      out.push_back(a.name);
    } else {
      for (std::int64_t i = 0; i < a.count; ++i) out.push_back(a.name + "[" + std::to_string(i) + "]");
    }
  }
  return out;
}

std::vector<std::string> select_agents(const Scenario& s, std::string_view selector) {
  if (selector == "all") return agent_names(s);
  const auto bracket = selector.find('[');
  const auto base = selector.substr(0, bracket);
  auto it = std::find_if(s.agents.begin(), s.agents.end(), [&](const AgentSpec& a) { return a.name == base; });
  if (it == s.agents.end()) throw Error(Errc::UnknownAgentRef, "undeclared agent " + std::string(selector));
  auto name_at = [&](std::int64_t i) {
    return it->count == 1 ? it->name : it->name + "[" + std::to_string(i) + "]";
  };
  std::int64_t lo = 0;
  std::int64_t hi = it->count;
  if (bracket != std::string_view::npos) {
    if (selector.back() != ']') throw Error(Errc::UnknownAgentRef, "malformed selector " + std::string(selector));
    const auto inner = selector.substr(bracket + 1, selector.size() - bracket - 2);
    const auto colon = inner.find(':');
    bool ok = true;
    if (colon == std::string_view::npos) {
      ok = parse_index(inner, lo);
      hi = lo + 1;
    } else {
      ok = parse_index(inner.substr(0, colon), lo) && parse_index(inner.substr(colon + 1), hi);
    }
    if (!ok || lo >= hi || hi > it->count || it->count == 1) {
      throw Error(Errc::UnknownAgentRef, "selector out of range: " + std::string(selector));
    }
  }
  std::vector<std::string> out;
  for (auto i = lo; i < hi; ++i) out.push_back(name_at(i));
  return out;
}

std::vector<Diagnostic> validate_scenario(std::string_view text) {
  Loader l;
  l.load(text);
  return l.diags;
}

Scenario load_scenario(std::string_view text) {
  Loader l;
  l.load(text);
  if (!l.diags.empty()) throw Error(l.diags.front().code, l.diags.front().message);
  return l.s;
}

}  // namespace commons::sim
