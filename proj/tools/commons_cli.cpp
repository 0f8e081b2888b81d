#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commons/commons.hpp"
#include "commons/sim/flashloan.hpp"
#include "commons/sim/harness.hpp"
#include "commons/sim/report.hpp"
#include "commons/sim/scenario.hpp"

namespace fs = std::filesystem;
using namespace commons;

namespace {

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int fail(const std::string& message) {
  std::cerr << "error: " << message << '\n';
  return kDomain;
}

bool parse_switch(const std::string& v) { return v == "on"; }

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_dir,
            const std::string& format, const std::string& mode) {
  auto text = slurp(path);
  if (!text) return fail("cannot read scenario " + path);
  try {
    const auto scenario = sim::load_scenario(*text);
    sim::RunOptions options;
    options.seed = seed;
    if (mode == "bicameral") options.mode = governance::Mode::Bicameral;
    if (mode == "token_weighted") options.mode = governance::Mode::TokenWeighted;
    auto result = sim::run(scenario, options);
    const auto& report = result.report;

    fs::create_directories(out_dir);
    const auto base = fs::path(out_dir) / scenario.name;
    const auto report_path = base.string() + (format == "csv" ? ".csv" : ".json");
    std::ofstream(report_path, std::ios::binary) << (format == "csv" ? sim::report_csv(report) : report.dump(2) + "\n");
    std::ofstream(base.string() + ".events.jsonl", std::ios::binary) << result.world.log().to_jsonl();

    std::cout << "scenario=" << scenario.name << " seed=" << report.at("seed").get<std::uint64_t>()
              << " mode=" << report.at("mode").get<std::string>() << " captures=" << report.at("captures").size()
              << " content_hash=" << report.at("content_hash").get<std::string>()
              << " final_state_hash=" << report.at("final_state_hash").get<std::string>() << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_validate(const std::string& path) {
  auto text = slurp(path);
  if (!text) return fail("cannot read scenario " + path);
  const auto diags = sim::validate_scenario(*text);
  if (diags.empty()) {
    std::cout << "OK\n";
    return kOk;
  }
  for (const auto& d : diags) std::cerr << path << ": " << to_string(d.code) << ": " << d.message << '\n';
  return kDomain;
}

int cmd_attack(const std::string& name, const std::string& timelock, const std::string& snapshot, Amount loan) {
  if (name != "flashloan") {
    std::cerr << "error: unknown attack " << name << " (available: flashloan)\n";
    return kUsage;
  }
  try {
    sim::FlashLoanParams params;
    params.loan = loan;
    params.timelock = parse_switch(timelock);
    params.snapshot = parse_switch(snapshot);
    const auto outcome = sim::run_attack_flashloan(params);
    std::cout << "attack=flashloan result=" << outcome.result() << '\n';
    std::cout << "treasury_delta=" << outcome.treasury_delta() << " vetoed=" << (outcome.vetoed ? "yes" : "no")
              << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

Commons replay_file(const std::string& path) {
  auto text = slurp(path);
  if (!text) throw std::runtime_error("cannot read event log " + path);
  return Commons::replay(parse_jsonl(*text));
}

int cmd_replay(const std::string& path) {
  try {
    const auto c = replay_file(path);
    std::cout << "events=" << c.log().size() << " state_hash=" << to_hex(c.state_hash()) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_diff(const std::string& a_path, const std::string& b_path) {
  try {
    auto a = slurp(a_path);
    if (!a) return fail("cannot read report " + a_path);
    auto b = slurp(b_path);
    if (!b) return fail("cannot read report " + b_path);
    std::cout << sim::format_diff(sim::compare(json::parse(*a), json::parse(*b)));
    return kOk;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_report(const std::string& path, std::uint64_t soul_number) {
  try {
    const auto c = replay_file(path);
    const SoulId soul{soul_number};
    if (!c.ledger().has_soul(soul)) return fail("unknown soul " + std::to_string(soul_number));
    json counts = json::object();
    json proofs = json::object();
    for (auto cat : reputation::kCategories) {
      const auto n = c.sbts().count(soul, cat);
      counts[std::string(reputation::to_string(cat))] = n;
      if (n > 0) {
        proofs[std::string(reputation::to_string(cat))] =
            reputation::to_json(c.prove_count_at_least(soul, cat, static_cast<std::size_t>(n)));
      }
    }
    json tokens = json::array();
    for (const auto& [id, s] : c.sbts().sbts) {
      if (s.subject != soul) continue;
      tokens.push_back({{"sbt", id},
                        {"category", reputation::to_string(s.category)},
                        {"status", reputation::to_string(s.status)},
                        {"issuer", s.issuer},
                        {"issued_epoch", s.issued_epoch},
                        {"leaf_digest", to_hex(s.blinded)}});
    }
    json out = {{"soul", soul},
                {"epoch", c.now()},
                {"reputation", c.reputation(soul)},
                {"balance", c.balance(soul)},
                {"category_counts", counts},
                {"commitment_root", to_hex(c.commit_metadata(soul))},
                {"sbts", tokens},
                {"disclosure_proofs", proofs}};
    std::cout << out.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scholarly commons protocol simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".", format = "json", mode;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run a scenario and write its report");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Seed override (beats COMMONS_SEED)");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--mode", mode, "Governance mode override")->check(CLI::IsMember({"bicameral", "token_weighted"}));

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario and print every diagnostic");
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  std::string attack_name, timelock = "on", snapshot = "on";
  Amount loan = 182'000'000;
  auto* attack = app.add_subcommand("attack", "Run a named attack against a fresh world");
  attack->add_option("name", attack_name, "Attack name")->required();
  attack->add_option("--timelock", timelock, "Timelock defense")->check(CLI::IsMember({"on", "off"}));
  attack->add_option("--snapshot", snapshot, "Snapshot defense")->check(CLI::IsMember({"on", "off"}));
  attack->add_option("--loan", loan, "Loan size in base units")->check(CLI::PositiveNumber);

  std::string log_path;
  auto* replay = app.add_subcommand("replay", "Rebuild state from an event log");
  replay->add_option("eventlog", log_path, "events.jsonl")->required();

  std::string report_a, report_b;
  auto* diff = app.add_subcommand("diff", "Compare two reports of the same scenario");
  diff->add_option("a", report_a, "First report")->required();
  diff->add_option("b", report_b, "Second report")->required();

  std::string report_log;
  std::uint64_t soul = 0;
  auto* report = app.add_subcommand("report", "Summarize one soul's credentials from an event log");
  report->add_option("eventlog", report_log, "events.jsonl")->required();
  report->add_option("--soul", soul, "Soul id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*run) {
    if (!seed) {
      if (const char* env = std::getenv("COMMONS_SEED")) {
        try {
          std::size_t used = 0;
          const std::string text(env);
          seed = std::stoull(text, &used);
          if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
        } catch (const std::exception&) {
          std::cerr << "error: COMMONS_SEED must be a non-negative integer\n";
          return kUsage;
        }
      }
    }
    return cmd_run(scenario_path, seed, out_dir, format, mode);
  }
  if (*validate) return cmd_validate(validate_path);
  if (*attack) return cmd_attack(attack_name, timelock, snapshot, loan);
  if (*replay) return cmd_replay(log_path);
  if (*diff) return cmd_diff(report_a, report_b);
  return cmd_report(report_log, soul);
}
