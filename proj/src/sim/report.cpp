#include "commons/sim/report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "commons/digest.hpp"
#include "commons/kernels.hpp"

namespace commons::sim {

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::map<Epoch, json> rows_by_epoch(const json& report) {
  std::map<Epoch, json> out;
  for (const auto& row : report.at("series")) out[row.at("epoch").get<Epoch>()] = row;
  return out;
}

double mean_of(const json& report, const char* key) {
  const auto& series = report.at("series");
  if (series.empty()) return 0;
  double sum = 0;
  for (const auto& row : series) sum += row.at(key).get<double>();
  return sum / static_cast<double>(series.size());
}

}  // namespace

double gini(const std::vector<double>& values) { return kernels::gini_parallel(values); }

std::string report_csv(const json& report) {
  std::ostringstream out;
  out << "epoch,gini,participation,treasury\n";
  for (const auto& row : report.at("series")) {
    out << row.at("epoch").get<Epoch>() << ',' << fixed(row.at("gini").get<double>()) << ','
        << fixed(row.at("participation").get<double>()) << ',' << row.at("treasury").get<Amount>() << '\n';
  }
  return out.str();
}

std::string content_hash(const json& report) {
  json body = report;
  body.erase("content_hash");
  return to_hex(sha256(canonical(body)));
}

json seal_report(json report) {
  report["content_hash"] = content_hash(report);
  return report;
}

json compare(const json& a, const json& b) {
  const auto name_a = a.at("scenario").get<std::string>();
  const auto name_b = b.at("scenario").get<std::string>();
  if (name_a != name_b) throw Error(Errc::ScenarioMismatch, name_a + " vs " + name_b);

  json series = json::array();
  const auto ra = rows_by_epoch(a);
  const auto rb = rows_by_epoch(b);
  std::map<Epoch, int> epochs;
  for (const auto& [e, r] : ra) epochs[e] |= 1;
  for (const auto& [e, r] : rb) epochs[e] |= 2;
  for (const auto& [e, which] : epochs) {
    if (which != 3) {
      series.push_back({{"epoch", e}, {"only_in", which == 1 ? "a" : "b"}});
      continue;
    }
    const auto& x = ra.at(e);
    const auto& y = rb.at(e);
    if (x == y) continue;
    series.push_back({{"epoch", e},
                      {"gini", y.at("gini").get<double>() - x.at("gini").get<double>()},
                      {"participation", y.at("participation").get<double>() - x.at("participation").get<double>()},
                      {"treasury", y.at("treasury").get<Amount>() - x.at("treasury").get<Amount>()}});
  }

  json events = json::object();
  std::map<std::string, std::int64_t> counts;
  for (const auto& [k, v] : a.at("event_counts").items()) counts[k] -= v.get<std::int64_t>();
  for (const auto& [k, v] : b.at("event_counts").items()) counts[k] += v.get<std::int64_t>();
  for (const auto& [k, d] : counts) {
    if (d != 0) events[k] = d;
  }

  json proposals = json::object();
  const auto& pa = a.at("proposals");
  const auto& pb = b.at("proposals");
  for (const auto& [label, p] : pa.items()) {
    const auto before = p.at("outcome").get<std::string>();
    const auto after = pb.contains(label) ? pb.at(label).at("outcome").get<std::string>() : std::string("absent");
    if (before != after) proposals[label] = before + " -> " + after;
  }
  for (const auto& [label, p] : pb.items()) {
    if (!pa.contains(label)) proposals[label] = "absent -> " + p.at("outcome").get<std::string>();
  }

  json out = {{"scenario", name_a},
              {"series", series},
              {"event_counts", events},
              {"proposals", proposals},
              {"captures", static_cast<std::int64_t>(b.at("captures").size()) -
                               static_cast<std::int64_t>(a.at("captures").size())},
              {"mean_gini", mean_of(b, "gini") - mean_of(a, "gini")},
              {"mean_participation", mean_of(b, "participation") - mean_of(a, "participation")}};
  if (a.at("attack") != b.at("attack")) out["attack"] = {{"a", a.at("attack")}, {"b", b.at("attack")}};
  return out;
}

bool diff_empty(const json& d) {
  return d.at("series").empty() && d.at("event_counts").empty() && d.at("proposals").empty() &&
         d.at("captures").get<std::int64_t>() == 0 && d.at("mean_gini").get<double>() == 0 &&
         d.at("mean_participation").get<double>() == 0 && !d.contains("attack");
}

std::string format_diff(const json& d) {
  if (diff_empty(d)) return "no differences\n";
  std::ostringstream out;
  out << "scenario " << d.at("scenario").get<std::string>() << '\n';
  out << "mean_gini " << fixed(d.at("mean_gini").get<double>()) << '\n';
  out << "mean_participation " << fixed(d.at("mean_participation").get<double>()) << '\n';
  out << "captures " << d.at("captures").get<std::int64_t>() << '\n';
  for (const auto& row : d.at("series")) {
    if (row.contains("only_in")) {
      out << "epoch " << row.at("epoch").get<Epoch>() << " only in " << row.at("only_in").get<std::string>() << '\n';
      continue;
    }
    out << "epoch " << row.at("epoch").get<Epoch>() << " gini " << fixed(row.at("gini").get<double>())
        << " participation " << fixed(row.at("participation").get<double>()) << " treasury "
        << row.at("treasury").get<Amount>() << '\n';
  }
  for (const auto& [k, v] : d.at("event_counts").items()) out << "events " << k << ' ' << v.get<std::int64_t>() << '\n';
  for (const auto& [k, v] : d.at("proposals").items()) out << "proposal " << k << ' ' << v.get<std::string>() << '\n';
  if (d.contains("attack")) {
    out << "attack " << d.at("attack").at("a").dump() << " -> " << d.at("attack").at("b").dump() << '\n';
  }
  return out.str();
}

}  // namespace commons::sim
