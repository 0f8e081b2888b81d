#include "commons/event_log.hpp"

namespace commons {

Digest chain_hash(const Digest& prev, const json& payload) {
  return Sha256{}.update(prev).update(canonical(payload)).finish();
}

const EventRecord& EventLog::append(Epoch epoch, std::string kind, json payload) {
  EventRecord r;
  r.seq = records_.size() + 1;
  r.epoch = epoch;
  r.kind = std::move(kind);
  r.hash = chain_hash(head(), payload);
  r.payload = std::move(payload);
  records_.push_back(std::move(r));
  return records_.back();
}

Digest EventLog::head() const { return records_.empty() ? Digest{} : records_.back().hash; }

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    out += to_json_line(r);
    out += '\n';
  }
  return out;
}

std::string to_json_line(const EventRecord& r) {
  json j = {{"seq", r.seq},
            {"epoch", r.epoch},
            {"kind", r.kind},
            {"payload", r.payload},
            {"hash", to_hex(r.hash)}};
  return canonical(j);
}

std::vector<EventRecord> parse_jsonl(std::string_view text) {
  std::vector<EventRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto expected_seq = out.size() + 1;
    auto fail = [&](const std::string& why) {
      throw Error(Errc::CorruptLog, "seq " + std::to_string(expected_seq) + ": " + why);
    };
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("line is not a JSON object");
    EventRecord r;
    try {
      r.seq = j.at("seq").get<std::uint64_t>();
      r.epoch = j.at("epoch").get<Epoch>();
      r.kind = j.at("kind").get<std::string>();
      r.payload = j.at("payload");
      auto digest = digest_from_hex(j.at("hash").get<std::string>());
      if (!digest) fail("malformed hash");
      r.hash = *digest;
    } catch (const json::exception& e) {
      fail(e.what());
    }
    if (j.size() != 5) fail("unexpected fields");
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<std::uint64_t> first_invalid_seq(const std::vector<EventRecord>& records) {
  Digest prev{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.seq != i + 1 || chain_hash(prev, r.payload) != r.hash) return i + 1;
    prev = r.hash;
  }
  return std::nullopt;
}

}  // namespace commons
