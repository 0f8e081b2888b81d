#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commons/digest.hpp"
#include "commons/types.hpp"

namespace commons {

struct EventRecord {
  std::uint64_t seq{0};
  Epoch epoch{0};
  std::string kind;
  json payload;
  Digest hash{};
};

// hash = SHA-256(previous hash bytes || canonical payload bytes); the genesis
// predecessor is 32 zero bytes.
Digest chain_hash(const Digest& prev, const json& payload);

// Append-only, hash-chained log. Records are never edited or removed.
class EventLog {
 public:
  const EventRecord& append(Epoch epoch, std::string kind, json payload);

  const std::vector<EventRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  Digest head() const;

  std::string to_jsonl() const;

 private:
  std::vector<EventRecord> records_;
};

std::string to_json_line(const EventRecord& r);

// Parses JSON-lines text. A line that does not parse or lacks a field throws
// Error(CorruptLog) naming the seq the line should have carried.
std::vector<EventRecord> parse_jsonl(std::string_view text);

// First seq whose number or hash link does not verify, or nullopt.
std::optional<std::uint64_t> first_invalid_seq(const std::vector<EventRecord>& records);

}  // namespace commons
