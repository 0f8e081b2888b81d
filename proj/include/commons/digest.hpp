#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "commons/types.hpp"

namespace commons {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 over an OpenSSL EVP context.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view text);
  Sha256& update(const Digest& d) { return update(std::span<const std::uint8_t>(d)); }
  Sha256& update_byte(std::uint8_t b);
  Digest finish();

 private:
  void* ctx_;
};

Digest sha256(std::string_view text);

std::string to_hex(const Digest& d);
// Strict: exactly 64 lowercase hex characters.
std::optional<Digest> digest_from_hex(std::string_view hex);

// Canonical JSON text: sorted keys, no insignificant whitespace, UTF-8.
std::string canonical(const json& j);

void to_json(json& j, const Digest& d);
void from_json(const json& j, Digest& d);

}  // namespace commons

// Digest is a std::array, so ADL alone would pick the library's array codec.
template <>
struct nlohmann::adl_serializer<commons::Digest> {
  static void to_json(json& j, const commons::Digest& d) { commons::to_json(j, d); }
  static void from_json(const json& j, commons::Digest& d) { commons::from_json(j, d); }
};
