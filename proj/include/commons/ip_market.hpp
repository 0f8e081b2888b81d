#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "commons/digest.hpp"
#include "commons/types.hpp"

namespace commons::ip {

inline constexpr std::int64_t kBasisPoints = 10000;
inline constexpr std::int64_t kDefaultProtocolFeeBp = 50;

struct RoyaltyShare {
  SoulId recipient;
  std::int64_t bp{0};
};

bool valid_split(std::span<const RoyaltyShare> split);

struct RoyaltyReceipt {
  AssetId asset;
  Amount revenue{0};
  std::vector<std::pair<SoulId, Amount>> payouts;
  Amount protocol_fee{0};
};

json to_json(const RoyaltyReceipt& r);

// fee = floor(revenue * fee_bp / 10000); the rest is split by basis points
// with largest-remainder rounding. Payouts plus fee equal revenue exactly.
RoyaltyReceipt split_revenue(AssetId asset, Amount revenue, std::int64_t fee_bp,
                             std::span<const RoyaltyShare> split);

// Price p(x) = (base + slope * x) / 1000 base units per IPT, so both
// parameters are in thousandths of a base unit.
struct LinearCurve {
  std::int64_t base_milli{1000};
  std::int64_t slope_milli{0};
};

// ceil of the integral of p over [supply, supply + units].
Amount buy_cost(const LinearCurve& c, Amount supply, Amount units);
// floor of the integral of p over [supply - units, supply].
Amount sell_gross(const LinearCurve& c, Amount supply, Amount units);
// Exact integral of p over [0, supply].
long double reserve_integral(const LinearCurve& c, Amount supply);
// Marginal price in thousandths at a given supply.
std::int64_t marginal_price_milli(const LinearCurve& c, Amount supply);

// Time-decay sell penalty: fraction max_bp/10000 at age 0, linearly to 0 at
// `horizon` epochs.
struct SellPenalty {
  std::int64_t max_bp{0};
  Epoch horizon{0};
};

struct Lot {
  Amount units{0};
  Epoch acquired{0};
};

struct LotDraw {
  Amount units{0};
  Epoch age{0};
};

// FIFO draw plan for `units` out of `lots` at `now`. Caller checks holdings.
std::vector<LotDraw> plan_fifo(const std::deque<Lot>& lots, Amount units, Epoch now);
void consume_fifo(std::deque<Lot>& lots, Amount units);

// Penalty rounds up, so a seller never keeps a fractional unit the formula
// would have withheld.
Amount sell_penalty(Amount gross, const SellPenalty& p, std::span<const LotDraw> draws);

struct License {
  SoulId licensee;
  Amount price{0};
  bool exclusive{false};
  Epoch epoch{0};
};

struct IpAsset {
  AssetId id;
  ArcId arc;
  SoulId owner;
  Digest content_commitment{};
  bool open_access{false};
  // Permanent universal non-commercial license; set iff open access was ever
  // declared and never cleared afterwards.
  bool noncommercial_license{false};
  std::vector<RoyaltyShare> royalty_split;
  std::vector<License> licenses;
  std::optional<PoolId> pool;

  bool has_exclusive() const;
};

struct IptPool {
  PoolId id;
  AssetId asset;
  AccountId reserve;
  Amount supply{0};
  Amount supply_cap{0};
  LinearCurve curve;
  SellPenalty penalty;
  std::map<SoulId, std::deque<Lot>> holdings;
  std::uint64_t trades{0};

  Amount units_of(SoulId s) const;
};

struct IpState {
  std::map<AssetId, IpAsset> assets;
  std::map<PoolId, IptPool> pools;
  std::uint64_t assets_created{0};
  std::uint64_t pools_created{0};
  std::int64_t protocol_fee_bp{kDefaultProtocolFeeBp};

  const IpAsset& asset(AssetId id) const;
  IpAsset& asset(AssetId id);
  const IptPool& pool(PoolId id) const;
  IptPool& pool(PoolId id);

  json to_json() const;
};

}  // namespace commons::ip
