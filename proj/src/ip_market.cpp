#include "commons/ip_market.hpp"

#include <numeric>

#include "commons/funding.hpp"

namespace commons::ip {

namespace {

// 2000 * integral of p over [from, from + units].
Int128 scaled_integral(const LinearCurve& c, Amount from, Amount units) {
  const Int128 q = units;
  const Int128 s = from;
  return 2 * static_cast<Int128>(c.base_milli) * q + static_cast<Int128>(c.slope_milli) * (2 * s * q + q * q);
}

Int128 ceil_div(Int128 num, Int128 den) { return num <= 0 ? num / den : (num + den - 1) / den; }

}  // namespace

bool valid_split(std::span<const RoyaltyShare> split) {
  if (split.empty()) return false;
  std::int64_t sum = 0;
  for (const auto& s : split) {
    if (s.bp < 0) return false;
    sum += s.bp;
  }
  return sum == kBasisPoints;
}

json to_json(const RoyaltyReceipt& r) {
  json payouts = json::array();
  for (const auto& [who, amount] : r.payouts) payouts.push_back({who, amount});
  return {{"asset", r.asset}, {"revenue", r.revenue}, {"payouts", payouts}, {"protocol_fee", r.protocol_fee}};
}

RoyaltyReceipt split_revenue(AssetId asset, Amount revenue, std::int64_t fee_bp,
                             std::span<const RoyaltyShare> split) {
  if (revenue <= 0) throw Error(Errc::ZeroRevenue);
  if (!valid_split(split)) throw Error(Errc::BadSplit, "shares must sum to 10000 bp");
  RoyaltyReceipt r;
  r.asset = asset;
  r.revenue = revenue;
  r.protocol_fee = static_cast<Amount>(static_cast<Int128>(revenue) * fee_bp / kBasisPoints);
  std::vector<std::int64_t> weights;
  for (const auto& s : split) weights.push_back(s.bp);
  const auto shares = funding::apportion_exact(revenue - r.protocol_fee, weights);
  for (std::size_t i = 0; i < split.size(); ++i) r.payouts.emplace_back(split[i].recipient, shares[i]);
  return r;
}

Amount buy_cost(const LinearCurve& c, Amount supply, Amount units) {
  return static_cast<Amount>(ceil_div(scaled_integral(c, supply, units), 2000));
}

Amount sell_gross(const LinearCurve& c, Amount supply, Amount units) {
  return static_cast<Amount>(scaled_integral(c, supply - units, units) / 2000);
}

long double reserve_integral(const LinearCurve& c, Amount supply) {
  return static_cast<long double>(scaled_integral(c, 0, supply)) / 2000.0L;
}

std::int64_t marginal_price_milli(const LinearCurve& c, Amount supply) {
  return c.base_milli + c.slope_milli * supply;
}

std::vector<LotDraw> plan_fifo(const std::deque<Lot>& lots, Amount units, Epoch now) {
  std::vector<LotDraw> out;
  for (const auto& lot : lots) {
    if (units == 0) break;
    const Amount take = std::min(units, lot.units);
    out.push_back({take, now - lot.acquired});
    units -= take;
  }
  return out;
}

void consume_fifo(std::deque<Lot>& lots, Amount units) {
  while (units > 0 && !lots.empty()) {
    auto& front = lots.front();
    const Amount take = std::min(units, front.units);
    front.units -= take;
    units -= take;
    if (front.units == 0) lots.pop_front();
  }
}

Amount sell_penalty(Amount gross, const SellPenalty& p, std::span<const LotDraw> draws) {
  if (p.max_bp <= 0 || p.horizon <= 0 || gross <= 0) return 0;
  Int128 weighted = 0;  // sum of units * remaining horizon
  Int128 units = 0;
  for (const auto& d : draws) {
    units += d.units;
    const Epoch left = std::max<Epoch>(0, p.horizon - std::max<Epoch>(0, d.age));
    weighted += static_cast<Int128>(d.units) * left;
  }
  if (units == 0) return 0;
  const Int128 num = static_cast<Int128>(gross) * p.max_bp * weighted;
  const Int128 den = units * kBasisPoints * p.horizon;
  return static_cast<Amount>(ceil_div(num, den));
}

bool IpAsset::has_exclusive() const {
  for (const auto& l : licenses) {
    if (l.exclusive) return true;
  }
  return false;
}

Amount IptPool::units_of(SoulId s) const {
  auto it = holdings.find(s);
  if (it == holdings.end()) return 0;
  Amount total = 0;
  for (const auto& lot : it->second) total += lot.units;
  return total;
}

const IpAsset& IpState::asset(AssetId id) const {
  auto it = assets.find(id);
  if (it == assets.end()) throw Error(Errc::UnknownAsset, std::to_string(id.value));
  return it->second;
}

IpAsset& IpState::asset(AssetId id) { return const_cast<IpAsset&>(static_cast<const IpState&>(*this).asset(id)); }

const IptPool& IpState::pool(PoolId id) const {
  auto it = pools.find(id);
  if (it == pools.end()) throw Error(Errc::UnknownPool, std::to_string(id.value));
  return it->second;
}

IptPool& IpState::pool(PoolId id) { return const_cast<IptPool&>(static_cast<const IpState&>(*this).pool(id)); }

json IpState::to_json() const {
  json a = json::object();
  for (const auto& [id, asset] : assets) {
    json split = json::array();
    for (const auto& s : asset.royalty_split) split.push_back({s.recipient, s.bp});
    json licenses = json::array();
    for (const auto& l : asset.licenses) licenses.push_back({l.licensee, l.price, l.exclusive, l.epoch});
    a[std::to_string(id.value)] = {{"arc", asset.arc},
                                   {"owner", asset.owner},
                                   {"content_commitment", to_hex(asset.content_commitment)},
                                   {"open_access", asset.open_access},
                                   {"noncommercial_license", asset.noncommercial_license},
                                   {"royalty_split", split},
                                   {"licenses", licenses},
                                   {"pool", asset.pool ? json(asset.pool->value) : json(nullptr)}};
  }
  json p = json::object();
  for (const auto& [id, pool] : pools) {
    json holdings = json::object();
    for (const auto& [who, lots] : pool.holdings) {
      json l = json::array();
      for (const auto& lot : lots) l.push_back({lot.units, lot.acquired});
      holdings[std::to_string(who.value)] = l;
    }
    p[std::to_string(id.value)] = {{"asset", pool.asset},
                                   {"reserve", pool.reserve},
                                   {"supply", pool.supply},
                                   {"supply_cap", pool.supply_cap},
                                   {"curve", {pool.curve.base_milli, pool.curve.slope_milli}},
                                   {"penalty", {pool.penalty.max_bp, pool.penalty.horizon}},
                                   {"holdings", holdings},
                                   {"trades", pool.trades}};
  }
  return {{"assets", a},
          {"pools", p},
          {"assets_created", assets_created},
          {"pools_created", pools_created},
          {"protocol_fee_bp", protocol_fee_bp}};
}

}  // namespace commons::ip
