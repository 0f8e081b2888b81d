#include "commons/commons.hpp"

namespace commons {

namespace {

json split_json(const std::vector<ip::RoyaltyShare>& split) {
  json out = json::array();
  for (const auto& s : split) out.push_back({s.recipient, s.bp});
  return out;
}

void require_owner(const ip::IpAsset& a, SoulId caller) {
  if (a.owner != caller) throw Error(Errc::NotOwner, "asset#" + std::to_string(a.id.value));
}

}  // namespace

AssetId Commons::mint_ipnft(ArcId arc, SoulId owner, const Digest& content_commitment, bool open_access,
                            const std::vector<ip::RoyaltyShare>& royalty_split) {
  gov_.arc(arc);
  require_soul(owner);
  if (!ip::valid_split(royalty_split)) throw Error(Errc::BadSplit, "shares must sum to 10000 bp");
  for (const auto& s : royalty_split) require_soul(s.recipient);
  const AssetId id{ip_.assets_created + 1};
  commit("IpMinted", {{"asset", id},
                      {"arc", arc},
                      {"owner", owner},
                      {"content_commitment", to_hex(content_commitment)},
                      {"open_access", open_access},
                      {"royalty_split", split_json(royalty_split)}});
  return id;
}

void Commons::set_open_access(AssetId asset, SoulId caller, bool open_access) {
  const auto& a = ip_.asset(asset);
  require_owner(a, caller);
  if (a.open_access && !open_access) throw Error(Errc::OpenAccessPermanent);
  if (a.open_access == open_access) return;
  commit("OpenAccessDeclared", {{"asset", asset}});
}

ip::RoyaltyReceipt Commons::grant_commercial_license(AssetId asset, SoulId caller, SoulId licensee, Amount price,
                                                     bool exclusive) {
  const auto& a = ip_.asset(asset);
  require_owner(a, caller);
  require_soul(licensee);
  if (a.has_exclusive() || (exclusive && !a.licenses.empty())) {
    throw Error(Errc::ExclusiveConflict, "asset#" + std::to_string(asset.value));
  }
  auto receipt = ip::split_revenue(asset, price, ip_.protocol_fee_bp, a.royalty_split);
  if (free_balance(licensee) < price) throw Error(Errc::InsufficientFree, "license price");
  commit("LicenseGranted", {{"asset", asset},
                            {"licensee", licensee},
                            {"price", price},
                            {"exclusive", exclusive},
                            {"receipt", ip::to_json(receipt)}});
  return receipt;
}

ip::RoyaltyReceipt Commons::distribute_royalties(AssetId asset, SoulId payer, Amount revenue) {
  const auto& a = ip_.asset(asset);
  require_soul(payer);
  auto receipt = ip::split_revenue(asset, revenue, ip_.protocol_fee_bp, a.royalty_split);
  if (free_balance(payer) < revenue) throw Error(Errc::InsufficientFree, "royalty revenue");
  commit("RoyaltiesDistributed", {{"asset", asset}, {"payer", payer}, {"receipt", ip::to_json(receipt)}});
  return receipt;
}

PoolId Commons::fractionalize(AssetId asset, SoulId caller, Amount supply_cap, ip::LinearCurve curve,
                              ip::SellPenalty penalty) {
  const auto& a = ip_.asset(asset);
  require_owner(a, caller);
  if (a.pool) throw Error(Errc::AlreadyFractionalized);
  if (supply_cap <= 0) throw Error(Errc::BadPayload, "supply cap must be positive");
  if (curve.base_milli < 0 || curve.slope_milli < 0) throw Error(Errc::BadPayload, "curve parameters must be >= 0");
  if (penalty.max_bp < 0 || penalty.max_bp > ip::kBasisPoints || penalty.horizon < 0 ||
      (penalty.max_bp > 0 && penalty.horizon == 0)) {
    throw Error(Errc::BadPayload, "sell penalty needs 0 <= max_bp <= 10000 and a positive horizon");
  }
  const PoolId id{ip_.pools_created + 1};
  commit("Fractionalized", {{"pool", id},
                            {"asset", asset},
                            {"supply_cap", supply_cap},
                            {"base_milli", curve.base_milli},
                            {"slope_milli", curve.slope_milli},
                            {"penalty_bp", penalty.max_bp},
                            {"horizon", penalty.horizon}});
  return id;
}

Amount Commons::curve_buy(PoolId pool, SoulId buyer, Amount units) {
  const auto& p = ip_.pool(pool);
  require_soul(buyer);
  if (units <= 0) throw Error(Errc::ZeroAmount, "units");
  if (p.supply + units > p.supply_cap) {
    throw Error(Errc::SupplyCapExceeded, std::to_string(p.supply + units) + " > " + std::to_string(p.supply_cap));
  }
  const auto cost = ip::buy_cost(p.curve, p.supply, units);
  if (free_balance(buyer) < cost) throw Error(Errc::InsufficientFree, "curve cost " + std::to_string(cost));
  commit("CurveBought", {{"pool", pool}, {"buyer", buyer}, {"units", units}, {"cost", cost}});
  return cost;
}

Amount Commons::curve_sell(PoolId pool, SoulId seller, Amount units) {
  const auto& p = ip_.pool(pool);
  require_soul(seller);
  if (units <= 0) throw Error(Errc::ZeroAmount, "units");
  if (p.units_of(seller) < units) throw Error(Errc::InsufficientUnits);
  const auto gross = ip::sell_gross(p.curve, p.supply, units);
  const auto draws = ip::plan_fifo(p.holdings.at(seller), units, now());
  const auto penalty = ip::sell_penalty(gross, p.penalty, draws);
  if (ledger_.balance(p.reserve) < gross) throw Error(Errc::ReserveUnderflow);
  commit("CurveSold", {{"pool", pool}, {"seller", seller}, {"units", units}, {"gross", gross}, {"penalty", penalty}});
  return gross - penalty;
}

void Commons::pay_receipt(AccountId payer, const json& receipt) {
  for (const auto& entry : receipt.at("payouts")) {
    const auto amount = entry.at(1).get<Amount>();
    if (amount > 0) ledger_.move(payer, AccountId::of(entry.at(0).get<SoulId>()), amount);
  }
  const auto fee = receipt.at("protocol_fee").get<Amount>();
  if (fee > 0) ledger_.move(payer, AccountId::commons_treasury(), fee);
}

void Commons::apply_ip_minted(const json& p) {
  ip::IpAsset a;
  a.id = p.at("asset").get<AssetId>();
  if (a.id.value != ip_.assets_created + 1) throw Error(Errc::CorruptLog, "asset ids must be sequential");
  a.arc = p.at("arc").get<ArcId>();
  a.owner = p.at("owner").get<SoulId>();
  a.content_commitment = p.at("content_commitment").get<Digest>();
  a.open_access = p.at("open_access").get<bool>();
  a.noncommercial_license = a.open_access;
  for (const auto& s : p.at("royalty_split")) a.royalty_split.push_back({s.at(0).get<SoulId>(), s.at(1).get<std::int64_t>()});
  if (!ip::valid_split(a.royalty_split)) throw Error(Errc::BadSplit);
  ip_.assets.emplace(a.id, std::move(a));
  ip_.assets_created = p.at("asset").get<AssetId>().value;
}

void Commons::apply_open_access_declared(const json& p) {
  auto& a = ip_.asset(p.at("asset").get<AssetId>());
  a.open_access = true;
  a.noncommercial_license = true;
}

void Commons::apply_license_granted(const json& p) {
  auto& a = ip_.asset(p.at("asset").get<AssetId>());
  const auto licensee = p.at("licensee").get<SoulId>();
  const auto price = p.at("price").get<Amount>();
  const auto exclusive = p.at("exclusive").get<bool>();
  if (a.has_exclusive() || (exclusive && !a.licenses.empty())) throw Error(Errc::ExclusiveConflict);
  const auto expected = ip::to_json(ip::split_revenue(a.id, price, ip_.protocol_fee_bp, a.royalty_split));
  if (expected != p.at("receipt")) throw Error(Errc::CorruptLog, "receipt does not recompute");
  pay_receipt(AccountId::of(licensee), expected);
  a.licenses.push_back({licensee, price, exclusive, now()});
}

void Commons::apply_royalties_distributed(const json& p) {
  const auto& a = ip_.asset(p.at("asset").get<AssetId>());
  const auto& receipt = p.at("receipt");
  const auto expected =
      ip::to_json(ip::split_revenue(a.id, receipt.at("revenue").get<Amount>(), ip_.protocol_fee_bp, a.royalty_split));
  if (expected != receipt) throw Error(Errc::CorruptLog, "receipt does not recompute");
  pay_receipt(AccountId::of(p.at("payer").get<SoulId>()), expected);
}

void Commons::apply_fractionalized(const json& p) {
  ip::IptPool pool;
  pool.id = p.at("pool").get<PoolId>();
  if (pool.id.value != ip_.pools_created + 1) throw Error(Errc::CorruptLog, "pool ids must be sequential");
  pool.asset = p.at("asset").get<AssetId>();
  auto& a = ip_.asset(pool.asset);
  if (a.pool) throw Error(Errc::AlreadyFractionalized);
  pool.reserve = AccountId{AccountKind::Reserve, pool.id.value};
  pool.supply_cap = p.at("supply_cap").get<Amount>();
  pool.curve = {p.at("base_milli").get<std::int64_t>(), p.at("slope_milli").get<std::int64_t>()};
  pool.penalty = {p.at("penalty_bp").get<std::int64_t>(), p.at("horizon").get<Epoch>()};
  a.pool = pool.id;
  ledger_.open(pool.reserve);
  ip_.pools.emplace(pool.id, std::move(pool));
  ip_.pools_created = p.at("pool").get<PoolId>().value;
}

void Commons::apply_curve_bought(const json& p) {
  auto& pool = ip_.pool(p.at("pool").get<PoolId>());
  const auto buyer = p.at("buyer").get<SoulId>();
  const auto units = p.at("units").get<Amount>();
  const auto cost = ip::buy_cost(pool.curve, pool.supply, units);
  if (units <= 0 || cost != p.at("cost").get<Amount>()) throw Error(Errc::CorruptLog, "cost does not recompute");
  if (pool.supply + units > pool.supply_cap) throw Error(Errc::SupplyCapExceeded);
  ledger_.move(AccountId::of(buyer), pool.reserve, cost);
  pool.supply += units;
  auto& lots = pool.holdings[buyer];
  if (!lots.empty() && lots.back().acquired == now()) {
    lots.back().units += units;
  } else {
    lots.push_back({units, now()});
  }
  ++pool.trades;
}

void Commons::apply_curve_sold(const json& p) {
  auto& pool = ip_.pool(p.at("pool").get<PoolId>());
  const auto seller = p.at("seller").get<SoulId>();
  const auto units = p.at("units").get<Amount>();
  if (units <= 0 || pool.units_of(seller) < units) throw Error(Errc::InsufficientUnits);
  const auto gross = ip::sell_gross(pool.curve, pool.supply, units);
  auto& lots = pool.holdings.at(seller);
  const auto penalty = ip::sell_penalty(gross, pool.penalty, ip::plan_fifo(lots, units, now()));
  if (gross != p.at("gross").get<Amount>() || penalty != p.at("penalty").get<Amount>()) {
    throw Error(Errc::CorruptLog, "sale does not recompute");
  }
  ledger_.move(pool.reserve, AccountId::of(seller), gross - penalty);
  ledger_.move(pool.reserve, gov_.arc(ip_.asset(pool.asset).arc).treasury, penalty);
  pool.supply -= units;
  ip::consume_fifo(lots, units);
  if (lots.empty()) pool.holdings.erase(seller);
  ++pool.trades;
}

}  // namespace commons
