#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "analytics.hpp"
#include "pools.hpp"
#include "tokens.hpp"

namespace rugscan {

/// LP-burn threshold as an exact ratio; doubles are rounded to 1e-9 steps.
struct Threshold
{
    Amount numerator = 99;
    Amount denominator = 100;

    static Threshold from_double(double theta)
    {
        if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("threshold must be in [0, 1]");
        Threshold t;
        t.denominator = 1'000'000'000;
        t.numerator = static_cast<std::int64_t>(std::llround(theta * 1e9));
        return t;
    }

    /// part >= theta * whole
    bool reached(const Amount& part, const Amount& whole) const { return part * denominator >= whole * numerator; }
};

struct ExitScamMatch
{
    bool matched = false;
    std::size_t mint_count = 0;
    std::size_t burn_count = 0;
    std::optional<MintEvent> mint;
    std::optional<BurnEvent> burn;
    /// minting tx_sender
    Address operator_address;
    /// burning tx_sender
    Address burner;
    bool operator_mismatch = false;
    std::string reason;
};

/// Exactly one Mint, exactly one Burn after it, and the Burn's LP amount is at
/// least `threshold` of the Mint's.
inline ExitScamMatch detect_exit_scam(const PoolTimeline& t, const Threshold& threshold = {})
{
    ExitScamMatch m;
    for (const auto& e : t.events) {
        if (const auto* mint = std::get_if<MintEvent>(&e)) {
            if (++m.mint_count == 1) m.mint = *mint;
        } else if (const auto* burn = std::get_if<BurnEvent>(&e)) {
            if (++m.burn_count == 1) m.burn = *burn;
        }
    }
    if (m.mint_count != 1) {
        m.reason = std::to_string(m.mint_count) + " mint events";
        return m;
    }
    if (m.burn_count != 1) {
        m.reason = std::to_string(m.burn_count) + " burn events";
        return m;
    }
    m.operator_address = m.mint->at.tx_sender;
    m.burner = m.burn->at.tx_sender;
    m.operator_mismatch = m.operator_address != m.burner;
    if (!(m.mint->at.key() < m.burn->at.key())) {
        m.reason = "burn precedes mint";
        return m;
    }
    if (!threshold.reached(m.burn->lp_amount, m.mint->lp_amount)) {
        m.reason = "burned LP below threshold";
        return m;
    }
    m.matched = true;
    return m;
}

inline ExitScamMatch detect_exit_scam(const PoolTimeline& t, double threshold)
{
    return detect_exit_scam(t, Threshold::from_double(threshold));
}

enum class Pricing { priced, unpriceable, both_valuable };

inline const char* to_string(Pricing p)
{
    switch (p) {
    case Pricing::priced: return "priced";
    case Pricing::unpriceable: return "unpriceable";
    default: return "both-valuable";
    }
}

struct QuoteSide
{
    Pricing pricing = Pricing::unpriceable;
    Address scam_token;
    Address quote_token;
    bool quote_is_token0 = false;
};

inline QuoteSide identify_quote_token(const PoolRecord& record, const std::set<Address>& valuable)
{
    QuoteSide q;
    const bool v0 = valuable.contains(record.token0);
    const bool v1 = valuable.contains(record.token1);
    if (v0 && v1) q.pricing = Pricing::both_valuable;
    else if (!v0 && !v1) q.pricing = Pricing::unpriceable;
    else {
        q.pricing = Pricing::priced;
        q.quote_is_token0 = v0;
        q.quote_token = v0 ? record.token0 : record.token1;
        q.scam_token = v0 ? record.token1 : record.token0;
    }
    return q;
}

enum class Manipulation { none, pump, hedge, wash_trading };

inline const char* to_string(Manipulation m)
{
    switch (m) {
    case Manipulation::none: return "none";
    case Manipulation::pump: return "pump";
    case Manipulation::hedge: return "hedge";
    default: return "wash_trading";
    }
}

/// Buy = quote token in, scam token out.
inline bool is_buy(const SwapEvent& s, const QuoteSide& q)
{
    return q.quote_is_token0 ? s.amount0_in > 0 : s.amount1_in > 0;
}

inline Amount quote_in(const SwapEvent& s, const QuoteSide& q) { return q.quote_is_token0 ? s.amount0_in : s.amount1_in; }
inline Amount quote_out(const SwapEvent& s, const QuoteSide& q) { return q.quote_is_token0 ? s.amount0_out : s.amount1_out; }

inline Manipulation classify_manipulation(const PoolTimeline& t, const Address& operator_address, const QuoteSide& q)
{
    bool buys = false, sells = false;
    for (const auto& e : t.events)
        if (const auto* s = std::get_if<SwapEvent>(&e); s && s->at.tx_sender == operator_address)
            (is_buy(*s, q) ? buys : sells) = true;
    if (buys && sells) return Manipulation::wash_trading;
    if (buys) return Manipulation::pump;
    if (sells) return Manipulation::hedge;
    return Manipulation::none;
}

struct VictimSwaps
{
    std::size_t buy_count = 0;
    std::size_t sell_count = 0;
    std::set<Address> buyer_addresses;
    std::set<Address> seller_addresses;
    /// quote amount paid by buyers plus received by sellers
    Amount quote_volume;
};

struct RugPullReport
{
    Address pool;
    Address scam_token;
    Address quote_token;
    Address operator_address;
    BlockRef mint_block;
    BlockRef burn_block;
    Amount minted_lp;
    Amount burned_lp;
    Amount quote_added;
    Amount quote_removed;
    Amount delta_B;
    Amount T_in;
    Amount T_out;
    Amount fees_base;
    Amount fees_swap;
    Amount base_gain;
    Amount net_gain;
    Manipulation manipulation = Manipulation::none;
    bool successful = false;
    VictimSwaps victim_swaps;
    std::size_t operator_swaps = 0;
    std::size_t base_transactions = 0;
    /// token creation, pool creation, mint and burn did not use four distinct transactions
    bool aggregated = false;
    /// token creation record unavailable; fees_base covers what was attributable
    bool partial_fees = false;
    bool operator_mismatch = false;
    /// gas is paid in the native coin; it is only netted against a wrapped-native quote
    bool fees_in_quote = true;
};

struct GainContext
{
    /// creation record of the scam token, when known
    const ContractCreation* scam_creation = nullptr;
    /// false when the quote is not the wrapped native coin
    bool fees_in_quote = true;
};

/// Gain fields of the report for a matched timeline:
///   base_gain = delta_B - fees_base
///   net_gain  = base_gain - T_in + T_out - fees_swap
inline RugPullReport compute_gains(const PoolTimeline& t, const ExitScamMatch& match, const QuoteSide& q,
                                   const GainContext& ctx = {})
{
    if (!match.matched || !match.mint || !match.burn) throw std::invalid_argument("compute_gains needs a matched exit scam");
    if (q.pricing != Pricing::priced) throw std::invalid_argument("compute_gains needs a priced pool");
    RugPullReport r;
    r.pool = t.record.pool;
    r.scam_token = q.scam_token;
    r.quote_token = q.quote_token;
    r.operator_address = match.operator_address;
    r.operator_mismatch = match.operator_mismatch;
    r.mint_block = match.mint->at.block;
    r.burn_block = match.burn->at.block;
    r.minted_lp = match.mint->lp_amount;
    r.burned_lp = match.burn->lp_amount;
    r.quote_added = q.quote_is_token0 ? match.mint->amount0 : match.mint->amount1;
    r.quote_removed = q.quote_is_token0 ? match.burn->amount0 : match.burn->amount1;
    r.delta_B = r.quote_removed - r.quote_added;
    r.fees_in_quote = ctx.fees_in_quote;

    std::set<TxHash> base_txs;
    auto add_base = [&](const TxHash& h, const Amount& fee) {
        if (base_txs.insert(h).second) r.fees_base += fee;
    };
    if (ctx.scam_creation) add_base(ctx.scam_creation->tx_hash, tx_fee(ctx.scam_creation->gas_used, ctx.scam_creation->gas_price));
    else r.partial_fees = true;
    add_base(t.record.tx_hash, tx_fee(t.record.gas_used, t.record.gas_price));
    add_base(match.mint->at.tx_hash, match.mint->at.fee());
    add_base(match.burn->at.tx_hash, match.burn->at.fee());
    r.base_transactions = base_txs.size();
    r.aggregated = r.base_transactions < (r.partial_fees ? 3u : 4u);

    std::set<TxHash> swap_txs;
    bool buys = false, sells = false;
    for (const auto& e : t.events) {
        const auto* s = std::get_if<SwapEvent>(&e);
        if (!s) continue;
        if (s->at.tx_sender == r.operator_address) {
            ++r.operator_swaps;
            r.T_in += quote_in(*s, q);
            r.T_out += quote_out(*s, q);
            (is_buy(*s, q) ? buys : sells) = true;
            if (!base_txs.contains(s->at.tx_hash) && swap_txs.insert(s->at.tx_hash).second) r.fees_swap += s->at.fee();
        } else if (is_buy(*s, q)) {
            ++r.victim_swaps.buy_count;
            r.victim_swaps.buyer_addresses.insert(s->at.tx_sender);
            r.victim_swaps.quote_volume += quote_in(*s, q);
        } else {
            ++r.victim_swaps.sell_count;
            r.victim_swaps.seller_addresses.insert(s->at.tx_sender);
            r.victim_swaps.quote_volume += quote_out(*s, q);
        }
    }
    r.manipulation = buys && sells ? Manipulation::wash_trading
                     : buys        ? Manipulation::pump
                     : sells       ? Manipulation::hedge
                                   : Manipulation::none;

    const Amount gas_base = ctx.fees_in_quote ? r.fees_base : Amount(0);
    const Amount gas_swap = ctx.fees_in_quote ? r.fees_swap : Amount(0);
    r.base_gain = r.delta_B - gas_base;
    r.net_gain = r.base_gain - r.T_in + r.T_out - gas_swap;
    r.successful = r.net_gain > 0;
    return r;
}

enum class RugScope { one_day, all };

inline RugScope parse_rug_scope(std::string_view s)
{
    if (s == "one-day") return RugScope::one_day;
    if (s == "all") return RugScope::all;
    throw std::invalid_argument("scope must be one-day or all");
}

struct RugPullOptions
{
    Threshold threshold;
    RugScope scope = RugScope::one_day;
    std::set<Address> valuable;
    std::optional<Address> wrapped_native;
};

struct ExcludedPool
{
    Address pool;
    Pricing pricing = Pricing::unpriceable;
};

struct RugPullAnalysis
{
    std::vector<RugPullReport> reports;
    /// matched pools that could not be priced
    std::vector<ExcludedPool> excluded;
    std::size_t pools_examined = 0;
    std::size_t matched = 0;
    /// matched and priced but outside the scope
    std::size_t out_of_scope = 0;

    std::size_t successful_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(reports.begin(), reports.end(), [](const RugPullReport& r) { return r.successful; }));
    }
};

/// Runs detection and gain accounting over every timeline. Under the one-day
/// scope only pools whose scam token is a known token living under a day are
/// reported.
inline RugPullAnalysis analyze_rugpulls(const std::map<Address, PoolTimeline>& timelines,
                                        std::span<const TokenRecord> tokens,
                                        std::span<const LifetimeRecord> lifetimes, const RugPullOptions& opt)
{
    std::unordered_map<Address, const TokenRecord*> by_address;
    for (const auto& t : tokens) by_address.emplace(t.address, &t);
    std::unordered_set<Address> one_day;
    for (const auto& l : lifetimes)
        if (l.kind == LifetimeKind::token && l.within_one_day()) one_day.insert(l.subject);

    auto valuable = opt.valuable;
    if (opt.wrapped_native) valuable.insert(*opt.wrapped_native);

    RugPullAnalysis out;
    for (const auto& [addr, t] : timelines) {
        ++out.pools_examined;
        const auto m = detect_exit_scam(t, opt.threshold);
        if (!m.matched) continue;
        ++out.matched;
        const auto q = identify_quote_token(t.record, valuable);
        if (q.pricing != Pricing::priced) {
            out.excluded.push_back({addr, q.pricing});
            continue;
        }
        if (opt.scope == RugScope::one_day && !one_day.contains(q.scam_token)) {
            ++out.out_of_scope;
            continue;
        }
        GainContext ctx;
        if (auto it = by_address.find(q.scam_token); it != by_address.end()) ctx.scam_creation = &it->second->creation;
        ctx.fees_in_quote = opt.wrapped_native && q.quote_token == *opt.wrapped_native;
        out.reports.push_back(compute_gains(t, m, q, ctx));
    }
    return out;
}

struct VictimStats
{
    std::size_t unique_victims = 0;
    std::size_t buy_count = 0;
    std::size_t sell_count = 0;
    Amount quote_volume;

    std::size_t swap_count() const { return buy_count + sell_count; }
    double buy_share() const { return swap_count() ? static_cast<double>(buy_count) / static_cast<double>(swap_count()) : 0.0; }
    /// mean quote amount per victim swap, floored
    Amount mean_swap_quote() const { return swap_count() ? Amount(quote_volume / swap_count()) : Amount(0); }
};

/// Aggregates victim activity over reports; operator swaps are never counted.
inline VictimStats victim_stats(std::span<const RugPullReport> reports)
{
    VictimStats s;
    std::set<Address> victims;
    for (const auto& r : reports) {
        s.buy_count += r.victim_swaps.buy_count;
        s.sell_count += r.victim_swaps.sell_count;
        s.quote_volume += r.victim_swaps.quote_volume;
        victims.insert(r.victim_swaps.buyer_addresses.begin(), r.victim_swaps.buyer_addresses.end());
        victims.insert(r.victim_swaps.seller_addresses.begin(), r.victim_swaps.seller_addresses.end());
    }
    s.unique_victims = victims.size();
    return s;
}

} // namespace rugscan
