#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pools.hpp"

namespace rugscan {

struct SwapLatency
{
    Address trader;
    Address pool;
    /// first swap block minus first Mint block
    std::uint64_t delay_blocks = 0;
    bool same_block = false;
};

struct corrupt_input : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

namespace sniper_detail {

inline const MintEvent* first_mint(const PoolTimeline& t)
{
    for (const auto& e : t.events)
        if (const auto* m = std::get_if<MintEvent>(&e)) return m;
    return nullptr;
}

} // namespace sniper_detail

/// One latency per (trader, pool) from the trader's first swap. The pool
/// operator (first Mint's tx_sender) is skipped. A swap ordered before the
/// first Mint is corrupt input.
inline std::vector<SwapLatency> swap_latencies(const std::map<Address, PoolTimeline>& timelines,
                                               const std::set<Address>* restrict_to = nullptr)
{
    std::vector<SwapLatency> out;
    for (const auto& [addr, t] : timelines) {
        if (restrict_to && !restrict_to->contains(addr)) continue;
        const MintEvent* mint = sniper_detail::first_mint(t);
        std::set<Address> seen;
        for (const auto& e : t.events) {
            const auto* s = std::get_if<SwapEvent>(&e);
            if (!s) continue;
            if (!mint || s->at.key() < mint->at.key())
                throw corrupt_input("pool " + addr.hex() + ": swap at block " + std::to_string(s->at.block.number) +
                                    " precedes the first liquidity provision");
            if (s->at.tx_sender == mint->at.tx_sender) continue;
            if (!seen.insert(s->at.tx_sender).second) continue;
            const auto delay = s->at.block.number - mint->at.block.number;
            out.push_back({s->at.tx_sender, addr, delay, delay == 0});
        }
    }
    return out;
}

struct SniperVerdict
{
    Address trader;
    std::size_t pools_swapped = 0;
    std::uint64_t total_delay_blocks = 0;
    double mean_delay_blocks = 0.0;
    double same_block_fraction = 0.0;
    bool flagged = false;
};

/// flagged <=> mean delay < delay_threshold and pools >= pool_threshold.
/// The mean comparison is done on integers. Output ordered by trader.
inline std::vector<SniperVerdict> flag_snipers(std::span<const SwapLatency> latencies, std::uint64_t delay_threshold,
                                               std::uint64_t pool_threshold)
{
    if (delay_threshold == 0 || pool_threshold == 0) throw std::invalid_argument("sniper thresholds must be positive");
    struct Acc
    {
        std::set<Address> pools;
        std::uint64_t delay = 0;
        std::size_t same = 0;
    };
    std::map<Address, Acc> acc;
    for (const auto& l : latencies) {
        auto& a = acc[l.trader];
        if (!a.pools.insert(l.pool).second) continue;
        a.delay += l.delay_blocks;
        if (l.same_block) ++a.same;
    }
    std::vector<SniperVerdict> out;
    out.reserve(acc.size());
    for (const auto& [trader, a] : acc) {
        SniperVerdict v;
        v.trader = trader;
        v.pools_swapped = a.pools.size();
        v.total_delay_blocks = a.delay;
        const auto n = static_cast<double>(v.pools_swapped);
        v.mean_delay_blocks = static_cast<double>(a.delay) / n;
        v.same_block_fraction = static_cast<double>(a.same) / n;
        v.flagged = v.pools_swapped >= pool_threshold &&
                    boost::multiprecision::uint128_t(a.delay) <
                        boost::multiprecision::uint128_t(delay_threshold) * v.pools_swapped;
        out.push_back(v);
    }
    return out;
}

struct SniperActivity
{
    std::size_t flagged_traders = 0;
    std::size_t pools_considered = 0;
    std::size_t pools_touched = 0;
    std::size_t swaps_total = 0;
    std::size_t swaps_flagged = 0;
    std::size_t swaps_flagged_same_block = 0;

    double pool_coverage() const { return pools_considered ? double(pools_touched) / double(pools_considered) : 0.0; }
    double swap_share() const { return swaps_total ? double(swaps_flagged) / double(swaps_total) : 0.0; }
    /// share of flagged traders' swaps landing in the first-liquidity block
    double same_block_share() const { return swaps_flagged ? double(swaps_flagged_same_block) / double(swaps_flagged) : 0.0; }
};

/// Aggregates over the pools in `restrict_to` (all timelines when null).
/// Swap counts exclude the pool operator's own swaps.
inline SniperActivity sniper_activity_stats(std::span<const SniperVerdict> verdicts,
                                            std::span<const SwapLatency> latencies,
                                            const std::map<Address, PoolTimeline>& timelines,
                                            const std::set<Address>* restrict_to = nullptr)
{
    SniperActivity s;
    std::set<Address> flagged;
    for (const auto& v : verdicts)
        if (v.flagged) flagged.insert(v.trader);
    s.flagged_traders = flagged.size();
    std::set<Address> touched;
    for (const auto& l : latencies)
        if (flagged.contains(l.trader) && (!restrict_to || restrict_to->contains(l.pool))) touched.insert(l.pool);
    for (const auto& [addr, t] : timelines) {
        if (restrict_to && !restrict_to->contains(addr)) continue;
        ++s.pools_considered;
        const MintEvent* mint = sniper_detail::first_mint(t);
        for (const auto& e : t.events) {
            const auto* sw = std::get_if<SwapEvent>(&e);
            if (!sw || (mint && sw->at.tx_sender == mint->at.tx_sender)) continue;
            ++s.swaps_total;
            if (!flagged.contains(sw->at.tx_sender)) continue;
            ++s.swaps_flagged;
            if (mint && sw->at.block.number == mint->at.block.number) ++s.swaps_flagged_same_block;
        }
    }
    s.pools_touched = touched.size();
    return s;
}

} // namespace rugscan
