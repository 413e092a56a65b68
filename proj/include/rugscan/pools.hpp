#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "chain.hpp"

namespace rugscan {

struct PoolRecord
{
    Address pool;
    Address factory;
    /// tx_sender of the PairCreated transaction
    Address creator;
    Address token0;
    Address token1;
    BlockRef created_block;
    std::uint32_t log_index = 0;
    BlockRef last_event_block;
    TxHash tx_hash;
    std::uint64_t gas_used = 0;
    std::uint64_t gas_price = 0;

    EventKey key() const noexcept { return {created_block.number, log_index}; }
    bool operator==(const PoolRecord&) const = default;
};

/// Fields every pair event shares; the acting address is the transaction's EOA.
struct EventHeader
{
    Address pool;
    BlockRef block;
    std::uint32_t log_index = 0;
    TxHash tx_hash;
    Address tx_sender;
    std::uint64_t gas_used = 0;
    std::uint64_t gas_price = 0;

    EventKey key() const noexcept { return {block.number, log_index}; }
    Amount fee() const { return tx_fee(gas_used, gas_price); }
    bool operator==(const EventHeader&) const = default;
};

struct MintEvent
{
    EventHeader at;
    Amount lp_amount;
    Amount amount0;
    Amount amount1;
    bool operator==(const MintEvent&) const = default;
};

struct BurnEvent
{
    EventHeader at;
    Amount lp_amount;
    Amount amount0;
    Amount amount1;
    Address to;
    bool operator==(const BurnEvent&) const = default;
};

struct SwapEvent
{
    EventHeader at;
    Amount amount0_in;
    Amount amount1_in;
    Amount amount0_out;
    Amount amount1_out;
    Address to;

    /// true when token0 went into the pool
    bool sells_token0() const { return amount0_in > 0; }
    bool operator==(const SwapEvent&) const = default;
};

using PoolEvent = std::variant<MintEvent, BurnEvent, SwapEvent>;

inline const EventHeader& header(const PoolEvent& e)
{
    return std::visit([](const auto& v) -> const EventHeader& { return v.at; }, e);
}

struct PoolTimeline
{
    PoolRecord record;
    /// sorted by (block, log index)
    std::vector<PoolEvent> events;

    template <class T>
    std::vector<const T*> all() const
    {
        std::vector<const T*> out;
        for (const auto& e : events)
            if (auto p = std::get_if<T>(&e)) out.push_back(p);
        return out;
    }
};

struct decode_error : std::runtime_error
{
    decode_error(std::string field, const std::string& what)
        : std::runtime_error("decode error [" + field + "]: " + what), field(std::move(field))
    {
    }
    std::string field;
};

namespace pool_detail {

inline void expect_topic(const LogRecord& log, const Topic& want, const char* event)
{
    if (log.topic0 != want) throw decode_error("topic0", std::string("not a ") + event + " log: " + log.topic0.hex());
}

inline Address topic_address(const LogRecord& log, std::size_t i, const char* field)
{
    if (log.indexed_topics.size() <= i) throw decode_error(field, "missing indexed topic");
    auto a = address_from_word(log.indexed_topics[i]);
    if (!a) throw decode_error(field, "indexed topic is not an address");
    return *a;
}

inline Amount data_word(const LogRecord& log, std::size_t i, const char* field)
{
    if (log.data.size() < 32 * (i + 1)) throw decode_error(field, "payload too short");
    return amount_from_word(std::span(log.data).subspan(32 * i, 32));
}

inline Address data_address(const LogRecord& log, std::size_t i, const char* field)
{
    if (log.data.size() < 32 * (i + 1)) throw decode_error(field, "payload too short");
    auto a = address_from_word(std::span(log.data).subspan(32 * i, 32));
    if (!a) throw decode_error(field, "payload word is not an address");
    return *a;
}

inline EventHeader header_of(const LogRecord& log)
{
    return {log.emitter, log.block, log.log_index, log.tx_hash, log.tx_sender, log.gas_used, log.gas_price};
}

} // namespace pool_detail

/// PairCreated(address indexed token0, address indexed token1, address pair, uint)
inline PoolRecord decode_pair_created(const LogRecord& log)
{
    using namespace pool_detail;
    expect_topic(log, topics::pair_created(), "PairCreated");
    PoolRecord r;
    r.token0 = topic_address(log, 0, "token0");
    r.token1 = topic_address(log, 1, "token1");
    if (r.token0 == r.token1) throw decode_error("token1", "token0 == token1");
    r.pool = data_address(log, 0, "pair");
    r.factory = log.emitter;
    r.creator = log.tx_sender;
    r.created_block = log.block;
    r.log_index = log.log_index;
    r.last_event_block = log.block;
    r.tx_hash = log.tx_hash;
    r.gas_used = log.gas_used;
    r.gas_price = log.gas_price;
    return r;
}

/// Mint(address indexed sender, uint amount0, uint amount1). The event does
/// not carry the LP amount; callers pass the LP minted by the pair in the same
/// transaction (its Transfer events from the zero address).
inline MintEvent decode_mint(const LogRecord& log, const Amount& lp_amount)
{
    using namespace pool_detail;
    expect_topic(log, topics::mint(), "Mint");
    MintEvent m;
    m.at = header_of(log);
    m.amount0 = data_word(log, 0, "amount0");
    m.amount1 = data_word(log, 1, "amount1");
    if (lp_amount <= 0) throw decode_error("lp_amount", "Mint without minted LP tokens");
    m.lp_amount = lp_amount;
    return m;
}

/// Burn(address indexed sender, uint amount0, uint amount1, address indexed to).
/// `lp_amount` is what the pair burned (Transfer pair -> zero) in the same tx.
inline BurnEvent decode_burn(const LogRecord& log, const Amount& lp_amount)
{
    using namespace pool_detail;
    expect_topic(log, topics::burn(), "Burn");
    BurnEvent b;
    b.at = header_of(log);
    b.amount0 = data_word(log, 0, "amount0");
    b.amount1 = data_word(log, 1, "amount1");
    b.to = topic_address(log, 1, "to");
    if (lp_amount <= 0) throw decode_error("lp_amount", "Burn without burned LP tokens");
    b.lp_amount = lp_amount;
    return b;
}

/// Swap(address indexed sender, uint amount0In, uint amount1In,
///      uint amount0Out, uint amount1Out, address indexed to)
inline SwapEvent decode_swap(const LogRecord& log)
{
    using namespace pool_detail;
    expect_topic(log, topics::swap(), "Swap");
    SwapEvent s;
    s.at = header_of(log);
    s.amount0_in = data_word(log, 0, "amount0In");
    s.amount1_in = data_word(log, 1, "amount1In");
    s.amount0_out = data_word(log, 2, "amount0Out");
    s.amount1_out = data_word(log, 3, "amount1Out");
    s.to = topic_address(log, 1, "to");
    const bool zero_for_one = s.amount0_in > 0 && s.amount1_in == 0 && s.amount1_out > 0 && s.amount0_out == 0;
    const bool one_for_zero = s.amount1_in > 0 && s.amount0_in == 0 && s.amount0_out > 0 && s.amount1_out == 0;
    if (!zero_for_one && !one_for_zero)
        throw decode_error("amounts", "swap must take exactly one token in and the other out");
    return s;
}

struct DecodeIssue
{
    EventKey key;
    Address emitter;
    std::string message;
};

struct PoolIndex
{
    std::vector<PoolRecord> pools;
    std::vector<PoolEvent> events;
    std::vector<DecodeIssue> issues;
};

/// Streams over chain-ordered logs, decoding PairCreated/Mint/Burn/Swap.
/// LP amounts are matched from the pair's own Transfer logs inside the same
/// transaction. Malformed events are reported as issues, never thrown.
inline PoolIndex index_pools(std::span<const LogRecord> logs)
{
    PoolIndex out;
    std::unordered_set<Address> seen_pools;
    std::unordered_map<Address, Amount> pending_mint, pending_burn;
    const TxHash* current_tx = nullptr;
    const Address zero{};

    for (const auto& log : logs) {
        if (!current_tx || *current_tx != log.tx_hash) {
            pending_mint.clear();
            pending_burn.clear();
            current_tx = &log.tx_hash;
        }
        try {
            if (log.topic0 == topics::transfer()) {
                if (log.indexed_topics.size() != 2 || log.data.size() != 32) continue;
                const auto from = address_from_word(log.indexed_topics[0]);
                const auto to = address_from_word(log.indexed_topics[1]);
                if (!from || !to) continue;
                if (*from == zero) pending_mint[log.emitter] += amount_from_word(std::span(log.data));
                else if (*to == zero && *from == log.emitter)
                    pending_burn[log.emitter] += amount_from_word(std::span(log.data));
            } else if (log.topic0 == topics::pair_created()) {
                auto rec = decode_pair_created(log);
                if (seen_pools.insert(rec.pool).second) out.pools.push_back(std::move(rec));
                else out.issues.push_back({log.key(), log.emitter, "duplicate PairCreated for " + rec.pool.hex()});
            } else if (log.topic0 == topics::mint()) {
                auto it = pending_mint.find(log.emitter);
                Amount lp = it == pending_mint.end() ? Amount(0) : it->second;
                if (it != pending_mint.end()) pending_mint.erase(it);
                out.events.emplace_back(decode_mint(log, lp));
            } else if (log.topic0 == topics::burn()) {
                auto it = pending_burn.find(log.emitter);
                Amount lp = it == pending_burn.end() ? Amount(0) : it->second;
                if (it != pending_burn.end()) pending_burn.erase(it);
                out.events.emplace_back(decode_burn(log, lp));
            } else if (log.topic0 == topics::swap()) {
                out.events.emplace_back(decode_swap(log));
            }
        } catch (const std::exception& e) {
            out.issues.push_back({log.key(), log.emitter, e.what()});
        }
    }
    return out;
}

struct TimelineSet
{
    std::map<Address, PoolTimeline> timelines;
    /// events whose emitter is not a known pool
    std::vector<PoolEvent> orphans;
};

/// Groups events by pool and sorts each timeline by (block, log index).
/// Result is independent of input order.
inline TimelineSet assemble_timelines(std::span<const PoolRecord> pools, std::span<const PoolEvent> events,
                                      const std::unordered_map<Address, BlockRef>* last_events = nullptr)
{
    TimelineSet out;
    for (const auto& p : pools) {
        auto [it, inserted] = out.timelines.try_emplace(p.pool);
        if (!inserted && it->second.record.key() <= p.key()) continue;
        it->second.record = p;
    }
    for (const auto& e : events) {
        auto it = out.timelines.find(header(e).pool);
        if (it == out.timelines.end()) out.orphans.push_back(e);
        else it->second.events.push_back(e);
    }
    auto by_key = [](const PoolEvent& a, const PoolEvent& b) {
        const auto& ha = header(a);
        const auto& hb = header(b);
        if (ha.key() != hb.key()) return ha.key() < hb.key();
        return a.index() < b.index();
    };
    for (auto& [addr, t] : out.timelines) {
        std::sort(t.events.begin(), t.events.end(), by_key);
        auto& last = t.record.last_event_block;
        if (!t.events.empty() && header(t.events.back()).block.number > last.number)
            last = header(t.events.back()).block;
        if (last_events)
            if (auto it = last_events->find(addr); it != last_events->end() && it->second.number > last.number)
                last = it->second;
    }
    std::sort(out.orphans.begin(), out.orphans.end(), by_key);
    return out;
}

struct FactoryShare
{
    Address factory;
    std::string label;
    std::size_t pools = 0;
    double share = 0.0;
};

/// Pool counts per factory, descending by count then address.
inline std::vector<FactoryShare> factory_shares(std::span<const PoolRecord> pools,
                                                const std::map<Address, std::string>& labels = {})
{
    std::map<Address, std::size_t> counts;
    for (const auto& p : pools) ++counts[p.factory];
    std::vector<FactoryShare> out;
    for (const auto& [f, n] : counts) {
        auto it = labels.find(f);
        out.push_back({f, it == labels.end() ? std::string{} : it->second, n,
                       static_cast<double>(n) / static_cast<double>(pools.size())});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.pools != b.pools ? a.pools > b.pools : a.factory < b.factory;
    });
    return out;
}

} // namespace rugscan
