#pragma once

// Seeded scenario generators: rug-pull populations, gain-accounting
// scenarios, sniper populations and large throughput fixtures. Every
// generator is a pure function of its seed.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace rugscan::gen {

inline Amount ether(std::uint64_t whole) { return Amount(whole) * Amount("1000000000000000000"); }
/// value * 10^-3 tokens at 18 decimals
inline Amount milli(std::uint64_t thousandths) { return Amount(thousandths) * Amount("1000000000000000"); }

/// Collects steps keyed by block offset and emits them in block order
/// (insertion order within a block) separated by advance_blocks steps.
class Schedule
{
public:
    explicit Schedule(Scenario base) : base_(std::move(base)) {}

    template <class Action>
    Step& at(std::uint64_t block_offset, Action a)
    {
        items_.push_back({block_offset, items_.size(), Step{std::move(a), std::nullopt, std::nullopt, false}});
        return items_.back().step;
    }

    Scenario build() &&
    {
        std::stable_sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) { return a.block < b.block; });
        Scenario s = std::move(base_);
        std::uint64_t current = 0;
        for (auto& it : items_) {
            if (it.block > current) {
                s.steps.push_back(Step{steps::AdvanceBlocks{it.block - current, std::nullopt}, {}, {}, false});
                current = it.block;
            }
            s.steps.push_back(std::move(it.step));
        }
        return s;
    }

private:
    struct Item
    {
        std::uint64_t block;
        std::size_t seq;
        Step step;
    };
    Scenario base_;
    std::vector<Item> items_;
};

inline Scenario base_bsc_scenario(std::uint64_t start_block = 1'000'000, std::int64_t start_ts = 1'620'000'000)
{
    Scenario s;
    s.profile = ChainProfile::bsc();
    s.profile.start_block = start_block;
    s.profile.end_block = start_block;
    s.start_timestamp = start_ts;
    s.wrapped_native = "WBNB";
    s.fee_bps = 25;
    return s;
}

inline steps::CreateToken token_step(std::string actor, std::string label, const Amount& supply)
{
    steps::CreateToken t;
    t.actor = std::move(actor);
    t.token = label;
    t.name = label;
    t.symbol = label;
    t.supply = supply;
    return t;
}

inline steps::Swap buy(std::string actor, std::string pool, std::string quote, Amount amount)
{
    return steps::Swap{std::move(actor), std::move(pool), std::move(quote), std::move(amount)};
}

// ---- rug-pull population ----------------------------------------------------

enum class LegitKind { two_mints, partial_burn, no_burn, two_burns, second_provider };

struct RugPopulation
{
    Scenario scenario;
    /// pool label -> scripted as an exit scam
    std::map<std::string, bool> labels;
};

/// `rugs` exit scams (one mint, one burn of >= 99% of the minted LP, with and
/// without the liquidity lock) and `legit` pools that break the rule through
/// extra mints, extra burns, partial burns or no burn at all.
inline RugPopulation generate_rug_population(std::uint64_t seed, std::size_t rugs = 300, std::size_t legit = 200)
{
    std::mt19937_64 rng(seed);
    auto uni = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
    Schedule sched(base_bsc_scenario());
    sched.at(0, token_step("wbnb_deployer", "WBNB", ether(100'000'000)));

    std::vector<bool> kinds(rugs, true);
    kinds.insert(kinds.end(), legit, false);
    std::shuffle(kinds.begin(), kinds.end(), rng);

    RugPopulation out;
    std::uint64_t start = 1;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const bool rug = kinds[i];
        const auto id = std::to_string(i);
        const std::string op = "op" + std::to_string(uni(0, 60)); // spammers reuse addresses
        const std::string tok = "T" + id, pool = "P" + id;
        sched.at(start, token_step(op, tok, ether(1'000'000'000'000)));
        sched.at(start + 1, steps::CreatePool{op, pool, tok, "WBNB", uni(0, 9) == 0 ? "other" : "default"});
        steps::AddLiquidity add{op, pool, "WBNB", ether(uni(1, 50)), ether(uni(1'000'000, 900'000'000'000)), uni(0, 1) == 1};
        sched.at(start + 1, add).bundle = uni(0, 1) == 1;
        const auto victims = uni(0, 12);
        std::uint64_t b = start + 1;
        for (std::uint64_t v = 0; v < victims; ++v) {
            b += uni(0, 3);
            sched.at(b, buy("victim" + std::to_string(uni(0, 400)), pool, "WBNB", milli(uni(1, 2000))));
        }
        b += uni(1, 30);
        if (rug) {
            static const char* fractions_locked[] = {"1", "0.999", "0.995"};
            static const char* fractions_free[] = {"1", "0.999", "0.995", "0.99"};
            steps::RemoveLiquidity rm{op, pool, std::nullopt, {}};
            const char* f = *add.lock_minimum_liquidity ? fractions_locked[uni(0, 2)] : fractions_free[uni(0, 3)];
            if (std::string_view(f) == "0.99") {
                // exactly on the threshold: ceil(0.99 * minted)
                const Amount minted = amm::isqrt(add.amount * *add.other_amount);
                rm.lp_amount = (minted * 99 + 99) / 100;
            } else {
                rm.fraction = Fraction::parse(f);
            }
            sched.at(b, rm);
        } else {
            switch (static_cast<LegitKind>(uni(0, 4))) {
            case LegitKind::two_mints: {
                steps::AddLiquidity again{op, pool, "WBNB", ether(uni(1, 10)), std::nullopt, std::nullopt};
                sched.at(b, again);
                steps::RemoveLiquidity rm{op, pool, std::nullopt, Fraction::parse("1")};
                sched.at(b + uni(1, 20), rm);
                break;
            }
            case LegitKind::partial_burn: {
                steps::RemoveLiquidity rm{op, pool, std::nullopt, {}};
                rm.fraction = Fraction::parse("0." + std::to_string(uni(10, 98)));
                sched.at(b, rm);
                break;
            }
            case LegitKind::no_burn: break;
            case LegitKind::two_burns: {
                sched.at(b, steps::RemoveLiquidity{op, pool, std::nullopt, Fraction::parse("0.5")});
                sched.at(b + uni(1, 20), steps::RemoveLiquidity{op, pool, std::nullopt, Fraction::parse("1")});
                break;
            }
            case LegitKind::second_provider: {
                const std::string lp = "provider" + std::to_string(uni(0, 50));
                sched.at(b, steps::AddLiquidity{lp, pool, "WBNB", ether(uni(1, 5)), std::nullopt, std::nullopt});
                sched.at(b + uni(1, 20), steps::RemoveLiquidity{op, pool, std::nullopt, Fraction::parse("1")});
                break;
            }
            }
        }
        out.labels[pool] = rug;
        start += uni(2, 40);
    }
    out.scenario = std::move(sched).build();
    return out;
}

// ---- gain-accounting scenarios ------------------------------------------------

enum class OperatorStyle { none, pump, hedge, wash };

struct GainScenario
{
    Scenario scenario;
    OperatorStyle style = OperatorStyle::none;
    std::string operator_label = "operator";
    std::string pool_label = "POOL";
    std::string quote_label = "WBNB";
    std::string token_label = "SCAM";
};

/// One exit scam with random fees, gas, bundling, 0-50 victims and the
/// given operator trading style. Operator trades always precede the burn.
inline GainScenario generate_gain_scenario(std::uint64_t seed, OperatorStyle style)
{
    std::mt19937_64 rng(seed);
    auto uni = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
    GainScenario g;
    g.style = style;
    Scenario base = base_bsc_scenario(5'000'000 + uni(0, 1'000'000));
    base.fee_bps = static_cast<std::uint32_t>(uni(0, 100));
    base.default_gas_price = uni(1, 20) * 1'000'000'000;
    base.default_gas_used = uni(21'000, 400'000);
    base.lock_minimum_liquidity = uni(0, 1) == 1;
    Schedule sched(std::move(base));
    const std::string op = g.operator_label, pool = g.pool_label;

    sched.at(0, token_step("wbnb_deployer", "WBNB", ether(10'000'000)));
    auto& ct = sched.at(1, token_step(op, g.token_label, ether(uni(1'000'000, 1'000'000'000'000))));
    ct.gas_used = uni(500'000, 3'000'000);
    const auto pool_block = 1 + uni(0, 5);
    auto& cp = sched.at(pool_block, steps::CreatePool{op, pool, g.token_label, "WBNB", "default"});
    cp.bundle = pool_block == 1 && uni(0, 1) == 1; // aggregated with the token creation
    const Amount token_liquidity = ether(uni(100'000, 500'000));
    auto& add = sched.at(pool_block, steps::AddLiquidity{op, pool, "WBNB", ether(uni(1, 100)), token_liquidity, std::nullopt});
    add.bundle = uni(0, 1) == 1;
    add.gas_price = uni(1, 30) * 1'000'000'000;

    const auto victims = uni(0, 50);
    const auto op_trades = style == OperatorStyle::none ? 0 : uni(1, 8);
    std::vector<int> actions; // 0 victim buy, 1 victim sell, 2 operator trade
    for (std::uint64_t i = 0; i < victims; ++i) actions.push_back(uni(0, 4) == 0 ? 1 : 0);
    for (std::uint64_t i = 0; i < op_trades; ++i) actions.push_back(2);
    std::shuffle(actions.begin(), actions.end(), rng);

    std::uint64_t b = pool_block;
    std::size_t op_index = 0;
    for (int a : actions) {
        b += uni(0, 4);
        if (a == 0) {
            sched.at(b, buy("victim" + std::to_string(uni(0, 30)), pool, "WBNB", milli(uni(1, 5000))));
        } else if (a == 1) {
            sched.at(b, steps::Swap{"victim" + std::to_string(uni(0, 30)), pool, g.token_label, token_liquidity / uni(200, 5000)});
        } else {
            bool buying = style == OperatorStyle::pump || (style == OperatorStyle::wash && op_index % 2 == 0);
            if (style == OperatorStyle::wash && op_trades == 1) buying = true;
            Step* st;
            if (buying) st = &sched.at(b, buy(op, pool, "WBNB", milli(uni(1, 3000))));
            else st = &sched.at(b, steps::Swap{op, pool, g.token_label, token_liquidity / uni(50, 2000)});
            st->gas_price = uni(1, 50) * 1'000'000'000;
            ++op_index;
        }
    }
    // a single wash trade cannot both buy and sell; add the opposite leg
    if (style == OperatorStyle::wash && op_trades == 1)
        sched.at(++b, steps::Swap{op, pool, g.token_label, token_liquidity / uni(50, 2000)});
    auto& rm = sched.at(b + uni(1, 50), steps::RemoveLiquidity{op, pool, std::nullopt, Fraction::parse(uni(0, 1) ? "1" : "0.995")});
    rm.gas_used = uni(100'000, 300'000);
    g.scenario = std::move(sched).build();
    return g;
}

// ---- sniper population ----------------------------------------------------------

struct SniperPopulation
{
    Scenario scenario;
    std::set<std::string> bot_labels;
    std::size_t pools = 0;
    std::size_t bot_pools_touched = 0;
    std::size_t bot_swaps = 0;
    std::size_t bot_same_block_swaps = 0;
};

/// Exit-scam pools in overlapping time windows. Bots swap once per pool at a
/// delay of 0-4 blocks and together cover `bot_coverage_pools` pools, with
/// `same_block_swaps` of their swaps in the first-liquidity block. Normal
/// traders include slow high-volume traders and a fast trader that stays
/// just below the pool threshold.
inline SniperPopulation generate_sniper_population(std::uint64_t seed, std::size_t pools = 1000,
                                                   std::size_t bots = 5, std::size_t normal_traders = 500,
                                                   std::size_t bot_coverage_pools = 865,
                                                   std::size_t same_block_swaps = 268,
                                                   std::size_t pool_threshold = 100)
{
    if (bot_coverage_pools > pools || bots == 0) throw std::invalid_argument("bad sniper population shape");
    if (bot_coverage_pools / bots < pool_threshold) throw std::invalid_argument("bots would not reach the pool threshold");
    if (same_block_swaps > bot_coverage_pools) throw std::invalid_argument("too many same-block swaps");
    std::mt19937_64 rng(seed);
    auto uni = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };

    constexpr std::uint64_t spacing = 6, mint_offset = 2, life = 260;
    Schedule sched(base_bsc_scenario());
    sched.at(0, token_step("wbnb_deployer", "WBNB", ether(1'000'000'000)));

    // pool i: tokens at start, pool+mint at start+2, burn at mint+life
    std::vector<std::uint64_t> mint_block(pools);
    for (std::size_t i = 0; i < pools; ++i) {
        const auto start = 1 + i * spacing;
        const std::string op = "op" + std::to_string(i % 40), tok = "S" + std::to_string(i), pool = "SP" + std::to_string(i);
        sched.at(start, token_step(op, tok, ether(1'000'000'000'000)));
        mint_block[i] = start + mint_offset;
        sched.at(mint_block[i], steps::CreatePool{op, pool, tok, "WBNB", "default"});
        sched.at(mint_block[i], steps::AddLiquidity{op, pool, "WBNB", ether(uni(5, 50)), ether(uni(1'000'000, 100'000'000)), std::nullopt});
    }
    auto pool_label = [](std::size_t i) { return "SP" + std::to_string(i); };

    SniperPopulation out;
    out.pools = pools;
    // bots split the covered pools into contiguous slices
    std::vector<std::size_t> covered(bot_coverage_pools);
    for (std::size_t i = 0; i < covered.size(); ++i) covered[i] = i;
    std::shuffle(covered.begin(), covered.end(), rng);
    std::vector<bool> same(bot_coverage_pools, false);
    std::fill(same.begin(), same.begin() + static_cast<std::ptrdiff_t>(same_block_swaps), true);
    std::shuffle(same.begin(), same.end(), rng);
    for (std::size_t k = 0; k < covered.size(); ++k) {
        const auto bot = k % bots;
        const std::string label = "bot" + std::to_string(bot);
        out.bot_labels.insert(label);
        const auto delay = same[k] ? 0 : uni(1, 4);
        sched.at(mint_block[covered[k]] + delay, buy(label, pool_label(covered[k]), "WBNB", milli(uni(10, 500))));
        ++out.bot_swaps;
        if (same[k]) ++out.bot_same_block_swaps;
    }
    out.bot_pools_touched = covered.size();

    for (std::size_t t = 0; t < normal_traders; ++t) {
        const std::string label = "trader" + std::to_string(t);
        std::size_t n;
        std::uint64_t min_delay = 0;
        if (t < 10) {
            n = uni(pool_threshold, pool_threshold + 50); // busy but slow
            min_delay = 6;
        } else if (t == 10) {
            n = pool_threshold - 1; // fast but below the pool threshold
        } else {
            n = uni(1, 25);
        }
        std::vector<std::size_t> chosen(pools);
        for (std::size_t i = 0; i < pools; ++i) chosen[i] = i;
        std::shuffle(chosen.begin(), chosen.end(), rng);
        chosen.resize(std::min(n, pools));
        for (auto p : chosen) {
            const auto delay = t == 10 ? 0 : uni(min_delay, life - 20);
            sched.at(mint_block[p] + delay, buy(label, pool_label(p), "WBNB", milli(uni(1, 800))));
            if (t > 10 && uni(0, 3) == 0)
                sched.at(mint_block[p] + delay + uni(0, 10), buy(label, pool_label(p), "WBNB", milli(uni(1, 300))));
        }
    }
    for (std::size_t i = 0; i < pools; ++i) {
        const std::string op = "op" + std::to_string(i % 40);
        sched.at(mint_block[i] + life, steps::RemoveLiquidity{op, pool_label(i), std::nullopt, Fraction::parse("1")});
    }
    out.scenario = std::move(sched).build();
    return out;
}

// ---- throughput fixture ---------------------------------------------------------

/// Roughly `target_records` fixture records: pools with long swap histories,
/// interleaved in time, with a share of exit scams.
inline Scenario generate_throughput_scenario(std::uint64_t seed, std::size_t target_records)
{
    std::mt19937_64 rng(seed);
    auto uni = [&](std::uint64_t lo, std::uint64_t hi) { return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng); };
    Schedule sched(base_bsc_scenario(10'000'000));
    sched.at(0, token_step("wbnb_deployer", "WBNB", ether(1'000'000'000)));
    std::size_t records = 3;
    std::uint64_t start = 1;
    for (std::size_t i = 0; records < target_records; ++i) {
        const std::string op = "op" + std::to_string(uni(0, 500)), tok = "X" + std::to_string(i), pool = "XP" + std::to_string(i);
        sched.at(start, token_step(op, tok, ether(1'000'000'000'000)));
        sched.at(start + 1, steps::CreatePool{op, pool, tok, "WBNB", "default"});
        sched.at(start + 1, steps::AddLiquidity{op, pool, "WBNB", ether(uni(5, 100)), ether(uni(1'000'000, 100'000'000)), std::nullopt});
        records += 3 + 2 + 5;
        const auto swaps = uni(20, 200);
        std::uint64_t b = start + 1;
        for (std::uint64_t s = 0; s < swaps; ++s) {
            b += uni(0, 2);
            sched.at(b, buy("user" + std::to_string(uni(0, 20'000)), pool, "WBNB", milli(uni(1, 400))));
            records += 4;
        }
        if (uni(0, 2) != 0) {
            sched.at(b + uni(1, 100), steps::RemoveLiquidity{op, pool, std::nullopt, Fraction::parse(uni(0, 1) ? "1" : "0.5")});
            records += 6;
        }
        start += uni(5, 60);
    }
    return std::move(sched).build();
}

} // namespace rugscan::gen
