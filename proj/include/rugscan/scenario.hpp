#pragma once

// Scripted scenario runner on top of the constant-product engine. Produces
// fixture-format records (bit-exact Uniswap V2 event layouts) plus a value
// ledger that serves as ground truth for the detectors.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "amm.hpp"
#include "chain.hpp"
#include "fixture.hpp"
#include "tokens.hpp"

namespace rugscan {

struct scenario_error : std::runtime_error
{
    scenario_error(std::size_t step, const std::string& what)
        : std::runtime_error("scenario step " + std::to_string(step) + ": " + what), step(step)
    {
    }
    std::size_t step;
};

/// Exact non-negative ratio, parsed from decimal text ("0.98", "1").
struct Fraction
{
    Amount numerator = 1;
    Amount denominator = 1;

    static Fraction parse(std::string_view text)
    {
        const auto dot = text.find('.');
        const auto decimals = dot == std::string_view::npos ? 0u : static_cast<unsigned>(text.size() - dot - 1);
        Fraction f;
        f.numerator = parse_units(text, decimals);
        f.denominator = boost::multiprecision::pow(Amount(10), decimals);
        return f;
    }

    Amount apply(const Amount& v) const { return v * numerator / denominator; }
};

namespace steps {

struct CreateToken
{
    std::string actor;
    std::string token;
    std::string name;
    std::string symbol;
    std::uint32_t decimals = 18;
    Amount supply;
    /// created by a factory contract rather than a creation transaction
    bool via_internal = false;
    std::optional<Bytes> bytecode;
};

struct CreatePool
{
    std::string actor;
    std::string pool;
    std::string token_a;
    std::string token_b;
    std::string factory = "default";
};

/// `amount` of `token`; the other side is `other_amount` on first provision
/// and derived from the reserve ratio afterwards.
struct AddLiquidity
{
    std::string actor;
    std::string pool;
    std::string token;
    Amount amount;
    std::optional<Amount> other_amount;
    /// overrides Scenario::lock_minimum_liquidity for this provision
    std::optional<bool> lock_minimum_liquidity;
};

struct Swap
{
    std::string actor;
    std::string pool;
    std::string token_in;
    Amount amount_in;
};

/// Burns `lp_amount`, or `fraction` of the actor's LP balance.
struct RemoveLiquidity
{
    std::string actor;
    std::string pool;
    std::optional<Amount> lp_amount;
    Fraction fraction;
};

struct AdvanceBlocks
{
    std::uint64_t count = 1;
    std::optional<std::int64_t> seconds;
};

} // namespace steps

struct Step
{
    std::variant<steps::CreateToken, steps::CreatePool, steps::AddLiquidity, steps::Swap,
                 steps::RemoveLiquidity, steps::AdvanceBlocks>
        action;
    std::optional<std::uint64_t> gas_used;
    std::optional<std::uint64_t> gas_price;
    /// executes inside the previous step's transaction
    bool bundle = false;
};

struct Scenario
{
    ChainProfile profile = ChainProfile::bsc();
    std::optional<std::int64_t> start_timestamp;
    /// label of the wrapped native token, resolved into the fixture header
    std::optional<std::string> wrapped_native;
    std::uint32_t fee_bps = 30;
    bool lock_minimum_liquidity = false;
    std::uint64_t default_gas_used = 150'000;
    std::uint64_t default_gas_price = 5'000'000'000;
    /// explicit addresses for any label; others are derived from the label
    std::map<std::string, Address> addresses;
    std::vector<Step> steps;

    template <class Action>
    Step& add(Action a)
    {
        steps.push_back(Step{std::move(a), std::nullopt, std::nullopt, false});
        return steps.back();
    }
};

/// Deterministic address for a label: last 20 bytes of keccak("<kind>:<label>").
inline Address derive_address(std::string_view kind, std::string_view label)
{
    std::string text(kind);
    text += ':';
    text += label;
    const auto d = Keccak256::hash(text);
    Address a;
    std::copy(d.end() - 20, d.end(), a.bytes.begin());
    return a;
}

struct LedgerEntry
{
    std::size_t step = 0;
    Address actor;
    Address pool;
    Address token;
    /// positive: the actor received from the pool
    Amount delta;
};

/// Per-actor value flows against pools and gas paid.
class Ledger
{
public:
    void record_flow(std::size_t step, const Address& actor, const Address& pool, const Address& token,
                     const Amount& delta)
    {
        journal_.push_back({step, actor, pool, token, delta});
        flows_[actor][token] += delta;
        pool_balance_[pool][token] -= delta;
    }

    void record_gas(const Address& actor, const Amount& fee) { gas_[actor] += fee; }

    /// Net amount of `token` the actor received from pools minus what it paid in.
    Amount net_flow(const Address& actor, const Address& token) const
    {
        auto a = flows_.find(actor);
        if (a == flows_.end()) return 0;
        auto t = a->second.find(token);
        return t == a->second.end() ? Amount(0) : t->second;
    }

    Amount gas_fees(const Address& actor) const
    {
        auto it = gas_.find(actor);
        return it == gas_.end() ? Amount(0) : it->second;
    }

    /// Σ paid in − Σ taken out for one pool and token.
    Amount pool_balance(const Address& pool, const Address& token) const
    {
        auto p = pool_balance_.find(pool);
        if (p == pool_balance_.end()) return 0;
        auto t = p->second.find(token);
        return t == p->second.end() ? Amount(0) : t->second;
    }

    const std::vector<LedgerEntry>& journal() const noexcept { return journal_; }
    std::set<Address> actors() const
    {
        std::set<Address> out;
        for (const auto& [a, _] : flows_) out.insert(a);
        for (const auto& [a, _] : gas_) out.insert(a);
        return out;
    }

    bool empty() const noexcept { return journal_.empty() && gas_.empty(); }

private:
    std::vector<LedgerEntry> journal_;
    std::map<Address, std::map<Address, Amount>> flows_;
    std::map<Address, std::map<Address, Amount>> pool_balance_;
    std::map<Address, Amount> gas_;
};

struct SimPool
{
    Address address;
    Address token0;
    Address token1;
    amm::PoolState state;
    std::map<Address, Amount> lp_balances;
};

struct ScenarioResult
{
    FixtureFile fixture;
    Ledger ledger;
    std::map<std::string, Address> addresses;
    std::map<Address, SimPool> pools;

    const Address& at(const std::string& label) const
    {
        auto it = addresses.find(label);
        if (it == addresses.end()) throw std::out_of_range("unknown scenario label '" + label + "'");
        return it->second;
    }
};

namespace scenario_detail {

class Runner
{
public:
    explicit Runner(const Scenario& s) : s_(s)
    {
        s_.profile.start_block = s_.profile.start_block;
        block_.number = s.profile.start_block;
        block_.timestamp = s.start_timestamp;
    }

    ScenarioResult run()
    {
        for (step_ = 0; step_ < s_.steps.size(); ++step_) {
            const auto& st = s_.steps[step_];
            try {
                begin_tx(st);
                std::visit([&](const auto& a) { apply(a); }, st.action);
            } catch (const scenario_error&) {
                throw;
            } catch (const std::exception& e) {
                throw scenario_error(step_, e.what());
            }
        }
        out_.fixture.header = s_.profile;
        out_.fixture.header.start_block = s_.profile.start_block;
        out_.fixture.header.end_block = block_.number;
        if (s_.wrapped_native) out_.fixture.header.wrapped_native_token = resolve("token", *s_.wrapped_native);
        out_.pools = pools_;
        return std::move(out_);
    }

private:
    // ---- addressing ----------------------------------------------------

    Address resolve(std::string_view kind, const std::string& label)
    {
        if (auto it = out_.addresses.find(label); it != out_.addresses.end()) return it->second;
        Address a;
        if (auto it = s_.addresses.find(label); it != s_.addresses.end()) a = it->second;
        else a = derive_address(kind, label);
        out_.addresses.emplace(label, a);
        return a;
    }

    const Address& token(const std::string& label)
    {
        auto it = out_.addresses.find(label);
        if (it == out_.addresses.end() || !tokens_.contains(it->second))
            throw scenario_error(step_, "token '" + label + "' used before create_token");
        return it->second;
    }

    SimPool& pool(const std::string& label)
    {
        auto it = out_.addresses.find(label);
        if (it == out_.addresses.end() || !pools_.contains(it->second))
            throw scenario_error(step_, "pool '" + label + "' used before create_pool");
        return pools_.at(it->second);
    }

    // ---- transactions and logs -------------------------------------------

    void begin_tx(const Step& st)
    {
        if (std::holds_alternative<steps::AdvanceBlocks>(st.action)) return;
        if (st.bundle && have_tx_) return;
        ++tx_counter_;
        const auto d = Keccak256::hash("tx:" + std::to_string(block_.number) + ":" + std::to_string(tx_counter_));
        tx_hash_.bytes = d;
        gas_used_ = st.gas_used.value_or(s_.default_gas_used);
        gas_price_ = st.gas_price.value_or(s_.default_gas_price);
        have_tx_ = true;
        charge_pending_ = true;
    }

    /// The first action of a transaction pays its fee.
    void charge(const Address& sender)
    {
        tx_sender_ = sender;
        if (!charge_pending_) return;
        out_.ledger.record_gas(sender, tx_fee(gas_used_, gas_price_));
        charge_pending_ = false;
    }

    LogRecord& emit(const Address& emitter, const Topic& topic0, std::vector<Word> indexed, Bytes data)
    {
        LogRecord l;
        l.emitter = emitter;
        l.block = block_;
        l.log_index = next_index_++;
        l.tx_hash = tx_hash_;
        l.tx_sender = tx_sender_;
        l.topic0 = topic0;
        l.indexed_topics = std::move(indexed);
        l.data = std::move(data);
        l.gas_used = gas_used_;
        l.gas_price = gas_price_;
        out_.fixture.records.emplace_back(std::move(l));
        return std::get<LogRecord>(out_.fixture.records.back());
    }

    static Bytes words(std::initializer_list<Word> ws)
    {
        Bytes b;
        b.reserve(ws.size() * 32);
        for (const auto& w : ws) b.insert(b.end(), w.bytes.begin(), w.bytes.end());
        return b;
    }

    void emit_transfer(const Address& token, const Address& from, const Address& to, const Amount& value)
    {
        emit(token, topics::transfer(), {word_from_address(from), word_from_address(to)},
             words({word_from_amount(value)}));
    }

    void emit_sync(const SimPool& p)
    {
        emit(p.address, topics::sync(), {}, words({word_from_amount(p.state.reserve0), word_from_amount(p.state.reserve1)}));
    }

    // ---- actions ----------------------------------------------------------

    void apply(const steps::AdvanceBlocks& a)
    {
        if (a.count == 0) throw scenario_error(step_, "advance_blocks needs count >= 1");
        block_.number += a.count;
        if (block_.timestamp) {
            const auto secs = a.seconds.value_or(
                static_cast<std::int64_t>(static_cast<double>(a.count) * s_.profile.mean_block_interval));
            if (secs < 0) throw scenario_error(step_, "time cannot go backwards");
            *block_.timestamp += secs;
        }
        next_index_ = 0;
        have_tx_ = false;
    }

    void apply(const steps::CreateToken& a)
    {
        const Address actor = resolve("actor", a.actor);
        charge(actor);
        if (out_.addresses.contains(a.token)) throw scenario_error(step_, "label '" + a.token + "' already used");
        const Address addr = resolve("token", a.token);
        if (a.supply <= 0) throw scenario_error(step_, "token supply must be positive");
        tokens_.insert(addr);

        ContractCreation c;
        c.contract = addr;
        c.deployer = actor;
        c.block = block_;
        c.index = next_index_++;
        c.tx_hash = tx_hash_;
        c.via_internal = a.via_internal;
        c.bytecode = a.bytecode ? *a.bytecode : full_token_bytecode();
        c.gas_used = gas_used_;
        c.gas_price = gas_price_;
        const auto key_index = c.index;
        out_.fixture.records.emplace_back(std::move(c));

        TokenMetadata m;
        m.token = addr;
        m.block = block_;
        m.index = key_index;
        m.name = a.name.empty() ? a.token : a.name;
        m.symbol = a.symbol.empty() ? a.token : a.symbol;
        m.decimals = a.decimals;
        m.total_supply = a.supply;
        out_.fixture.records.emplace_back(std::move(m));

        emit_transfer(addr, Address{}, actor, a.supply);
    }

    void apply(const steps::CreatePool& a)
    {
        const Address actor = resolve("actor", a.actor);
        charge(actor);
        const Address ta = token(a.token_a);
        const Address tb = token(a.token_b);
        if (ta == tb) throw scenario_error(step_, "pool needs two distinct tokens");
        if (out_.addresses.contains(a.pool)) throw scenario_error(step_, "label '" + a.pool + "' already used");
        const Address factory = resolve("factory", a.factory);
        const Address addr = resolve("pool", a.pool);

        SimPool p;
        p.address = addr;
        p.token0 = ta < tb ? ta : tb;
        p.token1 = ta < tb ? tb : ta;
        p.state.fee_bps = s_.fee_bps;
        pools_.emplace(addr, p);
        tokens_.insert(addr); // the pair is itself the LP token

        // pair contract deployed by the factory
        ContractCreation c;
        c.contract = addr;
        c.deployer = actor;
        c.block = block_;
        c.index = next_index_++;
        c.tx_hash = tx_hash_;
        c.via_internal = true;
        c.bytecode = full_token_bytecode();
        c.gas_used = gas_used_;
        c.gas_price = gas_price_;
        out_.fixture.records.emplace_back(std::move(c));

        const auto pair_count = ++factory_pairs_[factory];
        emit(factory, topics::pair_created(), {word_from_address(p.token0), word_from_address(p.token1)},
             words({word_from_address(addr), word_from_amount(pair_count)}));
    }

    void apply(const steps::AddLiquidity& a)
    {
        const Address actor = resolve("actor", a.actor);
        charge(actor);
        SimPool& p = pool(a.pool);
        const Address t = token(a.token);
        if (t != p.token0 && t != p.token1) throw scenario_error(step_, "token not in pool");
        const bool is0 = t == p.token0;

        Amount other;
        if (p.state.empty()) {
            if (!a.other_amount) throw scenario_error(step_, "first provision needs other_amount");
            other = *a.other_amount;
        } else {
            other = a.other_amount ? *a.other_amount
                                   : amm::quote(a.amount, is0 ? p.state.reserve0 : p.state.reserve1,
                                                is0 ? p.state.reserve1 : p.state.reserve0);
        }
        const Amount amount0 = is0 ? a.amount : other;
        const Amount amount1 = is0 ? other : a.amount;
        const bool first = p.state.empty();
        auto r = amm::add_liquidity(p.state, amount0, amount1,
                                    first && a.lock_minimum_liquidity.value_or(s_.lock_minimum_liquidity));
        p.state = r.state;
        p.lp_balances[actor] += r.lp_minted;

        out_.ledger.record_flow(step_, actor, p.address, p.token0, -amount0);
        out_.ledger.record_flow(step_, actor, p.address, p.token1, -amount1);

        emit_transfer(p.token0, actor, p.address, amount0);
        emit_transfer(p.token1, actor, p.address, amount1);
        if (r.lp_locked > 0) emit_transfer(p.address, Address{}, Address{}, r.lp_locked);
        emit_transfer(p.address, Address{}, actor, r.lp_minted);
        emit_sync(p);
        emit(p.address, topics::mint(), {word_from_address(actor)},
             words({word_from_amount(amount0), word_from_amount(amount1)}));
    }

    void apply(const steps::Swap& a)
    {
        const Address actor = resolve("actor", a.actor);
        charge(actor);
        SimPool& p = pool(a.pool);
        const Address t = token(a.token_in);
        if (t != p.token0 && t != p.token1) throw scenario_error(step_, "token not in pool");
        const bool zero_in = t == p.token0;
        auto r = amm::swap_exact_in(p.state, a.amount_in, zero_in ? amm::Side::token0_in : amm::Side::token1_in);
        p.state = r.state;
        const Address out_token = zero_in ? p.token1 : p.token0;

        out_.ledger.record_flow(step_, actor, p.address, t, -a.amount_in);
        out_.ledger.record_flow(step_, actor, p.address, out_token, r.amount_out);

        emit_transfer(t, actor, p.address, a.amount_in);
        emit_transfer(out_token, p.address, actor, r.amount_out);
        emit_sync(p);
        const Amount zero = 0;
        emit(p.address, topics::swap(), {word_from_address(actor), word_from_address(actor)},
             words({word_from_amount(zero_in ? a.amount_in : zero), word_from_amount(zero_in ? zero : a.amount_in),
                    word_from_amount(zero_in ? zero : r.amount_out), word_from_amount(zero_in ? r.amount_out : zero)}));
    }

    void apply(const steps::RemoveLiquidity& a)
    {
        const Address actor = resolve("actor", a.actor);
        charge(actor);
        SimPool& p = pool(a.pool);
        const Amount held = p.lp_balances[actor];
        const Amount lp = a.lp_amount ? *a.lp_amount : a.fraction.apply(held);
        if (lp <= 0) throw scenario_error(step_, "nothing to burn");
        if (lp > held) throw scenario_error(step_, "burn exceeds the actor's LP balance");
        auto r = amm::remove_liquidity(p.state, lp);
        p.state = r.state;
        p.lp_balances[actor] -= lp;

        out_.ledger.record_flow(step_, actor, p.address, p.token0, r.amount0);
        out_.ledger.record_flow(step_, actor, p.address, p.token1, r.amount1);

        emit_transfer(p.address, actor, p.address, lp);
        emit_transfer(p.address, p.address, Address{}, lp);
        if (r.amount0 > 0) emit_transfer(p.token0, p.address, actor, r.amount0);
        if (r.amount1 > 0) emit_transfer(p.token1, p.address, actor, r.amount1);
        emit_sync(p);
        emit(p.address, topics::burn(), {word_from_address(actor), word_from_address(actor)},
             words({word_from_amount(r.amount0), word_from_amount(r.amount1)}));
    }

    Scenario s_;
    ScenarioResult out_;
    BlockRef block_;
    std::uint32_t next_index_ = 0;
    std::size_t step_ = 0;
    std::uint64_t tx_counter_ = 0;
    TxHash tx_hash_;
    Address tx_sender_;
    std::uint64_t gas_used_ = 0;
    std::uint64_t gas_price_ = 0;
    bool have_tx_ = false;
    bool charge_pending_ = false;
    std::set<Address> tokens_;
    std::map<Address, SimPool> pools_;
    std::map<Address, std::uint64_t> factory_pairs_;
};

} // namespace scenario_detail

/// Executes the script. Any failing step aborts with its index.
inline ScenarioResult run_scenario(const Scenario& s)
{
    s.profile.validate();
    return scenario_detail::Runner(s).run();
}

// ---- scenario files -------------------------------------------------------

namespace scenario_detail {

/// Integer strings are base units; strings with a '.' are token units scaled
/// by `decimals` ("20.0" with 18 decimals is 20e18).
inline Amount parse_scenario_amount(const nlohmann::json& v, std::uint32_t decimals)
{
    if (v.is_number_unsigned()) return Amount(v.get<std::uint64_t>());
    const auto s = v.get<std::string>();
    if (s.find('.') != std::string::npos) return parse_units(s, decimals);
    return parse_amount(s);
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback)
{
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<T>();
}

} // namespace scenario_detail

/// Parses the JSON scenario format (see README).
inline Scenario parse_scenario(const nlohmann::json& j)
{
    using namespace scenario_detail;
    Scenario s;
    const auto& prof = j.at("profile");
    s.profile = ChainProfile::named(prof.at("chain").get<std::string>());
    if (auto it = prof.find("mean_block_interval"); it != prof.end()) s.profile.mean_block_interval = it->get<double>();
    s.profile.start_block = get_or<std::uint64_t>(prof, "start_block", 1);
    s.profile.end_block = s.profile.start_block;
    if (auto it = prof.find("start_timestamp"); it != prof.end()) s.start_timestamp = it->get<std::int64_t>();
    if (auto it = prof.find("sniper_delay_blocks"); it != prof.end()) s.profile.sniper_delay_blocks = it->get<std::uint64_t>();
    if (auto it = prof.find("sniper_min_pools"); it != prof.end()) s.profile.sniper_min_pools = it->get<std::uint64_t>();
    if (auto it = j.find("wrapped_native"); it != j.end()) s.wrapped_native = it->get<std::string>();
    s.fee_bps = get_or<std::uint32_t>(j, "fee_bps", 30);
    s.lock_minimum_liquidity = get_or<bool>(j, "lock_minimum_liquidity", false);
    s.default_gas_used = get_or<std::uint64_t>(j, "gas_used", s.default_gas_used);
    s.default_gas_price = get_or<std::uint64_t>(j, "gas_price", s.default_gas_price);
    if (auto it = j.find("addresses"); it != j.end())
        for (const auto& [label, hex] : it->items()) s.addresses[label] = Address::from_hex(hex.get<std::string>());

    std::map<std::string, std::uint32_t> decimals; // token label -> decimals, for unit amounts
    auto decimals_of = [&](const std::string& label) {
        auto it = decimals.find(label);
        return it == decimals.end() ? 18u : it->second;
    };

    std::size_t index = 0;
    for (const auto& js : j.at("steps")) {
        try {
            Step st;
            const auto action = js.at("action").get<std::string>();
            if (action == "create_token") {
                steps::CreateToken a;
                a.actor = js.at("actor").get<std::string>();
                a.token = js.at("token").get<std::string>();
                a.name = get_or<std::string>(js, "name", "");
                a.symbol = get_or<std::string>(js, "symbol", "");
                a.decimals = get_or<std::uint32_t>(js, "decimals", 18);
                decimals[a.token] = a.decimals;
                a.supply = parse_scenario_amount(js.at("supply"), a.decimals);
                a.via_internal = get_or<bool>(js, "via_internal", false);
                if (auto it = js.find("bytecode"); it != js.end()) a.bytecode = bytes_from_hex(it->get<std::string>());
                st.action = std::move(a);
            } else if (action == "create_pool") {
                steps::CreatePool a;
                a.actor = js.at("actor").get<std::string>();
                a.pool = js.at("pool").get<std::string>();
                const auto& toks = js.at("tokens");
                if (!toks.is_array() || toks.size() != 2) throw std::invalid_argument("tokens must list two labels");
                a.token_a = toks[0].get<std::string>();
                a.token_b = toks[1].get<std::string>();
                a.factory = get_or<std::string>(js, "factory", "default");
                st.action = std::move(a);
            } else if (action == "add_liquidity") {
                steps::AddLiquidity a;
                a.actor = js.at("actor").get<std::string>();
                a.pool = js.at("pool").get<std::string>();
                a.token = js.at("token").get<std::string>();
                a.amount = parse_scenario_amount(js.at("amount"), decimals_of(a.token));
                if (auto it = js.find("other_amount"); it != js.end()) {
                    const auto other_token = get_or<std::string>(js, "other_token", "");
                    a.other_amount = parse_scenario_amount(*it, decimals_of(other_token));
                }
                if (auto it = js.find("lock_minimum_liquidity"); it != js.end()) a.lock_minimum_liquidity = it->get<bool>();
                st.action = std::move(a);
            } else if (action == "swap") {
                steps::Swap a;
                a.actor = js.at("actor").get<std::string>();
                a.pool = js.at("pool").get<std::string>();
                a.token_in = js.at("token_in").get<std::string>();
                a.amount_in = parse_scenario_amount(js.at("amount_in"), decimals_of(a.token_in));
                st.action = std::move(a);
            } else if (action == "remove_liquidity") {
                steps::RemoveLiquidity a;
                a.actor = js.at("actor").get<std::string>();
                a.pool = js.at("pool").get<std::string>();
                if (auto it = js.find("lp_amount"); it != js.end()) a.lp_amount = parse_scenario_amount(*it, 0);
                if (auto it = js.find("fraction"); it != js.end()) a.fraction = Fraction::parse(it->get<std::string>());
                st.action = std::move(a);
            } else if (action == "advance_blocks") {
                steps::AdvanceBlocks a;
                a.count = get_or<std::uint64_t>(js, "count", 1);
                if (auto it = js.find("seconds"); it != js.end()) a.seconds = it->get<std::int64_t>();
                st.action = a;
            } else {
                throw std::invalid_argument("unknown action '" + action + "'");
            }
            if (auto it = js.find("gas_used"); it != js.end()) st.gas_used = it->get<std::uint64_t>();
            if (auto it = js.find("gas_price"); it != js.end()) st.gas_price = it->get<std::uint64_t>();
            st.bundle = get_or<bool>(js, "bundle", false);
            s.steps.push_back(std::move(st));
        } catch (const scenario_error&) {
            throw;
        } catch (const std::exception& e) {
            throw scenario_error(index, e.what());
        }
        ++index;
    }
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path.string());
    return parse_scenario(nlohmann::json::parse(in));
}

} // namespace rugscan
