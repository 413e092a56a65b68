#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chain.hpp"
#include "fixture.hpp"
#include "rpc.hpp"

namespace rugscan {

/// Inclusive block interval; first > last means empty.
struct BlockRange
{
    std::uint64_t first = 0;
    std::uint64_t last = 0;

    bool empty() const noexcept { return first > last; }
    std::uint64_t size() const noexcept { return empty() ? 0 : last - first + 1; }
    bool operator==(const BlockRange&) const = default;
};

inline std::string to_string(const BlockRange& r)
{
    return "[" + std::to_string(r.first) + ", " + std::to_string(r.last) + "]";
}

struct RetryPolicy
{
    unsigned max_retries = 4;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
    /// Replaceable for tests.
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };
};

struct FetchOptions
{
    std::uint64_t window = 2000;
    RetryPolicy retry;
    bool with_timestamps = true;
    unsigned workers = 1;
};

struct fetch_error : std::runtime_error
{
    fetch_error(BlockRange window, const std::string& what)
        : std::runtime_error("fetch failed for blocks " + to_string(window) + ": " + what), window(window)
    {
    }
    BlockRange window;
};

namespace ingest_detail {

template <class Fn>
auto with_retry(const RetryPolicy& policy, const BlockRange& window, Fn&& fn) -> decltype(fn())
{
    auto backoff = policy.initial_backoff;
    for (unsigned attempt = 0;; ++attempt) {
        try {
            return fn();
        } catch (const transport_error& e) {
            if (attempt >= policy.max_retries)
                throw fetch_error(window, "transport failure after " + std::to_string(attempt + 1) +
                                              " attempts: " + e.what());
            if (policy.sleep) policy.sleep(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(backoff.count()) * policy.multiplier));
        }
    }
}

/// Providers signal "too many results / range too wide" in several ways.
inline bool is_range_limit(const rpc_error& e)
{
    if (e.code == -32005) return true;
    std::string msg = e.message;
    std::transform(msg.begin(), msg.end(), msg.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const char* needle : {"range", "limit", "too many", "exceed"})
        if (msg.find(needle) != std::string::npos) return true;
    return false;
}

inline std::optional<Address> optional_address(const json& v)
{
    if (v.is_null()) return std::nullopt;
    return Address::from_hex(v.get<std::string>());
}

struct TxInfo
{
    Address from;
    std::uint64_t gas_used = 0;
    std::uint64_t gas_price = 0;
    bool success = true;
    std::optional<Address> contract_address;
};

inline TxInfo decode_receipt(const json& r)
{
    if (r.is_null()) throw transport_error("missing transaction receipt");
    TxInfo t;
    t.from = Address::from_hex(r.at("from").get<std::string>());
    t.gas_used = parse_quantity(r.at("gasUsed"));
    if (auto it = r.find("effectiveGasPrice"); it != r.end() && !it->is_null())
        t.gas_price = parse_quantity(*it);
    if (auto it = r.find("status"); it != r.end() && !it->is_null()) t.success = parse_quantity(*it) == 1;
    if (auto it = r.find("contractAddress"); it != r.end()) t.contract_address = optional_address(*it);
    return t;
}

/// Runs `fn(window)` over consecutive windows of `range` on up to `workers`
/// threads and concatenates results in window order.
template <class T, class Fn>
std::vector<T> over_windows(const BlockRange& range, std::uint64_t window, unsigned workers, Fn fn)
{
    std::vector<BlockRange> windows;
    if (range.empty()) return {};
    if (window == 0) window = 1;
    for (std::uint64_t b = range.first;; b += window) {
        const std::uint64_t end = (range.last - b < window) ? range.last : b + window - 1;
        windows.push_back({b, end});
        if (end == range.last) break;
    }
    std::vector<std::vector<T>> parts(windows.size());
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(windows.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < windows.size(); ++i) parts[i] = fn(windows[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < windows.size(); i = next++) {
                    try {
                        parts[i] = fn(windows[i]);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    std::vector<T> out;
    for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
    return out;
}

class TxCache
{
public:
    TxCache(JsonRpcClient& client, const RetryPolicy& retry) : client_(client), retry_(retry) {}

    TxInfo receipt(const TxHash& h, const BlockRange& window)
    {
        if (auto it = receipts_.find(h); it != receipts_.end()) return it->second;
        auto info = with_retry(retry_, window, [&] {
            return decode_receipt(client_.call("eth_getTransactionReceipt", json::array({h.hex()})));
        });
        receipts_.emplace(h, info);
        return info;
    }

    std::int64_t timestamp(std::uint64_t block, const BlockRange& window)
    {
        if (auto it = timestamps_.find(block); it != timestamps_.end()) return it->second;
        auto ts = with_retry(retry_, window, [&] {
            auto b = client_.call("eth_getBlockByNumber", json::array({quantity(block), false}));
            if (b.is_null()) throw transport_error("block " + std::to_string(block) + " not available");
            return static_cast<std::int64_t>(parse_quantity(b.at("timestamp")));
        });
        timestamps_.emplace(block, ts);
        return ts;
    }

private:
    JsonRpcClient& client_;
    const RetryPolicy& retry_;
    std::unordered_map<TxHash, TxInfo> receipts_;
    std::unordered_map<std::uint64_t, std::int64_t> timestamps_;
};

inline std::vector<json> get_logs_halving(JsonRpcClient& client, const std::optional<Topic>& topic0,
                                          const BlockRange& w, const RetryPolicy& retry)
{
    json filter = {{"fromBlock", quantity(w.first)}, {"toBlock", quantity(w.last)}};
    if (topic0) filter["topics"] = json::array({topic0->hex()});
    try {
        auto res = with_retry(retry, w, [&] { return client.call("eth_getLogs", json::array({filter})); });
        if (!res.is_array()) throw fetch_error(w, "eth_getLogs returned a non-array");
        return res.get<std::vector<json>>();
    } catch (const rpc_error& e) {
        if (!is_range_limit(e)) throw fetch_error(w, e.what());
        if (w.size() <= 1) throw fetch_error(w, std::string("range limit on a single block: ") + e.what());
        const std::uint64_t mid = w.first + (w.last - w.first) / 2;
        auto lo = get_logs_halving(client, topic0, {w.first, mid}, retry);
        auto hi = get_logs_halving(client, topic0, {mid + 1, w.last}, retry);
        lo.insert(lo.end(), std::make_move_iterator(hi.begin()), std::make_move_iterator(hi.end()));
        return lo;
    }
}

} // namespace ingest_detail

/// Every log in `range` whose topic0 matches (all logs when topic0 is empty),
/// in chain order, enriched with the originating EOA and gas fields from the
/// transaction receipt.
inline std::vector<LogRecord> fetch_logs(JsonRpcClient& client, const std::optional<Topic>& topic0,
                                         const BlockRange& range, const FetchOptions& opts = {})
{
    using namespace ingest_detail;
    return over_windows<LogRecord>(range, opts.window, opts.workers, [&](const BlockRange& w) {
        auto raw = get_logs_halving(client, topic0, w, opts.retry);
        TxCache cache(client, opts.retry);
        std::vector<LogRecord> out;
        out.reserve(raw.size());
        for (const auto& r : raw) {
            if (r.value("removed", false)) continue;
            const auto& topics = r.at("topics");
            if (topics.empty()) continue; // anonymous events carry no topic0
            LogRecord l;
            l.emitter = Address::from_hex(r.at("address").get<std::string>());
            l.block.number = parse_quantity(r.at("blockNumber"));
            l.log_index = static_cast<std::uint32_t>(parse_quantity(r.at("logIndex")));
            l.tx_hash = TxHash::from_hex(r.at("transactionHash").get<std::string>());
            l.topic0 = Topic::from_hex(topics[0].get<std::string>());
            for (std::size_t i = 1; i < topics.size(); ++i)
                l.indexed_topics.push_back(Word::from_hex(topics[i].get<std::string>()));
            l.data = bytes_from_hex(r.at("data").get<std::string>());
            const auto tx = cache.receipt(l.tx_hash, w);
            l.tx_sender = tx.from;
            l.gas_used = tx.gas_used;
            l.gas_price = tx.gas_price;
            if (opts.with_timestamps) l.block.timestamp = cache.timestamp(l.block.number, w);
            out.push_back(std::move(l));
        }
        std::stable_sort(out.begin(), out.end(),
                         [](const LogRecord& a, const LogRecord& b) { return a.key() < b.key(); });
        return out;
    });
}

/// Contract creation transactions (empty recipient) in `range`. The deployed
/// address comes from the receipt and the runtime bytecode from eth_getCode.
/// Failed or self-destructed deployments are skipped.
inline std::vector<ContractCreation> fetch_contract_creations(JsonRpcClient& client, const BlockRange& range,
                                                              const FetchOptions& opts = {})
{
    using namespace ingest_detail;
    return over_windows<ContractCreation>(range, opts.window, opts.workers, [&](const BlockRange& w) {
        TxCache cache(client, opts.retry);
        std::vector<ContractCreation> out;
        for (std::uint64_t n = w.first;; ++n) {
            auto block = with_retry(opts.retry, w, [&] {
                auto b = client.call("eth_getBlockByNumber", json::array({quantity(n), true}));
                if (b.is_null()) throw transport_error("block " + std::to_string(n) + " not available");
                return b;
            });
            const auto ts = static_cast<std::int64_t>(parse_quantity(block.at("timestamp")));
            for (const auto& tx : block.at("transactions")) {
                if (!tx.is_object()) continue;
                if (auto to = tx.find("to"); to != tx.end() && !to->is_null()) continue;
                const auto hash = TxHash::from_hex(tx.at("hash").get<std::string>());
                const auto info = cache.receipt(hash, w);
                if (!info.success || !info.contract_address) continue;
                auto code = with_retry(opts.retry, w, [&] {
                    return client.call("eth_getCode", json::array({info.contract_address->hex(), quantity(n)}));
                });
                ContractCreation c;
                c.contract = *info.contract_address;
                c.deployer = Address::from_hex(tx.at("from").get<std::string>());
                c.block = {n, ts};
                c.index = static_cast<std::uint32_t>(parse_quantity(tx.at("transactionIndex")));
                c.tx_hash = hash;
                c.via_internal = false;
                c.bytecode = bytes_from_hex(code.get<std::string>());
                c.gas_used = info.gas_used;
                c.gas_price = info.gas_price ? info.gas_price
                                             : (tx.contains("gasPrice") ? parse_quantity(tx.at("gasPrice")) : 0);
                if (c.bytecode.empty()) continue;
                out.push_back(std::move(c));
            }
            if (n == w.last) break;
        }
        return out;
    });
}

/// True for the ERC-20 shaped Transfer: topic0 + two indexed addresses and a
/// single 32-byte value. ERC-721 transfers index the token id and fail this.
inline bool is_fungible_transfer(const LogRecord& l)
{
    return l.topic0 == topics::transfer() && l.indexed_topics.size() == 2 && l.data.size() == 32;
}

/// Expansion pass: contracts that emit a fungible Transfer but have no
/// observed creation transaction were created internally. The earliest such
/// log stands in for the creation (block, triggering EOA); bytecode is fetched
/// from the node. Gas of the internal creation is unknown and left at zero.
inline std::vector<ContractCreation> recover_internal_creations(JsonRpcClient& client,
                                                                std::span<const LogRecord> logs,
                                                                const std::unordered_set<Address>& known,
                                                                const FetchOptions& opts = {})
{
    std::map<Address, const LogRecord*> earliest;
    for (const auto& l : logs) {
        if (!is_fungible_transfer(l) || known.contains(l.emitter)) continue;
        auto [it, inserted] = earliest.try_emplace(l.emitter, &l);
        if (!inserted && l.key() < it->second->key()) it->second = &l;
    }
    std::vector<ContractCreation> out;
    for (const auto& [addr, first] : earliest) {
        const BlockRange w{first->block.number, first->block.number};
        auto code = ingest_detail::with_retry(opts.retry, w, [&] {
            return client.call("eth_getCode", json::array({addr.hex(), "latest"}));
        });
        ContractCreation c;
        c.contract = addr;
        c.deployer = first->tx_sender;
        c.block = first->block;
        c.index = first->log_index;
        c.tx_hash = first->tx_hash;
        c.via_internal = true;
        c.bytecode = bytes_from_hex(code.get<std::string>());
        if (c.bytecode.empty()) continue;
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    return out;
}

namespace ingest_detail {

enum class Decoded { absent, ok, undecodable };

/// ABI `string` return, or a legacy bytes32 right-padded with zeros.
inline Decoded decode_abi_string(const Bytes& data, std::string& out)
{
    if (data.empty()) return Decoded::absent;
    if (data.size() == 32) {
        std::size_t n = 32;
        while (n > 0 && data[n - 1] == 0) --n;
        out.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n));
        return Decoded::ok;
    }
    if (data.size() < 64 || data.size() % 32 != 0) return Decoded::undecodable;
    const Amount offset = amount_from_word(std::span(data).subspan(0, 32));
    if (offset + 32 > data.size()) return Decoded::undecodable;
    const auto off = offset.convert_to<std::size_t>();
    const Amount len = amount_from_word(std::span(data).subspan(off, 32));
    if (off + 32 + len > data.size()) return Decoded::undecodable;
    const auto n = len.convert_to<std::size_t>();
    out.assign(data.begin() + static_cast<std::ptrdiff_t>(off + 32),
               data.begin() + static_cast<std::ptrdiff_t>(off + 32 + n));
    return Decoded::ok;
}

inline Decoded decode_uint(const Bytes& data, Amount& out)
{
    if (data.empty()) return Decoded::absent;
    if (data.size() < 32) return Decoded::undecodable;
    out = amount_from_word(std::span(data).subspan(0, 32));
    return Decoded::ok;
}

} // namespace ingest_detail

/// Read-only name()/symbol()/decimals()/totalSupply() calls. Reverting or
/// missing methods leave the field empty; malformed return data marks the
/// field undecodable. A non-contract address yields an empty, flagged record.
inline TokenMetadata call_token_metadata(JsonRpcClient& client, const Address& token,
                                         const std::string& block_tag = "latest",
                                         const RetryPolicy& retry = {})
{
    using namespace ingest_detail;
    TokenMetadata m;
    m.token = token;
    const BlockRange w{0, 0};
    auto code = with_retry(retry, w, [&] { return client.call("eth_getCode", json::array({token.hex(), block_tag})); });
    if (bytes_from_hex(code.get<std::string>()).empty()) {
        m.is_contract = false;
        return m;
    }
    auto call = [&](std::string_view sig) -> std::optional<Bytes> {
        const json tx = {{"to", token.hex()}, {"data", keccak_selector(sig).hex()}};
        try {
            auto res = with_retry(retry, w, [&] { return client.call("eth_call", json::array({tx, block_tag})); });
            return bytes_from_hex(res.get<std::string>());
        } catch (const rpc_error&) {
            return std::nullopt; // revert
        }
    };

    std::string text;
    if (auto r = call("name()")) {
        if (auto d = decode_abi_string(*r, text); d == Decoded::ok) m.name = text;
        else m.name_undecodable = d == Decoded::undecodable;
    }
    if (auto r = call("symbol()")) {
        if (auto d = decode_abi_string(*r, text); d == Decoded::ok) m.symbol = text;
        else m.symbol_undecodable = d == Decoded::undecodable;
    }
    Amount value;
    if (auto r = call("decimals()")) {
        auto d = decode_uint(*r, value);
        if (d == Decoded::ok && value <= 255) m.decimals = value.convert_to<std::uint32_t>();
        else m.decimals_undecodable = d != Decoded::absent;
    }
    if (auto r = call("totalSupply()")) {
        if (auto d = decode_uint(*r, value); d == Decoded::ok) m.total_supply = value;
        else m.total_supply_undecodable = d == Decoded::undecodable;
    }
    return m;
}

/// Creations, internal-creation recovery, every log, and metadata for the
/// contracts `want_metadata` selects, merged into one sorted fixture.
inline FixtureFile ingest_to_fixture(JsonRpcClient& client, ChainProfile profile, const BlockRange& range,
                                     const FetchOptions& opts,
                                     const std::function<bool(const ContractCreation&)>& want_metadata)
{
    profile.start_block = range.first;
    profile.end_block = range.last;
    profile.validate();

    auto creations = fetch_contract_creations(client, range, opts);
    auto logs = fetch_logs(client, std::nullopt, range, opts);
    std::unordered_set<Address> known;
    for (const auto& c : creations) known.insert(c.contract);
    auto internal = recover_internal_creations(client, logs, known, opts);
    creations.insert(creations.end(), std::make_move_iterator(internal.begin()),
                     std::make_move_iterator(internal.end()));

    FixtureFile f;
    f.header = profile;
    for (const auto& c : creations) {
        if (want_metadata && want_metadata(c)) {
            auto m = call_token_metadata(client, c.contract, "latest", opts.retry);
            m.block = c.block;
            m.index = c.index;
            f.records.emplace_back(std::move(m));
        }
    }
    for (auto& c : creations) f.records.emplace_back(std::move(c));
    for (auto& l : logs) f.records.emplace_back(std::move(l));
    std::stable_sort(f.records.begin(), f.records.end(),
                     [](const FixtureRecord& a, const FixtureRecord& b) { return record_key(a) < record_key(b); });
    return f;
}

} // namespace rugscan
