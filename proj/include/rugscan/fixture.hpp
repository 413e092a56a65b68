#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chain.hpp"

namespace rugscan {

/// Per-chain constants used by lifetime estimation and sniper thresholds.
struct ChainProfile
{
    std::string name = "custom";
    double mean_block_interval = 3.0; ///< seconds
    std::uint64_t start_block = 0;
    std::uint64_t end_block = 0;
    std::optional<Address> wrapped_native_token;
    std::uint64_t sniper_delay_blocks = 5;
    std::uint64_t sniper_min_pools = 100;

    static ChainProfile bsc()
    {
        ChainProfile p;
        p.name = "bsc";
        p.mean_block_interval = 3.0;
        p.sniper_delay_blocks = 5;
        p.sniper_min_pools = 100;
        return p;
    }

    static ChainProfile ethereum()
    {
        ChainProfile p;
        p.name = "ethereum";
        p.mean_block_interval = 15.0;
        p.sniper_delay_blocks = 3;
        p.sniper_min_pools = 10;
        return p;
    }

    /// Preset by name; unknown names yield a custom profile with BSC timing.
    static ChainProfile named(std::string_view name)
    {
        if (name == "bsc") return bsc();
        if (name == "ethereum") return ethereum();
        ChainProfile p;
        p.name = std::string(name);
        return p;
    }

    void validate() const
    {
        if (!(mean_block_interval > 0))
            throw std::invalid_argument("chain profile: mean_block_interval must be > 0");
        if (start_block > end_block)
            throw std::invalid_argument("chain profile: start_block > end_block");
    }

    bool operator==(const ChainProfile&) const = default;
};

using FixtureRecord = std::variant<ContractCreation, LogRecord, TokenMetadata>;

inline EventKey record_key(const FixtureRecord& r)
{
    return std::visit([](const auto& v) { return v.key(); }, r);
}

struct FixtureFile
{
    ChainProfile header;
    std::vector<FixtureRecord> records;

    bool operator==(const FixtureFile&) const = default;
};

struct fixture_error : std::runtime_error
{
    fixture_error(std::size_t line, const std::string& what)
        : std::runtime_error("fixture line " + std::to_string(line) + ": " + what), line(line)
    {
    }
    std::size_t line;
};

inline constexpr const char* fixture_format_tag = "rugscan-fixture/1";

namespace fixture_detail {

using ojson = nlohmann::ordered_json;

inline void put_block(ojson& j, const BlockRef& b, std::uint32_t index)
{
    j["block"] = b.number;
    if (b.timestamp) j["timestamp"] = *b.timestamp;
    j["index"] = index;
}

inline ojson encode_header(const ChainProfile& p)
{
    ojson j;
    j["kind"] = "header";
    j["format"] = fixture_format_tag;
    j["chain"] = p.name;
    j["mean_block_interval"] = p.mean_block_interval;
    j["start_block"] = p.start_block;
    j["end_block"] = p.end_block;
    if (p.wrapped_native_token) j["wrapped_native_token"] = p.wrapped_native_token->hex();
    j["sniper_delay_blocks"] = p.sniper_delay_blocks;
    j["sniper_min_pools"] = p.sniper_min_pools;
    return j;
}

inline ojson encode(const ContractCreation& c)
{
    ojson j;
    j["kind"] = "creation";
    put_block(j, c.block, c.index);
    j["contract"] = c.contract.hex();
    j["deployer"] = c.deployer.hex();
    j["tx_hash"] = c.tx_hash.hex();
    j["via_internal"] = c.via_internal;
    j["bytecode"] = to_hex(c.bytecode);
    j["gas_used"] = c.gas_used;
    j["gas_price"] = c.gas_price;
    return j;
}

inline ojson encode(const LogRecord& l)
{
    ojson j;
    j["kind"] = "log";
    put_block(j, l.block, l.log_index);
    j["emitter"] = l.emitter.hex();
    j["tx_hash"] = l.tx_hash.hex();
    j["tx_sender"] = l.tx_sender.hex();
    j["topic0"] = l.topic0.hex();
    auto& topics = j["topics"] = ojson::array();
    for (const auto& t : l.indexed_topics) topics.push_back(t.hex());
    j["data"] = to_hex(l.data);
    j["gas_used"] = l.gas_used;
    j["gas_price"] = l.gas_price;
    return j;
}

inline ojson encode(const TokenMetadata& m)
{
    ojson j;
    j["kind"] = "metadata";
    put_block(j, m.block, m.index);
    j["token"] = m.token.hex();
    j["is_contract"] = m.is_contract;
    if (m.name) j["name"] = *m.name;
    if (m.symbol) j["symbol"] = *m.symbol;
    if (m.decimals) j["decimals"] = *m.decimals;
    if (m.total_supply) j["total_supply"] = m.total_supply->str();
    ojson bad = ojson::array();
    if (m.name_undecodable) bad.push_back("name");
    if (m.symbol_undecodable) bad.push_back("symbol");
    if (m.decimals_undecodable) bad.push_back("decimals");
    if (m.total_supply_undecodable) bad.push_back("total_supply");
    if (!bad.empty()) j["undecodable"] = std::move(bad);
    return j;
}

template <class J>
const J& field(const J& j, const char* name)
{
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + name + "'");
    return *it;
}

template <class J>
BlockRef get_block(const J& j)
{
    BlockRef b;
    b.number = field(j, "block").template get<std::uint64_t>();
    if (auto it = j.find("timestamp"); it != j.end()) b.timestamp = it->template get<std::int64_t>();
    return b;
}

template <class J>
ChainProfile decode_header(const J& j)
{
    ChainProfile p;
    if (auto it = j.find("format"); it != j.end() && it->template get<std::string>() != fixture_format_tag)
        throw std::invalid_argument("unsupported fixture format '" + it->template get<std::string>() + "'");
    p.name = field(j, "chain").template get<std::string>();
    p.mean_block_interval = field(j, "mean_block_interval").template get<double>();
    p.start_block = field(j, "start_block").template get<std::uint64_t>();
    p.end_block = field(j, "end_block").template get<std::uint64_t>();
    if (auto it = j.find("wrapped_native_token"); it != j.end())
        p.wrapped_native_token = Address::from_hex(it->template get<std::string>());
    if (auto it = j.find("sniper_delay_blocks"); it != j.end())
        p.sniper_delay_blocks = it->template get<std::uint64_t>();
    if (auto it = j.find("sniper_min_pools"); it != j.end())
        p.sniper_min_pools = it->template get<std::uint64_t>();
    p.validate();
    return p;
}

template <class J>
FixtureRecord decode_record(const J& j)
{
    const auto kind = field(j, "kind").template get<std::string>();
    if (kind == "log") {
        LogRecord l;
        l.block = get_block(j);
        l.log_index = field(j, "index").template get<std::uint32_t>();
        l.emitter = Address::from_hex(field(j, "emitter").template get<std::string>());
        l.tx_hash = TxHash::from_hex(field(j, "tx_hash").template get<std::string>());
        l.tx_sender = Address::from_hex(field(j, "tx_sender").template get<std::string>());
        l.topic0 = Topic::from_hex(field(j, "topic0").template get<std::string>());
        for (const auto& t : field(j, "topics")) l.indexed_topics.push_back(Word::from_hex(t.template get<std::string>()));
        l.data = bytes_from_hex(field(j, "data").template get<std::string>());
        l.gas_used = field(j, "gas_used").template get<std::uint64_t>();
        l.gas_price = field(j, "gas_price").template get<std::uint64_t>();
        return l;
    }
    if (kind == "creation") {
        ContractCreation c;
        c.block = get_block(j);
        c.index = field(j, "index").template get<std::uint32_t>();
        c.contract = Address::from_hex(field(j, "contract").template get<std::string>());
        c.deployer = Address::from_hex(field(j, "deployer").template get<std::string>());
        c.tx_hash = TxHash::from_hex(field(j, "tx_hash").template get<std::string>());
        c.via_internal = field(j, "via_internal").template get<bool>();
        c.bytecode = bytes_from_hex(field(j, "bytecode").template get<std::string>());
        if (c.bytecode.empty()) throw std::invalid_argument("creation with empty bytecode");
        c.gas_used = field(j, "gas_used").template get<std::uint64_t>();
        c.gas_price = field(j, "gas_price").template get<std::uint64_t>();
        return c;
    }
    if (kind == "metadata") {
        TokenMetadata m;
        m.block = get_block(j);
        m.index = field(j, "index").template get<std::uint32_t>();
        m.token = Address::from_hex(field(j, "token").template get<std::string>());
        m.is_contract = field(j, "is_contract").template get<bool>();
        if (auto it = j.find("name"); it != j.end()) m.name = it->template get<std::string>();
        if (auto it = j.find("symbol"); it != j.end()) m.symbol = it->template get<std::string>();
        if (auto it = j.find("decimals"); it != j.end()) m.decimals = it->template get<std::uint32_t>();
        if (auto it = j.find("total_supply"); it != j.end())
            m.total_supply = parse_amount(it->template get<std::string>());
        if (auto it = j.find("undecodable"); it != j.end()) {
            for (const auto& f : *it) {
                const auto s = f.template get<std::string>();
                if (s == "name") m.name_undecodable = true;
                else if (s == "symbol") m.symbol_undecodable = true;
                else if (s == "decimals") m.decimals_undecodable = true;
                else if (s == "total_supply") m.total_supply_undecodable = true;
                else throw std::invalid_argument("unknown undecodable field '" + s + "'");
            }
        }
        return m;
    }
    throw std::invalid_argument("unknown record kind '" + kind + "'");
}

} // namespace fixture_detail

/// Serializes one record as a single NDJSON line (no trailing newline).
inline std::string encode_record_line(const FixtureRecord& r)
{
    return std::visit([](const auto& v) { return fixture_detail::encode(v).dump(); }, r);
}

inline std::string encode_header_line(const ChainProfile& p)
{
    return fixture_detail::encode_header(p).dump();
}

/// Writes header + records as NDJSON. Records must be sorted by
/// (block, index) and lie inside [start_block, end_block].
inline void write_fixture(std::ostream& out, const ChainProfile& profile,
                          std::span<const FixtureRecord> records)
{
    profile.validate();
    EventKey prev{};
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto key = record_key(records[i]);
        if (i > 0 && key < prev)
            throw fixture_error(i + 2, "records not sorted by (block, index)");
        if (key.block < profile.start_block || key.block > profile.end_block)
            throw fixture_error(i + 2, "record block " + std::to_string(key.block) +
                                           " outside header range");
        prev = key;
    }
    out << encode_header_line(profile) << '\n';
    for (const auto& r : records) out << encode_record_line(r) << '\n';
    if (!out) throw std::runtime_error("fixture write failed");
}

inline void write_fixture(const std::filesystem::path& path, const ChainProfile& profile,
                          std::span<const FixtureRecord> records)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_fixture(out, profile, records);
}

inline void write_fixture(const std::filesystem::path& path, const FixtureFile& f)
{
    write_fixture(path, f.header, f.records);
}

inline FixtureFile read_fixture(std::istream& in)
{
    FixtureFile f;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    EventKey prev{};
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            if (!have_header) {
                if (j.value("kind", "") != "header") throw std::invalid_argument("first line must be the header");
                f.header = fixture_detail::decode_header(j);
                have_header = true;
                continue;
            }
            auto rec = fixture_detail::decode_record(j);
            const auto key = record_key(rec);
            if (!f.records.empty() && key < prev)
                throw std::invalid_argument("records not sorted by (block, index)");
            if (key.block < f.header.start_block || key.block > f.header.end_block)
                throw std::invalid_argument("record block " + std::to_string(key.block) +
                                            " outside header range [" +
                                            std::to_string(f.header.start_block) + ", " +
                                            std::to_string(f.header.end_block) + "]");
            prev = key;
            f.records.push_back(std::move(rec));
        } catch (const fixture_error&) {
            throw;
        } catch (const std::exception& e) {
            throw fixture_error(line_no, e.what());
        }
    }
    if (!have_header) throw fixture_error(line_no, "missing header line");
    return f;
}

inline FixtureFile read_fixture(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open fixture " + path.string());
    return read_fixture(in);
}

/// Keccak-256 of a file's bytes, hex encoded.
inline std::string hash_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Keccak256 h;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto n = static_cast<std::size_t>(in.gcount());
        h.update(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(buf.data()), n));
    }
    return to_hex(h.finish());
}

inline std::string hash_text(std::string_view text) { return to_hex(Keccak256::hash(text)); }

} // namespace rugscan
