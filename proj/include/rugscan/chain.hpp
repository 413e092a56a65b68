#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bytes.hpp"
#include "keccak.hpp"

namespace rugscan {

/// Exact integer in token base units. Signed so gains and deltas share the
/// type; non-negativity of balances is enforced where values enter.
using Amount = boost::multiprecision::cpp_int;

struct BlockRef
{
    std::uint64_t number = 0;
    std::optional<std::int64_t> timestamp;

    bool operator==(const BlockRef&) const = default;
};

/// Total order over chain records: block number, then position in block.
struct EventKey
{
    std::uint64_t block = 0;
    std::uint32_t index = 0;

    auto operator<=>(const EventKey&) const = default;
};

struct LogRecord
{
    Address emitter;
    BlockRef block;
    std::uint32_t log_index = 0;
    TxHash tx_hash;
    /// EOA that originated the transaction.
    Address tx_sender;
    Topic topic0;
    /// topics[1..]
    std::vector<Word> indexed_topics;
    Bytes data;
    std::uint64_t gas_used = 0;
    /// wei per gas
    std::uint64_t gas_price = 0;

    EventKey key() const noexcept { return {block.number, log_index}; }
    bool operator==(const LogRecord&) const = default;
};

struct ContractCreation
{
    Address contract;
    /// Deploying EOA; for internal creations, the EOA that triggered the
    /// outermost call.
    Address deployer;
    BlockRef block;
    std::uint32_t index = 0;
    TxHash tx_hash;
    bool via_internal = false;
    Bytes bytecode;
    std::uint64_t gas_used = 0;
    std::uint64_t gas_price = 0;

    EventKey key() const noexcept { return {block.number, index}; }
    bool operator==(const ContractCreation&) const = default;
};

/// Result of the read-only name()/symbol()/decimals()/totalSupply() calls.
/// Absent optional methods leave a field empty; data that could not be
/// decoded sets the matching *_undecodable flag.
struct TokenMetadata
{
    Address token;
    BlockRef block;
    std::uint32_t index = 0;
    bool is_contract = true;
    std::optional<std::string> name;
    std::optional<std::string> symbol;
    std::optional<std::uint32_t> decimals;
    std::optional<Amount> total_supply;
    bool name_undecodable = false;
    bool symbol_undecodable = false;
    bool decimals_undecodable = false;
    bool total_supply_undecodable = false;

    EventKey key() const noexcept { return {block.number, index}; }
    bool operator==(const TokenMetadata&) const = default;
};

/// First four bytes of Keccak-256 over a canonical signature such as
/// "transfer(address,uint256)".
inline Selector keccak_selector(std::string_view signature_text) noexcept
{
    const auto digest = Keccak256::hash(signature_text);
    Selector out;
    std::copy_n(digest.begin(), Selector::size, out.bytes.begin());
    return out;
}

inline Topic keccak_topic(std::string_view event_signature_text) noexcept
{
    Topic out;
    out.bytes = Keccak256::hash(event_signature_text);
    return out;
}

/// gas_used * gas_price in wei, computed exactly.
inline Amount tx_fee(std::uint64_t gas_used, std::uint64_t gas_price)
{
    return Amount(gas_used) * Amount(gas_price);
}

inline Amount tx_fee(const LogRecord& log) { return tx_fee(log.gas_used, log.gas_price); }

namespace topics {
inline const Topic& transfer()
{
    static const Topic t = keccak_topic("Transfer(address,address,uint256)");
    return t;
}
inline const Topic& approval()
{
    static const Topic t = keccak_topic("Approval(address,address,uint256)");
    return t;
}
inline const Topic& pair_created()
{
    static const Topic t = keccak_topic("PairCreated(address,address,address,uint256)");
    return t;
}
inline const Topic& mint()
{
    static const Topic t = keccak_topic("Mint(address,uint256,uint256)");
    return t;
}
inline const Topic& burn()
{
    static const Topic t = keccak_topic("Burn(address,uint256,uint256,address)");
    return t;
}
inline const Topic& swap()
{
    static const Topic t = keccak_topic("Swap(address,uint256,uint256,uint256,uint256,address)");
    return t;
}
inline const Topic& sync()
{
    static const Topic t = keccak_topic("Sync(uint112,uint112)");
    return t;
}
} // namespace topics

// ---- ABI word helpers -----------------------------------------------------

inline Word word_from_amount(const Amount& value)
{
    if (value < 0) throw std::invalid_argument("negative value cannot be ABI-encoded");
    Word w;
    std::vector<std::uint8_t> be;
    boost::multiprecision::export_bits(value, std::back_inserter(be), 8, true);
    if (be.size() > Word::size) throw std::overflow_error("value exceeds uint256");
    std::copy(be.begin(), be.end(), w.bytes.begin() + (Word::size - be.size()));
    return w;
}

inline Amount amount_from_word(std::span<const std::uint8_t> word)
{
    Amount out;
    boost::multiprecision::import_bits(out, word.begin(), word.end(), 8, true);
    return out;
}

inline Amount amount_from_word(const Word& w) { return amount_from_word(std::span(w.bytes)); }

inline Word word_from_address(const Address& a)
{
    Word w;
    std::copy(a.bytes.begin(), a.bytes.end(), w.bytes.begin() + 12);
    return w;
}

/// Fails when the upper 12 bytes are not zero.
inline std::optional<Address> address_from_word(std::span<const std::uint8_t> word)
{
    if (word.size() != Word::size) return std::nullopt;
    for (std::size_t i = 0; i < 12; ++i)
        if (word[i] != 0) return std::nullopt;
    return Address::from_span(word.subspan(12));
}

inline std::optional<Address> address_from_word(const Word& w)
{
    return address_from_word(std::span<const std::uint8_t>(w.bytes));
}

/// Renders a base-unit amount with `decimals` fractional digits, trailing
/// zeros trimmed: format_units(2670000000000000000, 18) == "2.67".
inline std::string format_units(const Amount& value, unsigned decimals)
{
    const bool negative = value < 0;
    std::string digits = (negative ? Amount(-value) : value).str();
    if (decimals == 0) return (negative ? "-" : "") + digits;
    if (digits.size() <= decimals) digits.insert(0, decimals - digits.size() + 1, '0');
    std::string whole = digits.substr(0, digits.size() - decimals);
    std::string frac = digits.substr(digits.size() - decimals);
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    std::string out = negative ? "-" : "";
    out += whole;
    if (!frac.empty()) out += "." + frac;
    return out;
}

namespace chain_detail {

/// cpp_int reads a leading 0 as an octal prefix; strip it.
inline Amount decimal_amount(std::string digits)
{
    const auto first = digits.find_first_not_of('0');
    if (first == std::string::npos) return 0;
    digits.erase(0, first);
    return Amount(digits);
}

} // namespace chain_detail

/// Parses a decimal string such as "2.67" into base units. Rejects more
/// fractional digits than `decimals` allows.
inline Amount parse_units(std::string_view text, unsigned decimals)
{
    const auto dot = text.find('.');
    std::string whole(text.substr(0, dot));
    std::string frac = dot == std::string_view::npos ? std::string{} : std::string(text.substr(dot + 1));
    if (frac.size() > decimals)
        throw std::invalid_argument("too many fractional digits in '" + std::string(text) + "'");
    if (whole.empty()) whole = "0";
    frac.append(decimals - frac.size(), '0');
    const std::string all = whole + frac;
    if (all.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("not a decimal amount: '" + std::string(text) + "'");
    return chain_detail::decimal_amount(all);
}

/// Parses a non-negative decimal integer string.
inline Amount parse_amount(std::string_view text)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos)
        throw std::invalid_argument("not a non-negative integer: '" + std::string(text) + "'");
    return chain_detail::decimal_amount(std::string(text));
}

/// Last block (with timestamp when known) in which each address emitted a log.
inline std::unordered_map<Address, BlockRef> last_event_blocks(std::span<const LogRecord> logs)
{
    std::unordered_map<Address, BlockRef> out;
    out.reserve(logs.size() / 4 + 16);
    for (const auto& log : logs) {
        auto [it, inserted] = out.try_emplace(log.emitter, log.block);
        if (!inserted && log.block.number >= it->second.number) it->second = log.block;
    }
    return out;
}

} // namespace rugscan
