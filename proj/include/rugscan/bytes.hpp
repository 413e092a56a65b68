#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rugscan {

using Bytes = std::vector<std::uint8_t>;

struct hex_error : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline int hex_nibble(char c) noexcept
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline std::string_view strip_0x(std::string_view s) noexcept
{
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
        s.remove_prefix(2);
    return s;
}

inline void decode_hex_into(std::string_view digits, std::uint8_t* out)
{
    for (std::size_t i = 0; i < digits.size() / 2; ++i) {
        const int hi = hex_nibble(digits[2 * i]);
        const int lo = hex_nibble(digits[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw hex_error("invalid hex digit in '" + std::string(digits) + "'");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
}

} // namespace detail

/// Lowercase hex with a "0x" prefix.
inline std::string to_hex(std::span<const std::uint8_t> bytes, bool prefix = true)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2 + 2);
    if (prefix) out += "0x";
    for (auto b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 0x0f];
    }
    return out;
}

/// Accepts an optional "0x" prefix and either letter case. Odd length is rejected.
inline Bytes bytes_from_hex(std::string_view text)
{
    auto digits = detail::strip_0x(text);
    if (digits.size() % 2 != 0)
        throw hex_error("odd-length hex string '" + std::string(text) + "'");
    Bytes out(digits.size() / 2);
    detail::decode_hex_into(digits, out.data());
    return out;
}

/// Fixed-width byte string. The tag keeps addresses, selectors, topics and
/// transaction hashes from being mixed up.
template <std::size_t N, class Tag>
struct FixedBytes
{
    static constexpr std::size_t size = N;
    std::array<std::uint8_t, N> bytes{};

    static FixedBytes from_hex(std::string_view text)
    {
        auto digits = detail::strip_0x(text);
        if (digits.size() != 2 * N)
            throw hex_error("expected " + std::to_string(N) + " hex bytes, got '" +
                            std::string(text) + "'");
        FixedBytes out;
        detail::decode_hex_into(digits, out.bytes.data());
        return out;
    }

    static FixedBytes from_span(std::span<const std::uint8_t> src)
    {
        if (src.size() != N)
            throw std::invalid_argument("expected " + std::to_string(N) + " bytes, got " +
                                        std::to_string(src.size()));
        FixedBytes out;
        std::memcpy(out.bytes.data(), src.data(), N);
        return out;
    }

    std::string hex() const { return to_hex(bytes); }

    bool is_zero() const noexcept
    {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }

    std::span<const std::uint8_t, N> view() const noexcept { return bytes; }

    auto operator<=>(const FixedBytes&) const = default;
};

struct AddressTag {};
struct SelectorTag {};
struct TopicTag {};
struct TxHashTag {};
struct WordTag {};

/// 20-byte account identifier.
using Address = FixedBytes<20, AddressTag>;
/// 4-byte function identifier.
using Selector = FixedBytes<4, SelectorTag>;
/// 32-byte event identifier (topic0).
using Topic = FixedBytes<32, TopicTag>;
using TxHash = FixedBytes<32, TxHashTag>;
/// Generic 32-byte ABI word (indexed topics, data slots).
using Word = FixedBytes<32, WordTag>;

} // namespace rugscan

template <std::size_t N, class Tag>
struct std::hash<rugscan::FixedBytes<N, Tag>>
{
    std::size_t operator()(const rugscan::FixedBytes<N, Tag>& v) const noexcept
    {
        // FNV-1a over the raw bytes
        std::uint64_t h = 1469598103934665603ull;
        for (auto b : v.bytes) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};
