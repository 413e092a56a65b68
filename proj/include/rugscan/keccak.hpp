#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace rugscan {

/// Keccak-256 as used by the EVM (original Keccak padding 0x01, not the
/// FIPS-202 SHA3 padding 0x06).
class Keccak256
{
public:
    static constexpr std::size_t digest_size = 32;
    using Digest = std::array<std::uint8_t, digest_size>;

    Keccak256& update(std::span<const std::uint8_t> data) noexcept
    {
        const std::uint8_t* p = data.data();
        std::size_t n = data.size();
        while (n > 0) {
            const std::size_t take = std::min(n, rate - buffered_);
            std::memcpy(buffer_.data() + buffered_, p, take);
            buffered_ += take;
            p += take;
            n -= take;
            if (buffered_ == rate) {
                absorb_block(buffer_.data());
                buffered_ = 0;
            }
        }
        return *this;
    }

    Keccak256& update(std::string_view text) noexcept
    {
        return update(std::span<const std::uint8_t>(
            reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }

    Digest finish() noexcept
    {
        std::memset(buffer_.data() + buffered_, 0, rate - buffered_);
        buffer_[buffered_] ^= 0x01;
        buffer_[rate - 1] ^= 0x80;
        absorb_block(buffer_.data());
        buffered_ = 0;

        Digest out{};
        for (std::size_t i = 0; i < digest_size / 8; ++i)
            for (std::size_t b = 0; b < 8; ++b)
                out[i * 8 + b] = static_cast<std::uint8_t>(state_[i] >> (8 * b));
        return out;
    }

    static Digest hash(std::span<const std::uint8_t> data) noexcept
    {
        return Keccak256{}.update(data).finish();
    }

    static Digest hash(std::string_view text) noexcept { return Keccak256{}.update(text).finish(); }

private:
    static constexpr std::size_t rate = 136; // 1088-bit rate for 256-bit output

    static constexpr std::uint64_t rotl(std::uint64_t x, unsigned s) noexcept
    {
        return s == 0 ? x : (x << s) | (x >> (64 - s));
    }

    void absorb_block(const std::uint8_t* block) noexcept
    {
        for (std::size_t i = 0; i < rate / 8; ++i) {
            std::uint64_t lane = 0;
            for (std::size_t b = 0; b < 8; ++b)
                lane |= static_cast<std::uint64_t>(block[i * 8 + b]) << (8 * b);
            state_[i] ^= lane;
        }
        permute();
    }

    void permute() noexcept
    {
        static constexpr std::uint64_t round_constants[24] = {
            0x0000000000000001ull, 0x0000000000008082ull, 0x800000000000808aull,
            0x8000000080008000ull, 0x000000000000808bull, 0x0000000080000001ull,
            0x8000000080008081ull, 0x8000000000008009ull, 0x000000000000008aull,
            0x0000000000000088ull, 0x0000000080008009ull, 0x000000008000000aull,
            0x000000008000808bull, 0x800000000000008bull, 0x8000000000008089ull,
            0x8000000000008003ull, 0x8000000000008002ull, 0x8000000000000080ull,
            0x000000000000800aull, 0x800000008000000aull, 0x8000000080008081ull,
            0x8000000000008080ull, 0x0000000080000001ull, 0x8000000080008008ull};
        static constexpr unsigned rotations[24] = {1,  3,  6,  10, 15, 21, 28, 36,
                                                   45, 55, 2,  14, 27, 41, 56, 8,
                                                   25, 43, 62, 18, 39, 61, 20, 44};
        static constexpr unsigned pi_lanes[24] = {10, 7,  11, 17, 18, 3,  5,  16,
                                                  8,  21, 24, 4,  15, 23, 19, 13,
                                                  12, 2,  20, 14, 22, 9,  6,  1};
        auto& a = state_;
        for (auto rc : round_constants) {
            // theta
            std::uint64_t c[5];
            for (int x = 0; x < 5; ++x)
                c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
            for (int x = 0; x < 5; ++x) {
                const std::uint64_t d = c[(x + 4) % 5] ^ rotl(c[(x + 1) % 5], 1);
                for (int y = 0; y < 25; y += 5) a[y + x] ^= d;
            }
            // rho + pi
            std::uint64_t carry = a[1];
            for (int i = 0; i < 24; ++i) {
                const unsigned j = pi_lanes[i];
                const std::uint64_t tmp = a[j];
                a[j] = rotl(carry, rotations[i]);
                carry = tmp;
            }
            // chi
            for (int y = 0; y < 25; y += 5) {
                std::uint64_t row[5];
                for (int x = 0; x < 5; ++x) row[x] = a[y + x];
                for (int x = 0; x < 5; ++x)
                    a[y + x] = row[x] ^ (~row[(x + 1) % 5] & row[(x + 2) % 5]);
            }
            // iota
            a[0] ^= rc;
        }
    }

    std::array<std::uint64_t, 25> state_{};
    std::array<std::uint8_t, rate> buffer_{};
    std::size_t buffered_ = 0;
};

} // namespace rugscan
