#pragma once

#include <cstdint>
#include <stdexcept>

#include "chain.hpp"

namespace rugscan::amm {

struct amm_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t bps_denominator = 10'000;
inline constexpr std::uint32_t max_fee_bps = 1'000;
/// LP amount locked forever on the first mint when the lock is enabled.
inline constexpr std::uint64_t minimum_liquidity = 1'000;

/// Reserves of a two-token constant-product pool.
struct PoolState
{
    Amount reserve0;
    Amount reserve1;
    Amount lp_total_supply;
    std::uint32_t fee_bps = 30;

    bool empty() const { return lp_total_supply == 0; }

    void validate() const
    {
        if (reserve0 < 0 || reserve1 < 0 || lp_total_supply < 0) throw amm_error("negative pool quantity");
        if ((lp_total_supply == 0) != (reserve0 == 0 && reserve1 == 0))
            throw amm_error("lp supply and reserves disagree on emptiness");
        if (fee_bps > max_fee_bps) throw amm_error("fee_bps above 1000");
    }

    bool operator==(const PoolState&) const = default;
};

enum class Side { token0_in, token1_in };

struct SwapResult
{
    Amount amount_out;
    PoolState state;
};

/// Output for `amount_in` with the fee taken from the input. Floors toward
/// the pool:
///   out = floor(y * a * (D - f) / (x * D + a * (D - f)))
/// which equals y - ceil(x*y / (x + a')) with a' = a * (D - f) / D kept exact.
inline Amount amount_out(const Amount& reserve_in, const Amount& reserve_out, const Amount& amount_in,
                         std::uint32_t fee_bps)
{
    if (amount_in <= 0) throw amm_error("swap amount must be positive");
    if (reserve_in <= 0 || reserve_out <= 0) throw amm_error("swap against an empty pool");
    const Amount in_after_fee = amount_in * (bps_denominator - fee_bps);
    return (reserve_out * in_after_fee) / (reserve_in * bps_denominator + in_after_fee);
}

inline SwapResult swap_exact_in(const PoolState& state, const Amount& amount_in, Side side)
{
    const bool zero_in = side == Side::token0_in;
    const Amount& x = zero_in ? state.reserve0 : state.reserve1;
    const Amount& y = zero_in ? state.reserve1 : state.reserve0;
    SwapResult r;
    r.amount_out = amount_out(x, y, amount_in, state.fee_bps);
    if (r.amount_out == 0) throw amm_error("swap output rounds to zero");
    r.state = state;
    if (zero_in) {
        r.state.reserve0 += amount_in;
        r.state.reserve1 -= r.amount_out;
    } else {
        r.state.reserve1 += amount_in;
        r.state.reserve0 -= r.amount_out;
    }
    return r;
}

/// Amount of the other token matching `amount` at the current reserve ratio.
inline Amount quote(const Amount& amount, const Amount& reserve_from, const Amount& reserve_to)
{
    if (reserve_from <= 0 || reserve_to <= 0) throw amm_error("quote against an empty pool");
    return amount * reserve_to / reserve_from;
}

struct MintResult
{
    /// credited to the provider
    Amount lp_minted;
    /// locked to the zero address (first mint with the lock enabled)
    Amount lp_locked;
    PoolState state;
};

inline Amount isqrt(const Amount& v)
{
    if (v < 0) throw amm_error("isqrt of negative value");
    return boost::multiprecision::sqrt(v);
}

/// First provision: lp = floor(sqrt(a0 * a1)). Later ones must be
/// proportional up to integer rounding, i.e. -y < a0*y - a1*x < x, and mint
/// lp = min(floor(a0 * S / x), floor(a1 * S / y)).
inline MintResult add_liquidity(const PoolState& state, const Amount& amount0, const Amount& amount1,
                                bool lock_minimum_liquidity = false)
{
    MintResult r;
    r.state = state;
    if (state.empty()) {
        if (amount0 <= 0 || amount1 <= 0) throw amm_error("first provision needs both amounts > 0");
        const Amount lp = isqrt(amount0 * amount1);
        if (lock_minimum_liquidity) {
            if (lp <= minimum_liquidity) throw amm_error("first provision too small for the liquidity lock");
            r.lp_locked = minimum_liquidity;
        }
        r.lp_minted = lp - r.lp_locked;
    } else {
        if (amount0 < 0 || amount1 < 0) throw amm_error("negative provision");
        const Amount& x = state.reserve0;
        const Amount& y = state.reserve1;
        const Amount skew = amount0 * y - amount1 * x;
        if (!(skew > -y && skew < x)) throw amm_error("provision does not match the reserve ratio");
        const Amount by0 = amount0 * state.lp_total_supply / x;
        const Amount by1 = amount1 * state.lp_total_supply / y;
        r.lp_minted = by0 < by1 ? by0 : by1;
    }
    if (r.lp_minted <= 0) throw amm_error("provision mints no LP tokens");
    r.state.reserve0 += amount0;
    r.state.reserve1 += amount1;
    r.state.lp_total_supply += r.lp_minted + r.lp_locked;
    return r;
}

struct BurnResult
{
    Amount amount0;
    Amount amount1;
    PoolState state;
};

/// Pro-rata redemption: amount_i = floor(reserve_i * lp / S).
inline BurnResult remove_liquidity(const PoolState& state, const Amount& lp_burned)
{
    if (lp_burned <= 0) throw amm_error("burn amount must be positive");
    if (lp_burned > state.lp_total_supply) throw amm_error("burn exceeds LP supply");
    BurnResult r;
    r.amount0 = state.reserve0 * lp_burned / state.lp_total_supply;
    r.amount1 = state.reserve1 * lp_burned / state.lp_total_supply;
    r.state = state;
    r.state.reserve0 -= r.amount0;
    r.state.reserve1 -= r.amount1;
    r.state.lp_total_supply -= lp_burned;
    return r;
}

} // namespace rugscan::amm
