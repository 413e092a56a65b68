#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fixture.hpp"
#include "pools.hpp"
#include "tokens.hpp"

namespace rugscan {

inline constexpr double seconds_per_day = 86'400.0;

enum class LifetimeKind { token, pool };
/// Exclusive partition. `one_day` here means "more than one block but under
/// a day"; use LifetimeRecord::within_one_day() for the inclusive notion.
enum class LifetimeClass { one_block, one_day, longer };

inline const char* to_string(LifetimeKind k) { return k == LifetimeKind::token ? "token" : "pool"; }
inline const char* to_string(LifetimeClass c)
{
    switch (c) {
    case LifetimeClass::one_block: return "one-block";
    case LifetimeClass::one_day: return "one-day";
    default: return "longer";
    }
}

struct LifetimeRecord
{
    Address subject;
    LifetimeKind kind = LifetimeKind::token;
    BlockRef created_block;
    BlockRef last_event_block;
    std::uint64_t lifetime_blocks = 0;
    double lifetime_seconds = 0.0;
    /// true when both endpoints carried timestamps
    bool exact_seconds = false;
    LifetimeClass lifetime_class = LifetimeClass::one_block;

    bool within_one_day() const noexcept { return lifetime_seconds < seconds_per_day; }
};

struct lifetime_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline LifetimeRecord make_lifetime(const Address& subject, LifetimeKind kind, const BlockRef& created,
                                    const BlockRef& last, const ChainProfile& profile)
{
    if (last.number < created.number)
        throw lifetime_error(std::string(to_string(kind)) + " " + subject.hex() + ": last event block " +
                             std::to_string(last.number) + " precedes creation block " +
                             std::to_string(created.number));
    LifetimeRecord r;
    r.subject = subject;
    r.kind = kind;
    r.created_block = created;
    r.last_event_block = last;
    r.lifetime_blocks = last.number - created.number;
    if (created.timestamp && last.timestamp) {
        if (*last.timestamp < *created.timestamp)
            throw lifetime_error(subject.hex() + ": timestamps decrease along the block order");
        r.lifetime_seconds = static_cast<double>(*last.timestamp - *created.timestamp);
        r.exact_seconds = true;
    } else {
        r.lifetime_seconds = static_cast<double>(r.lifetime_blocks) * profile.mean_block_interval;
    }
    if (r.lifetime_blocks == 0) r.lifetime_class = LifetimeClass::one_block;
    else if (r.lifetime_seconds < seconds_per_day) r.lifetime_class = LifetimeClass::one_day;
    else r.lifetime_class = LifetimeClass::longer;
    return r;
}

/// One record per token, then one per pool (pools start at their PairCreated block).
inline std::vector<LifetimeRecord> compute_lifetimes(std::span<const TokenRecord> tokens,
                                                     std::span<const PoolRecord> pools, const ChainProfile& profile)
{
    std::vector<LifetimeRecord> out;
    out.reserve(tokens.size() + pools.size());
    for (const auto& t : tokens) out.push_back(make_lifetime(t.address, LifetimeKind::token, t.first_block, t.last_event_block, profile));
    for (const auto& p : pools) out.push_back(make_lifetime(p.pool, LifetimeKind::pool, p.created_block, p.last_event_block, profile));
    return out;
}

struct LifetimeShares
{
    std::size_t total = 0;
    std::size_t one_block = 0;
    /// lifetime under a day, one-block tokens included
    std::size_t one_day = 0;

    double one_block_fraction() const { return total ? static_cast<double>(one_block) / static_cast<double>(total) : 0.0; }
    double one_day_fraction() const { return total ? static_cast<double>(one_day) / static_cast<double>(total) : 0.0; }
};

inline LifetimeShares lifetime_shares(std::span<const LifetimeRecord> records, LifetimeKind kind)
{
    LifetimeShares s;
    for (const auto& r : records) {
        if (r.kind != kind) continue;
        ++s.total;
        if (r.lifetime_class == LifetimeClass::one_block) ++s.one_block;
        if (r.within_one_day()) ++s.one_day;
    }
    return s;
}

struct GridPoint
{
    std::string label;
    /// seconds; "1block" resolves to the profile's mean block interval
    double seconds = 0.0;
};

/// Parses "1block", "10m", "1h", "24h", "7d", "90s" (or a bare number of seconds).
inline GridPoint parse_grid_point(std::string_view text, double block_interval)
{
    GridPoint g{std::string(text), 0.0};
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || value < 0) throw std::invalid_argument("bad grid point '" + g.label + "'");
    const std::string_view unit(ptr, static_cast<std::size_t>(end - ptr));
    double scale;
    if (unit.empty() || unit == "s") scale = 1;
    else if (unit == "m") scale = 60;
    else if (unit == "h") scale = 3600;
    else if (unit == "d") scale = seconds_per_day;
    else if (unit == "block" || unit == "blocks") scale = block_interval;
    else throw std::invalid_argument("bad grid unit in '" + g.label + "'");
    g.seconds = value * scale;
    return g;
}

inline std::vector<GridPoint> parse_grid(std::string_view csv, double block_interval)
{
    std::vector<GridPoint> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        auto comma = csv.find(',', pos);
        if (comma == std::string_view::npos) comma = csv.size();
        auto item = csv.substr(pos, comma - pos);
        if (!item.empty()) out.push_back(parse_grid_point(item, block_interval));
        pos = comma + 1;
    }
    return out;
}

inline std::vector<GridPoint> default_grid(const ChainProfile& profile)
{
    return parse_grid("1block,10m,1h,4h,24h,7d,30d,365d", profile.mean_block_interval);
}

struct CdfPoint
{
    GridPoint at;
    /// fraction of records with lifetime_seconds < at.seconds
    double fraction = 0.0;
    std::size_t count = 0;
};

inline std::vector<CdfPoint> lifetime_cdf(std::span<const LifetimeRecord> records, std::span<const GridPoint> grid)
{
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i].seconds > grid[i - 1].seconds)) throw std::invalid_argument("grid must be strictly increasing");
    if (records.empty()) return {};
    std::vector<double> secs;
    secs.reserve(records.size());
    for (const auto& r : records) secs.push_back(r.lifetime_seconds);
    std::sort(secs.begin(), secs.end());
    std::vector<CdfPoint> out;
    for (const auto& g : grid) {
        const auto n = static_cast<std::size_t>(std::lower_bound(secs.begin(), secs.end(), g.seconds) - secs.begin());
        out.push_back({g, static_cast<double>(n) / static_cast<double>(secs.size()), n});
    }
    return out;
}

struct CreatorProfile
{
    Address creator;
    std::size_t tokens_created = 0;
    std::size_t via_creation_tx = 0;
    std::size_t via_internal = 0;
    std::size_t one_day_tokens = 0;
    bool is_spammer = false;
};

/// Groups tokens by deployer; ordered by descending tokens_created, then address.
/// `lifetimes` supplies the one-day counts (tokens without a record count as longer).
inline std::vector<CreatorProfile> creator_profiles(std::span<const TokenRecord> tokens,
                                                    std::span<const LifetimeRecord> lifetimes = {})
{
    std::unordered_map<Address, bool> one_day;
    for (const auto& l : lifetimes)
        if (l.kind == LifetimeKind::token) one_day[l.subject] = l.within_one_day();
    std::map<Address, CreatorProfile> by_creator;
    for (const auto& t : tokens) {
        auto& p = by_creator[t.creation.deployer];
        p.creator = t.creation.deployer;
        ++p.tokens_created;
        (t.creation.via_internal ? p.via_internal : p.via_creation_tx)++;
        if (auto it = one_day.find(t.address); it != one_day.end() && it->second) ++p.one_day_tokens;
    }
    std::vector<CreatorProfile> out;
    out.reserve(by_creator.size());
    for (auto& [_, p] : by_creator) out.push_back(p);
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.tokens_created > b.tokens_created; });
    return out;
}

struct SpammerSummary
{
    std::vector<CreatorProfile> profiles;
    double percentile = 0.01;
    /// smallest tokens_created among flagged creators
    std::size_t threshold = 0;
    std::size_t spammer_count = 0;
    std::size_t spammer_tokens = 0;
    std::size_t total_tokens = 0;

    double token_share() const
    {
        return total_tokens ? static_cast<double>(spammer_tokens) / static_cast<double>(total_tokens) : 0.0;
    }
};

/// Flags the top `percentile` of creators by token count (k = ceil(p * n));
/// every creator tied with the k-th is flagged as well.
inline SpammerSummary flag_spammers(std::vector<CreatorProfile> profiles, double percentile = 0.01)
{
    if (!(percentile > 0.0 && percentile <= 1.0)) throw std::invalid_argument("percentile must be in (0, 1]");
    if (profiles.empty()) throw std::invalid_argument("no creator profiles");
    std::stable_sort(profiles.begin(), profiles.end(),
                     [](const auto& a, const auto& b) { return a.tokens_created > b.tokens_created; });
    const auto n = profiles.size();
    auto k = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    SpammerSummary s;
    s.percentile = percentile;
    s.threshold = profiles[k - 1].tokens_created;
    for (auto& p : profiles) {
        p.is_spammer = p.tokens_created >= s.threshold;
        s.total_tokens += p.tokens_created;
        if (p.is_spammer) {
            ++s.spammer_count;
            s.spammer_tokens += p.tokens_created;
        }
    }
    s.profiles = std::move(profiles);
    return s;
}

/// Share of all tokens created by the lowest-ranked `fraction` of creators.
inline double bottom_creator_token_share(std::span<const CreatorProfile> profiles, double fraction)
{
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    for (const auto& p : profiles) {
        counts.push_back(p.tokens_created);
        total += p.tokens_created;
    }
    if (total == 0) return 0.0;
    std::sort(counts.begin(), counts.end());
    const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(counts.size()) + 1e-9));
    std::size_t bottom = 0;
    for (std::size_t i = 0; i < m && i < counts.size(); ++i) bottom += counts[i];
    return static_cast<double>(bottom) / static_cast<double>(total);
}

} // namespace rugscan
