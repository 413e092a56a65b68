#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "analytics.hpp"
#include "csv.hpp"
#include "fixture.hpp"
#include "names.hpp"
#include "pools.hpp"
#include "rugpull.hpp"
#include "snipers.hpp"
#include "tokens.hpp"

#ifndef RUGSCAN_VERSION
#define RUGSCAN_VERSION "0.0.0"
#endif

namespace rugscan {

enum class Stage { read_fixtures, tokens, pools, strip_lp, lifetimes, spammers, rugpulls, names, snipers, report };

inline constexpr Stage all_stages[] = {Stage::read_fixtures, Stage::tokens,   Stage::pools,
                                       Stage::strip_lp,      Stage::lifetimes, Stage::spammers,
                                       Stage::rugpulls,      Stage::names,     Stage::snipers,
                                       Stage::report};

inline const char* to_string(Stage s)
{
    switch (s) {
    case Stage::read_fixtures: return "read-fixtures";
    case Stage::tokens: return "tokens";
    case Stage::pools: return "pools";
    case Stage::strip_lp: return "strip-lp";
    case Stage::lifetimes: return "lifetimes";
    case Stage::spammers: return "spammers";
    case Stage::rugpulls: return "rugpulls";
    case Stage::names: return "names";
    case Stage::snipers: return "snipers";
    default: return "report";
    }
}

enum class SniperScope { exit_scam, all };

inline SniperScope parse_sniper_scope(std::string_view s)
{
    if (s == "exit-scam") return SniperScope::exit_scam;
    if (s == "all") return SniperScope::all;
    throw std::invalid_argument("sniper scope must be exit-scam or all");
}

struct PipelineConfig
{
    std::vector<std::filesystem::path> fixtures;
    std::filesystem::path out_dir = "out";
    Stage last_stage = Stage::report;
    double lp_burn_threshold = 0.99;
    RugScope rug_scope = RugScope::one_day;
    /// quote-side tokens in addition to the fixture's wrapped native token
    std::set<Address> valuable;
    double spammer_percentile = 0.01;
    std::optional<std::string> grid;
    std::optional<std::uint64_t> sniper_delay_blocks;
    std::optional<std::uint64_t> sniper_min_pools;
    SniperScope sniper_scope = SniperScope::exit_scam;
    std::optional<std::filesystem::path> lists_dir;
    std::map<Address, std::string> factory_labels;
};

/// Reads a one-address-per-line file; '#' starts a comment.
inline std::set<Address> read_address_list(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open address list " + path.string());
    std::set<Address> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        try {
            out.insert(Address::from_hex(line.substr(b, e - b + 1)));
        } catch (const std::exception& ex) {
            throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + ex.what());
        }
    }
    return out;
}

/// Reads "address,label" rows.
inline std::map<Address, std::string> read_factory_labels(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open factory labels " + path.string());
    std::map<Address, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cols = names_detail::split_csv_line(line);
        if (cols.size() < 2 || cols[0] == "address") continue;
        out[Address::from_hex(cols[0])] = cols[1];
    }
    return out;
}

/// Everything the stages compute, kept in memory for the summary.
struct Datasets
{
    ChainProfile profile;
    std::vector<ContractCreation> creations;
    std::vector<LogRecord> logs;
    std::vector<TokenMetadata> metadata;
    TokenDataset tokens;
    PoolIndex pool_index;
    TimelineSet timelines;
    std::vector<TokenRecord> standard_tokens;
    std::vector<LifetimeRecord> lifetimes;
    std::vector<CdfPoint> token_cdf;
    std::vector<CdfPoint> pool_cdf;
    std::optional<SpammerSummary> spammers;
    RugPullAnalysis rugpulls;
    std::vector<NameVerdict> names;
    std::vector<SwapLatency> latencies;
    std::vector<SniperVerdict> snipers;
    SniperActivity sniper_activity;
    std::uint64_t sniper_delay_blocks = 0;
    std::uint64_t sniper_min_pools = 0;
};

struct RunManifest
{
    std::string version = RUGSCAN_VERSION;
    ChainProfile profile;
    /// fixture path -> content hash
    std::vector<std::pair<std::string, std::string>> inputs;
    std::map<std::string, std::string> parameters;
    /// output file name -> content hash
    std::map<std::string, std::string> outputs;
    std::vector<std::string> stages_completed;
    std::optional<std::string> failed_stage;
    std::optional<std::string> failure;
    double duration_seconds = 0.0;

    nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["version"] = version;
        j["profile"] = nlohmann::ordered_json::parse(encode_header_line(profile));
        auto& in = j["inputs"] = nlohmann::ordered_json::array();
        for (const auto& [p, h] : inputs) in.push_back({{"path", p}, {"hash", h}});
        j["parameters"] = parameters;
        j["outputs"] = outputs;
        j["stages_completed"] = stages_completed;
        if (failed_stage) j["failed_stage"] = *failed_stage;
        if (failure) j["failure"] = *failure;
        j["duration_seconds"] = duration_seconds;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j)
    {
        RunManifest m;
        m.version = j.at("version").get<std::string>();
        m.profile = fixture_detail::decode_header(j.at("profile"));
        for (const auto& i : j.at("inputs")) m.inputs.emplace_back(i.at("path").get<std::string>(), i.at("hash").get<std::string>());
        m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
        m.stages_completed = j.at("stages_completed").get<std::vector<std::string>>();
        if (auto it = j.find("failed_stage"); it != j.end()) m.failed_stage = it->get<std::string>();
        if (auto it = j.find("failure"); it != j.end()) m.failure = it->get<std::string>();
        m.duration_seconds = j.at("duration_seconds").get<double>();
        return m;
    }
};

inline RunManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest " + path.string());
    return RunManifest::from_json(nlohmann::json::parse(in));
}

inline constexpr const char* manifest_file = "manifest.json";
inline constexpr const char* failed_marker = "FAILED";

/// Raised for unreadable or invalid inputs (stage 0).
struct input_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct stage_error : std::runtime_error
{
    stage_error(Stage s, const std::string& cause)
        : std::runtime_error(std::string("stage ") + to_string(s) + " failed: " + cause), stage(s)
    {
    }
    Stage stage;
};

struct summary_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Headline figures in the shape of the paper's dataset tables.
struct SummaryFigures
{
    std::vector<std::pair<std::string, std::string>> rows;

    void add(std::string key, std::string value) { rows.emplace_back(std::move(key), std::move(value)); }
    template <class T>
    void add_num(std::string key, T v)
    {
        add(std::move(key), CsvWriter::field(v));
    }
    std::string get(const std::string& key) const
    {
        for (const auto& [k, v] : rows)
            if (k == key) return v;
        throw std::out_of_range("no summary figure '" + key + "'");
    }
};

inline SummaryFigures summary_figures(const Datasets& d)
{
    SummaryFigures f;
    f.add("chain", d.profile.name);
    f.add_num("contracts_seen", d.tokens.contracts_seen);
    f.add_num("contracts_external", d.tokens.external_contracts);
    f.add_num("contracts_internal", d.tokens.internal_contracts);
    f.add_num("compliant_contracts", d.tokens.compliant_count());
    f.add_num("lp_tokens", d.tokens.lp_token_count());
    std::size_t ext = 0, internal = 0;
    for (const auto& t : d.standard_tokens) (t.creation.via_internal ? internal : ext)++;
    f.add_num("tokens", d.standard_tokens.size());
    f.add_num("tokens_external", ext);
    f.add_num("tokens_internal", internal);

    std::size_t mints = 0, burns = 0, swaps = 0;
    for (const auto& e : d.pool_index.events) {
        if (std::holds_alternative<MintEvent>(e)) ++mints;
        else if (std::holds_alternative<BurnEvent>(e)) ++burns;
        else ++swaps;
    }
    f.add_num("events_pair_created", d.pool_index.pools.size());
    f.add_num("events_mint", mints);
    f.add_num("events_burn", burns);
    f.add_num("events_swap", swaps);
    f.add_num("events_orphan", d.timelines.orphans.size());
    f.add_num("decode_issues", d.pool_index.issues.size());

    for (auto kind : {LifetimeKind::token, LifetimeKind::pool}) {
        const auto s = lifetime_shares(d.lifetimes, kind);
        const std::string k = to_string(kind);
        f.add_num(k + "_lifetimes", s.total);
        f.add_num(k + "_one_day", s.one_day);
        f.add_num(k + "_one_day_share", s.one_day_fraction());
        f.add_num(k + "_one_block", s.one_block);
        f.add_num(k + "_one_block_share", s.one_block_fraction());
    }

    if (d.spammers) {
        f.add_num("creators", d.spammers->profiles.size());
        f.add_num("spammers", d.spammers->spammer_count);
        f.add_num("spammer_threshold", d.spammers->threshold);
        f.add_num("spammer_token_share", d.spammers->token_share());
    } else {
        f.add_num("creators", std::size_t{0});
        f.add_num("spammers", std::size_t{0});
        f.add_num("spammer_threshold", std::size_t{0});
        f.add_num("spammer_token_share", 0.0);
    }

    const auto& r = d.rugpulls;
    f.add_num("rugpull_pools_examined", r.pools_examined);
    f.add_num("rugpull_pattern_matches", r.matched);
    f.add_num("rugpull_reports", r.reports.size());
    f.add_num("rugpull_successful", r.successful_count());
    f.add_num("rugpull_unsuccessful", r.reports.size() - r.successful_count());
    f.add_num("rugpull_unpriced", r.excluded.size());
    f.add_num("rugpull_out_of_scope", r.out_of_scope);
    const auto v = victim_stats(r.reports);
    f.add_num("victims", v.unique_victims);
    f.add_num("victim_buys", v.buy_count);
    f.add_num("victim_sells", v.sell_count);
    f.add_num("victim_buy_share", v.buy_share());

    const auto cats = category_counts(d.names);
    f.add_num("names_classified", cats.total);
    f.add_num("names_covered", cats.covered);
    for (const auto& [c, n] : cats.per_category) f.add_num(std::string("names_") + to_string(c), n);
    f.add_num("names_unique_ratio", name_frequency(d.names).unique_ratio());

    f.add_num("sniper_delay_blocks", d.sniper_delay_blocks);
    f.add_num("sniper_min_pools", d.sniper_min_pools);
    f.add_num("snipers_flagged", d.sniper_activity.flagged_traders);
    f.add_num("sniper_pool_coverage", d.sniper_activity.pool_coverage());
    f.add_num("sniper_swap_share", d.sniper_activity.swap_share());
    f.add_num("sniper_same_block_share", d.sniper_activity.same_block_share());
    return f;
}

/// Writes summary.txt and summary.csv. Refuses when any output listed in the
/// manifest no longer matches its recorded hash.
inline std::vector<std::string> emit_summary(const RunManifest& manifest, const Datasets& d,
                                             const std::filesystem::path& out_dir)
{
    for (const auto& [name, hash] : manifest.outputs) {
        const auto p = out_dir / name;
        if (!std::filesystem::exists(p)) throw summary_error("output " + name + " listed in the manifest is missing");
        if (hash_file(p) != hash) throw summary_error("output " + name + " does not match its manifest hash");
    }
    const auto f = summary_figures(d);
    {
        std::ofstream csv(out_dir / "summary.csv", std::ios::binary | std::ios::trunc);
        CsvWriter w(csv);
        w.row({"metric", "value"});
        for (const auto& [k, v] : f.rows) w.row({k, v});
    }
    {
        std::ofstream txt(out_dir / "summary.txt", std::ios::binary | std::ios::trunc);
        txt << "rugscan " << manifest.version << " summary (" << d.profile.name << ", blocks "
            << d.profile.start_block << "-" << d.profile.end_block << ")\n";
        std::size_t width = 0;
        for (const auto& [k, _] : f.rows) width = std::max(width, k.size());
        for (const auto& [k, v] : f.rows) txt << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
    }
    return {"summary.csv", "summary.txt"};
}

namespace pipeline_detail {

inline std::string ts(const BlockRef& b) { return b.timestamp ? std::to_string(*b.timestamp) : std::string{}; }

inline std::string join(const std::vector<std::string>& xs, char sep = ';')
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out.push_back(sep);
        out += xs[i];
    }
    return out;
}

class Outputs
{
public:
    explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {}

    template <class Fn>
    void csv(const std::string& name, Fn&& fill)
    {
        {
            std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
            CsvWriter w(out);
            fill(w);
            if (!out) throw std::runtime_error("write failed for " + name);
        }
        written_.push_back(name);
    }

    void text(const std::string& name, const std::string& content)
    {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw std::runtime_error("write failed for " + name);
        written_.push_back(name);
    }

    std::vector<std::string> take()
    {
        auto w = std::move(written_);
        written_.clear();
        return w;
    }

private:
    std::filesystem::path dir_;
    std::vector<std::string> written_;
};

inline FixtureFile merge_fixtures(const std::vector<std::filesystem::path>& paths,
                                  std::vector<std::pair<std::string, std::string>>& hashes)
{
    if (paths.empty()) throw input_error("no fixture given");
    FixtureFile merged;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!std::filesystem::is_regular_file(paths[i])) throw input_error("fixture not found: " + paths[i].string());
        FixtureFile f;
        try {
            f = read_fixture(paths[i]);
        } catch (const std::exception& e) {
            throw input_error(paths[i].string() + ": " + e.what());
        }
        hashes.emplace_back(paths[i].string(), hash_file(paths[i]));
        if (i == 0) {
            merged = std::move(f);
            continue;
        }
        if (f.header.name != merged.header.name)
            throw input_error("fixtures mix chains '" + merged.header.name + "' and '" + f.header.name + "'");
        merged.header.start_block = std::min(merged.header.start_block, f.header.start_block);
        merged.header.end_block = std::max(merged.header.end_block, f.header.end_block);
        if (!merged.header.wrapped_native_token) merged.header.wrapped_native_token = f.header.wrapped_native_token;
        for (auto& r : f.records) merged.records.push_back(std::move(r));
    }
    if (paths.size() > 1)
        std::stable_sort(merged.records.begin(), merged.records.end(),
                         [](const auto& a, const auto& b) { return record_key(a) < record_key(b); });
    return merged;
}

inline nlohmann::ordered_json report_json(const RugPullReport& r, const std::optional<std::uint32_t>& decimals)
{
    nlohmann::ordered_json j;
    j["pool"] = r.pool.hex();
    j["scam_token"] = r.scam_token.hex();
    j["quote_token"] = r.quote_token.hex();
    j["operator"] = r.operator_address.hex();
    j["mint_block"] = r.mint_block.number;
    j["burn_block"] = r.burn_block.number;
    for (auto [k, v] : {std::pair{"minted_lp", &r.minted_lp}, {"burned_lp", &r.burned_lp}, {"quote_added", &r.quote_added},
                        {"quote_removed", &r.quote_removed}, {"delta_B", &r.delta_B}, {"T_in", &r.T_in},
                        {"T_out", &r.T_out}, {"fees_base", &r.fees_base}, {"fees_swap", &r.fees_swap},
                        {"base_gain", &r.base_gain}, {"net_gain", &r.net_gain}})
        j[k] = v->str();
    if (decimals) {
        j["delta_B_units"] = format_units(r.delta_B, *decimals);
        j["net_gain_units"] = format_units(r.net_gain, *decimals);
    }
    j["manipulation"] = to_string(r.manipulation);
    j["successful"] = r.successful;
    j["victim_buys"] = r.victim_swaps.buy_count;
    j["victim_sells"] = r.victim_swaps.sell_count;
    auto& buyers = j["buyer_addresses"] = nlohmann::ordered_json::array();
    for (const auto& a : r.victim_swaps.buyer_addresses) buyers.push_back(a.hex());
    j["operator_swaps"] = r.operator_swaps;
    j["base_transactions"] = r.base_transactions;
    j["aggregated"] = r.aggregated;
    j["partial_fees"] = r.partial_fees;
    j["operator_mismatch"] = r.operator_mismatch;
    j["fees_in_quote"] = r.fees_in_quote;
    return j;
}

} // namespace pipeline_detail

struct PipelineResult
{
    RunManifest manifest;
    Datasets data;
};

/// Runs the stages in order up to config.last_stage, writing CSV outputs and
/// manifest.json into config.out_dir. On failure a FAILED marker is written,
/// partial outputs are kept and input_error / stage_error is rethrown.
inline PipelineResult run_pipeline(const PipelineConfig& config)
{
    using namespace pipeline_detail;
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    PipelineResult res;
    auto& m = res.manifest;
    auto& d = res.data;

    m.parameters["lp_burn_threshold"] = CsvWriter::field(config.lp_burn_threshold);
    m.parameters["rug_scope"] = config.rug_scope == RugScope::one_day ? "one-day" : "all";
    m.parameters["spammer_percentile"] = CsvWriter::field(config.spammer_percentile);
    m.parameters["sniper_scope"] = config.sniper_scope == SniperScope::exit_scam ? "exit-scam" : "all";
    m.parameters["last_stage"] = to_string(config.last_stage);
    {
        std::vector<std::string> v;
        for (const auto& a : config.valuable) v.push_back(a.hex());
        m.parameters["valuable"] = join(v);
    }
    if (config.grid) m.parameters["grid"] = *config.grid;
    if (config.lists_dir) m.parameters["lists_dir"] = config.lists_dir->string();

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw input_error("cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    fs::remove(config.out_dir / failed_marker, ec);
    Outputs out(config.out_dir);

    auto finish_manifest = [&] {
        m.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ofstream mf(config.out_dir / manifest_file, std::ios::binary | std::ios::trunc);
        mf << m.to_json().dump(2) << '\n';
    };
    auto record = [&](Stage s) {
        for (const auto& name : out.take()) m.outputs[name] = hash_file(config.out_dir / name);
        m.stages_completed.push_back(to_string(s));
    };

    Stage current = Stage::read_fixtures;
    try {
        // stage 0
        {
            auto merged = merge_fixtures(config.fixtures, m.inputs);
            d.profile = merged.header;
            m.profile = merged.header;
            for (auto& r : merged.records) {
                if (auto* l = std::get_if<LogRecord>(&r)) d.logs.push_back(std::move(*l));
                else if (auto* c = std::get_if<ContractCreation>(&r)) d.creations.push_back(std::move(*c));
                else d.metadata.push_back(std::move(std::get<TokenMetadata>(r)));
            }
            d.sniper_delay_blocks = config.sniper_delay_blocks.value_or(d.profile.sniper_delay_blocks);
            d.sniper_min_pools = config.sniper_min_pools.value_or(d.profile.sniper_min_pools);
            m.parameters["sniper_delay_blocks"] = std::to_string(d.sniper_delay_blocks);
            m.parameters["sniper_min_pools"] = std::to_string(d.sniper_min_pools);
            record(Stage::read_fixtures);
        }
        auto reached = [&](Stage s) {
            current = s;
            return static_cast<int>(s) <= static_cast<int>(config.last_stage);
        };

        if (reached(Stage::tokens)) {
            d.tokens = build_token_dataset(d.creations, d.logs, StandardSpec::for_chain(d.profile.name), {}, d.metadata);
            record(Stage::tokens);
        }

        if (reached(Stage::pools)) {
            d.pool_index = index_pools(d.logs);
            const auto last = last_event_blocks(d.logs);
            d.timelines = assemble_timelines(d.pool_index.pools, d.pool_index.events, &last);
            out.csv("pools.csv", [&](CsvWriter& w) {
                w.row({"pool", "factory", "factory_label", "creator", "token0", "token1", "created_block",
                       "created_timestamp", "last_event_block", "events", "tx_hash"});
                for (const auto& [addr, t] : d.timelines.timelines) {
                    const auto& p = t.record;
                    auto label = config.factory_labels.find(p.factory);
                    w.row({p.pool.hex(), p.factory.hex(), label == config.factory_labels.end() ? "" : label->second,
                           p.creator.hex(), p.token0.hex(), p.token1.hex(), CsvWriter::field(p.created_block.number),
                           ts(p.created_block), CsvWriter::field(p.last_event_block.number),
                           CsvWriter::field(t.events.size()), p.tx_hash.hex()});
                }
            });
            auto head = [](const EventHeader& h) {
                return std::vector<std::string>{h.pool.hex(), CsvWriter::field(h.block.number), ts(h.block),
                                                CsvWriter::field(h.log_index), h.tx_hash.hex(), h.tx_sender.hex(),
                                                h.fee().str()};
            };
            const std::vector<std::string> head_cols{"pool", "block", "timestamp", "log_index", "tx_hash", "tx_sender", "gas_fee"};
            auto with = [](std::vector<std::string> a, std::initializer_list<std::string> b) {
                a.insert(a.end(), b.begin(), b.end());
                return a;
            };
            out.csv("events_mint.csv", [&](CsvWriter& w) {
                w.row(with(head_cols, {"lp_amount", "amount0", "amount1"}));
                for (const auto& [_, t] : d.timelines.timelines)
                    for (const auto* e : t.all<MintEvent>())
                        w.row(with(head(e->at), {e->lp_amount.str(), e->amount0.str(), e->amount1.str()}));
            });
            out.csv("events_burn.csv", [&](CsvWriter& w) {
                w.row(with(head_cols, {"lp_amount", "amount0", "amount1", "to"}));
                for (const auto& [_, t] : d.timelines.timelines)
                    for (const auto* e : t.all<BurnEvent>())
                        w.row(with(head(e->at), {e->lp_amount.str(), e->amount0.str(), e->amount1.str(), e->to.hex()}));
            });
            out.csv("events_swap.csv", [&](CsvWriter& w) {
                w.row(with(head_cols, {"amount0_in", "amount1_in", "amount0_out", "amount1_out", "to"}));
                for (const auto& [_, t] : d.timelines.timelines)
                    for (const auto* e : t.all<SwapEvent>())
                        w.row(with(head(e->at), {e->amount0_in.str(), e->amount1_in.str(), e->amount0_out.str(),
                                                e->amount1_out.str(), e->to.hex()}));
            });
            out.csv("factories.csv", [&](CsvWriter& w) {
                w.row({"factory", "label", "pools", "share"});
                for (const auto& s : factory_shares(d.pool_index.pools, config.factory_labels))
                    w.row({s.factory.hex(), s.label, CsvWriter::field(s.pools), CsvWriter::field(s.share)});
            });
            out.csv("decode_issues.csv", [&](CsvWriter& w) {
                w.row({"block", "log_index", "emitter", "message"});
                for (const auto& i : d.pool_index.issues)
                    w.row({CsvWriter::field(i.key.block), CsvWriter::field(i.key.index), i.emitter.hex(), i.message});
                for (const auto& e : d.timelines.orphans) {
                    const auto& h = header(e);
                    w.row({CsvWriter::field(h.block.number), CsvWriter::field(h.log_index), h.pool.hex(), "event for unknown pool"});
                }
            });
            record(Stage::pools);
        }

        if (reached(Stage::strip_lp)) {
            for (auto& r : d.tokens.records) r.is_lp_token = d.timelines.timelines.contains(r.address);
            for (const auto& r : d.tokens.records)
                if (!r.is_lp_token) d.standard_tokens.push_back(r);
            auto token_rows = [&](CsvWriter& w, bool lp) {
                w.row({"address", "standard", "implements_optional", "deployer", "via_internal", "created_block",
                       "created_timestamp", "last_event_block", "last_event_timestamp", "name", "symbol", "decimals",
                       "total_supply"});
                for (const auto& t : d.tokens.records) {
                    if (t.is_lp_token != lp) continue;
                    const auto& md = t.metadata;
                    w.row({t.address.hex(), t.standard, CsvWriter::field(t.implements_optional), t.creation.deployer.hex(),
                           CsvWriter::field(t.creation.via_internal), CsvWriter::field(t.first_block.number),
                           ts(t.first_block), CsvWriter::field(t.last_event_block.number), ts(t.last_event_block),
                           md && md->name ? *md->name : "", md && md->symbol ? *md->symbol : "",
                           md && md->decimals ? std::to_string(*md->decimals) : "",
                           md && md->total_supply ? md->total_supply->str() : ""});
                }
            };
            out.csv("tokens.csv", [&](CsvWriter& w) { token_rows(w, false); });
            out.csv("lp_tokens.csv", [&](CsvWriter& w) { token_rows(w, true); });
            record(Stage::strip_lp);
        }

        if (reached(Stage::lifetimes)) {
            std::vector<PoolRecord> pools;
            for (const auto& [_, t] : d.timelines.timelines) pools.push_back(t.record);
            d.lifetimes = compute_lifetimes(d.standard_tokens, pools, d.profile);
            const auto grid = config.grid ? parse_grid(*config.grid, d.profile.mean_block_interval) : default_grid(d.profile);
            std::vector<LifetimeRecord> tok, pl;
            for (const auto& l : d.lifetimes) (l.kind == LifetimeKind::token ? tok : pl).push_back(l);
            d.token_cdf = lifetime_cdf(tok, grid);
            d.pool_cdf = lifetime_cdf(pl, grid);
            out.csv("lifetimes.csv", [&](CsvWriter& w) {
                w.row({"subject", "kind", "created_block", "last_event_block", "lifetime_blocks", "lifetime_seconds",
                       "exact_seconds", "class", "within_one_day"});
                for (const auto& l : d.lifetimes)
                    w.row({l.subject.hex(), to_string(l.kind), CsvWriter::field(l.created_block.number),
                           CsvWriter::field(l.last_event_block.number), CsvWriter::field(l.lifetime_blocks),
                           CsvWriter::field(l.lifetime_seconds), CsvWriter::field(l.exact_seconds),
                           to_string(l.lifetime_class), CsvWriter::field(l.within_one_day())});
            });
            out.csv("lifetime_cdf.csv", [&](CsvWriter& w) {
                w.row({"kind", "grid_label", "seconds", "fraction", "count"});
                for (const auto& [kind, cdf] : {std::pair{"token", &d.token_cdf}, {"pool", &d.pool_cdf}})
                    for (const auto& p : *cdf)
                        w.row({kind, p.at.label, CsvWriter::field(p.at.seconds), CsvWriter::field(p.fraction),
                               CsvWriter::field(p.count)});
            });
            record(Stage::lifetimes);
        }

        if (reached(Stage::spammers)) {
            auto profiles = creator_profiles(d.standard_tokens, d.lifetimes);
            if (!profiles.empty()) d.spammers = flag_spammers(std::move(profiles), config.spammer_percentile);
            out.csv("creators.csv", [&](CsvWriter& w) {
                w.row({"creator", "tokens_created", "via_creation_tx", "via_internal", "one_day_tokens", "is_spammer"});
                if (d.spammers)
                    for (const auto& p : d.spammers->profiles)
                        w.row({p.creator.hex(), CsvWriter::field(p.tokens_created), CsvWriter::field(p.via_creation_tx),
                               CsvWriter::field(p.via_internal), CsvWriter::field(p.one_day_tokens),
                               CsvWriter::field(p.is_spammer)});
            });
            out.csv("spammers.csv", [&](CsvWriter& w) {
                w.row({"percentile", "threshold", "spammer_count", "spammer_tokens", "total_tokens", "token_share"});
                if (d.spammers)
                    w.row({CsvWriter::field(d.spammers->percentile), CsvWriter::field(d.spammers->threshold),
                           CsvWriter::field(d.spammers->spammer_count), CsvWriter::field(d.spammers->spammer_tokens),
                           CsvWriter::field(d.spammers->total_tokens), CsvWriter::field(d.spammers->token_share())});
            });
            record(Stage::spammers);
        }

        if (reached(Stage::rugpulls)) {
            RugPullOptions opt;
            opt.threshold = Threshold::from_double(config.lp_burn_threshold);
            opt.scope = config.rug_scope;
            opt.valuable = config.valuable;
            opt.wrapped_native = d.profile.wrapped_native_token;
            d.rugpulls = analyze_rugpulls(d.timelines.timelines, d.standard_tokens, d.lifetimes, opt);
            std::unordered_map<Address, std::uint32_t> decimals;
            for (const auto& md : d.metadata)
                if (md.decimals) decimals.emplace(md.token, *md.decimals);
            out.csv("rugpulls.csv", [&](CsvWriter& w) {
                w.row({"pool", "scam_token", "quote_token", "operator", "mint_block", "burn_block", "minted_lp",
                       "burned_lp", "quote_added", "quote_removed", "delta_B", "T_in", "T_out", "fees_base",
                       "fees_swap", "base_gain", "net_gain", "manipulation", "successful", "victim_buys",
                       "victim_sells", "victims", "operator_swaps", "base_transactions", "aggregated",
                       "partial_fees", "operator_mismatch", "fees_in_quote"});
                for (const auto& r : d.rugpulls.reports) {
                    std::set<Address> victims = r.victim_swaps.buyer_addresses;
                    victims.insert(r.victim_swaps.seller_addresses.begin(), r.victim_swaps.seller_addresses.end());
                    w.row({r.pool.hex(), r.scam_token.hex(), r.quote_token.hex(), r.operator_address.hex(),
                           CsvWriter::field(r.mint_block.number), CsvWriter::field(r.burn_block.number),
                           r.minted_lp.str(), r.burned_lp.str(), r.quote_added.str(), r.quote_removed.str(),
                           r.delta_B.str(), r.T_in.str(), r.T_out.str(), r.fees_base.str(), r.fees_swap.str(),
                           r.base_gain.str(), r.net_gain.str(), to_string(r.manipulation),
                           CsvWriter::field(r.successful), CsvWriter::field(r.victim_swaps.buy_count),
                           CsvWriter::field(r.victim_swaps.sell_count), CsvWriter::field(victims.size()),
                           CsvWriter::field(r.operator_swaps), CsvWriter::field(r.base_transactions),
                           CsvWriter::field(r.aggregated), CsvWriter::field(r.partial_fees),
                           CsvWriter::field(r.operator_mismatch), CsvWriter::field(r.fees_in_quote)});
                }
            });
            {
                auto arr = nlohmann::ordered_json::array();
                for (const auto& r : d.rugpulls.reports) {
                    auto it = decimals.find(r.quote_token);
                    arr.push_back(report_json(r, it == decimals.end() ? std::nullopt : std::optional(it->second)));
                }
                out.text("rugpulls.json", arr.dump(2) + "\n");
            }
            out.csv("rugpull_excluded.csv", [&](CsvWriter& w) {
                w.row({"pool", "pricing"});
                for (const auto& e : d.rugpulls.excluded) w.row({e.pool.hex(), to_string(e.pricing)});
            });
            record(Stage::rugpulls);
        }

        if (reached(Stage::names)) {
            const auto lists = config.lists_dir ? load_reference_lists(*config.lists_dir) : ReferenceLists::defaults();
            std::unordered_map<Address, const TokenMetadata*> meta;
            for (const auto& md : d.metadata) meta.try_emplace(md.token, &md);
            std::set<Address> scam_tokens;
            for (const auto& r : d.rugpulls.reports) scam_tokens.insert(r.scam_token);
            for (const auto& t : scam_tokens) {
                auto it = meta.find(t);
                const std::string name = it != meta.end() && it->second->name ? *it->second->name : std::string{};
                d.names.push_back(classify(t, name, lists));
            }
            out.csv("names.csv", [&](CsvWriter& w) {
                w.row({"token", "name", "normalized", "categories", "matched_terms"});
                for (const auto& v : d.names) {
                    std::vector<std::string> cats;
                    for (auto c : v.categories) cats.emplace_back(to_string(c));
                    w.row({v.token.hex(), v.name, v.normalized, join(cats), join(v.matched_terms)});
                }
            });
            out.csv("name_frequency.csv", [&](CsvWriter& w) {
                w.row({"name", "count"});
                for (const auto& n : name_frequency(d.names).table) w.row({n.name, CsvWriter::field(n.count)});
            });
            record(Stage::names);
        }

        if (reached(Stage::snipers)) {
            std::set<Address> scam_pools;
            for (const auto& r : d.rugpulls.reports) scam_pools.insert(r.pool);
            const auto* restrict_to = config.sniper_scope == SniperScope::exit_scam ? &scam_pools : nullptr;
            d.latencies = swap_latencies(d.timelines.timelines, restrict_to);
            d.snipers = flag_snipers(d.latencies, d.sniper_delay_blocks, d.sniper_min_pools);
            d.sniper_activity = sniper_activity_stats(d.snipers, d.latencies, d.timelines.timelines, restrict_to);
            out.csv("snipers.csv", [&](CsvWriter& w) {
                w.row({"trader", "pools_swapped", "mean_delay_blocks", "same_block_fraction", "flagged"});
                for (const auto& v : d.snipers)
                    if (v.flagged)
                        w.row({v.trader.hex(), CsvWriter::field(v.pools_swapped), CsvWriter::field(v.mean_delay_blocks),
                               CsvWriter::field(v.same_block_fraction), CsvWriter::field(v.flagged)});
            });
            out.csv("sniper_scatter.csv", [&](CsvWriter& w) {
                w.row({"trader", "pools_swapped", "mean_delay_blocks", "flagged"});
                for (const auto& v : d.snipers)
                    w.row({v.trader.hex(), CsvWriter::field(v.pools_swapped), CsvWriter::field(v.mean_delay_blocks),
                           CsvWriter::field(v.flagged)});
            });
            out.csv("swap_latencies.csv", [&](CsvWriter& w) {
                w.row({"trader", "pool", "delay_blocks", "same_block"});
                for (const auto& l : d.latencies)
                    w.row({l.trader.hex(), l.pool.hex(), CsvWriter::field(l.delay_blocks), CsvWriter::field(l.same_block)});
            });
            record(Stage::snipers);
        }

        if (reached(Stage::report)) {
            finish_manifest();
            for (const auto& name : emit_summary(m, d, config.out_dir)) m.outputs[name] = hash_file(config.out_dir / name);
            m.stages_completed.push_back(to_string(Stage::report));
        }
    } catch (const std::exception& e) {
        m.failed_stage = to_string(current);
        m.failure = e.what();
        for (const auto& name : out.take())
            if (fs::exists(config.out_dir / name)) m.outputs[name] = hash_file(config.out_dir / name);
        finish_manifest();
        std::ofstream(config.out_dir / failed_marker) << to_string(current) << ": " << e.what() << '\n';
        if (current == Stage::read_fixtures) {
            if (dynamic_cast<const input_error*>(&e)) throw;
            throw input_error(e.what());
        }
        throw stage_error(current, e.what());
    }
    finish_manifest();
    return res;
}

} // namespace rugscan
