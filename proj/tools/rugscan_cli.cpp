// rugscan command-line entry point. Exit codes: 0 ok, 1 usage, 2 input, 3 stage failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "rugscan/http_transport.hpp"
#include "rugscan/rugscan.hpp"

namespace {

using namespace rugscan;
namespace fs = std::filesystem;

constexpr int exit_ok = 0, exit_usage = 1, exit_input = 2, exit_stage = 3;

struct CommonFlags
{
    std::vector<std::string> fixtures;
    std::string out = "out";
    double threshold = 0.99;
    std::string scope = "one-day";
    std::string valuable_file;
    double percentile = 0.01;
    std::string grid;
    std::uint64_t delay = 0;
    std::uint64_t pools = 0;
    std::string sniper_scope = "exit-scam";
    std::string lists;
    std::string factories;
};

void add_common(CLI::App* app, CommonFlags& f, Stage stage)
{
    app->add_option("-f,--fixture", f.fixtures, "input fixture file(s)")->required();
    app->add_option("-o,--out", f.out, "output directory")->capture_default_str();
    app->add_option("--factories", f.factories, "factory label CSV (address,label)")->check(CLI::ExistingFile);
    const auto at_least = [&](Stage s) { return static_cast<int>(stage) >= static_cast<int>(s); };
    if (at_least(Stage::lifetimes)) app->add_option("--grid", f.grid, "CDF grid, e.g. 1block,10m,1h,24h,7d");
    if (at_least(Stage::spammers))
        app->add_option("--percentile", f.percentile, "spammer percentile in (0,1]")->capture_default_str();
    if (at_least(Stage::rugpulls)) {
        app->add_option("--threshold", f.threshold, "LP burn threshold")->capture_default_str();
        app->add_option("--scope", f.scope, "one-day | all")->capture_default_str()->check(CLI::IsMember({"one-day", "all"}));
        app->add_option("--valuable", f.valuable_file, "valuable-token list, one address per line")->check(CLI::ExistingFile);
    }
    if (at_least(Stage::names)) app->add_option("--lists", f.lists, "reference list directory")->check(CLI::ExistingDirectory);
    if (at_least(Stage::snipers)) {
        app->add_option("--delay", f.delay, "sniper mean-delay threshold in blocks (default: chain profile)");
        app->add_option("--pools", f.pools, "sniper pool-count threshold (default: chain profile)");
        app->add_option("--sniper-scope", f.sniper_scope, "exit-scam | all")
            ->capture_default_str()
            ->check(CLI::IsMember({"exit-scam", "all"}));
    }
}

PipelineConfig to_config(const CommonFlags& f, Stage stage)
{
    PipelineConfig c;
    for (const auto& p : f.fixtures) c.fixtures.emplace_back(p);
    c.out_dir = f.out;
    c.last_stage = stage;
    c.lp_burn_threshold = f.threshold;
    c.rug_scope = parse_rug_scope(f.scope);
    if (!f.valuable_file.empty()) c.valuable = read_address_list(f.valuable_file);
    c.spammer_percentile = f.percentile;
    if (!f.grid.empty()) c.grid = f.grid;
    if (f.delay) c.sniper_delay_blocks = f.delay;
    if (f.pools) c.sniper_min_pools = f.pools;
    c.sniper_scope = parse_sniper_scope(f.sniper_scope);
    if (!f.lists.empty()) c.lists_dir = f.lists;
    if (!f.factories.empty()) c.factory_labels = read_factory_labels(f.factories);
    return c;
}

int run_stage(const CommonFlags& f, Stage stage)
{
    PipelineConfig config;
    try {
        config = to_config(f, stage);
        if (!(config.lp_burn_threshold >= 0 && config.lp_burn_threshold <= 1))
            throw std::invalid_argument("--threshold must be in [0, 1]");
        if (!(config.spammer_percentile > 0 && config.spammer_percentile <= 1))
            throw std::invalid_argument("--percentile must be in (0, 1]");
    } catch (const std::exception& e) {
        std::cerr << "rugscan: " << e.what() << '\n';
        return exit_input;
    }
    try {
        const auto res = run_pipeline(config);
        std::cerr << "rugscan: " << res.manifest.stages_completed.size() << " stages, "
                  << res.manifest.outputs.size() << " outputs in " << config.out_dir.string() << " ("
                  << res.manifest.duration_seconds << " s)\n";
        return exit_ok;
    } catch (const input_error& e) {
        std::cerr << "rugscan: input error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "rugscan: " << e.what() << '\n';
        return exit_stage;
    }
}

struct IngestFlags
{
    std::string rpc;
    std::string chain = "bsc";
    std::uint64_t from = 0, to = 0;
    std::string out;
    std::uint64_t window = 2000;
    unsigned workers = 1;
    unsigned retries = 4;
    bool metadata = true;
    std::string wrapped_native;
};

int run_ingest(const IngestFlags& f)
{
    std::string url = f.rpc;
    if (url.empty())
        if (const char* env = std::getenv("RUGSCAN_RPC_URL")) url = env;
    if (url.empty()) {
        std::cerr << "rugscan: no RPC endpoint (use --rpc or RUGSCAN_RPC_URL)\n";
        return exit_usage;
    }
    try {
        auto profile = ChainProfile::named(f.chain);
        if (!f.wrapped_native.empty()) profile.wrapped_native_token = Address::from_hex(f.wrapped_native);
        JsonRpcClient client(std::make_shared<HttpTransport>(url));
        FetchOptions opts;
        opts.window = f.window;
        opts.workers = f.workers;
        opts.retry.max_retries = f.retries;
        const auto spec = StandardSpec::for_chain(profile.name);
        std::function<bool(const ContractCreation&)> want;
        if (f.metadata) want = [&](const ContractCreation& c) { return is_compliant(c.bytecode, spec).compliant; };
        const auto fixture = ingest_to_fixture(client, profile, BlockRange{f.from, f.to}, opts, want);
        write_fixture(f.out, fixture);
        std::cerr << "rugscan: wrote " << fixture.records.size() << " records to " << f.out << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "rugscan: ingest failed: " << e.what() << '\n';
        return exit_input;
    }
}

struct SimulateFlags
{
    std::string scenario;
    std::string generate;
    std::uint64_t seed = 1;
    std::size_t records = 1'000'000;
    std::string out;
};

int run_simulate(const SimulateFlags& f)
{
    if (f.scenario.empty() == f.generate.empty()) {
        std::cerr << "rugscan: simulate needs exactly one of --scenario or --generate\n";
        return exit_usage;
    }
    try {
        Scenario s;
        if (!f.scenario.empty()) s = load_scenario(f.scenario);
        else if (f.generate == "rugpulls") s = gen::generate_rug_population(f.seed).scenario;
        else if (f.generate == "snipers") s = gen::generate_sniper_population(f.seed).scenario;
        else if (f.generate == "gains") s = gen::generate_gain_scenario(f.seed, static_cast<gen::OperatorStyle>(f.seed % 4)).scenario;
        else s = gen::generate_throughput_scenario(f.seed, f.records);
        const auto result = run_scenario(s);
        write_fixture(f.out, result.fixture);
        std::cerr << "rugscan: wrote " << result.fixture.records.size() << " records to " << f.out << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "rugscan: simulate failed: " << e.what() << '\n';
        return exit_input;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rugscan: token, pool, rug-pull and sniper-bot forensics over EVM event data"};
    app.set_version_flag("--version", RUGSCAN_VERSION);
    app.require_subcommand(1);

    IngestFlags ingest;
    auto* ing = app.add_subcommand("ingest", "fetch a block range from a JSON-RPC endpoint into a fixture");
    ing->add_option("--rpc", ingest.rpc, "endpoint URL (default: $RUGSCAN_RPC_URL)");
    ing->add_option("--chain", ingest.chain, "chain profile: bsc | ethereum | <custom>")->capture_default_str();
    ing->add_option("--from", ingest.from, "first block")->required();
    ing->add_option("--to", ingest.to, "last block (inclusive)")->required();
    ing->add_option("-o,--out", ingest.out, "fixture to write")->required();
    ing->add_option("--window", ingest.window, "blocks per log request")->capture_default_str()->check(CLI::PositiveNumber);
    ing->add_option("--workers", ingest.workers, "parallel window fetchers")->capture_default_str()->check(CLI::Range(1, 64));
    ing->add_option("--retries", ingest.retries, "retry budget per request")->capture_default_str();
    ing->add_flag("!--no-metadata", ingest.metadata, "skip name/symbol/decimals/totalSupply calls");
    ing->add_option("--wrapped-native", ingest.wrapped_native, "wrapped native token address for the header");

    SimulateFlags sim;
    auto* simc = app.add_subcommand("simulate", "run a scenario through the AMM simulator and write a fixture");
    simc->add_option("--scenario", sim.scenario, "scenario JSON file")->check(CLI::ExistingFile);
    simc->add_option("--generate", sim.generate, "built-in generator")
        ->check(CLI::IsMember({"rugpulls", "snipers", "gains", "throughput"}));
    simc->add_option("--seed", sim.seed, "generator seed")->capture_default_str();
    simc->add_option("--records", sim.records, "approximate record count for --generate throughput")->capture_default_str();
    simc->add_option("-o,--out", sim.out, "fixture to write")->required();

    const std::pair<const char*, Stage> stages[] = {
        {"tokens", Stage::strip_lp},    {"pools", Stage::pools},        {"lifetimes", Stage::lifetimes},
        {"spammers", Stage::spammers},  {"rugpulls", Stage::rugpulls},  {"names", Stage::names},
        {"snipers", Stage::snipers},    {"report", Stage::report},      {"pipeline", Stage::report}};
    const char* help[] = {"identify tokens (LP tokens stripped)", "index pools and their events",
                          "token and pool lifetimes with CDF", "creator profiles and token spammers",
                          "exit-scam detection and gain accounting", "classify scam-token names",
                          "sniper-bot detection", "full run plus summary tables", "run every stage"};
    std::vector<CommonFlags> flags(std::size(stages));
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(stages); ++i) {
        auto* sub = app.add_subcommand(stages[i].first, help[i]);
        add_common(sub, flags[i], stages[i].second);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    if (*ing) return run_ingest(ingest);
    if (*simc) return run_simulate(sim);
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (*subs[i]) return run_stage(flags[i], stages[i].second);
    return exit_usage;
}
