#include <gtest/gtest.h>

#include <sys/wait.h>

#include <fstream>

#include "rugscan/pipeline.hpp"
#include "rugscan/scenario.hpp"
#include "support/scenarios.hpp"

using namespace rugscan;
namespace fs = std::filesystem;

namespace {

fs::path write_small_market(const fs::path& dir)
{
    const auto sim = run_scenario(rugscan::testing::small_market());
    const auto p = dir / "market.ndjson";
    write_fixture(p, sim.fixture);
    return p;
}

PipelineConfig config_for(const fs::path& fixture, const fs::path& out)
{
    PipelineConfig c;
    c.fixtures = {fixture};
    c.out_dir = out;
    c.rug_scope = RugScope::all;
    c.lists_dir = fs::path(RUGSCAN_DATA_DIR) / "lists";
    return c;
}

std::vector<std::string> csv_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

int run_cli(const std::string& args)
{
    const auto cmd = std::string(RUGSCAN_CLI) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST(Pipeline, SmallMarketEndToEnd)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_e2e");
    const auto res = run_pipeline(config_for(write_small_market(dir), dir / "out"));
    const auto out = dir / "out";

    EXPECT_EQ(res.manifest.stages_completed.size(), std::size(all_stages));
    EXPECT_FALSE(res.manifest.failed_stage);
    EXPECT_FALSE(fs::exists(out / failed_marker));
    for (const char* name : {"tokens.csv", "lp_tokens.csv", "pools.csv", "events_mint.csv", "events_burn.csv",
                             "events_swap.csv", "lifetimes.csv", "lifetime_cdf.csv", "creators.csv", "spammers.csv",
                             "rugpulls.csv", "rugpulls.json", "names.csv", "snipers.csv", "summary.csv", "summary.txt"}) {
        ASSERT_TRUE(fs::exists(out / name)) << name;
        ASSERT_TRUE(res.manifest.outputs.contains(name)) << name;
        EXPECT_EQ(res.manifest.outputs.at(name), hash_file(out / name)) << name;
    }

    EXPECT_EQ(csv_lines(out / "tokens.csv").size(), 1u + 3u);
    EXPECT_EQ(csv_lines(out / "lp_tokens.csv").size(), 1u + 2u);
    EXPECT_EQ(csv_lines(out / "pools.csv").size(), 1u + 2u);
    EXPECT_EQ(csv_lines(out / "events_swap.csv").size(), 1u + 4u);
    const auto rugs = csv_lines(out / "rugpulls.csv");
    ASSERT_EQ(rugs.size(), 2u);
    EXPECT_NE(rugs[1].find(res.data.timelines.timelines.begin()->first.hex()), std::string::npos);

    const auto f = summary_figures(res.data);
    EXPECT_EQ(f.get("tokens"), "3");
    EXPECT_EQ(f.get("lp_tokens"), "2");
    EXPECT_EQ(f.get("events_swap"), "4");
    EXPECT_EQ(f.get("rugpull_reports"), "1");
    EXPECT_EQ(f.get("victims"), "2");
    EXPECT_THROW(f.get("nonexistent"), std::out_of_range);

    const auto manifest = read_manifest(out / manifest_file);
    EXPECT_EQ(manifest.outputs, res.manifest.outputs);
    EXPECT_EQ(manifest.parameters.at("rug_scope"), "all");
    ASSERT_EQ(manifest.inputs.size(), 1u);
    EXPECT_EQ(manifest.inputs[0].second, hash_file(dir / "market.ndjson"));
}

TEST(Pipeline, OutputsAreDeterministic)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_det");
    const auto fixture = write_small_market(dir);
    const auto a = run_pipeline(config_for(fixture, dir / "a"));
    const auto b = run_pipeline(config_for(fixture, dir / "b"));
    EXPECT_EQ(a.manifest.outputs, b.manifest.outputs);
    EXPECT_FALSE(a.manifest.outputs.empty());
}

TEST(Pipeline, StopsAtTheRequestedStage)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_partial");
    auto c = config_for(write_small_market(dir), dir / "out");
    c.last_stage = Stage::pools;
    const auto res = run_pipeline(c);
    EXPECT_TRUE(fs::exists(dir / "out" / "pools.csv"));
    EXPECT_FALSE(fs::exists(dir / "out" / "rugpulls.csv"));
    EXPECT_EQ(res.manifest.stages_completed.back(), "pools");
}

TEST(Pipeline, MissingOrBadFixtureIsAnInputError)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_input");
    EXPECT_THROW(run_pipeline(config_for(dir / "absent.ndjson", dir / "out")), input_error);
    EXPECT_TRUE(fs::exists(dir / "out" / failed_marker));

    std::ofstream(dir / "bad.ndjson") << "not json\n";
    try {
        run_pipeline(config_for(dir / "bad.ndjson", dir / "out2"));
        FAIL();
    } catch (const input_error& e) {
        EXPECT_NE(std::string(e.what()).find("bad.ndjson"), std::string::npos);
    }
    const auto m = read_manifest(dir / "out2" / manifest_file);
    EXPECT_EQ(m.failed_stage, "read-fixtures");
}

TEST(Pipeline, LaterFailureIsAStageError)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_stage");
    auto sim = run_scenario(rugscan::testing::small_market());
    // a swap on the pool one block before its first liquidity
    auto& records = sim.fixture.records;
    const auto pool = sim.at("POOL");
    auto it = std::find_if(records.begin(), records.end(), [&](const FixtureRecord& r) {
        const auto* l = std::get_if<LogRecord>(&r);
        return l && l->emitter == pool && l->topic0 == topics::swap();
    });
    ASSERT_NE(it, records.end());
    auto early = std::get<LogRecord>(*it);
    early.block = {101, *early.block.timestamp - 3};
    early.log_index = 0;
    auto pos = std::find_if(records.begin(), records.end(), [](const FixtureRecord& r) { return record_key(r).block > 101; });
    records.insert(pos, early);
    write_fixture(dir / "early.ndjson", sim.fixture);

    try {
        run_pipeline(config_for(dir / "early.ndjson", dir / "out"));
        FAIL();
    } catch (const stage_error& e) {
        EXPECT_EQ(e.stage, Stage::snipers);
    }
    std::ifstream marker(dir / "out" / failed_marker);
    std::string line;
    std::getline(marker, line);
    EXPECT_TRUE(line.starts_with("snipers:")) << line;
    const auto m = read_manifest(dir / "out" / manifest_file);
    EXPECT_EQ(m.failed_stage, "snipers");
    EXPECT_TRUE(m.outputs.contains("rugpulls.csv"));
}

TEST(Pipeline, SummaryRefusesTamperedOutputs)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_tamper");
    const auto res = run_pipeline(config_for(write_small_market(dir), dir / "out"));
    EXPECT_NO_THROW(emit_summary(res.manifest, res.data, dir / "out"));
    std::ofstream(dir / "out" / "pools.csv", std::ios::app) << "extra\n";
    EXPECT_THROW(emit_summary(res.manifest, res.data, dir / "out"), summary_error);
    fs::remove(dir / "out" / "pools.csv");
    EXPECT_THROW(emit_summary(res.manifest, res.data, dir / "out"), summary_error);
}

TEST(Pipeline, ManifestJsonRoundTrip)
{
    RunManifest m;
    m.profile = ChainProfile::ethereum();
    m.inputs = {{"a.ndjson", "0x01"}};
    m.parameters = {{"k", "v"}};
    m.outputs = {{"x.csv", "0x02"}};
    m.stages_completed = {"read_fixtures"};
    m.failed_stage = "tokens";
    m.failure = "boom";
    m.duration_seconds = 1.5;
    const auto back = RunManifest::from_json(m.to_json());
    EXPECT_EQ(back.inputs, m.inputs);
    EXPECT_EQ(back.parameters, m.parameters);
    EXPECT_EQ(back.outputs, m.outputs);
    EXPECT_EQ(back.stages_completed, m.stages_completed);
    EXPECT_EQ(back.failed_stage, m.failed_stage);
    EXPECT_EQ(back.failure, m.failure);
    EXPECT_EQ(back.profile.name, "ethereum");
}

TEST(Pipeline, AuxiliaryInputFiles)
{
    const auto dir = rugscan::testing::temp_dir("pipeline_aux");
    std::ofstream(dir / "valuable.txt") << "# stablecoins\n0x00000000000000000000000000000000000000aa\n\n  0x00000000000000000000000000000000000000Bb  \n";
    const auto v = read_address_list(dir / "valuable.txt");
    EXPECT_EQ(v.size(), 2u);
    EXPECT_TRUE(v.contains(Address::from_hex("0x00000000000000000000000000000000000000bb")));
    std::ofstream(dir / "bad.txt") << "0x1234\n";
    EXPECT_THROW(read_address_list(dir / "bad.txt"), std::exception);

    std::ofstream(dir / "factories.csv") << "address,label\n0x00000000000000000000000000000000000000aa,PancakeSwap\n";
    const auto labels = read_factory_labels(dir / "factories.csv");
    EXPECT_EQ(labels.at(Address::from_hex("0x00000000000000000000000000000000000000aa")), "PancakeSwap");
    EXPECT_EQ(parse_sniper_scope("all"), SniperScope::all);
    EXPECT_THROW(parse_sniper_scope("some"), std::invalid_argument);
}

TEST(Cli, ExitCodes)
{
    const auto dir = rugscan::testing::temp_dir("cli");
    const auto fixture = write_small_market(dir);
    EXPECT_EQ(run_cli("pipeline -f " + fixture.string() + " -o " + (dir / "out").string() + " --scope all"), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.txt"));
    EXPECT_EQ(run_cli("pools -f " + fixture.string() + " -o " + (dir / "pools").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "pools" / "pools.csv"));
    EXPECT_FALSE(fs::exists(dir / "pools" / "rugpulls.csv"));

    EXPECT_EQ(run_cli("pipeline --no-such-flag"), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);
    EXPECT_EQ(run_cli("pipeline -f " + (dir / "missing.ndjson").string() + " -o " + (dir / "x").string()), 2);
    EXPECT_EQ(run_cli("--version"), 0);

    EXPECT_EQ(run_cli("simulate --scenario " + (fs::path(RUGSCAN_DATA_DIR) / "scenarios" / "onlyfans.json").string() +
                      " -o " + (dir / "of.ndjson").string()),
              0);
    EXPECT_NO_THROW(read_fixture(dir / "of.ndjson"));
    EXPECT_EQ(run_cli("simulate --generate rugpulls --seed 4 -o " + (dir / "gen.ndjson").string()), 0);
    EXPECT_EQ(run_cli("rugpulls -f " + (dir / "gen.ndjson").string() + " -o " + (dir / "gen") .string() + " --threshold 2"), 2);
}

TEST(Cli, StageFailureExitCode)
{
    const auto dir = rugscan::testing::temp_dir("cli_stage");
    auto sim = run_scenario(rugscan::testing::small_market());
    auto& records = sim.fixture.records;
    const auto pool = sim.at("POOL");
    auto it = std::find_if(records.begin(), records.end(), [&](const FixtureRecord& r) {
        const auto* l = std::get_if<LogRecord>(&r);
        return l && l->emitter == pool && l->topic0 == topics::swap();
    });
    auto early = std::get<LogRecord>(*it);
    early.block = {101, *early.block.timestamp - 3};
    early.log_index = 0;
    auto pos = std::find_if(records.begin(), records.end(), [](const FixtureRecord& r) { return record_key(r).block > 101; });
    records.insert(pos, early);
    write_fixture(dir / "early.ndjson", sim.fixture);
    EXPECT_EQ(run_cli("snipers -f " + (dir / "early.ndjson").string() + " -o " + (dir / "out").string()), 3);
}
