#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "rugscan/names.hpp"
#include "rugscan/scenario.hpp"
#include "rugscan/scenario_gen.hpp"
#include "rugscan/snipers.hpp"
#include "support/scenarios.hpp"

using namespace rugscan;

namespace {

Address addr(std::uint64_t n)
{
    Address a;
    for (int i = 0; i < 8; ++i) a.bytes[19 - i] = static_cast<std::uint8_t>(n >> (8 * i));
    return a;
}

const ReferenceLists& data_lists()
{
    static const auto lists = load_reference_lists(std::filesystem::path(RUGSCAN_DATA_DIR) / "lists");
    return lists;
}

std::set<NameCategory> cats(std::string_view name) { return classify(name, data_lists()).categories; }

EventHeader at(std::uint64_t block, std::uint32_t index, std::uint64_t sender)
{
    EventHeader h;
    h.block = {block, std::nullopt};
    h.log_index = index;
    h.tx_sender = addr(sender);
    return h;
}

SwapEvent swap(std::uint64_t block, std::uint32_t index, std::uint64_t sender)
{
    return SwapEvent{at(block, index, sender), 0, 10, 5, 0, addr(sender)};
}

MintEvent mint(std::uint64_t block, std::uint64_t sender) { return MintEvent{at(block, 0, sender), 1000, 10, 10}; }

} // namespace

TEST(Names, Normalization)
{
    EXPECT_EQ(normalize_name("  Safe\tMOON  Inu "), "safe moon inu");
    EXPECT_EQ(normalize_name("\xF0\x9F\x92\x8BOnlyFans"), "onlyfans");
    EXPECT_EQ(normalize_name("Ba$$ed-Doge.2"), "baeddoge2");
    EXPECT_EQ(normalize_name("!!!"), "");
    EXPECT_EQ(normalize_name(""), "");
}

TEST(Names, TermMatching)
{
    using names_detail::term_matches;
    EXPECT_TRUE(term_matches("babydogecash", "doge"));
    EXPECT_TRUE(term_matches("shiba inu classic", "shiba inu"));
    EXPECT_FALSE(term_matches("shibainu", "shiba inu"));
    EXPECT_FALSE(term_matches("ashiba inux", "shiba inu"));
    EXPECT_FALSE(term_matches("anything", ""));
}

TEST(Names, SecondLevelDomains)
{
    EXPECT_EQ(ReferenceLists::second_level_domain("www.pornhub.com"), "pornhub");
    EXPECT_EQ(ReferenceLists::second_level_domain("https://app.uniswap.org/swap"), "uniswap");
    EXPECT_EQ(ReferenceLists::second_level_domain("localhost"), "localhost");
}

TEST(Names, CategoriesFromShippedLists)
{
    using C = NameCategory;
    EXPECT_EQ(cats("OnlyFans"), (std::set<C>{C::impersonation}));
    EXPECT_EQ(cats("Bitcoin"), (std::set<C>{C::clone}));
    EXPECT_EQ(cats("BTC"), (std::set<C>{C::clone}));
    EXPECT_EQ(cats("Baby Doge Swap"), (std::set<C>{C::meme, C::defi}));
    EXPECT_EQ(cats("ElonMoon"), (std::set<C>{C::meme}));
    EXPECT_EQ(cats("SpaceX Inu"), (std::set<C>{C::impersonation, C::meme}));
    EXPECT_EQ(cats("Shiba Inu"), (std::set<C>{C::clone, C::meme}));
    EXPECT_TRUE(cats("Random Token 7").empty());
    EXPECT_TRUE(cats("\xF0\x9F\x9A\x80").empty());
    const auto v = classify(addr(1), "Bitcoin", data_lists());
    EXPECT_EQ(v.matched_terms, std::vector<std::string>{"clone:bitcoin"});
    EXPECT_EQ(classify("BNB", data_lists()).matched_terms, std::vector<std::string>{"clone:binance coin"});
}

TEST(Names, ListFileErrors)
{
    const auto dir = rugscan::testing::temp_dir("lists");
    {
        std::ofstream(dir / "a.csv") << "term,kind,alias_of\n\"Acme, Inc\",company,\n# comment\n\n";
        std::ofstream(dir / "ignored.txt") << "garbage\n";
    }
    auto l = load_reference_lists(dir);
    EXPECT_TRUE(l.companies.contains("acme inc"));
    EXPECT_EQ(l.defi_keywords, ReferenceLists{}.defi_keywords);
    EXPECT_TRUE(l.meme_keywords.empty());

    std::ofstream(dir / "b.csv") << "term,kind\nfoo,planet\n";
    try {
        load_reference_lists(dir);
        FAIL();
    } catch (const lists_error& e) {
        EXPECT_NE(std::string(e.what()).find("b.csv:2"), std::string::npos) << e.what();
    }
    std::ofstream(dir / "b.csv") << "lonely\n";
    EXPECT_THROW(load_reference_lists(dir), lists_error);
    EXPECT_THROW(load_reference_lists(dir / "missing"), lists_error);
    EXPECT_EQ(names_detail::split_csv_line("a,\"b \"\"c\"\"\",d\r"), (std::vector<std::string>{"a", "b \"c\"", "d"}));
}

TEST(Names, FrequencyAndCoverage)
{
    std::vector<NameVerdict> vs;
    for (const auto* n : {"OnlyFans", "OnlyFans", "Doge", "Plain", "OnlyFans", "Doge"}) vs.push_back(classify(n, data_lists()));
    const auto f = name_frequency(vs);
    ASSERT_EQ(f.table.size(), 3u);
    EXPECT_EQ(f.table[0].name, "OnlyFans");
    EXPECT_EQ(f.table[0].count, 3u);
    EXPECT_EQ(f.table[1].name, "Doge");
    EXPECT_DOUBLE_EQ(f.unique_ratio(), 0.5);
    const auto c = category_counts(vs);
    EXPECT_EQ(c.total, 6u);
    EXPECT_EQ(c.covered, 5u);
    EXPECT_EQ(c.per_category.at(NameCategory::impersonation), 3u);
    EXPECT_EQ(c.per_category.at(NameCategory::meme), 2u);
    EXPECT_EQ(c.per_category.at(NameCategory::defi), 0u);
    EXPECT_EQ(name_frequency({}).unique_ratio(), 0.0);
}

// ---- snipers ------------------------------------------------------------------

TEST(Snipers, LatenciesSkipOperatorAndRepeatSwaps)
{
    PoolTimeline t;
    t.record.pool = addr(500);
    t.events = {mint(100, 7), swap(100, 3, 7), swap(100, 4, 1), swap(102, 1, 2), swap(103, 1, 1)};
    std::map<Address, PoolTimeline> tl = {{t.record.pool, t}};
    const auto l = swap_latencies(tl);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0].trader, addr(1));
    EXPECT_EQ(l[0].delay_blocks, 0u);
    EXPECT_TRUE(l[0].same_block);
    EXPECT_EQ(l[1].delay_blocks, 2u);

    const std::set<Address> none;
    EXPECT_TRUE(swap_latencies(tl, &none).empty());
}

TEST(Snipers, SwapBeforeMintIsCorrupt)
{
    PoolTimeline t;
    t.record.pool = addr(500);
    t.events = {swap(99, 0, 1), mint(100, 7)};
    std::map<Address, PoolTimeline> tl = {{t.record.pool, t}};
    EXPECT_THROW(swap_latencies(tl), corrupt_input);
    t.events = {swap(99, 0, 1)};
    tl[t.record.pool] = t;
    EXPECT_THROW(swap_latencies(tl), corrupt_input);
}

TEST(Snipers, IntegerMeanBoundary)
{
    // 100 pools, total delay 499: mean 4.99 < 5; total 500: mean 5.0 is not
    std::vector<SwapLatency> fast, edge;
    for (std::uint64_t p = 0; p < 100; ++p) {
        fast.push_back({addr(1), addr(1000 + p), p == 0 ? 4u : 5u, false});
        edge.push_back({addr(2), addr(1000 + p), 5, false});
    }
    EXPECT_TRUE(flag_snipers(fast, 5, 100)[0].flagged);
    EXPECT_FALSE(flag_snipers(edge, 5, 100)[0].flagged);
    fast.pop_back();
    EXPECT_FALSE(flag_snipers(fast, 5, 100)[0].flagged); // 99 pools
    EXPECT_THROW(flag_snipers(fast, 0, 100), std::invalid_argument);
    EXPECT_THROW(flag_snipers(fast, 5, 0), std::invalid_argument);
}

TEST(Snipers, MeanMatchesOracleProperty)
{
    std::mt19937_64 rng(91);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SwapLatency> ls;
        std::map<Address, std::pair<std::uint64_t, std::set<Address>>> oracle;
        for (int i = 0; i < 400; ++i) {
            const auto trader = addr(rng() % 6);
            const auto pool = addr(1000 + rng() % 40);
            const auto d = rng() % 12;
            ls.push_back({trader, pool, d, d == 0});
            auto& o = oracle[trader];
            if (o.second.insert(pool).second) o.first += d;
        }
        const std::uint64_t delay = 1 + rng() % 8, pools = 1 + rng() % 30;
        for (const auto& v : flag_snipers(ls, delay, pools)) {
            const auto& o = oracle.at(v.trader);
            EXPECT_EQ(v.pools_swapped, o.second.size());
            EXPECT_EQ(v.total_delay_blocks, o.first);
            EXPECT_EQ(v.flagged, o.second.size() >= pools && o.first < delay * o.second.size());
        }
    }
}

TEST(Snipers, GeneratedPopulationFlagsExactlyTheBots)
{
    const auto pop = gen::generate_sniper_population(5, 300, 2, 60, 250, 80, 100);
    const auto sim = run_scenario(pop.scenario);
    std::vector<LogRecord> logs;
    for (const auto& r : sim.fixture.records)
        if (const auto* l = std::get_if<LogRecord>(&r)) logs.push_back(*l);
    const auto idx = index_pools(logs);
    const auto tl = assemble_timelines(idx.pools, idx.events);
    const auto lat = swap_latencies(tl.timelines);
    const auto verdicts = flag_snipers(lat, 5, 100);
    std::set<Address> flagged, bots;
    for (const auto& v : verdicts)
        if (v.flagged) flagged.insert(v.trader);
    for (const auto& b : pop.bot_labels) bots.insert(sim.at(b));
    EXPECT_EQ(flagged, bots);

    const auto s = sniper_activity_stats(verdicts, lat, tl.timelines);
    EXPECT_EQ(s.flagged_traders, 2u);
    EXPECT_EQ(s.pools_considered, 300u);
    EXPECT_EQ(s.pools_touched, pop.bot_pools_touched);
    EXPECT_EQ(s.swaps_flagged, pop.bot_swaps);
    EXPECT_EQ(s.swaps_flagged_same_block, pop.bot_same_block_swaps);
    EXPECT_DOUBLE_EQ(s.same_block_share(), 80.0 / 250.0);
    EXPECT_DOUBLE_EQ(s.pool_coverage(), 250.0 / 300.0);
    EXPECT_GT(s.swaps_total, s.swaps_flagged);
}
