#include <gtest/gtest.h>

#include <random>

#include "rugscan/pools.hpp"
#include "rugscan/scenario.hpp"
#include "rugscan/tokens.hpp"
#include "support/scenarios.hpp"
#include "support/token_corpus.hpp"

using namespace rugscan;

namespace {

std::vector<LogRecord> logs_of(const FixtureFile& f)
{
    std::vector<LogRecord> out;
    for (const auto& r : f.records)
        if (const auto* l = std::get_if<LogRecord>(&r)) out.push_back(*l);
    return out;
}

std::vector<ContractCreation> creations_of(const FixtureFile& f)
{
    std::vector<ContractCreation> out;
    for (const auto& r : f.records)
        if (const auto* c = std::get_if<ContractCreation>(&r)) out.push_back(*c);
    return out;
}

} // namespace

TEST(Tokens, CorpusHasTwentyLabelledEntries)
{
    EXPECT_EQ(rugscan::testing::token_corpus().size(), 20u);
}

TEST(Tokens, CorpusMatchesHandLabels)
{
    const auto erc20 = StandardSpec::erc20();
    const auto bep20 = StandardSpec::bep20();
    for (const auto& e : rugscan::testing::token_corpus()) {
        const auto v = is_compliant(e.bytecode, erc20);
        EXPECT_EQ(v.compliant, e.erc20) << e.label;
        EXPECT_EQ(v.has_all_optional, e.erc20_optional) << e.label;
        EXPECT_EQ(is_compliant(e.bytecode, bep20).compliant, e.bep20) << e.label;
    }
}

TEST(Tokens, SpecsAreDisjointAndSized)
{
    for (const auto& s : {StandardSpec::erc20(), StandardSpec::bep20()}) {
        for (const auto& m : s.mandatory_selectors) EXPECT_FALSE(s.optional_selectors.contains(m));
    }
    EXPECT_EQ(StandardSpec::erc20().mandatory_selectors.size(), 6u);
    EXPECT_EQ(StandardSpec::erc20().optional_selectors.size(), 3u);
    EXPECT_EQ(StandardSpec::bep20().mandatory_selectors.size(), 8u);
    EXPECT_EQ(StandardSpec::bep20().optional_selectors.size(), 1u);
    EXPECT_EQ(StandardSpec::for_chain("bsc").name, "BEP-20");
    EXPECT_EQ(StandardSpec::for_chain("ethereum").name, "ERC-20");
}

TEST(Tokens, Push4OperandsOnly)
{
    // PUSH2 0xa905 9cbb: the selector straddles an operand boundary and is not a PUSH4
    const Bytes code = {0x61, 0xa9, 0x05, 0x9c, 0xbb, 0x63, 0x18, 0x16, 0x0d, 0xdd};
    const auto scan = scan_selectors(code);
    EXPECT_TRUE(scan.decoded);
    EXPECT_EQ(scan.selectors, (std::set<Selector>{Selector::from_hex("0x18160ddd")}));
}

TEST(Tokens, TruncatedPushFallsBackToRawWindows)
{
    const Bytes code = {0x00, 0xa9, 0x05, 0x9c, 0xbb, 0x7f, 0x01};
    const auto scan = scan_selectors(code);
    EXPECT_FALSE(scan.decoded);
    EXPECT_TRUE(scan.selectors.contains(Selector::from_hex("0xa9059cbb")));
    EXPECT_EQ(scan.selectors.size(), 4u); // every 4-byte window of 7 bytes
}

TEST(Tokens, DispatcherSelectorsRoundTripProperty)
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::set<Selector> want;
        const auto n = rng() % 40;
        for (std::size_t i = 0; i < n; ++i) {
            Selector s;
            for (auto& b : s.bytes) b = static_cast<std::uint8_t>(rng());
            want.insert(s);
        }
        const std::vector<Selector> v(want.begin(), want.end());
        const auto scan = scan_selectors(assemble_dispatcher(v));
        EXPECT_TRUE(scan.decoded);
        EXPECT_EQ(scan.selectors, want);
    }
}

TEST(Tokens, DatasetFromSimulatedMarket)
{
    const auto sim = run_scenario(rugscan::testing::small_market());
    const auto creations = creations_of(sim.fixture);
    const auto logs = logs_of(sim.fixture);
    std::unordered_set<Address> pools = {sim.at("POOL"), sim.at("FTPOOL")};
    const auto ds = build_token_dataset(creations, logs, StandardSpec::bep20(), pools);

    EXPECT_EQ(ds.contracts_seen, 6u); // WBNB SCAM FT NFT POOL FTPOOL
    EXPECT_EQ(ds.compliant_count(), 5u);
    EXPECT_EQ(ds.lp_token_count(), 2u);
    EXPECT_EQ(ds.standard_token_count(), 3u);
    EXPECT_EQ(ds.internal_contracts, 3u);
    EXPECT_EQ(ds.external_contracts, 3u);
    EXPECT_TRUE(std::is_sorted(ds.records.begin(), ds.records.end(),
                               [](const auto& a, const auto& b) { return a.address < b.address; }));
    for (const auto& r : ds.records) {
        EXPECT_GE(r.last_event_block.number, r.first_block.number);
        EXPECT_NE(r.address, sim.at("NFT"));
    }
    const auto scam = std::find_if(ds.records.begin(), ds.records.end(), [&](const auto& r) { return r.address == sim.at("SCAM"); });
    ASSERT_NE(scam, ds.records.end());
    std::uint64_t last = 0;
    for (const auto& l : logs)
        if (l.emitter == sim.at("SCAM")) last = std::max(last, l.block.number);
    EXPECT_EQ(scam->last_event_block.number, last);
}

TEST(Tokens, DuplicateCreationsKeepTheFirst)
{
    ContractCreation a;
    a.contract = Address::from_hex("0x00000000000000000000000000000000000000a1");
    a.block = {5, std::nullopt};
    a.bytecode = full_token_bytecode();
    auto b = a;
    b.block = {9, std::nullopt};
    const std::vector<ContractCreation> cs = {a, b};
    const auto ds = build_token_dataset(cs, {}, StandardSpec::erc20(), {});
    ASSERT_EQ(ds.records.size(), 1u);
    EXPECT_EQ(ds.records[0].first_block.number, 5u);
    EXPECT_EQ(ds.duplicates, std::vector<Address>{a.contract});
    EXPECT_EQ(ds.contracts_seen, 1u);
}

TEST(Tokens, MetadataAttached)
{
    const auto sim = run_scenario(rugscan::testing::small_market());
    std::vector<TokenMetadata> md;
    for (const auto& r : sim.fixture.records)
        if (const auto* m = std::get_if<TokenMetadata>(&r)) md.push_back(*m);
    const auto ds = build_token_dataset(creations_of(sim.fixture), logs_of(sim.fixture), StandardSpec::bep20(), {}, md);
    for (const auto& r : ds.records)
        if (r.address == sim.at("SCAM")) {
            ASSERT_TRUE(r.metadata);
            EXPECT_EQ(r.metadata->name, "SCAM");
            EXPECT_EQ(r.metadata->total_supply, gen::ether(1'000'000'000));
        }
}

// ---- pools -------------------------------------------------------------------

TEST(Pools, IndexSmallMarket)
{
    const auto sim = run_scenario(rugscan::testing::small_market());
    const auto logs = logs_of(sim.fixture);
    const auto idx = index_pools(logs);
    EXPECT_TRUE(idx.issues.empty());
    ASSERT_EQ(idx.pools.size(), 2u);
    EXPECT_EQ(idx.pools[0].pool, sim.at("POOL"));
    EXPECT_EQ(idx.pools[0].creator, sim.at("dev"));
    EXPECT_EQ(idx.pools[0].factory, sim.at("default"));
    EXPECT_EQ(idx.pools[1].factory, sim.at("other"));

    const auto ts = assemble_timelines(idx.pools, idx.events);
    const auto& t = ts.timelines.at(sim.at("POOL"));
    const auto mints = t.all<MintEvent>();
    const auto burns = t.all<BurnEvent>();
    const auto swaps = t.all<SwapEvent>();
    ASSERT_EQ(mints.size(), 1u);
    ASSERT_EQ(burns.size(), 1u);
    EXPECT_EQ(swaps.size(), 3u);

    // LP amounts equal the simulator's own accounting
    const auto& sp = sim.pools.at(sim.at("POOL"));
    EXPECT_EQ(sp.state.lp_total_supply, 0);
    const auto wbnb_is0 = sp.token0 == sim.at("WBNB");
    EXPECT_EQ(wbnb_is0 ? mints[0]->amount0 : mints[0]->amount1, gen::ether(10));
    EXPECT_EQ(mints[0]->lp_amount, amm::isqrt(gen::ether(10) * gen::ether(1'000'000)));
    EXPECT_EQ(burns[0]->lp_amount, mints[0]->lp_amount);
    EXPECT_EQ(burns[0]->to, sim.at("dev"));
    EXPECT_EQ(swaps[2]->at.tx_sender, sim.at("alice"));
    EXPECT_TRUE(ts.orphans.empty());
}

TEST(Pools, LockedMinimumLiquidityCountsTowardsTheMint)
{
    using namespace steps;
    auto s = gen::base_bsc_scenario(10, 1000);
    s.lock_minimum_liquidity = true;
    s.add(gen::token_step("d", "WBNB", gen::ether(100)));
    s.add(gen::token_step("d", "T", gen::ether(100)));
    s.add(CreatePool{"d", "P", "T", "WBNB", "default"});
    s.add(AddLiquidity{"d", "P", "WBNB", gen::ether(4), gen::ether(9), std::nullopt});
    s.add(RemoveLiquidity{"d", "P", std::nullopt, Fraction::parse("1")});
    const auto sim = run_scenario(s);
    const auto idx = index_pools(logs_of(sim.fixture));
    ASSERT_EQ(idx.events.size(), 2u);
    const auto& m = std::get<MintEvent>(idx.events[0]);
    const auto& b = std::get<BurnEvent>(idx.events[1]);
    EXPECT_EQ(m.lp_amount, gen::ether(6)); // sqrt(4e18 * 9e18), lock included
    EXPECT_EQ(b.lp_amount, gen::ether(6) - amm::minimum_liquidity);
}

TEST(Pools, MalformedEventsBecomeIssues)
{
    const auto pool = Address::from_hex("0x" + std::string(38, '0') + "f0");
    auto make = [&](const Topic& t, std::vector<Word> topics_, Bytes data) {
        LogRecord l;
        l.emitter = pool;
        l.topic0 = t;
        l.indexed_topics = std::move(topics_);
        l.data = std::move(data);
        return l;
    };
    const auto w = [](std::uint64_t v) { return word_from_amount(Amount(v)); };
    auto data = [](std::initializer_list<Word> ws) {
        Bytes b;
        for (const auto& x : ws) b.insert(b.end(), x.bytes.begin(), x.bytes.end());
        return b;
    };
    std::vector<LogRecord> logs = {
        make(topics::swap(), {w(1), w(1)}, data({w(1), w(1), w(0), w(5)})),       // both sides in
        make(topics::swap(), {w(1)}, data({w(1), w(0), w(0), w(5)})),             // missing `to`
        make(topics::mint(), {w(1)}, data({w(1), w(2)})),                         // no LP transfer
        make(topics::burn(), {w(1), w(1)}, data({w(1)})),                         // short payload
        make(topics::pair_created(), {w(7), w(7)}, data({w(9), w(1)})),           // token0 == token1
        make(topics::pair_created(), {w(7), w(8)}, data({word_from_address(pool), w(1)})),
    };
    for (std::uint32_t i = 0; i < logs.size(); ++i) logs[i].log_index = i;
    const auto idx = index_pools(logs);
    EXPECT_EQ(idx.events.size(), 0u);
    EXPECT_EQ(idx.pools.size(), 1u);
    EXPECT_EQ(idx.issues.size(), 5u);
    for (const auto& i : idx.issues) EXPECT_NE(i.message.find("decode error"), std::string::npos) << i.message;
}

TEST(Pools, DecodeErrorsNameTheField)
{
    LogRecord l;
    l.topic0 = topics::swap();
    l.indexed_topics = {Word{}};
    l.data = Bytes(128, 0);
    try {
        decode_swap(l);
        FAIL();
    } catch (const decode_error& e) {
        EXPECT_EQ(e.field, "to");
    }
    l.topic0 = topics::mint();
    EXPECT_THROW(decode_swap(l), decode_error);
}

TEST(Pools, TimelinesIndependentOfInputOrderProperty)
{
    const auto sim = run_scenario(gen::generate_rug_population(21, 30, 20).scenario);
    const auto idx = index_pools(logs_of(sim.fixture));
    const auto base = assemble_timelines(idx.pools, idx.events);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        auto events = idx.events;
        auto pools = idx.pools;
        std::shuffle(events.begin(), events.end(), rng);
        std::shuffle(pools.begin(), pools.end(), rng);
        const auto t = assemble_timelines(pools, events);
        ASSERT_EQ(t.timelines.size(), base.timelines.size());
        for (const auto& [addr, tl] : base.timelines) {
            EXPECT_EQ(t.timelines.at(addr).events, tl.events);
            EXPECT_EQ(t.timelines.at(addr).record, tl.record);
        }
    }
    for (const auto& [_, tl] : base.timelines)
        for (std::size_t i = 1; i < tl.events.size(); ++i) EXPECT_LT(header(tl.events[i - 1]).key(), header(tl.events[i]).key());
}

TEST(Pools, OrphansAndLastEvent)
{
    const auto sim = run_scenario(rugscan::testing::small_market());
    const auto logs = logs_of(sim.fixture);
    auto idx = index_pools(logs);
    const auto last = last_event_blocks(logs);
    const std::vector<PoolRecord> only_first = {idx.pools[0]};
    const auto ts = assemble_timelines(only_first, idx.events, &last);
    EXPECT_EQ(ts.timelines.size(), 1u);
    EXPECT_EQ(ts.orphans.size(), 2u); // FTPOOL mint and carol's buy
    EXPECT_EQ(ts.timelines.begin()->second.record.last_event_block.number, last.at(sim.at("POOL")).number);
}

TEST(Pools, DuplicatePairCreatedIsAnIssue)
{
    const auto sim = run_scenario(rugscan::testing::small_market());
    auto logs = logs_of(sim.fixture);
    auto dup = *std::find_if(logs.begin(), logs.end(), [](const auto& l) { return l.topic0 == topics::pair_created(); });
    dup.block.number = logs.back().block.number;
    dup.log_index = logs.back().log_index + 1;
    dup.tx_hash.bytes[0] ^= 0xff;
    logs.push_back(dup);
    const auto idx = index_pools(logs);
    EXPECT_EQ(idx.pools.size(), 2u);
    ASSERT_EQ(idx.issues.size(), 1u);
    EXPECT_NE(idx.issues[0].message.find("duplicate"), std::string::npos);
}

TEST(Pools, FactoryShares)
{
    const auto sim = run_scenario(gen::generate_rug_population(8, 60, 40).scenario);
    const auto idx = index_pools(logs_of(sim.fixture));
    std::map<Address, std::string> labels = {{sim.at("default"), "PancakeSwap"}};
    const auto shares = factory_shares(idx.pools, labels);
    ASSERT_EQ(shares.size(), 2u);
    EXPECT_EQ(shares[0].label, "PancakeSwap");
    EXPECT_EQ(shares[0].pools + shares[1].pools, 100u);
    EXPECT_GT(shares[0].pools, shares[1].pools);
    EXPECT_DOUBLE_EQ(shares[0].share + shares[1].share, 1.0);
}
