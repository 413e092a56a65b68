#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rugscan/chain.hpp"
#include "rugscan/fixture.hpp"

using namespace rugscan;

namespace {

std::string hex_digest(std::string_view text) { return to_hex(Keccak256::hash(text), false); }

} // namespace

TEST(Keccak, KnownVectors)
{
    EXPECT_EQ(hex_digest(""), "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
    EXPECT_EQ(hex_digest("abc"), "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
}

TEST(Keccak, RateBoundaries)
{
    EXPECT_EQ(hex_digest(std::string(135, 'a')), "34367dc248bbd832f4e3e69dfaac2f92638bd0bbd18f2912ba4ef454919cf446");
    EXPECT_EQ(hex_digest(std::string(136, 'a')), "a6c4d403279fe3e0af03729caada8374b5ca54d8065329a3ebcaeb4b60aa386e");
    EXPECT_EQ(hex_digest(std::string(200, 'a')), "96ea54061def936c4be90b518992fdc6f12f535068a256229aca54267b4d084d");
}

TEST(Keccak, IncrementalMatchesOneShot)
{
    Bytes data;
    for (int r = 0; r < 4; ++r)
        for (int i = 0; i < 256; ++i) data.push_back(static_cast<std::uint8_t>(i));
    EXPECT_EQ(to_hex(Keccak256::hash(data), false), "5902e53903be0d0f9656bdbd5b9f0d8c2d815f865645d629eef77f5185f6cd7f");
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        Keccak256 h;
        std::size_t pos = 0;
        while (pos < data.size()) {
            const auto n = std::min<std::size_t>(data.size() - pos, rng() % 300);
            h.update(std::span(data).subspan(pos, n));
            pos += n;
        }
        EXPECT_EQ(to_hex(h.finish(), false), "5902e53903be0d0f9656bdbd5b9f0d8c2d815f865645d629eef77f5185f6cd7f");
    }
}

TEST(Selectors, ErcTable)
{
    const std::pair<const char*, const char*> table[] = {
        {"transfer(address,uint256)", "0xa9059cbb"},     {"totalSupply()", "0x18160ddd"},
        {"balanceOf(address)", "0x70a08231"},            {"transferFrom(address,address,uint256)", "0x23b872dd"},
        {"approve(address,uint256)", "0x095ea7b3"},      {"allowance(address,address)", "0xdd62ed3e"},
        {"name()", "0x06fdde03"},                        {"symbol()", "0x95d89b41"},
        {"decimals()", "0x313ce567"}};
    for (const auto& [sig, want] : table) EXPECT_EQ(keccak_selector(sig).hex(), want) << sig;
}

TEST(Selectors, EventTopics)
{
    EXPECT_EQ(topics::transfer().hex(), "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef");
    EXPECT_EQ(topics::sync().hex(), "0x1c411e9a96e071241c2f21f7726b17ae89e3cab4c78be50e062b03a9fffbbad1");
    EXPECT_EQ(topics::swap().hex(), "0xd78ad95fa46c994b6551d0da85fc275fe613ce37657fb8d5e3d130840159d822");
    EXPECT_EQ(topics::mint().hex(), "0x4c209b5fc8ad50758f13e2e1088ba56a560dff690a1c6fef26394f4c03821c4f");
    EXPECT_EQ(topics::burn().hex(), "0xdccd412f0b1252819cb1fd330b93224ca42612892bb3f4f789976e6d81936496");
    EXPECT_EQ(topics::pair_created().hex(), "0x0d3648bd0f6ba80134a33ba9275ac585d9d315f0ad8355cddefde31afa28d0e9");
}

TEST(Bytes, HexRoundTrip)
{
    const auto a = Address::from_hex("0xE8B6CB2f5bA4E3A6a1E9e5C2A1b31D2C7F5E1199");
    EXPECT_EQ(a.hex(), "0xe8b6cb2f5ba4e3a6a1e9e5c2a1b31d2c7f5e1199");
    EXPECT_EQ(Address::from_hex(a.hex()), a);
    EXPECT_THROW(Address::from_hex("0x1234"), hex_error);
    EXPECT_THROW(bytes_from_hex("0xabc"), hex_error);
    EXPECT_THROW(bytes_from_hex("0xzz"), hex_error);
    EXPECT_TRUE(bytes_from_hex("0x").empty());
    EXPECT_TRUE(Address{}.is_zero());
}

TEST(Words, AmountRoundTripProperty)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        Amount v = 0;
        const int limbs = static_cast<int>(rng() % 5);
        for (int l = 0; l < limbs; ++l) v = (v << 64) + Amount(rng());
        EXPECT_EQ(amount_from_word(word_from_amount(v)), v);
    }
    EXPECT_THROW(word_from_amount(Amount(-1)), std::invalid_argument);
    EXPECT_THROW(word_from_amount(Amount(1) << 256), std::overflow_error);
}

TEST(Words, AddressWords)
{
    const auto a = Address::from_hex("0xbb4cdb9cbd36b01bd1cbaebf2de08d9173bc095c");
    const auto w = word_from_address(a);
    EXPECT_EQ(w.hex(), "0x000000000000000000000000bb4cdb9cbd36b01bd1cbaebf2de08d9173bc095c");
    EXPECT_EQ(address_from_word(w), a);
    auto dirty = w;
    dirty.bytes[3] = 1;
    EXPECT_FALSE(address_from_word(dirty).has_value());
}

TEST(Units, FormatAndParse)
{
    EXPECT_EQ(format_units(Amount("2670000000000000000"), 18), "2.67");
    EXPECT_EQ(format_units(Amount(5), 18), "0.000000000000000005");
    EXPECT_EQ(format_units(Amount(-1500), 3), "-1.5");
    EXPECT_EQ(format_units(Amount(42), 0), "42");
    EXPECT_EQ(parse_units("2.67", 18), Amount("2670000000000000000"));
    EXPECT_EQ(parse_units("0.1", 18), Amount("100000000000000000"));
    EXPECT_EQ(parse_units(".5", 1), Amount(5));
    EXPECT_EQ(parse_units("007", 0), Amount(7));
    EXPECT_THROW(parse_units("1.234", 2), std::invalid_argument);
    EXPECT_THROW(parse_units("1e5", 2), std::invalid_argument);
    EXPECT_EQ(parse_amount("0100"), Amount(100));
    EXPECT_EQ(parse_amount("000"), Amount(0));
    EXPECT_THROW(parse_amount("-1"), std::invalid_argument);
    EXPECT_THROW(parse_amount(""), std::invalid_argument);
}

TEST(Units, FormatParseRoundTripProperty)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const unsigned dec = static_cast<unsigned>(rng() % 19);
        const Amount v = Amount(rng()) * Amount(rng() % 1000);
        EXPECT_EQ(parse_units(format_units(v, dec), dec), v);
    }
}

TEST(Fees, ExactProduct)
{
    EXPECT_EQ(tx_fee(150'000, 5'000'000'000), Amount("750000000000000"));
    const auto big = std::numeric_limits<std::uint64_t>::max();
    EXPECT_EQ(tx_fee(big, big), Amount(big) * Amount(big));
}

TEST(LastEvent, TracksLatestBlockPerEmitter)
{
    const auto a = Address::from_hex("0x00000000000000000000000000000000000000aa");
    const auto b = Address::from_hex("0x00000000000000000000000000000000000000bb");
    std::vector<LogRecord> logs(4);
    logs[0].emitter = a;
    logs[0].block = {10, 100};
    logs[1].emitter = b;
    logs[1].block = {11, 103};
    logs[2].emitter = a;
    logs[2].block = {15, 115};
    logs[3].emitter = a;
    logs[3].block = {12, 106};
    const auto last = last_event_blocks(logs);
    EXPECT_EQ(last.at(a).number, 15u);
    EXPECT_EQ(last.at(a).timestamp, 115);
    EXPECT_EQ(last.at(b).number, 11u);
}

namespace {

FixtureFile sample_fixture()
{
    FixtureFile f;
    f.header = ChainProfile::bsc();
    f.header.start_block = 100;
    f.header.end_block = 110;
    f.header.wrapped_native_token = Address::from_hex("0xbb4cdb9cbd36b01bd1cbaebf2de08d9173bc095c");
    ContractCreation c;
    c.contract = Address::from_hex("0x00000000000000000000000000000000000000c1");
    c.deployer = Address::from_hex("0x00000000000000000000000000000000000000d1");
    c.block = {100, 1'600'000'000};
    c.tx_hash.bytes[0] = 7;
    c.bytecode = {0x60, 0x80, 0x00};
    c.gas_used = 21'000;
    c.gas_price = 5;
    f.records.emplace_back(c);
    TokenMetadata m;
    m.token = c.contract;
    m.block = c.block;
    m.name = "Name, with \"quotes\"";
    m.decimals = 9;
    m.total_supply = Amount(1) << 200;
    m.symbol_undecodable = true;
    f.records.emplace_back(m);
    LogRecord l;
    l.emitter = c.contract;
    l.block = {105, std::nullopt};
    l.log_index = 3;
    l.tx_hash.bytes[31] = 9;
    l.tx_sender = c.deployer;
    l.topic0 = topics::transfer();
    l.indexed_topics = {word_from_address(c.deployer), word_from_address(c.contract)};
    l.data = Bytes(32, 0xff);
    l.gas_used = 1;
    l.gas_price = 2;
    f.records.emplace_back(l);
    return f;
}

} // namespace

TEST(Fixture, RoundTrip)
{
    const auto f = sample_fixture();
    std::stringstream ss;
    write_fixture(ss, f.header, f.records);
    const auto back = read_fixture(ss);
    EXPECT_EQ(back, f);
}

TEST(Fixture, HeaderLineFirst)
{
    const auto f = sample_fixture();
    std::stringstream ss;
    write_fixture(ss, f.header, f.records);
    std::string first;
    std::getline(ss, first);
    const auto j = nlohmann::json::parse(first);
    EXPECT_EQ(j.at("kind"), "header");
    EXPECT_EQ(j.at("format"), "rugscan-fixture/1");
    EXPECT_EQ(j.at("chain"), "bsc");
}

TEST(Fixture, RejectsUnsortedAndOutOfRange)
{
    auto f = sample_fixture();
    std::swap(f.records[0], f.records[2]);
    std::stringstream ss;
    EXPECT_THROW(write_fixture(ss, f.header, f.records), fixture_error);

    f = sample_fixture();
    f.header.end_block = 104;
    EXPECT_THROW(write_fixture(ss, f.header, f.records), fixture_error);
}

TEST(Fixture, ReadErrorsCarryLineNumbers)
{
    const auto f = sample_fixture();
    std::stringstream ss;
    write_fixture(ss, f.header, f.records);
    auto text = ss.str();
    text += "{\"kind\":\"log\"}\n";
    std::istringstream in(text);
    try {
        read_fixture(in);
        FAIL() << "expected fixture_error";
    } catch (const fixture_error& e) {
        EXPECT_EQ(e.line, 5u);
    }
    std::istringstream empty("");
    EXPECT_THROW(read_fixture(empty), fixture_error);
    std::istringstream no_header("{\"kind\":\"log\"}\n");
    EXPECT_THROW(read_fixture(no_header), fixture_error);
    std::istringstream bad_format(R"({"kind":"header","format":"other/2","chain":"bsc","mean_block_interval":3,"start_block":0,"end_block":1})");
    EXPECT_THROW(read_fixture(bad_format), fixture_error);
}

TEST(Fixture, ProfilesValidate)
{
    auto p = ChainProfile::named("ethereum");
    EXPECT_EQ(p.mean_block_interval, 15.0);
    p.start_block = 5;
    p.end_block = 4;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    auto c = ChainProfile::named("polygon");
    EXPECT_EQ(c.name, "polygon");
    c.mean_block_interval = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Fixture, HashText)
{
    EXPECT_EQ(hash_text(""), "0xc5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
}
