#pragma once

#include <filesystem>
#include <random>

#include "rugscan/scenario_gen.hpp"

namespace rugscan::testing {

/// Two pools on two factories, an internally created token, a contract that
/// is not a token, victim buys and sells, and a full LP burn.
inline Scenario small_market()
{
    using namespace steps;
    auto s = gen::base_bsc_scenario(100, 1'650'000'000);
    s.fee_bps = 30;
    s.add(gen::token_step("deployer", "WBNB", gen::ether(1'000'000)));
    s.add(gen::token_step("dev", "SCAM", gen::ether(1'000'000'000)));
    auto internal = gen::token_step("factory_user", "FT", gen::ether(5000));
    internal.via_internal = true;
    s.add(internal);
    auto nft = gen::token_step("artist", "NFT", Amount(1));
    nft.bytecode = assemble_dispatcher(std::vector{keccak_selector("name()"), keccak_selector("ownerOf(uint256)")});
    s.add(nft);
    s.add(AdvanceBlocks{2, std::nullopt});
    s.add(CreatePool{"dev", "POOL", "SCAM", "WBNB", "default"});
    s.add(AddLiquidity{"dev", "POOL", "WBNB", gen::ether(10), gen::ether(1'000'000), std::nullopt}).bundle = true;
    s.add(CreatePool{"factory_user", "FTPOOL", "FT", "WBNB", "other"});
    s.add(AddLiquidity{"factory_user", "FTPOOL", "FT", gen::ether(1000), gen::ether(2), std::nullopt});
    s.add(AdvanceBlocks{1, std::nullopt});
    s.add(gen::buy("alice", "POOL", "WBNB", gen::milli(500)));
    s.add(gen::buy("bob", "POOL", "WBNB", gen::milli(250)));
    s.add(AdvanceBlocks{3, std::nullopt});
    s.add(Swap{"alice", "POOL", "SCAM", gen::ether(1000)});
    s.add(gen::buy("carol", "FTPOOL", "WBNB", gen::milli(100)));
    s.add(AdvanceBlocks{5, std::nullopt});
    s.add(RemoveLiquidity{"dev", "POOL", std::nullopt, Fraction::parse("1")});
    return s;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("rugscan_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace rugscan::testing
