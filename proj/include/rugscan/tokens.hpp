#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chain.hpp"

namespace rugscan {

/// Selector sets of a fungible-token interface. Mandatory and optional sets
/// are disjoint.
struct StandardSpec
{
    std::string name;
    std::set<Selector> mandatory_selectors;
    std::set<Selector> optional_selectors;
    Topic transfer_topic;

    static StandardSpec erc20()
    {
        StandardSpec s;
        s.name = "ERC-20";
        for (auto sig : {"totalSupply()", "balanceOf(address)", "transfer(address,uint256)",
                         "transferFrom(address,address,uint256)", "approve(address,uint256)",
                         "allowance(address,address)"})
            s.mandatory_selectors.insert(keccak_selector(sig));
        for (auto sig : {"name()", "symbol()", "decimals()"}) s.optional_selectors.insert(keccak_selector(sig));
        s.transfer_topic = topics::transfer();
        return s;
    }

    /// BEP-20 additionally requires name() and decimals(); only symbol() is optional.
    static StandardSpec bep20()
    {
        StandardSpec s = erc20();
        s.name = "BEP-20";
        s.optional_selectors.clear();
        s.mandatory_selectors.insert(keccak_selector("name()"));
        s.mandatory_selectors.insert(keccak_selector("decimals()"));
        s.optional_selectors.insert(keccak_selector("symbol()"));
        return s;
    }

    static StandardSpec for_chain(std::string_view chain) { return chain == "bsc" ? bep20() : erc20(); }
};

namespace evm_op {
inline constexpr std::uint8_t push1 = 0x60;
inline constexpr std::uint8_t push4 = 0x63;
inline constexpr std::uint8_t push32 = 0x7f;
} // namespace evm_op

struct SelectorScan
{
    std::set<Selector> selectors;
    /// false when a push operand ran past the end of the code and the raw
    /// substring fallback was used
    bool decoded = true;
};

/// Selectors are the 4-byte operands of PUSH4 instructions in the linear
/// opcode stream. When decoding fails (a truncated push operand) every
/// 4-byte window of the raw code is added as well.
inline SelectorScan scan_selectors(std::span<const std::uint8_t> code)
{
    SelectorScan out;
    std::size_t pc = 0;
    while (pc < code.size()) {
        const auto op = code[pc];
        if (op >= evm_op::push1 && op <= evm_op::push32) {
            const std::size_t width = op - evm_op::push1 + 1u;
            if (pc + 1 + width > code.size()) {
                out.decoded = false;
                break;
            }
            if (op == evm_op::push4) out.selectors.insert(Selector::from_span(code.subspan(pc + 1, 4)));
            pc += 1 + width;
        } else {
            ++pc;
        }
    }
    if (!out.decoded)
        for (std::size_t i = 0; i + Selector::size <= code.size(); ++i)
            out.selectors.insert(Selector::from_span(code.subspan(i, Selector::size)));
    return out;
}

inline std::set<Selector> extract_selectors(std::span<const std::uint8_t> code)
{
    return scan_selectors(code).selectors;
}

struct Compliance
{
    bool compliant = false;
    bool has_all_optional = false;
};

inline Compliance is_compliant(const std::set<Selector>& present, const StandardSpec& spec)
{
    auto contains_all = [&](const std::set<Selector>& need) {
        return std::includes(present.begin(), present.end(), need.begin(), need.end());
    };
    Compliance c;
    c.compliant = contains_all(spec.mandatory_selectors);
    c.has_all_optional = c.compliant && contains_all(spec.optional_selectors);
    return c;
}

inline Compliance is_compliant(std::span<const std::uint8_t> bytecode, const StandardSpec& spec)
{
    return is_compliant(extract_selectors(bytecode), spec);
}

/// Minimal solc-style dispatcher: selector pushed with PUSH4, compared with
/// the calldata selector, jump on match. Used for fixtures and the simulator.
inline Bytes assemble_dispatcher(std::span<const Selector> selectors)
{
    Bytes code = {0x60, 0x80, 0x60, 0x40, 0x52,       // mstore(0x40, 0x80)
                  0x36, 0x60, 0x04, 0x10,             // calldatasize < 4
                  0x61, 0x00, 0x00, 0x57,             // jumpi fallback (patched below)
                  0x60, 0x00, 0x35, 0x60, 0xe0, 0x1c}; // selector = calldataload(0) >> 224
    std::vector<std::size_t> patch;
    for (const auto& s : selectors) {
        code.push_back(0x80); // dup1
        code.push_back(evm_op::push4);
        code.insert(code.end(), s.bytes.begin(), s.bytes.end());
        code.push_back(0x14); // eq
        code.push_back(0x61); // push2 dest
        patch.push_back(code.size());
        code.push_back(0x00);
        code.push_back(0x00);
        code.push_back(0x57); // jumpi
    }
    const auto fallback = code.size();
    code.insert(code.end(), {0x5b, 0x60, 0x00, 0x80, 0xfd}); // jumpdest; revert(0, 0)
    for (std::size_t i = 0; i < selectors.size(); ++i) {
        const auto dest = code.size();
        code[patch[i]] = static_cast<std::uint8_t>(dest >> 8);
        code[patch[i] + 1] = static_cast<std::uint8_t>(dest & 0xff);
        code.insert(code.end(), {0x5b, 0x60, 0x00, 0x80, 0xf3}); // jumpdest; return(0, 0)
    }
    code[10] = static_cast<std::uint8_t>(fallback >> 8);
    code[11] = static_cast<std::uint8_t>(fallback & 0xff);
    code.push_back(0xfe); // invalid: end of code section
    return code;
}

/// Dispatcher bytecode implementing every ERC-20 method, optional ones included.
inline Bytes full_token_bytecode()
{
    std::vector<Selector> sels;
    for (auto sig : {"name()", "symbol()", "decimals()", "totalSupply()", "balanceOf(address)",
                     "transfer(address,uint256)", "transferFrom(address,address,uint256)",
                     "approve(address,uint256)", "allowance(address,address)"})
        sels.push_back(keccak_selector(sig));
    return assemble_dispatcher(sels);
}

struct TokenRecord
{
    Address address;
    ContractCreation creation;
    std::string standard;
    bool implements_optional = false;
    std::optional<TokenMetadata> metadata;
    BlockRef first_block;
    BlockRef last_event_block;
    bool is_lp_token = false;
};

struct TokenDataset
{
    /// Every compliant contract, sorted by address.
    std::vector<TokenRecord> records;
    /// Contracts seen in more than one creation record (first one kept).
    std::vector<Address> duplicates;
    std::size_t contracts_seen = 0;
    std::size_t external_contracts = 0;
    std::size_t internal_contracts = 0;

    std::size_t compliant_count() const noexcept { return records.size(); }
    std::size_t lp_token_count() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                       [](const TokenRecord& r) { return r.is_lp_token; }));
    }
    std::size_t standard_token_count() const noexcept { return compliant_count() - lp_token_count(); }

    std::vector<const TokenRecord*> standard_tokens() const
    {
        std::vector<const TokenRecord*> out;
        for (const auto& r : records)
            if (!r.is_lp_token) out.push_back(&r);
        return out;
    }
};

/// One record per compliant contract. last_event_block is the latest block of
/// any log the contract emitted (never earlier than its creation). Addresses
/// in `pool_addresses` are LP tokens and excluded from standard-token counts.
inline TokenDataset build_token_dataset(std::span<const ContractCreation> creations,
                                        std::span<const LogRecord> logs, const StandardSpec& spec,
                                        const std::unordered_set<Address>& pool_addresses,
                                        std::span<const TokenMetadata> metadata = {})
{
    TokenDataset ds;
    std::unordered_map<Address, const ContractCreation*> first;
    std::vector<const ContractCreation*> ordered;
    for (const auto& c : creations) {
        auto [it, inserted] = first.try_emplace(c.contract, &c);
        if (!inserted) {
            ds.duplicates.push_back(c.contract);
            continue;
        }
        ordered.push_back(&c);
    }
    std::sort(ds.duplicates.begin(), ds.duplicates.end());
    ds.duplicates.erase(std::unique(ds.duplicates.begin(), ds.duplicates.end()), ds.duplicates.end());
    ds.contracts_seen = ordered.size();

    std::unordered_map<Address, const TokenMetadata*> meta;
    for (const auto& m : metadata) meta.try_emplace(m.token, &m);
    const auto last = last_event_blocks(logs);

    for (const auto* c : ordered) {
        (c->via_internal ? ds.internal_contracts : ds.external_contracts)++;
        const auto verdict = is_compliant(c->bytecode, spec);
        if (!verdict.compliant) continue;
        TokenRecord r;
        r.address = c->contract;
        r.creation = *c;
        r.standard = spec.name;
        r.implements_optional = verdict.has_all_optional;
        if (auto it = meta.find(c->contract); it != meta.end()) r.metadata = *it->second;
        r.first_block = c->block;
        r.last_event_block = c->block;
        if (auto it = last.find(c->contract); it != last.end() && it->second.number > c->block.number)
            r.last_event_block = it->second;
        r.is_lp_token = pool_addresses.contains(c->contract);
        ds.records.push_back(std::move(r));
    }
    std::sort(ds.records.begin(), ds.records.end(),
              [](const TokenRecord& a, const TokenRecord& b) { return a.address < b.address; });
    return ds;
}

} // namespace rugscan
