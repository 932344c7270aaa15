// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/instructions.hpp"
#include "rr/wasm/module.hpp"
#include <cstdint>
#include <array>
#include <map>
#include <span>
#include <string>

namespace rr::wasm
{
/// Code size: sum over defined functions of the encoded locals declarations plus instruction
/// bytes. The per-body LEB size prefix, section headers, data and custom sections are excluded.
uint64_t code_size(const Module& m);

/// Size of one defined function body under the code_size convention.
/// Throws NotDefinedFunction for imports or out-of-range indices.
uint64_t function_body_size(const Module& m, FunctionIndex f);

/// Per-index-space renaming. Spaces without an entry in `remap` are left as-is when
/// `identity_for_unmapped` is set for that space; otherwise a lookup miss is UnmappedIndex.
class IndexMap
{
public:
    static IndexMap identity();

    void set(IndexSpace space, uint32_t from, uint32_t to);
    /// Leave this space unchanged.
    void keep(IndexSpace space);

    uint32_t lookup(IndexSpace space, uint32_t from) const;
    bool covers(IndexSpace space, uint32_t from) const;
    bool is_identity(IndexSpace space) const { return identity_[static_cast<size_t>(space)]; }
    /// Explicit entries of one space; empty when the space is kept as-is.
    const std::map<uint32_t, uint32_t>& entries(IndexSpace space) const
    {
        return maps_[static_cast<size_t>(space)];
    }

    /// `second ∘ first`: apply `first`, then `second`.
    static IndexMap compose(const IndexMap& first, const IndexMap& second);
    /// Inverse of the map; throws std::logic_error if not injective.
    IndexMap inverse() const;

private:
    static constexpr size_t num_spaces = 7;
    std::array<std::map<uint32_t, uint32_t>, num_spaces> maps_;
    std::array<bool, num_spaces> identity_{};
};

/// Rewrites the index immediates of an instruction sequence (code bytes including the
/// final `end`) through `map`. Opcodes and all other immediates are copied byte for byte.
bytes remap_function_body(std::span<const uint8_t> code, const IndexMap& map);

/// Rewrites a constant expression (same rules as a body).
inline bytes remap_expr(std::span<const uint8_t> expr, const IndexMap& map)
{
    return remap_function_body(expr, map);
}

/// Adds the function import rr.cov : [i32] -> [] at function index 0 and prefixes every
/// defined function with `i32.const <original index>; call 0`.
Module instrument_function_entries(const Module& m);

/// Functions referenced by `ref.func` inside bodies or global initializers but not declared
/// by an element segment or export get a declarative element segment.
void declare_function_references(Module& m);

/// Drops defined functions not reachable from exports, the start function, element segments
/// or global initializers. Imports are kept.
/// `map`, when given, receives the old to new function index mapping of kept functions.
Module remove_unreferenced_functions(const Module& m, IndexMap* map = nullptr);

/// True if any body uses memory.init or data.drop.
bool uses_data_count(const Module& m);

/// Canonical form of a body for "as-is" comparisons: every index immediate replaced by a
/// fixed-width placeholder; hashing this identifies the opcode stream and non-index operands.
std::string canonical_body_hash(std::span<const uint8_t> code);

}  // namespace rr::wasm
