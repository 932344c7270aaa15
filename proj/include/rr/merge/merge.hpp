// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/split/split.hpp"
#include "rr/wasm/module.hpp"
#include "rr/wasm/transform.hpp"
#include <map>

namespace rr::merge
{
struct MergedProgram
{
    wasm::Module module;
    /// Index of the target function in `module`.
    uint32_t target_index = 0;
    /// Target side index spaces -> merged index spaces.
    wasm::IndexMap target_map;
    /// Merged function index -> input function index, for functions that stand for one.
    std::map<uint32_t, uint32_t> origin;
};

/// Statically links the target side with `other` (a remaining side or a replay module).
/// Functions of `other` come first, then the target. Imports of `other` outside the
/// boundary are kept; every import across the boundary becomes a direct reference.
/// Exports are the input's export names `other` still provides plus the target export.
/// Throws UnresolvedImport or TypeMismatch.
MergedProgram merge(const wasm::Module& target_side, const wasm::Module& other, const split::BoundaryMap& w);

}  // namespace rr::merge
