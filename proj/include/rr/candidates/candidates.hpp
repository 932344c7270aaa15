// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/exec/store.hpp"
#include "rr/wasm/module.hpp"
#include <cstdint>
#include <string_view>
#include <vector>

namespace rr::candidates
{
/// Function indices of the input module, in priority order within each set.
struct CandidateSets
{
    std::vector<uint32_t> heuristic;
    std::vector<uint32_t> dynamic;
    std::vector<uint32_t> all;
};

/// Every defined function, ascending.
std::vector<uint32_t> compute_all_set(const wasm::Module& m);

/// Defined functions entered while running `entry`, in first-entry order. A run that traps
/// or runs out of fuel still reports what executed before it stopped.
std::vector<uint32_t> compute_dynamic_set(
    const wasm::Module& m, std::string_view entry, const exec::ExecLimits& limits = {});

/// Every maximal run of decimal digits in `engine_output` that names a defined function,
/// deduplicated, in order of first occurrence.
std::vector<uint32_t> compute_heuristic_set(const wasm::Module& m, std::string_view engine_output);

/// heuristic ++ dynamic ++ all with later duplicates removed.
std::vector<uint32_t> enumerate_candidates(const CandidateSets& s);

}  // namespace rr::candidates
