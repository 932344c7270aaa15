// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/candidates/candidates.hpp"
#include "rr/exec/harness.hpp"
#include "rr/wasm/transform.hpp"
#include <charconv>
#include <set>

namespace rr::candidates
{
namespace
{
void append_unique(std::vector<uint32_t>& out, std::set<uint32_t>& seen, uint32_t f)
{
    if (seen.insert(f).second)
        out.push_back(f);
}
}  // namespace

std::vector<uint32_t> compute_all_set(const wasm::Module& m)
{
    std::vector<uint32_t> out;
    for (uint32_t i = m.imported_count(wasm::ExternKind::func); i < m.num_functions(); ++i)
        out.push_back(i);
    return out;
}

std::vector<uint32_t> compute_dynamic_set(const wasm::Module& m, std::string_view entry, const exec::ExecLimits& limits)
{
    const auto outcome = exec::run_module(wasm::instrument_function_entries(m), entry, limits);
    std::vector<uint32_t> out;
    std::set<uint32_t> seen;
    for (const auto f : outcome.coverage)
        if (f < m.num_functions() && !m.is_imported_function(f))
            append_unique(out, seen, f);
    return out;
}

std::vector<uint32_t> compute_heuristic_set(const wasm::Module& m, std::string_view engine_output)
{
    std::vector<uint32_t> out;
    std::set<uint32_t> seen;
    const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    size_t i = 0;
    while (i < engine_output.size())
    {
        if (!is_digit(engine_output[i]))
        {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < engine_output.size() && is_digit(engine_output[j]))
            ++j;
        uint32_t v = 0;
        const auto [ptr, ec] = std::from_chars(engine_output.data() + i, engine_output.data() + j, v);
        if (ec == std::errc{} && ptr == engine_output.data() + j && v < m.num_functions() &&
            !m.is_imported_function(v))
            append_unique(out, seen, v);
        i = j;
    }
    return out;
}

std::vector<uint32_t> enumerate_candidates(const CandidateSets& s)
{
    std::vector<uint32_t> out;
    std::set<uint32_t> seen;
    for (const auto* set : {&s.heuristic, &s.dynamic, &s.all})
        for (const auto f : *set)
            append_unique(out, seen, f);
    return out;
}

}  // namespace rr::candidates
