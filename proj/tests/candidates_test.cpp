// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/candidates/candidates.hpp"
#include <gtest/gtest.h>
#include <random>
#include <set>

namespace
{
using namespace rr::candidates;
namespace fx = rr::fixtures;
using V = std::vector<uint32_t>;

TEST(AllSet, EmptyModule)
{
    EXPECT_EQ(compute_all_set(rr::wasm::Module{}), V{});
}

TEST(AllSet, RunningExample)
{
    EXPECT_EQ(compute_all_set(fx::corpus("m0")), (V{0, 1, 2}));
}

TEST(AllSet, SkipsImports)
{
    EXPECT_EQ(compute_all_set(fx::fixture("two_imports")), (V{2, 3}));
}

TEST(DynamicSet, RunningExampleInFirstEntryOrder)
{
    EXPECT_EQ(compute_dynamic_set(fx::corpus("m0"), "main"), (V{0, 1, 2}));
}

TEST(DynamicSet, ImmediateReturnOnlyEntersMain)
{
    EXPECT_EQ(compute_dynamic_set(fx::fixture("returns"), "main"), V{1});
}

TEST(DynamicSet, TrapBeforeAnyCall)
{
    EXPECT_EQ(compute_dynamic_set(fx::fixture("trap_first"), "main"), V{1});
}

TEST(DynamicSet, TrappingProgramReportsWhatRan)
{
    const auto m = fx::corpus("bug_div");
    EXPECT_EQ(compute_dynamic_set(m, "main"), (V{0, 1, 2}));
}

TEST(DynamicSet, ExhaustedRunReportsWhatRan)
{
    rr::exec::ExecLimits limits;
    limits.fuel = 1000;
    EXPECT_EQ(compute_dynamic_set(fx::fixture("spin"), "main", limits), V{0});
}

TEST(HeuristicSet, EmptyText)
{
    EXPECT_EQ(compute_heuristic_set(fx::corpus("m0"), ""), V{});
}

TEST(HeuristicSet, CompileCrashMessage)
{
    EXPECT_EQ(compute_heuristic_set(fx::corpus("m0"), "crash while compiling function #2"), V{2});
}

TEST(HeuristicSet, OutOfRangeIndexIgnored)
{
    EXPECT_EQ(compute_heuristic_set(fx::corpus("m0"), "error at func 580"), V{});
}

TEST(HeuristicSet, FirstOccurrenceOrderWithoutDuplicates)
{
    EXPECT_EQ(compute_heuristic_set(fx::corpus("m0"), "at 1, then 0 and again 1; 12 is not 1 or 2"), (V{1, 0, 2}));
}

TEST(HeuristicSet, ImportsAreNotCandidates)
{
    EXPECT_EQ(compute_heuristic_set(fx::fixture("two_imports"), "func 0 func 1 func 3"), V{3});
}

TEST(EnumerateCandidates, HeuristicFirst)
{
    EXPECT_EQ(enumerate_candidates({{2}, {0, 1, 2}, {0, 1, 2}}), (V{2, 0, 1}));
}

TEST(EnumerateCandidates, OnlyAllSet)
{
    EXPECT_EQ(enumerate_candidates({{}, {}, {0}}), V{0});
}

TEST(EnumerateCandidates, KeepsHeuristicOrder)
{
    EXPECT_EQ(enumerate_candidates({{1, 0}, {0}, {0, 1, 2}}), (V{1, 0, 2}));
}

TEST(EnumerateCandidates, PermutationOfUnionWithoutDuplicates)
{
    std::mt19937 rng{7};
    std::uniform_int_distribution<uint32_t> index{0, 20};
    std::uniform_int_distribution<size_t> length{0, 12};
    for (int round = 0; round < 200; ++round)
    {
        CandidateSets s;
        for (auto* set : {&s.heuristic, &s.dynamic, &s.all})
            for (size_t n = length(rng); n > 0; --n)
                set->push_back(index(rng));
        const auto out = enumerate_candidates(s);
        std::set<uint32_t> all;
        for (const auto* set : {&s.heuristic, &s.dynamic, &s.all})
            all.insert(set->begin(), set->end());
        EXPECT_EQ(std::set<uint32_t>(out.begin(), out.end()), all);
        EXPECT_EQ(out.size(), all.size());
        if (!s.heuristic.empty())
            EXPECT_EQ(out.front(), s.heuristic.front());
    }
}

}  // namespace
