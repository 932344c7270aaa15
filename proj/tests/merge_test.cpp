// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/error.hpp"
#include "rr/exec/harness.hpp"
#include "rr/merge/merge.hpp"
#include "rr/wasm/validate.hpp"
#include <gtest/gtest.h>

namespace
{
using namespace rr;
namespace fx = rr::fixtures;

const wasm::bytes& code_of(const wasm::Module& m, uint32_t f)
{
    return m.functions.at(f - m.imported_count(wasm::ExternKind::func)).code;
}

TEST(Merge, NaiveRelinkOfRunningExample)
{
    const auto m = fx::corpus("m0");
    const auto p = split::split(m, wasm::FunctionIndex{2});
    const auto merged = merge::merge(p.target_module, p.remaining_module, p.wiring);
    EXPECT_TRUE(wasm::validate_module(merged.module).empty());
    EXPECT_TRUE(exec::run_module(merged.module, "main").same_behavior(exec::run_module(m, "main")));
}

TEST(Merge, NaiveRelinkOfCorpus)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        const auto expected = exec::run_module(m, "main");
        for (const auto t : fx::defined_functions(m))
        {
            const auto p = split::split(m, wasm::FunctionIndex{t});
            const auto merged = merge::merge(p.target_module, p.remaining_module, p.wiring);
            EXPECT_TRUE(exec::run_module(merged.module, "main").same_behavior(expected)) << name << " t=" << t;
            EXPECT_EQ(merged.module.functions.size(), m.functions.size());
        }
    }
}

TEST(Merge, ReplayCandidateIsSelfContained)
{
    const auto c = fx::build_candidate(fx::corpus("m0"), 2);
    EXPECT_TRUE(c.merged.module.imports.empty());
    EXPECT_TRUE(wasm::validate_module(c.merged.module).empty());
    EXPECT_NE(c.merged.module.find_export("main"), nullptr);
    EXPECT_LT(wasm::code_size(c.merged.module), wasm::code_size(fx::corpus("m0")));
}

TEST(Merge, TargetBodyRestoredThroughInverseMaps)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            SCOPED_TRACE(name + " t=" + std::to_string(t));
            const auto c = fx::build_candidate(m, t);
            const auto to_merged = wasm::IndexMap::compose(c.partition.wiring.target_map, c.merged.target_map);
            const auto back = wasm::remap_function_body(code_of(c.merged.module, c.merged.target_index), to_merged.inverse());
            EXPECT_EQ(back, code_of(m, t));
            EXPECT_EQ(c.merged.origin.at(c.merged.target_index), t);
        }
    }
}

TEST(Merge, MissingBoundaryExport)
{
    const auto c = fx::build_candidate(fx::corpus("m0"), 2);
    auto other = c.partition.remaining_module;
    const auto name = c.partition.wiring.remaining_exports.at(1);
    std::erase_if(other.exports, [&](const wasm::Export& e) { return e.name == name; });
    EXPECT_THROW(merge::merge(c.partition.target_module, other, c.partition.wiring), UnresolvedImport);
}

TEST(Merge, BoundaryTypeMismatch)
{
    const auto c = fx::build_candidate(fx::corpus("m0"), 2);
    auto other = c.partition.remaining_module;
    const auto& w = c.partition.wiring;
    const auto a = other.find_export(w.remaining_exports.at(0))->index;
    for (auto& e : other.exports)
        if (e.name == w.remaining_exports.at(1))
            e.index = a;
    EXPECT_THROW(merge::merge(c.partition.target_module, other, w), TypeMismatch);
}

TEST(Merge, CandidatesAcceptedByV8)
{
    fx::TempDir dir;
    std::vector<std::string> paths;
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            paths.push_back((dir / (name + "_" + std::to_string(t) + ".wasm")).string());
            wasm::write_file(paths.back(), wasm::encode_module(fx::build_candidate(m, t).merged.module));
        }
    }
    const auto verdicts = fx::node_validate(paths);
    if (!verdicts)
        GTEST_SKIP() << "node not available";
    for (const auto& p : paths)
        EXPECT_TRUE(verdicts->at(p)) << p;
}

}  // namespace
