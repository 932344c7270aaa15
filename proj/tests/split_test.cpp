// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/error.hpp"
#include "rr/exec/partition.hpp"
#include "rr/split/split.hpp"
#include <gtest/gtest.h>
#include <json.hpp>

namespace
{
using namespace rr;
using namespace rr::split;
namespace fx = rr::fixtures;

std::set<std::string> import_names(const wasm::Module& m, const std::string& module)
{
    std::set<std::string> out;
    for (const auto& i : m.imports)
        if (i.module == module)
            out.insert(i.name);
    return out;
}

bool exports(const wasm::Module& m, const std::string& name)
{
    return m.find_export(name) != nullptr;
}

TEST(Split, RunningExampleTargetC)
{
    const auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{2});
    const auto& w = p.wiring;
    EXPECT_EQ(w.target_index, 2u);
    EXPECT_EQ(p.target_module.functions.size(), 1u);
    EXPECT_TRUE(exports(p.target_module, w.target_export_name));
    EXPECT_EQ(import_names(p.target_module, remaining_module_name),
        (std::set<std::string>{w.remaining_exports.at(1), "memory"}));
    EXPECT_EQ(w.target_imports, std::vector<uint32_t>{1});

    EXPECT_EQ(p.remaining_module.functions.size(), 2u);
    EXPECT_TRUE(exports(p.remaining_module, "main"));
    EXPECT_TRUE(exports(p.remaining_module, w.remaining_exports.at(0)));
    EXPECT_TRUE(exports(p.remaining_module, w.remaining_exports.at(1)));
    EXPECT_TRUE(exports(p.remaining_module, "memory"));
    EXPECT_EQ(import_names(p.remaining_module, target_module_name), std::set<std::string>{w.target_export_name});
    EXPECT_TRUE(validate_partition(p).empty());
}

TEST(Split, RunningExampleTargetB)
{
    const auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{1});
    EXPECT_EQ(p.wiring.target_imports, std::vector<uint32_t>{2});
    EXPECT_EQ(p.remaining_module.functions.size(), 2u);
    EXPECT_TRUE(exports(p.target_module, p.wiring.target_export_name));
    EXPECT_TRUE(validate_partition(p).empty());
    EXPECT_TRUE(exec::run_partition(p, "main").same_behavior(exec::run_module(fx::corpus("m0"), "main")));
}

TEST(Split, SingleFunctionModule)
{
    const auto p = split::split(fx::fixture("single"), wasm::FunctionIndex{0});
    for (const auto& i : p.target_module.imports)
        EXPECT_NE(i.kind(), wasm::ExternKind::func) << i.name;
    EXPECT_TRUE(p.remaining_module.functions.empty());
    EXPECT_EQ(import_names(p.remaining_module, target_module_name), std::set<std::string>{p.wiring.target_export_name});
    EXPECT_TRUE(exports(p.remaining_module, "memory"));
    EXPECT_TRUE(validate_partition(p).empty());
}

TEST(Split, HostImportsStayOnTheRemainingSide)
{
    const auto m = fx::fixture("two_imports");
    const auto p = split::split(m, wasm::FunctionIndex{3});
    EXPECT_EQ(import_names(p.remaining_module, "host"), (std::set<std::string>{"putc", "print_i32"}));
    EXPECT_TRUE(import_names(p.target_module, "host").empty());
    EXPECT_EQ(p.wiring.original_host_imports.size(), 2u);
    EXPECT_TRUE(validate_partition(p).empty());
}

TEST(Split, InvalidTargets)
{
    const auto m = fx::fixture("two_imports");
    EXPECT_THROW(split::split(m, wasm::FunctionIndex{0}), InvalidTarget);
    EXPECT_THROW(split::split(m, wasm::FunctionIndex{4}), InvalidTarget);
}

TEST(Split, TargetBodyIsOnlyReindexed)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            SCOPED_TRACE(name + " t=" + std::to_string(t));
            const auto p = split::split(m, wasm::FunctionIndex{t});
            const auto& original = m.functions.at(t - m.imported_count(wasm::ExternKind::func)).code;
            const auto& moved = p.target_module.functions.at(0).code;
            EXPECT_EQ(wasm::canonical_body_hash(moved), wasm::canonical_body_hash(original));
            EXPECT_EQ(wasm::remap_function_body(original, p.wiring.target_map), moved);
        }
    }
}

TEST(ValidatePartition, EveryCorpusSplitIsClean)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            const auto diags = validate_partition(split::split(m, wasm::FunctionIndex{t}));
            EXPECT_TRUE(diags.empty()) << name << " t=" << t << ": " << (diags.empty() ? "" : diags[0].message);
        }
    }
}

TEST(ValidatePartition, DeletedRemainingExport)
{
    auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{2});
    const auto name = p.wiring.remaining_exports.at(1);
    std::erase_if(p.remaining_module.exports, [&](const wasm::Export& e) { return e.name == name; });
    const auto diags = validate_partition(p);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].kind, DiagnosticKind::unresolved_import);
}

TEST(ValidatePartition, MismatchedFunctionType)
{
    auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{2});
    const auto b = p.wiring.remaining_exports.at(1);
    const auto a = p.remaining_module.find_export(p.wiring.remaining_exports.at(0))->index;
    for (auto& e : p.remaining_module.exports)
        if (e.name == b)
            e.index = a;
    const auto diags = validate_partition(p);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].kind, DiagnosticKind::type_mismatch);
}

TEST(RunPartition, BehaviourMatchesUnsplitProgram)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        const auto expected = exec::run_module(m, "main");
        for (const auto t : fx::defined_functions(m))
        {
            const auto got = exec::run_partition(split::split(m, wasm::FunctionIndex{t}), "main");
            EXPECT_TRUE(got.same_behavior(expected)) << name << " t=" << t << "\n" << got.stdout_data << "\n"
                                                     << got.message;
        }
    }
}

TEST(ManifestJson, DescribesTheWiring)
{
    const auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{2});
    const auto j = nlohmann::json::parse(manifest_json(p));
    EXPECT_EQ(j.dump(), nlohmann::json::parse(j.dump()).dump());
    EXPECT_NE(j.dump().find(p.wiring.target_export_name), std::string::npos);
}

}  // namespace
