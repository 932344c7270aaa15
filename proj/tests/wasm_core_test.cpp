// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/error.hpp"
#include "rr/exec/harness.hpp"
#include "rr/wasm/code_writer.hpp"
#include "rr/wasm/transform.hpp"
#include "rr/wasm/validate.hpp"
#include <gtest/gtest.h>

namespace
{
using namespace rr;
using namespace rr::wasm;
namespace fx = rr::fixtures;
using fx::corpus;
using fx::fixture;

constexpr uint32_t m0_a = 0;
constexpr uint32_t m0_b = 1;
constexpr uint32_t m0_c = 2;

Module with_function(bytes code)
{
    Module m;
    m.types.push_back({});
    m.functions.push_back({0, {}, std::move(code)});
    return m;
}

TEST(ParseModule, HeaderOnly)
{
    const bytes header{0x00, 0x61, 0x73, 0x6d, 0x01, 0x00, 0x00, 0x00};
    EXPECT_EQ(parse_module(header), Module{});
}

TEST(ParseModule, RunningExample)
{
    const auto m = corpus("m0");
    EXPECT_EQ(m.functions.size(), 3u);
    EXPECT_EQ(m.memories.size(), 1u);
    ASSERT_EQ(m.exports.size(), 1u);
    EXPECT_EQ(m.exports[0].name, "main");
    EXPECT_EQ(m.exports[0].index, m0_a);
}

TEST(ParseModule, SimdOpcodeIsRejected)
{
    auto m = corpus("m0");
    bytes simd{0xfd, 0x0c};
    simd.insert(simd.end(), 16, 0);
    simd.push_back(0x1a);
    m.functions[m0_a].code.insert(m.functions[m0_a].code.begin(), simd.begin(), simd.end());
    const auto b = encode_module(m);
    try
    {
        parse_module(b);
        FAIL() << "parse accepted a v128 opcode";
    }
    catch (const UnsupportedFeature& e)
    {
        EXPECT_EQ(e.feature(), "simd");
    }
}

TEST(ParseModule, TruncatedInputIsMalformed)
{
    auto b = fx::corpus_bytes("m0");
    b.resize(b.size() - 3);
    EXPECT_THROW(parse_module(b), MalformedBinary);
}

TEST(EncodeModule, EmptyModuleIsHeaderOnly)
{
    EXPECT_EQ(encode_module(Module{}), (bytes{0x00, 0x61, 0x73, 0x6d, 0x01, 0x00, 0x00, 0x00}));
}

TEST(EncodeModule, CorpusRoundTripIsStructurallyEqual)
{
    for (const auto& name : fx::corpus_programs())
    {
        SCOPED_TRACE(name);
        const auto m = corpus(name);
        EXPECT_EQ(parse_module(encode_module(m)), m);
    }
}

TEST(EncodeModule, ReencodedCorpusAcceptedByV8)
{
    fx::TempDir dir;
    std::vector<std::string> paths;
    for (const auto& name : fx::corpus_programs())
    {
        paths.push_back((dir / (name + ".wasm")).string());
        write_file(paths.back(), encode_module(corpus(name)));
    }
    const auto verdicts = fx::node_validate(paths);
    if (!verdicts)
        GTEST_SKIP() << "node not available";
    for (const auto& p : paths)
        EXPECT_TRUE(verdicts->at(p)) << p;
}

TEST(CodeSize, EmptyModuleIsZero)
{
    EXPECT_EQ(code_size(Module{}), 0u);
}

TEST(CodeSize, SingleNineByteBody)
{
    CodeWriter c;
    c.i32_const(1).op(Op::drop).i32_const(2).op(Op::drop).op(Op::nop).end();
    const auto m = with_function(c.take());
    EXPECT_EQ(code_size(m), 9u);
    EXPECT_EQ(function_body_size(m, FunctionIndex{0}), 9u);
}

TEST(CodeSize, MatchesIndependentDump)
{
    for (const auto& name : fx::corpus_programs())
    {
        SCOPED_TRACE(name);
        const auto sizes = fx::python_code_sizes(fx::corpus_path(name));
        if (!sizes)
            GTEST_SKIP() << "python3 not available";
        const auto m = corpus(name);
        EXPECT_EQ(code_size(m), sizes->at("total"));
        for (const auto f : fx::defined_functions(m))
            EXPECT_EQ(function_body_size(m, FunctionIndex{f}), sizes->at(std::to_string(f)));
    }
}

TEST(FunctionBodySize, SingleFunctionEqualsCodeSize)
{
    const auto m = fixture("single");
    EXPECT_EQ(function_body_size(m, FunctionIndex{0}), code_size(m));
}

TEST(FunctionBodySize, ImportedFunctionIsRejected)
{
    const auto m = fixture("two_imports");
    EXPECT_THROW(function_body_size(m, FunctionIndex{1}), NotDefinedFunction);
    EXPECT_THROW(function_body_size(m, FunctionIndex{9}), NotDefinedFunction);
}

TEST(RemapFunctionBody, IdentityKeepsBytes)
{
    const auto m = corpus("m0");
    for (const auto& f : m.functions)
        EXPECT_EQ(remap_function_body(f.code, IndexMap::identity()), f.code);
}

TEST(RemapFunctionBody, RenamesCallTarget)
{
    CodeWriter in;
    in.op(Op::call, 1).end();
    CodeWriter expected;
    expected.op(Op::call, 0).end();
    IndexMap map;
    map.set(IndexSpace::func, 1, 0);
    EXPECT_EQ(remap_function_body(in.code(), map), expected.code());
}

TEST(RemapFunctionBody, MissingEntryIsAnError)
{
    CodeWriter in;
    in.op(Op::call, 5).end();
    IndexMap map;
    map.set(IndexSpace::func, 1, 0);
    EXPECT_THROW(remap_function_body(in.code(), map), UnmappedIndex);
}

TEST(RemapFunctionBody, WideLebsAreReencoded)
{
    CodeWriter in;
    in.op(Op::call, 200).end();
    IndexMap map;
    map.set(IndexSpace::func, 200, 3);
    const auto out = remap_function_body(in.code(), map);
    EXPECT_EQ(out, (bytes{0x10, 0x03, 0x0b}));
    EXPECT_EQ(canonical_body_hash(out), canonical_body_hash(in.code()));
}

TEST(IndexMap, ComposeAndInverse)
{
    auto first = IndexMap::identity();
    first.set(IndexSpace::func, 0, 5);
    first.set(IndexSpace::func, 1, 6);
    auto second = IndexMap::identity();
    second.set(IndexSpace::func, 5, 1);
    second.set(IndexSpace::func, 6, 0);
    const auto both = IndexMap::compose(first, second);
    EXPECT_EQ(both.lookup(IndexSpace::func, 0), 1u);
    EXPECT_EQ(both.lookup(IndexSpace::func, 1), 0u);
    const auto back = both.inverse();
    EXPECT_EQ(back.lookup(IndexSpace::func, 1), 0u);
    EXPECT_EQ(back.lookup(IndexSpace::global, 7), 7u);

    IndexMap collapsing;
    collapsing.set(IndexSpace::func, 0, 0);
    collapsing.set(IndexSpace::func, 1, 0);
    EXPECT_THROW(collapsing.inverse(), std::logic_error);
}

TEST(InstrumentFunctionEntries, EmptyModuleGainsOneImport)
{
    const auto m = instrument_function_entries(Module{});
    ASSERT_EQ(m.imports.size(), 1u);
    EXPECT_EQ(m.imports[0].module, "rr");
    EXPECT_EQ(m.imports[0].name, "cov");
    EXPECT_TRUE(m.functions.empty());
}

TEST(InstrumentFunctionEntries, RunningExampleCoversAllFunctions)
{
    const auto m = instrument_function_entries(corpus("m0"));
    EXPECT_TRUE(validate_module(m).empty());
    const auto out = exec::run_module(m, "main");
    ASSERT_EQ(out.status, exec::RunStatus::exited);
    ASSERT_GE(out.coverage.size(), 3u);
    EXPECT_EQ(std::vector<uint32_t>(out.coverage.begin(), out.coverage.begin() + 3),
        (std::vector<uint32_t>{m0_a, m0_b, m0_c}));
    EXPECT_EQ(std::set<uint32_t>(out.coverage.begin(), out.coverage.end()), (std::set<uint32_t>{m0_a, m0_b, m0_c}));
}

TEST(InstrumentFunctionEntries, OutputAcceptedByV8)
{
    fx::TempDir dir;
    std::vector<std::string> paths;
    for (const auto& name : fx::corpus_programs())
    {
        paths.push_back((dir / (name + ".wasm")).string());
        write_file(paths.back(), encode_module(instrument_function_entries(corpus(name))));
    }
    const auto verdicts = fx::node_validate(paths);
    if (!verdicts)
        GTEST_SKIP() << "node not available";
    for (const auto& p : paths)
        EXPECT_TRUE(verdicts->at(p)) << p;
}

TEST(ValidateModule, CorpusIsValid)
{
    for (const auto& name : fx::corpus_programs())
        EXPECT_TRUE(validate_module(corpus(name)).empty()) << name;
}

TEST(ValidateModule, StackTypeErrorIsReported)
{
    CodeWriter c;
    c.i32_const(1).end();
    const auto diags = validate_module(with_function(c.take()));
    EXPECT_FALSE(diags.empty());
}

TEST(ValidateModule, OutOfRangeCallIsReported)
{
    CodeWriter c;
    c.op(Op::call, 4).end();
    EXPECT_FALSE(validate_module(with_function(c.take())).empty());
}

TEST(RemoveUnreferencedFunctions, DropsUnusedAndRemaps)
{
    const auto m = fixture("returns");
    IndexMap map;
    const auto out = remove_unreferenced_functions(m, &map);
    ASSERT_EQ(out.functions.size(), 1u);
    EXPECT_EQ(out.exports.at(0).index, 0u);
    EXPECT_EQ(map.lookup(IndexSpace::func, 1), 0u);
    EXPECT_TRUE(validate_module(out).empty());
}

TEST(RemoveUnreferencedFunctions, KeepsTransitiveCallees)
{
    const auto m = corpus("m0");
    EXPECT_EQ(remove_unreferenced_functions(m), m);
    const auto tables = corpus("indirect_dispatch");
    EXPECT_EQ(remove_unreferenced_functions(tables).functions.size(), tables.functions.size());
}

TEST(CanonicalBodyHash, IgnoresIndexValuesOnly)
{
    const auto m = corpus("m0");
    IndexMap shift;
    for (uint32_t i = 0; i < 3; ++i)
        shift.set(IndexSpace::func, i, i + 7);
    const auto& c = m.functions[m0_c].code;
    EXPECT_EQ(canonical_body_hash(remap_function_body(c, shift)), canonical_body_hash(c));
    EXPECT_NE(canonical_body_hash(m.functions[m0_b].code), canonical_body_hash(c));
}

}  // namespace
