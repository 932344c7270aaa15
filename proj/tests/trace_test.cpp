// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/exec/partition.hpp"
#include "rr/trace/trace.hpp"
#include <gtest/gtest.h>

namespace
{
using namespace rr;
using namespace rr::trace;
namespace fx = rr::fixtures;

/// Raw recordings of every corpus program under every target.
const std::vector<std::pair<std::string, Trace>>& corpus_traces()
{
    static const auto traces = [] {
        std::vector<std::pair<std::string, Trace>> out;
        for (const auto& name : fx::corpus_programs())
        {
            const auto m = fx::corpus(name);
            for (const auto t : fx::defined_functions(m))
                out.emplace_back(name + " t=" + std::to_string(t),
                    exec::run_partition_recording(split::split(m, wasm::FunctionIndex{t}), "main").trace);
        }
        return out;
    }();
    return traces;
}

TargetEntry entry(std::vector<Value> args, uint32_t activation)
{
    TargetEntry e;
    e.export_name = "t0";
    e.args = std::move(args);
    e.activation = activation;
    return e;
}

TEST(ReduceTrace, RunningExampleKeepsOneEntry)
{
    const auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{2});
    const auto raw = exec::run_partition_recording(p, "main").trace;
    ASSERT_EQ(count_entries(raw), 9u);
    const auto reduced = reduce_trace(raw);
    ASSERT_EQ(reduced.events.size(), 1u);
    const auto& e = std::get<TargetEntry>(reduced.events[0]);
    EXPECT_EQ(e.args, std::vector<Value>{Value::i32(4)});
    EXPECT_FALSE(e.internal());
}

TEST(ReduceTrace, AdjacentMemoryWritesMerge)
{
    Trace t;
    t.initial_pages = 1;
    t.events = {MemoryWrite{0, {1, 2}}, MemoryWrite{2, {3}}, entry({}, 1)};
    const auto r = reduce_trace(t);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(std::get<MemoryWrite>(r.events[0]), (MemoryWrite{0, {1, 2, 3}}));
    EXPECT_TRUE(std::holds_alternative<TargetEntry>(r.events[1]));
}

TEST(ReduceTrace, OverlappingWritesKeepTheLastValue)
{
    Trace t;
    t.initial_pages = 1;
    t.events = {MemoryWrite{4, {1, 2, 3}}, MemoryWrite{5, {9}}, entry({}, 1)};
    const auto r = reduce_trace(t);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(std::get<MemoryWrite>(r.events[0]), (MemoryWrite{4, {1, 9, 3}}));
}

TEST(ReduceTrace, UnchangedGlobalWriteIsDropped)
{
    Trace t;
    t.initial_globals = {Value::i32(5), Value::i32(0)};
    t.events = {GlobalWrite{0, Value::i32(5)}, GlobalWrite{1, Value::i32(6)}, entry({}, 1)};
    const auto r = reduce_trace(t);
    ASSERT_EQ(r.events.size(), 2u);
    EXPECT_EQ(std::get<GlobalWrite>(r.events[0]), (GlobalWrite{1, Value::i32(6)}));
}

TEST(ReduceTrace, EmptyTraceStaysEmpty)
{
    EXPECT_EQ(reduce_trace(Trace{}), Trace{});
}

TEST(ReduceTrace, IdempotentOnCorpus)
{
    for (const auto& [name, t] : corpus_traces())
    {
        const auto once = reduce_trace(t);
        EXPECT_EQ(reduce_trace(once), once) << name;
    }
}

TEST(ReduceTrace, NeverGrowsSerializedSize)
{
    for (const auto& [name, t] : corpus_traces())
        EXPECT_LE(to_text(reduce_trace(t)).size(), to_text(t).size()) << name;
}

TEST(ReduceTrace, KeepsBoundaryCrossingEntries)
{
    for (const auto& [name, t] : corpus_traces())
    {
        size_t crossing = 0;
        for (const auto& e : t.events)
            if (const auto* te = std::get_if<TargetEntry>(&e); te && !te->internal())
                ++crossing;
        EXPECT_EQ(count_top_level_entries(reduce_trace(t)), crossing) << name;
    }
}

TEST(TraceText, RoundTripsCorpusTraces)
{
    for (const auto& [name, t] : corpus_traces())
    {
        EXPECT_EQ(parse_text(to_text(t)), t) << name;
        const auto r = reduce_trace(t);
        EXPECT_EQ(parse_text(to_text(r)), r) << name;
    }
}

TEST(TraceText, ValueFormats)
{
    for (const auto& v : {Value::i32(-4), Value::i64(1LL << 40), Value::f32_bits(0x7fc00001),
             Value::f64_bits(0x8000000000000000ULL), Value::funcref(exec::no_addr), Value{wasm::ValType::funcref, 3}})
        EXPECT_EQ(parse_value(format_value(v)), v) << format_value(v);
    EXPECT_EQ(format_value(Value::i32(4)), "i32:4");
}

TEST(TraceText, RejectsGarbage)
{
    EXPECT_ANY_THROW(parse_text("ENTRY"));
    EXPECT_ANY_THROW(parse_value("i32"));
}

}  // namespace
