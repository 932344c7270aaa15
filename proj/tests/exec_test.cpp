// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/error.hpp"
#include "rr/exec/harness.hpp"
#include "rr/exec/partition.hpp"
#include <gtest/gtest.h>

namespace
{
using namespace rr;
using namespace rr::exec;
namespace fx = rr::fixtures;

std::vector<trace::TargetEntry> top_level_entries(const trace::Trace& t)
{
    std::vector<trace::TargetEntry> out;
    for (const auto& e : t.events)
        if (const auto* te = std::get_if<trace::TargetEntry>(&e); te && !te->internal())
            out.push_back(*te);
    return out;
}

TEST(RunModule, UnreachableTraps)
{
    const auto out = run_module(fx::fixture("trap_first"), "main");
    EXPECT_EQ(out.status, RunStatus::trapped);
    EXPECT_EQ(out.trap_kind, "unreachable");
    EXPECT_NE(out.message.find("at func[1]"), std::string::npos) << out.message;
}

TEST(RunModule, PrintsThroughHost)
{
    const auto out = run_module(fx::fixture("print_ok"), "main");
    EXPECT_EQ(out.status, RunStatus::exited);
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_EQ(out.stdout_data, "ok");
}

TEST(RunModule, ExitEscapeStopsExecution)
{
    const auto out = run_module(fx::fixture("exit_three"), "main");
    EXPECT_EQ(out.status, RunStatus::exited);
    EXPECT_EQ(out.exit_code, 3);
    EXPECT_EQ(out.stdout_data, "x");
}

TEST(RunModule, FuelLimit)
{
    ExecLimits limits;
    limits.fuel = 1'000'000;
    const auto out = run_module(fx::fixture("spin"), "main", limits);
    EXPECT_EQ(out.status, RunStatus::exhausted);
    EXPECT_GE(out.fuel_used, limits.fuel);
}

TEST(RunModule, CallDepthLimit)
{
    ExecLimits limits;
    limits.max_call_depth = 3;
    const auto out = run_module(fx::corpus("m0"), "main", limits);
    EXPECT_EQ(out.status, RunStatus::trapped);
    EXPECT_EQ(out.trap_kind, "call stack exhausted");
}

TEST(RunModule, UnknownImportFailsInstantiation)
{
    auto m = fx::fixture("print_ok");
    m.imports[0].name = "no_such_function";
    EXPECT_THROW(run_module(m, "main"), InstantiationFailed);
}

TEST(RunModule, CorpusAgreesWithV8)
{
    if (!fx::have_program("node"))
        GTEST_SKIP() << "node not available";
    for (const auto& name : fx::corpus_programs())
    {
        if (name == "exit_code")
            continue;
        SCOPED_TRACE(name);
        const auto ours = run_module(fx::corpus(name), "main");
        const auto ref = driver::run_process(
            {"node", (fx::oracles_dir() / "node_run.js").string(), fx::corpus_path(name).string()},
            std::chrono::seconds{60});
        ASSERT_TRUE(ref.exited());
        const auto status = ours.status == RunStatus::trapped ? std::string{"trap"}
                                                              : "exit " + std::to_string(ours.exit_code);
        EXPECT_EQ(ours.stdout_data + status + "\n", ref.out);
    }
}

TEST(Recording, RecursionDoesNotCrossTheBoundary)
{
    const auto p = split::split(fx::corpus("m0"), wasm::FunctionIndex{2});
    const auto rec = run_partition_recording(p, "main");
    EXPECT_EQ(rec.outcome.status, RunStatus::exited);
    const auto entries = top_level_entries(rec.trace);
    ASSERT_EQ(entries.size(), 1u);
    EXPECT_EQ(entries[0].args, std::vector<trace::Value>{trace::Value::i32(4)});
    EXPECT_EQ(trace::count_top_level_entries(trace::reduce_trace(rec.trace)), 1u);
    EXPECT_EQ(trace::count_entries(rec.trace), 9u);
}

TEST(Recording, WriteBeforeEntryIsEmitted)
{
    const auto p = split::split(fx::fixture("write_before_entry"), wasm::FunctionIndex{0});
    const auto rec = run_partition_recording(p, "main");
    EXPECT_EQ(rec.outcome.status, RunStatus::exited);
    ASSERT_EQ(rec.trace.events.size(), 2u);
    const auto* w = std::get_if<trace::MemoryWrite>(&rec.trace.events[0]);
    ASSERT_NE(w, nullptr);
    EXPECT_EQ(w->offset, 0u);
    EXPECT_EQ(w->bytes, std::vector<uint8_t>{7});
    EXPECT_TRUE(std::holds_alternative<trace::TargetEntry>(rec.trace.events[1]));
}

TEST(Recording, PureTargetHasOnlyItsEntry)
{
    const auto p = split::split(fx::fixture("pure_target"), wasm::FunctionIndex{0});
    const auto rec = run_partition_recording(p, "main");
    ASSERT_EQ(rec.trace.events.size(), 1u);
    const auto& e = std::get<trace::TargetEntry>(rec.trace.events[0]);
    EXPECT_EQ(e.args, std::vector<trace::Value>{trace::Value::i32(9)});
}

TEST(Recording, OutCallResultsInOrder)
{
    const auto p = split::split(fx::fixture("two_results"), wasm::FunctionIndex{1});
    const auto rec = run_partition_recording(p, "main");
    EXPECT_EQ(rec.outcome.status, RunStatus::exited);
    const auto& entry = std::get<trace::TargetEntry>(rec.trace.events.at(0));
    EXPECT_TRUE(entry.args.empty());
    std::vector<int32_t> results;
    for (const auto& e : rec.trace.events)
        if (const auto* oc = std::get_if<trace::OutCallReturn>(&e))
        {
            EXPECT_EQ(oc->function, 0u);
            ASSERT_EQ(oc->results.size(), 1u);
            results.push_back(oc->results[0].as_i32());
        }
    EXPECT_EQ(results, (std::vector<int32_t>{1, 2}));
}

TEST(Recording, OutcomeMatchesPlainRun)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        const auto expected = run_module(m, "main");
        for (const auto t : fx::defined_functions(m))
        {
            const auto rec = run_partition_recording(split::split(m, wasm::FunctionIndex{t}), "main");
            EXPECT_TRUE(rec.outcome.same_behavior(expected)) << name << " t=" << t;
        }
    }
}

TEST(Observation, PartitionLogIsDeterministic)
{
    const auto p = split::split(fx::corpus("callbacks"), wasm::FunctionIndex{1});
    const auto first = observe_partition(p, "main");
    EXPECT_FALSE(first.steps.empty());
    EXPECT_EQ(first.steps, observe_partition(p, "main").steps);
}

}  // namespace
