// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"
#include "rr/driver/oracle.hpp"
#include "rr/driver/reduce.hpp"
#include "rr/driver/subprocess.hpp"
#include "rr/error.hpp"
#include "rr/wasm/transform.hpp"
#include <gtest/gtest.h>
#include <json.hpp>
#include <csignal>

namespace
{
using namespace rr;
using namespace rr::driver;
namespace fx = rr::fixtures;
using namespace std::chrono_literals;

OracleConfig script_oracle(const std::string& path)
{
    OracleConfig cfg;
    cfg.script = path;
    cfg.timeout = 30;
    return cfg;
}

ReduceOptions serial()
{
    ReduceOptions opts;
    opts.jobs = 1;
    return opts;
}

const wasm::bytes& target_code(const wasm::Module& m, uint32_t f)
{
    return m.functions.at(f - m.imported_count(wasm::ExternKind::func)).code;
}

TEST(Subprocess, CapturesOutputAndStatus)
{
    const auto r = run_shell("printf out; printf err >&2; exit 3", 10s);
    EXPECT_TRUE(r.exited());
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_EQ(r.out, "out");
    EXPECT_EQ(r.err, "err");
}

TEST(Subprocess, TimeoutKillsTheGroup)
{
    const auto r = run_shell("sleep 30 & sleep 30", 300ms);
    EXPECT_TRUE(r.timed_out);
    EXPECT_LT(r.elapsed, 10.0);
}

TEST(Subprocess, ReportsSignals)
{
    const auto r = run_shell("kill -SEGV $$", 10s);
    EXPECT_EQ(r.signal, SIGSEGV);
    EXPECT_FALSE(r.exited());
}

TEST(Subprocess, MissingProgram)
{
    const auto r = run_process({"/nonexistent/program"}, 10s);
    EXPECT_FALSE(r.started);
    EXPECT_FALSE(r.start_error.empty());
}

TEST(Subprocess, ExtraEnvironment)
{
    const auto r = run_shell("printf %s \"$RR_PROBE\"", 10s, {{"RR_PROBE", "yes"}});
    EXPECT_EQ(r.out, "yes");
}

TEST(Subprocess, ShellQuote)
{
    const auto r = run_shell("printf %s " + shell_quote("it's a $test"), 10s);
    EXPECT_EQ(r.out, "it's a $test");
}

TEST(RunOracle, ScriptExitZeroIsInteresting)
{
    fx::TempDir dir;
    const auto v = run_oracle(fx::corpus_path("m0").string(), script_oracle(fx::write_script(dir / "yes.sh", "exit 0")));
    EXPECT_TRUE(v.interesting);
}

TEST(RunOracle, ScriptExitOneIsNot)
{
    fx::TempDir dir;
    const auto v = run_oracle(fx::corpus_path("m0").string(), script_oracle(fx::write_script(dir / "no.sh", "exit 1")));
    EXPECT_FALSE(v.interesting);
}

TEST(RunOracle, ScriptTimeoutIsNotInteresting)
{
    fx::TempDir dir;
    auto cfg = script_oracle(fx::write_script(dir / "slow.sh", "sleep 30"));
    cfg.timeout = 0.3;
    const auto v = run_oracle(fx::corpus_path("m0").string(), cfg);
    EXPECT_FALSE(v.interesting);
    EXPECT_TRUE(v.timed_out);
}

TEST(RunOracle, UnrunnableScript)
{
    EXPECT_THROW(run_oracle(fx::corpus_path("m0").string(), script_oracle("/nonexistent/oracle.sh")), OracleCrashed);
}

TEST(RunOracle, DifferentialStubEngines)
{
    fx::TempDir dir;
    OracleConfig cfg;
    cfg.mode = OracleMode::differential;
    cfg.buggy_cmd = fx::write_script(dir / "buggy.sh", "echo 7");
    cfg.reference_cmd = fx::write_script(dir / "ref.sh", "echo 12");
    Oracle oracle{cfg};
    EXPECT_TRUE(oracle.calibrate(fx::corpus_path("m0").string()).interesting);
    EXPECT_EQ(oracle.signature(), Divergence::output);
    EXPECT_TRUE(oracle.check(fx::corpus_path("hello").string()).interesting);
    EXPECT_EQ(oracle.calls(), 2u);
}

TEST(RunOracle, DifferentialAgreementIsNotInteresting)
{
    fx::TempDir dir;
    OracleConfig cfg;
    cfg.mode = OracleMode::differential;
    cfg.buggy_cmd = fx::tool("rr-run");
    cfg.reference_cmd = fx::tool("rr-run");
    Oracle oracle{cfg};
    EXPECT_FALSE(oracle.calibrate(fx::corpus_path("m0").string()).interesting);
}

TEST(RunOracle, SimulatedEngineCrash)
{
    OracleConfig cfg;
    cfg.mode = OracleMode::differential;
    cfg.buggy_cmd = fx::tool("rr-run") + " --simulate-bug rotl-wrap";
    cfg.reference_cmd = fx::tool("rr-run");
    Oracle oracle{cfg};
    EXPECT_TRUE(oracle.calibrate(fx::corpus_path("bug_engine_crash").string()).interesting);
    EXPECT_EQ(oracle.signature(), Divergence::crash);
    EXPECT_FALSE(oracle.check(fx::corpus_path("m0").string()).interesting);
}

TEST(Classify, StrongestDifferenceWins)
{
    RunSummary ok{0, 0, false, "a", "", 0};
    RunSummary other_out{0, 0, false, "b", "", 0};
    RunSummary failed{1, 0, false, "b", "", 0};
    RunSummary killed{-1, SIGABRT, false, "", "", 0};
    RunSummary slow{-1, 0, true, "", "", 0};
    EXPECT_EQ(classify(ok, ok), Divergence::none);
    EXPECT_EQ(classify(other_out, ok), Divergence::output);
    EXPECT_EQ(classify(failed, ok), Divergence::exit_status);
    EXPECT_EQ(classify(killed, ok), Divergence::crash);
    EXPECT_EQ(classify(killed, slow), Divergence::none);
    for (const auto d : {Divergence::none, Divergence::crash, Divergence::exit_status, Divergence::output})
        EXPECT_EQ(parse_divergence(to_string(d)), d);
}

TEST(ReduceProgram, SeededBugInRecursiveFunction)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    const auto input = fx::corpus_bytes("bug_div");
    const auto in = wasm::parse_module(input);
    const auto r = reduce_program(input, oracle, serial());
    ASSERT_TRUE(r.succeeded);
    EXPECT_EQ(r.target, 2u);
    EXPECT_LT(r.size_all, wasm::code_size(in));
    EXPECT_EQ(r.input_size, wasm::code_size(in));
    EXPECT_EQ(r.target_hash_output, wasm::canonical_body_hash(target_code(in, 2)));
    EXPECT_EQ(r.target_hash_input, r.target_hash_output);
    const auto out = wasm::parse_module(r.output);
    EXPECT_TRUE(out.imports.empty());
    EXPECT_EQ(wasm::code_size(out), r.size_all);
    const auto path = dir / "out.wasm";
    wasm::write_file(path, r.output);
    EXPECT_TRUE(oracle.check(path.string()).interesting);
}

TEST(ReduceProgram, HashOracleFallsBackToInput)
{
    fx::TempDir dir;
    const auto input = fx::corpus_bytes("m0");
    const auto script = fx::write_script(dir / "same.sh", "cmp -s \"$1\" " + shell_quote(fx::corpus_path("m0").string()));
    Oracle oracle{script_oracle(script)};
    const auto r = reduce_program(input, oracle, serial());
    EXPECT_FALSE(r.succeeded);
    EXPECT_EQ(r.output, input);
    EXPECT_EQ(r.size_all, r.input_size);
    EXPECT_FALSE(r.target.has_value());
}

TEST(ReduceProgram, EngineLogPicksTheCandidate)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    auto opts = serial();
    opts.engine_log = "crash in function 2";
    const auto r = reduce_program(fx::corpus_bytes("bug_div"), oracle, opts);
    ASSERT_EQ(r.attempts.size(), 1u);
    EXPECT_EQ(r.attempts[0].candidate, 2u);
    EXPECT_TRUE(r.attempts[0].success);
    EXPECT_EQ(r.order.front(), 2u);
}

TEST(ReduceProgram, ParallelResultMatchesSerial)
{
    fx::TempDir dir;
    Oracle serial_oracle{script_oracle(fx::trap_oracle(dir / "o1.sh", "out of bounds memory"))};
    Oracle parallel_oracle{script_oracle(fx::trap_oracle(dir / "o2.sh", "out of bounds memory"))};
    const auto input = fx::corpus_bytes("bug_oob");
    const auto a = reduce_program(input, serial_oracle, serial());
    auto opts = serial();
    opts.jobs = 4;
    const auto b = reduce_program(input, parallel_oracle, opts);
    ASSERT_TRUE(a.succeeded);
    EXPECT_EQ(a.target, b.target);
    EXPECT_EQ(a.output, b.output);
}

TEST(ReduceProgram, UninterestingInput)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::write_script(dir / "no.sh", "exit 1"))};
    EXPECT_THROW(reduce_program(fx::corpus_bytes("m0"), oracle, serial()), InputNotInteresting);
}

TEST(ReduceProgram, InvalidInput)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::write_script(dir / "yes.sh", "exit 0"))};
    EXPECT_THROW(reduce_program(wasm::bytes{1, 2, 3}, oracle, serial()), InputInvalid);
}

TEST(HybridReduce, StripReducerNeverLoses)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    const auto input = fx::corpus_bytes("bug_div");
    const auto plain = reduce_program(input, oracle, serial());
    const auto hybrid = hybrid_reduce(input, oracle, shell_quote(fx::tool("rr-strip")) + " {input} {output} {oracle}", serial());
    EXPECT_TRUE(hybrid.hybrid);
    EXPECT_LE(hybrid.size_all, plain.size_all);
    const auto path = dir / "out.wasm";
    wasm::write_file(path, hybrid.output);
    EXPECT_TRUE(oracle.check(path.string()).interesting);
}

TEST(HybridReduce, UninterestingExternalOutputIsIgnored)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    const auto input = fx::corpus_bytes("bug_div");
    const auto plain = reduce_program(input, oracle, serial());
    const auto hybrid = hybrid_reduce(
        input, oracle, "cp " + shell_quote(fx::module_path("returns").string()) + " {output}", serial());
    EXPECT_FALSE(hybrid.external_accepted);
    EXPECT_EQ(hybrid.output, plain.output);
    EXPECT_EQ(hybrid.size_all, plain.size_all);
}

TEST(HybridReduce, FailingExternalCommandIsAWarning)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    const auto hybrid = hybrid_reduce(fx::corpus_bytes("bug_div"), oracle, "exit 9", serial());
    EXPECT_TRUE(hybrid.succeeded);
    EXPECT_FALSE(hybrid.external_accepted);
    EXPECT_FALSE(hybrid.warnings.empty());
}

TEST(Report, FailedReductionIsHundredPercent)
{
    ReductionResult r;
    r.input_size = 50;
    r.size_all = 50;
    const auto j = nlohmann::json::parse(report_json(r));
    EXPECT_FALSE(j.at("succeeded").get<bool>());
    EXPECT_DOUBLE_EQ(j.at("all_percent").get<double>(), 100.0);
    EXPECT_DOUBLE_EQ(j.at("target_percent").get<double>(), 100.0);
}

TEST(Report, SuccessfulRunCrossChecksSizes)
{
    fx::TempDir dir;
    Oracle oracle{script_oracle(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    const auto r = reduce_program(fx::corpus_bytes("bug_div"), oracle, serial());
    ASSERT_TRUE(r.succeeded);
    const auto path = (dir / "report.json").string();
    write_report(r, path);
    std::ifstream f{path};
    const auto j = nlohmann::json::parse(f);
    EXPECT_EQ(nlohmann::json::parse(j.dump()), j);
    const auto out = wasm::parse_module(r.output);
    const auto target = out.find_export(split::split(wasm::parse_module(fx::corpus_bytes("bug_div")), wasm::FunctionIndex{2})
                                            .wiring.target_export_name);
    ASSERT_NE(target, nullptr);
    EXPECT_EQ(j.at("size_target").get<uint64_t>(), wasm::function_body_size(out, wasm::FunctionIndex{target->index}));
    EXPECT_EQ(j.at("size_all").get<uint64_t>(), wasm::code_size(out));
    EXPECT_EQ(j.at("attempts").size(), r.attempts.size());
    EXPECT_LT(j.at("all_percent").get<double>(), 100.0);
}

class Cli : public ::testing::Test
{
protected:
    ProcessResult reduce(const std::vector<std::string>& args)
    {
        std::vector<std::string> argv{fx::tool("rr-reduce"), "-q"};
        argv.insert(argv.end(), args.begin(), args.end());
        return run_process(argv, 120s);
    }

    fx::TempDir dir;
};

TEST_F(Cli, ReducesAndWritesOutput)
{
    const auto oracle = fx::trap_oracle(dir / "oracle.sh", "integer divide by zero");
    const auto out = (dir / "out.wasm").string();
    const auto r = reduce({fx::corpus_path("bug_div").string(), "--oracle", oracle, "-o", out, "--jobs", "1",
        "--report", (dir / "r.json").string()});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("reduced"), std::string::npos);
    EXPECT_TRUE(fx::fs::exists(out));
    EXPECT_TRUE(fx::fs::exists(dir / "r.json"));
}

TEST_F(Cli, ExitCodes)
{
    const auto no = fx::write_script(dir / "no.sh", "exit 1");
    EXPECT_EQ(reduce({fx::corpus_path("m0").string(), "--oracle", no, "-o", (dir / "x.wasm").string()}).exit_code, 2);
    const auto junk = dir / "junk.wasm";
    wasm::write_file(junk, wasm::bytes{1, 2, 3});
    EXPECT_EQ(reduce({junk.string(), "--oracle", no}).exit_code, 3);
    EXPECT_EQ(reduce({fx::corpus_path("m0").string()}).exit_code, 4);
    EXPECT_EQ(reduce({"--help"}).exit_code, 0);
}

TEST_F(Cli, DifferentialModeWithHybrid)
{
    const auto out = (dir / "out.wasm").string();
    const auto r = reduce({fx::corpus_path("bug_engine_crash").string(), "--buggy-cmd",
        fx::tool("rr-run") + " --simulate-bug rotl-wrap", "--ref-cmd", fx::tool("rr-run"), "-o", out, "--hybrid",
        shell_quote(fx::tool("rr-strip")) + " {input} {output} {oracle}"});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    const auto check = run_process({fx::tool("rr-run"), "--simulate-bug", "rotl-wrap", out}, 30s);
    EXPECT_EQ(check.signal, SIGABRT);
}

}  // namespace
