// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

// Runs the end-to-end acceptance criteria and prints one PASS/FAIL line for each.

#include "fixtures.hpp"
#include "rr/driver/oracle.hpp"
#include "rr/driver/reduce.hpp"
#include "rr/driver/subprocess.hpp"
#include "rr/wasm/transform.hpp"
#include "rr/wasm/validate.hpp"
#include <functional>
#include <iostream>
#include <sstream>

namespace
{
using namespace rr;
namespace fx = rr::fixtures;

class Check
{
public:
    void expect(bool ok, const std::string& what)
    {
        ++checks_;
        if (!ok && failures_.size() < 5)
            failures_.push_back(what);
        failed_ = failed_ || !ok;
    }
    bool failed() const { return failed_; }
    size_t checks() const { return checks_; }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    bool failed_ = false;
    size_t checks_ = 0;
    std::vector<std::string> failures_;
};

using Criterion = std::function<void(Check&)>;

std::string where(const std::string& name, uint32_t t) { return name + " t=" + std::to_string(t); }

const wasm::bytes& code_of(const wasm::Module& m, uint32_t f)
{
    return m.functions.at(f - m.imported_count(wasm::ExternKind::func)).code;
}

driver::OracleConfig script(const std::string& path)
{
    driver::OracleConfig cfg;
    cfg.script = path;
    cfg.timeout = 60;
    return cfg;
}

driver::ReduceOptions serial()
{
    driver::ReduceOptions opts;
    opts.jobs = 1;
    return opts;
}

void round_trip(Check& c)
{
    size_t programs = 0;
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        const auto expected = exec::run_module(m, "main");
        ++programs;
        for (const auto t : fx::defined_functions(m))
        {
            const auto p = split::split(m, wasm::FunctionIndex{t});
            const auto merged = merge::merge(p.target_module, p.remaining_module, p.wiring);
            c.expect(wasm::validate_module(merged.module).empty(), where(name, t) + " invalid");
            c.expect(exec::run_module(merged.module, "main").same_behavior(expected), where(name, t) + " behaves differently");
        }
    }
    c.expect(programs >= 10, "fewer than 10 corpus programs");
}

void running_example(Check& c)
{
    const auto m = fx::corpus("m0");
    const auto cand = fx::build_candidate(m, 2);
    const auto& events = cand.trace.events;
    c.expect(events.size() == 1, "reduced trace has " + std::to_string(events.size()) + " events");
    if (events.size() == 1)
    {
        const auto* e = std::get_if<trace::TargetEntry>(&events[0]);
        c.expect(e && e->args == std::vector<exec::Value>{exec::Value::i32(4)}, "entry is not c(4)");
    }
    const auto* b = cand.replay.find(1, replay::Role::replayed);
    const auto* a = cand.replay.find(0, replay::Role::emptied);
    c.expect(b && a, "a or b missing from the replay module");
    if (b && a)
    {
        const auto& fb = code_of(cand.replay.module, b->index);
        const auto& fa = code_of(cand.replay.module, a->index);
        c.expect(fb == wasm::bytes{0x41, 0x04, 0x10, 0x00, 0x0b}, "b is not i32.const 4; call; end");
        c.expect(fa == wasm::bytes{0x0b}, "a is not empty");
    }
    c.expect(wasm::code_size(cand.merged.module) < wasm::code_size(m), "candidate is not smaller than M0");
    c.expect(exec::run_module(cand.merged.module, "main").status == exec::RunStatus::exited, "candidate does not run");
}

void seeded_bugs(Check& c)
{
    struct Bug
    {
        std::string name;
        std::string trap;
        uint32_t target;
    };
    const std::vector<Bug> bugs{
        {"bug_div", "integer divide by zero", 2},
        {"bug_null_indirect", "uninitialized element", 8},
        {"bug_oob", "out of bounds memory access", 7},
        {"bug_trunc", "integer overflow", 6},
        {"bug_callback_trap", "integer overflow", 6},
    };
    fx::TempDir dir;
    auto check_result = [&](const std::string& name, uint32_t target, driver::Oracle& oracle) {
        const auto input = fx::corpus_bytes(name);
        const auto in = wasm::parse_module(input);
        const auto r = driver::reduce_program(input, oracle, serial());
        c.expect(r.succeeded, name + " not reduced");
        c.expect(r.target == target, name + " kept the wrong function");
        c.expect(r.target_hash_output == wasm::canonical_body_hash(code_of(in, target)), name + " target body changed");
        c.expect(r.size_all < wasm::code_size(in), name + " did not shrink");
        const auto out = dir / (name + ".out.wasm");
        wasm::write_file(out, r.output);
        c.expect(oracle.check(out.string()).interesting, name + " output not interesting");
    };
    for (const auto& bug : bugs)
    {
        driver::Oracle oracle{script(fx::trap_oracle(dir / (bug.name + ".sh"), bug.trap))};
        check_result(bug.name, bug.target, oracle);
    }
    driver::OracleConfig diff;
    diff.mode = driver::OracleMode::differential;
    diff.buggy_cmd = fx::tool("rr-run") + " --simulate-bug rotl-wrap";
    diff.reference_cmd = fx::tool("rr-run");
    driver::Oracle oracle{diff};
    check_result("bug_engine_crash", 6, oracle);
    c.expect(oracle.signature() == driver::Divergence::crash, "engine crash not classified as crash");
}

void observation_equivalence(Check& c, bool reduce)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            const auto cand = fx::build_candidate(m, t, reduce);
            c.expect(fx::equivalent_observation(exec::observe_partition(cand.partition, "main"), fx::observe_candidate(cand)),
                where(name, t) + " observations differ");
        }
    }
}

void engine_log(Check& c)
{
    fx::TempDir dir;
    const auto input = fx::corpus_bytes("bug_div");
    driver::Oracle oracle{script(fx::trap_oracle(dir / "oracle.sh", "integer divide by zero"))};
    auto opts = serial();
    opts.engine_log = "wasm trap in function 2";
    const auto r = driver::reduce_program(input, oracle, opts);
    c.expect(r.attempts.size() == 1, "log-guided run made " + std::to_string(r.attempts.size()) + " attempts");
    c.expect(r.succeeded && r.target == 2u, "log-guided run did not keep function 2");

    const auto blind = driver::reduce_program(input, oracle, serial());
    c.expect(blind.sets.heuristic.empty(), "unexpected heuristic candidates");
    c.expect(blind.attempts.size() <= blind.sets.dynamic.size(), "more attempts than executed functions");
    c.expect(blind.succeeded, "run without a log failed");
}

void hash_fallback(Check& c)
{
    fx::TempDir dir;
    const auto input = fx::corpus_bytes("m0");
    const auto oracle_path = fx::write_script(
        dir / "same.sh", "cmp -s \"$1\" " + driver::shell_quote(fx::corpus_path("m0").string()));
    driver::Oracle oracle{script(oracle_path)};
    const auto r = driver::reduce_program(input, oracle, serial());
    c.expect(!r.succeeded, "reported success");
    c.expect(r.output == input, "output differs from input");
}

void hybrid(Check& c)
{
    fx::TempDir dir;
    for (const auto& [name, trap] : std::vector<std::pair<std::string, std::string>>{
             {"bug_div", "integer divide by zero"}, {"bug_oob", "out of bounds memory access"}})
    {
        driver::Oracle oracle{script(fx::trap_oracle(dir / (name + ".sh"), trap))};
        const auto input = fx::corpus_bytes(name);
        const auto plain = driver::reduce_program(input, oracle, serial());
        const auto both = driver::hybrid_reduce(
            input, oracle, driver::shell_quote(fx::tool("rr-strip")) + " {input} {output} {oracle}", serial());
        c.expect(both.size_all <= plain.size_all, name + " hybrid is larger");
        const auto out = dir / (name + ".out.wasm");
        wasm::write_file(out, both.output);
        c.expect(oracle.check(out.string()).interesting, name + " hybrid output not interesting");
    }
}

void trace_reduction(Check& c)
{
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            const auto raw = exec::run_partition_recording(split::split(m, wasm::FunctionIndex{t}), "main").trace;
            const auto once = trace::reduce_trace(raw);
            c.expect(trace::reduce_trace(once) == once, where(name, t) + " not idempotent");
            c.expect(trace::to_text(once).size() <= trace::to_text(raw).size(), where(name, t) + " grew");
        }
    }
    observation_equivalence(c, false);
}

void v8_validity(Check& c)
{
    fx::TempDir dir;
    std::vector<std::string> paths;
    for (const auto& name : fx::corpus_programs())
    {
        const auto m = fx::corpus(name);
        for (const auto t : fx::defined_functions(m))
        {
            const auto cand = fx::build_candidate(m, t);
            c.expect(cand.merged.module.imports.empty(), where(name, t) + " has imports");
            paths.push_back((dir / (name + "_" + std::to_string(t) + ".wasm")).string());
            wasm::write_file(paths.back(), wasm::encode_module(cand.merged.module));
        }
    }
    const auto verdicts = fx::node_validate(paths);
    c.expect(verdicts.has_value(), "node validator unavailable");
    if (verdicts)
        for (const auto& p : paths)
            c.expect(verdicts->count(p) && verdicts->at(p), p + " rejected");
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, Criterion>> criteria{
        {"split and naive merge preserve behavior", round_trip},
        {"running example replay", running_example},
        {"seeded bugs reduce with target preserved", seeded_bugs},
        {"candidate observationally equivalent", [](Check& c) { observation_equivalence(c, true); }},
        {"engine log selects the first candidate", engine_log},
        {"uninteresting candidates fall back to input", hash_fallback},
        {"hybrid never larger and still interesting", hybrid},
        {"trace reduction idempotent and sound", trace_reduction},
        {"candidates accepted by V8 without imports", v8_validity},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i)
    {
        Check check;
        std::string error;
        try
        {
            criteria[i].second(check);
        }
        catch (const std::exception& e)
        {
            error = e.what();
        }
        const bool ok = error.empty() && !check.failed();
        failed += ok ? 0 : 1;
        std::cout << "criterion " << (i + 1) << ": " << (ok ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
                  << check.checks() << " checks)\n";
        if (!error.empty())
            std::cout << "    exception: " << error << "\n";
        for (const auto& f : check.failures())
            std::cout << "    " << f << "\n";
    }
    return failed == 0 ? 0 : 1;
}
