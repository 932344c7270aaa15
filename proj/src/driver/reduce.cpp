// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/driver/reduce.hpp"
#include "rr/error.hpp"
#include "rr/exec/partition.hpp"
#include "rr/merge/merge.hpp"
#include "rr/replay/replay.hpp"
#include "rr/split/split.hpp"
#include "rr/trace/trace.hpp"
#include "rr/wasm/binary.hpp"
#include "rr/wasm/transform.hpp"
#include "rr/wasm/validate.hpp"
#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>

namespace rr::driver
{
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace
{
double seconds_since(Clock::time_point t)
{
    return std::chrono::duration<double>(Clock::now() - t).count();
}

void write_bytes(const fs::path& p, std::span<const uint8_t> data)
{
    std::ofstream f{p, std::ios::binary};
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f)
        throw IoError{"cannot write " + p.string()};
}

void write_text(const fs::path& p, std::string_view text)
{
    write_bytes(p, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

std::optional<wasm::bytes> read_bytes(const fs::path& p)
{
    std::ifstream f{p, std::ios::binary};
    if (!f)
        return std::nullopt;
    return wasm::bytes{std::istreambuf_iterator<char>{f}, {}};
}

class WorkDir
{
public:
    WorkDir(const std::string& requested, bool keep) : keep_{keep}
    {
        if (!requested.empty())
        {
            path_ = requested;
            fs::create_directories(path_);
            keep_ = true;
            return;
        }
        auto tmpl = (fs::temp_directory_path() / "rr-reduce-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr)
            throw IoError{"cannot create a temporary directory"};
        path_ = tmpl;
    }
    WorkDir(const WorkDir&) = delete;
    WorkDir& operator=(const WorkDir&) = delete;
    ~WorkDir()
    {
        std::error_code ec;
        if (!keep_)
            fs::remove_all(path_, ec);
    }

    const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
    bool keep_;
};

struct Input
{
    wasm::Module module;
    uint64_t size = 0;
};

Input load_input(const wasm::bytes& input)
{
    Input in;
    try
    {
        in.module = wasm::parse_module(input);
    }
    catch (const Error& e)
    {
        throw InputInvalid{std::string{"input does not parse: "} + e.what()};
    }
    const auto diags = wasm::validate_module(in.module);
    if (!diags.empty())
        throw InputInvalid{"input does not validate: " + diags.front()};
    in.size = wasm::code_size(in.module);
    return in;
}

struct CandidateOutcome
{
    Attempt attempt;
    wasm::bytes output;
    uint64_t size_target = 0;
    std::string hash;
};

CandidateOutcome try_candidate(
    const Input& in, uint32_t f, Oracle& oracle, const ReduceOptions& opts, const fs::path& dir)
{
    const auto start = Clock::now();
    CandidateOutcome c;
    auto& a = c.attempt;
    a.candidate = f;
    auto fail = [&](std::string reason) {
        a.reason = std::move(reason);
        a.seconds = seconds_since(start);
        return c;
    };
    try
    {
        fs::create_directories(dir);
        a.stage = "split";
        const auto p = split::split(in.module, wasm::FunctionIndex{f});
        if (opts.keep_temps)
        {
            write_bytes(dir / "target.wasm", wasm::encode_module(p.target_module));
            write_bytes(dir / "remaining.wasm", wasm::encode_module(p.remaining_module));
            write_text(dir / "manifest.json", split::manifest_json(p));
        }

        a.stage = "record";
        auto limits = opts.limits;
        limits.wall = std::min(limits.wall, std::chrono::duration<double>{opts.candidate_timeout});
        const auto rec = exec::run_partition_recording(p, opts.entry, limits);
        if (rec.outcome.status == exec::RunStatus::exhausted)
            return fail("recording exhausted its budget: " + rec.outcome.trap_kind);

        a.stage = "reduce";
        const auto reduced = trace::reduce_trace(rec.trace);
        if (opts.trace_dump)
        {
            write_text(dir / "trace.txt", trace::to_text(rec.trace));
            write_text(dir / "trace.reduced.txt", trace::to_text(reduced));
        }
        if (trace::count_entries(reduced) == 0)
            return fail("target never entered");

        a.stage = "synthesize";
        const auto q = replay::synthesize_replay(reduced, p.wiring, p.remaining_module);
        if (opts.keep_temps)
            write_bytes(dir / "replay.wasm", wasm::encode_module(q.module));

        a.stage = "merge";
        auto merged = merge::merge(p.target_module, q.module, p.wiring);
        wasm::IndexMap pruned;
        merged.module = wasm::remove_unreferenced_functions(merged.module, &pruned);
        merged.target_index = pruned.lookup(wasm::IndexSpace::func, merged.target_index);

        a.stage = "validate";
        if (const auto d = wasm::validate_module(merged.module); !d.empty())
            return fail("candidate does not validate: " + d.front());
        if (!merged.module.imports.empty())
            return fail("candidate has imports");
        a.size_all = wasm::code_size(merged.module);
        if (*a.size_all >= in.size)
            return fail("candidate is not smaller than the input");
        c.output = wasm::encode_module(merged.module);
        const auto candidate_path = dir / "candidate.wasm";
        write_bytes(candidate_path, c.output);

        a.stage = "oracle";
        const auto v = oracle.check(candidate_path.string());
        if (!v.interesting)
            return fail(v.timed_out ? "oracle timed out" : "not interesting");
        const auto& body = merged.module.functions.at(merged.target_index - merged.module.imported_count(wasm::ExternKind::func));
        c.hash = wasm::canonical_body_hash(body.code);
        c.size_target = wasm::function_body_size(merged.module, wasm::FunctionIndex{merged.target_index});
        a.stage = "done";
        a.success = true;
        a.seconds = seconds_since(start);
        return c;
    }
    catch (const OracleCrashed&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        return fail(e.what());
    }
}

void say(const ReduceOptions& opts, const std::string& msg)
{
    if (opts.log)
        opts.log(msg);
}

ReductionResult reduce_in(const wasm::bytes& input, const Input& in, Oracle& oracle, const ReduceOptions& opts,
    const fs::path& work)
{
    const auto start = Clock::now();
    ReductionResult r;
    r.output = input;
    r.input_size = in.size;
    r.size_all = in.size;
    r.work_dir = work.string();

    const auto input_path = work / "input.wasm";
    write_bytes(input_path, input);
    const auto v = oracle.calibrate(input_path.string());
    if (!v.interesting)
        throw InputNotInteresting{"the oracle does not consider the input interesting"};
    say(opts, "input is interesting" + (oracle.config().mode == OracleMode::differential
                                            ? std::string{" (divergence: "} + to_string(oracle.signature()) + ")"
                                            : std::string{}));

    auto& sets = r.sets;
    sets.heuristic = candidates::compute_heuristic_set(in.module, opts.engine_log ? *opts.engine_log : v.buggy.out + v.buggy.err);
    try
    {
        sets.dynamic = candidates::compute_dynamic_set(in.module, opts.entry, opts.limits);
    }
    catch (const Error& e)
    {
        r.warnings.push_back(std::string{"dynamic analysis failed: "} + e.what());
    }
    sets.all = candidates::compute_all_set(in.module);
    r.order = candidates::enumerate_candidates(sets);

    const size_t n = r.order.size();
    std::vector<std::optional<CandidateOutcome>> outcomes(n);
    std::mutex mu;
    size_t next = 0;
    size_t best = n;
    std::exception_ptr failure;

    auto worker = [&] {
        while (true)
        {
            size_t k;
            {
                std::lock_guard lock{mu};
                if (next >= n || failure)
                    return;
                k = next++;
                // A higher-priority candidate already succeeded.
                if (k > best)
                    return;
            }
            const uint32_t f = r.order[k];
            try
            {
                auto c = try_candidate(in, f, oracle, opts, work / ("cand_" + std::to_string(f)));
                say(opts, "candidate " + std::to_string(f) + ": " +
                              (c.attempt.success ? std::string{"interesting"} : c.attempt.stage + ": " + c.attempt.reason));
                std::lock_guard lock{mu};
                if (c.attempt.success && k < best)
                    best = k;
                outcomes[k] = std::move(c);
            }
            catch (...)
            {
                std::lock_guard lock{mu};
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };

    unsigned jobs = opts.jobs != 0 ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<size_t>(jobs, std::max<size_t>(n, 1)));
    if (jobs <= 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < jobs; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    for (auto& o : outcomes)
        if (o)
            r.attempts.push_back(o->attempt);
    if (best < n)
    {
        auto& c = *outcomes[best];
        const uint32_t f = r.order[best];
        r.succeeded = true;
        r.target = f;
        r.output = std::move(c.output);
        r.size_all = *c.attempt.size_all;
        r.size_target = c.size_target;
        r.target_hash_output = c.hash;
        const auto& body = in.module.functions.at(f - in.module.imported_count(wasm::ExternKind::func));
        r.target_hash_input = wasm::canonical_body_hash(body.code);
    }
    r.oracle_calls = oracle.calls();
    r.elapsed = seconds_since(start);
    return r;
}

fs::path oracle_executable(const Oracle& oracle, const ReduceOptions& opts, const fs::path& work)
{
    const auto& cfg = oracle.config();
    if (cfg.mode == OracleMode::script)
        return fs::absolute(cfg.script);
    if (opts.self_exe.empty())
        throw Error{"no rr-reduce executable to run the differential oracle"};
    const auto path = work / "oracle.sh";
    std::string s = "#!/bin/sh\nexec " + shell_quote(opts.self_exe) + " --oracle-check \"$1\" --buggy-cmd " +
                    shell_quote(cfg.buggy_cmd) + " --ref-cmd " + shell_quote(cfg.reference_cmd) + " --divergence " +
                    to_string(oracle.signature()) + " --oracle-timeout " + std::to_string(cfg.timeout) + "\n";
    write_text(path, s);
    fs::permissions(path, fs::perms::owner_all | fs::perms::group_read | fs::perms::group_exec,
        fs::perm_options::replace);
    return path;
}

std::string substitute(std::string text, const std::string& key, const std::string& value)
{
    for (size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
        text.replace(pos, key.size(), value);
    return text;
}

}  // namespace

ReductionResult reduce_program(const wasm::bytes& input, Oracle& oracle, const ReduceOptions& opts)
{
    const auto in = load_input(input);
    WorkDir work{opts.work_dir, opts.keep_temps};
    return reduce_in(input, in, oracle, opts, work.path());
}

ReductionResult hybrid_reduce(
    const wasm::bytes& input, Oracle& oracle, const std::string& external_template, const ReduceOptions& opts)
{
    const auto start = Clock::now();
    const auto in = load_input(input);
    WorkDir work{opts.work_dir, opts.keep_temps};
    auto r = reduce_in(input, in, oracle, opts, work.path());
    r.hybrid = true;

    auto warn = [&](std::string msg) {
        say(opts, "warning: " + msg);
        r.warnings.push_back(std::move(msg));
    };
    try
    {
        const auto dir = work.path() / "external";
        fs::create_directories(dir);
        const auto ext_in = dir / "input.wasm";
        const auto ext_out = dir / "output.wasm";
        write_bytes(ext_in, r.output);
        const auto oracle_path = oracle_executable(oracle, opts, work.path());
        std::string cmd = external_template;
        cmd = substitute(cmd, "{input}", shell_quote(ext_in.string()));
        cmd = substitute(cmd, "{output}", shell_quote(ext_out.string()));
        cmd = substitute(cmd, "{oracle}", shell_quote(oracle_path.string()));
        const auto p = run_shell(cmd, std::chrono::duration<double>{opts.candidate_timeout}, oracle.config().env);
        if (!p.exited() || p.exit_code != 0)
            warn("external reducer failed" + std::string{p.timed_out ? " (timeout)" : ""} + ": " + p.err);
        else if (const auto out = read_bytes(ext_out); !out)
            warn("external reducer produced no output");
        else
        {
            const auto m = wasm::parse_module(*out);
            if (const auto d = wasm::validate_module(m); !d.empty())
                warn("external output does not validate: " + d.front());
            else if (const auto size = wasm::code_size(m); size >= r.size_all)
                say(opts, "external output is not smaller");
            else if (!oracle.check(ext_out.string()).interesting)
                warn("external output is not interesting");
            else
            {
                r.output = *out;
                r.size_all = size;
                r.succeeded = true;
                r.external_accepted = true;
                r.size_target.reset();
                if (!r.target_hash_output.empty())
                    for (uint32_t i = 0; i < m.functions.size(); ++i)
                        if (wasm::canonical_body_hash(m.functions[i].code) == r.target_hash_output)
                        {
                            r.size_target = wasm::function_body_size(
                                m, wasm::FunctionIndex{i + m.imported_count(wasm::ExternKind::func)});
                            break;
                        }
            }
        }
    }
    catch (const std::exception& e)
    {
        warn(std::string{"external stage: "} + e.what());
    }
    r.oracle_calls = oracle.calls();
    r.elapsed = seconds_since(start);
    return r;
}

std::string summary_line(const ReductionResult& r)
{
    char buf[256];
    const double all = r.input_size ? 100.0 * static_cast<double>(r.size_all) / static_cast<double>(r.input_size) : 100.0;
    if (!r.succeeded)
    {
        std::snprintf(buf, sizeof buf, "no reduction: returned the input (%llu bytes of code) after %zu attempts, %.2f s",
            static_cast<unsigned long long>(r.input_size), r.attempts.size(), r.elapsed);
        return buf;
    }
    std::string target = r.target ? "function " + std::to_string(*r.target) : std::string{"unknown"};
    std::snprintf(buf, sizeof buf, "reduced %llu -> %llu bytes of code (%.2f%%), target %s, %zu attempts, %.2f s",
        static_cast<unsigned long long>(r.input_size), static_cast<unsigned long long>(r.size_all), all,
        target.c_str(), r.attempts.size(), r.elapsed);
    return buf;
}

std::string report_json(const ReductionResult& r)
{
    using nlohmann::json;
    const auto pct = [&](uint64_t v) {
        return r.input_size ? 100.0 * static_cast<double>(v) / static_cast<double>(r.input_size) : 100.0;
    };
    json j;
    j["succeeded"] = r.succeeded;
    j["input_size"] = r.input_size;
    j["size_all"] = r.size_all;
    j["size_target"] = r.size_target ? json(*r.size_target) : json(nullptr);
    j["all_percent"] = r.succeeded ? pct(r.size_all) : 100.0;
    j["target_percent"] = r.succeeded && r.size_target ? pct(*r.size_target) : 100.0;
    j["target"] = r.target ? json(*r.target) : json(nullptr);
    if (!r.target_hash_output.empty())
        j["target_body_hash"] = {{"input", r.target_hash_input}, {"output", r.target_hash_output}};
    j["elapsed_seconds"] = r.elapsed;
    j["oracle_calls"] = r.oracle_calls;
    j["candidate_sets"] = {{"heuristic", r.sets.heuristic}, {"dynamic", r.sets.dynamic}, {"all", r.sets.all}};
    j["candidate_order"] = r.order;
    json attempts = json::array();
    for (const auto& a : r.attempts)
        attempts.push_back({{"candidate", a.candidate}, {"stage", a.stage}, {"reason", a.reason},
            {"seconds", a.seconds}, {"success", a.success},
            {"size_all", a.size_all ? json(*a.size_all) : json(nullptr)}});
    j["attempts"] = attempts;
    if (r.hybrid)
        j["hybrid"] = {{"external_accepted", r.external_accepted}};
    j["warnings"] = r.warnings;
    j["summary"] = summary_line(r);
    return j.dump(2);
}

void write_report(const ReductionResult& r, const std::string& path)
{
    std::ofstream f{path};
    f << report_json(r) << "\n";
    if (!f)
        throw IoError{"cannot write report " + path};
}

}  // namespace rr::driver
