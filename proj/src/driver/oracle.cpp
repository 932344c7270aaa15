// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/driver/oracle.hpp"
#include "rr/error.hpp"

namespace rr::driver
{
namespace
{
RunSummary summarize(ProcessResult&& p)
{
    // a shell reports a child killed by signal N as exit status 128 + N
    if (p.signal == 0 && p.exit_code > 128 && p.exit_code < 128 + 65)
        return {-1, p.exit_code - 128, p.timed_out, std::move(p.out), std::move(p.err), p.elapsed};
    return {p.exit_code, p.signal, p.timed_out, std::move(p.out), std::move(p.err), p.elapsed};
}

OracleVerdict run_once(const std::string& candidate, const OracleConfig& cfg, Divergence signature)
{
    const std::chrono::duration<double> timeout{cfg.timeout};
    OracleVerdict v;
    if (cfg.mode == OracleMode::script)
    {
        auto p = run_process({cfg.script, candidate}, timeout, cfg.env);
        if (!p.started)
            throw OracleCrashed{"oracle script could not be started: " + p.start_error};
        v.timed_out = p.timed_out;
        v.interesting = p.exited() && p.exit_code == 0;
        v.elapsed = p.elapsed;
        v.buggy = summarize(std::move(p));
        return v;
    }
    auto b = run_shell(cfg.buggy_cmd + " " + shell_quote(candidate), timeout, cfg.env);
    auto r = run_shell(cfg.reference_cmd + " " + shell_quote(candidate), timeout, cfg.env);
    v.timed_out = b.timed_out || r.timed_out;
    v.elapsed = b.elapsed + r.elapsed;
    v.buggy = summarize(std::move(b));
    v.reference = summarize(std::move(r));
    v.interesting = signature != Divergence::none && classify(v.buggy, *v.reference) == signature;
    return v;
}
}  // namespace

const char* to_string(Divergence d) noexcept
{
    switch (d)
    {
    case Divergence::none:
        return "none";
    case Divergence::crash:
        return "crash";
    case Divergence::exit_status:
        return "exit";
    case Divergence::output:
        return "stdout";
    }
    return "?";
}

std::optional<Divergence> parse_divergence(std::string_view s)
{
    for (const auto d : {Divergence::none, Divergence::crash, Divergence::exit_status, Divergence::output})
        if (s == to_string(d))
            return d;
    return std::nullopt;
}

Divergence classify(const RunSummary& buggy, const RunSummary& reference)
{
    if (reference.timed_out || reference.signal != 0 || buggy.timed_out)
        return Divergence::none;
    if (buggy.signal != 0)
        return Divergence::crash;
    if (buggy.exit_code != reference.exit_code)
        return Divergence::exit_status;
    if (buggy.out != reference.out)
        return Divergence::output;
    return Divergence::none;
}

OracleVerdict run_oracle(const std::string& candidate, const OracleConfig& cfg, Divergence signature)
{
    auto v = run_once(candidate, cfg, signature);
    for (int i = 0; i < cfg.retries && !v.interesting; ++i)
        v = run_once(candidate, cfg, signature);
    return v;
}

OracleVerdict Oracle::calibrate(const std::string& input)
{
    ++calls_;
    if (cfg_.mode == OracleMode::script)
        return run_oracle(input, cfg_);
    auto v = run_once(input, cfg_, Divergence::none);
    signature_ = classify(v.buggy, *v.reference);
    v.interesting = signature_ != Divergence::none;
    return v;
}

OracleVerdict Oracle::check(const std::string& candidate)
{
    ++calls_;
    return run_oracle(candidate, cfg_, signature_);
}

}  // namespace rr::driver
