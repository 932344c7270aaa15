// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/exec/store.hpp"
#include "rr/wasm/module.hpp"
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rr::exec
{
enum class RunStatus
{
    exited,
    trapped,
    exhausted,
};

const char* to_string(RunStatus s) noexcept;

struct RunOutcome
{
    RunStatus status = RunStatus::exited;
    int32_t exit_code = 0;
    std::string trap_kind;  ///< trap kind or exhaustion reason
    std::string message;    ///< human-readable diagnostic including the backtrace
    std::string stdout_data;
    std::string stderr_data;
    double duration = 0;
    uint64_t fuel_used = 0;
    std::vector<uint32_t> coverage;  ///< arguments of rr.cov calls, in call order

    /// Same observable behaviour: status, exit code, trap kind and output streams.
    bool same_behavior(const RunOutcome& o) const noexcept
    {
        return status == o.status && exit_code == o.exit_code && trap_kind == o.trap_kind &&
               stdout_data == o.stdout_data && stderr_data == o.stderr_data;
    }
};

/// Host import surface offered to programs:
///   host.putc(i32)        writes one byte to stdout
///   host.print_i32(i32)   writes the decimal value and a newline
///   host.exit(i32)        terminates the program with the given status
///   rr.cov(i32)           logs a coverage event
class HostEnvironment
{
public:
    explicit HostEnvironment(Store& store) : store_{store} {}

    /// Resolves a function import of `m` against the surface above, or nullopt.
    std::optional<Extern> resolve(const wasm::Import& imp, const wasm::Module& m);

    std::string& out() noexcept { return out_; }
    std::vector<uint32_t>& coverage() noexcept { return coverage_; }

    /// Address of the host function for `module.name`, creating it on first use.
    std::optional<Addr> function(std::string_view module, std::string_view name, const wasm::FuncType& type);

private:
    Store& store_;
    std::string out_;
    std::vector<uint32_t> coverage_;
    std::vector<std::pair<std::string, Addr>> cache_;
};

/// Runs `body` (which performs instantiations and invocations on `store`) and converts
/// traps, exits, and resource exhaustion into a RunOutcome. Output is taken from `env`.
template <typename F>
RunOutcome run_guarded(Store& store, HostEnvironment& env, F&& body);

/// Instantiates the module with the host environment, runs its start function and then the
/// exported function `entry` with zero arguments.
RunOutcome run_module(const wasm::Module& m, std::string_view entry, const ExecLimits& limits = {});
RunOutcome run_module(std::span<const uint8_t> bytes, std::string_view entry, const ExecLimits& limits = {});

/// Zero-valued arguments for a function type.
std::vector<Value> default_arguments(const wasm::FuncType& type);

/// Formats a trap with its backtrace, e.g. "trap: unreachable\n  at func[3]".
std::string describe_trap(const Trap& t);

namespace detail
{
RunOutcome finish(Store& store, HostEnvironment& env, std::chrono::steady_clock::time_point start);
}

template <typename F>
RunOutcome run_guarded(Store& store, HostEnvironment& env, F&& body)
{
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    try
    {
        body();
    }
    catch (const ProcExit& e)
    {
        out.exit_code = e.code;
    }
    catch (const Trap& t)
    {
        out.status = RunStatus::trapped;
        out.trap_kind = t.kind();
        out.message = describe_trap(t);
    }
    catch (const ResourceExhausted& e)
    {
        out.status = RunStatus::exhausted;
        out.trap_kind = e.what();
        out.message = std::string{"resource exhausted: "} + e.what();
    }
    auto rest = detail::finish(store, env, start);
    out.stdout_data = std::move(rest.stdout_data);
    out.coverage = std::move(rest.coverage);
    out.duration = rest.duration;
    out.fuel_used = rest.fuel_used;
    return out;
}

}  // namespace rr::exec
