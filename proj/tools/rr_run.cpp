// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

// Stand-alone engine used by oracle scripts: runs a module's entry export and reports
// stdout, traps and the exit status. `--simulate-bug` enables defects that mimic engine bugs.

#include "rr/error.hpp"
#include "rr/exec/harness.hpp"
#include "rr/wasm/binary.hpp"
#include <CLI11.hpp>
#include <csignal>
#include <cstdio>
#include <iostream>

namespace
{
using rr::wasm::Op;

/// A fault fires when a defined function's body contains `first` immediately followed by `second`.
struct SimulatedBug
{
    const char* name;
    Op first;
    Op second;
};

constexpr SimulatedBug simulated_bugs[] = {
    {"rotl-wrap", Op::i64_rotl, Op::i32_wrap_i64},
    {"popcnt-eqz", Op::i32_popcnt, Op::i32_eqz},
    {"nearest-trunc", Op::f64_nearest, Op::i64_trunc_sat_f64_s},
};

void check_simulated_bug(const rr::wasm::Module& m, const SimulatedBug& bug)
{
    const auto imported = m.imported_count(rr::wasm::ExternKind::func);
    for (size_t f = 0; f < m.functions.size(); ++f)
    {
        const auto body = rr::wasm::decode_body(m.functions[f].code);
        for (size_t i = 0; i + 1 < body.instrs.size(); ++i)
        {
            if (body.instrs[i].op == bug.first && body.instrs[i + 1].op == bug.second)
            {
                std::cerr << "internal compiler error (" << bug.name << ") while compiling function #"
                          << imported + f << "\n";
                std::fflush(stderr);
                std::signal(SIGABRT, SIG_DFL);
                std::abort();
            }
        }
    }
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Run a WebAssembly module's entry function"};
    std::string input;
    std::string entry = "main";
    uint64_t fuel = rr::exec::ExecLimits{}.fuel;
    std::string bug_name;
    app.add_option("input", input, "module to run")->required();
    app.add_option("--entry", entry, "exported function to invoke");
    app.add_option("--fuel", fuel, "instruction budget");
    app.add_option("--simulate-bug", bug_name, "enable a simulated engine defect")
        ->check(CLI::IsMember({"rotl-wrap", "popcnt-eqz", "nearest-trunc"}));
    CLI11_PARSE(app, argc, argv);

    try
    {
        const auto module = rr::wasm::parse_module(rr::wasm::read_file(input));
        for (const auto& bug : simulated_bugs)
            if (bug_name == bug.name)
                check_simulated_bug(module, bug);

        rr::exec::ExecLimits limits;
        limits.fuel = fuel;
        const auto outcome = rr::exec::run_module(module, entry, limits);
        std::cout << outcome.stdout_data << std::flush;
        switch (outcome.status)
        {
        case rr::exec::RunStatus::exited:
            return outcome.exit_code;
        case rr::exec::RunStatus::trapped:
            std::cerr << outcome.message << "\n";
            return 1;
        case rr::exec::RunStatus::exhausted:
            std::cerr << outcome.message << "\n";
            return 2;
        }
    }
    catch (const rr::Error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
