// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/driver/reduce.hpp"
#include "rr/error.hpp"
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{
namespace fs = std::filesystem;
using namespace rr::driver;

enum ExitCode
{
    exit_success = 0,
    exit_not_interesting = 2,
    exit_invalid = 3,
    exit_internal = 4,
};

std::optional<std::string> read_text(const std::string& path)
{
    std::ifstream f{path, std::ios::binary};
    if (!f)
        return std::nullopt;
    return std::string{std::istreambuf_iterator<char>{f}, {}};
}

std::string self_path(const char* argv0)
{
    std::error_code ec;
    auto p = fs::read_symlink("/proc/self/exe", ec);
    return ec ? fs::absolute(argv0).string() : p.string();
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rr-reduce: reduce a WebAssembly program to one target function plus a replay of its interactions"};
    std::string input;
    std::string output;
    std::string oracle_script;
    std::string buggy_cmd;
    std::string ref_cmd;
    std::string hybrid;
    std::string engine_log;
    std::string report;
    std::string entry = "main";
    std::string work_dir;
    unsigned jobs = 0;
    double candidate_timeout = 600;
    double oracle_timeout = 60;
    int oracle_retries = 0;
    uint64_t fuel = 1'000'000'000;
    bool keep_temps = false;
    bool trace_dump = false;
    bool quiet = false;
    std::string oracle_check;
    std::string divergence = "crash";

    app.add_option("input", input, "input .wasm file");
    auto* opt_script = app.add_option("--oracle", oracle_script, "oracle script; exit 0 means interesting");
    auto* opt_buggy = app.add_option("--buggy-cmd", buggy_cmd, "engine command with the bug (differential mode)");
    auto* opt_ref = app.add_option("--ref-cmd", ref_cmd, "reference engine command (differential mode)");
    opt_script->excludes(opt_buggy)->excludes(opt_ref);
    opt_buggy->needs(opt_ref);
    opt_ref->needs(opt_buggy);
    app.add_option("-o,--output", output, "reduced program (default: <input>.reduced.wasm)");
    app.add_option("--hybrid", hybrid, "external reducer command with {input} {output} {oracle} placeholders");
    app.add_option("--engine-log", engine_log, "engine output searched for function indices")->check(CLI::ExistingFile);
    app.add_option("--jobs", jobs, "parallel workers (default: available cores)");
    app.add_option("--candidate-timeout", candidate_timeout, "seconds per candidate")->capture_default_str();
    app.add_option("--oracle-timeout", oracle_timeout, "seconds per oracle run")->capture_default_str();
    app.add_option("--oracle-retries", oracle_retries, "re-run a negative oracle this many times")->capture_default_str();
    app.add_option("--fuel", fuel, "instruction budget per run")->capture_default_str();
    app.add_option("--entry", entry, "exported entry function")->capture_default_str();
    app.add_option("--work-dir", work_dir, "directory for intermediate files (kept)");
    app.add_flag("--keep-temps", keep_temps, "keep intermediate files");
    app.add_option("--report", report, "write a JSON report");
    app.add_flag("--trace-dump", trace_dump, "write raw and reduced traces next to each candidate (keeps temps)");
    app.add_flag("-q,--quiet", quiet, "no progress output");
    app.add_option("--oracle-check", oracle_check, "check one file with the differential oracle and exit")
        ->group("");
    app.add_option("--divergence", divergence, "divergence class for --oracle-check")->group("");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return exit_internal;
    }

    OracleConfig cfg;
    cfg.timeout = oracle_timeout;
    cfg.retries = oracle_retries;
    if (!oracle_script.empty())
    {
        cfg.mode = OracleMode::script;
        cfg.script = oracle_script;
    }
    else if (!buggy_cmd.empty())
    {
        cfg.mode = OracleMode::differential;
        cfg.buggy_cmd = buggy_cmd;
        cfg.reference_cmd = ref_cmd;
    }
    else
    {
        std::cerr << "rr-reduce: either --oracle or --buggy-cmd/--ref-cmd is required\n";
        return exit_internal;
    }

    if (!oracle_check.empty())
    {
        const auto d = parse_divergence(divergence);
        if (!d)
        {
            std::cerr << "rr-reduce: unknown divergence class '" << divergence << "'\n";
            return exit_internal;
        }
        try
        {
            return run_oracle(oracle_check, cfg, *d).interesting ? 0 : 1;
        }
        catch (const std::exception& e)
        {
            std::cerr << "rr-reduce: " << e.what() << "\n";
            return exit_internal;
        }
    }

    if (input.empty())
    {
        std::cerr << "rr-reduce: missing input file\n";
        return exit_internal;
    }
    if (output.empty())
        output = fs::path{input}.replace_extension(".reduced.wasm").string();

    ReduceOptions opts;
    opts.jobs = jobs;
    opts.candidate_timeout = candidate_timeout;
    opts.limits.fuel = fuel;
    opts.entry = entry;
    opts.keep_temps = keep_temps || trace_dump;
    opts.trace_dump = trace_dump;
    opts.work_dir = work_dir;
    opts.self_exe = self_path(argv[0]);
    if (!quiet)
        opts.log = [](const std::string& msg) { std::cerr << "rr-reduce: " << msg << "\n"; };
    if (!engine_log.empty())
        opts.engine_log = read_text(engine_log);

    try
    {
        const auto text = read_text(input);
        if (!text)
        {
            std::cerr << "rr-reduce: cannot read " << input << "\n";
            return exit_invalid;
        }
        const rr::wasm::bytes bytes{text->begin(), text->end()};
        Oracle oracle{cfg};
        const auto result = hybrid.empty() ? reduce_program(bytes, oracle, opts) : hybrid_reduce(bytes, oracle, hybrid, opts);

        std::ofstream out{output, std::ios::binary};
        out.write(reinterpret_cast<const char*>(result.output.data()), static_cast<std::streamsize>(result.output.size()));
        if (!out)
        {
            std::cerr << "rr-reduce: cannot write " << output << "\n";
            return exit_internal;
        }
        if (!report.empty())
            write_report(result, report);
        std::cout << summary_line(result) << "\n";
        if (opts.keep_temps)
            std::cerr << "rr-reduce: intermediate files in " << result.work_dir << "\n";
        return exit_success;
    }
    catch (const rr::InputNotInteresting& e)
    {
        std::cerr << "rr-reduce: " << e.what() << "\n";
        return exit_not_interesting;
    }
    catch (const rr::InputInvalid& e)
    {
        std::cerr << "rr-reduce: " << e.what() << "\n";
        return exit_invalid;
    }
    catch (const std::exception& e)
    {
        std::cerr << "rr-reduce: internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
