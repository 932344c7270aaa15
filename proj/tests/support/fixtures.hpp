// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rr/driver/subprocess.hpp"
#include "rr/exec/partition.hpp"
#include "rr/merge/merge.hpp"
#include "rr/replay/replay.hpp"
#include "rr/split/split.hpp"
#include "rr/trace/trace.hpp"
#include "rr/wasm/binary.hpp"
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rr::fixtures
{
namespace fs = std::filesystem;

inline fs::path corpus_dir() { return RR_TEST_CORPUS_DIR; }
inline fs::path modules_dir() { return RR_TEST_MODULES_DIR; }
inline fs::path oracles_dir() { return RR_TEST_ORACLES_DIR; }
inline fs::path tools_dir() { return RR_TOOLS_DIR; }
inline std::string tool(const std::string& name) { return (tools_dir() / name).string(); }

inline std::vector<std::string> corpus_programs()
{
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator{corpus_dir()})
        if (e.path().extension() == ".wasm")
            names.push_back(e.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

inline fs::path corpus_path(const std::string& name) { return corpus_dir() / (name + ".wasm"); }
inline fs::path module_path(const std::string& name) { return modules_dir() / (name + ".wasm"); }
inline wasm::bytes corpus_bytes(const std::string& name) { return wasm::read_file(corpus_path(name)); }
inline wasm::Module corpus(const std::string& name) { return wasm::parse_module(corpus_bytes(name)); }
inline wasm::Module fixture(const std::string& name) { return wasm::parse_module(wasm::read_file(module_path(name))); }

inline std::vector<uint32_t> defined_functions(const wasm::Module& m)
{
    std::vector<uint32_t> out;
    for (uint32_t i = m.imported_count(wasm::ExternKind::func); i < m.num_functions(); ++i)
        out.push_back(i);
    return out;
}

class TempDir
{
public:
    TempDir()
    {
        std::string tmpl = (fs::temp_directory_path() / "rr-test-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr)
            throw std::runtime_error{"mkdtemp failed"};
        path_ = tmpl;
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string write_script(const fs::path& path, const std::string& body)
{
    {
        std::ofstream f{path};
        f << "#!/bin/sh\n" << body << "\n";
    }
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add);
    return path.string();
}

/// Oracle script: rr-run exits 1 and its stderr contains `trap`.
inline std::string trap_oracle(const fs::path& path, const std::string& trap)
{
    return write_script(path, "out=$(" + driver::shell_quote(tool("rr-run")) + " \"$1\" 2>&1)\n"
                              "[ $? -eq 1 ] && printf '%s' \"$out\" | grep -qF " + driver::shell_quote(trap));
}

inline bool have_program(const std::string& name)
{
    const auto r = driver::run_shell("command -v " + name, std::chrono::seconds{10});
    return r.exited() && r.exit_code == 0;
}

/// V8's verdict on each file, or nullopt when node is unavailable.
inline std::optional<std::map<std::string, bool>> node_validate(const std::vector<std::string>& paths)
{
    if (!have_program("node"))
        return std::nullopt;
    std::vector<std::string> argv{"node", (oracles_dir() / "validate.js").string()};
    argv.insert(argv.end(), paths.begin(), paths.end());
    const auto r = driver::run_process(argv, std::chrono::seconds{120});
    if (!r.exited() || r.exit_code != 0)
        return std::nullopt;
    std::map<std::string, bool> out;
    std::istringstream lines{r.out};
    std::string verdict;
    std::string path;
    while (lines >> verdict >> path)
        out[path] = verdict == "valid";
    return out;
}

/// Per-function body sizes from the independent dump script, or nullopt without python3.
inline std::optional<std::map<std::string, uint64_t>> python_code_sizes(const fs::path& wasm_file)
{
    if (!have_program("python3"))
        return std::nullopt;
    const auto r = driver::run_process(
        {"python3", (oracles_dir() / "code_size.py").string(), wasm_file.string()}, std::chrono::seconds{60});
    if (!r.exited() || r.exit_code != 0)
        return std::nullopt;
    std::map<std::string, uint64_t> out;
    std::istringstream lines{r.out};
    std::string key;
    uint64_t value = 0;
    while (lines >> key >> value)
        out[key] = value;
    return out;
}

/// Every step from the input program to a merged replay candidate for target `t`.
struct Candidate
{
    split::PartitionedProgram partition;
    exec::RecordedRun recorded;
    trace::Trace trace;  ///< the trace the replay was built from
    replay::ReplayModule replay;
    merge::MergedProgram merged;
};

inline Candidate build_candidate(const wasm::Module& m, uint32_t t, bool reduce = true, const std::string& entry = "main")
{
    Candidate c;
    c.partition = split::split(m, wasm::FunctionIndex{t});
    c.recorded = exec::run_partition_recording(c.partition, entry);
    c.trace = reduce ? trace::reduce_trace(c.recorded.trace) : c.recorded.trace;
    c.replay = replay::synthesize_replay(c.trace, c.partition.wiring, c.partition.remaining_module);
    c.merged = merge::merge(c.partition.target_module, c.replay.module, c.partition.wiring);
    return c;
}

/// Boundary log of a merged candidate, comparable with observe_partition of its partition.
inline exec::BoundaryLog observe_candidate(const Candidate& c, const std::string& entry = "main")
{
    return exec::observe_module(
        c.merged.module, c.merged.target_index, c.merged.origin, c.partition.wiring.input_globals, entry);
}

/// True when the run stopped while the target was executing.
inline bool ends_in_target(const exec::BoundaryLog& log)
{
    if (log.steps.empty())
        return false;
    const auto k = log.steps.back().kind;
    return k == exec::BoundaryStep::entry || k == exec::BoundaryStep::outcall_return;
}

/// Equal boundary steps, and the same trap when the reference run ended inside the target.
/// Output and traps of code outside the target are not part of the candidate.
inline bool equivalent_observation(const exec::BoundaryLog& reference, const exec::BoundaryLog& candidate)
{
    if (reference.steps != candidate.steps)
        return false;
    if (reference.outcome.status == exec::RunStatus::trapped && ends_in_target(reference))
        return candidate.outcome.status == exec::RunStatus::trapped &&
               candidate.outcome.trap_kind == reference.outcome.trap_kind;
    return true;
}

}  // namespace rr::fixtures
