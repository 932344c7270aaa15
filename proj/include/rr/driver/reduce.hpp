// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/candidates/candidates.hpp"
#include "rr/driver/oracle.hpp"
#include "rr/exec/store.hpp"
#include "rr/wasm/module.hpp"
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rr::driver
{
struct ReduceOptions
{
    unsigned jobs = 0;  ///< 0: available cores
    double candidate_timeout = 600;
    exec::ExecLimits limits;
    /// Text searched for function indices; defaults to the oracle's output on the input.
    std::optional<std::string> engine_log;
    std::string entry = "main";
    bool keep_temps = false;
    bool trace_dump = false;
    std::string work_dir;  ///< empty: a fresh directory under the system temp dir
    /// Path of the rr-reduce executable; needed to hand a differential oracle to an external reducer.
    std::string self_exe;
    std::function<void(const std::string&)> log;
};

struct Attempt
{
    uint32_t candidate = 0;
    std::string stage;  ///< last stage reached
    std::string reason;
    double seconds = 0;
    bool success = false;
    std::optional<uint64_t> size_all;
};

struct ReductionResult
{
    wasm::bytes output;
    bool succeeded = false;
    std::optional<uint32_t> target;  ///< input index of the preserved function
    uint64_t input_size = 0;
    uint64_t size_all = 0;
    std::optional<uint64_t> size_target;
    /// Canonical body hash of the target in the input and in the output.
    std::string target_hash_input;
    std::string target_hash_output;
    double elapsed = 0;
    candidates::CandidateSets sets;
    std::vector<uint32_t> order;
    std::vector<Attempt> attempts;
    size_t oracle_calls = 0;
    bool hybrid = false;
    bool external_accepted = false;
    std::vector<std::string> warnings;
    std::string work_dir;
};

/// Tries candidate targets in priority order (in parallel) and keeps the interesting,
/// strictly smaller candidate whose target comes first. Falls back to the input.
/// Throws InputInvalid, InputNotInteresting or OracleCrashed.
ReductionResult reduce_program(const wasm::bytes& input, Oracle& oracle, const ReduceOptions& opts = {});

/// reduce_program followed by an external reducer run as a shell command built from
/// `external_template` ({input}, {output}, {oracle} are replaced by quoted paths). The
/// external output is accepted only if it re-passes the oracle and is strictly smaller.
ReductionResult hybrid_reduce(
    const wasm::bytes& input, Oracle& oracle, const std::string& external_template, const ReduceOptions& opts = {});

/// One-line human-readable summary.
std::string summary_line(const ReductionResult& r);

/// JSON report with sizes, percentages, timing and the attempt log. Throws IoError.
void write_report(const ReductionResult& r, const std::string& path);
std::string report_json(const ReductionResult& r);

}  // namespace rr::driver
