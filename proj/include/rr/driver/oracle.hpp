// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/driver/subprocess.hpp"
#include <atomic>
#include <optional>
#include <string>

namespace rr::driver
{
enum class OracleMode
{
    script,
    differential,
};

struct OracleConfig
{
    OracleMode mode = OracleMode::script;
    std::string script;  ///< executable run as `script <candidate>`
    std::string buggy_cmd;      ///< shell command; the candidate path is appended
    std::string reference_cmd;  ///< shell command; the candidate path is appended
    double timeout = 60;
    EnvVars env;
    int retries = 0;
};

/// How the buggy engine's run differs from the reference run, strongest first.
enum class Divergence
{
    none,
    crash,        ///< buggy engine killed by a signal
    exit_status,  ///< different exit codes
    output,       ///< same exit code, different stdout
};

const char* to_string(Divergence d) noexcept;
std::optional<Divergence> parse_divergence(std::string_view s);

struct RunSummary
{
    int exit_code = -1;
    int signal = 0;
    bool timed_out = false;
    std::string out;
    std::string err;
    double elapsed = 0;
};

struct OracleVerdict
{
    bool interesting = false;
    bool timed_out = false;
    RunSummary buggy;  ///< the script run in script mode
    std::optional<RunSummary> reference;
    double elapsed = 0;
};

/// Classification of one pair of runs; `none` unless the reference run terminated by itself.
Divergence classify(const RunSummary& buggy, const RunSummary& reference);

/// Runs the oracle once. Differential mode needs the divergence recorded on the input.
/// Throws OracleCrashed if the script cannot be executed.
OracleVerdict run_oracle(const std::string& candidate, const OracleConfig& cfg, Divergence signature = Divergence::none);

/// Oracle with the input's divergence signature and a call counter. Thread-safe after calibrate.
class Oracle
{
public:
    explicit Oracle(OracleConfig cfg) : cfg_{std::move(cfg)} {}

    /// Checks the input; in differential mode also records its divergence class.
    OracleVerdict calibrate(const std::string& input);
    OracleVerdict check(const std::string& candidate);

    const OracleConfig& config() const noexcept { return cfg_; }
    Divergence signature() const noexcept { return signature_; }
    void set_signature(Divergence d) noexcept { signature_ = d; }
    size_t calls() const noexcept { return calls_.load(); }

private:
    OracleConfig cfg_;
    Divergence signature_ = Divergence::none;
    std::atomic<size_t> calls_{0};
};

}  // namespace rr::driver
