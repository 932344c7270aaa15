// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rr::driver
{
using EnvVars = std::vector<std::pair<std::string, std::string>>;

struct ProcessResult
{
    bool started = false;  ///< false if the program could not be executed
    std::string start_error;
    int exit_code = -1;    ///< valid when exited normally
    int signal = 0;        ///< terminating signal, 0 if none
    bool timed_out = false;
    std::string out;
    std::string err;
    double elapsed = 0;

    bool exited() const noexcept { return started && !timed_out && signal == 0; }
};

/// Runs argv[0] (looked up in PATH) with the extra environment variables, capturing both
/// output streams. The whole process group is killed when `timeout` expires.
ProcessResult run_process(
    const std::vector<std::string>& argv, std::chrono::duration<double> timeout, const EnvVars& env = {});

/// Runs `command` through /bin/sh -c.
ProcessResult run_shell(const std::string& command, std::chrono::duration<double> timeout, const EnvVars& env = {});

/// Quotes `s` for /bin/sh.
std::string shell_quote(std::string_view s);

}  // namespace rr::driver
