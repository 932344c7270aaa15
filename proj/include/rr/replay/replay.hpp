// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/split/split.hpp"
#include "rr/trace/trace.hpp"
#include "rr/wasm/module.hpp"
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rr::replay
{
enum class Role
{
    replayed,    ///< reproduces recorded interactions with the target
    emptied,     ///< body reduced to the minimum its type allows
    trampoline,  ///< forwards to the target
    driver,      ///< exported entry that starts the replay
};

const char* to_string(Role r) noexcept;

struct ReplayFunction
{
    uint32_t index = 0;  ///< function index in the replay module
    std::optional<uint32_t> input_function;
    Role role = Role::replayed;
    std::string export_name;  ///< empty if not exported
};

struct ReplayModule
{
    wasm::Module module;
    /// Export name -> role, for every exported function.
    std::map<std::string, Role> provenance;
    std::vector<ReplayFunction> functions;

    /// The function standing in for input function `f` in the given role, if any.
    const ReplayFunction* find(uint32_t f, Role role) const;
};

/// Builds the module that stands in for the remaining side: per out-call target a function
/// returning the recorded results in order, per outside caller of the target a function
/// repeating its recorded entries, and a driver exported under the trace's entry name.
/// Shared memory, globals and tables are redeclared with the state at the first entry.
/// Throws TypeUnavailable if a recorded value does not fit the boundary signature.
ReplayModule synthesize_replay(const trace::Trace& t, const split::BoundaryMap& w, const wasm::Module& remaining);

}  // namespace rr::replay
