// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/exec/harness.hpp"
#include "rr/split/split.hpp"
#include "rr/trace/trace.hpp"
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace rr::exec
{
/// Links the two halves in one store (the remaining side's target import forwards to the
/// target side's export), runs the start export if any, then `entry` with zero arguments.
RunOutcome run_partition(const split::PartitionedProgram& p, std::string_view entry, const ExecLimits& limits = {});

struct RecordedRun
{
    trace::Trace trace;  ///< unreduced
    RunOutcome outcome;
};

/// Same as run_partition while recording every boundary crossing and the state the target
/// observes at each of them.
RecordedRun run_partition_recording(
    const split::PartitionedProgram& p, std::string_view entry, const ExecLimits& limits = {});

/// One step of the interaction between the target and the rest of the program.
struct BoundaryStep
{
    enum Kind
    {
        entry,           ///< outside code called the target
        target_return,   ///< the target returned to outside code
        outcall,         ///< the target called outside code
        outcall_return,  ///< outside code returned to the target
    };

    Kind kind = entry;
    uint32_t function = 0;  ///< input index of the out-call callee
    std::vector<uint64_t> values;
    uint64_t state = 0;  ///< digest of memory, memory size and the first globals

    bool operator==(const BoundaryStep&) const = default;
};

struct BoundaryLog
{
    std::vector<BoundaryStep> steps;
    RunOutcome outcome;
};

/// Boundary log of a split program run.
BoundaryLog observe_partition(const split::PartitionedProgram& p, std::string_view entry, const ExecLimits& limits = {});

/// Boundary log of a single-module run. `target` is the target's index in `m`; `origin` maps
/// function indices of `m` to input function indices; `globals` is how many leading globals
/// take part in the state digest.
BoundaryLog observe_module(const wasm::Module& m, uint32_t target, const std::map<uint32_t, uint32_t>& origin,
    uint32_t globals, std::string_view entry, const ExecLimits& limits = {});

}  // namespace rr::exec
