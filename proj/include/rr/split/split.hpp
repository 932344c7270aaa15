// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/module.hpp"
#include "rr/wasm/transform.hpp"
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rr::split
{
inline constexpr const char* remaining_module_name = "rem";
inline constexpr const char* target_module_name = "target";

struct SharedResource
{
    wasm::ExternKind kind;
    uint32_t index;  ///< index in the input module
    std::string export_name;
};

/// Wiring between the two halves of a split program.
struct BoundaryMap
{
    uint32_t target_index = 0;
    std::string target_export_name;
    /// Input function index -> export name on the remaining side (every non-target function).
    std::map<uint32_t, std::string> remaining_exports;
    std::vector<SharedResource> shared_resources;
    std::vector<wasm::Import> original_host_imports;
    /// Export names of the input module, all kept by the remaining side.
    std::vector<std::string> original_exports;
    /// The input's start function, now exported by the remaining side and run after linking.
    std::optional<uint32_t> original_start;
    std::optional<std::string> start_export;
    /// Input function indices imported by the target side, in import order.
    std::vector<uint32_t> target_imports;
    /// Input index spaces -> target side / remaining side.
    wasm::IndexMap target_map;
    wasm::IndexMap remaining_map;
    uint32_t input_function_imports = 0;
    uint32_t input_globals = 0;
};

struct PartitionedProgram
{
    wasm::Module target_module;
    wasm::Module remaining_module;
    BoundaryMap wiring;
};

/// Splits `m` into a target side holding only function `t` and a remaining side holding
/// everything else. Throws InvalidTarget, MultiMemory, or UnsupportedFeature (non-function imports).
PartitionedProgram split(const wasm::Module& m, wasm::FunctionIndex t);

enum class DiagnosticKind
{
    invalid_module,
    unresolved_import,
    type_mismatch,
};

struct Diagnostic
{
    DiagnosticKind kind;
    std::string message;
};

const char* to_string(DiagnosticKind k) noexcept;

/// Empty iff both halves validate and every cross import resolves to a matching export.
std::vector<Diagnostic> validate_partition(const PartitionedProgram& p);

/// JSON description of the wiring (boundary names and index maps) for debugging dumps.
std::string manifest_json(const PartitionedProgram& p);

}  // namespace rr::split
