// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/module.hpp"
#include <string>
#include <vector>

namespace rr::wasm
{
/// Standard module validation (index ranges, constant expressions, export uniqueness,
/// and full operand-stack type checking of every body). Returns all diagnostics found;
/// an empty list means the module is valid.
std::vector<std::string> validate_module(const Module& m);

/// Throws ValidationError carrying the first diagnostic.
void check_module(const Module& m);

}  // namespace rr::wasm
