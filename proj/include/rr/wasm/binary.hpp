// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/module.hpp"
#include <filesystem>
#include <span>

namespace rr::wasm
{
/// Parses a binary module. Rejects SIMD, multi-memory, shared memories and other
/// unsupported proposals with UnsupportedFeature; structural problems raise MalformedBinary.
/// Function bodies are decoded once to check them, but are stored as raw bytes.
Module parse_module(std::span<const uint8_t> bytes);

/// Encodes a module in canonical form (minimal LEBs, standard section order,
/// custom sections appended at the end).
bytes encode_module(const Module& m);

bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const uint8_t> data);

/// Encodes `i32.const v; end` and friends for building constant expressions.
bytes const_expr_i32(int32_t v);
bytes const_expr_i64(int64_t v);
bytes const_expr_f32_bits(uint32_t bits);
bytes const_expr_f64_bits(uint64_t bits);

}  // namespace rr::wasm
