// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rr::wasm
{
using bytes = std::vector<uint8_t>;

enum class ValType : uint8_t
{
    i32 = 0x7f,
    i64 = 0x7e,
    f32 = 0x7d,
    f64 = 0x7c,
    v128 = 0x7b,
    funcref = 0x70,
    externref = 0x6f,
};

const char* to_string(ValType t) noexcept;
bool is_reference(ValType t) noexcept;
bool is_valtype_byte(uint8_t b) noexcept;

struct FuncType
{
    std::vector<ValType> params;
    std::vector<ValType> results;

    bool operator==(const FuncType&) const = default;
};

struct Limits
{
    uint32_t min = 0;
    std::optional<uint32_t> max;

    bool operator==(const Limits&) const = default;
};

enum class ExternKind : uint8_t
{
    func = 0,
    table = 1,
    memory = 2,
    global = 3,
};

const char* to_string(ExternKind k) noexcept;

struct TableType
{
    ValType elem = ValType::funcref;
    Limits limits;

    bool operator==(const TableType&) const = default;
};

struct MemoryType
{
    Limits limits;

    bool operator==(const MemoryType&) const = default;
};

struct GlobalType
{
    ValType type = ValType::i32;
    bool is_mutable = false;

    bool operator==(const GlobalType&) const = default;
};

/// Import descriptor; for functions the payload is a type index.
struct Import
{
    std::string module;
    std::string name;
    std::variant<uint32_t, TableType, MemoryType, GlobalType> desc;

    ExternKind kind() const noexcept { return static_cast<ExternKind>(desc.index()); }
    bool operator==(const Import&) const = default;
};

struct LocalDecl
{
    uint32_t count = 0;
    ValType type = ValType::i32;

    bool operator==(const LocalDecl&) const = default;
};

/// A defined function. `code` holds the raw instruction bytes including the final `end`.
struct Function
{
    uint32_t type = 0;
    std::vector<LocalDecl> locals;
    bytes code;

    bool operator==(const Function&) const = default;
};

/// Constant expressions are stored as raw bytes including the terminating `end`.
struct Global
{
    GlobalType type;
    bytes init;

    bool operator==(const Global&) const = default;
};

struct Export
{
    std::string name;
    ExternKind kind = ExternKind::func;
    uint32_t index = 0;

    bool operator==(const Export&) const = default;
};

enum class SegmentMode : uint8_t
{
    active,
    passive,
    declarative,
};

struct DataSegment
{
    SegmentMode mode = SegmentMode::active;
    uint32_t memory = 0;
    bytes offset;  ///< constant expression, empty unless active
    bytes init;

    bool operator==(const DataSegment&) const = default;
};

/// Element segment. Entries are function indices, std::nullopt standing for `ref.null`.
/// `uses_expressions` selects the expression-based binary encoding.
struct ElemSegment
{
    SegmentMode mode = SegmentMode::active;
    uint32_t table = 0;
    bytes offset;
    ValType type = ValType::funcref;
    std::vector<std::optional<uint32_t>> entries;
    bool uses_expressions = false;

    bool operator==(const ElemSegment&) const = default;
};

struct CustomSection
{
    std::string name;
    bytes content;

    bool operator==(const CustomSection&) const = default;
};

/// Structured form of one WebAssembly binary. Index spaces count imports first.
struct Module
{
    std::vector<FuncType> types;
    std::vector<Import> imports;
    std::vector<Function> functions;
    std::vector<TableType> tables;
    std::vector<MemoryType> memories;
    std::vector<Global> globals;
    std::vector<Export> exports;
    std::optional<uint32_t> start;
    std::vector<ElemSegment> elems;
    std::vector<DataSegment> data;
    bool has_data_count = false;
    std::vector<CustomSection> customs;

    bool operator==(const Module&) const = default;

    uint32_t imported_count(ExternKind k) const noexcept;
    uint32_t num_functions() const noexcept
    {
        return imported_count(ExternKind::func) + static_cast<uint32_t>(functions.size());
    }
    uint32_t num_globals() const noexcept
    {
        return imported_count(ExternKind::global) + static_cast<uint32_t>(globals.size());
    }
    uint32_t num_tables() const noexcept
    {
        return imported_count(ExternKind::table) + static_cast<uint32_t>(tables.size());
    }
    uint32_t num_memories() const noexcept
    {
        return imported_count(ExternKind::memory) + static_cast<uint32_t>(memories.size());
    }

    bool is_imported_function(uint32_t func_idx) const noexcept
    {
        return func_idx < imported_count(ExternKind::func);
    }

    /// Type of any function in the index space. Throws std::out_of_range.
    const FuncType& function_type(uint32_t func_idx) const;
    uint32_t function_type_index(uint32_t func_idx) const;
    GlobalType global_type(uint32_t global_idx) const;
    TableType table_type(uint32_t table_idx) const;
    MemoryType memory_type(uint32_t mem_idx) const;

    const Export* find_export(std::string_view name) const noexcept;

    /// Index of a type equal to `t`, appending it if absent.
    uint32_t intern_type(const FuncType& t);
};

/// Index of a defined function within the function index space.
struct FunctionIndex
{
    uint32_t value = 0;

    auto operator<=>(const FunctionIndex&) const = default;
};

}  // namespace rr::wasm
