// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/wasm/module.hpp"
#include <algorithm>
#include <stdexcept>

namespace rr::wasm
{
const char* to_string(ValType t) noexcept
{
    switch (t)
    {
    case ValType::i32:
        return "i32";
    case ValType::i64:
        return "i64";
    case ValType::f32:
        return "f32";
    case ValType::f64:
        return "f64";
    case ValType::v128:
        return "v128";
    case ValType::funcref:
        return "funcref";
    case ValType::externref:
        return "externref";
    }
    return "?";
}

bool is_reference(ValType t) noexcept
{
    return t == ValType::funcref || t == ValType::externref;
}

bool is_valtype_byte(uint8_t b) noexcept
{
    switch (b)
    {
    case 0x7f:
    case 0x7e:
    case 0x7d:
    case 0x7c:
    case 0x70:
    case 0x6f:
        return true;
    default:
        return false;
    }
}

const char* to_string(ExternKind k) noexcept
{
    switch (k)
    {
    case ExternKind::func:
        return "func";
    case ExternKind::table:
        return "table";
    case ExternKind::memory:
        return "memory";
    case ExternKind::global:
        return "global";
    }
    return "?";
}

uint32_t Module::imported_count(ExternKind k) const noexcept
{
    return static_cast<uint32_t>(
        std::count_if(imports.begin(), imports.end(), [k](const Import& i) { return i.kind() == k; }));
}

namespace
{
template <typename T>
const T* nth_import(const std::vector<Import>& imports, ExternKind kind, uint32_t n)
{
    for (const auto& imp : imports)
    {
        if (imp.kind() != kind)
            continue;
        if (n == 0)
            return &std::get<T>(imp.desc);
        --n;
    }
    return nullptr;
}
}  // namespace

uint32_t Module::function_type_index(uint32_t func_idx) const
{
    if (const auto* t = nth_import<uint32_t>(imports, ExternKind::func, func_idx))
        return *t;
    const auto defined = func_idx - imported_count(ExternKind::func);
    if (func_idx < imported_count(ExternKind::func) || defined >= functions.size())
        throw std::out_of_range{"function index " + std::to_string(func_idx) + " out of range"};
    return functions[defined].type;
}

const FuncType& Module::function_type(uint32_t func_idx) const
{
    const auto t = function_type_index(func_idx);
    if (t >= types.size())
        throw std::out_of_range{"type index " + std::to_string(t) + " out of range"};
    return types[t];
}

GlobalType Module::global_type(uint32_t idx) const
{
    if (const auto* g = nth_import<GlobalType>(imports, ExternKind::global, idx))
        return *g;
    const auto n = imported_count(ExternKind::global);
    if (idx < n || idx - n >= globals.size())
        throw std::out_of_range{"global index " + std::to_string(idx) + " out of range"};
    return globals[idx - n].type;
}

TableType Module::table_type(uint32_t idx) const
{
    if (const auto* t = nth_import<TableType>(imports, ExternKind::table, idx))
        return *t;
    const auto n = imported_count(ExternKind::table);
    if (idx < n || idx - n >= tables.size())
        throw std::out_of_range{"table index " + std::to_string(idx) + " out of range"};
    return tables[idx - n];
}

MemoryType Module::memory_type(uint32_t idx) const
{
    if (const auto* m = nth_import<MemoryType>(imports, ExternKind::memory, idx))
        return *m;
    const auto n = imported_count(ExternKind::memory);
    if (idx < n || idx - n >= memories.size())
        throw std::out_of_range{"memory index " + std::to_string(idx) + " out of range"};
    return memories[idx - n];
}

const Export* Module::find_export(std::string_view name) const noexcept
{
    const auto it =
        std::find_if(exports.begin(), exports.end(), [name](const Export& e) { return e.name == name; });
    return it == exports.end() ? nullptr : &*it;
}

uint32_t Module::intern_type(const FuncType& t)
{
    const auto it = std::find(types.begin(), types.end(), t);
    if (it != types.end())
        return static_cast<uint32_t>(it - types.begin());
    types.push_back(t);
    return static_cast<uint32_t>(types.size() - 1);
}

}  // namespace rr::wasm
