// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/wasm/transform.hpp"
#include "rr/error.hpp"
#include "rr/wasm/leb128.hpp"
#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace rr::wasm
{
namespace
{
uint64_t body_size(const Function& f)
{
    uint64_t n = u32_size(static_cast<uint32_t>(f.locals.size()));
    for (const auto& l : f.locals)
        n += u32_size(l.count) + 1;
    return n + f.code.size();
}
}  // namespace

uint64_t code_size(const Module& m)
{
    uint64_t total = 0;
    for (const auto& f : m.functions)
        total += body_size(f);
    return total;
}

uint64_t function_body_size(const Module& m, FunctionIndex f)
{
    const auto imported = m.imported_count(ExternKind::func);
    if (f.value < imported || f.value - imported >= m.functions.size())
        throw NotDefinedFunction{f.value};
    return body_size(m.functions[f.value - imported]);
}

IndexMap IndexMap::identity()
{
    IndexMap m;
    m.identity_.fill(true);
    return m;
}

void IndexMap::set(IndexSpace space, uint32_t from, uint32_t to)
{
    const auto s = static_cast<size_t>(space);
    maps_[s][from] = to;
    identity_[s] = false;
}

void IndexMap::keep(IndexSpace space)
{
    const auto s = static_cast<size_t>(space);
    maps_[s].clear();
    identity_[s] = true;
}

bool IndexMap::covers(IndexSpace space, uint32_t from) const
{
    const auto s = static_cast<size_t>(space);
    return identity_[s] || maps_[s].contains(from);
}

uint32_t IndexMap::lookup(IndexSpace space, uint32_t from) const
{
    const auto s = static_cast<size_t>(space);
    if (identity_[s])
        return from;
    const auto it = maps_[s].find(from);
    if (it == maps_[s].end())
        throw UnmappedIndex{to_string(space), from};
    return it->second;
}

IndexMap IndexMap::compose(const IndexMap& first, const IndexMap& second)
{
    IndexMap out;
    for (size_t s = 0; s < num_spaces; ++s)
    {
        const auto space = static_cast<IndexSpace>(s);
        if (first.identity_[s] && second.identity_[s])
        {
            out.identity_[s] = true;
            continue;
        }
        if (first.identity_[s])
        {
            out.maps_[s] = second.maps_[s];
            continue;
        }
        for (const auto& [from, mid] : first.maps_[s])
        {
            if (second.covers(space, mid))
                out.maps_[s][from] = second.lookup(space, mid);
        }
    }
    return out;
}

IndexMap IndexMap::inverse() const
{
    IndexMap out;
    for (size_t s = 0; s < num_spaces; ++s)
    {
        out.identity_[s] = identity_[s];
        for (const auto& [from, to] : maps_[s])
        {
            if (!out.maps_[s].emplace(to, from).second)
                throw std::logic_error{"index map is not injective"};
        }
    }
    return out;
}

bytes remap_function_body(std::span<const uint8_t> code, const IndexMap& map)
{
    const auto decoded = decode_body(code);
    bytes out;
    out.reserve(code.size() + 8);
    size_t pos = 0;
    for (const auto& imm : decoded.indices)
    {
        out.insert(out.end(), code.begin() + static_cast<ptrdiff_t>(pos),
            code.begin() + static_cast<ptrdiff_t>(imm.offset));
        write_u32(out, map.lookup(imm.space, imm.value));
        pos = imm.offset + imm.length;
    }
    out.insert(out.end(), code.begin() + static_cast<ptrdiff_t>(pos), code.end());
    return out;
}

Module instrument_function_entries(const Module& m)
{
    Module out = m;
    out.customs.clear();
    const auto cov_type = out.intern_type(FuncType{{ValType::i32}, {}});

    IndexMap shift = IndexMap::identity();
    shift.keep(IndexSpace::type);
    const auto n = m.num_functions();
    for (uint32_t i = 0; i < n; ++i)
        shift.set(IndexSpace::func, i, i + 1);

    out.imports.insert(out.imports.begin(), Import{"rr", "cov", cov_type});

    const auto imported = m.imported_count(ExternKind::func);
    for (size_t i = 0; i < out.functions.size(); ++i)
    {
        auto& f = out.functions[i];
        bytes code{static_cast<uint8_t>(Op::i32_const)};
        write_s32(code, static_cast<int32_t>(imported + i));
        code.push_back(static_cast<uint8_t>(Op::call));
        write_u32(code, 0);
        const auto remapped = remap_function_body(f.code, shift);
        code.insert(code.end(), remapped.begin(), remapped.end());
        f.code = std::move(code);
    }
    for (auto& g : out.globals)
        g.init = remap_expr(g.init, shift);
    for (auto& e : out.exports)
    {
        if (e.kind == ExternKind::func)
            e.index += 1;
    }
    if (out.start)
        *out.start += 1;
    for (auto& seg : out.elems)
    {
        for (auto& entry : seg.entries)
        {
            if (entry)
                *entry += 1;
        }
        if (seg.mode == SegmentMode::active)
            seg.offset = remap_expr(seg.offset, shift);
    }
    for (auto& d : out.data)
    {
        if (d.mode == SegmentMode::active)
            d.offset = remap_expr(d.offset, shift);
    }
    return out;
}

void declare_function_references(Module& m)
{
    std::set<uint32_t> declared;
    for (const auto& seg : m.elems)
    {
        for (const auto& e : seg.entries)
        {
            if (e)
                declared.insert(*e);
        }
    }
    for (const auto& e : m.exports)
    {
        if (e.kind == ExternKind::func)
            declared.insert(e.index);
    }
    std::set<uint32_t> needed;
    auto scan = [&](std::span<const uint8_t> code) {
        for (const auto& ins : decode_body(code).instrs)
        {
            if (ins.op == Op::ref_func && !declared.contains(ins.a))
                needed.insert(ins.a);
        }
    };
    for (const auto& g : m.globals)
    {
        // Global initializers count as declarations themselves.
        for (const auto& ins : decode_expr(g.init).instrs)
        {
            if (ins.op == Op::ref_func)
                declared.insert(ins.a);
        }
    }
    for (const auto& f : m.functions)
        scan(f.code);
    std::erase_if(needed, [&](uint32_t f) { return declared.contains(f); });
    if (needed.empty())
        return;
    ElemSegment seg;
    seg.mode = SegmentMode::declarative;
    for (auto f : needed)
        seg.entries.push_back(f);
    m.elems.push_back(std::move(seg));
}

Module remove_unreferenced_functions(const Module& m, IndexMap* map_out)
{
    const uint32_t n_imp = m.imported_count(ExternKind::func);
    std::set<uint32_t> live;
    std::vector<uint32_t> work;
    auto mark = [&](uint32_t f) {
        if (live.insert(f).second)
            work.push_back(f);
    };
    auto mark_expr = [&](std::span<const uint8_t> expr) {
        for (const auto& imm : decode_expr(expr).indices)
            if (imm.space == IndexSpace::func)
                mark(imm.value);
    };
    for (const auto& e : m.exports)
        if (e.kind == ExternKind::func)
            mark(e.index);
    if (m.start)
        mark(*m.start);
    for (const auto& s : m.elems)
        for (const auto& e : s.entries)
            if (e)
                mark(*e);
    for (const auto& g : m.globals)
        mark_expr(g.init);
    while (!work.empty())
    {
        const auto f = work.back();
        work.pop_back();
        if (f < n_imp)
            continue;
        for (const auto& imm : decode_body(m.functions.at(f - n_imp).code).indices)
            if (imm.space == IndexSpace::func)
                mark(imm.value);
    }

    IndexMap map = IndexMap::identity();
    for (uint32_t i = 0; i < n_imp; ++i)
        map.set(IndexSpace::func, i, i);
    Module out = m;
    out.functions.clear();
    for (uint32_t i = n_imp; i < m.num_functions(); ++i)
        if (live.contains(i))
        {
            map.set(IndexSpace::func, i, static_cast<uint32_t>(n_imp + out.functions.size()));
            out.functions.push_back(m.functions[i - n_imp]);
        }
    for (auto& f : out.functions)
        f.code = remap_function_body(f.code, map);
    for (auto& g : out.globals)
        g.init = remap_expr(g.init, map);
    for (auto& e : out.exports)
        if (e.kind == ExternKind::func)
            e.index = map.lookup(IndexSpace::func, e.index);
    if (out.start)
        out.start = map.lookup(IndexSpace::func, *out.start);
    for (auto& s : out.elems)
        for (auto& e : s.entries)
            if (e)
                e = map.lookup(IndexSpace::func, *e);
    if (map_out)
        *map_out = map;
    return out;
}

bool uses_data_count(const Module& m)
{
    for (const auto& f : m.functions)
    {
        for (const auto& ins : decode_body(f.code).instrs)
        {
            if (ins.op == Op::memory_init || ins.op == Op::data_drop)
                return true;
        }
    }
    return false;
}

std::string canonical_body_hash(std::span<const uint8_t> code)
{
    const auto decoded = decode_body(code);
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](uint8_t b) {
        h ^= b;
        h *= 0x100000001b3ull;
    };
    size_t pos = 0;
    for (const auto& imm : decoded.indices)
    {
        for (; pos < imm.offset; ++pos)
            mix(code[pos]);
        mix(0xff);  // placeholder for the index
        pos = imm.offset + imm.length;
    }
    for (; pos < code.size(); ++pos)
        mix(code[pos]);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace rr::wasm
