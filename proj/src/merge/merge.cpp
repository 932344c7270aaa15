// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/merge/merge.hpp"
#include "rr/error.hpp"
#include <set>

namespace rr::merge
{
using wasm::ExternKind;
using wasm::IndexMap;
using wasm::IndexSpace;
using wasm::Module;

namespace
{
const wasm::Export& exported(const Module& m, const wasm::Import& imp)
{
    const auto* e = m.find_export(imp.name);
    if (e == nullptr)
        throw UnresolvedImport{imp.module + "." + imp.name + " has no matching export"};
    if (e->kind != imp.kind())
        throw TypeMismatch{imp.module + "." + imp.name + " resolves to a " + wasm::to_string(e->kind)};
    return *e;
}
}  // namespace

MergedProgram merge(const Module& target_side, const Module& other, const split::BoundaryMap& w)
{
    const Module& t = target_side;
    const Module& o = other;
    MergedProgram out;
    Module& m = out.module;

    if (t.functions.size() != 1)
        throw Error{"merge: target side must define exactly one function"};
    const auto* te = t.find_export(w.target_export_name);
    if (te == nullptr || te->kind != ExternKind::func)
        throw UnresolvedImport{"target side does not export " + w.target_export_name};

    // Function space: kept imports of `other`, its defined functions, then the target.
    IndexMap omap = IndexMap::identity();
    uint32_t kept = 0;
    for (const auto& imp : o.imports)
        if (imp.module != split::target_module_name)
        {
            if (imp.kind() != ExternKind::func)
                throw UnresolvedImport{imp.module + "." + imp.name + " is not a function import"};
            ++kept;
        }
    const uint32_t o_imp = o.imported_count(ExternKind::func);
    const auto target_index = static_cast<uint32_t>(kept + o.functions.size());
    out.target_index = target_index;
    {
        uint32_t next = 0;
        uint32_t fi = 0;
        for (const auto& imp : o.imports)
        {
            if (imp.kind() != ExternKind::func)
                throw UnresolvedImport{imp.module + "." + imp.name + " is not a function import"};
            if (imp.module == split::target_module_name)
            {
                if (imp.name != w.target_export_name)
                    throw UnresolvedImport{imp.module + "." + imp.name + " has no matching export"};
                if (o.types.at(std::get<uint32_t>(imp.desc)) != t.function_type(te->index))
                    throw TypeMismatch{imp.module + "." + imp.name + " has a different type"};
                omap.set(IndexSpace::func, fi++, target_index);
            }
            else
            {
                m.imports.push_back(imp);
                omap.set(IndexSpace::func, fi++, next++);
            }
        }
        for (uint32_t i = 0; i < o.functions.size(); ++i)
            omap.set(IndexSpace::func, o_imp + i, kept + i);
    }

    m.types = o.types;
    for (const auto& f : o.functions)
        m.functions.push_back({f.type, f.locals, wasm::remap_function_body(f.code, omap)});
    m.tables = o.tables;
    m.memories = o.memories;
    for (const auto& g : o.globals)
        m.globals.push_back({g.type, wasm::remap_expr(g.init, omap)});
    for (const auto& seg : o.elems)
    {
        auto s = seg;
        for (auto& e : s.entries)
            if (e)
                e = omap.lookup(IndexSpace::func, *e);
        if (!s.offset.empty())
            s.offset = wasm::remap_expr(s.offset, omap);
        m.elems.push_back(std::move(s));
    }
    m.data = o.data;
    if (o.start)
        m.start = omap.lookup(IndexSpace::func, *o.start);
    else if (w.start_export)
        if (const auto* s = o.find_export(*w.start_export); s && s->kind == ExternKind::func)
            m.start = omap.lookup(IndexSpace::func, s->index);

    // Target side.
    IndexMap& tmap = out.target_map;
    for (uint32_t i = 0; i < t.types.size(); ++i)
    {
        tmap.set(IndexSpace::type, i, static_cast<uint32_t>(m.types.size()));
        m.types.push_back(t.types[i]);
    }
    {
        uint32_t fi = 0;
        uint32_t gi = 0;
        uint32_t ti = 0;
        uint32_t mi = 0;
        for (const auto& imp : t.imports)
        {
            if (imp.module != split::remaining_module_name)
                throw UnresolvedImport{imp.module + "." + imp.name + " is not provided by the other side"};
            const auto& e = exported(o, imp);
            const std::string what = imp.module + "." + imp.name;
            switch (imp.kind())
            {
            case ExternKind::func:
                if (t.types.at(std::get<uint32_t>(imp.desc)) != o.function_type(e.index))
                    throw TypeMismatch{what + " has a different type"};
                tmap.set(IndexSpace::func, fi++, omap.lookup(IndexSpace::func, e.index));
                break;
            case ExternKind::global:
                if (std::get<wasm::GlobalType>(imp.desc) != o.global_type(e.index))
                    throw TypeMismatch{what + " has a different type"};
                tmap.set(IndexSpace::global, gi++, e.index);
                break;
            case ExternKind::table:
                if (std::get<wasm::TableType>(imp.desc).elem != o.table_type(e.index).elem)
                    throw TypeMismatch{what + " has a different element type"};
                tmap.set(IndexSpace::table, ti++, e.index);
                break;
            case ExternKind::memory:
                tmap.set(IndexSpace::memory, mi++, e.index);
                break;
            }
        }
        tmap.set(IndexSpace::func, fi, target_index);
        if (t.imported_count(ExternKind::func) != fi)
            throw Error{"merge: inconsistent target side imports"};
    }
    for (uint32_t i = 0; i < t.elems.size(); ++i)
        tmap.set(IndexSpace::elem, i, static_cast<uint32_t>(m.elems.size() + i));
    for (uint32_t i = 0; i < t.data.size(); ++i)
        tmap.set(IndexSpace::data, i, static_cast<uint32_t>(m.data.size() + i));

    const auto& tf = t.functions[0];
    m.functions.push_back({tmap.lookup(IndexSpace::type, tf.type), tf.locals, wasm::remap_function_body(tf.code, tmap)});
    for (const auto& seg : t.elems)
    {
        auto s = seg;
        if (s.mode == wasm::SegmentMode::active)
        {
            s.table = tmap.lookup(IndexSpace::table, s.table);
            s.offset = wasm::remap_expr(s.offset, tmap);
        }
        for (auto& e : s.entries)
            if (e)
                e = tmap.lookup(IndexSpace::func, *e);
        m.elems.push_back(std::move(s));
    }
    for (const auto& seg : t.data)
    {
        auto s = seg;
        if (s.mode == wasm::SegmentMode::active)
            s.offset = wasm::remap_expr(s.offset, tmap);
        m.data.push_back(std::move(s));
    }

    // Exports.
    std::set<std::string> names;
    for (const auto& name : w.original_exports)
        if (const auto* e = o.find_export(name))
        {
            auto ex = *e;
            if (ex.kind == ExternKind::func)
                ex.index = omap.lookup(IndexSpace::func, ex.index);
            m.exports.push_back(std::move(ex));
            names.insert(name);
        }
    if (!names.contains(w.target_export_name))
        m.exports.push_back({w.target_export_name, ExternKind::func, target_index});

    // Which merged functions stand for input functions.
    for (const auto& [idx, name] : w.remaining_exports)
        if (const auto* e = o.find_export(name); e && e->kind == ExternKind::func)
            out.origin.emplace(omap.lookup(IndexSpace::func, e->index), idx);
    out.origin[target_index] = w.target_index;

    wasm::declare_function_references(m);
    m.has_data_count = !m.data.empty() && (o.has_data_count || t.has_data_count || wasm::uses_data_count(m));
    return out;
}

}  // namespace rr::merge
