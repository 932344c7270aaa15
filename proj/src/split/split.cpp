// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/split/split.hpp"
#include "rr/error.hpp"
#include "rr/wasm/validate.hpp"
#include <json.hpp>
#include <set>

namespace rr::split
{
using wasm::ExternKind;
using wasm::IndexMap;
using wasm::IndexSpace;
using wasm::Module;

namespace
{
/// Returns `name`, or `name` with a numeric suffix if it is already taken; records the result.
std::string unique_name(std::set<std::string>& taken, const std::string& name)
{
    std::string n = name;
    for (int i = 1; taken.contains(n); ++i)
        n = name + "_" + std::to_string(i);
    taken.insert(n);
    return n;
}

struct References
{
    std::set<uint32_t> funcs;
    std::set<uint32_t> globals;
    std::set<uint32_t> tables;
    std::set<uint32_t> types;
    std::set<uint32_t> elems;
    std::set<uint32_t> data;
};

References collect_references(std::span<const uint8_t> code)
{
    References r;
    for (const auto& imm : wasm::decode_body(code).indices)
    {
        switch (imm.space)
        {
        case IndexSpace::func:
            r.funcs.insert(imm.value);
            break;
        case IndexSpace::global:
            r.globals.insert(imm.value);
            break;
        case IndexSpace::table:
            r.tables.insert(imm.value);
            break;
        case IndexSpace::type:
            r.types.insert(imm.value);
            break;
        case IndexSpace::elem:
            r.elems.insert(imm.value);
            break;
        case IndexSpace::data:
            r.data.insert(imm.value);
            break;
        case IndexSpace::memory:
            break;
        }
    }
    return r;
}
}  // namespace

const char* to_string(DiagnosticKind k) noexcept
{
    switch (k)
    {
    case DiagnosticKind::invalid_module:
        return "InvalidModule";
    case DiagnosticKind::unresolved_import:
        return "UnresolvedImport";
    case DiagnosticKind::type_mismatch:
        return "TypeMismatch";
    }
    return "?";
}

PartitionedProgram split(const Module& m, wasm::FunctionIndex target)
{
    const uint32_t t = target.value;
    const uint32_t n_imp = m.imported_count(ExternKind::func);
    if (t >= m.num_functions())
        throw InvalidTarget{"function " + std::to_string(t) + " is out of range"};
    if (t < n_imp)
        throw InvalidTarget{"function " + std::to_string(t) + " is imported"};
    if (m.num_memories() > 1)
        throw MultiMemory{};
    for (const auto& imp : m.imports)
        if (imp.kind() != ExternKind::func)
            throw UnsupportedFeature{"non-function imports"};

    PartitionedProgram p;
    auto& w = p.wiring;
    w.target_index = t;
    w.input_function_imports = n_imp;
    w.input_globals = m.num_globals();
    w.original_host_imports = m.imports;
    for (const auto& e : m.exports)
        w.original_exports.push_back(e.name);
    w.original_start = m.start;

    std::set<std::string> rem_names;
    for (const auto& e : m.exports)
        rem_names.insert(e.name);
    std::set<std::string> target_names;
    w.target_export_name = unique_name(target_names, "t" + std::to_string(t));

    // Remaining side.
    Module& r = p.remaining_module;
    r.types = m.types;
    r.imports = m.imports;
    r.imports.push_back({target_module_name, w.target_export_name, m.function_type_index(t)});

    IndexMap& rmap = w.remaining_map;
    rmap = IndexMap::identity();
    for (uint32_t i = 0; i < n_imp; ++i)
        rmap.set(IndexSpace::func, i, i);
    rmap.set(IndexSpace::func, t, n_imp);
    {
        uint32_t next = n_imp + 1;
        for (uint32_t i = n_imp; i < m.num_functions(); ++i)
            if (i != t)
                rmap.set(IndexSpace::func, i, next++);
    }

    for (uint32_t i = n_imp; i < m.num_functions(); ++i)
    {
        if (i == t)
            continue;
        const auto& f = m.functions[i - n_imp];
        r.functions.push_back({f.type, f.locals, wasm::remap_function_body(f.code, rmap)});
    }
    r.tables = m.tables;
    r.memories = m.memories;
    for (const auto& g : m.globals)
        r.globals.push_back({g.type, wasm::remap_expr(g.init, rmap)});
    for (const auto& seg : m.elems)
    {
        auto s = seg;
        for (auto& e : s.entries)
            if (e)
                e = rmap.lookup(IndexSpace::func, *e);
        r.elems.push_back(std::move(s));
    }
    r.data = m.data;
    r.has_data_count = m.has_data_count;

    for (const auto& e : m.exports)
    {
        auto ex = e;
        if (ex.kind == ExternKind::func)
            ex.index = rmap.lookup(IndexSpace::func, ex.index);
        r.exports.push_back(std::move(ex));
    }
    for (uint32_t i = 0; i < m.num_functions(); ++i)
    {
        if (i == t)
            continue;
        const auto name = unique_name(rem_names, "f" + std::to_string(i));
        w.remaining_exports[i] = name;
        r.exports.push_back({name, ExternKind::func, rmap.lookup(IndexSpace::func, i)});
    }
    for (uint32_t i = 0; i < m.num_globals(); ++i)
    {
        const auto name = unique_name(rem_names, "g" + std::to_string(i));
        w.shared_resources.push_back({ExternKind::global, i, name});
        r.exports.push_back({name, ExternKind::global, i});
    }
    for (uint32_t i = 0; i < m.num_tables(); ++i)
    {
        const auto name = unique_name(rem_names, "tab" + std::to_string(i));
        w.shared_resources.push_back({ExternKind::table, i, name});
        r.exports.push_back({name, ExternKind::table, i});
    }
    if (m.num_memories() == 1)
    {
        const auto name = unique_name(rem_names, "memory");
        w.shared_resources.push_back({ExternKind::memory, 0, name});
        r.exports.push_back({name, ExternKind::memory, 0});
    }
    if (m.start)
    {
        w.start_export = unique_name(rem_names, "start");
        r.exports.push_back({*w.start_export, ExternKind::func, rmap.lookup(IndexSpace::func, *m.start)});
    }

    // Target side.
    Module& tm = p.target_module;
    const auto& tf = m.functions[t - n_imp];
    const auto refs = collect_references(tf.code);
    IndexMap& tmap = w.target_map;

    auto shared_name = [&](ExternKind kind, uint32_t idx) {
        for (const auto& s : w.shared_resources)
            if (s.kind == kind && s.index == idx)
                return s.export_name;
        throw Error{"split: missing shared resource"};
    };

    // One type per referenced input type keeps the map injective.
    auto map_type = [&](uint32_t ty) {
        tmap.set(IndexSpace::type, ty, static_cast<uint32_t>(tm.types.size()));
        tm.types.push_back(m.types[ty]);
    };
    for (const auto ty : refs.types)
        map_type(ty);
    for (const auto f : refs.funcs)
    {
        if (f == t)
            continue;
        const auto ty = tm.intern_type(m.function_type(f));
        tmap.set(IndexSpace::func, f, static_cast<uint32_t>(tm.imports.size()));
        tm.imports.push_back({remaining_module_name, w.remaining_exports.at(f), ty});
        w.target_imports.push_back(f);
    }
    // Functions named by element segments the target uses must exist on this side too.
    for (const auto e : refs.elems)
        for (const auto& entry : m.elems[e].entries)
            if (entry && *entry != t && !tmap.covers(IndexSpace::func, *entry))
            {
                const auto ty = tm.intern_type(m.function_type(*entry));
                tmap.set(IndexSpace::func, *entry, static_cast<uint32_t>(tm.imports.size()));
                tm.imports.push_back({remaining_module_name, w.remaining_exports.at(*entry), ty});
                w.target_imports.push_back(*entry);
            }
    const auto n_target_imports = static_cast<uint32_t>(tm.imports.size());
    tmap.set(IndexSpace::func, t, n_target_imports);

    if (m.num_memories() == 1)
    {
        tm.imports.push_back({remaining_module_name, shared_name(ExternKind::memory, 0), m.memory_type(0)});
        tmap.set(IndexSpace::memory, 0, 0);
    }
    {
        uint32_t next = 0;
        for (const auto g : refs.globals)
        {
            tm.imports.push_back({remaining_module_name, shared_name(ExternKind::global, g), m.global_type(g)});
            tmap.set(IndexSpace::global, g, next++);
        }
    }
    std::set<uint32_t> tables = refs.tables;
    for (const auto e : refs.elems)
        if (m.elems[e].mode == wasm::SegmentMode::active)
            tables.insert(m.elems[e].table);
    {
        uint32_t next = 0;
        for (const auto tab : tables)
        {
            tm.imports.push_back({remaining_module_name, shared_name(ExternKind::table, tab), m.table_type(tab)});
            tmap.set(IndexSpace::table, tab, next++);
        }
    }
    // Segments used by bulk instructions are copied; after instantiation an active or
    // declarative segment behaves like a dropped one, so those copies are empty.
    {
        uint32_t next = 0;
        for (const auto e : refs.elems)
        {
            const auto& src = m.elems[e];
            wasm::ElemSegment seg;
            seg.mode = wasm::SegmentMode::passive;
            seg.type = src.type;
            seg.uses_expressions = src.uses_expressions;
            if (src.mode == wasm::SegmentMode::passive)
                for (const auto& entry : src.entries)
                    seg.entries.push_back(entry ? std::optional{tmap.lookup(IndexSpace::func, *entry)} : std::nullopt);
            tm.elems.push_back(std::move(seg));
            tmap.set(IndexSpace::elem, e, next++);
        }
    }
    {
        uint32_t next = 0;
        for (const auto d : refs.data)
        {
            wasm::DataSegment seg;
            seg.mode = wasm::SegmentMode::passive;
            if (m.data[d].mode == wasm::SegmentMode::passive)
                seg.init = m.data[d].init;
            tm.data.push_back(std::move(seg));
            tmap.set(IndexSpace::data, d, next++);
        }
    }

    if (!tmap.covers(IndexSpace::type, tf.type))
        map_type(tf.type);
    tm.functions.push_back({tmap.lookup(IndexSpace::type, tf.type), tf.locals, wasm::remap_function_body(tf.code, tmap)});
    tm.exports.push_back({w.target_export_name, ExternKind::func, n_target_imports});
    wasm::declare_function_references(tm);
    tm.has_data_count = !tm.data.empty() && wasm::uses_data_count(tm);
    return p;
}

std::vector<Diagnostic> validate_partition(const PartitionedProgram& p)
{
    std::vector<Diagnostic> out;
    for (const auto* mod : {&p.target_module, &p.remaining_module})
    {
        const char* side = mod == &p.target_module ? "target side" : "remaining side";
        for (const auto& d : wasm::validate_module(*mod))
            out.push_back({DiagnosticKind::invalid_module, std::string{side} + ": " + d});
    }

    auto check_imports = [&](const Module& importer, const Module& exporter, const std::string& from) {
        for (const auto& imp : importer.imports)
        {
            const std::string what = imp.module + "." + imp.name;
            if (imp.module != from)
            {
                const bool host = std::find(p.wiring.original_host_imports.begin(),
                                      p.wiring.original_host_imports.end(), imp) !=
                                  p.wiring.original_host_imports.end();
                if (!host || &importer == &p.target_module)
                    out.push_back({DiagnosticKind::unresolved_import, what + " is not provided by either side"});
                continue;
            }
            const auto* e = exporter.find_export(imp.name);
            if (e == nullptr)
            {
                out.push_back({DiagnosticKind::unresolved_import, what + " has no matching export"});
                continue;
            }
            if (e->kind != imp.kind())
            {
                out.push_back({DiagnosticKind::type_mismatch, what + " resolves to a " + to_string(e->kind)});
                continue;
            }
            bool ok = true;
            try
            {
                switch (imp.kind())
                {
                case ExternKind::func:
                    ok = importer.types.at(std::get<uint32_t>(imp.desc)) == exporter.function_type(e->index);
                    break;
                case ExternKind::global:
                    ok = std::get<wasm::GlobalType>(imp.desc) == exporter.global_type(e->index);
                    break;
                case ExternKind::table:
                {
                    const auto want = std::get<wasm::TableType>(imp.desc);
                    const auto have = exporter.table_type(e->index);
                    ok = want.elem == have.elem && have.limits.min >= want.limits.min &&
                         (!want.limits.max || (have.limits.max && *have.limits.max <= *want.limits.max));
                    break;
                }
                case ExternKind::memory:
                {
                    const auto want = std::get<wasm::MemoryType>(imp.desc);
                    const auto have = exporter.memory_type(e->index);
                    ok = have.limits.min >= want.limits.min &&
                         (!want.limits.max || (have.limits.max && *have.limits.max <= *want.limits.max));
                    break;
                }
                }
            }
            catch (const std::out_of_range&)
            {
                ok = false;
            }
            if (!ok)
                out.push_back({DiagnosticKind::type_mismatch, what + " has a different type on the exporting side"});
        }
    };
    check_imports(p.target_module, p.remaining_module, remaining_module_name);
    check_imports(p.remaining_module, p.target_module, target_module_name);
    return out;
}

std::string manifest_json(const PartitionedProgram& p)
{
    using nlohmann::json;
    const auto& w = p.wiring;
    json j;
    j["target_index"] = w.target_index;
    j["target_export"] = w.target_export_name;
    json rem = json::object();
    for (const auto& [idx, name] : w.remaining_exports)
        rem[std::to_string(idx)] = name;
    j["remaining_exports"] = rem;
    json shared = json::array();
    for (const auto& s : w.shared_resources)
        shared.push_back({{"kind", wasm::to_string(s.kind)}, {"index", s.index}, {"export", s.export_name}});
    j["shared_resources"] = shared;
    json host = json::array();
    for (const auto& imp : w.original_host_imports)
        host.push_back(imp.module + "." + imp.name);
    j["host_imports"] = host;
    j["target_imports"] = w.target_imports;
    if (w.start_export)
        j["start_export"] = *w.start_export;
    auto dump_map = [](const IndexMap& m) {
        json out = json::object();
        for (const auto space : {IndexSpace::type, IndexSpace::func, IndexSpace::table, IndexSpace::memory,
                 IndexSpace::global, IndexSpace::elem, IndexSpace::data})
        {
            if (m.is_identity(space))
            {
                out[wasm::to_string(space)] = "identity";
                continue;
            }
            json entries = json::object();
            for (const auto& [from, to] : m.entries(space))
                entries[std::to_string(from)] = to;
            out[wasm::to_string(space)] = entries;
        }
        return out;
    };
    j["target_map"] = dump_map(w.target_map);
    j["remaining_map"] = dump_map(w.remaining_map);
    return j.dump(2);
}

}  // namespace rr::split
