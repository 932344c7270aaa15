// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/exec/partition.hpp"
#include "rr/error.hpp"
#include <cstring>
#include <unordered_map>

namespace rr::exec
{
namespace
{
using split::PartitionedProgram;
using wasm::ExternKind;

struct Linked
{
    Store store;
    HostEnvironment env{store};
    std::shared_ptr<const wasm::Module> rmod;
    std::shared_ptr<const wasm::Module> tmod;
    Instance* rem = nullptr;
    Instance* tgt = nullptr;
    Addr target = no_addr;
    std::unordered_map<Addr, uint32_t> origin;

    explicit Linked(const ExecLimits& limits) : store{limits} {}

    void link(const PartitionedProgram& p)
    {
        rmod = std::make_shared<const wasm::Module>(p.remaining_module);
        tmod = std::make_shared<const wasm::Module>(p.target_module);
        Addr alias = no_addr;
        rem = &store.instantiate(
            rmod,
            [&](const wasm::Import& imp) -> std::optional<Extern> {
                if (imp.module == split::target_module_name)
                {
                    if (imp.kind() != ExternKind::func)
                        return std::nullopt;
                    if (alias == no_addr)
                        alias = store.add_alias(rmod->types.at(std::get<uint32_t>(imp.desc)));
                    return Extern{ExternKind::func, alias};
                }
                return env.resolve(imp, *rmod);
            },
            "remaining", false);
        tgt = &store.instantiate(
            tmod,
            [&](const wasm::Import& imp) -> std::optional<Extern> {
                if (imp.module == split::remaining_module_name)
                    return rem->find_export(imp.name);
                return env.resolve(imp, *tmod);
            },
            "target", false);
        const auto te = tgt->find_export(p.wiring.target_export_name);
        if (!te || te->kind != ExternKind::func)
            throw InstantiationFailed{"target side does not export " + p.wiring.target_export_name};
        target = te->addr;
        if (alias != no_addr)
            store.bind_alias(alias, target);
        for (const auto& [idx, name] : p.wiring.remaining_exports)
            if (const auto e = rem->find_export(name); e && e->kind == ExternKind::func)
                origin.emplace(store.resolve(e->addr), idx);
        origin[target] = p.wiring.target_index;
    }

    void run(const PartitionedProgram& p, std::string_view entry)
    {
        if (p.wiring.start_export)
        {
            const auto s = rem->find_export(*p.wiring.start_export);
            if (!s)
                throw InstantiationFailed{"missing start export"};
            store.invoke(s->addr, {});
        }
        const auto e = rem->find_export(entry);
        if (!e || e->kind != ExternKind::func)
            throw InstantiationFailed{"no exported function named '" + std::string{entry} + "'"};
        const auto args = default_arguments(store.function(e->addr).type);
        store.invoke(e->addr, args);
    }
};

uint64_t fnv(uint64_t h, const void* data, size_t n)
{
    const auto* p = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i)
        h = (h ^ p[i]) * 0x100000001b3ULL;
    return h;
}

// Maps store function addresses in values to input function indices.
class Tagger
{
public:
    Tagger(const Store& store, const std::unordered_map<Addr, uint32_t>& origin) : store_{store}, origin_{origin} {}

    uint64_t tag(uint64_t bits) const
    {
        if (bits == null_ref)
            return null_ref;
        const auto it = origin_.find(store_.resolve(static_cast<Addr>(bits)));
        return it == origin_.end() ? null_ref - 1 : it->second;
    }

    uint64_t tag(ValType t, uint64_t bits) const { return wasm::is_reference(t) ? tag(bits) : bits; }

    uint32_t function(Addr a) const
    {
        const auto it = origin_.find(store_.resolve(a));
        return it == origin_.end() ? no_addr : it->second;
    }

private:
    const Store& store_;
    const std::unordered_map<Addr, uint32_t>& origin_;
};

class Recorder final : public CallObserver
{
public:
    Recorder(Linked& l, const PartitionedProgram& p) : l_{l}, tagger_{l.store, l.origin}
    {
        auto& t = trace_;
        t.target_export = p.wiring.target_export_name;
        t.target_index = p.wiring.target_index;
        if (!l.rem->memories.empty())
        {
            mem_ = l.rem->memories[0];
            t.initial_pages = l.rmod->memories.at(0).limits.min;
            mem_shadow_.assign(size_t{t.initial_pages} * 65536, 0);
        }
        globals_ = l.rem->globals;
        for (const auto g : globals_)
        {
            const auto& gi = l.store.global(g);
            t.initial_globals.push_back({gi.type.type, tagger_.tag(gi.type.type, gi.bits)});
            glob_shadow_.push_back(t.initial_globals.back().bits);
        }
        tables_ = l.rem->tables;
        for (size_t i = 0; i < tables_.size(); ++i)
        {
            const auto min = l.rmod->tables.at(i).limits.min;
            t.initial_table_sizes.push_back(min);
            tab_shadow_.emplace_back(min, null_ref);
        }
    }

    trace::Trace finish(std::string_view entry)
    {
        trace_.entry = std::string{entry};
        // Close out-calls left open by an unwinding exit.
        while (!open_.empty())
        {
            auto oc = std::move(open_.back());
            open_.pop_back();
            oc.trapped = true;
            sink().push_back(std::move(oc));
        }
        trace_.events = std::move(top_);
        return std::move(trace_);
    }

    void on_call(Addr caller, Addr callee, std::span<const uint64_t> args, uint32_t slot, Addr table) override
    {
        const bool into = callee == l_.target;
        const bool from = caller != no_addr && caller == l_.target;
        Frame f{into, next_act_++, tagger_.function(callee), false};
        if (into)
        {
            trace::TargetEntry e;
            e.export_name = trace_.target_export;
            e.args = values(l_.store.function(callee).type.params, args);
            e.activation = f.act;
            if (from)
                e.caller_activation = frames_.back().act;
            else
            {
                diff_into(sink());
                if (!open_.empty())
                    e.parent_outcall = open_.back().id;
                else
                    for (const auto& fr : frames_)
                        e.chain.push_back({fr.function, fr.act});
            }
            sink().push_back(std::move(e));
            if (from && slot != no_addr)
                trace_.called_slots.emplace(table_index(table), slot);
        }
        else if (from)
        {
            sync();
            trace::OutCallReturn oc;
            oc.id = next_oc_++;
            oc.function = f.function;
            oc.import_name = "f" + std::to_string(f.function);
            if (slot != no_addr)
            {
                oc.slot = slot;
                oc.table = table_index(table);
                trace_.called_slots.emplace(oc.table, slot);
            }
            open_.push_back(std::move(oc));
            f.outcall = true;
        }
        frames_.push_back(f);
    }

    void on_return(Addr caller, Addr callee, std::span<const uint64_t> results) override
    {
        const Frame f = frames_.back();
        frames_.pop_back();
        if (f.target && caller != l_.target)
            sync();
        if (f.outcall)
        {
            auto oc = std::move(open_.back());
            open_.pop_back();
            diff_into(oc.nested);
            oc.results = values(l_.store.function(callee).type.results, results);
            sink().push_back(std::move(oc));
        }
    }

    void on_unwind(Addr, Addr) override
    {
        const Frame f = frames_.back();
        frames_.pop_back();
        if (f.outcall)
        {
            auto oc = std::move(open_.back());
            open_.pop_back();
            oc.trapped = true;
            sink().push_back(std::move(oc));
        }
    }

private:
    struct Frame
    {
        bool target;
        uint32_t act;
        uint32_t function;
        bool outcall;
    };

    std::vector<trace::Event>& sink() { return open_.empty() ? top_ : open_.back().nested; }

    uint32_t table_index(Addr table) const
    {
        for (size_t i = 0; i < tables_.size(); ++i)
            if (tables_[i] == table)
                return static_cast<uint32_t>(i);
        return 0;
    }

    std::vector<Value> values(const std::vector<ValType>& types, std::span<const uint64_t> raw) const
    {
        std::vector<Value> out;
        for (size_t i = 0; i < types.size() && i < raw.size(); ++i)
            out.push_back({types[i], tagger_.tag(types[i], raw[i])});
        return out;
    }

    void sync()
    {
        std::vector<trace::Event> scratch;
        diff_into(scratch);
    }

    // Appends the writes that turn the shadow into the current state, then adopts it.
    void diff_into(std::vector<trace::Event>& out)
    {
        if (mem_ != no_addr)
        {
            const auto& m = l_.store.memory(mem_);
            if (m.data.size() != mem_shadow_.size())
            {
                out.push_back(trace::MemoryGrow{m.pages()});
                mem_shadow_.resize(m.data.size(), 0);
            }
            const size_t n = m.data.size();
            const uint8_t* a = m.data.data();
            uint8_t* b = mem_shadow_.data();
            constexpr size_t chunk = 4096;
            size_t i = 0;
            while (i < n)
            {
                if (i % chunk == 0 && i + chunk <= n && std::memcmp(a + i, b + i, chunk) == 0)
                {
                    i += chunk;
                    continue;
                }
                if (a[i] == b[i])
                {
                    ++i;
                    continue;
                }
                size_t j = i;
                while (j < n && a[j] != b[j])
                    ++j;
                out.push_back(trace::MemoryWrite{static_cast<uint32_t>(i), {a + i, a + j}});
                std::memcpy(b + i, a + i, j - i);
                i = j;
            }
        }
        for (size_t g = 0; g < globals_.size(); ++g)
        {
            const auto& gi = l_.store.global(globals_[g]);
            const auto v = tagger_.tag(gi.type.type, gi.bits);
            if (v != glob_shadow_[g])
            {
                out.push_back(trace::GlobalWrite{static_cast<uint32_t>(g), {gi.type.type, v}});
                glob_shadow_[g] = v;
            }
        }
        for (size_t t = 0; t < tables_.size(); ++t)
        {
            const auto& ti = l_.store.table(tables_[t]);
            auto& sh = tab_shadow_[t];
            if (ti.elems.size() != sh.size())
            {
                out.push_back(trace::TableGrow{static_cast<uint32_t>(t), static_cast<uint32_t>(ti.elems.size())});
                sh.resize(ti.elems.size(), null_ref);
            }
            for (size_t s = 0; s < sh.size(); ++s)
            {
                const auto v = tagger_.tag(ti.elems[s]);
                if (v != sh[s])
                {
                    out.push_back(trace::TableWrite{
                        static_cast<uint32_t>(t), static_cast<uint32_t>(s), {ti.type.elem, v}});
                    sh[s] = v;
                }
            }
        }
    }

    Linked& l_;
    Tagger tagger_;
    trace::Trace trace_;
    Addr mem_ = no_addr;
    std::vector<Addr> globals_;
    std::vector<Addr> tables_;
    std::vector<uint8_t> mem_shadow_;
    std::vector<uint64_t> glob_shadow_;
    std::vector<std::vector<uint64_t>> tab_shadow_;
    std::vector<Frame> frames_;
    std::vector<trace::OutCallReturn> open_;
    std::vector<trace::Event> top_;
    uint32_t next_act_ = 0;
    uint32_t next_oc_ = 0;
};

class BoundaryObserver final : public CallObserver
{
public:
    BoundaryObserver(const Store& store, Addr target, const std::unordered_map<Addr, uint32_t>& origin,
        std::optional<Addr> memory, std::vector<Addr> globals)
        : store_{store}, target_{target}, tagger_{store, origin}, memory_{memory}, globals_{std::move(globals)}
    {}

    std::vector<BoundaryStep> steps;

    void on_call(Addr caller, Addr callee, std::span<const uint64_t> args, uint32_t, Addr) override
    {
        const bool into = callee == target_;
        const bool from = caller != no_addr && caller == target_;
        if (into && !from)
            add(BoundaryStep::entry, 0, store_.function(callee).type.params, args);
        else if (from && !into)
            add(BoundaryStep::outcall, tagger_.function(callee), store_.function(callee).type.params, args);
    }

    void on_return(Addr caller, Addr callee, std::span<const uint64_t> results) override
    {
        const bool into = callee == target_;
        const bool from = caller != no_addr && caller == target_;
        if (into && !from)
            add(BoundaryStep::target_return, 0, store_.function(callee).type.results, results);
        else if (from && !into)
            add(BoundaryStep::outcall_return, tagger_.function(callee), store_.function(callee).type.results,
                results);
    }

    void on_unwind(Addr, Addr) override {}

private:
    void add(BoundaryStep::Kind k, uint32_t fn, const std::vector<ValType>& types, std::span<const uint64_t> raw)
    {
        BoundaryStep s;
        s.kind = k;
        s.function = fn;
        for (size_t i = 0; i < types.size() && i < raw.size(); ++i)
            s.values.push_back(tagger_.tag(types[i], raw[i]));
        s.state = digest();
        steps.push_back(std::move(s));
    }

    uint64_t digest() const
    {
        uint64_t h = 0xcbf29ce484222325ULL;
        if (memory_)
        {
            const auto& m = store_.memory(*memory_);
            const uint64_t size = m.data.size();
            h = fnv(h, &size, sizeof size);
            h = fnv(h, m.data.data(), m.data.size());
        }
        for (const auto g : globals_)
        {
            const auto& gi = store_.global(g);
            const auto v = tagger_.tag(gi.type.type, gi.bits);
            h = fnv(h, &v, sizeof v);
        }
        return h;
    }

    const Store& store_;
    Addr target_;
    Tagger tagger_;
    std::optional<Addr> memory_;
    std::vector<Addr> globals_;
};

}  // namespace

RunOutcome run_partition(const PartitionedProgram& p, std::string_view entry, const ExecLimits& limits)
{
    Linked l{limits};
    return run_guarded(l.store, l.env, [&] {
        l.link(p);
        l.run(p, entry);
    });
}

RecordedRun run_partition_recording(const PartitionedProgram& p, std::string_view entry, const ExecLimits& limits)
{
    Linked l{limits};
    std::optional<Recorder> rec;
    RecordedRun r;
    r.outcome = run_guarded(l.store, l.env, [&] {
        l.link(p);
        rec.emplace(l, p);
        l.store.set_observer(&*rec);
        l.run(p, entry);
    });
    l.store.set_observer(nullptr);
    if (!rec)
        throw InstantiationFailed{"partition did not link: " + r.outcome.message};
    r.trace = rec->finish(entry);
    return r;
}

BoundaryLog observe_partition(const PartitionedProgram& p, std::string_view entry, const ExecLimits& limits)
{
    Linked l{limits};
    std::optional<BoundaryObserver> obs;
    BoundaryLog log;
    log.outcome = run_guarded(l.store, l.env, [&] {
        l.link(p);
        std::vector<Addr> globals{l.rem->globals.begin(), l.rem->globals.end()};
        globals.resize(std::min<size_t>(globals.size(), p.wiring.input_globals));
        obs.emplace(l.store, l.target, l.origin,
            l.rem->memories.empty() ? std::nullopt : std::optional{l.rem->memories[0]}, std::move(globals));
        l.store.set_observer(&*obs);
        l.run(p, entry);
    });
    l.store.set_observer(nullptr);
    if (obs)
        log.steps = std::move(obs->steps);
    return log;
}

BoundaryLog observe_module(const wasm::Module& m, uint32_t target, const std::map<uint32_t, uint32_t>& origin,
    uint32_t globals, std::string_view entry, const ExecLimits& limits)
{
    Store store{limits};
    HostEnvironment env{store};
    auto module = std::make_shared<const wasm::Module>(m);
    std::unordered_map<Addr, uint32_t> by_addr;
    std::optional<BoundaryObserver> obs;
    BoundaryLog log;
    log.outcome = run_guarded(store, env, [&] {
        auto& inst = store.instantiate(
            module, [&](const wasm::Import& imp) { return env.resolve(imp, m); }, "", false);
        for (const auto& [idx, orig] : origin)
            if (idx < inst.funcs.size())
                by_addr.emplace(store.resolve(inst.funcs[idx]), orig);
        std::vector<Addr> gs{inst.globals.begin(), inst.globals.end()};
        gs.resize(std::min<size_t>(gs.size(), globals));
        obs.emplace(store, store.resolve(inst.funcs.at(target)), by_addr,
            inst.memories.empty() ? std::nullopt : std::optional{inst.memories[0]}, std::move(gs));
        store.set_observer(&*obs);
        if (m.start)
            store.invoke(inst.funcs[*m.start], {});
        const auto e = inst.find_export(entry);
        if (!e || e->kind != ExternKind::func)
            throw InstantiationFailed{"no exported function named '" + std::string{entry} + "'"};
        const auto args = default_arguments(store.function(e->addr).type);
        store.invoke(e->addr, args);
    });
    store.set_observer(nullptr);
    if (obs)
        log.steps = std::move(obs->steps);
    return log;
}

}  // namespace rr::exec
