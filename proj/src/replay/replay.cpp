// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/replay/replay.hpp"
#include "rr/error.hpp"
#include "rr/wasm/code_writer.hpp"
#include "rr/wasm/transform.hpp"
#include <cstring>
#include <functional>
#include <set>

namespace rr::replay
{
using trace::Event;
using trace::OutCallReturn;
using trace::TargetEntry;
using trace::Value;
using wasm::CodeWriter;
using wasm::ExternKind;
using wasm::IndexSpace;
using wasm::Module;
using wasm::Op;
using wasm::ValType;

const char* to_string(Role r) noexcept
{
    switch (r)
    {
    case Role::replayed:
        return "replayed";
    case Role::emptied:
        return "emptied";
    case Role::trampoline:
        return "trampoline";
    case Role::driver:
        return "driver";
    }
    return "?";
}

const ReplayFunction* ReplayModule::find(uint32_t f, Role role) const
{
    for (const auto& rf : functions)
        if (rf.input_function == f && rf.role == role)
            return &rf;
    return nullptr;
}

namespace
{
constexpr uint32_t target_func = 0;
constexpr uint32_t no_caller = 0xffffffff;
constexpr size_t inline_store_limit = 16;

struct Step
{
    std::vector<const Event*> writes;
    const TargetEntry* entry;
};

// Consecutive top-level entries made by one outside activation.
struct Segment
{
    uint32_t caller = no_caller;
    std::optional<uint32_t> activation;
    std::vector<Step> steps;
};

class Synthesizer
{
public:
    Synthesizer(const trace::Trace& t, const split::BoundaryMap& w, const Module& r) : t_{t}, w_{w}, r_{r} {}

    ReplayModule run()
    {
        q_.types = r_.types;
        const auto& timp = r_.imports.back();
        if (timp.module != split::target_module_name)
            throw Error{"replay: remaining side has no target import"};
        target_type_ = r_.types.at(std::get<uint32_t>(timp.desc));
        q_.imports.push_back(timp);

        collect_calls(t_.events);
        for (const auto f : w_.target_imports)
            calls_[f];
        plan_segments();
        assign_functions();
        declare_state();
        emit_bodies();
        finish_exports();
        if (!target_used_)
            drop_target_import();
        wasm::declare_function_references(q_);
        q_.has_data_count = !q_.data.empty() && wasm::uses_data_count(q_);
        out_.module = std::move(q_);
        return std::move(out_);
    }

private:
    void collect_calls(const std::vector<Event>& events)
    {
        for (const auto& e : events)
            if (const auto* oc = std::get_if<OutCallReturn>(&e))
            {
                calls_[oc->function].push_back(oc);
                collect_calls(oc->nested);
            }
    }

    void plan_segments()
    {
        bool entered = false;
        std::vector<const Event*> pending;
        for (const auto& e : t_.events)
        {
            if (const auto* te = std::get_if<TargetEntry>(&e))
            {
                if (te->internal())
                    continue;
                entered = true;
                uint32_t caller = no_caller;
                std::optional<uint32_t> act;
                if (!te->chain.empty() && te->chain.back().function != no_caller)
                {
                    caller = te->chain.back().function;
                    act = te->chain.back().activation;
                    for (size_t i = 0; i + 1 < te->chain.size(); ++i)
                        ancestors_.insert(te->chain[i].function);
                }
                if (segments_.empty() || segments_.back().caller != caller || segments_.back().activation != act)
                    segments_.push_back({caller, act, {}});
                segments_.back().steps.push_back({std::move(pending), te});
                pending.clear();
            }
            else if (e.is_write())
            {
                if (entered)
                    pending.push_back(&e);
                else
                    folded_.push_back(&e);
            }
        }
        for (const auto& s : segments_)
            if (s.caller != no_caller)
                callers_[s.caller].push_back(&s);
    }

    uint32_t input_type(uint32_t f) const
    {
        return r_.function_type_index(w_.remaining_map.lookup(IndexSpace::func, f));
    }

    uint32_t add_function(uint32_t type, std::optional<uint32_t> input, Role role)
    {
        const auto idx = static_cast<uint32_t>(q_.imports.size() + q_.functions.size());
        q_.functions.push_back({type, {}, {}});
        out_.functions.push_back({idx, input, role, {}});
        return idx;
    }

    void assign_functions()
    {
        for (const auto& [f, calls] : calls_)
        {
            if (f == no_caller || !w_.remaining_exports.contains(f))
                throw Error{"replay: out-call to an unknown function"};
            stub_[f] = add_function(input_type(f), f, calls.empty() ? Role::emptied : Role::replayed);
        }
        for (const auto f : ancestors_)
            if (!stub_.contains(f) && !callers_.contains(f) && w_.remaining_exports.contains(f))
                emptied_[f] = add_function(input_type(f), f, Role::emptied);
        for (const auto& [f, segs] : callers_)
            caller_fn_[f] = add_function(input_type(f), f, Role::replayed);

        const auto* e = r_.find_export(t_.entry);
        const uint32_t dtype = e && e->kind == ExternKind::func ? r_.function_type_index(e->index)
                                                                 : q_.intern_type({});
        driver_ = add_function(dtype, std::nullopt, Role::driver);
    }

    uint32_t add_counter()
    {
        const auto idx = static_cast<uint32_t>(q_.globals.size());
        CodeWriter c;
        c.i32_const(0).end();
        q_.globals.push_back({{ValType::i32, true}, c.take()});
        return idx;
    }

    void declare_state()
    {
        std::vector<Value> globals = t_.initial_globals;
        globals.resize(r_.globals.size());
        std::vector<uint32_t> table_sizes = t_.initial_table_sizes;
        table_sizes.resize(r_.tables.size());
        for (size_t i = 0; i < r_.tables.size(); ++i)
            table_sizes[i] = std::max(table_sizes[i], r_.tables[i].limits.min);
        uint32_t pages = t_.initial_pages;
        std::map<std::pair<uint32_t, uint32_t>, Value> slots;
        std::vector<const trace::MemoryWrite*> data;

        for (const auto* e : folded_)
        {
            if (const auto* mw = std::get_if<trace::MemoryWrite>(e))
                data.push_back(mw);
            else if (const auto* g = std::get_if<trace::MemoryGrow>(e))
                pages = g->new_pages;
            else if (const auto* gw = std::get_if<trace::GlobalWrite>(e))
            {
                if (gw->index < globals.size())
                    globals[gw->index] = gw->value;
            }
            else if (const auto* tg = std::get_if<trace::TableGrow>(e))
            {
                if (tg->table < table_sizes.size())
                    table_sizes[tg->table] = tg->new_size;
            }
            else if (const auto* tw = std::get_if<trace::TableWrite>(e))
                slots[{tw->table, tw->slot}] = tw->value;
        }

        if (!r_.memories.empty())
        {
            auto mem = r_.memories[0];
            mem.limits.min = std::max(pages, mem.limits.min);
            q_.memories.push_back(mem);
        }
        for (size_t i = 0; i < r_.tables.size(); ++i)
        {
            auto tab = r_.tables[i];
            tab.limits.min = table_sizes[i];
            q_.tables.push_back(tab);
        }
        for (size_t i = 0; i < r_.globals.size(); ++i)
        {
            const auto type = r_.globals[i].type;
            Value v = globals[i];
            if (v.type != type.type)
                v = {type.type, wasm::is_reference(type.type) ? exec::null_ref : 0};
            CodeWriter c;
            emit_value(c, v);
            c.end();
            q_.globals.push_back({type, c.take()});
        }
        for (const auto* mw : data)
        {
            CodeWriter off;
            off.i32_const(static_cast<int32_t>(mw->offset)).end();
            q_.data.push_back({wasm::SegmentMode::active, 0, off.take(), mw->bytes});
        }
        for (const auto& [key, v] : slots)
        {
            if (v.bits == exec::null_ref)
                continue;
            const auto fn = function_for(static_cast<uint32_t>(v.bits));
            if (!fn)
                continue;
            CodeWriter off;
            off.i32_const(static_cast<int32_t>(key.second)).end();
            wasm::ElemSegment seg;
            seg.mode = wasm::SegmentMode::active;
            seg.table = key.first;
            seg.offset = off.take();
            seg.entries.push_back(*fn);
            q_.elems.push_back(std::move(seg));
        }
    }

    // Replay function that stands for input function `f` when referenced as a value. Functions
    // the target never called get a placeholder that traps.
    std::optional<uint32_t> function_for(uint32_t f)
    {
        if (f == t_.target_index)
        {
            target_used_ = true;
            return target_func;
        }
        for (const auto* roles : {&stub_, &emptied_, &caller_fn_, &placeholder_})
            if (const auto it = roles->find(f); it != roles->end())
                return it->second;
        if (!w_.remaining_exports.contains(f))
            return std::nullopt;
        const auto idx = add_function(input_type(f), f, Role::emptied);
        CodeWriter c;
        c.op(Op::unreachable).end();
        defined(idx).code = c.take();
        placeholder_[f] = idx;
        return idx;
    }

    void emit_value(CodeWriter& c, const Value& v)
    {
        switch (v.type)
        {
        case ValType::i32:
            c.i32_const(v.as_i32());
            break;
        case ValType::i64:
            c.i64_const(v.as_i64());
            break;
        case ValType::f32:
            c.f32_const(static_cast<uint32_t>(v.bits));
            break;
        case ValType::f64:
            c.f64_const(v.bits);
            break;
        case ValType::funcref:
            if (v.bits == exec::null_ref)
                c.ref_null();
            else if (const auto fn = function_for(static_cast<uint32_t>(v.bits)))
                c.op(Op::ref_func, *fn);
            else
                throw TypeUnavailable{"reference to function " + std::to_string(v.bits) + " has no replay counterpart"};
            break;
        default:
            throw TypeUnavailable{std::string{"values of type "} + wasm::to_string(v.type) + " cannot be replayed"};
        }
    }

    void emit_zero(CodeWriter& c, ValType t)
    {
        emit_value(c, {t, wasm::is_reference(t) ? exec::null_ref : 0});
    }

    void emit_values(CodeWriter& c, const std::vector<ValType>& types, const std::vector<Value>& vals)
    {
        if (types.size() != vals.size())
            throw TypeUnavailable{"recorded value count does not match the signature"};
        for (size_t i = 0; i < vals.size(); ++i)
        {
            if (vals[i].type != types[i])
                throw TypeUnavailable{"recorded value type does not match the signature"};
            emit_value(c, vals[i]);
        }
    }

    void emit_write(CodeWriter& c, const Event& e)
    {
        if (const auto* mw = std::get_if<trace::MemoryWrite>(&e))
        {
            const auto& b = mw->bytes;
            if (b.size() > inline_store_limit)
            {
                const auto seg = static_cast<uint32_t>(q_.data.size());
                q_.data.push_back({wasm::SegmentMode::passive, 0, {}, b});
                c.i32_const(static_cast<int32_t>(mw->offset)).i32_const(0);
                c.i32_const(static_cast<int32_t>(b.size())).memory_init(seg);
                return;
            }
            size_t i = 0;
            while (i < b.size())
            {
                const auto addr = static_cast<int32_t>(mw->offset + i);
                const size_t left = b.size() - i;
                if (left >= 8)
                {
                    int64_t v;
                    std::memcpy(&v, b.data() + i, 8);
                    c.i32_const(addr).i64_const(v).store(Op::i64_store);
                    i += 8;
                }
                else if (left >= 4)
                {
                    int32_t v;
                    std::memcpy(&v, b.data() + i, 4);
                    c.i32_const(addr).i32_const(v).store(Op::i32_store);
                    i += 4;
                }
                else if (left >= 2)
                {
                    int16_t v;
                    std::memcpy(&v, b.data() + i, 2);
                    c.i32_const(addr).i32_const(v).store(Op::i32_store16);
                    i += 2;
                }
                else
                {
                    c.i32_const(addr).i32_const(b[i]).store(Op::i32_store8);
                    i += 1;
                }
            }
        }
        else if (const auto* g = std::get_if<trace::MemoryGrow>(&e))
        {
            c.i32_const(static_cast<int32_t>(g->new_pages)).op(Op::memory_size, 0).op(Op::i32_sub);
            c.op(Op::memory_grow, 0).op(Op::drop);
        }
        else if (const auto* gw = std::get_if<trace::GlobalWrite>(&e))
        {
            if (gw->index >= r_.globals.size() || !r_.globals[gw->index].type.is_mutable)
                throw TypeUnavailable{"write to an immutable or unknown global"};
            emit_value(c, gw->value);
            c.op(Op::global_set, gw->index);
        }
        else if (const auto* tg = std::get_if<trace::TableGrow>(&e))
        {
            c.ref_null().i32_const(static_cast<int32_t>(tg->new_size)).op(Op::table_size, tg->table);
            c.op(Op::i32_sub).op(Op::table_grow, tg->table).op(Op::drop);
        }
        else if (const auto* tw = std::get_if<trace::TableWrite>(&e))
        {
            c.i32_const(static_cast<int32_t>(tw->slot));
            const auto fn = tw->value.bits == exec::null_ref ? std::nullopt
                                                              : function_for(static_cast<uint32_t>(tw->value.bits));
            if (fn)
                c.op(Op::ref_func, *fn);
            else
                c.ref_null();
            c.op(Op::table_set, tw->table);
        }
    }

    // Calls the target with the recorded arguments; results stay on the stack iff `keep`.
    void emit_entry(CodeWriter& c, const TargetEntry& e, bool keep)
    {
        emit_values(c, target_type_.params, e.args);
        c.op(Op::call, target_func);
        target_used_ = true;
        if (!keep)
            for (size_t i = 0; i < target_type_.results.size(); ++i)
                c.op(Op::drop);
    }

    // Counter-driven dispatch: the k-th call runs cases[k]; later calls trap.
    void emit_dispatch(CodeWriter& c, const std::vector<std::function<void(CodeWriter&)>>& cases)
    {
        const auto counter = add_counter();
        const auto n = static_cast<uint32_t>(cases.size());
        c.op(Op::global_get, counter).i32_const(1).op(Op::i32_add).op(Op::global_set, counter);
        for (uint32_t i = 0; i <= n; ++i)
            c.block();
        std::vector<uint32_t> labels(n);
        for (uint32_t i = 0; i < n; ++i)
            labels[i] = i;
        c.op(Op::global_get, counter).i32_const(1).op(Op::i32_sub).br_table(labels, n);
        for (const auto& body : cases)
        {
            c.end();
            body(c);
        }
        c.end();
        c.op(Op::unreachable);
    }

    wasm::bytes stub_body(uint32_t f)
    {
        const auto& calls = calls_.at(f);
        const auto& type = q_.types.at(input_type(f));
        CodeWriter c;
        if (calls.empty())
        {
            c.op(Op::unreachable).end();
            return c.take();
        }
        std::vector<std::function<void(CodeWriter&)>> cases;
        for (const auto* oc : calls)
            cases.push_back([this, oc, &type](CodeWriter& w) {
                for (const auto& e : oc->nested)
                {
                    if (e.is_write())
                        emit_write(w, e);
                    else if (const auto* te = std::get_if<TargetEntry>(&e); te && !te->internal())
                        emit_entry(w, *te, false);
                }
                if (oc->trapped)
                    w.op(Op::unreachable);
                else
                {
                    emit_values(w, type.results, oc->results);
                    w.op(Op::return_);
                }
            });
        emit_dispatch(c, cases);
        c.end();
        return c.take();
    }

    void emit_segment(CodeWriter& c, const Segment& s, const wasm::FuncType& type)
    {
        bool kept = false;
        for (size_t i = 0; i < s.steps.size(); ++i)
        {
            for (const auto* w : s.steps[i].writes)
                emit_write(c, *w);
            const bool keep = i + 1 == s.steps.size() && target_type_.results == type.results;
            emit_entry(c, *s.steps[i].entry, keep);
            kept = keep;
        }
        if (!kept)
            for (const auto t : type.results)
                emit_zero(c, t);
    }

    wasm::bytes caller_body(uint32_t f)
    {
        const auto& segs = callers_.at(f);
        const auto type = q_.types.at(input_type(f));
        CodeWriter c;
        if (segs.size() == 1)
            emit_segment(c, *segs[0], type);
        else
        {
            std::vector<std::function<void(CodeWriter&)>> cases;
            for (const auto* s : segs)
                cases.push_back([this, s, &type](CodeWriter& w) {
                    emit_segment(w, *s, type);
                    w.op(Op::return_);
                });
            emit_dispatch(c, cases);
        }
        c.end();
        return c.take();
    }

    wasm::bytes emptied_body(uint32_t type)
    {
        CodeWriter c;
        for (const auto t : q_.types.at(type).results)
            emit_zero(c, t);
        c.end();
        return c.take();
    }

    wasm::bytes driver_body(uint32_t type)
    {
        CodeWriter c;
        for (const auto& s : segments_)
        {
            if (s.caller == no_caller)
            {
                for (const auto& step : s.steps)
                {
                    for (const auto* w : step.writes)
                        emit_write(c, *w);
                    emit_entry(c, *step.entry, false);
                }
                continue;
            }
            const auto& ft = q_.types.at(input_type(s.caller));
            for (const auto p : ft.params)
                emit_zero(c, p);
            c.op(Op::call, caller_fn_.at(s.caller));
            for (size_t i = 0; i < ft.results.size(); ++i)
                c.op(Op::drop);
        }
        for (const auto t : q_.types.at(type).results)
            emit_zero(c, t);
        c.end();
        return c.take();
    }

    wasm::Function& defined(uint32_t idx) { return q_.functions.at(idx - q_.imports.size()); }

    void emit_bodies()
    {
        for (const auto& [f, idx] : stub_)
            defined(idx).code = stub_body(f);
        for (const auto& [f, idx] : emptied_)
            defined(idx).code = emptied_body(defined(idx).type);
        for (const auto& [f, idx] : caller_fn_)
            defined(idx).code = caller_body(f);
        defined(driver_).code = driver_body(defined(driver_).type);
    }

    void finish_exports()
    {
        auto add = [&](const std::string& name, uint32_t idx) {
            q_.exports.push_back({name, ExternKind::func, idx});
            for (auto& rf : out_.functions)
                if (rf.index == idx)
                {
                    rf.export_name = name;
                    out_.provenance[name] = rf.role;
                }
        };
        for (const auto& [f, idx] : stub_)
            add(w_.remaining_exports.at(f), idx);
        for (const auto& [f, idx] : emptied_)
            add(w_.remaining_exports.at(f), idx);
        for (const auto& [f, idx] : caller_fn_)
            if (!stub_.contains(f))
                add(w_.remaining_exports.at(f), idx);
        for (const auto& [f, idx] : placeholder_)
            add(w_.remaining_exports.at(f), idx);
        add(t_.entry, driver_);
        for (const auto& s : w_.shared_resources)
        {
            if (s.kind == ExternKind::memory && q_.memories.empty())
                continue;
            q_.exports.push_back({s.export_name, s.kind, s.index});
        }
    }

    void drop_target_import()
    {
        wasm::IndexMap shift = wasm::IndexMap::identity();
        const uint32_t n = static_cast<uint32_t>(q_.imports.size() + q_.functions.size());
        for (uint32_t i = 1; i < n; ++i)
            shift.set(IndexSpace::func, i, i - 1);
        for (auto& f : q_.functions)
            f.code = wasm::remap_function_body(f.code, shift);
        for (auto& g : q_.globals)
            g.init = wasm::remap_expr(g.init, shift);
        for (auto& s : q_.elems)
            for (auto& e : s.entries)
                if (e)
                    e = shift.lookup(IndexSpace::func, *e);
        for (auto& e : q_.exports)
            if (e.kind == ExternKind::func)
                e.index = shift.lookup(IndexSpace::func, e.index);
        for (auto& rf : out_.functions)
            rf.index -= 1;
        q_.imports.clear();
    }

    const trace::Trace& t_;
    const split::BoundaryMap& w_;
    const Module& r_;
    Module q_;
    ReplayModule out_;
    wasm::FuncType target_type_;
    bool target_used_ = false;

    std::map<uint32_t, std::vector<const OutCallReturn*>> calls_;
    std::vector<const Event*> folded_;
    std::vector<Segment> segments_;
    std::map<uint32_t, std::vector<const Segment*>> callers_;
    std::set<uint32_t> ancestors_;

    std::map<uint32_t, uint32_t> stub_;
    std::map<uint32_t, uint32_t> emptied_;
    std::map<uint32_t, uint32_t> caller_fn_;
    std::map<uint32_t, uint32_t> placeholder_;
    uint32_t driver_ = 0;
};

}  // namespace

ReplayModule synthesize_replay(const trace::Trace& t, const split::BoundaryMap& w, const Module& remaining)
{
    return Synthesizer{t, w, remaining}.run();
}

}  // namespace rr::replay
