// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/error.hpp"
#include "rr/exec/store.hpp"
#include "rr/wasm/validate.hpp"
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

namespace rr::exec
{
using wasm::Instr;
using wasm::Op;

namespace
{
constexpr uint64_t page_size = 65536;
constexpr uint32_t max_pages = 65536;
constexpr uint32_t max_table_size = 10'000'000;

template <typename F>
F wasm_min(F a, F b) noexcept
{
    if (std::isnan(a) || std::isnan(b))
        return std::numeric_limits<F>::quiet_NaN();
    if (a == 0 && b == 0)
        return std::signbit(a) ? a : b;
    return a < b ? a : b;
}

template <typename F>
F wasm_max(F a, F b) noexcept
{
    if (std::isnan(a) || std::isnan(b))
        return std::numeric_limits<F>::quiet_NaN();
    if (a == 0 && b == 0)
        return std::signbit(a) ? b : a;
    return a > b ? a : b;
}

template <typename I>
I trunc_checked(double x)
{
    if (std::isnan(x))
        throw Trap{trap::invalid_conversion};
    const double t = std::trunc(x);
    constexpr int bits = std::numeric_limits<I>::digits;
    if constexpr (std::is_signed_v<I>)
    {
        if (!(t >= -std::ldexp(1.0, bits) && t < std::ldexp(1.0, bits)))
            throw Trap{trap::int_overflow};
    }
    else
    {
        if (!(t >= 0.0 && t < std::ldexp(1.0, bits)))
            throw Trap{trap::int_overflow};
    }
    return static_cast<I>(t);
}

template <typename I>
I trunc_sat(double x) noexcept
{
    if (std::isnan(x))
        return 0;
    const double t = std::trunc(x);
    constexpr int bits = std::numeric_limits<I>::digits;
    if constexpr (std::is_signed_v<I>)
    {
        if (t < -std::ldexp(1.0, bits))
            return std::numeric_limits<I>::min();
        if (t >= std::ldexp(1.0, bits))
            return std::numeric_limits<I>::max();
    }
    else
    {
        if (t <= 0.0)
            return 0;
        if (t >= std::ldexp(1.0, bits))
            return std::numeric_limits<I>::max();
    }
    return static_cast<I>(t);
}

std::pair<uint32_t, uint32_t> block_arity(const wasm::Module& m, uint64_t c)
{
    const auto bt = static_cast<int64_t>(c);
    if (bt >= 0)
    {
        const auto& t = m.types[static_cast<size_t>(bt)];
        return {static_cast<uint32_t>(t.params.size()), static_cast<uint32_t>(t.results.size())};
    }
    if (bt == -64)
        return {0, 0};
    return {0, 1};
}

uint64_t zero_of(ValType t) noexcept
{
    return wasm::is_reference(t) ? null_ref : 0;
}
}  // namespace

std::optional<Extern> Instance::find_export(std::string_view export_name) const
{
    const auto* e = module->find_export(export_name);
    if (e == nullptr)
        return std::nullopt;
    switch (e->kind)
    {
    case wasm::ExternKind::func:
        return Extern{e->kind, funcs[e->index]};
    case wasm::ExternKind::table:
        return Extern{e->kind, tables[e->index]};
    case wasm::ExternKind::memory:
        return Extern{e->kind, memories[e->index]};
    case wasm::ExternKind::global:
        return Extern{e->kind, globals[e->index]};
    }
    return std::nullopt;
}

Store::Store(ExecLimits limits) : limits_{limits}
{
    stack_.reserve(1 << 16);
    reset_clock();
}

Store::~Store() = default;

void Store::reset_clock()
{
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(limits_.wall);
}

Addr Store::add_host_function(wasm::FuncType type, HostFunction fn)
{
    FunctionInstance f;
    f.type = std::move(type);
    f.host = std::move(fn);
    funcs_.push_back(std::move(f));
    return static_cast<Addr>(funcs_.size() - 1);
}

Addr Store::add_alias(wasm::FuncType type)
{
    FunctionInstance f;
    f.type = std::move(type);
    f.is_alias = true;
    funcs_.push_back(std::move(f));
    return static_cast<Addr>(funcs_.size() - 1);
}

void Store::bind_alias(Addr alias, Addr target)
{
    auto& f = funcs_.at(alias);
    if (!f.is_alias)
        throw Error{"bind_alias on a non-alias function"};
    if (funcs_.at(target).type != f.type)
        throw InstantiationFailed{"alias bound to a function of a different type"};
    f.alias_of = target;
}

Addr Store::resolve(Addr a) const
{
    for (size_t hops = 0; funcs_[a].is_alias; ++hops)
    {
        if (funcs_[a].alias_of == no_addr)
            throw Error{"unbound function alias"};
        if (hops > funcs_.size())
            throw Error{"cyclic function alias"};
        a = funcs_[a].alias_of;
    }
    return a;
}

void Store::charge_memory(uint64_t bytes)
{
    if (memory_bytes_ + bytes > limits_.memory_bytes)
        throw ResourceExhausted{"memory limit exceeded"};
    memory_bytes_ += bytes;
}

bool Store::grow_memory(MemoryInstance& mem, uint32_t delta)
{
    const uint64_t old_pages = mem.pages();
    const uint64_t new_pages = old_pages + delta;
    if (new_pages > mem.max_pages.value_or(max_pages) || new_pages > max_pages)
        return false;
    const uint64_t bytes = uint64_t{delta} * page_size;
    if (memory_bytes_ + bytes > limits_.memory_bytes)
        return false;
    memory_bytes_ += bytes;
    mem.data.resize(new_pages * page_size);
    return true;
}

uint64_t Store::eval_const(const Instance& inst, std::span<const uint8_t> expr) const
{
    const auto body = wasm::decode_expr(expr);
    uint64_t v = 0;
    for (const auto& i : body.instrs)
    {
        switch (i.op)
        {
        case Op::i32_const:
            v = static_cast<uint32_t>(i.c);
            break;
        case Op::i64_const:
        case Op::f32_const:
        case Op::f64_const:
            v = i.c;
            break;
        case Op::global_get:
            v = globals_[inst.globals[i.a]].bits;
            break;
        case Op::ref_null:
            v = null_ref;
            break;
        case Op::ref_func:
            v = inst.funcs[i.a];
            break;
        case Op::end:
            break;
        default:
            throw InstantiationFailed{"unsupported instruction in constant expression"};
        }
    }
    return v;
}

Instance& Store::instantiate(std::shared_ptr<const wasm::Module> module, const ImportResolver& resolve_import,
    std::string name, bool run_start)
{
    const auto& m = *module;
    try
    {
        wasm::check_module(m);
    }
    catch (const ValidationError& e)
    {
        throw InstantiationFailed{std::string{"invalid module: "} + e.what()};
    }

    auto inst = std::make_unique<Instance>();
    inst->name = std::move(name);
    inst->module = module;

    for (const auto& imp : m.imports)
    {
        const auto ext = resolve_import(imp);
        const std::string what = imp.module + "." + imp.name;
        if (!ext)
            throw InstantiationFailed{"unresolved import " + what};
        if (ext->kind != imp.kind())
            throw InstantiationFailed{"import " + what + " has the wrong kind"};
        switch (imp.kind())
        {
        case wasm::ExternKind::func:
            if (funcs_.at(ext->addr).type != m.types.at(std::get<uint32_t>(imp.desc)))
                throw InstantiationFailed{"import " + what + " has the wrong type"};
            inst->funcs.push_back(ext->addr);
            break;
        case wasm::ExternKind::table:
        {
            const auto& want = std::get<wasm::TableType>(imp.desc);
            const auto& have = tables_.at(ext->addr);
            if (have.type.elem != want.elem || have.elems.size() < want.limits.min ||
                (want.limits.max && (!have.type.limits.max || *have.type.limits.max > *want.limits.max)))
                throw InstantiationFailed{"import " + what + " has an incompatible table type"};
            inst->tables.push_back(ext->addr);
            break;
        }
        case wasm::ExternKind::memory:
        {
            const auto& want = std::get<wasm::MemoryType>(imp.desc);
            const auto& have = memories_.at(ext->addr);
            if (have.pages() < want.limits.min ||
                (want.limits.max && (!have.max_pages || *have.max_pages > *want.limits.max)))
                throw InstantiationFailed{"import " + what + " has incompatible memory limits"};
            inst->memories.push_back(ext->addr);
            break;
        }
        case wasm::ExternKind::global:
            if (globals_.at(ext->addr).type != std::get<wasm::GlobalType>(imp.desc))
                throw InstantiationFailed{"import " + what + " has the wrong global type"};
            inst->globals.push_back(ext->addr);
            break;
        }
    }
    inst->imported_funcs = static_cast<uint32_t>(inst->funcs.size());

    for (uint32_t i = 0; i < m.functions.size(); ++i)
    {
        const auto& f = m.functions[i];
        FunctionInstance fi;
        fi.type = m.types[f.type];
        fi.instance = inst.get();
        fi.index = inst->imported_funcs + i;
        funcs_.push_back(std::move(fi));
        inst->funcs.push_back(static_cast<Addr>(funcs_.size() - 1));

        CompiledCode cc;
        cc.body = wasm::decode_body(f.code);
        for (const auto& l : f.locals)
            cc.locals.insert(cc.locals.end(), l.count, l.type);
        inst->code.push_back(std::move(cc));
    }
    for (const auto& t : m.tables)
    {
        tables_.push_back({t, std::vector<uint64_t>(t.limits.min, null_ref)});
        inst->tables.push_back(static_cast<Addr>(tables_.size() - 1));
    }
    for (const auto& mt : m.memories)
    {
        charge_memory(uint64_t{mt.limits.min} * page_size);
        MemoryInstance mi;
        mi.data.resize(uint64_t{mt.limits.min} * page_size);
        mi.max_pages = mt.limits.max;
        memories_.push_back(std::move(mi));
        inst->memories.push_back(static_cast<Addr>(memories_.size() - 1));
    }
    for (const auto& g : m.globals)
    {
        const auto v = eval_const(*inst, g.init);
        globals_.push_back({g.type, v});
        inst->globals.push_back(static_cast<Addr>(globals_.size() - 1));
    }
    for (const auto& seg : m.elems)
    {
        std::vector<uint64_t> refs;
        refs.reserve(seg.entries.size());
        for (const auto& e : seg.entries)
            refs.push_back(e ? inst->funcs[*e] : null_ref);
        inst->elems.push_back(std::move(refs));
    }
    inst->data_dropped.assign(m.data.size(), false);

    auto& ref = *inst;
    instances_.push_back(std::move(inst));

    for (size_t i = 0; i < m.elems.size(); ++i)
    {
        const auto& seg = m.elems[i];
        if (seg.mode == wasm::SegmentMode::active)
        {
            const auto off = static_cast<uint32_t>(eval_const(ref, seg.offset));
            auto& tab = tables_[ref.tables[seg.table]];
            const auto& src = ref.elems[i];
            if (uint64_t{off} + src.size() > tab.elems.size())
                throw Trap{trap::table_oob};
            std::copy(src.begin(), src.end(), tab.elems.begin() + off);
        }
        if (seg.mode != wasm::SegmentMode::passive)
            ref.elems[i].clear();
    }
    for (size_t i = 0; i < m.data.size(); ++i)
    {
        const auto& seg = m.data[i];
        if (seg.mode != wasm::SegmentMode::active)
            continue;
        const auto off = static_cast<uint32_t>(eval_const(ref, seg.offset));
        auto& mem = memories_[ref.memories[seg.memory]];
        if (uint64_t{off} + seg.init.size() > mem.data.size())
            throw Trap{trap::memory_oob};
        std::copy(seg.init.begin(), seg.init.end(), mem.data.begin() + off);
        ref.data_dropped[i] = true;
    }

    if (run_start && m.start)
        invoke(ref.funcs[*m.start], {});
    return ref;
}

std::vector<Value> Store::invoke(Addr func, std::span<const Value> args)
{
    const auto& type = funcs_.at(func).type;
    if (args.size() != type.params.size())
        throw Error{"wrong number of arguments"};
    for (size_t i = 0; i < args.size(); ++i)
        if (args[i].type != type.params[i])
            throw Error{"argument type mismatch"};

    const size_t base = stack_.size();
    const size_t labels = labels_.size();
    const size_t depth = call_stack_.size();
    for (const auto& a : args)
        stack_.push_back(a.bits);
    try
    {
        call(func, base);
    }
    catch (...)
    {
        stack_.resize(base);
        labels_.resize(labels);
        call_stack_.resize(depth);
        throw;
    }
    std::vector<Value> results;
    for (size_t i = 0; i < type.results.size(); ++i)
        results.push_back({type.results[i], stack_[base + i]});
    stack_.resize(base);
    return results;
}

void Store::call(Addr callee, size_t args_base, uint32_t slot, Addr table)
{
    callee = resolve(callee);
    if (call_stack_.size() >= limits_.max_call_depth)
        throw Trap{trap::stack_exhausted};
    const Addr caller = call_stack_.empty() ? no_addr : call_stack_.back();
    auto& fi = funcs_[callee];
    const size_t nparams = fi.type.params.size();
    const size_t nresults = fi.type.results.size();

    if (observer_ != nullptr)
        observer_->on_call(
            caller, callee, std::span<const uint64_t>{stack_.data() + args_base, nparams}, slot, table);
    call_stack_.push_back(callee);
    try
    {
        if (fi.host)
        {
            std::vector<Value> args;
            args.reserve(nparams);
            for (size_t i = 0; i < nparams; ++i)
                args.push_back({fi.type.params[i], stack_[args_base + i]});
            stack_.resize(args_base);
            const auto results = fi.host(args);
            if (results.size() != nresults)
                throw Error{"host function returned the wrong number of results"};
            for (const auto& r : results)
                stack_.push_back(r.bits);
        }
        else
            run_wasm(callee, args_base);
    }
    catch (Trap& t)
    {
        if (fi.instance != nullptr)
            t.frames().emplace_back(fi.instance->name, fi.index);
        call_stack_.pop_back();
        if (observer_ != nullptr)
            observer_->on_unwind(caller, callee);
        throw;
    }
    catch (...)
    {
        call_stack_.pop_back();
        if (observer_ != nullptr)
            observer_->on_unwind(caller, callee);
        throw;
    }
    call_stack_.pop_back();
    if (observer_ != nullptr)
        observer_->on_return(caller, callee, std::span<const uint64_t>{stack_.data() + args_base, nresults});
}

void Store::run_wasm(Addr callee, size_t base)
{
    const auto& fi = funcs_[callee];
    Instance& inst = *fi.instance;
    const auto& mod = *inst.module;
    const auto& code = inst.code[fi.index - inst.imported_funcs];
    const auto& ins = code.body.instrs;
    const auto& brt = code.body.br_table;

    for (const auto t : code.locals)
        stack_.push_back(zero_of(t));

    const size_t label_base = labels_.size();
    labels_.push_back({static_cast<uint32_t>(ins.size() - 1), static_cast<uint32_t>(stack_.size()),
        static_cast<uint32_t>(fi.type.results.size())});

    MemoryInstance* mem = inst.memories.empty() ? nullptr : &memories_[inst.memories[0]];

    auto pop = [this] {
        const auto v = stack_.back();
        stack_.pop_back();
        return v;
    };
    auto pop_u32 = [&] { return static_cast<uint32_t>(pop()); };
    auto pop_f32 = [&] { return std::bit_cast<float>(static_cast<uint32_t>(pop())); };
    auto pop_f64 = [&] { return std::bit_cast<double>(pop()); };
    auto push = [this](uint64_t v) { stack_.push_back(v); };
    auto push_u32 = [this](uint32_t v) { stack_.push_back(v); };
    auto push_f32 = [this](float v) { stack_.push_back(std::bit_cast<uint32_t>(v)); };
    auto push_f64 = [this](double v) { stack_.push_back(std::bit_cast<uint64_t>(v)); };

    auto address = [&](uint32_t offset, size_t n) -> uint8_t* {
        const uint64_t a = uint64_t{pop_u32()} + offset;
        if (a + n > mem->data.size())
            throw Trap{trap::memory_oob};
        return mem->data.data() + a;
    };
    auto load = [&]<typename T>(const Instr& i) {
        T v;
        std::memcpy(&v, address(i.b, sizeof(T)), sizeof(T));
        return v;
    };
    auto store = [&]<typename T>(const Instr& i, T v) { std::memcpy(address(i.b, sizeof(T)), &v, sizeof(T)); };
    auto table_at = [&](uint32_t idx) -> TableInstance& { return tables_[inst.tables[idx]]; };

    uint32_t pc = 0;
    auto branch = [&](uint32_t depth) {
        const size_t li = labels_.size() - 1 - depth;
        const Label l = labels_[li];
        std::copy(stack_.end() - l.arity, stack_.end(), stack_.begin() + l.height);
        stack_.resize(size_t{l.height} + l.arity);
        pc = l.cont;
        labels_.resize(ins[l.cont].op == Op::loop ? li : li + 1);
    };

    for (;;)
    {
        if (++fuel_used_ > limits_.fuel)
            throw ResourceExhausted{"fuel exhausted"};
        if ((fuel_used_ & 0xffff) == 0 && std::chrono::steady_clock::now() > deadline_)
            throw ResourceExhausted{"wall-clock limit exceeded"};

        const Instr& i = ins[pc];
        switch (i.op)
        {
        case Op::unreachable:
            throw Trap{trap::unreachable};
        case Op::nop:
            break;
        case Op::block:
        {
            const auto [np, nr] = block_arity(mod, i.c);
            labels_.push_back({i.b, static_cast<uint32_t>(stack_.size() - np), nr});
            break;
        }
        case Op::loop:
        {
            const auto [np, nr] = block_arity(mod, i.c);
            labels_.push_back({pc, static_cast<uint32_t>(stack_.size() - np), np});
            break;
        }
        case Op::if_:
        {
            const auto cond = pop_u32();
            const auto [np, nr] = block_arity(mod, i.c);
            labels_.push_back({i.b, static_cast<uint32_t>(stack_.size() - np), nr});
            if (cond == 0)
            {
                pc = i.a != wasm::no_instr ? i.a + 1 : i.b;
                continue;
            }
            break;
        }
        case Op::else_:
            pc = i.b;
            continue;
        case Op::end:
            labels_.pop_back();
            if (labels_.size() == label_base)
            {
                const size_t nr = fi.type.results.size();
                std::copy(stack_.end() - static_cast<ptrdiff_t>(nr), stack_.end(), stack_.begin() + base);
                stack_.resize(base + nr);
                return;
            }
            break;
        case Op::br:
            branch(i.a);
            continue;
        case Op::br_if:
            if (pop_u32() != 0)
            {
                branch(i.a);
                continue;
            }
            break;
        case Op::br_table:
        {
            const auto idx = pop_u32();
            branch(brt[i.a + std::min(idx, i.b)]);
            continue;
        }
        case Op::return_:
            branch(static_cast<uint32_t>(labels_.size() - 1 - label_base));
            continue;
        case Op::call:
        {
            const Addr target = inst.funcs[i.a];
            const auto np = funcs_[target].type.params.size();
            call(target, stack_.size() - np);
            break;
        }
        case Op::call_indirect:
        {
            const auto& tab = table_at(i.b);
            const auto idx = pop_u32();
            if (idx >= tab.elems.size())
                throw Trap{trap::undefined_element};
            const auto ref = tab.elems[idx];
            if (ref == null_ref)
                throw Trap{trap::uninitialized_element};
            const auto target = static_cast<Addr>(ref);
            const auto& expected = mod.types[i.a];
            if (funcs_[target].type != expected)
                throw Trap{trap::indirect_type_mismatch};
            call(target, stack_.size() - expected.params.size(), idx, inst.tables[i.b]);
            break;
        }
        case Op::drop:
            stack_.pop_back();
            break;
        case Op::select:
        case Op::select_t:
        {
            const auto c = pop_u32();
            const auto b = pop();
            const auto a = pop();
            push(c != 0 ? a : b);
            break;
        }
        case Op::local_get:
            push(stack_[base + i.a]);
            break;
        case Op::local_set:
            stack_[base + i.a] = pop();
            break;
        case Op::local_tee:
            stack_[base + i.a] = stack_.back();
            break;
        case Op::global_get:
            push(globals_[inst.globals[i.a]].bits);
            break;
        case Op::global_set:
            globals_[inst.globals[i.a]].bits = pop();
            break;
        case Op::table_get:
        {
            auto& tab = table_at(i.a);
            const auto idx = pop_u32();
            if (idx >= tab.elems.size())
                throw Trap{trap::table_oob};
            push(tab.elems[idx]);
            break;
        }
        case Op::table_set:
        {
            auto& tab = table_at(i.a);
            const auto v = pop();
            const auto idx = pop_u32();
            if (idx >= tab.elems.size())
                throw Trap{trap::table_oob};
            tab.elems[idx] = v;
            break;
        }

        case Op::i32_load:
            push_u32(load.operator()<uint32_t>(i));
            break;
        case Op::i64_load:
            push(load.operator()<uint64_t>(i));
            break;
        case Op::f32_load:
            push_u32(load.operator()<uint32_t>(i));
            break;
        case Op::f64_load:
            push(load.operator()<uint64_t>(i));
            break;
        case Op::i32_load8_s:
            push_u32(static_cast<uint32_t>(int32_t{load.operator()<int8_t>(i)}));
            break;
        case Op::i32_load8_u:
            push_u32(load.operator()<uint8_t>(i));
            break;
        case Op::i32_load16_s:
            push_u32(static_cast<uint32_t>(int32_t{load.operator()<int16_t>(i)}));
            break;
        case Op::i32_load16_u:
            push_u32(load.operator()<uint16_t>(i));
            break;
        case Op::i64_load8_s:
            push(static_cast<uint64_t>(int64_t{load.operator()<int8_t>(i)}));
            break;
        case Op::i64_load8_u:
            push(load.operator()<uint8_t>(i));
            break;
        case Op::i64_load16_s:
            push(static_cast<uint64_t>(int64_t{load.operator()<int16_t>(i)}));
            break;
        case Op::i64_load16_u:
            push(load.operator()<uint16_t>(i));
            break;
        case Op::i64_load32_s:
            push(static_cast<uint64_t>(int64_t{load.operator()<int32_t>(i)}));
            break;
        case Op::i64_load32_u:
            push(load.operator()<uint32_t>(i));
            break;
        case Op::i32_store:
        case Op::f32_store:
        {
            const auto v = pop_u32();
            store(i, v);
            break;
        }
        case Op::i64_store:
        case Op::f64_store:
        {
            const auto v = pop();
            store(i, v);
            break;
        }
        case Op::i32_store8:
        case Op::i64_store8:
        {
            const auto v = static_cast<uint8_t>(pop());
            store(i, v);
            break;
        }
        case Op::i32_store16:
        case Op::i64_store16:
        {
            const auto v = static_cast<uint16_t>(pop());
            store(i, v);
            break;
        }
        case Op::i64_store32:
        {
            const auto v = static_cast<uint32_t>(pop());
            store(i, v);
            break;
        }
        case Op::memory_size:
            push_u32(mem->pages());
            break;
        case Op::memory_grow:
        {
            const auto delta = pop_u32();
            const auto old = mem->pages();
            push_u32(grow_memory(*mem, delta) ? old : 0xffffffff);
            break;
        }
        case Op::i32_const:
            push_u32(static_cast<uint32_t>(i.c));
            break;
        case Op::i64_const:
        case Op::f32_const:
        case Op::f64_const:
            push(i.c);
            break;

        case Op::i32_eqz:
            push_u32(pop_u32() == 0);
            break;
#define RR_CMP(OP, T, EXPR)               \
    case Op::OP:                          \
    {                                     \
        const auto b = static_cast<T>(pop()); \
        const auto a = static_cast<T>(pop()); \
        push_u32((EXPR) ? 1 : 0);         \
        break;                            \
    }
            RR_CMP(i32_eq, uint32_t, a == b)
            RR_CMP(i32_ne, uint32_t, a != b)
            RR_CMP(i32_lt_s, int32_t, a < b)
            RR_CMP(i32_lt_u, uint32_t, a < b)
            RR_CMP(i32_gt_s, int32_t, a > b)
            RR_CMP(i32_gt_u, uint32_t, a > b)
            RR_CMP(i32_le_s, int32_t, a <= b)
            RR_CMP(i32_le_u, uint32_t, a <= b)
            RR_CMP(i32_ge_s, int32_t, a >= b)
            RR_CMP(i32_ge_u, uint32_t, a >= b)
            RR_CMP(i64_eq, uint64_t, a == b)
            RR_CMP(i64_ne, uint64_t, a != b)
            RR_CMP(i64_lt_s, int64_t, a < b)
            RR_CMP(i64_lt_u, uint64_t, a < b)
            RR_CMP(i64_gt_s, int64_t, a > b)
            RR_CMP(i64_gt_u, uint64_t, a > b)
            RR_CMP(i64_le_s, int64_t, a <= b)
            RR_CMP(i64_le_u, uint64_t, a <= b)
            RR_CMP(i64_ge_s, int64_t, a >= b)
            RR_CMP(i64_ge_u, uint64_t, a >= b)
#undef RR_CMP
        case Op::i64_eqz:
            push_u32(pop() == 0);
            break;
#define RR_FCMP(OP, POP, EXPR) \
    case Op::OP:               \
    {                          \
        const auto b = POP();  \
        const auto a = POP();  \
        push_u32((EXPR) ? 1 : 0); \
        break;                 \
    }
            RR_FCMP(f32_eq, pop_f32, a == b)
            RR_FCMP(f32_ne, pop_f32, a != b)
            RR_FCMP(f32_lt, pop_f32, a < b)
            RR_FCMP(f32_gt, pop_f32, a > b)
            RR_FCMP(f32_le, pop_f32, a <= b)
            RR_FCMP(f32_ge, pop_f32, a >= b)
            RR_FCMP(f64_eq, pop_f64, a == b)
            RR_FCMP(f64_ne, pop_f64, a != b)
            RR_FCMP(f64_lt, pop_f64, a < b)
            RR_FCMP(f64_gt, pop_f64, a > b)
            RR_FCMP(f64_le, pop_f64, a <= b)
            RR_FCMP(f64_ge, pop_f64, a >= b)
#undef RR_FCMP

        case Op::i32_clz:
            push_u32(static_cast<uint32_t>(std::countl_zero(pop_u32())));
            break;
        case Op::i32_ctz:
            push_u32(static_cast<uint32_t>(std::countr_zero(pop_u32())));
            break;
        case Op::i32_popcnt:
            push_u32(static_cast<uint32_t>(std::popcount(pop_u32())));
            break;
        case Op::i64_clz:
            push(static_cast<uint64_t>(std::countl_zero(pop())));
            break;
        case Op::i64_ctz:
            push(static_cast<uint64_t>(std::countr_zero(pop())));
            break;
        case Op::i64_popcnt:
            push(static_cast<uint64_t>(std::popcount(pop())));
            break;

#define RR_BIN(OP, T, PUSH, EXPR)            \
    case Op::OP:                             \
    {                                        \
        const auto b = static_cast<T>(pop()); \
        const auto a = static_cast<T>(pop()); \
        PUSH(EXPR);                          \
        break;                               \
    }
            RR_BIN(i32_add, uint32_t, push_u32, a + b)
            RR_BIN(i32_sub, uint32_t, push_u32, a - b)
            RR_BIN(i32_mul, uint32_t, push_u32, a * b)
            RR_BIN(i32_and, uint32_t, push_u32, a & b)
            RR_BIN(i32_or, uint32_t, push_u32, a | b)
            RR_BIN(i32_xor, uint32_t, push_u32, a ^ b)
            RR_BIN(i32_shl, uint32_t, push_u32, a << (b & 31))
            RR_BIN(i32_shr_s, uint32_t, push_u32, static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31)))
            RR_BIN(i32_shr_u, uint32_t, push_u32, a >> (b & 31))
            RR_BIN(i32_rotl, uint32_t, push_u32, std::rotl(a, static_cast<int>(b & 31)))
            RR_BIN(i32_rotr, uint32_t, push_u32, std::rotr(a, static_cast<int>(b & 31)))
            RR_BIN(i64_add, uint64_t, push, a + b)
            RR_BIN(i64_sub, uint64_t, push, a - b)
            RR_BIN(i64_mul, uint64_t, push, a * b)
            RR_BIN(i64_and, uint64_t, push, a & b)
            RR_BIN(i64_or, uint64_t, push, a | b)
            RR_BIN(i64_xor, uint64_t, push, a ^ b)
            RR_BIN(i64_shl, uint64_t, push, a << (b & 63))
            RR_BIN(i64_shr_s, uint64_t, push, static_cast<uint64_t>(static_cast<int64_t>(a) >> (b & 63)))
            RR_BIN(i64_shr_u, uint64_t, push, a >> (b & 63))
            RR_BIN(i64_rotl, uint64_t, push, std::rotl(a, static_cast<int>(b & 63)))
            RR_BIN(i64_rotr, uint64_t, push, std::rotr(a, static_cast<int>(b & 63)))
#undef RR_BIN

        case Op::i32_div_s:
        {
            const auto b = static_cast<int32_t>(pop_u32());
            const auto a = static_cast<int32_t>(pop_u32());
            if (b == 0)
                throw Trap{trap::div_by_zero};
            if (a == std::numeric_limits<int32_t>::min() && b == -1)
                throw Trap{trap::int_overflow};
            push_u32(static_cast<uint32_t>(a / b));
            break;
        }
        case Op::i32_div_u:
        {
            const auto b = pop_u32();
            const auto a = pop_u32();
            if (b == 0)
                throw Trap{trap::div_by_zero};
            push_u32(a / b);
            break;
        }
        case Op::i32_rem_s:
        {
            const auto b = static_cast<int32_t>(pop_u32());
            const auto a = static_cast<int32_t>(pop_u32());
            if (b == 0)
                throw Trap{trap::div_by_zero};
            push_u32(b == -1 ? 0 : static_cast<uint32_t>(a % b));
            break;
        }
        case Op::i32_rem_u:
        {
            const auto b = pop_u32();
            const auto a = pop_u32();
            if (b == 0)
                throw Trap{trap::div_by_zero};
            push_u32(a % b);
            break;
        }
        case Op::i64_div_s:
        {
            const auto b = static_cast<int64_t>(pop());
            const auto a = static_cast<int64_t>(pop());
            if (b == 0)
                throw Trap{trap::div_by_zero};
            if (a == std::numeric_limits<int64_t>::min() && b == -1)
                throw Trap{trap::int_overflow};
            push(static_cast<uint64_t>(a / b));
            break;
        }
        case Op::i64_div_u:
        {
            const auto b = pop();
            const auto a = pop();
            if (b == 0)
                throw Trap{trap::div_by_zero};
            push(a / b);
            break;
        }
        case Op::i64_rem_s:
        {
            const auto b = static_cast<int64_t>(pop());
            const auto a = static_cast<int64_t>(pop());
            if (b == 0)
                throw Trap{trap::div_by_zero};
            push(b == -1 ? 0 : static_cast<uint64_t>(a % b));
            break;
        }
        case Op::i64_rem_u:
        {
            const auto b = pop();
            const auto a = pop();
            if (b == 0)
                throw Trap{trap::div_by_zero};
            push(a % b);
            break;
        }

        case Op::f32_abs:
            push_u32(pop_u32() & 0x7fffffff);
            break;
        case Op::f32_neg:
            push_u32(pop_u32() ^ 0x80000000);
            break;
        case Op::f64_abs:
            push(pop() & 0x7fffffffffffffff);
            break;
        case Op::f64_neg:
            push(pop() ^ 0x8000000000000000);
            break;
#define RR_FUN(OP, POP, PUSH, EXPR) \
    case Op::OP:                    \
    {                               \
        const auto a = POP();       \
        PUSH(EXPR);                 \
        break;                      \
    }
            RR_FUN(f32_ceil, pop_f32, push_f32, std::ceil(a))
            RR_FUN(f32_floor, pop_f32, push_f32, std::floor(a))
            RR_FUN(f32_trunc, pop_f32, push_f32, std::trunc(a))
            RR_FUN(f32_nearest, pop_f32, push_f32, std::nearbyint(a))
            RR_FUN(f32_sqrt, pop_f32, push_f32, std::sqrt(a))
            RR_FUN(f64_ceil, pop_f64, push_f64, std::ceil(a))
            RR_FUN(f64_floor, pop_f64, push_f64, std::floor(a))
            RR_FUN(f64_trunc, pop_f64, push_f64, std::trunc(a))
            RR_FUN(f64_nearest, pop_f64, push_f64, std::nearbyint(a))
            RR_FUN(f64_sqrt, pop_f64, push_f64, std::sqrt(a))

            RR_FUN(i32_wrap_i64, pop, push_u32, static_cast<uint32_t>(a))
            RR_FUN(i32_trunc_f32_s, pop_f32, push_u32, static_cast<uint32_t>(trunc_checked<int32_t>(a)))
            RR_FUN(i32_trunc_f32_u, pop_f32, push_u32, trunc_checked<uint32_t>(a))
            RR_FUN(i32_trunc_f64_s, pop_f64, push_u32, static_cast<uint32_t>(trunc_checked<int32_t>(a)))
            RR_FUN(i32_trunc_f64_u, pop_f64, push_u32, trunc_checked<uint32_t>(a))
            RR_FUN(i64_extend_i32_s, pop_u32, push, static_cast<uint64_t>(int64_t{static_cast<int32_t>(a)}))
            RR_FUN(i64_extend_i32_u, pop_u32, push, uint64_t{a})
            RR_FUN(i64_trunc_f32_s, pop_f32, push, static_cast<uint64_t>(trunc_checked<int64_t>(a)))
            RR_FUN(i64_trunc_f32_u, pop_f32, push, trunc_checked<uint64_t>(a))
            RR_FUN(i64_trunc_f64_s, pop_f64, push, static_cast<uint64_t>(trunc_checked<int64_t>(a)))
            RR_FUN(i64_trunc_f64_u, pop_f64, push, trunc_checked<uint64_t>(a))
            RR_FUN(f32_convert_i32_s, pop_u32, push_f32, static_cast<float>(static_cast<int32_t>(a)))
            RR_FUN(f32_convert_i32_u, pop_u32, push_f32, static_cast<float>(a))
            RR_FUN(f32_convert_i64_s, pop, push_f32, static_cast<float>(static_cast<int64_t>(a)))
            RR_FUN(f32_convert_i64_u, pop, push_f32, static_cast<float>(a))
            RR_FUN(f32_demote_f64, pop_f64, push_f32, static_cast<float>(a))
            RR_FUN(f64_convert_i32_s, pop_u32, push_f64, static_cast<double>(static_cast<int32_t>(a)))
            RR_FUN(f64_convert_i32_u, pop_u32, push_f64, static_cast<double>(a))
            RR_FUN(f64_convert_i64_s, pop, push_f64, static_cast<double>(static_cast<int64_t>(a)))
            RR_FUN(f64_convert_i64_u, pop, push_f64, static_cast<double>(a))
            RR_FUN(f64_promote_f32, pop_f32, push_f64, static_cast<double>(a))
            RR_FUN(i32_extend8_s, pop_u32, push_u32, static_cast<uint32_t>(int32_t{static_cast<int8_t>(a)}))
            RR_FUN(i32_extend16_s, pop_u32, push_u32, static_cast<uint32_t>(int32_t{static_cast<int16_t>(a)}))
            RR_FUN(i64_extend8_s, pop, push, static_cast<uint64_t>(int64_t{static_cast<int8_t>(a)}))
            RR_FUN(i64_extend16_s, pop, push, static_cast<uint64_t>(int64_t{static_cast<int16_t>(a)}))
            RR_FUN(i64_extend32_s, pop, push, static_cast<uint64_t>(int64_t{static_cast<int32_t>(a)}))

            RR_FUN(i32_trunc_sat_f32_s, pop_f32, push_u32, static_cast<uint32_t>(trunc_sat<int32_t>(a)))
            RR_FUN(i32_trunc_sat_f32_u, pop_f32, push_u32, trunc_sat<uint32_t>(a))
            RR_FUN(i32_trunc_sat_f64_s, pop_f64, push_u32, static_cast<uint32_t>(trunc_sat<int32_t>(a)))
            RR_FUN(i32_trunc_sat_f64_u, pop_f64, push_u32, trunc_sat<uint32_t>(a))
            RR_FUN(i64_trunc_sat_f32_s, pop_f32, push, static_cast<uint64_t>(trunc_sat<int64_t>(a)))
            RR_FUN(i64_trunc_sat_f32_u, pop_f32, push, trunc_sat<uint64_t>(a))
            RR_FUN(i64_trunc_sat_f64_s, pop_f64, push, static_cast<uint64_t>(trunc_sat<int64_t>(a)))
            RR_FUN(i64_trunc_sat_f64_u, pop_f64, push, trunc_sat<uint64_t>(a))
#undef RR_FUN

        case Op::i32_reinterpret_f32:
        case Op::i64_reinterpret_f64:
        case Op::f32_reinterpret_i32:
        case Op::f64_reinterpret_i64:
            break;

#define RR_FBIN(OP, POP, PUSH, EXPR) \
    case Op::OP:                     \
    {                                \
        const auto b = POP();        \
        const auto a = POP();        \
        PUSH(EXPR);                  \
        break;                       \
    }
            RR_FBIN(f32_add, pop_f32, push_f32, a + b)
            RR_FBIN(f32_sub, pop_f32, push_f32, a - b)
            RR_FBIN(f32_mul, pop_f32, push_f32, a * b)
            RR_FBIN(f32_div, pop_f32, push_f32, a / b)
            RR_FBIN(f32_min, pop_f32, push_f32, wasm_min(a, b))
            RR_FBIN(f32_max, pop_f32, push_f32, wasm_max(a, b))
            RR_FBIN(f64_add, pop_f64, push_f64, a + b)
            RR_FBIN(f64_sub, pop_f64, push_f64, a - b)
            RR_FBIN(f64_mul, pop_f64, push_f64, a * b)
            RR_FBIN(f64_div, pop_f64, push_f64, a / b)
            RR_FBIN(f64_min, pop_f64, push_f64, wasm_min(a, b))
            RR_FBIN(f64_max, pop_f64, push_f64, wasm_max(a, b))
#undef RR_FBIN
        case Op::f32_copysign:
        {
            const auto b = pop_u32();
            const auto a = pop_u32();
            push_u32((a & 0x7fffffff) | (b & 0x80000000));
            break;
        }
        case Op::f64_copysign:
        {
            const auto b = pop();
            const auto a = pop();
            push((a & 0x7fffffffffffffff) | (b & 0x8000000000000000));
            break;
        }

        case Op::ref_null:
            push(null_ref);
            break;
        case Op::ref_is_null:
            push_u32(pop() == null_ref);
            break;
        case Op::ref_func:
            push(inst.funcs[i.a]);
            break;

        case Op::memory_init:
        {
            const auto n = pop_u32();
            const auto s = pop_u32();
            const auto d = pop_u32();
            const auto& seg = mod.data[i.a].init;
            const uint64_t seg_len = inst.data_dropped[i.a] ? 0 : seg.size();
            if (uint64_t{s} + n > seg_len || uint64_t{d} + n > mem->data.size())
                throw Trap{trap::memory_oob};
            std::copy_n(seg.begin() + s, n, mem->data.begin() + d);
            break;
        }
        case Op::data_drop:
            inst.data_dropped[i.a] = true;
            break;
        case Op::memory_copy:
        {
            const auto n = pop_u32();
            const auto s = pop_u32();
            const auto d = pop_u32();
            if (uint64_t{s} + n > mem->data.size() || uint64_t{d} + n > mem->data.size())
                throw Trap{trap::memory_oob};
            std::memmove(mem->data.data() + d, mem->data.data() + s, n);
            break;
        }
        case Op::memory_fill:
        {
            const auto n = pop_u32();
            const auto v = static_cast<uint8_t>(pop_u32());
            const auto d = pop_u32();
            if (uint64_t{d} + n > mem->data.size())
                throw Trap{trap::memory_oob};
            std::memset(mem->data.data() + d, v, n);
            break;
        }
        case Op::table_init:
        {
            const auto n = pop_u32();
            const auto s = pop_u32();
            const auto d = pop_u32();
            const auto& seg = inst.elems[i.a];
            auto& tab = table_at(i.b);
            if (uint64_t{s} + n > seg.size() || uint64_t{d} + n > tab.elems.size())
                throw Trap{trap::table_oob};
            std::copy_n(seg.begin() + s, n, tab.elems.begin() + d);
            break;
        }
        case Op::elem_drop:
            inst.elems[i.a].clear();
            break;
        case Op::table_copy:
        {
            const auto n = pop_u32();
            const auto s = pop_u32();
            const auto d = pop_u32();
            auto& dst = table_at(i.a);
            auto& src = table_at(i.b);
            if (uint64_t{s} + n > src.elems.size() || uint64_t{d} + n > dst.elems.size())
                throw Trap{trap::table_oob};
            const std::vector<uint64_t> tmp(src.elems.begin() + s, src.elems.begin() + s + n);
            std::copy(tmp.begin(), tmp.end(), dst.elems.begin() + d);
            break;
        }
        case Op::table_grow:
        {
            auto& tab = table_at(i.a);
            const auto n = pop_u32();
            const auto v = pop();
            const uint64_t old = tab.elems.size();
            const uint64_t limit = std::min<uint64_t>(tab.type.limits.max.value_or(max_table_size), max_table_size);
            if (old + n > limit)
                push_u32(0xffffffff);
            else
            {
                tab.elems.resize(old + n, v);
                push_u32(static_cast<uint32_t>(old));
            }
            break;
        }
        case Op::table_size:
            push_u32(static_cast<uint32_t>(table_at(i.a).elems.size()));
            break;
        case Op::table_fill:
        {
            auto& tab = table_at(i.a);
            const auto n = pop_u32();
            const auto v = pop();
            const auto d = pop_u32();
            if (uint64_t{d} + n > tab.elems.size())
                throw Trap{trap::table_oob};
            std::fill_n(tab.elems.begin() + d, n, v);
            break;
        }
        default:
            throw Error{"interpreter: unhandled opcode"};
        }
        ++pc;
    }
}

}  // namespace rr::exec
