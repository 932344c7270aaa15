// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/wasm/validate.hpp"
#include "rr/error.hpp"
#include "rr/wasm/instructions.hpp"
#include <set>
#include <unordered_set>

namespace rr::wasm
{
namespace
{
constexpr uint8_t unknown = 0;
constexpr uint8_t I32 = 0x7f, I64 = 0x7e, F32 = 0x7d, F64 = 0x7c, FUNCREF = 0x70, EXTERNREF = 0x6f;

struct Signature
{
    std::vector<uint8_t> in;
    uint8_t out = unknown;  // unknown = no result
};

std::optional<Signature> numeric_signature(Op op)
{
    const auto v = static_cast<uint16_t>(op);
    auto un = [](uint8_t a, uint8_t r) { return Signature{{a}, r}; };
    auto bin = [](uint8_t a, uint8_t r) { return Signature{{a, a}, r}; };
    if (v == 0x45)
        return un(I32, I32);
    if (v >= 0x46 && v <= 0x4f)
        return bin(I32, I32);
    if (v == 0x50)
        return un(I64, I32);
    if (v >= 0x51 && v <= 0x5a)
        return bin(I64, I32);
    if (v >= 0x5b && v <= 0x60)
        return bin(F32, I32);
    if (v >= 0x61 && v <= 0x66)
        return bin(F64, I32);
    if (v >= 0x67 && v <= 0x69)
        return un(I32, I32);
    if (v >= 0x6a && v <= 0x78)
        return bin(I32, I32);
    if (v >= 0x79 && v <= 0x7b)
        return un(I64, I64);
    if (v >= 0x7c && v <= 0x8a)
        return bin(I64, I64);
    if (v >= 0x8b && v <= 0x91)
        return un(F32, F32);
    if (v >= 0x92 && v <= 0x98)
        return bin(F32, F32);
    if (v >= 0x99 && v <= 0x9f)
        return un(F64, F64);
    if (v >= 0xa0 && v <= 0xa6)
        return bin(F64, F64);
    switch (op)
    {
    case Op::i32_wrap_i64:
        return un(I64, I32);
    case Op::i32_trunc_f32_s:
    case Op::i32_trunc_f32_u:
    case Op::i32_trunc_sat_f32_s:
    case Op::i32_trunc_sat_f32_u:
    case Op::i32_reinterpret_f32:
        return un(F32, I32);
    case Op::i32_trunc_f64_s:
    case Op::i32_trunc_f64_u:
    case Op::i32_trunc_sat_f64_s:
    case Op::i32_trunc_sat_f64_u:
        return un(F64, I32);
    case Op::i64_extend_i32_s:
    case Op::i64_extend_i32_u:
        return un(I32, I64);
    case Op::i64_trunc_f32_s:
    case Op::i64_trunc_f32_u:
    case Op::i64_trunc_sat_f32_s:
    case Op::i64_trunc_sat_f32_u:
        return un(F32, I64);
    case Op::i64_trunc_f64_s:
    case Op::i64_trunc_f64_u:
    case Op::i64_trunc_sat_f64_s:
    case Op::i64_trunc_sat_f64_u:
    case Op::i64_reinterpret_f64:
        return un(F64, I64);
    case Op::f32_convert_i32_s:
    case Op::f32_convert_i32_u:
    case Op::f32_reinterpret_i32:
        return un(I32, F32);
    case Op::f32_convert_i64_s:
    case Op::f32_convert_i64_u:
        return un(I64, F32);
    case Op::f32_demote_f64:
        return un(F64, F32);
    case Op::f64_convert_i32_s:
    case Op::f64_convert_i32_u:
        return un(I32, F64);
    case Op::f64_convert_i64_s:
    case Op::f64_convert_i64_u:
    case Op::f64_reinterpret_i64:
        return un(I64, F64);
    case Op::f64_promote_f32:
        return un(F32, F64);
    case Op::i32_extend8_s:
    case Op::i32_extend16_s:
        return un(I32, I32);
    case Op::i64_extend8_s:
    case Op::i64_extend16_s:
    case Op::i64_extend32_s:
        return un(I64, I64);
    default:
        return std::nullopt;
    }
}

struct MemOpInfo
{
    uint8_t type;
    uint32_t max_align;  // log2 of natural alignment
    bool store;
};

std::optional<MemOpInfo> memory_op(Op op)
{
    switch (op)
    {
    case Op::i32_load:
        return MemOpInfo{I32, 2, false};
    case Op::i64_load:
        return MemOpInfo{I64, 3, false};
    case Op::f32_load:
        return MemOpInfo{F32, 2, false};
    case Op::f64_load:
        return MemOpInfo{F64, 3, false};
    case Op::i32_load8_s:
    case Op::i32_load8_u:
        return MemOpInfo{I32, 0, false};
    case Op::i32_load16_s:
    case Op::i32_load16_u:
        return MemOpInfo{I32, 1, false};
    case Op::i64_load8_s:
    case Op::i64_load8_u:
        return MemOpInfo{I64, 0, false};
    case Op::i64_load16_s:
    case Op::i64_load16_u:
        return MemOpInfo{I64, 1, false};
    case Op::i64_load32_s:
    case Op::i64_load32_u:
        return MemOpInfo{I64, 2, false};
    case Op::i32_store:
        return MemOpInfo{I32, 2, true};
    case Op::i64_store:
        return MemOpInfo{I64, 3, true};
    case Op::f32_store:
        return MemOpInfo{F32, 2, true};
    case Op::f64_store:
        return MemOpInfo{F64, 3, true};
    case Op::i32_store8:
        return MemOpInfo{I32, 0, true};
    case Op::i32_store16:
        return MemOpInfo{I32, 1, true};
    case Op::i64_store8:
        return MemOpInfo{I64, 0, true};
    case Op::i64_store16:
        return MemOpInfo{I64, 1, true};
    case Op::i64_store32:
        return MemOpInfo{I64, 2, true};
    default:
        return std::nullopt;
    }
}

std::string type_name(uint8_t t)
{
    return t == unknown ? "unknown" : to_string(static_cast<ValType>(t));
}

struct Context
{
    const Module& m;
    std::vector<uint8_t> locals;
    std::vector<uint8_t> results;
    std::unordered_set<uint32_t> refs;
};

struct Frame
{
    Op op;
    std::vector<uint8_t> params;
    std::vector<uint8_t> results;
    size_t height;
    bool unreachable;
};

class FunctionChecker
{
public:
    FunctionChecker(const Context& ctx, const DecodedBody& body) : ctx_{ctx}, body_{body} {}

    void run()
    {
        push_frame(Op::block, {}, ctx_.results);
        for (const auto& ins : body_.instrs)
            step(ins);
        if (!frames_.empty())
            fail("function body not terminated");
    }

private:
    const Context& ctx_;
    const DecodedBody& body_;
    std::vector<uint8_t> stack_;
    std::vector<Frame> frames_;
    uint32_t offset_ = 0;

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ValidationError{"at code offset " + std::to_string(offset_) + ": " + what};
    }

    void push(uint8_t t) { stack_.push_back(t); }

    uint8_t pop()
    {
        auto& f = frames_.back();
        if (stack_.size() == f.height)
        {
            if (f.unreachable)
                return unknown;
            fail("type mismatch: operand stack underflow");
        }
        const auto t = stack_.back();
        stack_.pop_back();
        return t;
    }

    uint8_t pop(uint8_t expected)
    {
        const auto actual = pop();
        if (actual != expected && actual != unknown && expected != unknown)
            fail("type mismatch: expected " + type_name(expected) + ", got " + type_name(actual));
        return actual == unknown ? expected : actual;
    }

    void pop_values(const std::vector<uint8_t>& ts)
    {
        for (auto it = ts.rbegin(); it != ts.rend(); ++it)
            pop(*it);
    }

    void push_values(const std::vector<uint8_t>& ts)
    {
        for (auto t : ts)
            push(t);
    }

    void push_frame(Op op, std::vector<uint8_t> params, std::vector<uint8_t> results)
    {
        frames_.push_back(Frame{op, params, std::move(results), stack_.size(), false});
        push_values(params);
    }

    Frame pop_frame()
    {
        if (frames_.empty())
            fail("control frame underflow");
        auto f = frames_.back();
        pop_values(f.results);
        if (stack_.size() != f.height)
            fail("type mismatch: values remaining on stack at end of block");
        frames_.pop_back();
        return f;
    }

    void set_unreachable()
    {
        auto& f = frames_.back();
        stack_.resize(f.height);
        f.unreachable = true;
    }

    const std::vector<uint8_t>& label_types(const Frame& f) const
    {
        return f.op == Op::loop ? f.params : f.results;
    }

    const Frame& label(uint32_t depth) const
    {
        if (depth >= frames_.size())
            fail("unknown label " + std::to_string(depth));
        return frames_[frames_.size() - 1 - depth];
    }

    std::pair<std::vector<uint8_t>, std::vector<uint8_t>> block_type(uint64_t c) const
    {
        const auto bt = static_cast<int64_t>(c);
        if (bt >= 0)
        {
            if (static_cast<uint64_t>(bt) >= ctx_.m.types.size())
                fail("unknown type " + std::to_string(bt));
            const auto& t = ctx_.m.types[static_cast<size_t>(bt)];
            return {to_bytes(t.params), to_bytes(t.results)};
        }
        const auto vb = static_cast<uint8_t>(bt + 0x80);
        if (vb == 0x40)
            return {};
        return {{}, {vb}};
    }

    static std::vector<uint8_t> to_bytes(const std::vector<ValType>& v)
    {
        std::vector<uint8_t> out;
        for (auto t : v)
            out.push_back(static_cast<uint8_t>(t));
        return out;
    }

    void need_memory() const
    {
        if (ctx_.m.num_memories() == 0)
            fail("unknown memory 0");
    }

    ValType table(uint32_t idx) const
    {
        if (idx >= ctx_.m.num_tables())
            fail("unknown table " + std::to_string(idx));
        return ctx_.m.table_type(idx).elem;
    }

    uint8_t local(uint32_t idx) const
    {
        if (idx >= ctx_.locals.size())
            fail("unknown local " + std::to_string(idx));
        return ctx_.locals[idx];
    }

    void elem(uint32_t idx) const
    {
        if (idx >= ctx_.m.elems.size())
            fail("unknown elem segment " + std::to_string(idx));
    }

    void data(uint32_t idx) const
    {
        if (!ctx_.m.has_data_count)
            fail("data count section required");
        if (idx >= ctx_.m.data.size())
            fail("unknown data segment " + std::to_string(idx));
    }

    void step(const Instr& ins)
    {
        offset_ = ins.offset;
        if (frames_.empty())
            fail("instruction after end of function");

        if (auto sig = numeric_signature(ins.op))
        {
            pop_values(sig->in);
            push(sig->out);
            return;
        }
        if (auto mem = memory_op(ins.op))
        {
            need_memory();
            if (ins.a > mem->max_align)
                fail("alignment must not be larger than natural");
            if (mem->store)
            {
                pop(mem->type);
                pop(I32);
            }
            else
            {
                pop(I32);
                push(mem->type);
            }
            return;
        }

        switch (ins.op)
        {
        case Op::unreachable:
            set_unreachable();
            break;
        case Op::nop:
            break;
        case Op::block:
        case Op::loop:
        {
            auto [params, results] = block_type(ins.c);
            pop_values(params);
            push_frame(ins.op, params, results);
            break;
        }
        case Op::if_:
        {
            auto [params, results] = block_type(ins.c);
            pop(I32);
            pop_values(params);
            push_frame(ins.op, params, results);
            break;
        }
        case Op::else_:
        {
            auto f = pop_frame();
            if (f.op != Op::if_)
                fail("else without if");
            push_frame(Op::else_, f.params, f.results);
            break;
        }
        case Op::end:
        {
            auto f = pop_frame();
            if (f.op == Op::if_ && f.params != f.results)
                fail("type mismatch: if without else must leave its parameters");
            push_values(f.results);
            break;
        }
        case Op::br:
        {
            pop_values(label_types(label(ins.a)));
            set_unreachable();
            break;
        }
        case Op::br_if:
        {
            pop(I32);
            const auto ts = label_types(label(ins.a));
            pop_values(ts);
            push_values(ts);
            break;
        }
        case Op::br_table:
        {
            pop(I32);
            const auto default_depth = body_.br_table[ins.a + ins.b];
            const auto arity = label_types(label(default_depth)).size();
            for (uint32_t i = 0; i <= ins.b; ++i)
            {
                const auto& ts = label_types(label(body_.br_table[ins.a + i]));
                if (ts.size() != arity)
                    fail("type mismatch: br_table targets have inconsistent arity");
                // Check against a snapshot so every target sees the same operands.
                auto saved = stack_;
                pop_values(ts);
                stack_ = std::move(saved);
            }
            pop_values(label_types(label(default_depth)));
            set_unreachable();
            break;
        }
        case Op::return_:
            pop_values(ctx_.results);
            set_unreachable();
            break;
        case Op::call:
        {
            if (ins.a >= ctx_.m.num_functions())
                fail("unknown function " + std::to_string(ins.a));
            const auto& t = ctx_.m.function_type(ins.a);
            pop_values(to_bytes(t.params));
            push_values(to_bytes(t.results));
            break;
        }
        case Op::call_indirect:
        {
            if (table(ins.b) != ValType::funcref)
                fail("call_indirect requires a funcref table");
            if (ins.a >= ctx_.m.types.size())
                fail("unknown type " + std::to_string(ins.a));
            const auto& t = ctx_.m.types[ins.a];
            pop(I32);
            pop_values(to_bytes(t.params));
            push_values(to_bytes(t.results));
            break;
        }
        case Op::drop:
            pop();
            break;
        case Op::select:
        {
            pop(I32);
            const auto t1 = pop();
            const auto t2 = pop();
            if (t1 == FUNCREF || t1 == EXTERNREF || t2 == FUNCREF || t2 == EXTERNREF)
                fail("type mismatch: select without type requires numeric operands");
            if (t1 != t2 && t1 != unknown && t2 != unknown)
                fail("type mismatch in select");
            push(t1 == unknown ? t2 : t1);
            break;
        }
        case Op::select_t:
        {
            const auto t = static_cast<uint8_t>(ins.a);
            pop(I32);
            pop(t);
            pop(t);
            push(t);
            break;
        }
        case Op::local_get:
            push(local(ins.a));
            break;
        case Op::local_set:
            pop(local(ins.a));
            break;
        case Op::local_tee:
        {
            const auto t = local(ins.a);
            pop(t);
            push(t);
            break;
        }
        case Op::global_get:
        case Op::global_set:
        {
            if (ins.a >= ctx_.m.num_globals())
                fail("unknown global " + std::to_string(ins.a));
            const auto g = ctx_.m.global_type(ins.a);
            if (ins.op == Op::global_get)
                push(static_cast<uint8_t>(g.type));
            else
            {
                if (!g.is_mutable)
                    fail("global is immutable");
                pop(static_cast<uint8_t>(g.type));
            }
            break;
        }
        case Op::table_get:
        {
            const auto t = table(ins.a);
            pop(I32);
            push(static_cast<uint8_t>(t));
            break;
        }
        case Op::table_set:
        {
            const auto t = table(ins.a);
            pop(static_cast<uint8_t>(t));
            pop(I32);
            break;
        }
        case Op::table_size:
            table(ins.a);
            push(I32);
            break;
        case Op::table_grow:
        {
            const auto t = table(ins.a);
            pop(I32);
            pop(static_cast<uint8_t>(t));
            push(I32);
            break;
        }
        case Op::table_fill:
        {
            const auto t = table(ins.a);
            pop(I32);
            pop(static_cast<uint8_t>(t));
            pop(I32);
            break;
        }
        case Op::table_copy:
        {
            if (table(ins.a) != table(ins.b))
                fail("type mismatch in table.copy");
            pop(I32);
            pop(I32);
            pop(I32);
            break;
        }
        case Op::table_init:
        {
            const auto t = table(ins.b);
            elem(ins.a);
            if (ctx_.m.elems[ins.a].type != t)
                fail("type mismatch in table.init");
            pop(I32);
            pop(I32);
            pop(I32);
            break;
        }
        case Op::elem_drop:
            elem(ins.a);
            break;
        case Op::memory_size:
            need_memory();
            push(I32);
            break;
        case Op::memory_grow:
            need_memory();
            pop(I32);
            push(I32);
            break;
        case Op::memory_fill:
        case Op::memory_copy:
            need_memory();
            pop(I32);
            pop(I32);
            pop(I32);
            break;
        case Op::memory_init:
            need_memory();
            data(ins.a);
            pop(I32);
            pop(I32);
            pop(I32);
            break;
        case Op::data_drop:
            data(ins.a);
            break;
        case Op::i32_const:
            push(I32);
            break;
        case Op::i64_const:
            push(I64);
            break;
        case Op::f32_const:
            push(F32);
            break;
        case Op::f64_const:
            push(F64);
            break;
        case Op::ref_null:
            push(static_cast<uint8_t>(ins.a));
            break;
        case Op::ref_is_null:
        {
            const auto t = pop();
            if (t != unknown && t != FUNCREF && t != EXTERNREF)
                fail("type mismatch: ref.is_null requires a reference");
            push(I32);
            break;
        }
        case Op::ref_func:
            if (ins.a >= ctx_.m.num_functions())
                fail("unknown function " + std::to_string(ins.a));
            if (!ctx_.refs.contains(ins.a))
                fail("undeclared function reference " + std::to_string(ins.a));
            push(FUNCREF);
            break;
        default:
            fail("unhandled opcode");
        }
    }
};

// Constant expressions: returns the produced type or records an error.
uint8_t const_expr_type(const Module& m, std::span<const uint8_t> expr, uint32_t visible_globals,
    std::string& error)
{
    DecodedBody d;
    try
    {
        d = decode_expr(expr);
    }
    catch (const Error& e)
    {
        error = e.what();
        return unknown;
    }
    if (d.instrs.size() != 2)
    {
        error = "constant expression must be a single instruction";
        return unknown;
    }
    const auto& ins = d.instrs[0];
    switch (ins.op)
    {
    case Op::i32_const:
        return I32;
    case Op::i64_const:
        return I64;
    case Op::f32_const:
        return F32;
    case Op::f64_const:
        return F64;
    case Op::ref_null:
        return static_cast<uint8_t>(ins.a);
    case Op::ref_func:
        if (ins.a >= m.num_functions())
        {
            error = "unknown function " + std::to_string(ins.a) + " in constant expression";
            return unknown;
        }
        return FUNCREF;
    case Op::global_get:
    {
        if (ins.a >= visible_globals)
        {
            error = "unknown global " + std::to_string(ins.a) + " in constant expression";
            return unknown;
        }
        const auto g = m.global_type(ins.a);
        if (g.is_mutable)
        {
            error = "constant expression reads a mutable global";
            return unknown;
        }
        return static_cast<uint8_t>(g.type);
    }
    default:
        error = "constant expression required";
        return unknown;
    }
}

bool limits_ok(const Limits& l, uint64_t bound)
{
    if (l.min > bound)
        return false;
    if (l.max && (*l.max > bound || *l.max < l.min))
        return false;
    return true;
}

}  // namespace

std::vector<std::string> validate_module(const Module& m)
{
    std::vector<std::string> errors;
    auto err = [&errors](std::string s) { errors.push_back(std::move(s)); };

    for (size_t i = 0; i < m.imports.size(); ++i)
    {
        const auto& imp = m.imports[i];
        if (imp.kind() == ExternKind::func && std::get<uint32_t>(imp.desc) >= m.types.size())
            err("import " + std::to_string(i) + ": unknown type");
        if (imp.kind() == ExternKind::memory && !limits_ok(std::get<MemoryType>(imp.desc).limits, 65536))
            err("import " + std::to_string(i) + ": memory size must be at most 65536 pages");
        if (imp.kind() == ExternKind::table && !limits_ok(std::get<TableType>(imp.desc).limits, 0xffffffffu))
            err("import " + std::to_string(i) + ": invalid table limits");
    }
    for (size_t i = 0; i < m.functions.size(); ++i)
    {
        if (m.functions[i].type >= m.types.size())
            err("function " + std::to_string(i) + ": unknown type");
    }
    for (const auto& t : m.tables)
    {
        if (!limits_ok(t.limits, 0xffffffffu))
            err("table: size minimum must not be greater than maximum");
    }
    for (const auto& mem : m.memories)
    {
        if (!limits_ok(mem.limits, 65536))
            err("memory size must be at most 65536 pages (4GiB)");
    }
    if (m.num_memories() > 1)
        err("multiple memories");

    const auto imported_globals = m.imported_count(ExternKind::global);
    for (size_t i = 0; i < m.globals.size(); ++i)
    {
        std::string e;
        const auto t = const_expr_type(m, m.globals[i].init, imported_globals, e);
        if (!e.empty())
            err("global " + std::to_string(i) + ": " + e);
        else if (t != static_cast<uint8_t>(m.globals[i].type.type))
            err("global " + std::to_string(i) + ": type mismatch in initializer");
    }

    std::set<std::string> names;
    for (const auto& e : m.exports)
    {
        if (!names.insert(e.name).second)
            err("duplicate export name \"" + e.name + "\"");
        uint32_t bound = 0;
        switch (e.kind)
        {
        case ExternKind::func:
            bound = m.num_functions();
            break;
        case ExternKind::table:
            bound = m.num_tables();
            break;
        case ExternKind::memory:
            bound = m.num_memories();
            break;
        case ExternKind::global:
            bound = m.num_globals();
            break;
        }
        if (e.index >= bound)
            err("export \"" + e.name + "\": unknown " + to_string(e.kind) + " " + std::to_string(e.index));
    }

    if (m.start)
    {
        if (*m.start >= m.num_functions())
            err("unknown start function");
        else
        {
            const auto& t = m.function_type(*m.start);
            if (!t.params.empty() || !t.results.empty())
                err("start function must have type [] -> []");
        }
    }

    for (size_t i = 0; i < m.elems.size(); ++i)
    {
        const auto& seg = m.elems[i];
        const auto label = "elem segment " + std::to_string(i) + ": ";
        for (const auto& entry : seg.entries)
        {
            if (entry && *entry >= m.num_functions())
                err(label + "unknown function " + std::to_string(*entry));
            if (entry && seg.type != ValType::funcref)
                err(label + "type mismatch");
        }
        if (seg.mode == SegmentMode::active)
        {
            if (seg.table >= m.num_tables())
                err(label + "unknown table " + std::to_string(seg.table));
            else if (m.table_type(seg.table).elem != seg.type)
                err(label + "type mismatch");
            std::string e;
            const auto t = const_expr_type(m, seg.offset, imported_globals, e);
            if (!e.empty())
                err(label + e);
            else if (t != I32)
                err(label + "type mismatch in offset");
        }
    }

    for (size_t i = 0; i < m.data.size(); ++i)
    {
        const auto& seg = m.data[i];
        if (seg.mode != SegmentMode::active)
            continue;
        const auto label = "data segment " + std::to_string(i) + ": ";
        if (seg.memory >= m.num_memories())
            err(label + "unknown memory " + std::to_string(seg.memory));
        std::string e;
        const auto t = const_expr_type(m, seg.offset, imported_globals, e);
        if (!e.empty())
            err(label + e);
        else if (t != I32)
            err(label + "type mismatch in offset");
    }

    if (!errors.empty())
        return errors;

    Context ctx{m, {}, {}, {}};
    for (const auto& seg : m.elems)
    {
        for (const auto& entry : seg.entries)
        {
            if (entry)
                ctx.refs.insert(*entry);
        }
    }
    for (const auto& e : m.exports)
    {
        if (e.kind == ExternKind::func)
            ctx.refs.insert(e.index);
    }
    for (const auto& g : m.globals)
    {
        const auto d = decode_expr(g.init);
        if (d.instrs[0].op == Op::ref_func)
            ctx.refs.insert(d.instrs[0].a);
    }

    const auto imported_funcs = m.imported_count(ExternKind::func);
    for (size_t i = 0; i < m.functions.size(); ++i)
    {
        const auto& f = m.functions[i];
        const auto& t = m.types[f.type];
        ctx.locals.clear();
        for (auto p : t.params)
            ctx.locals.push_back(static_cast<uint8_t>(p));
        for (const auto& l : f.locals)
            ctx.locals.insert(ctx.locals.end(), l.count, static_cast<uint8_t>(l.type));
        ctx.results.clear();
        for (auto r : t.results)
            ctx.results.push_back(static_cast<uint8_t>(r));
        try
        {
            const auto body = decode_body(f.code);
            FunctionChecker{ctx, body}.run();
        }
        catch (const Error& e)
        {
            err("function " + std::to_string(imported_funcs + i) + ": " + e.what());
        }
    }
    return errors;
}

void check_module(const Module& m)
{
    const auto errors = validate_module(m);
    if (!errors.empty())
        throw ValidationError{errors.front()};
}

}  // namespace rr::wasm
