// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/wasm/instructions.hpp"
#include "rr/error.hpp"
#include "rr/wasm/leb128.hpp"

namespace rr::wasm
{
const char* to_string(IndexSpace s) noexcept
{
    switch (s)
    {
    case IndexSpace::type:
        return "type";
    case IndexSpace::func:
        return "func";
    case IndexSpace::table:
        return "table";
    case IndexSpace::memory:
        return "memory";
    case IndexSpace::global:
        return "global";
    case IndexSpace::elem:
        return "elem";
    case IndexSpace::data:
        return "data";
    }
    return "?";
}

namespace
{
struct Decoder
{
    Reader r;
    DecodedBody out;

    uint32_t index(IndexSpace space)
    {
        const auto off = static_cast<uint32_t>(r.pos());
        const auto v = r.u32();
        out.indices.push_back({space, v, off, static_cast<uint32_t>(r.pos()) - off});
        return v;
    }

    void memarg(Instr& ins)
    {
        ins.a = r.u32();
        if (ins.a >= 0x40)
            throw UnsupportedFeature{"multi-memory"};
        ins.b = r.u32();
    }

    void zero_byte(const char* what)
    {
        if (r.byte() != 0)
            throw UnsupportedFeature{what};
    }

    void value_type_byte(uint8_t b)
    {
        if (b == 0x7b)
            throw UnsupportedFeature{"simd"};
        if (!is_valtype_byte(b))
            r.fail("invalid value type");
    }
};

[[noreturn]] void unsupported_opcode(Reader& r, uint8_t byte)
{
    switch (byte)
    {
    case 0xfd:
        throw UnsupportedFeature{"simd"};
    case 0xfe:
        throw UnsupportedFeature{"threads"};
    case 0xfb:
        throw UnsupportedFeature{"gc"};
    case 0x06:
    case 0x07:
    case 0x08:
    case 0x09:
    case 0x18:
    case 0x19:
    case 0x1f:
        throw UnsupportedFeature{"exception-handling"};
    case 0x12:
    case 0x13:
        throw UnsupportedFeature{"tail-call"};
    default:
        r.fail("unknown opcode 0x" + [byte] {
            static const char* hex = "0123456789abcdef";
            return std::string{hex[byte >> 4], hex[byte & 15]};
        }());
    }
}
}  // namespace

DecodedBody decode_prefix(std::span<const uint8_t> code, size_t base, size_t* consumed)
{
    Decoder d{Reader{code, base}, {}};
    auto& r = d.r;
    std::vector<uint32_t> open;  // indices of open block/loop/if instructions
    bool done = false;

    while (!done)
    {
        if (r.eof())
            r.fail("unexpected end of code");
        Instr ins{};
        ins.offset = static_cast<uint32_t>(r.pos());
        const uint8_t byte = r.byte();
        if (byte == 0xfc)
        {
            const auto sub = r.u32();
            if (sub > 17)
                r.fail("unknown 0xfc sub-opcode " + std::to_string(sub));
            ins.op = static_cast<Op>(0xfc00 | sub);
        }
        else
            ins.op = static_cast<Op>(byte);

        const auto my_index = static_cast<uint32_t>(d.out.instrs.size());
        switch (ins.op)
        {
        case Op::unreachable:
        case Op::nop:
        case Op::return_:
        case Op::drop:
        case Op::select:
        case Op::ref_is_null:
            break;

        case Op::block:
        case Op::loop:
        case Op::if_:
        {
            const auto pos = static_cast<uint32_t>(r.pos());
            const auto bt = r.s33();
            if (bt >= 0)
            {
                r.seek(pos);
                d.index(IndexSpace::type);
            }
            else
            {
                const auto vb = static_cast<uint8_t>(bt + 0x80);
                if (vb != 0x40)
                    d.value_type_byte(vb);
            }
            ins.c = static_cast<uint64_t>(bt);
            ins.a = no_instr;
            ins.b = no_instr;
            open.push_back(my_index);
            break;
        }
        case Op::else_:
        {
            if (open.empty() || d.out.instrs[open.back()].op != Op::if_ ||
                d.out.instrs[open.back()].a != no_instr)
                r.fail("else without matching if");
            d.out.instrs[open.back()].a = my_index;
            break;
        }
        case Op::end:
            if (open.empty())
                done = true;
            else
            {
                auto& opener = d.out.instrs[open.back()];
                opener.b = my_index;
                if (opener.op == Op::if_ && opener.a != no_instr)
                    d.out.instrs[opener.a].b = my_index;
                open.pop_back();
            }
            break;

        case Op::br:
        case Op::br_if:
            ins.a = r.u32();
            break;
        case Op::br_table:
        {
            const auto n = r.u32();
            if (n > r.remaining())
                r.fail("br_table length out of bounds");
            ins.a = static_cast<uint32_t>(d.out.br_table.size());
            ins.b = n;
            for (uint32_t i = 0; i <= n; ++i)
                d.out.br_table.push_back(r.u32());
            break;
        }
        case Op::call:
        case Op::ref_func:
            ins.a = d.index(IndexSpace::func);
            break;
        case Op::call_indirect:
            ins.a = d.index(IndexSpace::type);
            ins.b = d.index(IndexSpace::table);
            break;
        case Op::select_t:
        {
            const auto n = r.u32();
            if (n != 1)
                r.fail("invalid select arity");
            const auto vb = r.byte();
            d.value_type_byte(vb);
            ins.a = vb;
            break;
        }
        case Op::local_get:
        case Op::local_set:
        case Op::local_tee:
            ins.a = r.u32();
            break;
        case Op::global_get:
        case Op::global_set:
            ins.a = d.index(IndexSpace::global);
            break;
        case Op::table_get:
        case Op::table_set:
        case Op::table_grow:
        case Op::table_size:
        case Op::table_fill:
            ins.a = d.index(IndexSpace::table);
            break;

        case Op::i32_load:
        case Op::i64_load:
        case Op::f32_load:
        case Op::f64_load:
        case Op::i32_load8_s:
        case Op::i32_load8_u:
        case Op::i32_load16_s:
        case Op::i32_load16_u:
        case Op::i64_load8_s:
        case Op::i64_load8_u:
        case Op::i64_load16_s:
        case Op::i64_load16_u:
        case Op::i64_load32_s:
        case Op::i64_load32_u:
        case Op::i32_store:
        case Op::i64_store:
        case Op::f32_store:
        case Op::f64_store:
        case Op::i32_store8:
        case Op::i32_store16:
        case Op::i64_store8:
        case Op::i64_store16:
        case Op::i64_store32:
            d.memarg(ins);
            break;
        case Op::memory_size:
        case Op::memory_grow:
        case Op::memory_fill:
            d.zero_byte("multi-memory");
            break;
        case Op::memory_copy:
            d.zero_byte("multi-memory");
            d.zero_byte("multi-memory");
            break;
        case Op::memory_init:
            ins.a = d.index(IndexSpace::data);
            d.zero_byte("multi-memory");
            break;
        case Op::data_drop:
            ins.a = d.index(IndexSpace::data);
            break;
        case Op::table_init:
            ins.a = d.index(IndexSpace::elem);
            ins.b = d.index(IndexSpace::table);
            break;
        case Op::elem_drop:
            ins.a = d.index(IndexSpace::elem);
            break;
        case Op::table_copy:
            ins.a = d.index(IndexSpace::table);
            ins.b = d.index(IndexSpace::table);
            break;

        case Op::i32_const:
            ins.c = static_cast<uint64_t>(static_cast<int64_t>(r.leb<int32_t>()));
            break;
        case Op::i64_const:
            ins.c = static_cast<uint64_t>(r.leb<int64_t>());
            break;
        case Op::f32_const:
            ins.c = r.fixed<uint32_t>();
            break;
        case Op::f64_const:
            ins.c = r.fixed<uint64_t>();
            break;
        case Op::ref_null:
        {
            const auto vb = r.byte();
            if (vb != 0x70 && vb != 0x6f)
                r.fail("invalid reference type");
            ins.a = vb;
            break;
        }

        default:
        {
            const auto v = static_cast<uint16_t>(ins.op);
            const bool numeric = (v >= 0x45 && v <= 0xc4) || (v >= 0xfc00 && v <= 0xfc07);
            if (!numeric)
                unsupported_opcode(r, byte);
            break;
        }
        }
        d.out.instrs.push_back(ins);
    }
    if (consumed != nullptr)
        *consumed = r.pos();
    else if (!r.eof())
        r.fail("trailing bytes after end of code");
    return std::move(d.out);
}

DecodedBody decode_body(std::span<const uint8_t> code, size_t base)
{
    return decode_prefix(code, base, nullptr);
}

}  // namespace rr::wasm
