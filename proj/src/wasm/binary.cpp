// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/wasm/binary.hpp"
#include "rr/error.hpp"
#include "rr/wasm/instructions.hpp"
#include "rr/wasm/leb128.hpp"
#include <array>
#include <fstream>
#include <iterator>

namespace rr::wasm
{
namespace
{
constexpr std::array<uint8_t, 8> header = {0x00, 0x61, 0x73, 0x6d, 0x01, 0x00, 0x00, 0x00};

// Position of each known section id in the mandated order.
int section_rank(uint8_t id)
{
    switch (id)
    {
    case 1:
        return 1;
    case 2:
        return 2;
    case 3:
        return 3;
    case 4:
        return 4;
    case 5:
        return 5;
    case 6:
        return 6;
    case 7:
        return 7;
    case 8:
        return 8;
    case 9:
        return 9;
    case 12:
        return 10;
    case 10:
        return 11;
    case 11:
        return 12;
    default:
        return -1;
    }
}

ValType read_valtype(Reader& r)
{
    const auto b = r.byte();
    if (b == 0x7b)
        throw UnsupportedFeature{"simd"};
    if (!is_valtype_byte(b))
        r.fail("invalid value type");
    return static_cast<ValType>(b);
}

ValType read_reftype(Reader& r)
{
    const auto b = r.byte();
    if (b != 0x70 && b != 0x6f)
        r.fail("invalid reference type");
    return static_cast<ValType>(b);
}

Limits read_limits(Reader& r, bool memory)
{
    const auto flag = r.byte();
    if (memory && (flag == 0x02 || flag == 0x03))
        throw UnsupportedFeature{"shared memory"};
    if (memory && flag >= 0x04 && flag <= 0x07)
        throw UnsupportedFeature{"memory64"};
    if (flag > 1)
        r.fail("invalid limits flag");
    Limits l;
    l.min = r.u32();
    if (flag == 1)
        l.max = r.u32();
    return l;
}

TableType read_table_type(Reader& r)
{
    TableType t;
    t.elem = read_reftype(r);
    t.limits = read_limits(r, false);
    return t;
}

GlobalType read_global_type(Reader& r)
{
    GlobalType g;
    g.type = read_valtype(r);
    const auto m = r.byte();
    if (m > 1)
        r.fail("invalid mutability");
    g.is_mutable = m == 1;
    return g;
}

bytes read_const_expr(Reader& r)
{
    const auto start = r.pos();
    size_t consumed = 0;
    decode_prefix(r.data().subspan(start), r.offset(), &consumed);
    const auto s = r.take(consumed);
    return bytes{s.begin(), s.end()};
}

std::optional<uint32_t> read_elem_expr(Reader& r)
{
    const auto off = r.offset();
    const auto expr = read_const_expr(r);
    const auto decoded = decode_expr(expr);
    if (decoded.instrs.size() != 2)
        throw MalformedBinary{off, "unsupported element expression"};
    const auto& ins = decoded.instrs[0];
    if (ins.op == Op::ref_func)
        return ins.a;
    if (ins.op == Op::ref_null)
        return std::nullopt;
    if (ins.op == Op::global_get)
        throw UnsupportedFeature{"global.get in element expression"};
    throw MalformedBinary{off, "invalid element expression"};
}

ElemSegment read_elem_segment(Reader& r)
{
    ElemSegment seg;
    const auto flags = r.u32();
    if (flags > 7)
        r.fail("invalid element segment flags");
    const bool passive_or_declarative = flags & 1;
    const bool explicit_table = flags & 2;
    seg.uses_expressions = flags & 4;

    if (!passive_or_declarative)
    {
        seg.mode = SegmentMode::active;
        if (explicit_table)
            seg.table = r.u32();
        seg.offset = read_const_expr(r);
    }
    else
        seg.mode = explicit_table ? SegmentMode::declarative : SegmentMode::passive;

    if (passive_or_declarative || explicit_table)
    {
        if (seg.uses_expressions)
            seg.type = read_reftype(r);
        else if (r.byte() != 0x00)
            r.fail("invalid element kind");
    }

    const auto n = r.u32();
    if (n > r.remaining())
        r.fail("element count out of bounds");
    seg.entries.reserve(n);
    for (uint32_t i = 0; i < n; ++i)
    {
        if (seg.uses_expressions)
            seg.entries.push_back(read_elem_expr(r));
        else
            seg.entries.push_back(r.u32());
    }
    return seg;
}

DataSegment read_data_segment(Reader& r)
{
    DataSegment seg;
    const auto flags = r.u32();
    switch (flags)
    {
    case 0:
        seg.offset = read_const_expr(r);
        break;
    case 1:
        seg.mode = SegmentMode::passive;
        break;
    case 2:
        seg.memory = r.u32();
        if (seg.memory != 0)
            throw UnsupportedFeature{"multi-memory"};
        seg.offset = read_const_expr(r);
        break;
    default:
        r.fail("invalid data segment flags");
    }
    const auto n = r.u32();
    const auto s = r.take(n);
    seg.init.assign(s.begin(), s.end());
    return seg;
}

template <typename F>
void read_vec(Reader& r, F&& read_one)
{
    const auto n = r.u32();
    if (n > r.remaining())
        r.fail("vector length out of bounds");
    for (uint32_t i = 0; i < n; ++i)
        read_one();
}

}  // namespace

Module parse_module(std::span<const uint8_t> input)
{
    Reader r{input};
    if (input.size() < header.size() || !std::equal(header.begin(), header.end(), input.begin()))
    {
        if (input.size() >= 4 && std::equal(header.begin(), header.begin() + 4, input.begin()))
            throw MalformedBinary{4, "unsupported version"};
        throw MalformedBinary{0, "missing magic header"};
    }
    r.take(header.size());

    Module m;
    std::vector<uint32_t> func_types;
    bool have_code = false;
    int last_rank = 0;
    std::optional<uint32_t> data_count;

    while (!r.eof())
    {
        const auto id = r.byte();
        const auto size = r.u32();
        const auto section_offset = r.offset();
        Reader s{r.take(size), section_offset};

        if (id != 0)
        {
            const auto rank = section_rank(id);
            if (rank < 0)
                throw MalformedBinary{section_offset - 1, "unknown section id " + std::to_string(id)};
            if (rank <= last_rank)
                throw MalformedBinary{section_offset - 1, "section out of order"};
            last_rank = rank;
        }

        switch (id)
        {
        case 0:
        {
            CustomSection c;
            c.name = s.name();
            const auto rest = s.take(s.remaining());
            c.content.assign(rest.begin(), rest.end());
            m.customs.push_back(std::move(c));
            break;
        }
        case 1:
            read_vec(s, [&] {
                if (s.byte() != 0x60)
                    s.fail("invalid function type form");
                FuncType t;
                read_vec(s, [&] { t.params.push_back(read_valtype(s)); });
                read_vec(s, [&] { t.results.push_back(read_valtype(s)); });
                m.types.push_back(std::move(t));
            });
            break;
        case 2:
            read_vec(s, [&] {
                Import imp;
                imp.module = s.name();
                imp.name = s.name();
                switch (s.byte())
                {
                case 0:
                    imp.desc = s.u32();
                    break;
                case 1:
                    imp.desc = read_table_type(s);
                    break;
                case 2:
                    imp.desc = MemoryType{read_limits(s, true)};
                    break;
                case 3:
                    imp.desc = read_global_type(s);
                    break;
                case 4:
                    throw UnsupportedFeature{"exception-handling"};
                default:
                    s.fail("invalid import kind");
                }
                m.imports.push_back(std::move(imp));
            });
            break;
        case 3:
            read_vec(s, [&] { func_types.push_back(s.u32()); });
            break;
        case 4:
            read_vec(s, [&] { m.tables.push_back(read_table_type(s)); });
            break;
        case 5:
            read_vec(s, [&] { m.memories.push_back(MemoryType{read_limits(s, true)}); });
            break;
        case 6:
            read_vec(s, [&] {
                Global g;
                g.type = read_global_type(s);
                g.init = read_const_expr(s);
                m.globals.push_back(std::move(g));
            });
            break;
        case 7:
            read_vec(s, [&] {
                Export e;
                e.name = s.name();
                const auto k = s.byte();
                if (k > 3)
                    s.fail("invalid export kind");
                e.kind = static_cast<ExternKind>(k);
                e.index = s.u32();
                m.exports.push_back(std::move(e));
            });
            break;
        case 8:
            m.start = s.u32();
            break;
        case 9:
            read_vec(s, [&] { m.elems.push_back(read_elem_segment(s)); });
            break;
        case 12:
            data_count = s.u32();
            m.has_data_count = true;
            break;
        case 10:
        {
            have_code = true;
            const auto n = s.u32();
            if (n != func_types.size())
                s.fail("function and code section have inconsistent lengths");
            for (uint32_t i = 0; i < n; ++i)
            {
                const auto body_size = s.u32();
                const auto body_offset = s.offset();
                Reader b{s.take(body_size), body_offset};
                Function f;
                f.type = func_types[i];
                uint64_t total_locals = 0;
                read_vec(b, [&] {
                    LocalDecl l;
                    l.count = b.u32();
                    l.type = read_valtype(b);
                    total_locals += l.count;
                    if (total_locals > 50000)
                        b.fail("too many locals");
                    f.locals.push_back(l);
                });
                const auto code_offset = b.offset();
                const auto code = b.take(b.remaining());
                decode_body(code, code_offset);
                f.code.assign(code.begin(), code.end());
                m.functions.push_back(std::move(f));
            }
            break;
        }
        case 11:
            read_vec(s, [&] { m.data.push_back(read_data_segment(s)); });
            break;
        }

        if (!s.eof())
            throw MalformedBinary{s.offset(), "section size mismatch"};
    }

    if (!have_code && !func_types.empty())
        throw MalformedBinary{input.size(), "function section without code section"};
    if (data_count && *data_count != m.data.size())
        throw MalformedBinary{input.size(), "data count and data section have inconsistent lengths"};
    if (m.num_memories() > 1)
        throw UnsupportedFeature{"multi-memory"};
    return m;
}

namespace
{
void write_limits(bytes& out, const Limits& l)
{
    out.push_back(l.max ? 1 : 0);
    write_u32(out, l.min);
    if (l.max)
        write_u32(out, *l.max);
}

void write_table_type(bytes& out, const TableType& t)
{
    out.push_back(static_cast<uint8_t>(t.elem));
    write_limits(out, t.limits);
}

void write_global_type(bytes& out, const GlobalType& g)
{
    out.push_back(static_cast<uint8_t>(g.type));
    out.push_back(g.is_mutable ? 1 : 0);
}

void write_section(bytes& out, uint8_t id, const bytes& payload)
{
    out.push_back(id);
    write_u32(out, static_cast<uint32_t>(payload.size()));
    out.insert(out.end(), payload.begin(), payload.end());
}

void write_elem_segment(bytes& out, const ElemSegment& seg)
{
    uint32_t flags = seg.uses_expressions ? 4 : 0;
    const bool explicit_table = seg.mode == SegmentMode::active &&
                                (seg.table != 0 || (seg.uses_expressions && seg.type != ValType::funcref));
    if (seg.mode == SegmentMode::passive)
        flags |= 1;
    else if (seg.mode == SegmentMode::declarative)
        flags |= 3;
    else if (explicit_table)
        flags |= 2;
    write_u32(out, flags);

    if (seg.mode == SegmentMode::active)
    {
        if (explicit_table)
            write_u32(out, seg.table);
        out.insert(out.end(), seg.offset.begin(), seg.offset.end());
    }
    if (seg.mode != SegmentMode::active || explicit_table)
    {
        if (seg.uses_expressions)
            out.push_back(static_cast<uint8_t>(seg.type));
        else
            out.push_back(0x00);
    }
    write_u32(out, static_cast<uint32_t>(seg.entries.size()));
    for (const auto& e : seg.entries)
    {
        if (seg.uses_expressions)
        {
            if (e)
            {
                out.push_back(static_cast<uint8_t>(Op::ref_func));
                write_u32(out, *e);
            }
            else
            {
                out.push_back(static_cast<uint8_t>(Op::ref_null));
                out.push_back(static_cast<uint8_t>(seg.type));
            }
            out.push_back(static_cast<uint8_t>(Op::end));
        }
        else
            write_u32(out, e.value_or(0));
    }
}

}  // namespace

bytes encode_module(const Module& m)
{
    bytes out{header.begin(), header.end()};
    bytes s;

    if (!m.types.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.types.size()));
        for (const auto& t : m.types)
        {
            s.push_back(0x60);
            write_u32(s, static_cast<uint32_t>(t.params.size()));
            for (auto p : t.params)
                s.push_back(static_cast<uint8_t>(p));
            write_u32(s, static_cast<uint32_t>(t.results.size()));
            for (auto p : t.results)
                s.push_back(static_cast<uint8_t>(p));
        }
        write_section(out, 1, s);
    }
    if (!m.imports.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.imports.size()));
        for (const auto& imp : m.imports)
        {
            write_name(s, imp.module);
            write_name(s, imp.name);
            s.push_back(static_cast<uint8_t>(imp.kind()));
            std::visit(
                [&](const auto& d) {
                    using T = std::decay_t<decltype(d)>;
                    if constexpr (std::is_same_v<T, uint32_t>)
                        write_u32(s, d);
                    else if constexpr (std::is_same_v<T, TableType>)
                        write_table_type(s, d);
                    else if constexpr (std::is_same_v<T, MemoryType>)
                        write_limits(s, d.limits);
                    else
                        write_global_type(s, d);
                },
                imp.desc);
        }
        write_section(out, 2, s);
    }
    if (!m.functions.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.functions.size()));
        for (const auto& f : m.functions)
            write_u32(s, f.type);
        write_section(out, 3, s);
    }
    if (!m.tables.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.tables.size()));
        for (const auto& t : m.tables)
            write_table_type(s, t);
        write_section(out, 4, s);
    }
    if (!m.memories.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.memories.size()));
        for (const auto& mem : m.memories)
            write_limits(s, mem.limits);
        write_section(out, 5, s);
    }
    if (!m.globals.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.globals.size()));
        for (const auto& g : m.globals)
        {
            write_global_type(s, g.type);
            s.insert(s.end(), g.init.begin(), g.init.end());
        }
        write_section(out, 6, s);
    }
    if (!m.exports.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.exports.size()));
        for (const auto& e : m.exports)
        {
            write_name(s, e.name);
            s.push_back(static_cast<uint8_t>(e.kind));
            write_u32(s, e.index);
        }
        write_section(out, 7, s);
    }
    if (m.start)
    {
        s.clear();
        write_u32(s, *m.start);
        write_section(out, 8, s);
    }
    if (!m.elems.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.elems.size()));
        for (const auto& e : m.elems)
            write_elem_segment(s, e);
        write_section(out, 9, s);
    }
    if (m.has_data_count)
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.data.size()));
        write_section(out, 12, s);
    }
    if (!m.functions.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.functions.size()));
        bytes body;
        for (const auto& f : m.functions)
        {
            body.clear();
            write_u32(body, static_cast<uint32_t>(f.locals.size()));
            for (const auto& l : f.locals)
            {
                write_u32(body, l.count);
                body.push_back(static_cast<uint8_t>(l.type));
            }
            body.insert(body.end(), f.code.begin(), f.code.end());
            write_u32(s, static_cast<uint32_t>(body.size()));
            s.insert(s.end(), body.begin(), body.end());
        }
        write_section(out, 10, s);
    }
    if (!m.data.empty())
    {
        s.clear();
        write_u32(s, static_cast<uint32_t>(m.data.size()));
        for (const auto& d : m.data)
        {
            if (d.mode == SegmentMode::passive)
                write_u32(s, 1);
            else if (d.memory != 0)
            {
                write_u32(s, 2);
                write_u32(s, d.memory);
            }
            else
                write_u32(s, 0);
            if (d.mode != SegmentMode::passive)
                s.insert(s.end(), d.offset.begin(), d.offset.end());
            write_u32(s, static_cast<uint32_t>(d.init.size()));
            s.insert(s.end(), d.init.begin(), d.init.end());
        }
        write_section(out, 11, s);
    }
    for (const auto& c : m.customs)
    {
        s.clear();
        write_name(s, c.name);
        s.insert(s.end(), c.content.begin(), c.content.end());
        write_section(out, 0, s);
    }
    return out;
}

bytes read_file(const std::filesystem::path& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw IoError{"cannot open " + path.string()};
    return bytes{std::istreambuf_iterator<char>{in}, std::istreambuf_iterator<char>{}};
}

void write_file(const std::filesystem::path& path, std::span<const uint8_t> data)
{
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out)
        throw IoError{"cannot write " + path.string()};
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw IoError{"failed writing " + path.string()};
}

bytes const_expr_i32(int32_t v)
{
    bytes b{static_cast<uint8_t>(Op::i32_const)};
    write_s32(b, v);
    b.push_back(static_cast<uint8_t>(Op::end));
    return b;
}

bytes const_expr_i64(int64_t v)
{
    bytes b{static_cast<uint8_t>(Op::i64_const)};
    write_s64(b, v);
    b.push_back(static_cast<uint8_t>(Op::end));
    return b;
}

bytes const_expr_f32_bits(uint32_t bits)
{
    bytes b{static_cast<uint8_t>(Op::f32_const)};
    for (int i = 0; i < 4; ++i)
        b.push_back(static_cast<uint8_t>(bits >> (8 * i)));
    b.push_back(static_cast<uint8_t>(Op::end));
    return b;
}

bytes const_expr_f64_bits(uint64_t bits)
{
    bytes b{static_cast<uint8_t>(Op::f64_const)};
    for (int i = 0; i < 8; ++i)
        b.push_back(static_cast<uint8_t>(bits >> (8 * i)));
    b.push_back(static_cast<uint8_t>(Op::end));
    return b;
}

}  // namespace rr::wasm
