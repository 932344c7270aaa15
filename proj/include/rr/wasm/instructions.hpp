// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/module.hpp"
#include <cstdint>
#include <span>
#include <vector>

namespace rr::wasm
{
/// Opcodes. Single-byte opcodes use their byte value; 0xfc-prefixed ones are 0xfc00 | sub-opcode.
enum class Op : uint16_t
{
    unreachable = 0x00,
    nop = 0x01,
    block = 0x02,
    loop = 0x03,
    if_ = 0x04,
    else_ = 0x05,
    end = 0x0b,
    br = 0x0c,
    br_if = 0x0d,
    br_table = 0x0e,
    return_ = 0x0f,
    call = 0x10,
    call_indirect = 0x11,
    drop = 0x1a,
    select = 0x1b,
    select_t = 0x1c,
    local_get = 0x20,
    local_set = 0x21,
    local_tee = 0x22,
    global_get = 0x23,
    global_set = 0x24,
    table_get = 0x25,
    table_set = 0x26,
    i32_load = 0x28,
    i64_load = 0x29,
    f32_load = 0x2a,
    f64_load = 0x2b,
    i32_load8_s = 0x2c,
    i32_load8_u = 0x2d,
    i32_load16_s = 0x2e,
    i32_load16_u = 0x2f,
    i64_load8_s = 0x30,
    i64_load8_u = 0x31,
    i64_load16_s = 0x32,
    i64_load16_u = 0x33,
    i64_load32_s = 0x34,
    i64_load32_u = 0x35,
    i32_store = 0x36,
    i64_store = 0x37,
    f32_store = 0x38,
    f64_store = 0x39,
    i32_store8 = 0x3a,
    i32_store16 = 0x3b,
    i64_store8 = 0x3c,
    i64_store16 = 0x3d,
    i64_store32 = 0x3e,
    memory_size = 0x3f,
    memory_grow = 0x40,
    i32_const = 0x41,
    i64_const = 0x42,
    f32_const = 0x43,
    f64_const = 0x44,

    i32_eqz = 0x45,
    i32_eq,
    i32_ne,
    i32_lt_s,
    i32_lt_u,
    i32_gt_s,
    i32_gt_u,
    i32_le_s,
    i32_le_u,
    i32_ge_s,
    i32_ge_u,
    i64_eqz = 0x50,
    i64_eq,
    i64_ne,
    i64_lt_s,
    i64_lt_u,
    i64_gt_s,
    i64_gt_u,
    i64_le_s,
    i64_le_u,
    i64_ge_s,
    i64_ge_u,
    f32_eq = 0x5b,
    f32_ne,
    f32_lt,
    f32_gt,
    f32_le,
    f32_ge,
    f64_eq = 0x61,
    f64_ne,
    f64_lt,
    f64_gt,
    f64_le,
    f64_ge,

    i32_clz = 0x67,
    i32_ctz,
    i32_popcnt,
    i32_add,
    i32_sub,
    i32_mul,
    i32_div_s,
    i32_div_u,
    i32_rem_s,
    i32_rem_u,
    i32_and,
    i32_or,
    i32_xor,
    i32_shl,
    i32_shr_s,
    i32_shr_u,
    i32_rotl,
    i32_rotr,
    i64_clz = 0x79,
    i64_ctz,
    i64_popcnt,
    i64_add,
    i64_sub,
    i64_mul,
    i64_div_s,
    i64_div_u,
    i64_rem_s,
    i64_rem_u,
    i64_and,
    i64_or,
    i64_xor,
    i64_shl,
    i64_shr_s,
    i64_shr_u,
    i64_rotl,
    i64_rotr,
    f32_abs = 0x8b,
    f32_neg,
    f32_ceil,
    f32_floor,
    f32_trunc,
    f32_nearest,
    f32_sqrt,
    f32_add,
    f32_sub,
    f32_mul,
    f32_div,
    f32_min,
    f32_max,
    f32_copysign,
    f64_abs = 0x99,
    f64_neg,
    f64_ceil,
    f64_floor,
    f64_trunc,
    f64_nearest,
    f64_sqrt,
    f64_add,
    f64_sub,
    f64_mul,
    f64_div,
    f64_min,
    f64_max,
    f64_copysign,

    i32_wrap_i64 = 0xa7,
    i32_trunc_f32_s,
    i32_trunc_f32_u,
    i32_trunc_f64_s,
    i32_trunc_f64_u,
    i64_extend_i32_s,
    i64_extend_i32_u,
    i64_trunc_f32_s,
    i64_trunc_f32_u,
    i64_trunc_f64_s,
    i64_trunc_f64_u,
    f32_convert_i32_s,
    f32_convert_i32_u,
    f32_convert_i64_s,
    f32_convert_i64_u,
    f32_demote_f64,
    f64_convert_i32_s,
    f64_convert_i32_u,
    f64_convert_i64_s,
    f64_convert_i64_u,
    f64_promote_f32,
    i32_reinterpret_f32,
    i64_reinterpret_f64,
    f32_reinterpret_i32,
    f64_reinterpret_i64,
    i32_extend8_s = 0xc0,
    i32_extend16_s,
    i64_extend8_s,
    i64_extend16_s,
    i64_extend32_s,

    ref_null = 0xd0,
    ref_is_null = 0xd1,
    ref_func = 0xd2,

    i32_trunc_sat_f32_s = 0xfc00,
    i32_trunc_sat_f32_u,
    i32_trunc_sat_f64_s,
    i32_trunc_sat_f64_u,
    i64_trunc_sat_f32_s,
    i64_trunc_sat_f32_u,
    i64_trunc_sat_f64_s,
    i64_trunc_sat_f64_u,
    memory_init = 0xfc08,
    data_drop,
    memory_copy,
    memory_fill,
    table_init,
    elem_drop,
    table_copy,
    table_grow,
    table_size,
    table_fill,
};

enum class IndexSpace : uint8_t
{
    type,
    func,
    table,
    memory,
    global,
    elem,
    data,
};

const char* to_string(IndexSpace s) noexcept;

/// Location of one index immediate inside a body.
struct IndexImmediate
{
    IndexSpace space;
    uint32_t value;
    uint32_t offset;  ///< byte offset of the LEB in the code
    uint32_t length;  ///< encoded length in bytes
};

/// Sentinel for "no matching instruction".
inline constexpr uint32_t no_instr = 0xffffffff;

/// One decoded instruction. Meaning of the immediate fields depends on the opcode:
///  - block/loop/if: `c` holds the block type (s33; negative = value type / empty), `a` the
///    matching `else` instruction index (or no_instr), `b` the matching `end` index.
///  - else: `b` the index of the `end` closing the `if`.
///  - br/br_if: `a` label depth.
///  - br_table: `a` start in DecodedBody::br_table, `b` number of labels excluding default.
///  - call/ref.func: `a` function index.  call_indirect: `a` type, `b` table.
///  - local/global ops: `a` index.  table.get/set/size/grow/fill: `a` table.
///  - loads/stores: `a` alignment, `b` offset.  memory.size/grow/fill: `a` memory.
///  - memory.init: `a` data, `b` memory.  memory.copy: `a` dst, `b` src memory.
///  - table.init: `a` elem, `b` table.  table.copy: `a` dst, `b` src table.
///  - data.drop / elem.drop: `a` segment.
///  - consts: `c` raw bits.  select_t: `a` value type byte.  ref.null: `a` ref type byte.
struct Instr
{
    Op op;
    uint32_t offset = 0;
    uint32_t a = 0;
    uint32_t b = 0;
    uint64_t c = 0;
};

struct DecodedBody
{
    std::vector<Instr> instrs;
    std::vector<uint32_t> br_table;
    std::vector<IndexImmediate> indices;
};

/// Decodes an instruction sequence terminated by the `end` matching the implicit outer block.
/// Rejects SIMD and other post-2.0 proposals with UnsupportedFeature; matches block structure.
/// Throws MalformedBinary with offsets relative to `base`.
DecodedBody decode_body(std::span<const uint8_t> code, size_t base = 0);

/// Decodes up to and including the outermost `end`; the byte count is stored in `consumed`.
/// With `consumed == nullptr` trailing bytes are an error.
DecodedBody decode_prefix(std::span<const uint8_t> code, size_t base, size_t* consumed);

/// Decodes a constant expression (same grammar, single implicit block).
inline DecodedBody decode_expr(std::span<const uint8_t> code, size_t base = 0)
{
    return decode_body(code, base);
}

/// True if the block type immediate denotes a type index.
inline bool blocktype_is_index(uint64_t c) noexcept
{
    return static_cast<int64_t>(c) >= 0;
}

}  // namespace rr::wasm
