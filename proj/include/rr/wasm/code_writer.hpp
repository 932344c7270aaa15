// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/instructions.hpp"
#include "rr/wasm/leb128.hpp"
#include "rr/wasm/module.hpp"
#include <cstring>
#include <span>

namespace rr::wasm
{
/// Appends encoded instructions to a body.
class CodeWriter
{
public:
    CodeWriter& op(Op o)
    {
        const auto v = static_cast<uint16_t>(o);
        if (v > 0xff)
        {
            code_.push_back(static_cast<uint8_t>(v >> 8));
            write_u32(code_, v & 0xff);
        }
        else
            code_.push_back(static_cast<uint8_t>(v));
        return *this;
    }

    CodeWriter& op(Op o, uint32_t imm)
    {
        op(o);
        write_u32(code_, imm);
        return *this;
    }

    CodeWriter& i32_const(int32_t v)
    {
        op(Op::i32_const);
        write_s32(code_, v);
        return *this;
    }

    CodeWriter& i64_const(int64_t v)
    {
        op(Op::i64_const);
        write_s64(code_, v);
        return *this;
    }

    CodeWriter& f32_const(uint32_t bits)
    {
        op(Op::f32_const);
        raw(&bits, 4);
        return *this;
    }

    CodeWriter& f64_const(uint64_t bits)
    {
        op(Op::f64_const);
        raw(&bits, 8);
        return *this;
    }

    CodeWriter& ref_null()
    {
        op(Op::ref_null);
        code_.push_back(static_cast<uint8_t>(ValType::funcref));
        return *this;
    }

    /// Store with natural alignment hint 0 and offset 0.
    CodeWriter& store(Op o)
    {
        op(o);
        write_u32(code_, 0);
        write_u32(code_, 0);
        return *this;
    }

    CodeWriter& block()
    {
        op(Op::block);
        code_.push_back(0x40);
        return *this;
    }

    CodeWriter& br_table(std::span<const uint32_t> labels, uint32_t fallback)
    {
        op(Op::br_table);
        write_u32(code_, static_cast<uint32_t>(labels.size()));
        for (const auto l : labels)
            write_u32(code_, l);
        write_u32(code_, fallback);
        return *this;
    }

    CodeWriter& memory_init(uint32_t data)
    {
        op(Op::memory_init);
        write_u32(code_, data);
        code_.push_back(0);
        return *this;
    }

    CodeWriter& end()
    {
        code_.push_back(static_cast<uint8_t>(Op::end));
        return *this;
    }

    const bytes& code() const noexcept { return code_; }
    bytes take() { return std::move(code_); }
    size_t size() const noexcept { return code_.size(); }

private:
    void raw(const void* p, size_t n)
    {
        const auto* b = static_cast<const uint8_t*>(p);
        code_.insert(code_.end(), b, b + n);
    }

    bytes code_;
};

}  // namespace rr::wasm
