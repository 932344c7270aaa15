// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/error.hpp"
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace rr::wasm
{
/// Bounds-checked cursor over a byte buffer. Offsets in errors are relative to `base`.
class Reader
{
public:
    Reader(std::span<const uint8_t> data, size_t base = 0) noexcept : data_{data}, base_{base} {}

    size_t pos() const noexcept { return pos_; }
    size_t offset() const noexcept { return base_ + pos_; }
    bool eof() const noexcept { return pos_ >= data_.size(); }
    size_t remaining() const noexcept { return data_.size() - pos_; }
    std::span<const uint8_t> data() const noexcept { return data_; }
    void seek(size_t p) noexcept { pos_ = p; }

    [[noreturn]] void fail(const std::string& reason) const { throw MalformedBinary{offset(), reason}; }

    uint8_t byte()
    {
        if (eof())
            fail("unexpected end");
        return data_[pos_++];
    }

    uint8_t peek() const
    {
        if (eof())
            fail("unexpected end");
        return data_[pos_];
    }

    std::span<const uint8_t> take(size_t n)
    {
        if (n > remaining())
            fail("unexpected end");
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    template <typename T>
    T fixed()
    {
        static_assert(std::is_trivially_copyable_v<T>);
        T v;
        auto s = take(sizeof(T));
        std::memcpy(&v, s.data(), sizeof(T));
        return v;
    }

    template <typename T>
    T leb()
    {
        static_assert(std::is_integral_v<T>);
        constexpr unsigned bits = sizeof(T) * 8;
        using U = std::make_unsigned_t<T>;
        U result = 0;
        unsigned shift = 0;
        uint8_t b;
        while (true)
        {
            b = byte();
            if (shift + 7 >= bits)
            {
                // Last permitted byte: unused bits must be zero (or sign extension).
                const unsigned used = bits - shift;
                if (b & 0x80)
                    fail("integer representation too long");
                if constexpr (std::is_signed_v<T>)
                {
                    const auto rest = static_cast<int8_t>(static_cast<uint8_t>(b << 1)) >> used;
                    if (rest != 0 && rest != -1)
                        fail("integer too large");
                }
                else if (used < 7 && (b >> used) != 0)
                    fail("integer too large");
                result |= static_cast<U>(static_cast<U>(b & 0x7f) << shift);
                shift += 7;
                break;
            }
            result |= static_cast<U>(static_cast<U>(b & 0x7f) << shift);
            shift += 7;
            if ((b & 0x80) == 0)
                break;
        }
        if constexpr (std::is_signed_v<T>)
        {
            if (shift < bits && (b & 0x40))
                result |= static_cast<U>(~U{0} << shift);
        }
        return static_cast<T>(result);
    }

    uint32_t u32() { return leb<uint32_t>(); }

    /// Signed 33-bit block type index; returned widened.
    int64_t s33()
    {
        int64_t result = 0;
        unsigned shift = 0;
        uint8_t b;
        do
        {
            if (shift >= 35)
                fail("integer representation too long");
            b = byte();
            result |= static_cast<int64_t>(b & 0x7f) << shift;
            shift += 7;
        } while (b & 0x80);
        if (shift < 64 && (b & 0x40))
            result |= -(int64_t{1} << shift);
        if (result < -(int64_t{1} << 32) || result >= (int64_t{1} << 32))
            fail("integer too large");
        return result;
    }

    std::string name()
    {
        const auto n = u32();
        auto s = take(n);
        return std::string{reinterpret_cast<const char*>(s.data()), s.size()};
    }

private:
    std::span<const uint8_t> data_;
    size_t base_;
    size_t pos_ = 0;
};

inline void write_u32(std::vector<uint8_t>& out, uint32_t v)
{
    do
    {
        uint8_t b = v & 0x7f;
        v >>= 7;
        if (v != 0)
            b |= 0x80;
        out.push_back(b);
    } while (v != 0);
}

inline void write_s64(std::vector<uint8_t>& out, int64_t v)
{
    while (true)
    {
        const uint8_t b = v & 0x7f;
        v >>= 7;
        if ((v == 0 && !(b & 0x40)) || (v == -1 && (b & 0x40)))
        {
            out.push_back(b);
            return;
        }
        out.push_back(b | 0x80);
    }
}

inline void write_s32(std::vector<uint8_t>& out, int32_t v)
{
    write_s64(out, v);
}

inline size_t u32_size(uint32_t v) noexcept
{
    size_t n = 1;
    while (v >= 0x80)
    {
        v >>= 7;
        ++n;
    }
    return n;
}

inline void write_name(std::vector<uint8_t>& out, std::string_view s)
{
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

}  // namespace rr::wasm
