// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/exec/store.hpp"
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rr::trace
{
/// Trace values reuse the runtime representation, except that non-null function references
/// hold the referenced function's index in the input module instead of a store address.
using exec::Value;

/// One outside activation on the way to an entry: input function index and activation id.
struct CallerFrame
{
    uint32_t function = 0;
    uint32_t activation = 0;

    bool operator==(const CallerFrame&) const = default;
};

struct TargetEntry
{
    std::string export_name;
    std::vector<Value> args;
    uint32_t activation = 0;
    /// Set when the target called itself; such entries never cross the boundary.
    std::optional<uint32_t> caller_activation;
    /// Out-call during which the entry happened.
    std::optional<uint32_t> parent_outcall;
    /// Outside activations that led to the entry, outermost first (top-level entries only).
    std::vector<CallerFrame> chain;

    bool internal() const noexcept { return caller_activation.has_value(); }
    bool operator==(const TargetEntry&) const = default;
};

struct Event;

/// A call from the target to a function outside of it, with everything that happened
/// before it returned.
struct OutCallReturn
{
    uint32_t id = 0;
    std::string import_name;  ///< "f<input index>"
    uint32_t function = 0;    ///< input function index of the callee
    std::optional<uint32_t> slot;
    uint32_t table = 0;
    std::vector<Value> results;
    bool trapped = false;  ///< the callee did not return
    std::vector<Event> nested;

    bool operator==(const OutCallReturn&) const;
};

struct MemoryWrite
{
    uint32_t offset = 0;
    std::vector<uint8_t> bytes;

    bool operator==(const MemoryWrite&) const = default;
};

struct MemoryGrow
{
    uint32_t new_pages = 0;

    bool operator==(const MemoryGrow&) const = default;
};

struct GlobalWrite
{
    uint32_t index = 0;
    Value value;

    bool operator==(const GlobalWrite&) const = default;
};

struct TableWrite
{
    uint32_t table = 0;
    uint32_t slot = 0;
    Value value;  ///< funcref holding an input function index, or null

    bool operator==(const TableWrite&) const = default;
};

struct TableGrow
{
    uint32_t table = 0;
    uint32_t new_size = 0;

    bool operator==(const TableGrow&) const = default;
};

using EventVariant =
    std::variant<TargetEntry, OutCallReturn, MemoryWrite, MemoryGrow, GlobalWrite, TableWrite, TableGrow>;

struct Event : EventVariant
{
    using EventVariant::EventVariant;

    const EventVariant& base() const noexcept { return *this; }
    EventVariant& base() noexcept { return *this; }
    /// True for the state-write kinds (memory, global, table).
    bool is_write() const noexcept
    {
        return !std::holds_alternative<TargetEntry>(*this) && !std::holds_alternative<OutCallReturn>(*this);
    }
};

struct Trace
{
    std::string entry;         ///< original entry export
    std::string target_export; ///< boundary export name of the target
    uint32_t target_index = 0;
    uint32_t initial_pages = 0;
    std::vector<Value> initial_globals;
    std::vector<uint32_t> initial_table_sizes;
    /// (table, slot) pairs the target called indirectly, whatever the callee.
    std::set<std::pair<uint32_t, uint32_t>> called_slots;
    std::vector<Event> events;

    bool operator==(const Trace&) const = default;
};

/// Applies the reduction rules: drops internal entries, merges memory writes within one
/// crossing, and drops global/table writes that do not change the known value.
Trace reduce_trace(const Trace& t);

std::string to_text(const Trace& t);
Trace parse_text(std::string_view text);

std::string format_value(const Value& v);
Value parse_value(std::string_view s);

/// Number of TargetEntry events at the top level (not inside out-calls).
size_t count_top_level_entries(const Trace& t);
/// Number of TargetEntry events anywhere.
size_t count_entries(const Trace& t);

}  // namespace rr::trace
