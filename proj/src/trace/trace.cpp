// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/trace/trace.hpp"
#include "rr/error.hpp"
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace rr::trace
{
bool OutCallReturn::operator==(const OutCallReturn& o) const
{
    return id == o.id && import_name == o.import_name && function == o.function && slot == o.slot &&
           table == o.table && results == o.results && trapped == o.trapped && nested == o.nested;
}

namespace
{
using wasm::ValType;

void drop_internal_entries(std::vector<Event>& events)
{
    std::erase_if(events, [](const Event& e) {
        const auto* entry = std::get_if<TargetEntry>(&e);
        return entry != nullptr && entry->internal();
    });
    for (auto& e : events)
        if (auto* oc = std::get_if<OutCallReturn>(&e))
            drop_internal_entries(oc->nested);
}

/// Values of globals and table slots that are known to hold at the current trace position.
struct Knowledge
{
    const Trace& trace;
    bool initial = true;
    std::map<uint32_t, Value> globals;
    std::map<std::pair<uint32_t, uint32_t>, Value> slots;

    std::optional<Value> global(uint32_t idx) const
    {
        if (const auto it = globals.find(idx); it != globals.end())
            return it->second;
        if (initial && idx < trace.initial_globals.size())
            return trace.initial_globals[idx];
        return std::nullopt;
    }

    std::optional<Value> slot(uint32_t table, uint32_t s) const
    {
        if (const auto it = slots.find({table, s}); it != slots.end())
            return it->second;
        if (initial && table < trace.initial_table_sizes.size() && s < trace.initial_table_sizes[table])
            return Value::funcref(exec::no_addr);
        return std::nullopt;
    }

    /// The target ran: nothing is known any more.
    void forget()
    {
        initial = false;
        globals.clear();
        slots.clear();
    }
};

/// Merges a segment of memory writes: overlapping or adjacent ranges fuse, later bytes win.
std::vector<MemoryWrite> merge_writes(const std::vector<const MemoryWrite*>& writes)
{
    std::map<uint64_t, std::vector<uint8_t>> runs;  // start -> bytes, disjoint and non-adjacent
    for (const auto* w : writes)
    {
        if (w->bytes.empty())
            continue;
        uint64_t start = w->offset;
        uint64_t end = start + w->bytes.size();
        auto it = runs.upper_bound(start);
        if (it != runs.begin())
        {
            auto prev = std::prev(it);
            if (prev->first + prev->second.size() >= start)
                it = prev;
        }
        std::vector<std::pair<uint64_t, std::vector<uint8_t>>> absorbed;
        while (it != runs.end() && it->first <= end)
        {
            absorbed.emplace_back(it->first, std::move(it->second));
            it = runs.erase(it);
        }
        for (const auto& [s, b] : absorbed)
        {
            start = std::min(start, s);
            end = std::max(end, s + b.size());
        }
        std::vector<uint8_t> merged(end - start);
        for (const auto& [s, b] : absorbed)
            std::copy(b.begin(), b.end(), merged.begin() + static_cast<ptrdiff_t>(s - start));
        std::copy(w->bytes.begin(), w->bytes.end(), merged.begin() + static_cast<ptrdiff_t>(w->offset - start));
        runs.emplace(start, std::move(merged));
    }
    std::vector<MemoryWrite> out;
    for (auto& [s, b] : runs)
        out.push_back({static_cast<uint32_t>(s), std::move(b)});
    return out;
}

/// Reduces one crossing: a maximal run of consecutive state writes.
void reduce_crossing(std::vector<Event>& run, Knowledge& known, std::vector<Event>& out)
{
    // Only the last write to a global or slot within a crossing matters.
    std::map<uint32_t, size_t> last_global;
    std::map<std::pair<uint32_t, uint32_t>, size_t> last_slot;
    for (size_t i = 0; i < run.size(); ++i)
    {
        if (const auto* g = std::get_if<GlobalWrite>(&run[i]))
            last_global[g->index] = i;
        else if (const auto* t = std::get_if<TableWrite>(&run[i]))
            last_slot[{t->table, t->slot}] = i;
    }

    std::vector<const MemoryWrite*> segment;
    size_t segment_pos = 0;
    std::vector<std::optional<Event>> kept(run.size());
    std::vector<std::vector<MemoryWrite>> merged_at(run.size());
    auto flush = [&] {
        if (!segment.empty())
            merged_at[segment_pos] = merge_writes(segment);
        segment.clear();
    };

    for (size_t i = 0; i < run.size(); ++i)
    {
        auto& e = run[i];
        if (const auto* w = std::get_if<MemoryWrite>(&e))
        {
            if (segment.empty())
                segment_pos = i;
            segment.push_back(w);
        }
        else if (const auto* g = std::get_if<GlobalWrite>(&e))
        {
            if (last_global[g->index] != i || known.global(g->index) == g->value)
                continue;
            known.globals[g->index] = g->value;
            kept[i] = e;
        }
        else if (const auto* t = std::get_if<TableWrite>(&e))
        {
            if (last_slot[{t->table, t->slot}] != i || known.slot(t->table, t->slot) == t->value)
                continue;
            known.slots[{t->table, t->slot}] = t->value;
            kept[i] = e;
        }
        else
        {
            flush();
            kept[i] = e;
        }
    }
    flush();

    for (size_t i = 0; i < run.size(); ++i)
    {
        for (auto& w : merged_at[i])
            out.emplace_back(std::move(w));
        if (kept[i])
            out.push_back(std::move(*kept[i]));
    }
}

std::vector<Event> reduce_list(std::vector<Event> events, Knowledge& known)
{
    std::vector<Event> out;
    std::vector<Event> run;
    for (auto& e : events)
    {
        if (e.is_write())
        {
            run.push_back(std::move(e));
            continue;
        }
        reduce_crossing(run, known, out);
        run.clear();
        known.forget();
        if (auto* oc = std::get_if<OutCallReturn>(&e))
        {
            oc->nested = reduce_list(std::move(oc->nested), known);
            known.forget();
        }
        out.push_back(std::move(e));
    }
    reduce_crossing(run, known, out);
    return out;
}

std::string hex(std::span<const uint8_t> b)
{
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (const auto c : b)
    {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 15]);
    }
    return s;
}

[[noreturn]] void parse_error(size_t line, const std::string& what)
{
    throw Error{"trace line " + std::to_string(line) + ": " + what};
}

template <typename T>
T number(std::string_view s, size_t line, int base = 10)
{
    T v{};
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v, base);
    if (ec != std::errc{} || p != end)
        parse_error(line, "bad number '" + std::string{s} + "'");
    return v;
}

void write_events(std::ostringstream& os, const std::vector<Event>& events, int depth)
{
    const std::string indent(static_cast<size_t>(depth) * 2, ' ');
    for (const auto& e : events)
    {
        os << indent;
        if (const auto* en = std::get_if<TargetEntry>(&e))
        {
            os << "ENTRY " << en->export_name;
            for (const auto& a : en->args)
                os << ' ' << format_value(a);
            os << " @act=" << en->activation;
            if (en->caller_activation)
                os << " @caller=" << *en->caller_activation;
            if (en->parent_outcall)
                os << " @oc=" << *en->parent_outcall;
            if (!en->chain.empty())
            {
                os << " @from=";
                for (size_t i = 0; i < en->chain.size(); ++i)
                    os << (i ? "," : "") << 'f' << en->chain[i].function << ':' << en->chain[i].activation;
            }
            os << '\n';
        }
        else if (const auto* oc = std::get_if<OutCallReturn>(&e))
        {
            os << "RESULT " << oc->import_name;
            for (const auto& r : oc->results)
                os << ' ' << format_value(r);
            os << " #" << oc->id;
            if (oc->slot)
                os << " @slot=" << *oc->slot;
            if (oc->table != 0)
                os << " @table=" << oc->table;
            if (oc->trapped)
                os << " !trap";
            os << '\n';
            write_events(os, oc->nested, depth + 1);
        }
        else if (const auto* w = std::get_if<MemoryWrite>(&e))
            os << "MEMW " << w->offset << ' ' << hex(w->bytes) << '\n';
        else if (const auto* g = std::get_if<MemoryGrow>(&e))
            os << "GROW " << g->new_pages << '\n';
        else if (const auto* gw = std::get_if<GlobalWrite>(&e))
            os << "GLOBW " << gw->index << ' ' << format_value(gw->value) << '\n';
        else if (const auto* tw = std::get_if<TableWrite>(&e))
        {
            os << "TABW " << tw->slot << ' ' << format_value(tw->value);
            if (tw->table != 0)
                os << " @table=" << tw->table;
            os << '\n';
        }
        else if (const auto* tg = std::get_if<TableGrow>(&e))
        {
            os << "TGROW " << tg->new_size;
            if (tg->table != 0)
                os << " @table=" << tg->table;
            os << '\n';
        }
    }
}

size_t count_entries_in(const std::vector<Event>& events, bool nested)
{
    size_t n = 0;
    for (const auto& e : events)
    {
        if (std::holds_alternative<TargetEntry>(e))
            ++n;
        else if (const auto* oc = std::get_if<OutCallReturn>(&e); oc && nested)
            n += count_entries_in(oc->nested, nested);
    }
    return n;
}
}  // namespace

Trace reduce_trace(const Trace& t)
{
    Trace r = t;
    drop_internal_entries(r.events);
    Knowledge known{r, true, {}, {}};
    r.events = reduce_list(std::move(r.events), known);
    return r;
}

std::string format_value(const Value& v)
{
    char buf[32];
    switch (v.type)
    {
    case ValType::i32:
        return "i32:" + std::to_string(v.as_i32());
    case ValType::i64:
        return "i64:" + std::to_string(v.as_i64());
    case ValType::f32:
        std::snprintf(buf, sizeof buf, "f32:0x%08x", static_cast<uint32_t>(v.bits));
        return buf;
    case ValType::f64:
        std::snprintf(buf, sizeof buf, "f64:0x%016llx", static_cast<unsigned long long>(v.bits));
        return buf;
    case ValType::funcref:
        return v.bits == exec::null_ref ? "funcref:null" : "funcref:f" + std::to_string(v.bits);
    case ValType::externref:
        return v.bits == exec::null_ref ? "externref:null" : "externref:" + std::to_string(v.bits);
    default:
        return "?";
    }
}

Value parse_value(std::string_view s)
{
    const auto colon = s.find(':');
    if (colon == std::string_view::npos)
        throw Error{"bad trace value '" + std::string{s} + "'"};
    const auto type = s.substr(0, colon);
    auto body = s.substr(colon + 1);
    auto hex_bits = [&](std::string_view b) {
        if (b.substr(0, 2) != "0x")
            throw Error{"bad float bits '" + std::string{s} + "'"};
        return number<uint64_t>(b.substr(2), 0, 16);
    };
    if (type == "i32")
        return Value::i32(number<int32_t>(body, 0));
    if (type == "i64")
        return Value::i64(number<int64_t>(body, 0));
    if (type == "f32")
        return Value::f32_bits(static_cast<uint32_t>(hex_bits(body)));
    if (type == "f64")
        return Value::f64_bits(hex_bits(body));
    if (type == "funcref" || type == "externref")
    {
        Value v{type == "funcref" ? ValType::funcref : ValType::externref, exec::null_ref};
        if (body != "null")
        {
            if (type == "funcref")
            {
                if (body.empty() || body[0] != 'f')
                    throw Error{"bad function reference '" + std::string{s} + "'"};
                body.remove_prefix(1);
            }
            v.bits = number<uint32_t>(body, 0);
        }
        return v;
    }
    throw Error{"unknown value type in '" + std::string{s} + "'"};
}

std::string to_text(const Trace& t)
{
    std::ostringstream os;
    os << "# entry " << t.entry << '\n';
    os << "# target " << t.target_export << ' ' << t.target_index << '\n';
    os << "# pages " << t.initial_pages << '\n';
    for (size_t i = 0; i < t.initial_globals.size(); ++i)
        os << "# global " << i << ' ' << format_value(t.initial_globals[i]) << '\n';
    for (size_t i = 0; i < t.initial_table_sizes.size(); ++i)
        os << "# table " << i << ' ' << t.initial_table_sizes[i] << '\n';
    for (const auto& [tab, slot] : t.called_slots)
        os << "# slot " << tab << ' ' << slot << '\n';
    write_events(os, t.events, 0);
    return os.str();
}

Trace parse_text(std::string_view text)
{
    Trace t;
    // Open containers by depth: depth 0 is the top-level list.
    std::vector<std::vector<Event>*> lists{&t.events};
    size_t line_no = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty())
            continue;

        std::vector<std::string_view> tok;
        size_t indent = 0;
        while (indent < line.size() && line[indent] == ' ')
            ++indent;
        for (size_t p = indent; p < line.size();)
        {
            const auto q = std::min(line.find(' ', p), line.size());
            if (q > p)
                tok.push_back(line.substr(p, q - p));
            p = q + 1;
        }
        if (tok.empty())
            continue;

        if (tok[0] == "#")
        {
            if (tok.size() < 2)
                parse_error(line_no, "empty metadata");
            if (tok[1] == "entry" && tok.size() == 3)
                t.entry = tok[2];
            else if (tok[1] == "target" && tok.size() == 4)
            {
                t.target_export = tok[2];
                t.target_index = number<uint32_t>(tok[3], line_no);
            }
            else if (tok[1] == "pages" && tok.size() == 3)
                t.initial_pages = number<uint32_t>(tok[2], line_no);
            else if (tok[1] == "global" && tok.size() == 4)
                t.initial_globals.push_back(parse_value(tok[3]));
            else if (tok[1] == "table" && tok.size() == 4)
                t.initial_table_sizes.push_back(number<uint32_t>(tok[3], line_no));
            else if (tok[1] == "slot" && tok.size() == 4)
                t.called_slots.emplace(number<uint32_t>(tok[2], line_no), number<uint32_t>(tok[3], line_no));
            else
                parse_error(line_no, "unknown metadata");
            continue;
        }

        if (indent % 2 != 0 || indent / 2 >= lists.size())
            parse_error(line_no, "bad indentation");
        lists.resize(indent / 2 + 1);
        auto& dest = *lists.back();

        // Split positional tokens from annotations.
        std::vector<std::string_view> pos;
        std::map<std::string_view, std::string_view> ann;
        std::optional<uint32_t> id;
        bool trapped = false;
        for (size_t i = 1; i < tok.size(); ++i)
        {
            const auto s = tok[i];
            if (s[0] == '@')
            {
                const auto eq = s.find('=');
                if (eq == std::string_view::npos)
                    parse_error(line_no, "bad annotation");
                ann[s.substr(1, eq - 1)] = s.substr(eq + 1);
            }
            else if (s[0] == '#')
                id = number<uint32_t>(s.substr(1), line_no);
            else if (s == "!trap")
                trapped = true;
            else
                pos.push_back(s);
        }
        auto opt_ann = [&](std::string_view key) -> std::optional<uint32_t> {
            if (const auto it = ann.find(key); it != ann.end())
                return number<uint32_t>(it->second, line_no);
            return std::nullopt;
        };
        auto need = [&](size_t n) {
            if (pos.size() != n)
                parse_error(line_no, "wrong number of fields");
        };

        const auto kind = tok[0];
        if (kind == "ENTRY")
        {
            if (pos.empty())
                parse_error(line_no, "ENTRY without export");
            TargetEntry e;
            e.export_name = pos[0];
            for (size_t i = 1; i < pos.size(); ++i)
                e.args.push_back(parse_value(pos[i]));
            e.activation = opt_ann("act").value_or(0);
            e.caller_activation = opt_ann("caller");
            e.parent_outcall = opt_ann("oc");
            if (const auto it = ann.find("from"); it != ann.end())
            {
                auto list = it->second;
                while (!list.empty())
                {
                    const auto comma = std::min(list.find(','), list.size());
                    const auto item = list.substr(0, comma);
                    const auto c = item.find(':');
                    if (item.empty() || item[0] != 'f' || c == std::string_view::npos)
                        parse_error(line_no, "bad caller frame");
                    e.chain.push_back({number<uint32_t>(item.substr(1, c - 1), line_no),
                        number<uint32_t>(item.substr(c + 1), line_no)});
                    list = comma < list.size() ? list.substr(comma + 1) : std::string_view{};
                }
            }
            dest.emplace_back(std::move(e));
        }
        else if (kind == "RESULT")
        {
            if (pos.empty())
                parse_error(line_no, "RESULT without import");
            OutCallReturn oc;
            oc.import_name = pos[0];
            if (oc.import_name.size() < 2 || oc.import_name[0] != 'f')
                parse_error(line_no, "bad import name");
            oc.function = number<uint32_t>(std::string_view{oc.import_name}.substr(1), line_no);
            for (size_t i = 1; i < pos.size(); ++i)
                oc.results.push_back(parse_value(pos[i]));
            oc.id = id.value_or(0);
            oc.slot = opt_ann("slot");
            oc.table = opt_ann("table").value_or(0);
            oc.trapped = trapped;
            dest.emplace_back(std::move(oc));
            lists.push_back(&std::get<OutCallReturn>(dest.back()).nested);
        }
        else if (kind == "MEMW")
        {
            need(2);
            MemoryWrite w;
            w.offset = number<uint32_t>(pos[0], line_no);
            if (pos[1].size() % 2 != 0)
                parse_error(line_no, "odd hex length");
            for (size_t i = 0; i < pos[1].size(); i += 2)
                w.bytes.push_back(number<uint8_t>(pos[1].substr(i, 2), line_no, 16));
            dest.emplace_back(std::move(w));
        }
        else if (kind == "GROW")
        {
            need(1);
            dest.emplace_back(MemoryGrow{number<uint32_t>(pos[0], line_no)});
        }
        else if (kind == "GLOBW")
        {
            need(2);
            dest.emplace_back(GlobalWrite{number<uint32_t>(pos[0], line_no), parse_value(pos[1])});
        }
        else if (kind == "TABW")
        {
            need(2);
            dest.emplace_back(
                TableWrite{opt_ann("table").value_or(0), number<uint32_t>(pos[0], line_no), parse_value(pos[1])});
        }
        else if (kind == "TGROW")
        {
            need(1);
            dest.emplace_back(TableGrow{opt_ann("table").value_or(0), number<uint32_t>(pos[0], line_no)});
        }
        else
            parse_error(line_no, "unknown event '" + std::string{kind} + "'");
    }
    return t;
}

size_t count_top_level_entries(const Trace& t)
{
    return count_entries_in(t.events, false);
}

size_t count_entries(const Trace& t)
{
    return count_entries_in(t.events, true);
}

}  // namespace rr::trace
