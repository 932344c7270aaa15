// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

#include "rr/exec/harness.hpp"
#include "rr/error.hpp"
#include "rr/wasm/binary.hpp"

namespace rr::exec
{
const char* to_string(RunStatus s) noexcept
{
    switch (s)
    {
    case RunStatus::exited:
        return "exit";
    case RunStatus::trapped:
        return "trap";
    case RunStatus::exhausted:
        return "exhausted";
    }
    return "?";
}

std::optional<Addr> HostEnvironment::function(
    std::string_view module, std::string_view name, const wasm::FuncType& type)
{
    using wasm::ValType;
    const std::string key = std::string{module} + "." + std::string{name};
    for (const auto& [k, a] : cache_)
        if (k == key)
            return store_.function(a).type == type ? std::optional{a} : std::nullopt;

    const wasm::FuncType i32_to_void{{ValType::i32}, {}};
    if (type != i32_to_void)
        return std::nullopt;

    HostFunction fn;
    if (module == "host" && name == "putc")
        fn = [this](std::span<const Value> a) {
            out_.push_back(static_cast<char>(a[0].as_i32()));
            return std::vector<Value>{};
        };
    else if (module == "host" && name == "print_i32")
        fn = [this](std::span<const Value> a) {
            out_ += std::to_string(a[0].as_i32());
            out_.push_back('\n');
            return std::vector<Value>{};
        };
    else if (module == "host" && name == "exit")
        fn = [](std::span<const Value> a) -> std::vector<Value> { throw ProcExit{a[0].as_i32()}; };
    else if (module == "rr" && name == "cov")
        fn = [this](std::span<const Value> a) {
            coverage_.push_back(static_cast<uint32_t>(a[0].as_i32()));
            return std::vector<Value>{};
        };
    else
        return std::nullopt;

    const auto addr = store_.add_host_function(type, std::move(fn));
    cache_.emplace_back(key, addr);
    return addr;
}

std::optional<Extern> HostEnvironment::resolve(const wasm::Import& imp, const wasm::Module& m)
{
    if (imp.kind() != wasm::ExternKind::func)
        return std::nullopt;
    const auto a = function(imp.module, imp.name, m.types.at(std::get<uint32_t>(imp.desc)));
    if (!a)
        return std::nullopt;
    return Extern{wasm::ExternKind::func, *a};
}

std::vector<Value> default_arguments(const wasm::FuncType& type)
{
    std::vector<Value> args;
    for (const auto t : type.params)
        args.push_back({t, wasm::is_reference(t) ? null_ref : 0});
    return args;
}

std::string describe_trap(const Trap& t)
{
    std::string s = "trap: " + t.kind();
    for (const auto& [inst, idx] : t.frames())
        s += "\n  at func[" + std::to_string(idx) + "]" + (inst.empty() ? "" : " in " + inst);
    return s;
}

namespace detail
{
RunOutcome finish(Store& store, HostEnvironment& env, std::chrono::steady_clock::time_point start)
{
    RunOutcome r;
    r.stdout_data = std::move(env.out());
    r.coverage = std::move(env.coverage());
    r.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.fuel_used = store.fuel_used();
    return r;
}
}  // namespace detail

RunOutcome run_module(const wasm::Module& m, std::string_view entry, const ExecLimits& limits)
{
    Store store{limits};
    HostEnvironment env{store};
    auto module = std::make_shared<const wasm::Module>(m);
    return run_guarded(store, env, [&] {
        auto& inst = store.instantiate(
            module,
            [&](const wasm::Import& imp) { return env.resolve(imp, m); },
            "");
        const auto e = inst.find_export(entry);
        if (!e || e->kind != wasm::ExternKind::func)
            throw InstantiationFailed{"no exported function named '" + std::string{entry} + "'"};
        const auto args = default_arguments(store.function(e->addr).type);
        store.invoke(e->addr, args);
    });
}

RunOutcome run_module(std::span<const uint8_t> bytes, std::string_view entry, const ExecLimits& limits)
{
    return run_module(wasm::parse_module(bytes), entry, limits);
}

}  // namespace rr::exec
