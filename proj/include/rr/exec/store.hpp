// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rr/wasm/instructions.hpp"
#include "rr/wasm/module.hpp"
#include <chrono>
#include <deque>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rr::exec
{
using wasm::ValType;

using Addr = uint32_t;
inline constexpr Addr no_addr = 0xffffffff;
/// Bit pattern of a null reference.
inline constexpr uint64_t null_ref = ~uint64_t{0};

/// A typed runtime value. Numbers are stored as raw bits (floats bit-exactly);
/// references hold a function address or null_ref.
struct Value
{
    ValType type = ValType::i32;
    uint64_t bits = 0;

    static Value i32(int32_t v) { return {ValType::i32, static_cast<uint32_t>(v)}; }
    static Value i64(int64_t v) { return {ValType::i64, static_cast<uint64_t>(v)}; }
    static Value f32_bits(uint32_t b) { return {ValType::f32, b}; }
    static Value f64_bits(uint64_t b) { return {ValType::f64, b}; }
    static Value funcref(Addr a) { return {ValType::funcref, a == no_addr ? null_ref : a}; }

    int32_t as_i32() const noexcept { return static_cast<int32_t>(static_cast<uint32_t>(bits)); }
    int64_t as_i64() const noexcept { return static_cast<int64_t>(bits); }

    bool operator==(const Value&) const = default;
};

/// Execution traps. `frames` lists "<instance>:<function index>" innermost first.
class Trap : public std::exception
{
public:
    Trap(std::string kind) : kind_{std::move(kind)} {}

    const char* what() const noexcept override { return kind_.c_str(); }
    const std::string& kind() const noexcept { return kind_; }
    std::vector<std::pair<std::string, uint32_t>>& frames() noexcept { return frames_; }
    const std::vector<std::pair<std::string, uint32_t>>& frames() const noexcept { return frames_; }

private:
    std::string kind_;
    std::vector<std::pair<std::string, uint32_t>> frames_;
};

/// Fuel, memory or wall-clock budget exceeded.
class ResourceExhausted : public std::exception
{
public:
    explicit ResourceExhausted(std::string reason) : reason_{std::move(reason)} {}
    const char* what() const noexcept override { return reason_.c_str(); }

private:
    std::string reason_;
};

/// Thrown by the host exit escape; unwinds the whole execution.
struct ProcExit
{
    int32_t code;
};

struct ExecLimits
{
    uint64_t fuel = 1'000'000'000;
    uint64_t memory_bytes = uint64_t{1} << 30;
    std::chrono::duration<double> wall = std::chrono::seconds{300};
    uint32_t max_call_depth = 1000;
};

using HostFunction = std::function<std::vector<Value>(std::span<const Value>)>;

struct Instance;

struct FunctionInstance
{
    wasm::FuncType type;
    Instance* instance = nullptr;  ///< set for wasm functions
    uint32_t index = 0;            ///< function index within the instance's module
    HostFunction host;             ///< set for host functions
    Addr alias_of = no_addr;       ///< late-bound forwarder; see Store::bind_alias
    bool is_alias = false;
    uint32_t tag = 0;              ///< free for observers
};

struct MemoryInstance
{
    std::vector<uint8_t> data;
    std::optional<uint32_t> max_pages;

    uint32_t pages() const noexcept { return static_cast<uint32_t>(data.size() / 65536); }
};

struct TableInstance
{
    wasm::TableType type;
    std::vector<uint64_t> elems;
};

struct GlobalInstance
{
    wasm::GlobalType type;
    uint64_t bits = 0;
};

struct CompiledCode
{
    wasm::DecodedBody body;
    std::vector<ValType> locals;  ///< declared locals, excluding parameters
};

struct Extern
{
    wasm::ExternKind kind;
    Addr addr;
};

struct Instance
{
    std::string name;
    std::shared_ptr<const wasm::Module> module;
    std::vector<CompiledCode> code;
    std::vector<Addr> funcs;
    std::vector<Addr> tables;
    std::vector<Addr> memories;
    std::vector<Addr> globals;
    std::vector<std::vector<uint64_t>> elems;
    std::vector<bool> data_dropped;
    uint32_t imported_funcs = 0;

    std::optional<Extern> find_export(std::string_view export_name) const;
};

/// Observer of every function call executed by a Store.
class CallObserver
{
public:
    virtual ~CallObserver() = default;
    /// Called before the callee runs. `caller` is no_addr for calls from the host. For
    /// call_indirect `slot` and `table` locate the table entry; otherwise both are no_addr.
    virtual void on_call(Addr caller, Addr callee, std::span<const uint64_t> args, uint32_t slot, Addr table) = 0;
    /// Called after the callee returned normally.
    virtual void on_return(Addr caller, Addr callee, std::span<const uint64_t> results) = 0;
    /// Called when the callee is unwound by a trap, exit, or exhaustion.
    virtual void on_unwind(Addr caller, Addr callee) = 0;
};

using ImportResolver = std::function<std::optional<Extern>(const wasm::Import&)>;

/// Interpreter store: owns every runtime object; instances refer to them by address.
class Store
{
public:
    explicit Store(ExecLimits limits = {});
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;
    ~Store();

    /// Validates, links and initializes a module. The start function runs iff `run_start`.
    /// Throws InstantiationFailed for validation/link errors and Trap for failing segment init.
    Instance& instantiate(std::shared_ptr<const wasm::Module> module, const ImportResolver& resolve,
        std::string name, bool run_start = true);

    Addr add_host_function(wasm::FuncType type, HostFunction fn);
    /// A function of `type` that forwards to whatever `bind_alias` later installs.
    Addr add_alias(wasm::FuncType type);
    void bind_alias(Addr alias, Addr target);

    std::vector<Value> invoke(Addr func, std::span<const Value> args);

    FunctionInstance& function(Addr a) { return funcs_[a]; }
    const FunctionInstance& function(Addr a) const { return funcs_[a]; }
    MemoryInstance& memory(Addr a) { return memories_[a]; }
    TableInstance& table(Addr a) { return tables_[a]; }
    GlobalInstance& global(Addr a) { return globals_[a]; }
    const MemoryInstance& memory(Addr a) const { return memories_[a]; }
    const TableInstance& table(Addr a) const { return tables_[a]; }
    const GlobalInstance& global(Addr a) const { return globals_[a]; }
    size_t num_functions() const noexcept { return funcs_.size(); }

    /// Follows alias chains to the function that actually runs.
    Addr resolve(Addr a) const;

    /// Functions currently executing, outermost first.
    std::span<const Addr> call_stack() const noexcept { return call_stack_; }

    void set_observer(CallObserver* obs) noexcept { observer_ = obs; }
    uint64_t fuel_used() const noexcept { return fuel_used_; }
    const ExecLimits& limits() const noexcept { return limits_; }
    /// Restarts the wall-clock budget.
    void reset_clock();

private:
    ExecLimits limits_;
    std::deque<FunctionInstance> funcs_;
    std::deque<MemoryInstance> memories_;
    std::deque<TableInstance> tables_;
    std::deque<GlobalInstance> globals_;
    std::vector<std::unique_ptr<Instance>> instances_;
    CallObserver* observer_ = nullptr;
    uint64_t fuel_used_ = 0;
    uint64_t memory_bytes_ = 0;
    std::chrono::steady_clock::time_point deadline_;

    struct Label
    {
        uint32_t cont;
        uint32_t height;
        uint32_t arity;
    };

    // Shared by all activations.
    std::vector<uint64_t> stack_;
    std::vector<Label> labels_;
    std::vector<Addr> call_stack_;

    void call(Addr callee, size_t args_base, uint32_t slot = no_addr, Addr table = no_addr);
    void run_wasm(Addr callee, size_t args_base);
    uint64_t eval_const(const Instance& inst, std::span<const uint8_t> expr) const;
    bool grow_memory(MemoryInstance& mem, uint32_t delta);
    void charge_memory(uint64_t bytes);
};

/// Trap kind strings used throughout the interpreter.
namespace trap
{
inline constexpr const char* unreachable = "unreachable";
inline constexpr const char* div_by_zero = "integer divide by zero";
inline constexpr const char* int_overflow = "integer overflow";
inline constexpr const char* invalid_conversion = "invalid conversion to integer";
inline constexpr const char* memory_oob = "out of bounds memory access";
inline constexpr const char* table_oob = "out of bounds table access";
inline constexpr const char* undefined_element = "undefined element";
inline constexpr const char* uninitialized_element = "uninitialized element";
inline constexpr const char* indirect_type_mismatch = "indirect call type mismatch";
inline constexpr const char* stack_exhausted = "call stack exhausted";
inline constexpr const char* replay_diverged = "replay diverged";
}  // namespace trap

}  // namespace rr::exec
