// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rr
{
/// Base of all errors raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class MalformedBinary : public Error
{
public:
    MalformedBinary(size_t offset, const std::string& reason)
      : Error{"malformed binary at offset " + std::to_string(offset) + ": " + reason},
        offset_{offset}
    {}

    size_t offset() const noexcept { return offset_; }

private:
    size_t offset_;
};

class UnsupportedFeature : public Error
{
public:
    explicit UnsupportedFeature(std::string feature)
      : Error{"unsupported feature: " + feature}, feature_{std::move(feature)}
    {}

    const std::string& feature() const noexcept { return feature_; }

private:
    std::string feature_;
};

class ValidationError : public Error
{
public:
    using Error::Error;
};

class NotDefinedFunction : public Error
{
public:
    explicit NotDefinedFunction(uint32_t idx)
      : Error{"function " + std::to_string(idx) + " is not a defined function"}
    {}
};

class UnmappedIndex : public Error
{
public:
    UnmappedIndex(const char* space, uint32_t idx)
      : Error{std::string{"no mapping for "} + space + " index " + std::to_string(idx)}
    {}
};

class InvalidTarget : public Error
{
public:
    using Error::Error;
};

class MultiMemory : public Error
{
public:
    MultiMemory() : Error{"modules with more than one memory are not supported"} {}
};

class UnresolvedImport : public Error
{
public:
    using Error::Error;
};

class TypeMismatch : public Error
{
public:
    using Error::Error;
};

class TypeUnavailable : public Error
{
public:
    using Error::Error;
};

class InstantiationFailed : public Error
{
public:
    using Error::Error;
};

class IoError : public Error
{
public:
    using Error::Error;
};

class InputInvalid : public Error
{
public:
    using Error::Error;
};

class InputNotInteresting : public Error
{
public:
    using Error::Error;
};

/// The oracle script could not be started at all.
class OracleCrashed : public Error
{
public:
    using Error::Error;
};

}  // namespace rr
