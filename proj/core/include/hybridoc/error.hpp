// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybridoc {

/// Base class for every data-level failure raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the path and the 1-based line number
/// (0 when the failure is not tied to a line).
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : Error(format(path, line, what)), path_(std::move(path)), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& path, std::size_t line, const std::string& what) {
        std::string out = path.empty() ? std::string("<input>") : path;
        if (line > 0) out += ":" + std::to_string(line);
        return out + ": " + what;
    }

    std::string path_;
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(std::string id)
        : Error("duplicate id \"" + id + "\""), id_(std::move(id)) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

/// A precondition on an operation argument was violated (out-of-range
/// weight, mismatched dimensions, zero vector, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

/// A model endpoint (scorer, generator, reviewer) failed to answer.
class ClientError : public Error {
public:
    using Error::Error;
};

}  // namespace hybridoc
