// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hybridoc::text {

/// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string ascii_lower(std::string_view s);

/// Strips ASCII whitespace (space, \t, \n, \r, \v, \f) from both ends.
std::string_view trim(std::string_view s) noexcept;

std::vector<std::string_view> split(std::string_view s, char sep);

/// Shortest "%.9g" rendering used for every real written to a dump or run.
std::string format_real(double value);

/// Shortest "%.{15,16,17}g" rendering that parses back to exactly `value`.
std::string format_exact(double value);

/// Calls `fn(line_number, line)` for every line of `path` (1-based, trailing
/// '\r' stripped). Throws ParseError when the file cannot be opened.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);

std::string read_file(const std::filesystem::path& path);

/// Writes `contents` to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hybridoc::text
