// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hybridoc/text.hpp"

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace hybridoc::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("hybridoc-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    std::filesystem::path write(const std::string& name, const std::string& contents) const {
        const auto p = path_ / name;
        text::write_file_atomic(p, contents);
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path fixture_dir() { return HYBRIDOC_FIXTURE_DIR; }
inline std::filesystem::path data_dir() { return HYBRIDOC_DATA_DIR; }

}  // namespace hybridoc::testing
