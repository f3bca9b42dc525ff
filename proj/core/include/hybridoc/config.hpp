// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Flat `key = value` engine configuration. Lines starting with '#' are
// comments. Unknown keys and out-of-range values are rejected.

#include "hybridoc/demosynth.hpp"
#include "hybridoc/evalkit.hpp"
#include "hybridoc/fusion.hpp"
#include "hybridoc/rerank.hpp"
#include "hybridoc/sparsify.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hybridoc::config {

/// Names the config file read when none is given explicitly.
inline constexpr const char* kConfigEnvVar = "HYBRIDOC_CONFIG";

struct KeyInfo {
    std::string name;
    std::string default_value;  // as text; empty when unset by default
    std::string help;
};

struct EngineConfig {
    double lambda = 0.8;
    std::optional<std::size_t> channel_k;  // unset: max(50, 2m)
    std::size_t m = 30;
    std::size_t demo_k = 4;
    rerank::SelectionStrategy::Kind selection_strategy = rerank::SelectionStrategy::Kind::similar;
    std::optional<std::uint64_t> seed;
    double joint_query_weight = 0.5;
    std::size_t parallelism = 1;
    std::string instruction = rerank::kDefaultInstruction;

    std::optional<std::filesystem::path> lemma_map;
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::filesystem::path> index;
    std::optional<std::filesystem::path> demo_pool;
    std::optional<std::string> client;  // mock:FILE or http://host:port
    std::vector<std::string> synth_endpoints;  // exactly three when set

    std::size_t sparsify_top_k = 256;
    double sparsify_scale = 100.0;

    double synth_temperature = 0.2;
    double synth_top_p = 0.95;
    double synth_confidence_threshold = 0.8;
    int synth_reviewers_required = 2;

    std::size_t eval_ndcg_k = 10;
    std::size_t eval_recall_k = 3;

    /// Parses and stores one value. Throws InvalidArgument for unknown keys
    /// and malformed or out-of-range values.
    void set(std::string_view key, std::string_view value);

    /// Cross-field checks (channel_k >= m; a seed for the random strategy).
    void validate() const;

    fusion::FusionConfig fusion() const;
    rerank::SelectionStrategy strategy() const;
    sparsify::Params sparsify() const;
    demosynth::SynthConfig synth() const;
    eval::EvalOptions eval() const;

    /// Current values as a config file.
    std::string to_text() const;
};

const std::vector<KeyInfo>& known_keys();

/// Applies every assignment in `path` on top of `cfg`. Errors carry the line.
void apply_file(EngineConfig& cfg, const std::filesystem::path& path);

/// Defaults, then the explicit file if given, else the file named by
/// HYBRIDOC_CONFIG when set.
EngineConfig load(const std::optional<std::filesystem::path>& explicit_path);

}  // namespace hybridoc::config
