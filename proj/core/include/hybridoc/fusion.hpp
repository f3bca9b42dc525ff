// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hybridoc/sparsify.hpp"
#include "hybridoc/types.hpp"
#include "hybridoc/vecindex.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hybridoc::fusion {

struct FusionConfig {
    double lambda = 0.8;  // weight of the dense channel
    std::size_t m = 30;   // candidates returned
    /// Candidate depth per channel; unset means max(50, 2m).
    std::optional<std::size_t> channel_k;

    std::size_t effective_channel_k() const noexcept;
    /// Throws InvalidArgument unless 0 <= lambda <= 1 and channel_k >= m >= 1.
    void validate() const;
};

using ScoreMap = std::map<std::string, double, std::less<>>;

/// (s - min) / (max - min); every value becomes 0.5 when max == min.
/// Throws InvalidArgument on empty or non-finite input.
std::vector<double> minmax_normalize(std::span<const double> scores);
ScoreMap minmax_normalize(const ScoreMap& scores);

/// lambda * dense_norm + (1 - lambda) * sparse_norm, all arguments in [0,1].
double fuse(double dense_norm, double sparse_norm, double lambda);

struct FusedCandidate {
    std::string doc_id;
    double score = 0.0;
    double dense_raw = 0.0;
    double sparse_raw = 0.0;
    double dense_norm = 0.0;
    double sparse_norm = 0.0;
};

/// First-stage retrieval for one query: top channel_k from each channel,
/// union pool, both raw similarities for every pooled doc, per-channel
/// min-max over the pool, fuse, sort (ranks_before), keep m.
std::vector<FusedCandidate> retrieve_hybrid(const QueryRecord& query, const index::InvertedIndex& sparse,
                                            const index::DenseStore& dense, const sparsify::Resources& resources,
                                            const FusionConfig& cfg, const sparsify::Params& params = {});

/// Same pipeline with the query's sparse vector already computed.
std::vector<FusedCandidate> retrieve_hybrid(const DenseRep& q_dense, const SparseVec& q_sparse,
                                            const index::InvertedIndex& sparse, const index::DenseStore& dense,
                                            const FusionConfig& cfg);

std::vector<ScoredDoc> to_scored(std::span<const FusedCandidate> candidates);

}  // namespace hybridoc::fusion
