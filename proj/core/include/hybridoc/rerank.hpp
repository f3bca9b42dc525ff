// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hybridoc/model_client.hpp"
#include "hybridoc/types.hpp"
#include "hybridoc/vecindex.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hybridoc::rerank {

struct Demonstration {
    std::string demo_id;
    std::string query_text;
    std::string doc_ref;
    Label label = Label::relevant;
    std::string reasoning;
    double confidence = 0.0;  // [0,1]
    std::vector<float> q_dense;
    std::vector<float> d_dense;

    friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

/// Throws InvalidArgument on empty id/reasoning, confidence outside [0,1],
/// or empty / non-finite / all-zero embeddings.
void validate_demonstration(const Demonstration& demo);

/// One JSON object per line:
///   {"demo_id":..., "query_text":..., "doc_ref":..., "label":"relevant",
///    "reasoning":..., "confidence":0.95, "q_dense":[...], "d_dense":[...]}
std::string serialize(const Demonstration& demo);
Demonstration parse_demonstration(std::string_view line);
std::string format_demo_pool(std::span<const Demonstration> pool);
/// Duplicate demo_ids abort with DuplicateIdError.
std::vector<Demonstration> load_demo_pool(const std::filesystem::path& path);
void write_demo_pool(const std::filesystem::path& path, std::span<const Demonstration> pool);

/// exp(yes) / (exp(yes) + exp(no)), evaluated after subtracting the max.
/// Throws InvalidArgument on non-finite input.
double score_pair(double yes_value, double no_value);

/// w * cos(q, demo.q_dense) + (1 - w) * cos(d, demo.d_dense). Multi-vector
/// reps are mean-pooled first.
double joint_similarity(const DenseRep& q, const DenseRep& d, const Demonstration& demo, double query_weight = 0.5);

struct SelectionStrategy {
    enum class Kind { random, difficult, similar };
    Kind kind = Kind::similar;
    std::size_t k = 4;
    std::uint64_t seed = 0;  // random only
    double query_weight = 0.5;  // similar only
};

const char* to_string(SelectionStrategy::Kind kind) noexcept;
std::optional<SelectionStrategy::Kind> parse_strategy(std::string_view text) noexcept;

/// What selection needs to know about the pair being scored.
struct SelectionTarget {
    std::string query_id;
    std::string doc_id;
    const DenseRep* q_dense = nullptr;  // required for similar
    const DenseRep* d_dense = nullptr;  // required for similar
};

/// min(k, |pool|) demos in prompt order.
///   random:    seeded sample without replacement, in draw order; the seed is
///              mixed with query_id and doc_id so each pair draws its own set
///   difficult: lowest confidence first, ties by demo_id
///   similar:   highest joint_similarity first, ties by demo_id
std::vector<Demonstration> select_demos(const SelectionStrategy& strategy, const SelectionTarget& target,
                                        std::span<const Demonstration> pool);

std::vector<Demonstration> select_demos(const SelectionStrategy& strategy, const QueryRecord& q,
                                        const DocumentRecord& d, std::span<const Demonstration> pool);

/// Replaceable default instruction for the relevance prompt.
extern const char* const kDefaultInstruction;

struct RerankOptions {
    SelectionStrategy strategy;
    std::string instruction = kDefaultInstruction;
    std::size_t parallelism = 1;
};

struct RerankedDoc {
    std::string doc_id;
    double score = 0.0;
    ScorePair raw;
    std::size_t input_rank = 0;  // 1-based
};

/// Scores every candidate independently and sorts by descending score,
/// ties kept in input order. `store` supplies document embeddings for the
/// similar strategy and may be null otherwise. A client failure aborts the
/// whole call with a ClientError naming the doc_id.
std::vector<RerankedDoc> rerank_candidates(const QueryRecord& q, std::span<const std::string> candidates,
                                           ModelClient& client, std::span<const Demonstration> pool,
                                           const RerankOptions& options, const index::DenseStore* store = nullptr);

}  // namespace hybridoc::rerank
