// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hybridoc {

/// Token string -> positive logit. Dumps pre-apply ReLU, so only positive
/// values are stored. Ordered so iteration and serialization are stable.
using TokenLogits = std::map<std::string, double, std::less<>>;

/// Lemma -> quantized weight (>= 1), at most 256 entries after sparsification.
using SparseVec = std::map<std::string, std::int32_t, std::less<>>;

using Metadata = std::map<std::string, std::string, std::less<>>;

enum class DenseKind { single, multi };

const char* to_string(DenseKind kind) noexcept;
std::optional<DenseKind> parse_dense_kind(std::string_view text) noexcept;

/// One dense vector (single) or an ordered list of per-chunk vectors (multi).
/// Components are stored as float; a float printed with 9 significant digits
/// parses back to the same value, which keeps dump round-trips exact.
struct DenseRep {
    DenseKind kind = DenseKind::single;
    std::vector<std::vector<float>> vectors;

    std::size_t dim() const noexcept { return vectors.empty() ? 0 : vectors.front().size(); }
    std::size_t count() const noexcept { return vectors.size(); }

    static DenseRep single(std::vector<float> v) { return {DenseKind::single, {std::move(v)}}; }
    static DenseRep multi(std::vector<std::vector<float>> vs) { return {DenseKind::multi, std::move(vs)}; }

    friend bool operator==(const DenseRep&, const DenseRep&) = default;
};

struct DocumentRecord {
    std::string doc_id;
    DenseRep dense;
    std::vector<TokenLogits> raw_logits;  // one entry per dense vector
    Metadata metadata;
    std::optional<std::size_t> raw_logit_cap;  // per-chunk export cap, when recorded

    friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

struct QueryRecord {
    std::string query_id;
    std::string text;
    DenseRep dense;
    std::vector<TokenLogits> raw_logits;
    Metadata metadata;
    std::optional<std::size_t> raw_logit_cap;

    friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

struct Judgment {
    std::string query_id;
    std::string doc_id;
    int relevance = 0;  // 0..4
};

struct RunEntry {
    std::string query_id;
    std::string doc_id;
    std::size_t rank = 0;  // 1-based
    double score = 0.0;

    friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

/// (doc_id, score) pair produced by every ranking stage.
struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Descending score, ascending doc_id. The engine-wide ranking order.
inline bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) noexcept {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
}

}  // namespace hybridoc
