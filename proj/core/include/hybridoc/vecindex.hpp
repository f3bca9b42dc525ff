// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hybridoc/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hybridoc::index {

// ------------------------------------------------------------------ dense math

/// Standard cosine. Throws InvalidArgument on zero vectors or dim mismatch.
double dense_cosine(std::span<const float> q, std::span<const float> d);

/// Cosine between two single-kind reps.
double dense_cosine(const DenseRep& q, const DenseRep& d);

/// Late interaction: every vector is L2-normalized, then
/// sum over query vectors of the max dot product against the document vectors.
double maxsim(const DenseRep& q, const DenseRep& d);

/// Component-wise mean of all vectors of `rep`.
std::vector<float> mean_pool(const DenseRep& rep);

// -------------------------------------------------------------- sparse index

struct Posting {
    std::uint32_t doc;  // ordinal into InvertedIndex::doc_ids()
    std::int32_t weight;

    friend bool operator==(const Posting&, const Posting&) = default;
};

using PostingMap = std::map<std::string, std::vector<Posting>, std::less<>>;

/// Lemma -> postings over integer weights. Documents are addressed by an
/// ordinal assigned in ascending doc_id order, so a posting list sorted by
/// ordinal is also sorted by doc_id. Immutable after build.
class InvertedIndex {
public:
    InvertedIndex() = default;

    /// Throws DuplicateIdError on repeated doc_ids, InvalidArgument on
    /// weights < 1.
    static InvertedIndex build(std::span<const std::pair<std::string, SparseVec>> corpus);

    /// Reassembles an index from persisted parts; posting lists must be
    /// sorted by ordinal and reference valid ordinals.
    static InvertedIndex from_parts(std::vector<std::string> doc_ids, PostingMap postings);

    std::size_t size() const noexcept { return doc_ids_.size(); }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const PostingMap& postings() const noexcept { return postings_; }
    std::optional<std::uint32_t> ordinal(std::string_view doc_id) const;

    /// Euclidean norm of the document's vector; nullopt for empty vectors.
    /// Throws NotFound for unknown ids.
    std::optional<double> norm(std::string_view doc_id) const;
    double norm_at(std::uint32_t ordinal) const noexcept { return norms_[ordinal]; }

    /// The document's weights, rebuilt from the postings.
    SparseVec document(std::string_view doc_id) const;

    /// Raw cosine in [0,1]; 0 when either side is empty. Throws NotFound.
    double cosine(const SparseVec& q, std::string_view doc_id) const;

    /// Cosine against every document, indexed by ordinal.
    std::vector<double> score_all(const SparseVec& q) const;

    /// Top-k by cosine, ascending doc_id on ties; zero scores fill up to k.
    std::vector<ScoredDoc> topk(const SparseVec& q, std::size_t k) const;

    friend bool operator==(const InvertedIndex& a, const InvertedIndex& b) {
        return a.doc_ids_ == b.doc_ids_ && a.postings_ == b.postings_;
    }

private:
    void finalize();

    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> ordinals_;
    PostingMap postings_;
    std::vector<double> norms_;  // 0 for empty documents
};

InvertedIndex build_index(std::span<const std::pair<std::string, SparseVec>> corpus);
double sparse_cosine(const SparseVec& q, const InvertedIndex& index, std::string_view doc_id);
std::vector<ScoredDoc> sparse_topk(const SparseVec& q, const InvertedIndex& index, std::size_t k);

/// Norm of a standalone sparse vector.
double sparse_norm(const SparseVec& v);

// --------------------------------------------------------------- dense store

/// doc_id -> DenseRep; uniform kind and dim. Brute-force scoring only.
class DenseStore {
public:
    DenseStore() = default;

    /// Throws DuplicateIdError, or InvalidArgument on mixed kinds/dims or
    /// zero vectors.
    static DenseStore build(std::vector<std::pair<std::string, DenseRep>> entries);

    std::size_t size() const noexcept { return doc_ids_.size(); }
    DenseKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }

    std::optional<std::size_t> ordinal(std::string_view doc_id) const;

    /// Throws NotFound.
    const DenseRep& get(std::string_view doc_id) const;
    const DenseRep& at(std::size_t ordinal) const noexcept { return reps_[ordinal]; }

    /// dense_cosine (single) or maxsim (multi) against one document.
    double score(const DenseRep& q, std::string_view doc_id) const;
    std::vector<double> score_all(const DenseRep& q) const;
    std::vector<ScoredDoc> topk(const DenseRep& q, std::size_t k) const;

    friend bool operator==(const DenseStore& a, const DenseStore& b) {
        return a.kind_ == b.kind_ && a.dim_ == b.dim_ && a.doc_ids_ == b.doc_ids_ && a.reps_ == b.reps_;
    }

private:
    void check_query(const DenseRep& q) const;

    DenseKind kind_ = DenseKind::single;
    std::size_t dim_ = 0;
    std::vector<std::string> doc_ids_;
    std::vector<DenseRep> reps_;
    std::unordered_map<std::string, std::size_t> ordinals_;
    std::vector<double> norms_;               // single: norm of the vector
    std::vector<std::vector<double>> units_;  // multi: flattened unit vectors
};

std::vector<ScoredDoc> dense_topk(const DenseRep& q, const DenseStore& store, std::size_t k);

/// Sorts `docs` by ranks_before and keeps the first k.
void rank_topk(std::vector<ScoredDoc>& docs, std::size_t k);

}  // namespace hybridoc::index
