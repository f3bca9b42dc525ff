// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/vecindex.hpp"

#include "hybridoc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hybridoc::index {

namespace {

double l2_norm(std::span<const float> v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(sq);
}

double dot(std::span<const float> a, std::span<const float> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double cosine_with_norms(std::span<const float> q, double q_norm, std::span<const float> d, double d_norm) {
    const double c = dot(q, d) / (q_norm * d_norm);
    return std::clamp(c, -1.0, 1.0);
}

// Flattened unit vectors, `dim` doubles each.
std::vector<double> unit_vectors(const DenseRep& rep, const char* side) {
    std::vector<double> out;
    out.reserve(rep.vectors.size() * rep.dim());
    for (const auto& v : rep.vectors) {
        const double n = l2_norm(v);
        if (n == 0.0) throw InvalidArgument(std::string("zero vector in ") + side);
        for (float x : v) out.push_back(static_cast<double>(x) / n);
    }
    return out;
}

double maxsim_units(std::span<const double> q, std::span<const double> d, std::size_t dim) {
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); i += dim) {
        const auto qv = q.subspan(i, dim);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d.size(); j += dim) best = std::max(best, dot(qv, d.subspan(j, dim)));
        total += best;
    }
    return total;
}

void check_rep(const DenseRep& rep, const char* side) {
    if (rep.vectors.empty()) throw InvalidArgument(std::string(side) + " has no vectors");
    const std::size_t dim = rep.dim();
    if (dim == 0) throw InvalidArgument(std::string(side) + " has empty vectors");
    for (const auto& v : rep.vectors) {
        if (v.size() != dim) throw InvalidArgument(std::string(side) + " vectors differ in dimension");
    }
}

double sq_norm(const SparseVec& v) {
    std::int64_t sq = 0;
    for (const auto& [lemma, w] : v) sq += static_cast<std::int64_t>(w) * w;
    return static_cast<double>(sq);
}

}  // namespace

double dense_cosine(std::span<const float> q, std::span<const float> d) {
    if (q.size() != d.size()) throw InvalidArgument("dimension mismatch");
    const double qn = l2_norm(q);
    const double dn = l2_norm(d);
    if (qn == 0.0 || dn == 0.0) throw InvalidArgument("zero vector");
    return cosine_with_norms(q, qn, d, dn);
}

double dense_cosine(const DenseRep& q, const DenseRep& d) {
    if (q.kind != DenseKind::single || d.kind != DenseKind::single || q.count() != 1 || d.count() != 1) {
        throw InvalidArgument("dense_cosine expects single-vector reps");
    }
    return dense_cosine(q.vectors.front(), d.vectors.front());
}

double maxsim(const DenseRep& q, const DenseRep& d) {
    check_rep(q, "query");
    check_rep(d, "document");
    if (q.dim() != d.dim()) throw InvalidArgument("dimension mismatch");
    const auto qu = unit_vectors(q, "query");
    const auto du = unit_vectors(d, "document");
    return maxsim_units(qu, du, q.dim());
}

std::vector<float> mean_pool(const DenseRep& rep) {
    check_rep(rep, "rep");
    std::vector<double> acc(rep.dim(), 0.0);
    for (const auto& v : rep.vectors) {
        for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
    }
    std::vector<float> out(acc.size());
    const auto n = static_cast<double>(rep.vectors.size());
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(acc[i] / n);
    return out;
}

void rank_topk(std::vector<ScoredDoc>& docs, std::size_t k) {
    if (k < docs.size()) {
        std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(k), docs.end(), ranks_before);
        docs.resize(k);
    } else {
        std::sort(docs.begin(), docs.end(), ranks_before);
    }
}

// ------------------------------------------------------------ InvertedIndex

InvertedIndex InvertedIndex::build(std::span<const std::pair<std::string, SparseVec>> corpus) {
    std::vector<const std::pair<std::string, SparseVec>*> sorted;
    sorted.reserve(corpus.size());
    for (const auto& entry : corpus) sorted.push_back(&entry);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->first < b->first; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->first == sorted[i - 1]->first) throw DuplicateIdError(sorted[i]->first);
    }

    InvertedIndex idx;
    idx.doc_ids_.reserve(sorted.size());
    for (std::size_t ord = 0; ord < sorted.size(); ++ord) {
        const auto& [doc_id, vec] = *sorted[ord];
        idx.doc_ids_.push_back(doc_id);
        for (const auto& [lemma, w] : vec) {
            if (w < 1) throw InvalidArgument("weight < 1 for \"" + lemma + "\" in " + doc_id);
            idx.postings_[lemma].push_back({static_cast<std::uint32_t>(ord), w});
        }
    }
    idx.finalize();
    return idx;
}

InvertedIndex InvertedIndex::from_parts(std::vector<std::string> doc_ids, PostingMap postings) {
    for (std::size_t i = 1; i < doc_ids.size(); ++i) {
        if (!(doc_ids[i - 1] < doc_ids[i])) throw InvalidArgument("doc ids not strictly ascending");
    }
    for (const auto& [lemma, list] : postings) {
        if (list.empty()) throw InvalidArgument("empty posting list for \"" + lemma + "\"");
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].doc >= doc_ids.size()) throw InvalidArgument("posting references unknown document");
            if (list[i].weight < 1) throw InvalidArgument("posting weight < 1");
            if (i > 0 && list[i].doc <= list[i - 1].doc) throw InvalidArgument("posting list not sorted");
        }
    }
    InvertedIndex idx;
    idx.doc_ids_ = std::move(doc_ids);
    idx.postings_ = std::move(postings);
    idx.finalize();
    return idx;
}

void InvertedIndex::finalize() {
    ordinals_.clear();
    ordinals_.reserve(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) ordinals_.emplace(doc_ids_[i], static_cast<std::uint32_t>(i));
    std::vector<std::int64_t> sq(doc_ids_.size(), 0);
    for (const auto& [lemma, list] : postings_) {
        for (const auto& p : list) sq[p.doc] += static_cast<std::int64_t>(p.weight) * p.weight;
    }
    norms_.assign(doc_ids_.size(), 0.0);
    for (std::size_t i = 0; i < sq.size(); ++i) norms_[i] = std::sqrt(static_cast<double>(sq[i]));
}

std::optional<std::uint32_t> InvertedIndex::ordinal(std::string_view doc_id) const {
    auto it = ordinals_.find(std::string(doc_id));
    if (it == ordinals_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> InvertedIndex::norm(std::string_view doc_id) const {
    auto ord = ordinal(doc_id);
    if (!ord) throw NotFound("unknown doc_id \"" + std::string(doc_id) + "\"");
    if (norms_[*ord] == 0.0) return std::nullopt;
    return norms_[*ord];
}

SparseVec InvertedIndex::document(std::string_view doc_id) const {
    auto ord = ordinal(doc_id);
    if (!ord) throw NotFound("unknown doc_id \"" + std::string(doc_id) + "\"");
    SparseVec out;
    for (const auto& [lemma, list] : postings_) {
        auto it = std::lower_bound(list.begin(), list.end(), *ord,
                                   [](const Posting& p, std::uint32_t o) { return p.doc < o; });
        if (it != list.end() && it->doc == *ord) out.emplace(lemma, it->weight);
    }
    return out;
}

double InvertedIndex::cosine(const SparseVec& q, std::string_view doc_id) const {
    auto ord = ordinal(doc_id);
    if (!ord) throw NotFound("unknown doc_id \"" + std::string(doc_id) + "\"");
    const double qn = std::sqrt(sq_norm(q));
    const double dn = norms_[*ord];
    if (qn == 0.0 || dn == 0.0) return 0.0;
    std::int64_t dot = 0;
    for (const auto& [lemma, qw] : q) {
        auto it = postings_.find(lemma);
        if (it == postings_.end()) continue;
        const auto& list = it->second;
        auto p = std::lower_bound(list.begin(), list.end(), *ord,
                                  [](const Posting& x, std::uint32_t o) { return x.doc < o; });
        if (p != list.end() && p->doc == *ord) dot += static_cast<std::int64_t>(qw) * p->weight;
    }
    return std::min(1.0, static_cast<double>(dot) / (qn * dn));
}

std::vector<double> InvertedIndex::score_all(const SparseVec& q) const {
    std::vector<double> scores(doc_ids_.size(), 0.0);
    const double qn = std::sqrt(sq_norm(q));
    if (qn == 0.0) return scores;
    std::vector<std::int64_t> dots(doc_ids_.size(), 0);
    for (const auto& [lemma, qw] : q) {
        auto it = postings_.find(lemma);
        if (it == postings_.end()) continue;
        for (const auto& p : it->second) dots[p.doc] += static_cast<std::int64_t>(qw) * p.weight;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (dots[i] == 0 || norms_[i] == 0.0) continue;
        scores[i] = std::min(1.0, static_cast<double>(dots[i]) / (qn * norms_[i]));
    }
    return scores;
}

std::vector<ScoredDoc> InvertedIndex::topk(const SparseVec& q, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    const auto scores = score_all(q);
    std::vector<ScoredDoc> docs;
    docs.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) docs.push_back({doc_ids_[i], scores[i]});
    rank_topk(docs, k);
    return docs;
}

InvertedIndex build_index(std::span<const std::pair<std::string, SparseVec>> corpus) {
    return InvertedIndex::build(corpus);
}

double sparse_cosine(const SparseVec& q, const InvertedIndex& index, std::string_view doc_id) {
    return index.cosine(q, doc_id);
}

std::vector<ScoredDoc> sparse_topk(const SparseVec& q, const InvertedIndex& index, std::size_t k) {
    return index.topk(q, k);
}

double sparse_norm(const SparseVec& v) { return std::sqrt(sq_norm(v)); }

// --------------------------------------------------------------- DenseStore

DenseStore DenseStore::build(std::vector<std::pair<std::string, DenseRep>> entries) {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    DenseStore store;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto& [doc_id, rep] = entries[i];
        if (i > 0 && doc_id == store.doc_ids_.back()) throw DuplicateIdError(doc_id);
        check_rep(rep, doc_id.c_str());
        if (rep.kind == DenseKind::single && rep.count() != 1) {
            throw InvalidArgument("single rep with multiple vectors: " + doc_id);
        }
        if (i == 0) {
            store.kind_ = rep.kind;
            store.dim_ = rep.dim();
        } else if (rep.kind != store.kind_) {
            throw InvalidArgument("mixed single and multi reps in one store: " + doc_id);
        } else if (rep.dim() != store.dim_) {
            throw InvalidArgument("dimension mismatch for " + doc_id);
        }
        for (const auto& v : rep.vectors) {
            if (l2_norm(v) == 0.0) throw InvalidArgument("zero vector in " + doc_id);
        }
        if (store.kind_ == DenseKind::single) {
            store.norms_.push_back(l2_norm(rep.vectors.front()));
        } else {
            store.units_.push_back(unit_vectors(rep, "document"));
        }
        store.ordinals_.emplace(doc_id, i);
        store.doc_ids_.push_back(std::move(doc_id));
        store.reps_.push_back(std::move(rep));
    }
    return store;
}

std::optional<std::size_t> DenseStore::ordinal(std::string_view doc_id) const {
    auto it = ordinals_.find(std::string(doc_id));
    if (it == ordinals_.end()) return std::nullopt;
    return it->second;
}

const DenseRep& DenseStore::get(std::string_view doc_id) const {
    auto it = ordinals_.find(std::string(doc_id));
    if (it == ordinals_.end()) throw NotFound("unknown doc_id \"" + std::string(doc_id) + "\"");
    return reps_[it->second];
}

void DenseStore::check_query(const DenseRep& q) const {
    if (q.kind != kind_) throw InvalidArgument("query kind does not match store kind");
    check_rep(q, "query");
    if (q.dim() != dim_) throw InvalidArgument("dimension mismatch");
}

double DenseStore::score(const DenseRep& q, std::string_view doc_id) const {
    const DenseRep& d = get(doc_id);
    check_query(q);
    return kind_ == DenseKind::single ? dense_cosine(q, d) : maxsim(q, d);
}

std::vector<double> DenseStore::score_all(const DenseRep& q) const {
    std::vector<double> scores(reps_.size(), 0.0);
    if (reps_.empty()) return scores;
    check_query(q);
    if (kind_ == DenseKind::single) {
        const auto& qv = q.vectors.front();
        const double qn = l2_norm(qv);
        if (qn == 0.0) throw InvalidArgument("zero vector in query");
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            scores[i] = cosine_with_norms(qv, qn, reps_[i].vectors.front(), norms_[i]);
        }
    } else {
        const auto qu = unit_vectors(q, "query");
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            scores[i] = maxsim_units(qu, units_[i], dim_);
        }
    }
    return scores;
}

std::vector<ScoredDoc> DenseStore::topk(const DenseRep& q, std::size_t k) const {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    const auto scores = score_all(q);
    std::vector<ScoredDoc> docs;
    docs.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) docs.push_back({doc_ids_[i], scores[i]});
    rank_topk(docs, k);
    return docs;
}

std::vector<ScoredDoc> dense_topk(const DenseRep& q, const DenseStore& store, std::size_t k) {
    return store.topk(q, k);
}

}  // namespace hybridoc::index
