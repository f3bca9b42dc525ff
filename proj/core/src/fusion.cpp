// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/fusion.hpp"

#include "hybridoc/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hybridoc::fusion {

std::size_t FusionConfig::effective_channel_k() const noexcept {
    return channel_k ? *channel_k : std::max<std::size_t>(50, 2 * m);
}

void FusionConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0,1]");
    if (m < 1) throw InvalidArgument("m must be >= 1");
    if (effective_channel_k() < m) throw InvalidArgument("channel_k must be >= m");
}

std::vector<double> minmax_normalize(std::span<const double> scores) {
    if (scores.empty()) throw InvalidArgument("cannot normalize an empty score set");
    double lo = scores.front();
    double hi = scores.front();
    for (double s : scores) {
        if (!std::isfinite(s)) throw InvalidArgument("non-finite score");
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    std::vector<double> out(scores.size(), 0.5);
    if (hi == lo) return out;
    const double range = hi - lo;
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - lo) / range;
    return out;
}

ScoreMap minmax_normalize(const ScoreMap& scores) {
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& [id, s] : scores) values.push_back(s);
    const auto norm = minmax_normalize(values);
    ScoreMap out;
    std::size_t i = 0;
    for (const auto& [id, s] : scores) out.emplace_hint(out.end(), id, norm[i++]);
    return out;
}

double fuse(double dense_norm, double sparse_norm, double lambda) {
    const auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!unit(dense_norm) || !unit(sparse_norm) || !unit(lambda)) {
        throw InvalidArgument("fuse arguments must lie in [0,1]");
    }
    return std::clamp(lambda * dense_norm + (1.0 - lambda) * sparse_norm, 0.0, 1.0);
}

namespace {

void add_channel_top(const std::vector<std::string>& ids, const std::vector<double>& scores, std::size_t depth,
                     std::set<std::string, std::less<>>& pool) {
    std::vector<ScoredDoc> docs;
    docs.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) docs.push_back({ids[i], scores[i]});
    index::rank_topk(docs, depth);
    for (auto& d : docs) pool.insert(std::move(d.doc_id));
}

[[noreturn]] void missing(const std::string& id, const char* channel) {
    throw NotFound("doc_id \"" + id + "\" is missing from the " + channel + " index");
}

}  // namespace

std::vector<FusedCandidate> retrieve_hybrid(const DenseRep& q_dense, const SparseVec& q_sparse,
                                            const index::InvertedIndex& sparse, const index::DenseStore& dense,
                                            const FusionConfig& cfg) {
    cfg.validate();
    const auto depth = cfg.effective_channel_k();
    const auto dense_scores = dense.score_all(q_dense);
    const auto sparse_scores = sparse.score_all(q_sparse);

    std::set<std::string, std::less<>> pool;
    add_channel_top(dense.doc_ids(), dense_scores, depth, pool);
    add_channel_top(sparse.doc_ids(), sparse_scores, depth, pool);

    std::vector<FusedCandidate> out;
    out.reserve(pool.size());
    std::vector<double> dense_raw;
    std::vector<double> sparse_raw;
    for (const auto& id : pool) {
        const auto d_ord = dense.ordinal(id);
        if (!d_ord) missing(id, "dense");
        const auto s_ord = sparse.ordinal(id);
        if (!s_ord) missing(id, "sparse");
        FusedCandidate c;
        c.doc_id = id;
        c.dense_raw = dense_scores[*d_ord];
        c.sparse_raw = sparse_scores[*s_ord];
        dense_raw.push_back(c.dense_raw);
        sparse_raw.push_back(c.sparse_raw);
        out.push_back(std::move(c));
    }
    if (out.empty()) return out;

    const auto dn = minmax_normalize(dense_raw);
    const auto sn = minmax_normalize(sparse_raw);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].dense_norm = dn[i];
        out[i].sparse_norm = sn[i];
        out[i].score = fuse(dn[i], sn[i], cfg.lambda);
    }
    std::sort(out.begin(), out.end(), [](const FusedCandidate& a, const FusedCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (out.size() > cfg.m) out.resize(cfg.m);
    return out;
}

std::vector<FusedCandidate> retrieve_hybrid(const QueryRecord& query, const index::InvertedIndex& sparse,
                                            const index::DenseStore& dense, const sparsify::Resources& resources,
                                            const FusionConfig& cfg, const sparsify::Params& params) {
    const auto q_sparse = sparsify::sparsify_record(query.raw_logits, resources, params);
    return retrieve_hybrid(query.dense, q_sparse, sparse, dense, cfg);
}

std::vector<ScoredDoc> to_scored(std::span<const FusedCandidate> candidates) {
    std::vector<ScoredDoc> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back({c.doc_id, c.score});
    return out;
}

}  // namespace hybridoc::fusion
