// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/error.hpp"
#include "hybridoc/vecindex.hpp"
#include "oracles.hpp"
#include "rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace hybridoc;
using namespace hybridoc::index;
namespace ht = hybridoc::testing;

namespace {

using Corpus = std::vector<std::pair<std::string, SparseVec>>;

SparseVec random_sparse(ht::Rng& rng, std::size_t vocab, std::size_t max_terms) {
    SparseVec v;
    const auto n = rng.below(max_terms + 1);
    for (std::size_t i = 0; i < n; ++i) v["t" + std::to_string(rng.below(vocab))] = static_cast<std::int32_t>(rng.between(1, 400));
    return v;
}

std::string doc_name(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "d%04zu", i);
    return buf;
}

template <class F>
std::vector<ScoredDoc> brute_rank(std::size_t n, F score, std::size_t k) {
    std::vector<ScoredDoc> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back({doc_name(i), score(i)});
    std::sort(all.begin(), all.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace

TEST(InvertedIndex, BuildExamples) {
    EXPECT_EQ(build_index({}).size(), 0u);
    const Corpus one = {{"d1", {{"run", 139}}}};
    const auto idx = build_index(one);
    EXPECT_EQ(idx.postings().at("run"), (std::vector<Posting>{{0, 139}}));
    EXPECT_EQ(idx.norm("d1"), 139.0);
    const Corpus tri = {{"d1", {{"a", 3}, {"b", 4}}}};
    EXPECT_EQ(build_index(tri).norm("d1"), 5.0);
}

TEST(InvertedIndex, EmptyVectorsHaveNoNorm) {
    const Corpus c = {{"e", {}}, {"d", {{"a", 1}}}};
    const auto idx = build_index(c);
    EXPECT_EQ(idx.norm("e"), std::nullopt);
    EXPECT_THROW(idx.norm("zz"), NotFound);
    EXPECT_EQ(idx.document("d"), (SparseVec{{"a", 1}}));
}

TEST(InvertedIndex, RejectsBadInput) {
    const Corpus dup = {{"d", {{"a", 1}}}, {"d", {{"b", 1}}}};
    EXPECT_THROW(build_index(dup), DuplicateIdError);
    const Corpus zero = {{"d", {{"a", 0}}}};
    EXPECT_THROW(build_index(zero), InvalidArgument);
}

TEST(InvertedIndex, PostingsSortedByDocId) {
    const Corpus c = {{"zeta", {{"a", 2}}}, {"alpha", {{"a", 5}}}, {"mid", {{"a", 1}}}};
    const auto idx = build_index(c);
    const auto& list = idx.postings().at("a");
    ASSERT_EQ(list.size(), 3u);
    for (std::size_t i = 1; i < list.size(); ++i) {
        EXPECT_LT(idx.doc_ids()[list[i - 1].doc], idx.doc_ids()[list[i].doc]);
    }
}

TEST(SparseCosine, Examples) {
    const Corpus c = {{"a3", {{"a", 3}}}, {"b1", {{"b", 1}}}, {"a1", {{"a", 1}}}, {"e", {}}};
    const auto idx = build_index(c);
    EXPECT_EQ(sparse_cosine({{"a", 2}}, idx, "a3"), 1.0);
    EXPECT_EQ(sparse_cosine({{"a", 1}}, idx, "b1"), 0.0);
    EXPECT_NEAR(sparse_cosine({{"a", 1}, {"b", 1}}, idx, "a1"), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(sparse_cosine({{"a", 1}}, idx, "e"), 0.0);
    EXPECT_EQ(sparse_cosine({}, idx, "a1"), 0.0);
    EXPECT_THROW(sparse_cosine({{"a", 1}}, idx, "nope"), NotFound);
}

TEST(SparseCosine, SymmetricAndScaleInvariant) {
    ht::Rng rng(12);
    for (int t = 0; t < 500; ++t) {
        const auto q = random_sparse(rng, 20, 10);
        const auto d = random_sparse(rng, 20, 10);
        const Corpus cd = {{"d", d}};
        const Corpus cq = {{"q", q}};
        const double ab = sparse_cosine(q, build_index(cd), "d");
        EXPECT_EQ(ab, sparse_cosine(d, build_index(cq), "q"));
        EXPECT_EQ(ab, oracle::sparse_cosine({q.begin(), q.end()}, {d.begin(), d.end()}));
        auto scaled = q;
        for (auto& [k, w] : scaled) w *= 7;
        EXPECT_NEAR(sparse_cosine(scaled, build_index(cd), "d"), ab, 1e-12);
    }
}

TEST(SparseTopk, MatchesExhaustiveScoring) {
    ht::Rng rng(21);
    EXPECT_TRUE(sparse_topk({{"a", 1}}, build_index({}), 5).empty());
    for (int t = 0; t < 20; ++t) {
        const auto n = static_cast<std::size_t>(rng.between(1, 1000));
        Corpus c;
        for (std::size_t i = 0; i < n; ++i) c.emplace_back(doc_name(i), random_sparse(rng, 60, 12));
        auto shuffled = c;
        rng.shuffle(shuffled);
        const auto idx = build_index(shuffled);
        const auto q = random_sparse(rng, 60, 8);
        const oracle::Weights oq(q.begin(), q.end());
        for (std::size_t k : {std::size_t{1}, std::size_t{10}, n, n + 5}) {
            const auto want = brute_rank(
                n, [&](std::size_t i) { return oracle::sparse_cosine(oq, {c[i].second.begin(), c[i].second.end()}); }, k);
            EXPECT_EQ(sparse_topk(q, idx, k), want);
        }
    }
}

TEST(SparseTopk, TiesGoToSmallerId) {
    const Corpus c = {{"b", {{"x", 2}}}, {"a", {{"x", 5}}}, {"c", {{"y", 1}}}};
    const auto r = sparse_topk({{"x", 1}}, build_index(c), 3);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].doc_id, "a");
    EXPECT_EQ(r[1].doc_id, "b");
    EXPECT_EQ(r[2], (ScoredDoc{"c", 0.0}));
}

TEST(Dense, CosineExamples) {
    EXPECT_DOUBLE_EQ(dense_cosine(std::vector<float>{0.6f, 0.8f}, std::vector<float>{0.6f, 0.8f}), 1.0);
    EXPECT_EQ(dense_cosine(std::vector<float>{1, 0}, std::vector<float>{0, 3}), 0.0);
    EXPECT_NEAR(dense_cosine(std::vector<float>{1, 1}, std::vector<float>{1, 0}), 0.70710678118654752, 1e-15);
    EXPECT_THROW(dense_cosine(std::vector<float>{0, 0}, std::vector<float>{1, 0}), InvalidArgument);
    EXPECT_THROW(dense_cosine(std::vector<float>{1}, std::vector<float>{1, 0}), InvalidArgument);
}

TEST(Dense, MaxSimExamples) {
    const auto id = DenseRep::multi({{1, 0}, {0, 1}});
    EXPECT_EQ(maxsim(id, id), 2.0);
    EXPECT_EQ(maxsim(DenseRep::multi({{1, 0}}), DenseRep::multi({{0, 1}})), 0.0);
    EXPECT_NEAR(maxsim(id, DenseRep::multi({{1, 1}})), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(maxsim(id, DenseRep::multi({{0, 0}})), InvalidArgument);
    EXPECT_THROW(maxsim(id, DenseRep::multi({{1, 0, 0}})), InvalidArgument);
}

TEST(Dense, MaxSimAgainstOracleAndInvariances) {
    ht::Rng rng(55);
    for (int t = 0; t < 300; ++t) {
        const auto dim = static_cast<std::size_t>(rng.between(1, 16));
        std::vector<std::vector<float>> q(static_cast<std::size_t>(rng.between(1, 8)));
        std::vector<std::vector<float>> d(static_cast<std::size_t>(rng.between(1, 8)));
        for (auto& v : q) v = rng.gaussian_vector(dim);
        for (auto& v : d) v = rng.gaussian_vector(dim);
        const double s = maxsim(DenseRep::multi(q), DenseRep::multi(d));
        EXPECT_NEAR(s, oracle::maxsim(q, d), 1e-10);
        auto perm = d;
        rng.shuffle(perm);
        EXPECT_EQ(maxsim(DenseRep::multi(q), DenseRep::multi(perm)), s);
        perm.push_back(perm[rng.below(perm.size())]);
        EXPECT_EQ(maxsim(DenseRep::multi(q), DenseRep::multi(perm)), s);
    }
}

TEST(Dense, MeanPool) {
    EXPECT_EQ(mean_pool(DenseRep::multi({{1, 2}, {3, 6}})), (std::vector<float>{2, 4}));
}

TEST(DenseStore, BuildChecks) {
    std::vector<std::pair<std::string, DenseRep>> dup = {{"a", DenseRep::single({1})}, {"a", DenseRep::single({2})}};
    EXPECT_THROW(DenseStore::build(dup), DuplicateIdError);
    std::vector<std::pair<std::string, DenseRep>> mixed = {{"a", DenseRep::single({1})}, {"b", DenseRep::multi({{1}})}};
    EXPECT_THROW(DenseStore::build(mixed), InvalidArgument);
    std::vector<std::pair<std::string, DenseRep>> dims = {{"a", DenseRep::single({1})}, {"b", DenseRep::single({1, 2})}};
    EXPECT_THROW(DenseStore::build(dims), InvalidArgument);
    std::vector<std::pair<std::string, DenseRep>> zero = {{"a", DenseRep::single({0, 0})}};
    EXPECT_THROW(DenseStore::build(zero), InvalidArgument);
}

TEST(DenseStore, TopkExamples) {
    auto store = DenseStore::build({{"only", DenseRep::single({1, 2})}});
    EXPECT_EQ(dense_topk(DenseRep::single({1, 0}), store, 5).size(), 1u);
    EXPECT_THROW(dense_topk(DenseRep::multi({{1, 0}}), store, 5), InvalidArgument);
    EXPECT_THROW(store.get("x"), NotFound);

    store = DenseStore::build(
        {{"z", DenseRep::single({0, 1})}, {"b", DenseRep::single({1, 1})}, {"a", DenseRep::single({1, 1})}});
    const auto r = dense_topk(DenseRep::single({1, 0.5f}), store, 3);
    EXPECT_EQ(r[0].doc_id, "a");
    EXPECT_EQ(r[1].doc_id, "b");
    EXPECT_EQ(r[0].score, r[1].score);
}

TEST(DenseStore, TopkMatchesExhaustiveScoring) {
    ht::Rng rng(77);
    for (bool multi : {false, true}) {
        for (int t = 0; t < 5; ++t) {
            const std::size_t n = 100;
            const auto dim = static_cast<std::size_t>(rng.between(2, 16));
            std::vector<std::vector<std::vector<float>>> vecs(n);
            std::vector<std::pair<std::string, DenseRep>> entries;
            for (std::size_t i = 0; i < n; ++i) {
                vecs[i].resize(multi ? static_cast<std::size_t>(rng.between(1, 6)) : 1u);
                for (auto& v : vecs[i]) v = rng.gaussian_vector(dim);
                entries.emplace_back(doc_name(i), DenseRep{multi ? DenseKind::multi : DenseKind::single, vecs[i]});
            }
            rng.shuffle(entries);
            const auto store = DenseStore::build(entries);
            std::vector<std::vector<float>> q(multi ? 3u : 1u);
            for (auto& v : q) v = rng.gaussian_vector(dim);
            const DenseRep qr{multi ? DenseKind::multi : DenseKind::single, q};
            const auto want = brute_rank(
                n,
                [&](std::size_t i) { return multi ? oracle::maxsim(q, vecs[i]) : oracle::dense_cosine(q[0], vecs[i][0]); },
                10);
            const auto got = dense_topk(qr, store, 10);
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].doc_id, want[i].doc_id);
                EXPECT_NEAR(got[i].score, want[i].score, 1e-12);
            }
            EXPECT_EQ(dense_topk(qr, store, 1000).size(), n);
        }
    }
}
