// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/error.hpp"
#include "hybridoc/fusion.hpp"
#include "oracles.hpp"
#include "rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace hybridoc;
using namespace hybridoc::fusion;
namespace ht = hybridoc::testing;

namespace {

struct World {
    std::vector<oracle::Doc> docs;
    index::InvertedIndex sparse;
    index::DenseStore dense;
};

World make_world(ht::Rng& rng, std::size_t n, std::size_t dim, bool multi) {
    World w;
    std::vector<std::pair<std::string, SparseVec>> sp;
    std::vector<std::pair<std::string, DenseRep>> de;
    for (std::size_t i = 0; i < n; ++i) {
        oracle::Doc d;
        d.id = "doc" + std::to_string(1000 + i);
        const auto terms = rng.below(15);
        for (std::size_t t = 0; t < terms; ++t) d.sparse["w" + std::to_string(rng.below(80))] = static_cast<std::int32_t>(rng.between(1, 300));
        d.dense.resize(multi ? static_cast<std::size_t>(rng.between(1, 4)) : 1u);
        for (auto& v : d.dense) v = rng.gaussian_vector(dim);
        sp.emplace_back(d.id, SparseVec(d.sparse.begin(), d.sparse.end()));
        de.emplace_back(d.id, DenseRep{multi ? DenseKind::multi : DenseKind::single, d.dense});
        w.docs.push_back(std::move(d));
    }
    w.sparse = index::build_index(sp);
    w.dense = index::DenseStore::build(std::move(de));
    return w;
}

}  // namespace

TEST(Config, DefaultsAndValidation) {
    FusionConfig cfg;
    EXPECT_EQ(cfg.lambda, 0.8);
    EXPECT_EQ(cfg.m, 30u);
    EXPECT_EQ(cfg.effective_channel_k(), 60u);
    cfg.m = 10;
    EXPECT_EQ(cfg.effective_channel_k(), 50u);
    EXPECT_NO_THROW(cfg.validate());
    cfg.lambda = 1.5;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg.lambda = 0.5;
    cfg.channel_k = 5;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg.channel_k.reset();
    cfg.m = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(MinMax, Examples) {
    EXPECT_EQ(minmax_normalize(ScoreMap{{"a", 2}, {"b", 4}, {"c", 6}}), (ScoreMap{{"a", 0}, {"b", 0.5}, {"c", 1}}));
    EXPECT_EQ(minmax_normalize(ScoreMap{{"a", 7}, {"b", 7}}), (ScoreMap{{"a", 0.5}, {"b", 0.5}}));
    EXPECT_THROW(minmax_normalize(ScoreMap{}), InvalidArgument);
    EXPECT_THROW(minmax_normalize(ScoreMap{{"a", std::numeric_limits<double>::infinity()}}), InvalidArgument);
}

TEST(MinMax, RangeAndOrderOnRandomScores) {
    ht::Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> s(50);
        for (auto& x : s) x = rng.uniform(-3, 3);
        const auto n = minmax_normalize(s);
        EXPECT_EQ(*std::min_element(n.begin(), n.end()), 0.0);
        EXPECT_EQ(*std::max_element(n.begin(), n.end()), 1.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::size_t j = 0; j < s.size(); ++j) {
                if (s[i] < s[j]) EXPECT_LE(n[i], n[j]);
            }
        }
    }
}

TEST(Fuse, Examples) {
    EXPECT_EQ(fuse(1.0, 0.0, 0.8), 0.8);
    EXPECT_NEAR(fuse(0.6, 0.2, 0.8), 0.52, 1e-15);
    ht::Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.unit();
        const double l = rng.unit();
        EXPECT_NEAR(fuse(x, x, l), x, 1e-15);
        const double f = fuse(rng.unit(), rng.unit(), l);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
    EXPECT_THROW(fuse(1.1, 0.0, 0.5), InvalidArgument);
    EXPECT_THROW(fuse(0.5, -0.1, 0.5), InvalidArgument);
    EXPECT_THROW(fuse(0.5, 0.5, 2.0), InvalidArgument);
}

TEST(Retrieve, ExhaustivePoolMatchesOracle) {
    ht::Rng rng(31);
    for (bool multi : {false, true}) {
        const auto w = make_world(rng, 300, 8, multi);
        for (int t = 0; t < 10; ++t) {
            oracle::Weights qs;
            for (int i = 0; i < 6; ++i) qs["w" + std::to_string(rng.below(80))] = static_cast<std::int32_t>(rng.between(1, 300));
            std::vector<std::vector<float>> qd(multi ? 3u : 1u);
            for (auto& v : qd) v = rng.gaussian_vector(8);
            FusionConfig cfg;
            cfg.m = 10;
            cfg.channel_k = 300;
            const auto got = retrieve_hybrid(DenseRep{multi ? DenseKind::multi : DenseKind::single, qd},
                                             SparseVec(qs.begin(), qs.end()), w.sparse, w.dense, cfg);
            const auto want = oracle::exhaustive_hybrid(qs, qd, multi, w.docs, 0.8, 10);
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_EQ(got[i].doc_id, want[i].first);
                EXPECT_NEAR(got[i].score, want[i].second, 1e-12);
            }
        }
    }
}

TEST(Retrieve, LambdaExtremesFollowOneChannel) {
    ht::Rng rng(32);
    const auto w = make_world(rng, 200, 6, false);
    for (int t = 0; t < 20; ++t) {
        SparseVec qs;
        for (int i = 0; i < 5; ++i) qs["w" + std::to_string(rng.below(80))] = 100;
        const auto qd = DenseRep::single(rng.gaussian_vector(6));
        FusionConfig cfg;
        cfg.m = 25;
        cfg.channel_k = 40;
        cfg.lambda = 1.0;
        const auto dense_run = retrieve_hybrid(qd, qs, w.sparse, w.dense, cfg);
        for (std::size_t i = 1; i < dense_run.size(); ++i) {
            const auto& a = dense_run[i - 1];
            const auto& b = dense_run[i];
            EXPECT_TRUE(a.dense_raw > b.dense_raw || (a.dense_raw == b.dense_raw && a.doc_id < b.doc_id));
            EXPECT_EQ(a.score, a.dense_norm);
        }
        cfg.lambda = 0.0;
        const auto sparse_run = retrieve_hybrid(qd, qs, w.sparse, w.dense, cfg);
        for (std::size_t i = 1; i < sparse_run.size(); ++i) {
            const auto& a = sparse_run[i - 1];
            const auto& b = sparse_run[i];
            EXPECT_TRUE(a.sparse_raw > b.sparse_raw || (a.sparse_raw == b.sparse_raw && a.doc_id < b.doc_id));
        }
    }
}

TEST(Retrieve, PoolIsUnionOfChannelHeads) {
    ht::Rng rng(33);
    const auto w = make_world(rng, 120, 4, false);
    SparseVec qs{{"w1", 50}, {"w2", 80}};
    const auto qd = DenseRep::single(rng.gaussian_vector(4));
    FusionConfig cfg;
    cfg.m = 5;
    cfg.channel_k = 5;
    const auto got = retrieve_hybrid(qd, qs, w.sparse, w.dense, cfg);
    std::set<std::string> pool;
    for (const auto& d : w.sparse.topk(qs, 5)) pool.insert(d.doc_id);
    for (const auto& d : w.dense.topk(qd, 5)) pool.insert(d.doc_id);
    EXPECT_EQ(got.size(), 5u);
    for (const auto& c : got) {
        EXPECT_TRUE(pool.contains(c.doc_id));
        EXPECT_GE(c.score, 0.0);
        EXPECT_LE(c.score, 1.0);
    }
}

TEST(Retrieve, FromQueryRecordSparsifiesFirst) {
    ht::Rng rng(34);
    const auto w = make_world(rng, 60, 4, false);
    QueryRecord q;
    q.query_id = "q";
    q.dense = DenseRep::single(rng.gaussian_vector(4));
    q.raw_logits = {{{"W1", 3.0}, {"the", 9.0}, {"x7", 1.0}}};
    const sparsify::Resources res{sparsify::LemmaMap(std::unordered_map<std::string, std::string>{{"x7", "w7"}}), sparsify::StopwordSet({"the"})};
    FusionConfig cfg;
    cfg.m = 8;
    const auto a = retrieve_hybrid(q, w.sparse, w.dense, res, cfg);
    const auto b = retrieve_hybrid(q.dense, SparseVec{{"w1", 139}, {"w7", 69}}, w.sparse, w.dense, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].doc_id, b[i].doc_id);
}

TEST(Retrieve, EmptyCorpusGivesNothing) {
    FusionConfig cfg;
    const auto got = retrieve_hybrid(DenseRep::single({1}), SparseVec{{"a", 1}}, index::InvertedIndex{},
                                     index::DenseStore{}, cfg);
    EXPECT_TRUE(got.empty());
}
