// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/fusion.hpp"
#include "hybridoc/sparsify.hpp"
#include "hybridoc/vecindex.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace {

using namespace hybridoc;

constexpr std::size_t kVocab = 30000;

std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<float> g;
    std::vector<float> v(dim);
    for (auto& x : v) x = g(rng);
    return v;
}

// Zipf-ish token ids so postings have a realistic long tail.
TokenLogits random_logits(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TokenLogits out;
    while (out.size() < n) {
        const auto id = static_cast<std::size_t>(std::pow(kVocab, u(rng)));
        out["tok" + std::to_string(id)] = u(rng) * 4.0 - 1.0;
    }
    return out;
}

struct Corpus {
    index::InvertedIndex sparse;
    index::DenseStore dense;
    std::vector<SparseVec> q_sparse;
    std::vector<DenseRep> q_dense;
};

const Corpus& corpus(std::size_t docs, DenseKind kind) {
    static std::map<std::pair<std::size_t, DenseKind>, Corpus> cache;
    auto [it, fresh] = cache.try_emplace({docs, kind});
    if (!fresh) return it->second;
    std::mt19937_64 rng(docs * 31 + static_cast<std::size_t>(kind));
    const std::size_t dim = kind == DenseKind::single ? 768 : 128;
    const auto rep = [&] {
        if (kind == DenseKind::single) return DenseRep::single(random_vector(rng, dim));
        std::vector<std::vector<float>> vs;
        for (int i = 0; i < 16; ++i) vs.push_back(random_vector(rng, dim));
        return DenseRep::multi(std::move(vs));
    };
    std::vector<std::pair<std::string, SparseVec>> sparse;
    std::vector<std::pair<std::string, DenseRep>> dense;
    for (std::size_t i = 0; i < docs; ++i) {
        const auto id = "doc" + std::to_string(i);
        sparse.emplace_back(id, sparsify::process_logits(random_logits(rng, 400)));
        dense.emplace_back(id, rep());
    }
    auto& c = it->second;
    c.sparse = index::InvertedIndex::build(sparse);
    c.dense = index::DenseStore::build(std::move(dense));
    for (int q = 0; q < 16; ++q) {
        c.q_sparse.push_back(sparsify::process_logits(random_logits(rng, 64)));
        c.q_dense.push_back(rep());
    }
    return c;
}

void BM_SparsifyRecord(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::vector<TokenLogits> chunks;
    for (int i = 0; i < state.range(0); ++i) chunks.push_back(random_logits(rng, 1000));
    std::unordered_map<std::string, std::string> lemmas;
    for (std::size_t i = 0; i < kVocab; i += 3) lemmas["tok" + std::to_string(i)] = "tok" + std::to_string(i + 1);
    const sparsify::LemmaMap lemma_map(std::move(lemmas));
    const sparsify::StopwordSet stop({"tok1", "tok2", "tok3"});
    for (auto _ : state) benchmark::DoNotOptimize(sparsify::sparsify_record(chunks, lemma_map, stop));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}
BENCHMARK(BM_SparsifyRecord)->Arg(1)->Arg(8);

void BM_SparseTopK(benchmark::State& state) {
    const auto& c = corpus(static_cast<std::size_t>(state.range(0)), DenseKind::single);
    std::size_t q = 0;
    for (auto _ : state) benchmark::DoNotOptimize(c.sparse.topk(c.q_sparse[q++ % c.q_sparse.size()], 100));
}
BENCHMARK(BM_SparseTopK)->Arg(1000)->Arg(10000);

void BM_DenseTopK(benchmark::State& state) {
    const auto& c = corpus(static_cast<std::size_t>(state.range(0)), DenseKind::single);
    std::size_t q = 0;
    for (auto _ : state) benchmark::DoNotOptimize(c.dense.topk(c.q_dense[q++ % c.q_dense.size()], 100));
}
BENCHMARK(BM_DenseTopK)->Arg(1000)->Arg(10000);

void BM_MaxSimTopK(benchmark::State& state) {
    const auto& c = corpus(static_cast<std::size_t>(state.range(0)), DenseKind::multi);
    std::size_t q = 0;
    for (auto _ : state) benchmark::DoNotOptimize(c.dense.topk(c.q_dense[q++ % c.q_dense.size()], 100));
}
BENCHMARK(BM_MaxSimTopK)->Arg(1000);

void BM_HybridRetrieve(benchmark::State& state) {
    const auto& c = corpus(static_cast<std::size_t>(state.range(0)), DenseKind::single);
    fusion::FusionConfig cfg;
    std::size_t q = 0;
    for (auto _ : state) {
        const auto i = q++ % c.q_dense.size();
        benchmark::DoNotOptimize(fusion::retrieve_hybrid(c.q_dense[i], c.q_sparse[i], c.sparse, c.dense, cfg));
    }
}
BENCHMARK(BM_HybridRetrieve)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
