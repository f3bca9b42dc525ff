// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks for the retrieval engine. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails.

#include "hybridoc/demosynth.hpp"
#include "hybridoc/evalkit.hpp"
#include "hybridoc/fusion.hpp"
#include "hybridoc/rerank.hpp"
#include "hybridoc/sparsify.hpp"
#include "hybridoc/text.hpp"
#include "hybridoc/vecindex.hpp"
#include "hybridoc_tools/cli.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

using namespace hybridoc;
namespace ht = hybridoc::testing;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ------------------------------------------------------------------ 1
Outcome sparsify_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    ht::Rng rng(101);
    for (int t = 0; t < 200 && o.ok; ++t) {
        const auto vocab_size = static_cast<std::size_t>(rng.between(20, 1000));
        std::vector<std::string> vocab;
        for (std::size_t i = 0; i < vocab_size; ++i) {
            auto w = rng.word(1, 4);
            if (rng.chance(0.1)) w[0] = static_cast<char>(w[0] - 'a' + 'A');
            if (rng.chance(0.04)) w = std::to_string(i);
            if (rng.chance(0.02)) w = "#" + w.substr(0, 0);
            if (rng.chance(0.02)) w = " " + w + "\t";
            vocab.push_back(w);
        }
        std::unordered_map<std::string, std::string> lm;
        std::map<std::string, std::string> olm;
        std::unordered_set<std::string> sw;
        std::set<std::string> osw;
        for (const auto& w : vocab) {
            if (rng.chance(0.25)) olm[w] = lm[w] = vocab[rng.below(vocab.size())];
            if (rng.chance(0.05)) {
                const auto s = text::ascii_lower(std::string(text::trim(w)));
                if (!s.empty()) {
                    sw.insert(s);
                    osw.insert(s);
                }
            }
        }
        std::vector<TokenLogits> chunks(static_cast<std::size_t>(rng.between(1, 4)));
        std::vector<oracle::Logits> ochunks;
        for (auto& c : chunks) {
            for (const auto& w : vocab) {
                const double v = 5.0 - 10.0 * rng.unit();  // (-5, 5]
                if (v > 0 && rng.chance(0.7)) c[w] = v;
            }
            ochunks.emplace_back(c.begin(), c.end());
        }
        const auto got = sparsify::sparsify_record(chunks, sparsify::LemmaMap(lm), sparsify::StopwordSet(sw));
        const auto want = oracle::sparsify(ochunks, olm, osw);
        o.require(oracle::Weights(got.begin(), got.end()) == want, "record " + std::to_string(t) + " differs");
    }
    const double secs = seconds_since(t0);
    o.require(secs < 10.0, "took " + std::to_string(secs) + " s");
    if (o.ok) o.detail = "200 records exact, " + text::format_real(std::round(secs * 100) / 100) + " s";
    return o;
}

// ------------------------------------------------------------------ 2
Outcome quantization_spots() {
    Outcome o;
    const auto a = sparsify::process_logits(TokenLogits{{"run", 3.0}});
    const auto b = sparsify::process_logits(TokenLogits{{"run", 3.5}});
    o.require(oracle::quantize(3.0) == 139 && oracle::quantize(3.5) == 150, "oracle disagrees");
    o.require(a.at("run") == 139, "ln 4 gave " + std::to_string(a.at("run")));
    o.require(b.at("run") == 150, "ln 4.5 gave " + std::to_string(b.at("run")));
    if (o.ok) o.detail = "139, 150";
    return o;
}

// ------------------------------------------------------------------ 3, 4
struct World {
    std::vector<oracle::Doc> docs;
    index::InvertedIndex sparse;
    index::DenseStore dense;
};

World synthetic_world(ht::Rng& rng, std::size_t n, std::size_t dim, std::size_t vocab) {
    World w;
    std::vector<std::pair<std::string, SparseVec>> sp;
    std::vector<std::pair<std::string, DenseRep>> de;
    for (std::size_t i = 0; i < n; ++i) {
        oracle::Doc d;
        d.id = "d" + std::to_string(i);
        const auto terms = rng.below(20);
        for (std::size_t t = 0; t < terms; ++t) {
            d.sparse["t" + std::to_string(rng.below(vocab))] = static_cast<std::int32_t>(rng.between(1, 400));
        }
        d.dense = {rng.gaussian_vector(dim)};
        sp.emplace_back(d.id, SparseVec(d.sparse.begin(), d.sparse.end()));
        de.emplace_back(d.id, DenseRep::single(d.dense[0]));
        w.docs.push_back(std::move(d));
    }
    w.sparse = index::build_index(sp);
    w.dense = index::DenseStore::build(std::move(de));
    return w;
}

oracle::Weights random_query(ht::Rng& rng, std::size_t vocab) {
    oracle::Weights q;
    const auto n = rng.between(1, 8);
    for (int i = 0; i < n; ++i) q["t" + std::to_string(rng.below(vocab))] = static_cast<std::int32_t>(rng.between(1, 400));
    return q;
}

Outcome hybrid_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    ht::Rng rng(303);
    const auto w = synthetic_world(rng, 500, 32, 300);
    fusion::FusionConfig cfg;
    cfg.lambda = 0.8;
    cfg.m = 10;
    cfg.channel_k = 500;
    for (int t = 0; t < 30 && o.ok; ++t) {
        const auto qs = random_query(rng, 300);
        const auto qd = rng.gaussian_vector(32);
        const auto got = fusion::retrieve_hybrid(DenseRep::single(qd), SparseVec(qs.begin(), qs.end()), w.sparse,
                                                 w.dense, cfg);
        const auto want = oracle::exhaustive_hybrid(qs, {qd}, false, w.docs, 0.8, 10);
        o.require(got.size() == want.size(), "length mismatch");
        for (std::size_t i = 0; i < got.size() && o.ok; ++i) {
            o.require(got[i].doc_id == want[i].first,
                      "query " + std::to_string(t) + " rank " + std::to_string(i + 1) + ": " + got[i].doc_id + " vs " +
                          want[i].first);
        }
    }
    const double secs = seconds_since(t0);
    o.require(secs < 30.0, "took " + std::to_string(secs) + " s");
    if (o.ok) o.detail = "30 queries over 500 docs, rankings identical";
    return o;
}

/// Brute-force pool: union of the per-channel heads under the engine's order.
std::vector<std::string> brute_pool_order(const World& w, const oracle::Weights& qs, const std::vector<float>& qd,
                                          std::size_t channel_k, bool dense_side, std::size_t m) {
    struct Row {
        std::string id;
        double dense, sparse;
    };
    std::vector<Row> rows;
    for (const auto& d : w.docs) rows.push_back({d.id, oracle::dense_cosine(qd, d.dense[0]), oracle::sparse_cosine(qs, d.sparse)});
    const auto by = [](bool dense) {
        return [dense](const Row& a, const Row& b) {
            const double x = dense ? a.dense : a.sparse;
            const double y = dense ? b.dense : b.sparse;
            return x != y ? x > y : a.id < b.id;
        };
    };
    std::set<std::string> pool;
    for (bool side : {true, false}) {
        auto sorted = rows;
        std::sort(sorted.begin(), sorted.end(), by(side));
        for (std::size_t i = 0; i < std::min(channel_k, sorted.size()); ++i) pool.insert(sorted[i].id);
    }
    std::vector<Row> pooled;
    for (const auto& r : rows) {
        if (pool.contains(r.id)) pooled.push_back(r);
    }
    std::sort(pooled.begin(), pooled.end(), by(dense_side));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(m, pooled.size()); ++i) out.push_back(pooled[i].id);
    return out;
}

Outcome lambda_degeneracy() {
    Outcome o;
    ht::Rng rng(404);
    const auto w = synthetic_world(rng, 400, 16, 120);
    fusion::FusionConfig cfg;
    cfg.m = 30;
    for (int t = 0; t < 50 && o.ok; ++t) {
        const auto qs = random_query(rng, 120);
        const auto qd = rng.gaussian_vector(16);
        for (double lambda : {1.0, 0.0}) {
            cfg.lambda = lambda;
            const auto got = fusion::retrieve_hybrid(DenseRep::single(qd), SparseVec(qs.begin(), qs.end()), w.sparse,
                                                     w.dense, cfg);
            std::vector<std::string> ids;
            for (const auto& c : got) ids.push_back(c.doc_id);
            const auto want = brute_pool_order(w, qs, qd, cfg.effective_channel_k(), lambda == 1.0, cfg.m);
            o.require(ids == want, "query " + std::to_string(t) + " lambda " + text::format_real(lambda));
        }
    }
    if (o.ok) o.detail = "50 queries, lambda=1 dense order, lambda=0 sparse order";
    return o;
}

// ------------------------------------------------------------------ 5
Outcome maxsim_oracle() {
    Outcome o;
    ht::Rng rng(505);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto dim = static_cast<std::size_t>(rng.between(1, 16));
        std::vector<std::vector<float>> q(static_cast<std::size_t>(rng.between(1, 8)));
        std::vector<std::vector<float>> d(static_cast<std::size_t>(rng.between(1, 8)));
        for (auto& v : q) v = rng.gaussian_vector(dim);
        for (auto& v : d) v = rng.gaussian_vector(dim);
        const double s = index::maxsim(DenseRep::multi(q), DenseRep::multi(d));
        worst = std::max(worst, std::abs(s - oracle::maxsim(q, d)));
        auto perm = d;
        rng.shuffle(perm);
        o.require(index::maxsim(DenseRep::multi(q), DenseRep::multi(perm)) == s, "permutation changed the score");
        perm.push_back(perm[rng.below(perm.size())]);
        o.require(index::maxsim(DenseRep::multi(q), DenseRep::multi(perm)) == s, "duplication changed the score");
    }
    o.require(worst <= 1e-10, "max deviation " + std::to_string(worst));
    if (o.ok) {
        std::ostringstream s;
        s << "100 pairs, max deviation " << worst;
        o.detail = s.str();
    }
    return o;
}

// ------------------------------------------------------------------ 6
model::Run as_run(const std::map<std::string, std::vector<std::string>>& lists) {
    model::Run run;
    for (const auto& [q, ids] : lists) {
        double s = 1000;
        for (const auto& id : ids) run[q].push_back({id, s--});
    }
    return run;
}

Outcome metric_oracles() {
    Outcome o;
    const std::vector<int> rels = {3, 2, 0};
    const double d = eval::dcg_at_k(rels, 3);
    o.require(std::abs(d - 8.8928) <= 1e-4, "dcg = " + std::to_string(d));
    o.require(std::abs(d - oracle::dcg(rels, 3)) <= 1e-12, "dcg differs from the oracle");

    // nDCGs 1, 0 and 0.5; the third query has the largest IDCG.
    model::Qrels q;
    q["q1"] = {{"a", 3}};
    q["q2"] = {{"a", 3}};
    q["q3"] = {{"a", 3}, {"b", 3}};
    const auto run = as_run({{"q1", {"a"}}, {"q2", {"x"}}, {"q3", {"x1", "x2", "a", "x4", "x5", "x6", "x7", "b"}}});
    const auto w = eval::weighted_ndcg_details(run, q);
    o.require(std::abs(w.value - 0.5) <= 1e-12, "weighted nDCG = " + text::format_exact(w.value));
    double sum = 0;
    for (const auto& [id, x] : w.weights) sum += x;
    o.require(std::abs(sum - 1.0) <= 1e-9, "weights sum to " + text::format_exact(sum));

    ht::Rng rng(606);
    for (int t = 0; t < 200; ++t) {
        model::Qrels qr;
        std::map<std::string, std::vector<std::string>> lists;
        for (int i = 0; i < 10; ++i) {
            const auto qid = "q" + std::to_string(i);
            std::vector<std::pair<int, std::string>> graded;
            for (int j = 0; j < 12; ++j) {
                const int g = static_cast<int>(rng.between(0, 4));
                qr[qid]["d" + std::to_string(j)] = g;
                graded.emplace_back(-g, "d" + std::to_string(j));
            }
            qr[qid]["d0"] = 4;
            graded[0].first = -4;
            std::sort(graded.begin(), graded.end());
            for (const auto& [g, id] : graded) lists[qid].push_back(id);
        }
        const auto rep = eval::evaluate(as_run(lists), qr);
        o.require(rep.mean_ndcg == 1.0 && rep.weighted_ndcg == 1.0, "a perfect run scored below 1");
        const auto wd = eval::weighted_ndcg_details(as_run(lists), qr);
        double s = 0;
        for (const auto& [id, x] : wd.weights) s += x;
        o.require(std::abs(s - 1.0) <= 1e-9, "random weights do not sum to 1");
    }
    if (o.ok) o.detail = "dcg " + text::format_real(d) + ", weighted 0.5, perfect runs 1.0";
    return o;
}

// ------------------------------------------------------------------ 7
Outcome score_pair_properties() {
    Outcome o;
    for (double x : {-1000.0, 0.0, 1000.0}) o.require(rerank::score_pair(x, x) == 0.5, "score_pair(x,x) != 0.5");
    ht::Rng rng(707);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-1000, 1000);
        const double b = rng.uniform(-1000, 1000);
        worst = std::max(worst, std::abs(rerank::score_pair(a, b) + rerank::score_pair(b, a) - 1.0));
    }
    o.require(worst <= 1e-12, "complement deviation " + std::to_string(worst));
    const double hi = rerank::score_pair(1000, -1000);
    const double lo = rerank::score_pair(-1000, 1000);
    o.require(std::isfinite(hi) && std::isfinite(lo), "overflow at |x| = 1000");
    o.require(std::abs(hi - 1.0) <= 1e-15 && lo >= 0.0 && lo <= 1e-15, "extreme values off");
    if (o.ok) o.detail = "symmetry exact, complement within 1e-12, no overflow";
    return o;
}

// ------------------------------------------------------------------ 8
QueryRecord plain_query(const std::string& text) {
    QueryRecord q;
    q.query_id = "q";
    q.text = text;
    q.dense = DenseRep::single({1, 0});
    q.raw_logits = {{}};
    return q;
}

std::vector<std::string> doc_ids(const std::vector<rerank::RerankedDoc>& r) {
    std::vector<std::string> out;
    for (const auto& d : r) out.push_back(d.doc_id);
    return out;
}

Outcome rerank_truth_tables() {
    Outcome o;
    const std::vector<std::string> cands = {"p4", "p1", "p9", "p2", "p7"};
    {
        rerank::ScriptedModelClient c(rerank::ScorePair{0.7, 0.7});
        o.require(doc_ids(rerank::rerank_candidates(plain_query("x"), cands, c, {}, {})) == cands,
                  "constant scores changed the order");
    }
    {
        rerank::ScriptedModelClient c(rerank::ScorePair{0, 0});
        c.set("*", "p9", {1, 0});
        const auto out = doc_ids(rerank::rerank_candidates(plain_query("x"), cands, c, {}, {}));
        o.require(out == std::vector<std::string>{"p9", "p4", "p1", "p2", "p7"}, "spiked doc not first");
    }
    {
        ht::Rng rng(808);
        rerank::ScriptedModelClient c;
        std::vector<std::string> ten;
        std::vector<std::tuple<double, std::size_t, std::string>> want;
        for (std::size_t i = 0; i < 10; ++i) {
            ten.push_back("doc" + std::to_string(i));
            const rerank::ScorePair p{static_cast<double>(rng.between(-4, 4)) / 2, static_cast<double>(rng.between(-4, 4)) / 2};
            c.set("query text", ten.back(), p);
            want.emplace_back(-oracle::softmax2(p.yes, p.no), i, ten.back());
        }
        std::sort(want.begin(), want.end());
        std::vector<std::string> want_ids;
        for (const auto& w : want) want_ids.push_back(std::get<2>(w));
        o.require(doc_ids(rerank::rerank_candidates(plain_query("query text"), ten, c, {}, {})) == want_ids,
                  "10-candidate table order differs from the brute-force sort");
    }
    if (o.ok) o.detail = "identity, spike, 10-candidate table";
    return o;
}

// ------------------------------------------------------------------ 9
Outcome demo_selection() {
    Outcome o;
    ht::Rng rng(909);
    std::vector<rerank::Demonstration> pool;
    for (int i = 0; i < 100; ++i) {
        rerank::Demonstration d;
        d.demo_id = "demo" + std::to_string(i);
        d.query_text = "q";
        d.doc_ref = "d";
        d.reasoning = "r";
        d.confidence = std::round(rng.unit() * 20) / 20;  // plenty of ties
        d.q_dense = rng.gaussian_vector(12);
        d.d_dense = rng.gaussian_vector(12);
        pool.push_back(d);
    }
    const auto q = DenseRep::single(rng.gaussian_vector(12));
    const auto d = DenseRep::single(rng.gaussian_vector(12));
    const rerank::SelectionTarget target{"q1", "p1", &q, &d};
    const auto ids = [](const std::vector<rerank::Demonstration>& v) {
        std::vector<std::string> out;
        for (const auto& x : v) out.push_back(x.demo_id);
        return out;
    };

    std::vector<std::pair<double, std::string>> sim, conf;
    for (const auto& x : pool) {
        sim.emplace_back(-(0.5 * oracle::dense_cosine(q.vectors[0], x.q_dense) + 0.5 * oracle::dense_cosine(d.vectors[0], x.d_dense)),
                         x.demo_id);
        conf.emplace_back(x.confidence, x.demo_id);
    }
    std::sort(sim.begin(), sim.end());
    std::sort(conf.begin(), conf.end());
    std::vector<std::string> want_sim, want_conf;
    for (int i = 0; i < 4; ++i) {
        want_sim.push_back(sim[static_cast<std::size_t>(i)].second);
        want_conf.push_back(conf[static_cast<std::size_t>(i)].second);
    }
    rerank::SelectionStrategy s;
    o.require(ids(rerank::select_demos(s, target, pool)) == want_sim, "similar differs from brute force");
    s.kind = rerank::SelectionStrategy::Kind::difficult;
    o.require(ids(rerank::select_demos(s, target, pool)) == want_conf, "difficult differs from the confidence sort");
    s.kind = rerank::SelectionStrategy::Kind::random;
    s.seed = 31337;
    const auto r1 = ids(rerank::select_demos(s, target, pool));
    const auto r2 = ids(rerank::select_demos(s, target, pool));
    o.require(r1 == r2 && r1.size() == 4, "random is not reproducible");
    s.seed = 31338;
    o.require(ids(rerank::select_demos(s, target, pool)) != r1, "random ignores the seed");
    if (o.ok) o.detail = "similar and difficult exact over 100 demos, random reproducible";
    return o;
}

// ------------------------------------------------------------------ 10
Outcome synthesis_gates() {
    Outcome o;
    using namespace demosynth;
    const demosynth::SynthConfig cfg;
    o.require(cfg.confidence_threshold == 0.8, "default threshold is not 0.8");
    std::size_t accepted_cells = 0;
    for (int mask = 0; mask < 8; ++mask) {
        const bool gen = mask & 1, ver = mask & 2, rev = mask & 4;
        ScriptedSynthEndpoint a("a"), b("b"), c("c");
        std::array<SynthEndpoint*, 3> eps{&a, &b, &c};
        const SynthPair p{"query", "pos", "neg", {1, 0}, {0, 1}, {1, 1}};
        if (!gen) a.set_silent("query", "neg");
        // 0.9 vs 0.7 on the positive side, 0.1 on the negative side.
        a.scores().set("query", "pos", {ver ? std::log(9.0) : std::log(7.0 / 3.0), 0});
        a.scores().set("query", "neg", {std::log(1.0 / 9.0), 0});
        if (!rev) c.set_verdict("query", "pos", Verdict::reject);
        const auto out = synthesize_pair(0, p, std::span<SynthEndpoint* const, 3>(eps), cfg);
        if (out.accepted()) ++accepted_cells;
        o.require(out.accepted() == (gen && ver && rev), "cell " + std::to_string(mask) + " wrong");
    }
    o.require(accepted_cells == 1, "accepted cells: " + std::to_string(accepted_cells));

    // Negative side gate: 0.2 is the bound, 0.25 must be rejected.
    {
        ScriptedSynthEndpoint a("a"), b("b"), c("c");
        std::array<SynthEndpoint*, 3> eps{&a, &b, &c};
        a.scores().set("query", "pos", {std::log(9.0), 0});
        a.scores().set("query", "neg", {std::log(1.0 / 3.0), 0});
        const SynthPair p{"query", "pos", "neg", {1, 0}, {0, 1}, {1, 1}};
        o.require(synthesize_pair(0, p, std::span<SynthEndpoint* const, 3>(eps), cfg).rejected == Stage::verification,
                  "negative scored 0.25 passed");
    }

    ScriptedSynthEndpoint a("a"), b("b"), c("c");
    for (auto* e : {&a, &b, &c}) e->scores().set_fallback(rerank::ScorePair{0, 0});
    std::array<SynthEndpoint*, 3> eps{&a, &b, &c};
    std::vector<SynthPair> pairs;
    for (int i = 0; i < 6; ++i) pairs.push_back({"q" + std::to_string(i), "pos", "neg", {1, 0}, {0, 1}, {1, 1}});
    const auto r = build_demo_pool(pairs, std::span<SynthEndpoint* const, 3>(eps), cfg);
    std::vector<std::size_t> rotation;
    for (const auto& x : r.outcomes) rotation.push_back(x.proposer);
    o.require(rotation == std::vector<std::size_t>{0, 1, 2, 0, 1, 2}, "proposer rotation wrong");
    if (o.ok) o.detail = "only the all-pass cell accepted, rotation 0,1,2,0,1,2";
    return o;
}

// ------------------------------------------------------------------ 11
Outcome end_to_end() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto fx = ht::fixture_dir() / "e2e";
    ht::TempDir work;
    const auto run = [&](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = cli::run_command(args, out, err);
        if (code != 0) o.require(false, args[0] + " exited " + std::to_string(code) + ": " + err.str());
        return out.str();
    };
    const std::vector<std::string> res = {"--lemma_map", (fx / "lemmas.tsv").string(), "--stopwords",
                                          (fx / "stopwords.txt").string()};
    auto with = [&](std::vector<std::string> a) {
        a.insert(a.end(), res.begin(), res.end());
        return a;
    };
    const auto idx = (work / "index.hydx").string();
    run(with({"index", "--corpus", (fx / "corpus.jsonl").string(), "--out", idx}));
    if (o.ok) {
        run(with({"search", "--queries", (fx / "queries.jsonl").string(), "--index", idx, "--out",
                  (work / "first.tsv").string()}));
    }
    if (o.ok) {
        run({"rerank", "--run", (work / "first.tsv").string(), "--queries", (fx / "queries.jsonl").string(),
             "--client", "mock:" + (fx / "scores.tsv").string(), "--out", (work / "reranked.tsv").string()});
    }
    if (o.ok) {
        run({"eval", "--run", (work / "reranked.tsv").string(), "--qrels", (fx / "qrels.tsv").string(), "--groups",
             (fx / "groups.tsv").string(), "--out", (work / "report.json").string()});
    }
    if (o.ok) {
        const auto got = text::read_file(work / "report.json");
        const auto want = text::read_file(fx / "expected" / "report.json");
        o.require(got == want, "report differs from the golden file");
    }
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, "took " + std::to_string(secs) + " s");
    if (o.ok) o.detail = "golden report reproduced byte-for-byte";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"sparsification matches the brute-force pipeline", sparsify_oracle},
        {"quantization spot values", quantization_spots},
        {"hybrid retrieval matches exhaustive fusion", hybrid_oracle},
        {"lambda 0/1 ordering degeneracy", lambda_degeneracy},
        {"MaxSim oracle and invariances", maxsim_oracle},
        {"metric oracles", metric_oracles},
        {"two-way softmax properties", score_pair_properties},
        {"rerank truth tables", rerank_truth_tables},
        {"demonstration selection", demo_selection},
        {"synthesis gates and rotation", synthesis_gates},
        {"end-to-end fixture", end_to_end},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
                  << "\n";
        failed += o.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
