// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/rerank.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace hybridoc::rerank {

using nlohmann::json;

const char* const kDefaultInstruction =
    "Judge whether the document page answers the query. Think step by step, then answer Yes or No.";

// ------------------------------------------------------------ pool file I/O

void validate_demonstration(const Demonstration& demo) {
    const auto fail = [&](const std::string& what) {
        throw InvalidArgument("demo \"" + demo.demo_id + "\": " + what);
    };
    if (demo.demo_id.empty()) throw InvalidArgument("demo with empty demo_id");
    if (demo.reasoning.empty()) fail("empty reasoning");
    if (!(demo.confidence >= 0.0 && demo.confidence <= 1.0)) fail("confidence outside [0,1]");
    for (const auto* v : {&demo.q_dense, &demo.d_dense}) {
        if (v->empty()) fail("empty embedding");
        bool nonzero = false;
        for (float x : *v) {
            if (!std::isfinite(x)) fail("non-finite embedding component");
            nonzero = nonzero || x != 0.0f;
        }
        if (!nonzero) fail("zero embedding");
    }
}

namespace {

void append_vector(std::string& out, const std::vector<float>& v) {
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += text::format_real(v[i]);
    }
    out += ']';
}

std::vector<float> parse_vector(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array()) throw InvalidArgument(std::string("missing array \"") + key + "\"");
    std::vector<float> out;
    out.reserve(it->size());
    for (const auto& x : *it) {
        if (!x.is_number()) throw InvalidArgument(std::string("non-numeric entry in \"") + key + "\"");
        out.push_back(static_cast<float>(x.get<double>()));
    }
    return out;
}

std::string get_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw InvalidArgument(std::string("missing string \"") + key + "\"");
    return it->get<std::string>();
}

}  // namespace

std::string serialize(const Demonstration& demo) {
    std::string out = "{\"demo_id\":" + json(demo.demo_id).dump();
    out += ",\"query_text\":" + json(demo.query_text).dump();
    out += ",\"doc_ref\":" + json(demo.doc_ref).dump();
    out += ",\"label\":\"" + std::string(to_string(demo.label)) + "\"";
    out += ",\"reasoning\":" + json(demo.reasoning).dump();
    out += ",\"confidence\":" + text::format_exact(demo.confidence);
    out += ",\"q_dense\":";
    append_vector(out, demo.q_dense);
    out += ",\"d_dense\":";
    append_vector(out, demo.d_dense);
    out += '}';
    return out;
}

Demonstration parse_demonstration(std::string_view line) {
    const json j = json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument("expected a JSON object");
    Demonstration d;
    d.demo_id = get_string(j, "demo_id");
    d.query_text = get_string(j, "query_text");
    d.doc_ref = get_string(j, "doc_ref");
    const auto label = parse_label(get_string(j, "label"));
    if (!label) throw InvalidArgument("label must be \"relevant\" or \"not_relevant\"");
    d.label = *label;
    d.reasoning = get_string(j, "reasoning");
    auto it = j.find("confidence");
    if (it == j.end() || !it->is_number()) throw InvalidArgument("missing number \"confidence\"");
    d.confidence = it->get<double>();
    d.q_dense = parse_vector(j, "q_dense");
    d.d_dense = parse_vector(j, "d_dense");
    validate_demonstration(d);
    return d;
}

std::string format_demo_pool(std::span<const Demonstration> pool) {
    std::string out;
    for (const auto& d : pool) {
        out += serialize(d);
        out += '\n';
    }
    return out;
}

std::vector<Demonstration> load_demo_pool(const std::filesystem::path& path) {
    std::vector<Demonstration> pool;
    std::set<std::string, std::less<>> seen;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        try {
            pool.push_back(parse_demonstration(line));
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string(), number, e.what());
        }
        if (!seen.insert(pool.back().demo_id).second) throw DuplicateIdError(pool.back().demo_id);
    });
    return pool;
}

void write_demo_pool(const std::filesystem::path& path, std::span<const Demonstration> pool) {
    text::write_file_atomic(path, format_demo_pool(pool));
}

// ------------------------------------------------------------------ scoring

double score_pair(double yes_value, double no_value) {
    if (!std::isfinite(yes_value) || !std::isfinite(no_value)) throw InvalidArgument("non-finite yes/no value");
    const double m = std::max(yes_value, no_value);
    const double ey = std::exp(yes_value - m);
    const double en = std::exp(no_value - m);
    return ey / (ey + en);
}

namespace {

std::vector<float> as_single(const DenseRep& rep) {
    if (rep.kind == DenseKind::single && rep.count() == 1) return rep.vectors.front();
    return index::mean_pool(rep);
}

}  // namespace

double joint_similarity(const DenseRep& q, const DenseRep& d, const Demonstration& demo, double query_weight) {
    if (!(query_weight >= 0.0 && query_weight <= 1.0)) throw InvalidArgument("query_weight must lie in [0,1]");
    const double cq = index::dense_cosine(as_single(q), demo.q_dense);
    const double cd = index::dense_cosine(as_single(d), demo.d_dense);
    return query_weight * cq + (1.0 - query_weight) * cd;
}

// ---------------------------------------------------------------- selection

const char* to_string(SelectionStrategy::Kind kind) noexcept {
    switch (kind) {
        case SelectionStrategy::Kind::random: return "random";
        case SelectionStrategy::Kind::difficult: return "difficult";
        case SelectionStrategy::Kind::similar: return "similar";
    }
    return "similar";
}

std::optional<SelectionStrategy::Kind> parse_strategy(std::string_view text) noexcept {
    if (text == "random") return SelectionStrategy::Kind::random;
    if (text == "difficult") return SelectionStrategy::Kind::difficult;
    if (text == "similar") return SelectionStrategy::Kind::similar;
    return std::nullopt;
}

namespace {

// FNV-1a over the seed bytes (little-endian), query_id, NUL, doc_id.
std::uint64_t pair_seed(std::uint64_t seed, std::string_view query_id, std::string_view doc_id) {
    std::uint64_t h = 14695981039346656037ull;
    const auto mix = [&](unsigned char b) {
        h ^= b;
        h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
    for (char c : query_id) mix(static_cast<unsigned char>(c));
    mix(0);
    for (char c : doc_id) mix(static_cast<unsigned char>(c));
    return h;
}

// Uniform integer in [0, n) by rejection; the engine's mt19937_64 output is
// fully specified, so draws are identical on every platform.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace

std::vector<Demonstration> select_demos(const SelectionStrategy& strategy, const SelectionTarget& target,
                                        std::span<const Demonstration> pool) {
    if (strategy.k < 1) throw InvalidArgument("demo k must be >= 1");
    if (pool.empty()) return {};
    const std::size_t take = std::min(strategy.k, pool.size());
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);

    switch (strategy.kind) {
        case SelectionStrategy::Kind::random: {
            std::mt19937_64 rng(pair_seed(strategy.seed, target.query_id, target.doc_id));
            for (std::size_t i = 0; i < take; ++i) {
                const auto j = i + static_cast<std::size_t>(draw_below(rng, order.size() - i));
                std::swap(order[i], order[j]);
            }
            break;
        }
        case SelectionStrategy::Kind::difficult: {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (pool[a].confidence != pool[b].confidence) return pool[a].confidence < pool[b].confidence;
                return pool[a].demo_id < pool[b].demo_id;
            });
            break;
        }
        case SelectionStrategy::Kind::similar: {
            if (!target.q_dense || !target.d_dense) {
                throw InvalidArgument("similar selection needs query and document embeddings");
            }
            std::vector<double> sim(pool.size());
            for (std::size_t i = 0; i < pool.size(); ++i) {
                sim[i] = joint_similarity(*target.q_dense, *target.d_dense, pool[i], strategy.query_weight);
            }
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (sim[a] != sim[b]) return sim[a] > sim[b];
                return pool[a].demo_id < pool[b].demo_id;
            });
            break;
        }
    }

    std::vector<Demonstration> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(pool[order[i]]);
    return out;
}

std::vector<Demonstration> select_demos(const SelectionStrategy& strategy, const QueryRecord& q,
                                        const DocumentRecord& d, std::span<const Demonstration> pool) {
    return select_demos(strategy, SelectionTarget{q.query_id, d.doc_id, &q.dense, &d.dense}, pool);
}

// ------------------------------------------------------------------ rerank

std::vector<RerankedDoc> rerank_candidates(const QueryRecord& q, std::span<const std::string> candidates,
                                           ModelClient& client, std::span<const Demonstration> pool,
                                           const RerankOptions& options, const index::DenseStore* store) {
    if (candidates.empty()) throw InvalidArgument("no candidates to rerank");
    std::set<std::string_view> seen;
    for (const auto& c : candidates) {
        if (!seen.insert(c).second) throw DuplicateIdError(c);
    }
    const bool needs_embeddings = options.strategy.kind == SelectionStrategy::Kind::similar && !pool.empty();
    if (needs_embeddings && !store) throw InvalidArgument("similar selection needs a dense store");

    std::vector<RerankedDoc> out(candidates.size());
    detail::parallel_for(candidates.size(), options.parallelism, [&](std::size_t i) {
        const auto& doc_id = candidates[i];
        SelectionTarget target{q.query_id, doc_id, &q.dense, nullptr};
        if (needs_embeddings) target.d_dense = &store->get(doc_id);
        const auto demos = select_demos(options.strategy, target, pool);

        PromptBundle bundle;
        bundle.instruction = options.instruction;
        bundle.query = q.text;
        bundle.doc_ref = doc_id;
        for (const auto& d : demos) bundle.demos.push_back({d.query_text, d.doc_ref, d.label, d.reasoning});

        RerankedDoc r;
        r.doc_id = doc_id;
        r.input_rank = i + 1;
        try {
            r.raw = client.score(bundle);
            r.score = score_pair(r.raw.yes, r.raw.no);
        } catch (const Error& e) {
            throw ClientError("scoring doc_id \"" + doc_id + "\" failed: " + e.what());
        }
        out[i] = std::move(r);
    });
    std::stable_sort(out.begin(), out.end(), [](const RerankedDoc& a, const RerankedDoc& b) { return a.score > b.score; });
    return out;
}

}  // namespace hybridoc::rerank
