// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/config.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

namespace hybridoc::config {

namespace {

std::string key_str(std::string_view key) { return std::string(key); }

template <typename T>
T parse_unsigned(std::string_view key, std::string_view v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
        throw InvalidArgument(key_str(key) + ": expected a non-negative integer, got \"" + std::string(v) + "\"");
    }
    return out;
}

std::size_t parse_positive(std::string_view key, std::string_view v) {
    const auto n = parse_unsigned<std::size_t>(key, v);
    if (n < 1) throw InvalidArgument(key_str(key) + ": must be >= 1");
    return n;
}

double parse_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
        throw InvalidArgument(key_str(key) + ": expected a real number, got \"" + std::string(v) + "\"");
    }
    return out;
}

double parse_unit(std::string_view key, std::string_view v) {
    const double x = parse_real(key, v);
    if (x < 0.0 || x > 1.0) throw InvalidArgument(key_str(key) + ": must lie in [0,1]");
    return x;
}

std::filesystem::path parse_path(std::string_view key, std::string_view v) {
    if (v.empty()) throw InvalidArgument(key_str(key) + ": empty path");
    return std::filesystem::path(std::string(v));
}

std::string real_text(double v) { return text::format_real(v); }

}  // namespace

const std::vector<KeyInfo>& known_keys() {
    static const std::vector<KeyInfo> keys = {
        {"lambda", "0.8", "dense weight in hybrid fusion, [0,1]"},
        {"channel_k", "", "candidates taken from each channel (default max(50, 2m))"},
        {"m", "30", "first-stage candidates kept"},
        {"demo_k", "4", "demonstrations per prompt"},
        {"selection_strategy", "similar", "random | difficult | similar"},
        {"seed", "", "seed for the random strategy (required by it)"},
        {"joint_query_weight", "0.5", "query-side weight of the joint demo similarity"},
        {"parallelism", "1", "worker threads for reranking and synthesis"},
        {"instruction", rerank::kDefaultInstruction, "task instruction sent with every prompt"},
        {"lemma_map", "", "token<TAB>lemma table"},
        {"stopwords", "", "stopword list"},
        {"index", "", "index snapshot path"},
        {"demo_pool", "", "demonstration pool file"},
        {"client", "", "scoring client: mock:FILE or http://host:port"},
        {"synth.endpoints", "", "three comma-separated endpoints for synthesis"},
        {"sparsify.top_k", "256", "lexical dimensions kept per vector"},
        {"sparsify.scale", "100", "weight scale before rounding"},
        {"synth.temperature", "0.2", "generation temperature"},
        {"synth.top_p", "0.95", "generation nucleus mass, (0,1]"},
        {"synth.confidence_threshold", "0.8", "verification threshold, [0,1)"},
        {"synth.reviewers_required", "2", "approving peers needed, 1 or 2"},
        {"eval.ndcg_k", "10", "nDCG cutoff"},
        {"eval.recall_k", "3", "recall cutoff"},
    };
    return keys;
}

void EngineConfig::set(std::string_view key, std::string_view raw) {
    const auto v = text::trim(raw);
    if (key == "lambda") {
        lambda = parse_unit(key, v);
    } else if (key == "channel_k") {
        if (v == "auto") {
            channel_k.reset();
        } else {
            channel_k = parse_positive(key, v);
        }
    } else if (key == "m") {
        m = parse_positive(key, v);
    } else if (key == "demo_k") {
        demo_k = parse_positive(key, v);
    } else if (key == "selection_strategy") {
        const auto k = rerank::parse_strategy(v);
        if (!k) throw InvalidArgument("selection_strategy: expected random, difficult or similar");
        selection_strategy = *k;
    } else if (key == "seed") {
        seed = parse_unsigned<std::uint64_t>(key, v);
    } else if (key == "joint_query_weight") {
        joint_query_weight = parse_unit(key, v);
    } else if (key == "parallelism") {
        parallelism = parse_positive(key, v);
    } else if (key == "instruction") {
        if (v.empty()) throw InvalidArgument("instruction: must not be empty");
        instruction = std::string(v);
    } else if (key == "lemma_map") {
        lemma_map = parse_path(key, v);
    } else if (key == "stopwords") {
        stopwords = parse_path(key, v);
    } else if (key == "index") {
        index = parse_path(key, v);
    } else if (key == "demo_pool") {
        demo_pool = parse_path(key, v);
    } else if (key == "client") {
        if (v.empty()) throw InvalidArgument("client: must not be empty");
        client = std::string(v);
    } else if (key == "synth.endpoints") {
        std::vector<std::string> eps;
        for (auto part : text::split(v, ',')) {
            part = text::trim(part);
            if (part.empty()) throw InvalidArgument("synth.endpoints: empty entry");
            eps.emplace_back(part);
        }
        if (eps.size() != 3) throw InvalidArgument("synth.endpoints: expected exactly three endpoints");
        synth_endpoints = std::move(eps);
    } else if (key == "sparsify.top_k") {
        sparsify_top_k = parse_positive(key, v);
    } else if (key == "sparsify.scale") {
        sparsify_scale = parse_real(key, v);
        if (!(sparsify_scale > 0.0)) throw InvalidArgument("sparsify.scale: must be > 0");
    } else if (key == "synth.temperature") {
        synth_temperature = parse_real(key, v);
        if (synth_temperature < 0.0) throw InvalidArgument("synth.temperature: must be >= 0");
    } else if (key == "synth.top_p") {
        synth_top_p = parse_real(key, v);
        if (!(synth_top_p > 0.0 && synth_top_p <= 1.0)) throw InvalidArgument("synth.top_p: must lie in (0,1]");
    } else if (key == "synth.confidence_threshold") {
        synth_confidence_threshold = parse_real(key, v);
        if (!(synth_confidence_threshold >= 0.0 && synth_confidence_threshold < 1.0)) {
            throw InvalidArgument("synth.confidence_threshold: must lie in [0,1)");
        }
    } else if (key == "synth.reviewers_required") {
        const auto n = parse_unsigned<unsigned>(key, v);
        if (n < 1 || n > 2) throw InvalidArgument("synth.reviewers_required: must be 1 or 2");
        synth_reviewers_required = static_cast<int>(n);
    } else if (key == "eval.ndcg_k") {
        eval_ndcg_k = parse_positive(key, v);
    } else if (key == "eval.recall_k") {
        eval_recall_k = parse_positive(key, v);
    } else {
        throw InvalidArgument("unknown config key \"" + std::string(key) + "\"");
    }
}

void EngineConfig::validate() const {
    fusion().validate();
    if (selection_strategy == rerank::SelectionStrategy::Kind::random && !seed) {
        throw InvalidArgument("selection_strategy = random requires a seed");
    }
}

fusion::FusionConfig EngineConfig::fusion() const { return {lambda, m, channel_k}; }

rerank::SelectionStrategy EngineConfig::strategy() const {
    return {selection_strategy, demo_k, seed.value_or(0), joint_query_weight};
}

sparsify::Params EngineConfig::sparsify() const { return {sparsify_top_k, sparsify_scale}; }

demosynth::SynthConfig EngineConfig::synth() const {
    demosynth::SynthConfig s;
    s.temperature = synth_temperature;
    s.top_p = synth_top_p;
    s.confidence_threshold = synth_confidence_threshold;
    s.reviewers_required = synth_reviewers_required;
    s.parallelism = parallelism;
    s.instruction = instruction;
    return s;
}

eval::EvalOptions EngineConfig::eval() const { return {eval_ndcg_k, eval_recall_k}; }

std::string EngineConfig::to_text() const {
    std::string out;
    const auto line = [&](const char* key, const std::string& value) { out += std::string(key) + " = " + value + "\n"; };
    line("lambda", real_text(lambda));
    line("channel_k", channel_k ? std::to_string(*channel_k) : "auto");
    line("m", std::to_string(m));
    line("demo_k", std::to_string(demo_k));
    line("selection_strategy", rerank::to_string(selection_strategy));
    if (seed) line("seed", std::to_string(*seed));
    line("joint_query_weight", real_text(joint_query_weight));
    line("parallelism", std::to_string(parallelism));
    line("instruction", instruction);
    if (lemma_map) line("lemma_map", lemma_map->string());
    if (stopwords) line("stopwords", stopwords->string());
    if (index) line("index", index->string());
    if (demo_pool) line("demo_pool", demo_pool->string());
    if (client) line("client", *client);
    if (!synth_endpoints.empty()) {
        line("synth.endpoints", synth_endpoints[0] + "," + synth_endpoints[1] + "," + synth_endpoints[2]);
    }
    line("sparsify.top_k", std::to_string(sparsify_top_k));
    line("sparsify.scale", real_text(sparsify_scale));
    line("synth.temperature", real_text(synth_temperature));
    line("synth.top_p", real_text(synth_top_p));
    line("synth.confidence_threshold", real_text(synth_confidence_threshold));
    line("synth.reviewers_required", std::to_string(synth_reviewers_required));
    line("eval.ndcg_k", std::to_string(eval_ndcg_k));
    line("eval.recall_k", std::to_string(eval_recall_k));
    return out;
}

void apply_file(EngineConfig& cfg, const std::filesystem::path& path) {
    std::set<std::string, std::less<>> seen;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') return;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ParseError(path.string(), number, "expected key = value");
        const auto key = text::trim(t.substr(0, eq));
        if (key.empty()) throw ParseError(path.string(), number, "empty key");
        if (!seen.emplace(key).second) {
            throw ParseError(path.string(), number, "key \"" + std::string(key) + "\" set twice");
        }
        try {
            cfg.set(key, t.substr(eq + 1));
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string(), number, e.what());
        }
    });
}

EngineConfig load(const std::optional<std::filesystem::path>& explicit_path) {
    EngineConfig cfg;
    if (explicit_path) {
        apply_file(cfg, *explicit_path);
    } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
        apply_file(cfg, env);
    }
    return cfg;
}

}  // namespace hybridoc::config
