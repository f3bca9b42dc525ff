// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/demosynth.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <system_error>

namespace hybridoc::demosynth {

using nlohmann::json;
using rerank::PromptBundle;
using rerank::ScorePair;

void SynthConfig::validate() const {
    if (!(top_p > 0.0 && top_p <= 1.0)) throw InvalidArgument("top_p must lie in (0,1]");
    if (!(confidence_threshold >= 0.0 && confidence_threshold < 1.0)) {
        throw InvalidArgument("confidence_threshold must lie in [0,1)");
    }
    if (reviewers_required < 1 || reviewers_required > 2) throw InvalidArgument("reviewers_required must be 1 or 2");
    if (!std::isfinite(temperature)) throw InvalidArgument("temperature must be finite");
}

const char* to_string(Verdict v) noexcept { return v == Verdict::approve ? "approve" : "reject"; }

std::optional<Verdict> parse_verdict(std::string_view text) noexcept {
    if (text == "approve") return Verdict::approve;
    if (text == "reject") return Verdict::reject;
    return std::nullopt;
}

const char* to_string(Stage s) noexcept {
    switch (s) {
        case Stage::generation: return "generation";
        case Stage::verification: return "verification";
        case Stage::review: return "review";
    }
    return "generation";
}

std::optional<Stage> parse_stage(std::string_view text) noexcept {
    if (text == "generation") return Stage::generation;
    if (text == "verification") return Stage::verification;
    if (text == "review") return Stage::review;
    return std::nullopt;
}

// --------------------------------------------------------------- wire codec

namespace {

json parse_object(std::string_view body) {
    json j = json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument("expected a JSON object");
    return j;
}

std::string str_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw InvalidArgument(std::string("missing string field \"") + key + "\"");
    return it->get<std::string>();
}

double num_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw InvalidArgument(std::string("missing numeric field \"") + key + "\"");
    return it->get<double>();
}

Label label_field(const json& j) {
    const auto l = rerank::parse_label(str_field(j, "label"));
    if (!l) throw InvalidArgument("label must be \"relevant\" or \"not_relevant\"");
    return *l;
}

}  // namespace

std::string encode_generate_request(const GenerateRequest& req) {
    json j = json::object();
    j["query"] = req.query;
    j["doc_ref"] = req.doc_ref;
    j["label"] = rerank::to_string(req.label);
    j["temperature"] = req.temperature;
    j["top_p"] = req.top_p;
    return j.dump();
}

GenerateRequest decode_generate_request(std::string_view body) {
    const json j = parse_object(body);
    return {str_field(j, "query"), str_field(j, "doc_ref"), label_field(j), num_field(j, "temperature"),
            num_field(j, "top_p")};
}

std::string encode_generate_response(std::string_view reasoning) {
    json j = json::object();
    j["reasoning"] = std::string(reasoning);
    return j.dump();
}

std::string decode_generate_response(std::string_view body) { return str_field(parse_object(body), "reasoning"); }

std::string encode_review_request(const ReviewRequest& req) {
    json j = json::object();
    j["query"] = req.query;
    j["doc_ref"] = req.doc_ref;
    j["label"] = rerank::to_string(req.label);
    j["reasoning"] = req.reasoning;
    return j.dump();
}

ReviewRequest decode_review_request(std::string_view body) {
    const json j = parse_object(body);
    return {str_field(j, "query"), str_field(j, "doc_ref"), label_field(j), str_field(j, "reasoning")};
}

std::string encode_review_response(Verdict verdict) {
    json j = json::object();
    j["verdict"] = to_string(verdict);
    return j.dump();
}

Verdict decode_review_response(std::string_view body) {
    const auto v = parse_verdict(str_field(parse_object(body), "verdict"));
    if (!v) throw InvalidArgument("verdict must be \"approve\" or \"reject\"");
    return *v;
}

// ------------------------------------------------------------------ scripted

ScriptedSynthEndpoint::ScriptedSynthEndpoint(std::string name, Verdict default_verdict)
    : name_(std::move(name)), default_verdict_(default_verdict) {}

std::unique_ptr<ScriptedSynthEndpoint> ScriptedSynthEndpoint::load(const std::filesystem::path& path) {
    auto ep = std::make_unique<ScriptedSynthEndpoint>(path.stem().string());
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty() || line.front() == '#') return;
        const auto f = text::split(line, '\t');
        const auto bad = [&](const std::string& what) { throw ParseError(path.string(), number, what); };
        if (f[0] == "score") {
            if (f.size() != 5) bad("expected score<TAB>query<TAB>doc_ref<TAB>yes<TAB>no");
            double v[2];
            for (int i = 0; i < 2; ++i) {
                try {
                    std::size_t used = 0;
                    const std::string s(f[3 + i]);
                    v[i] = std::stod(s, &used);
                    if (used != s.size() || !std::isfinite(v[i])) throw std::invalid_argument(s);
                } catch (const std::exception&) {
                    bad("bad score value \"" + std::string(f[3 + i]) + "\"");
                }
            }
            ep->scores_.set(std::string(f[1]), std::string(f[2]), {v[0], v[1]});
        } else if (f[0] == "verdict") {
            if (f.size() != 4) bad("expected verdict<TAB>query<TAB>doc_ref<TAB>approve|reject");
            const auto v = parse_verdict(f[3]);
            if (!v) bad("verdict must be approve or reject");
            ep->set_verdict(std::string(f[1]), std::string(f[2]), *v);
        } else if (f[0] == "default") {
            const auto v = f.size() == 2 ? parse_verdict(f[1]) : std::nullopt;
            if (!v) bad("expected default<TAB>approve|reject");
            ep->default_verdict_ = *v;
        } else if (f[0] == "silent") {
            if (f.size() != 3) bad("expected silent<TAB>query<TAB>doc_ref");
            ep->set_silent(std::string(f[1]), std::string(f[2]));
        } else {
            bad("unknown directive \"" + std::string(f[0]) + "\"");
        }
    });
    return ep;
}

void ScriptedSynthEndpoint::set_verdict(std::string query, std::string doc_ref, Verdict v) {
    verdicts_.insert_or_assign({std::move(query), std::move(doc_ref)}, v);
}

void ScriptedSynthEndpoint::set_silent(std::string query, std::string doc_ref) {
    silent_.insert_or_assign({std::move(query), std::move(doc_ref)}, true);
}

template <typename T>
const T* ScriptedSynthEndpoint::find(const std::map<std::pair<std::string, std::string>, T, std::less<>>& table,
                                     const std::string& query, const std::string& doc_ref) const {
    auto it = table.find(std::pair(query, doc_ref));
    if (it == table.end()) it = table.find(std::pair(std::string("*"), doc_ref));
    return it == table.end() ? nullptr : &it->second;
}

std::string ScriptedSynthEndpoint::generate(const GenerateRequest& req) {
    if (find(silent_, req.query, req.doc_ref)) return {};
    const bool rel = req.label == Label::relevant;
    return "[" + name_ + "] Step 1: read the query \"" + req.query + "\". Step 2: inspect page " + req.doc_ref +
           ". Step 3: the page " + (rel ? "contains" : "does not contain") + " the requested information, so it is " +
           rerank::to_string(req.label) + ".";
}

Verdict ScriptedSynthEndpoint::review(const ReviewRequest& req) {
    const auto* v = find(verdicts_, req.query, req.doc_ref);
    return v ? *v : default_verdict_;
}

ScorePair ScriptedSynthEndpoint::score(const PromptBundle& bundle) { return scores_.score(bundle); }

// -------------------------------------------------------------------- remote

RemoteSynthEndpoint::RemoteSynthEndpoint(rerank::HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::string RemoteSynthEndpoint::generate(const GenerateRequest& req) {
    const auto body = rerank::http_post_json(endpoint_, "/generate", encode_generate_request(req));
    try {
        return decode_generate_response(body);
    } catch (const InvalidArgument& e) {
        throw ClientError(std::string("bad /generate response: ") + e.what());
    }
}

Verdict RemoteSynthEndpoint::review(const ReviewRequest& req) {
    const auto body = rerank::http_post_json(endpoint_, "/review", encode_review_request(req));
    try {
        return decode_review_response(body);
    } catch (const InvalidArgument& e) {
        throw ClientError(std::string("bad /review response: ") + e.what());
    }
}

ScorePair RemoteSynthEndpoint::score(const PromptBundle& bundle) {
    return rerank::RemoteModelClient(endpoint_).score(bundle);
}

std::unique_ptr<SynthEndpoint> make_synth_endpoint(std::string_view spec) {
    if (spec.substr(0, 5) == "mock:") return ScriptedSynthEndpoint::load(std::string(spec.substr(5)));
    if (spec.substr(0, 7) == "http://") {
        return std::make_unique<RemoteSynthEndpoint>(rerank::HttpEndpoint{std::string(spec), std::chrono::milliseconds(30000)});
    }
    throw InvalidArgument("unknown endpoint spec \"" + std::string(spec) + "\" (use mock:FILE or http://host:port)");
}

// ----------------------------------------------------------------- pipeline

std::vector<SynthPair> load_pairs(const std::filesystem::path& path) {
    std::vector<SynthPair> pairs;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        const auto f = text::split(line, '\t');
        if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
            throw ParseError(path.string(), number, "expected query_text<TAB>d_pos<TAB>d_neg");
        }
        SynthPair p;
        p.query_text = std::string(f[0]);
        p.d_pos = std::string(f[1]);
        p.d_neg = std::string(f[2]);
        pairs.push_back(std::move(p));
    });
    return pairs;
}

std::size_t proposer_for(std::size_t pair_index) noexcept { return pair_index % 3; }

PairOutcome synthesize_pair(std::size_t pair_index, const SynthPair& pair,
                            std::span<SynthEndpoint* const, 3> endpoints, const SynthConfig& cfg) {
    cfg.validate();
    for (const auto* v : {&pair.q_dense, &pair.pos_dense, &pair.neg_dense}) {
        bool nonzero = false;
        for (float x : *v) {
            if (!std::isfinite(x)) throw InvalidArgument("non-finite embedding for pair " + std::to_string(pair_index));
            nonzero = nonzero || x != 0.0f;
        }
        if (!nonzero) throw InvalidArgument("missing or zero embedding for pair " + std::to_string(pair_index));
    }
    PairOutcome out;
    out.index = pair_index;
    out.proposer = proposer_for(pair_index);
    SynthEndpoint& proposer = *endpoints[out.proposer];

    const auto reject = [&](Stage stage, std::string reason) {
        out.rejected = stage;
        out.reason = std::move(reason);
        return out;
    };

    const std::string pos_reasoning =
        proposer.generate({pair.query_text, pair.d_pos, Label::relevant, cfg.temperature, cfg.top_p});
    if (pos_reasoning.empty()) return reject(Stage::generation, "empty reasoning for " + pair.d_pos);
    const std::string neg_reasoning =
        proposer.generate({pair.query_text, pair.d_neg, Label::not_relevant, cfg.temperature, cfg.top_p});
    if (neg_reasoning.empty()) return reject(Stage::generation, "empty reasoning for " + pair.d_neg);

    std::vector<rerank::PromptDemo> context = {
        {pair.query_text, pair.d_pos, Label::relevant, pos_reasoning},
        {pair.query_text, pair.d_neg, Label::not_relevant, neg_reasoning},
    };
    const auto verify = [&](const std::string& doc_ref) {
        const auto sp = proposer.score(PromptBundle{cfg.instruction, pair.query_text, doc_ref, context});
        try {
            return rerank::score_pair(sp.yes, sp.no);
        } catch (const InvalidArgument& e) {
            throw ClientError(std::string("bad verification score: ") + e.what());
        }
    };
    out.pos_score = verify(pair.d_pos);
    out.neg_score = verify(pair.d_neg);
    const double upper = cfg.confidence_threshold;
    const double lower = 1.0 - cfg.confidence_threshold;
    if (!(out.pos_score > upper)) {
        return reject(Stage::verification, "positive scored " + text::format_real(out.pos_score));
    }
    if (!(out.neg_score < lower)) {
        return reject(Stage::verification, "negative scored " + text::format_real(out.neg_score));
    }

    int approvals = 0;
    for (std::size_t r = 1; r <= 2; ++r) {
        SynthEndpoint& reviewer = *endpoints[(out.proposer + r) % 3];
        const bool ok = reviewer.review({pair.query_text, pair.d_pos, Label::relevant, pos_reasoning}) ==
                            Verdict::approve &&
                        reviewer.review({pair.query_text, pair.d_neg, Label::not_relevant, neg_reasoning}) ==
                            Verdict::approve;
        approvals += ok ? 1 : 0;
    }
    if (approvals < cfg.reviewers_required) {
        return reject(Stage::review, std::to_string(approvals) + " of 2 reviewers approved");
    }

    const std::string stem = "pair" + std::to_string(pair_index);
    out.demos.push_back({stem + ":pos", pair.query_text, pair.d_pos, Label::relevant, pos_reasoning, out.pos_score,
                         pair.q_dense, pair.pos_dense});
    out.demos.push_back({stem + ":neg", pair.query_text, pair.d_neg, Label::not_relevant, neg_reasoning,
                         1.0 - out.neg_score, pair.q_dense, pair.neg_dense});
    return out;
}

std::optional<double> SynthStats::acceptance_rate() const noexcept {
    if (total == 0) return std::nullopt;
    return static_cast<double>(accepted) / static_cast<double>(total);
}

std::string format_stats(const SynthStats& stats) {
    const auto rate = stats.acceptance_rate();
    std::string out = "{\n";
    out += "  \"total\": " + std::to_string(stats.total) + ",\n";
    out += "  \"accepted\": " + std::to_string(stats.accepted) + ",\n";
    out += "  \"rejected\": " + std::to_string(stats.rejected()) + ",\n";
    out += "  \"acceptance_rate\": " + (rate ? text::format_real(*rate) : std::string("null")) + ",\n";
    out += "  \"rejected_by_stage\": {\n";
    out += "    \"generation\": " + std::to_string(stats.rejected_generation) + ",\n";
    out += "    \"verification\": " + std::to_string(stats.rejected_verification) + ",\n";
    out += "    \"review\": " + std::to_string(stats.rejected_review) + "\n";
    out += "  }\n}\n";
    return out;
}

// ---------------------------------------------------------------- checkpoint

namespace {

// One JSON object per finished pair, in pair order.
std::string checkpoint_line(const SynthPair& pair, const PairOutcome& o) {
    json j = json::object();
    j["pair"] = o.index;
    j["query"] = pair.query_text;
    j["d_pos"] = pair.d_pos;
    j["d_neg"] = pair.d_neg;
    j["proposer"] = o.proposer;
    j["stage"] = o.rejected ? json(to_string(*o.rejected)) : json(nullptr);
    j["reason"] = o.reason;
    j["pos_score"] = o.pos_score;
    j["neg_score"] = o.neg_score;
    json demos = json::array();
    for (const auto& d : o.demos) demos.push_back(json::parse(rerank::serialize(d)));
    j["demos"] = std::move(demos);
    return j.dump() + "\n";
}

std::vector<PairOutcome> read_checkpoint(const std::filesystem::path& path, std::span<const SynthPair> pairs) {
    std::vector<PairOutcome> done;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        const auto bad = [&](const std::string& what) { throw ParseError(path.string(), number, what); };
        const json j = json::parse(line.begin(), line.end(), nullptr, false);
        if (j.is_discarded() || !j.is_object()) bad("expected a JSON object");
        try {
            PairOutcome o;
            o.index = j.at("pair").get<std::size_t>();
            if (o.index != done.size()) bad("checkpoint pairs out of order");
            if (o.index >= pairs.size()) bad("checkpoint has more pairs than the input");
            const auto& p = pairs[o.index];
            if (j.at("query") != p.query_text || j.at("d_pos") != p.d_pos || j.at("d_neg") != p.d_neg) {
                bad("checkpoint does not match the input pairs");
            }
            o.proposer = j.at("proposer").get<std::size_t>();
            if (!j.at("stage").is_null()) {
                o.rejected = parse_stage(j.at("stage").get<std::string>());
                if (!o.rejected) bad("unknown stage");
            }
            o.reason = j.at("reason").get<std::string>();
            o.pos_score = j.at("pos_score").get<double>();
            o.neg_score = j.at("neg_score").get<double>();
            for (const auto& d : j.at("demos")) o.demos.push_back(rerank::parse_demonstration(d.dump()));
            done.push_back(std::move(o));
        } catch (const json::exception& e) {
            bad(std::string("malformed checkpoint entry: ") + e.what());
        } catch (const InvalidArgument& e) {
            bad(e.what());
        }
    });
    return done;
}

}  // namespace

PoolResult build_demo_pool(std::span<const SynthPair> pairs, std::span<SynthEndpoint* const, 3> endpoints,
                           const SynthConfig& cfg, const BuildOptions& options) {
    cfg.validate();
    std::vector<std::optional<PairOutcome>> outcomes(pairs.size());
    std::size_t resumed = 0;
    if (options.resume && !options.checkpoint_path.empty() && std::filesystem::exists(options.checkpoint_path)) {
        for (auto& o : read_checkpoint(options.checkpoint_path, pairs)) {
            outcomes[o.index] = std::move(o);
            ++resumed;
        }
    }

    const std::size_t todo = pairs.size() - resumed;
    try {
        detail::parallel_for(todo, cfg.parallelism, [&](std::size_t i) {
            const std::size_t idx = resumed + i;
            outcomes[idx] = synthesize_pair(idx, pairs[idx], endpoints, cfg);
        });
    } catch (const ClientError& e) {
        std::size_t completed = 0;
        while (completed < outcomes.size() && outcomes[completed]) ++completed;
        if (!options.checkpoint_path.empty()) {
            std::string body;
            for (std::size_t i = 0; i < completed; ++i) body += checkpoint_line(pairs[i], *outcomes[i]);
            text::write_file_atomic(options.checkpoint_path, body);
        }
        throw SynthAborted("pair " + std::to_string(completed) + ": " + e.what(), options.checkpoint_path, completed);
    }

    PoolResult result;
    result.stats.total = pairs.size();
    for (auto& o : outcomes) {
        if (!o->rejected) {
            ++result.stats.accepted;
            for (const auto& d : o->demos) result.pool.push_back(d);
        } else if (*o->rejected == Stage::generation) {
            ++result.stats.rejected_generation;
        } else if (*o->rejected == Stage::verification) {
            ++result.stats.rejected_verification;
        } else {
            ++result.stats.rejected_review;
        }
        result.outcomes.push_back(std::move(*o));
    }
    if (!options.checkpoint_path.empty()) {
        std::error_code ec;
        std::filesystem::remove(options.checkpoint_path, ec);
    }
    return result;
}

}  // namespace hybridoc::demosynth
