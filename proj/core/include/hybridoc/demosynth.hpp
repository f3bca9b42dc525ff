// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Demonstration synthesis with contrastive verification and rotating peer
// review. Generation endpoints speak two routes besides /score:
//   /generate {"query","doc_ref","label","temperature","top_p"} -> {"reasoning"}
//   /review   {"query","doc_ref","label","reasoning"}           -> {"verdict":"approve"|"reject"}

#include "hybridoc/error.hpp"
#include "hybridoc/model_client.hpp"
#include "hybridoc/rerank.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hybridoc::demosynth {

using rerank::Demonstration;
using rerank::Label;

struct SynthConfig {
    double temperature = 0.2;
    double top_p = 0.95;
    double confidence_threshold = 0.8;  // d+ must score above, d- below 1 - threshold
    int reviewers_required = 2;         // of the two non-proposing endpoints
    std::size_t parallelism = 1;
    std::string instruction = rerank::kDefaultInstruction;

    /// Throws InvalidArgument unless 0 < top_p <= 1, 0 <= threshold < 1 and
    /// 1 <= reviewers_required <= 2.
    void validate() const;
};

enum class Verdict { approve, reject };
const char* to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(std::string_view text) noexcept;

struct GenerateRequest {
    std::string query;
    std::string doc_ref;
    Label label = Label::relevant;
    double temperature = 0.2;
    double top_p = 0.95;

    friend bool operator==(const GenerateRequest&, const GenerateRequest&) = default;
};

struct ReviewRequest {
    std::string query;
    std::string doc_ref;
    Label label = Label::relevant;
    std::string reasoning;

    friend bool operator==(const ReviewRequest&, const ReviewRequest&) = default;
};

std::string encode_generate_request(const GenerateRequest& req);
GenerateRequest decode_generate_request(std::string_view body);
std::string encode_generate_response(std::string_view reasoning);
std::string decode_generate_response(std::string_view body);
std::string encode_review_request(const ReviewRequest& req);
ReviewRequest decode_review_request(std::string_view body);
std::string encode_review_response(Verdict verdict);
Verdict decode_review_response(std::string_view body);

/// One model participating in synthesis: proposes, reviews and scores.
/// Failures to answer raise ClientError.
class SynthEndpoint : public rerank::ModelClient {
public:
    virtual std::string generate(const GenerateRequest& req) = 0;
    virtual Verdict review(const ReviewRequest& req) = 0;
};

/// Deterministic endpoint for tests and offline runs. Reasoning is a fixed
/// template naming the endpoint; verdicts and scores come from tables.
class ScriptedSynthEndpoint : public SynthEndpoint {
public:
    explicit ScriptedSynthEndpoint(std::string name, Verdict default_verdict = Verdict::approve);

    /// Lines (tab-separated, '#' comments):
    ///   score    <query> <doc_ref> <yes> <no>
    ///   verdict  <query> <doc_ref> approve|reject
    ///   default  approve|reject
    ///   silent   <query> <doc_ref>      (generate returns empty reasoning)
    /// "*" as query matches every query. The endpoint is named after the file stem.
    static std::unique_ptr<ScriptedSynthEndpoint> load(const std::filesystem::path& path);

    rerank::ScriptedModelClient& scores() noexcept { return scores_; }
    void set_verdict(std::string query, std::string doc_ref, Verdict v);
    void set_default_verdict(Verdict v) noexcept { default_verdict_ = v; }
    void set_silent(std::string query, std::string doc_ref);

    std::string generate(const GenerateRequest& req) override;
    Verdict review(const ReviewRequest& req) override;
    rerank::ScorePair score(const rerank::PromptBundle& bundle) override;

    const std::string& name() const noexcept { return name_; }

private:
    template <typename T>
    const T* find(const std::map<std::pair<std::string, std::string>, T, std::less<>>& table,
                  const std::string& query, const std::string& doc_ref) const;

    std::string name_;
    Verdict default_verdict_;
    rerank::ScriptedModelClient scores_;
    std::map<std::pair<std::string, std::string>, Verdict, std::less<>> verdicts_;
    std::map<std::pair<std::string, std::string>, bool, std::less<>> silent_;
};

class RemoteSynthEndpoint : public SynthEndpoint {
public:
    explicit RemoteSynthEndpoint(rerank::HttpEndpoint endpoint);
    std::string generate(const GenerateRequest& req) override;
    Verdict review(const ReviewRequest& req) override;
    rerank::ScorePair score(const rerank::PromptBundle& bundle) override;

private:
    rerank::HttpEndpoint endpoint_;
};

/// "mock:<script.tsv>" or "http://host:port[/prefix]".
std::unique_ptr<SynthEndpoint> make_synth_endpoint(std::string_view spec);

/// A (query, d+, d-) triple plus the embeddings stored on the resulting demos.
struct SynthPair {
    std::string query_text;
    std::string d_pos;
    std::string d_neg;
    std::vector<float> q_dense;
    std::vector<float> pos_dense;
    std::vector<float> neg_dense;
};

/// `query_text<TAB>d_pos<TAB>d_neg` per line; embeddings left empty.
std::vector<SynthPair> load_pairs(const std::filesystem::path& path);

enum class Stage { generation, verification, review };
const char* to_string(Stage s) noexcept;
std::optional<Stage> parse_stage(std::string_view text) noexcept;

struct PairOutcome {
    std::size_t index = 0;
    std::size_t proposer = 0;        // endpoint index, index % 3
    std::optional<Stage> rejected;   // nullopt when accepted
    std::string reason;
    double pos_score = 0.0;          // verification scores, when reached
    double neg_score = 0.0;
    std::vector<Demonstration> demos;  // (relevant, not_relevant) when accepted

    bool accepted() const noexcept { return !rejected; }
};

std::size_t proposer_for(std::size_t pair_index) noexcept;

/// Runs generation, verification and review for one pair. Rejections come
/// back in the outcome; endpoint failures throw ClientError. The pair's
/// embeddings must be non-empty and non-zero (InvalidArgument otherwise).
PairOutcome synthesize_pair(std::size_t pair_index, const SynthPair& pair,
                            std::span<SynthEndpoint* const, 3> endpoints, const SynthConfig& cfg);

struct SynthStats {
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t rejected_generation = 0;
    std::size_t rejected_verification = 0;
    std::size_t rejected_review = 0;

    std::size_t rejected() const noexcept { return rejected_generation + rejected_verification + rejected_review; }
    /// nullopt when total == 0.
    std::optional<double> acceptance_rate() const noexcept;

    friend bool operator==(const SynthStats&, const SynthStats&) = default;
};

std::string format_stats(const SynthStats& stats);

struct PoolResult {
    std::vector<Demonstration> pool;  // accepted demos in pair order
    std::vector<PairOutcome> outcomes;
    SynthStats stats;
};

/// Raised when an endpoint fails mid-run. Outcomes of the leading pairs that
/// finished were written to checkpoint_path() before throwing.
class SynthAborted : public ClientError {
public:
    SynthAborted(const std::string& what, std::filesystem::path checkpoint, std::size_t completed)
        : ClientError(what), checkpoint_(std::move(checkpoint)), completed_(completed) {}
    const std::filesystem::path& checkpoint_path() const noexcept { return checkpoint_; }
    std::size_t completed() const noexcept { return completed_; }

private:
    std::filesystem::path checkpoint_;
    std::size_t completed_;
};

struct BuildOptions {
    /// Where progress is saved when an endpoint fails; empty disables it.
    std::filesystem::path checkpoint_path;
    /// Resume from checkpoint_path when it exists.
    bool resume = false;
};

PoolResult build_demo_pool(std::span<const SynthPair> pairs, std::span<SynthEndpoint* const, 3> endpoints,
                           const SynthConfig& cfg, const BuildOptions& options = {});

}  // namespace hybridoc::demosynth
