// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Relevance scoring clients and the /score wire format.
//
// Request:  {"instruction":..., "query":..., "doc_ref":...,
//            "demos":[{"query_text":..., "doc_ref":..., "label":..., "reasoning":...}]}
// Response: {"yes": <real>, "no": <real>}

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hybridoc::rerank {

enum class Label { relevant, not_relevant };

const char* to_string(Label label) noexcept;
std::optional<Label> parse_label(std::string_view text) noexcept;

struct PromptDemo {
    std::string query_text;
    std::string doc_ref;
    Label label = Label::relevant;
    std::string reasoning;

    friend bool operator==(const PromptDemo&, const PromptDemo&) = default;
};

struct PromptBundle {
    std::string instruction;
    std::string query;
    std::string doc_ref;
    std::vector<PromptDemo> demos;  // in prompt order

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// The two opaque values fed into the yes/no softmax.
struct ScorePair {
    double yes = 0.0;
    double no = 0.0;

    friend bool operator==(const ScorePair&, const ScorePair&) = default;
};

std::string encode_score_request(const PromptBundle& bundle);
/// Throws InvalidArgument on malformed JSON or missing fields.
PromptBundle decode_score_request(std::string_view body);
std::string encode_score_response(const ScorePair& pair);
/// Throws InvalidArgument unless both fields are present and finite numbers.
ScorePair decode_score_response(std::string_view body);

/// Implementations must be safe to call from several threads at once.
class ModelClient {
public:
    virtual ~ModelClient() = default;
    /// Throws ClientError when no answer can be obtained.
    virtual ScorePair score(const PromptBundle& bundle) = 0;
};

/// Deterministic table lookup keyed on (query, doc_ref). A query of "*"
/// matches any query. Unknown pairs fall back to `fallback` when set,
/// otherwise raise ClientError.
class ScriptedModelClient : public ModelClient {
public:
    ScriptedModelClient() = default;
    explicit ScriptedModelClient(std::optional<ScorePair> fallback) : fallback_(fallback) {}
    ScriptedModelClient(ScriptedModelClient&& other) noexcept
        : table_(std::move(other.table_)), fallback_(other.fallback_), calls_(other.calls_.load()) {}

    /// `query<TAB>doc_ref<TAB>yes<TAB>no` per line; '#' lines and blank lines
    /// are skipped.
    static ScriptedModelClient load(const std::filesystem::path& path);

    void set(std::string query, std::string doc_ref, ScorePair pair);
    void set_fallback(std::optional<ScorePair> fallback) { fallback_ = fallback; }

    ScorePair score(const PromptBundle& bundle) override;
    std::size_t calls() const noexcept { return calls_.load(); }

private:
    std::map<std::pair<std::string, std::string>, ScorePair, std::less<>> table_;
    std::optional<ScorePair> fallback_;
    std::atomic<std::size_t> calls_{0};
};

struct HttpEndpoint {
    std::string base_url;  // scheme://host[:port], optional path prefix
    std::chrono::milliseconds timeout{30000};
};

/// POSTs encode_score_request to <base_url>/score.
class RemoteModelClient : public ModelClient {
public:
    explicit RemoteModelClient(HttpEndpoint endpoint);
    ScorePair score(const PromptBundle& bundle) override;

private:
    HttpEndpoint endpoint_;
};

/// POSTs `body` as JSON to base_url + route and returns the response body.
/// Throws ClientError on transport failures and non-200 statuses.
std::string http_post_json(const HttpEndpoint& endpoint, std::string_view route, const std::string& body);

/// "mock:<table.tsv>" or "http://host:port[/prefix]".
std::unique_ptr<ModelClient> make_model_client(std::string_view spec);

}  // namespace hybridoc::rerank
