// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/model_client.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <cmath>

namespace hybridoc::rerank {

using nlohmann::json;

const char* to_string(Label label) noexcept {
    return label == Label::relevant ? "relevant" : "not_relevant";
}

std::optional<Label> parse_label(std::string_view text) noexcept {
    if (text == "relevant") return Label::relevant;
    if (text == "not_relevant") return Label::not_relevant;
    return std::nullopt;
}

namespace {

json parse_json_object(std::string_view body) {
    json j = json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument("expected a JSON object");
    return j;
}

std::string string_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw InvalidArgument(std::string("missing string field \"") + key + "\"");
    return it->get<std::string>();
}

double number_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number()) throw InvalidArgument(std::string("missing numeric field \"") + key + "\"");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw InvalidArgument(std::string("non-finite \"") + key + "\"");
    return v;
}

}  // namespace

std::string encode_score_request(const PromptBundle& bundle) {
    json demos = json::array();
    for (const auto& d : bundle.demos) {
        json item = json::object();
        item["query_text"] = d.query_text;
        item["doc_ref"] = d.doc_ref;
        item["label"] = to_string(d.label);
        item["reasoning"] = d.reasoning;
        demos.push_back(std::move(item));
    }
    json j = json::object();
    j["instruction"] = bundle.instruction;
    j["query"] = bundle.query;
    j["doc_ref"] = bundle.doc_ref;
    j["demos"] = std::move(demos);
    return j.dump();
}

PromptBundle decode_score_request(std::string_view body) {
    const json j = parse_json_object(body);
    PromptBundle b;
    b.instruction = string_field(j, "instruction");
    b.query = string_field(j, "query");
    b.doc_ref = string_field(j, "doc_ref");
    auto it = j.find("demos");
    if (it == j.end() || !it->is_array()) throw InvalidArgument("missing array field \"demos\"");
    for (const auto& item : *it) {
        if (!item.is_object()) throw InvalidArgument("demo entries must be objects");
        PromptDemo d;
        d.query_text = string_field(item, "query_text");
        d.doc_ref = string_field(item, "doc_ref");
        const auto label = parse_label(string_field(item, "label"));
        if (!label) throw InvalidArgument("label must be \"relevant\" or \"not_relevant\"");
        d.label = *label;
        d.reasoning = string_field(item, "reasoning");
        b.demos.push_back(std::move(d));
    }
    return b;
}

std::string encode_score_response(const ScorePair& pair) {
    json j = json::object();
    j["yes"] = pair.yes;
    j["no"] = pair.no;
    return j.dump();
}

ScorePair decode_score_response(std::string_view body) {
    const json j = parse_json_object(body);
    return {number_field(j, "yes"), number_field(j, "no")};
}

// ------------------------------------------------------------------ scripted

ScriptedModelClient ScriptedModelClient::load(const std::filesystem::path& path) {
    ScriptedModelClient client;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty() || line.front() == '#') return;
        const auto f = text::split(line, '\t');
        if (f.size() != 4) throw ParseError(path.string(), number, "expected query<TAB>doc_ref<TAB>yes<TAB>no");
        double v[2];
        for (int i = 0; i < 2; ++i) {
            const auto s = f[2 + i];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v[i]);
            if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v[i])) {
                throw ParseError(path.string(), number, "bad score value \"" + std::string(s) + "\"");
            }
        }
        client.set(std::string(f[0]), std::string(f[1]), {v[0], v[1]});
    });
    return client;
}

void ScriptedModelClient::set(std::string query, std::string doc_ref, ScorePair pair) {
    table_.insert_or_assign({std::move(query), std::move(doc_ref)}, pair);
}

ScorePair ScriptedModelClient::score(const PromptBundle& bundle) {
    calls_.fetch_add(1);
    auto it = table_.find(std::pair<std::string, std::string>(bundle.query, bundle.doc_ref));
    if (it != table_.end()) return it->second;
    it = table_.find(std::pair<std::string, std::string>("*", bundle.doc_ref));
    if (it != table_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw ClientError("no scripted score for doc_ref \"" + bundle.doc_ref + "\"");
}

// -------------------------------------------------------------------- remote

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing '/'
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw InvalidArgument("endpoint must be an http:// URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) out.prefix = url.substr(path_start);
    while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    return out;
}

}  // namespace

std::string http_post_json(const HttpEndpoint& endpoint, std::string_view route, const std::string& body) {
    const auto url = split_url(endpoint.base_url);
    httplib::Client cli(url.origin);
    if (!cli.is_valid()) throw ClientError("cannot use endpoint " + endpoint.base_url);
    cli.set_connection_timeout(endpoint.timeout);
    cli.set_read_timeout(endpoint.timeout);
    cli.set_write_timeout(endpoint.timeout);
    const std::string path = url.prefix + std::string(route);
    auto res = cli.Post(path, body, "application/json");
    if (!res) {
        throw ClientError("POST " + endpoint.base_url + std::string(route) + " failed: " +
                          httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ClientError("POST " + endpoint.base_url + std::string(route) + " returned HTTP " +
                          std::to_string(res->status));
    }
    return res->body;
}

RemoteModelClient::RemoteModelClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    split_url(endpoint_.base_url);
}

ScorePair RemoteModelClient::score(const PromptBundle& bundle) {
    const auto body = http_post_json(endpoint_, "/score", encode_score_request(bundle));
    try {
        return decode_score_response(body);
    } catch (const InvalidArgument& e) {
        throw ClientError(std::string("bad /score response: ") + e.what());
    }
}

std::unique_ptr<ModelClient> make_model_client(std::string_view spec) {
    if (spec.substr(0, 5) == "mock:") {
        return std::make_unique<ScriptedModelClient>(ScriptedModelClient::load(std::string(spec.substr(5))));
    }
    if (spec.substr(0, 7) == "http://") {
        return std::make_unique<RemoteModelClient>(HttpEndpoint{std::string(spec), std::chrono::milliseconds(30000)});
    }
    throw InvalidArgument("unknown client spec \"" + std::string(spec) + "\" (use mock:FILE or http://host:port)");
}

}  // namespace hybridoc::rerank
