// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/dump_io.hpp"

#include "hybridoc/error.hpp"
#include "hybridoc/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace hybridoc {

const char* to_string(DenseKind kind) noexcept {
    return kind == DenseKind::single ? "single" : "multi";
}

std::optional<DenseKind> parse_dense_kind(std::string_view text) noexcept {
    if (text == "single") return DenseKind::single;
    if (text == "multi") return DenseKind::multi;
    return std::nullopt;
}

}  // namespace hybridoc

namespace hybridoc::model {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- validation

void validate_dense(const DenseRep& dense, std::vector<Violation>& out) {
    if (dense.vectors.empty()) {
        out.push_back({"dense.vectors", "no vectors"});
        return;
    }
    if (dense.kind == DenseKind::single && dense.vectors.size() != 1) {
        out.push_back({"dense.vectors", "single kind requires exactly one vector"});
    }
    const std::size_t dim = dense.vectors.front().size();
    for (std::size_t i = 0; i < dense.vectors.size(); ++i) {
        const auto& v = dense.vectors[i];
        const std::string at = "dense.vectors[" + std::to_string(i) + "]";
        if (v.empty()) {
            out.push_back({at, "empty vector"});
            continue;
        }
        if (v.size() != dim) out.push_back({at, "dimension mismatch"});
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (!std::isfinite(v[j])) {
                out.push_back({at + "[" + std::to_string(j) + "]", "non-finite vector component"});
            }
        }
    }
}

void validate_logits(const std::vector<TokenLogits>& chunks, std::size_t dense_count,
                     std::optional<std::size_t> cap, std::vector<Violation>& out) {
    if (chunks.size() != dense_count) {
        out.push_back({"raw_logits", "raw_logits length mismatch"});
    }
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        const std::string at = "raw_logits[" + std::to_string(c) + "]";
        if (cap && chunks[c].size() > *cap) out.push_back({at, "exceeds raw_logit_cap"});
        for (const auto& [token, value] : chunks[c]) {
            if (token.empty()) out.push_back({at, "empty token"});
            const std::string tat = at + "[" + json(token).dump() + "]";
            if (!std::isfinite(value)) {
                out.push_back({tat, "non-finite logit"});
            } else if (value <= 0.0) {
                out.push_back({tat, "non-positive logit"});
            }
        }
    }
}

// ------------------------------------------------------------------- parsing

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InvalidArgument(std::string("missing field \"") + key + "\"");
    return *it;
}

std::string require_string(const json& obj, const char* key) {
    const json& v = require(obj, key);
    if (!v.is_string()) throw InvalidArgument(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

DenseRep parse_dense(const json& node) {
    if (!node.is_object()) throw InvalidArgument("field \"dense\" must be an object");
    const json& kind = require(node, "kind");
    if (!kind.is_string()) throw InvalidArgument("dense.kind must be a string");
    auto parsed = parse_dense_kind(kind.get<std::string>());
    if (!parsed) throw InvalidArgument("dense.kind must be \"single\" or \"multi\"");
    const json& vectors = require(node, "vectors");
    if (!vectors.is_array()) throw InvalidArgument("dense.vectors must be an array");
    DenseRep rep;
    rep.kind = *parsed;
    rep.vectors.reserve(vectors.size());
    for (const json& v : vectors) {
        if (!v.is_array()) throw InvalidArgument("dense.vectors entries must be arrays");
        std::vector<float> vec;
        vec.reserve(v.size());
        for (const json& x : v) {
            if (!x.is_number()) throw InvalidArgument("dense vector components must be numbers");
            vec.push_back(static_cast<float>(x.get<double>()));
        }
        rep.vectors.push_back(std::move(vec));
    }
    return rep;
}

std::vector<TokenLogits> parse_logits(const json& node) {
    if (!node.is_array()) throw InvalidArgument("field \"raw_logits\" must be an array");
    std::vector<TokenLogits> chunks;
    chunks.reserve(node.size());
    for (const json& chunk : node) {
        if (!chunk.is_array()) throw InvalidArgument("raw_logits chunks must be arrays");
        TokenLogits logits;
        for (const json& pair : chunk) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_number()) {
                throw InvalidArgument("raw_logits entries must be [\"token\", number] pairs");
            }
            const double value = pair[1].get<double>();
            auto [it, inserted] = logits.emplace(pair[0].get<std::string>(), value);
            // two token ids may decode to the same string
            if (!inserted) it->second = std::max(it->second, value);
        }
        chunks.push_back(std::move(logits));
    }
    return chunks;
}

Metadata parse_metadata(const json& obj) {
    Metadata meta;
    auto it = obj.find("metadata");
    if (it == obj.end() || it->is_null()) return meta;
    if (!it->is_object()) throw InvalidArgument("field \"metadata\" must be an object");
    for (const auto& [key, value] : it->items()) {
        if (!value.is_string()) throw InvalidArgument("metadata values must be strings");
        meta.emplace(key, value.get<std::string>());
    }
    return meta;
}

std::optional<std::size_t> parse_cap(const json& obj) {
    auto it = obj.find("raw_logit_cap");
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_unsigned()) throw InvalidArgument("raw_logit_cap must be a non-negative integer");
    return it->get<std::size_t>();
}

json parse_object(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw InvalidArgument("record must be a JSON object");
    return obj;
}

// ------------------------------------------------------------- serializing

void append_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void append_dense(std::string& out, const DenseRep& dense) {
    out += "{\"kind\":\"";
    out += to_string(dense.kind);
    out += "\",\"vectors\":[";
    for (std::size_t i = 0; i < dense.vectors.size(); ++i) {
        if (i) out += ',';
        out += '[';
        const auto& v = dense.vectors[i];
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (j) out += ',';
            out += text::format_real(v[j]);
        }
        out += ']';
    }
    out += "]}";
}

void append_logits(std::string& out, const std::vector<TokenLogits>& chunks) {
    out += '[';
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        if (c) out += ',';
        out += '[';
        bool first = true;
        for (const auto& [token, value] : chunks[c]) {
            if (!first) out += ',';
            first = false;
            out += '[';
            append_string(out, token);
            out += ',';
            out += text::format_exact(value);
            out += ']';
        }
        out += ']';
    }
    out += ']';
}

void append_tail(std::string& out, const Metadata& meta, std::optional<std::size_t> cap) {
    if (!meta.empty()) {
        out += ",\"metadata\":{";
        bool first = true;
        for (const auto& [k, v] : meta) {
            if (!first) out += ',';
            first = false;
            append_string(out, k);
            out += ':';
            append_string(out, v);
        }
        out += '}';
    }
    if (cap) out += ",\"raw_logit_cap\":" + std::to_string(*cap);
    out += '}';
}

template <typename Record, typename Parse, typename IdOf>
std::vector<Record> load_records(const std::filesystem::path& path, Parse parse, IdOf id_of) {
    std::vector<Record> records;
    std::set<std::string, std::less<>> seen;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        Record rec;
        try {
            rec = parse(line);
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string(), number, e.what());
        }
        if (!seen.insert(id_of(rec)).second) throw DuplicateIdError(id_of(rec));
        records.push_back(std::move(rec));
    });
    return records;
}

int parse_int(std::string_view s, const std::string& path, std::size_t line, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(path, line, std::string("invalid ") + what + " \"" + std::string(s) + "\"");
    }
    return value;
}

double parse_double(std::string_view s, const std::string& path, std::size_t line) {
    std::string buf(s);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value)) {
        throw ParseError(path, line, "invalid score \"" + buf + "\"");
    }
    return value;
}

}  // namespace

ValidationResult validate_document_record(const DocumentRecord& record) {
    ValidationResult result;
    if (record.doc_id.empty()) result.violations.push_back({"doc_id", "empty id"});
    validate_dense(record.dense, result.violations);
    validate_logits(record.raw_logits, record.dense.vectors.size(), record.raw_logit_cap,
                    result.violations);
    return result;
}

ValidationResult validate_query_record(const QueryRecord& record) {
    ValidationResult result;
    if (record.query_id.empty()) result.violations.push_back({"query_id", "empty id"});
    validate_dense(record.dense, result.violations);
    validate_logits(record.raw_logits, record.dense.vectors.size(), record.raw_logit_cap,
                    result.violations);
    return result;
}

DocumentRecord parse_document(std::string_view line) {
    const json obj = parse_object(line);
    DocumentRecord rec;
    rec.doc_id = require_string(obj, "doc_id");
    rec.dense = parse_dense(require(obj, "dense"));
    rec.raw_logits = parse_logits(require(obj, "raw_logits"));
    rec.metadata = parse_metadata(obj);
    rec.raw_logit_cap = parse_cap(obj);
    return rec;
}

QueryRecord parse_query(std::string_view line) {
    const json obj = parse_object(line);
    QueryRecord rec;
    rec.query_id = require_string(obj, "query_id");
    if (auto it = obj.find("text"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw InvalidArgument("field \"text\" must be a string");
        rec.text = it->get<std::string>();
    }
    rec.dense = parse_dense(require(obj, "dense"));
    rec.raw_logits = parse_logits(require(obj, "raw_logits"));
    rec.metadata = parse_metadata(obj);
    rec.raw_logit_cap = parse_cap(obj);
    return rec;
}

std::string serialize(const DocumentRecord& record) {
    std::string out = "{\"doc_id\":";
    append_string(out, record.doc_id);
    out += ",\"dense\":";
    append_dense(out, record.dense);
    out += ",\"raw_logits\":";
    append_logits(out, record.raw_logits);
    append_tail(out, record.metadata, record.raw_logit_cap);
    return out;
}

std::string serialize(const QueryRecord& record) {
    std::string out = "{\"query_id\":";
    append_string(out, record.query_id);
    if (!record.text.empty()) {
        out += ",\"text\":";
        append_string(out, record.text);
    }
    out += ",\"dense\":";
    append_dense(out, record.dense);
    out += ",\"raw_logits\":";
    append_logits(out, record.raw_logits);
    append_tail(out, record.metadata, record.raw_logit_cap);
    return out;
}

std::vector<FileViolation> validate_dump_file(const std::filesystem::path& path, RecordKind kind,
                                              std::size_t* records) {
    std::vector<FileViolation> out;
    std::set<std::string, std::less<>> seen;
    std::size_t count = 0;
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        ++count;
        std::string id;
        ValidationResult result;
        try {
            if (kind == RecordKind::document) {
                const auto rec = parse_document(line);
                id = rec.doc_id;
                result = validate_document_record(rec);
            } else {
                const auto rec = parse_query(line);
                id = rec.query_id;
                result = validate_query_record(rec);
            }
        } catch (const InvalidArgument& e) {
            out.push_back({number, "", {"", e.what()}});
            return;
        }
        if (!id.empty() && !seen.insert(id).second) out.push_back({number, id, {"", "duplicate id"}});
        for (auto& v : result.violations) out.push_back({number, id, std::move(v)});
    });
    if (records) *records = count;
    return out;
}

std::string format_violation(const std::filesystem::path& path, const FileViolation& v) {
    std::string out = path.string() + ":" + std::to_string(v.line) + ": ";
    if (!v.id.empty()) out += "[" + v.id + "] ";
    if (!v.violation.path.empty()) out += v.violation.path + ": ";
    return out + v.violation.message;
}

std::vector<DocumentRecord> load_corpus(const std::filesystem::path& path) {
    return load_records<DocumentRecord>(
        path, [](std::string_view l) { return parse_document(l); },
        [](const DocumentRecord& r) -> const std::string& { return r.doc_id; });
}

std::vector<QueryRecord> load_queries(const std::filesystem::path& path) {
    return load_records<QueryRecord>(
        path, [](std::string_view l) { return parse_query(l); },
        [](const QueryRecord& r) -> const std::string& { return r.query_id; });
}

void write_corpus(const std::filesystem::path& path, std::span<const DocumentRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += serialize(r);
        out += '\n';
    }
    text::write_file_atomic(path, out);
}

void write_queries(const std::filesystem::path& path, std::span<const QueryRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += serialize(r);
        out += '\n';
    }
    text::write_file_atomic(path, out);
}

Qrels load_qrels(const std::filesystem::path& path) {
    Qrels qrels;
    const std::string name = path.string();
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        const auto fields = text::split(line, '\t');
        if (fields.size() != 3) throw ParseError(name, number, "expected 3 tab-separated fields");
        const int rel = parse_int(fields[2], name, number, "relevance");
        if (rel < 0 || rel > 4) throw ParseError(name, number, "relevance must be in 0..4");
        if (fields[0].empty() || fields[1].empty()) throw ParseError(name, number, "empty id");
        auto& per_query = qrels[std::string(fields[0])];
        if (!per_query.emplace(std::string(fields[1]), rel).second) {
            throw ParseError(name, number,
                             "duplicate judgment for (" + std::string(fields[0]) + ", " +
                                 std::string(fields[1]) + ")");
        }
    });
    return qrels;
}

std::string format_qrels(const Qrels& qrels) {
    std::string out;
    for (const auto& [qid, docs] : qrels) {
        for (const auto& [did, rel] : docs) {
            out += qid + '\t' + did + '\t' + std::to_string(rel) + '\n';
        }
    }
    return out;
}

Run load_run(const std::filesystem::path& path) {
    struct Row {
        std::size_t rank;
        ScoredDoc doc;
        std::size_t line;
    };
    std::map<std::string, std::vector<Row>, std::less<>> rows;
    const std::string name = path.string();
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        const auto fields = text::split(line, '\t');
        if (fields.size() != 4) throw ParseError(name, number, "expected 4 tab-separated fields");
        if (fields[0].empty() || fields[1].empty()) throw ParseError(name, number, "empty id");
        const int rank = parse_int(fields[2], name, number, "rank");
        if (rank < 1) throw ParseError(name, number, "rank must be >= 1");
        const double score = parse_double(fields[3], name, number);
        rows[std::string(fields[0])].push_back(
            {static_cast<std::size_t>(rank), {std::string(fields[1]), score}, number});
    });

    Run run;
    for (auto& [qid, list] : rows) {
        std::stable_sort(list.begin(), list.end(),
                         [](const Row& a, const Row& b) { return a.rank < b.rank; });
        std::set<std::string, std::less<>> docs;
        auto& ranked = run[qid];
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].rank != i + 1) {
                throw ParseError(name, list[i].line, "ranks for query \"" + qid + "\" are not 1..N");
            }
            if (i > 0 && list[i].doc.score > list[i - 1].doc.score) {
                throw ParseError(name, list[i].line, "scores increase with rank for query \"" + qid + "\"");
            }
            if (!docs.insert(list[i].doc.doc_id).second) {
                throw ParseError(name, list[i].line, "doc \"" + list[i].doc.doc_id + "\" ranked twice");
            }
            ranked.push_back(std::move(list[i].doc));
        }
    }
    return run;
}

std::string format_run(const Run& run) {
    std::string out;
    for (const auto& [qid, ranked] : run) {
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            out += qid;
            out += '\t';
            out += ranked[i].doc_id;
            out += '\t';
            out += std::to_string(i + 1);
            out += '\t';
            out += text::format_real(ranked[i].score);
            out += '\n';
        }
    }
    return out;
}

void write_run(const std::filesystem::path& path, const Run& run) {
    text::write_file_atomic(path, format_run(run));
}

std::vector<RunEntry> to_entries(const Run& run) {
    std::vector<RunEntry> out;
    for (const auto& [qid, ranked] : run) {
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            out.push_back({qid, ranked[i].doc_id, i + 1, ranked[i].score});
        }
    }
    return out;
}

GroupMap load_group_map(const std::filesystem::path& path) {
    GroupMap groups;
    const std::string name = path.string();
    text::for_each_line(path, [&](std::size_t number, std::string_view line) {
        if (text::trim(line).empty()) return;
        const auto fields = text::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
            throw ParseError(name, number, "expected query_id<TAB>group");
        }
        if (!groups.emplace(std::string(fields[0]), std::string(fields[1])).second) {
            throw ParseError(name, number, "query \"" + std::string(fields[0]) + "\" listed twice");
        }
    });
    return groups;
}

}  // namespace hybridoc::model
