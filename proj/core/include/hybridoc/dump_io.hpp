// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Embedding dumps (JSON lines), judgment files and run files.
//
// Corpus line:
//   {"doc_id":"p1","dense":{"kind":"single","vectors":[[0.1,0.2]]},
//    "raw_logits":[[["run",3.0],["page",1.5]]],"metadata":{...}}
// Query lines use "query_id" and may carry "text". Records may also carry
// "raw_logit_cap", the export cap the producer applied per chunk.

#include "hybridoc/types.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hybridoc::model {

struct Violation {
    std::string path;     // field path, e.g. "dense.vectors[1][3]"
    std::string message;  // e.g. "non-finite vector component"
};

struct ValidationResult {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

ValidationResult validate_document_record(const DocumentRecord& record);
ValidationResult validate_query_record(const QueryRecord& record);

// Single-line codec. parse_* throw InvalidArgument with a message naming the
// offending field; load_* wrap that into ParseError with the line number.
DocumentRecord parse_document(std::string_view line);
QueryRecord parse_query(std::string_view line);
std::string serialize(const DocumentRecord& record);
std::string serialize(const QueryRecord& record);

enum class RecordKind { document, query };

struct FileViolation {
    std::size_t line = 0;  // 1-based
    std::string id;        // record id when it could be read
    Violation violation;
};

/// Parses and validates every line of a dump. Malformed lines and repeated
/// ids are reported as violations rather than thrown; only an unreadable
/// file throws.
std::vector<FileViolation> validate_dump_file(const std::filesystem::path& path, RecordKind kind,
                                              std::size_t* records = nullptr);

/// "path:line: [id] field: message"
std::string format_violation(const std::filesystem::path& path, const FileViolation& v);

/// Blank lines are skipped. A repeated doc_id aborts with DuplicateIdError.
std::vector<DocumentRecord> load_corpus(const std::filesystem::path& path);
std::vector<QueryRecord> load_queries(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, std::span<const DocumentRecord> records);
void write_queries(const std::filesystem::path& path, std::span<const QueryRecord> records);

/// query_id -> doc_id -> relevance (0..4).
using Qrels = std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>>;

/// `query_id<TAB>doc_id<TAB>relevance`. Duplicate pairs and grades outside
/// 0..4 are parse errors.
Qrels load_qrels(const std::filesystem::path& path);
std::string format_qrels(const Qrels& qrels);

/// query_id -> ranked list (index 0 is rank 1).
using Run = std::map<std::string, std::vector<ScoredDoc>, std::less<>>;

/// `query_id<TAB>doc_id<TAB>rank<TAB>score`. Per query the ranks must be
/// 1..N without gaps and scores non-increasing with rank.
Run load_run(const std::filesystem::path& path);
std::string format_run(const Run& run);
void write_run(const std::filesystem::path& path, const Run& run);
std::vector<RunEntry> to_entries(const Run& run);

/// `query_id<TAB>group`.
using GroupMap = std::map<std::string, std::string, std::less<>>;
GroupMap load_group_map(const std::filesystem::path& path);

}  // namespace hybridoc::model
