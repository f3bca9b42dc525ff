// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hybridoc/dump_io.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hybridoc::eval {

/// Judgments of one query: doc_id -> relevance (0..4).
using Judgments = std::map<std::string, int, std::less<>>;

/// sum_{i=1..min(k,n)} (2^rel_i - 1) / log2(i + 1).
/// Throws InvalidArgument on k == 0 or a grade outside 0..4.
double dcg_at_k(std::span<const int> rels, std::size_t k);

/// DCG of the judged grades sorted descending.
double idcg_at_k(const Judgments& judgments, std::size_t k);

/// DCG / IDCG with unjudged docs at grade 0; nullopt when IDCG is 0.
std::optional<double> ndcg_at_k(std::span<const std::string> ranked, const Judgments& judgments, std::size_t k);

/// Fraction of grade >= 1 docs found in the top k; nullopt when there are none.
std::optional<double> recall_at_k(std::span<const std::string> ranked, const Judgments& judgments, std::size_t k);

struct WeightedNdcg {
    double value = 0.0;
    std::map<std::string, double, std::less<>> weights;  // IDCG_q / sum IDCG
};

/// IDCG-weighted mean of per-query nDCG over the evaluable queries of `run`.
/// Throws InvalidArgument when no query is evaluable.
WeightedNdcg weighted_ndcg_details(const model::Run& run, const model::Qrels& qrels, std::size_t k = 10);
double weighted_ndcg(const model::Run& run, const model::Qrels& qrels, std::size_t k = 10);

struct QueryMetrics {
    double ndcg = 0.0;
    double recall = 0.0;
    double idcg = 0.0;
    std::optional<std::string> group;
};

struct GroupMetrics {
    std::size_t queries = 0;
    double mean_ndcg = 0.0;
    double mean_recall = 0.0;
};

struct EvalOptions {
    std::size_t ndcg_k = 10;
    std::size_t recall_k = 3;
};

struct EvalReport {
    std::size_t ndcg_k = 10;
    std::size_t recall_k = 3;
    std::map<std::string, QueryMetrics, std::less<>> per_query;
    std::map<std::string, GroupMetrics, std::less<>> per_group;
    double mean_ndcg = 0.0;
    double weighted_ndcg = 0.0;
    double mean_recall = 0.0;
    std::map<std::string, std::string, std::less<>> skipped;  // query_id -> reason
};

/// Label given to queries missing from a supplied group map.
inline constexpr const char* kUngrouped = "(ungrouped)";

/// Scores every query of `run`. Queries absent from qrels or without a
/// positive judgment are listed in `skipped`. Groups are formed only when
/// `groups` is given. Throws InvalidArgument when nothing is evaluable.
EvalReport evaluate(const model::Run& run, const model::Qrels& qrels, const model::GroupMap* groups = nullptr,
                    const EvalOptions& options = {});
EvalReport evaluate(const std::filesystem::path& run_file, const std::filesystem::path& qrels_file,
                    const std::optional<std::filesystem::path>& group_file = std::nullopt,
                    const EvalOptions& options = {});

/// Pretty-printed JSON, keys sorted, reals with 6 decimals.
std::string format_report(const EvalReport& report);

/// `query_id<TAB>group<TAB>ndcg<TAB>recall<TAB>idcg` rows after a header.
std::string format_per_query(const EvalReport& report);

}  // namespace hybridoc::eval
