// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc/evalkit.hpp"

#include "hybridoc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace hybridoc::eval {

double dcg_at_k(std::span<const int> rels, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    double total = 0.0;
    const std::size_t n = std::min(k, rels.size());
    for (std::size_t i = 0; i < n; ++i) {
        const int r = rels[i];
        if (r < 0 || r > 4) throw InvalidArgument("relevance grade outside 0..4");
        total += (std::ldexp(1.0, r) - 1.0) / std::log2(static_cast<double>(i + 2));
    }
    return total;
}

double idcg_at_k(const Judgments& judgments, std::size_t k) {
    std::vector<int> grades;
    grades.reserve(judgments.size());
    for (const auto& [doc, rel] : judgments) grades.push_back(rel);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    return dcg_at_k(grades, k);
}

std::optional<double> ndcg_at_k(std::span<const std::string> ranked, const Judgments& judgments, std::size_t k) {
    const double ideal = idcg_at_k(judgments, k);
    if (ideal == 0.0) return std::nullopt;
    std::vector<int> rels;
    rels.reserve(std::min(k, ranked.size()));
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        auto it = judgments.find(ranked[i]);
        rels.push_back(it == judgments.end() ? 0 : it->second);
    }
    return dcg_at_k(rels, k) / ideal;
}

std::optional<double> recall_at_k(std::span<const std::string> ranked, const Judgments& judgments, std::size_t k) {
    if (k == 0) throw InvalidArgument("k must be >= 1");
    std::size_t relevant = 0;
    for (const auto& [doc, rel] : judgments) relevant += rel >= 1 ? 1 : 0;
    if (relevant == 0) return std::nullopt;
    std::set<std::string_view> seen;
    std::size_t found = 0;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
        if (!seen.insert(ranked[i]).second) continue;
        auto it = judgments.find(ranked[i]);
        if (it != judgments.end() && it->second >= 1) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(relevant);
}

namespace {

std::vector<std::string> ids_of(const std::vector<ScoredDoc>& docs) {
    std::vector<std::string> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.doc_id);
    return out;
}

WeightedNdcg weigh(const std::map<std::string, std::pair<double, double>, std::less<>>& ndcg_idcg) {
    if (ndcg_idcg.empty()) throw InvalidArgument("no evaluable queries");
    double total_idcg = 0.0;
    for (const auto& [qid, v] : ndcg_idcg) total_idcg += v.second;
    WeightedNdcg out;
    double gained = 0.0;
    for (const auto& [qid, v] : ndcg_idcg) {
        out.weights.emplace(qid, v.second / total_idcg);
        gained += v.second * v.first;
    }
    // Same summation order as total_idcg, so all-perfect runs give exactly 1.
    out.value = std::clamp(gained / total_idcg, 0.0, 1.0);
    return out;
}

}  // namespace

WeightedNdcg weighted_ndcg_details(const model::Run& run, const model::Qrels& qrels, std::size_t k) {
    std::map<std::string, std::pair<double, double>, std::less<>> per;
    for (const auto& [qid, docs] : run) {
        auto q = qrels.find(qid);
        if (q == qrels.end()) continue;
        const auto ndcg = ndcg_at_k(ids_of(docs), q->second, k);
        if (ndcg) per.emplace(qid, std::pair(*ndcg, idcg_at_k(q->second, k)));
    }
    return weigh(per);
}

double weighted_ndcg(const model::Run& run, const model::Qrels& qrels, std::size_t k) {
    return weighted_ndcg_details(run, qrels, k).value;
}

EvalReport evaluate(const model::Run& run, const model::Qrels& qrels, const model::GroupMap* groups,
                    const EvalOptions& options) {
    EvalReport report;
    report.ndcg_k = options.ndcg_k;
    report.recall_k = options.recall_k;
    std::map<std::string, std::pair<double, double>, std::less<>> for_weights;
    for (const auto& [qid, docs] : run) {
        auto q = qrels.find(qid);
        if (q == qrels.end()) {
            report.skipped.emplace(qid, "no judgments");
            continue;
        }
        const auto ids = ids_of(docs);
        const auto ndcg = ndcg_at_k(ids, q->second, options.ndcg_k);
        const auto recall = recall_at_k(ids, q->second, options.recall_k);
        if (!ndcg || !recall) {
            report.skipped.emplace(qid, "no positive judgments");
            continue;
        }
        QueryMetrics m;
        m.ndcg = *ndcg;
        m.recall = *recall;
        m.idcg = idcg_at_k(q->second, options.ndcg_k);
        if (groups) {
            auto g = groups->find(qid);
            m.group = g == groups->end() ? std::string(kUngrouped) : g->second;
        }
        for_weights.emplace(qid, std::pair(m.ndcg, m.idcg));
        report.per_query.emplace(qid, std::move(m));
    }
    report.weighted_ndcg = weigh(for_weights).value;

    double sum_ndcg = 0.0;
    double sum_recall = 0.0;
    for (const auto& [qid, m] : report.per_query) {
        sum_ndcg += m.ndcg;
        sum_recall += m.recall;
        if (m.group) {
            auto& g = report.per_group[*m.group];
            ++g.queries;
            g.mean_ndcg += m.ndcg;
            g.mean_recall += m.recall;
        }
    }
    const auto n = static_cast<double>(report.per_query.size());
    report.mean_ndcg = sum_ndcg / n;
    report.mean_recall = sum_recall / n;
    for (auto& [name, g] : report.per_group) {
        g.mean_ndcg /= static_cast<double>(g.queries);
        g.mean_recall /= static_cast<double>(g.queries);
    }
    return report;
}

EvalReport evaluate(const std::filesystem::path& run_file, const std::filesystem::path& qrels_file,
                    const std::optional<std::filesystem::path>& group_file, const EvalOptions& options) {
    const auto run = model::load_run(run_file);
    const auto qrels = model::load_qrels(qrels_file);
    if (group_file) {
        const auto groups = model::load_group_map(*group_file);
        return evaluate(run, qrels, &groups, options);
    }
    return evaluate(run, qrels, nullptr, options);
}

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

std::string format_report(const EvalReport& r) {
    std::string out = "{\n";
    out += "  \"ndcg_k\": " + std::to_string(r.ndcg_k) + ",\n";
    out += "  \"recall_k\": " + std::to_string(r.recall_k) + ",\n";
    out += "  \"overall\": {\n";
    out += "    \"queries\": " + std::to_string(r.per_query.size()) + ",\n";
    out += "    \"mean_ndcg\": " + fixed6(r.mean_ndcg) + ",\n";
    out += "    \"weighted_ndcg\": " + fixed6(r.weighted_ndcg) + ",\n";
    out += "    \"mean_recall\": " + fixed6(r.mean_recall) + "\n";
    out += "  },\n";

    out += "  \"per_group\": {";
    std::size_t i = 0;
    for (const auto& [name, g] : r.per_group) {
        out += i++ ? ",\n" : "\n";
        out += "    " + quoted(name) + ": {\"queries\": " + std::to_string(g.queries) +
               ", \"mean_ndcg\": " + fixed6(g.mean_ndcg) + ", \"mean_recall\": " + fixed6(g.mean_recall) + "}";
    }
    out += r.per_group.empty() ? "},\n" : "\n  },\n";

    out += "  \"per_query\": {";
    i = 0;
    for (const auto& [qid, m] : r.per_query) {
        out += i++ ? ",\n" : "\n";
        out += "    " + quoted(qid) + ": {";
        if (m.group) out += "\"group\": " + quoted(*m.group) + ", ";
        out += "\"ndcg_at_k\": " + fixed6(m.ndcg) + ", \"recall_at_k\": " + fixed6(m.recall) +
               ", \"idcg\": " + fixed6(m.idcg) + "}";
    }
    out += r.per_query.empty() ? "},\n" : "\n  },\n";

    out += "  \"skipped\": {";
    i = 0;
    for (const auto& [qid, why] : r.skipped) {
        out += i++ ? ",\n" : "\n";
        out += "    " + quoted(qid) + ": " + quoted(why);
    }
    out += r.skipped.empty() ? "}\n" : "\n  }\n";
    out += "}\n";
    return out;
}

std::string format_per_query(const EvalReport& r) {
    std::string out = "query_id\tgroup\tndcg_at_k\trecall_at_k\tidcg\n";
    for (const auto& [qid, m] : r.per_query) {
        out += qid + "\t" + m.group.value_or("-") + "\t" + fixed6(m.ndcg) + "\t" + fixed6(m.recall) + "\t" +
               fixed6(m.idcg) + "\n";
    }
    return out;
}

}  // namespace hybridoc::eval
