// Copyright 2026 The hybridoc Authors
// SPDX-License-Identifier: Apache-2.0

#include "hybridoc_tools/cli.hpp"

#include "hybridoc/config.hpp"
#include "hybridoc/demosynth.hpp"
#include "hybridoc/dump_io.hpp"
#include "hybridoc/error.hpp"
#include "hybridoc/evalkit.hpp"
#include "hybridoc/fusion.hpp"
#include "hybridoc/rerank.hpp"
#include "hybridoc/snapshot.hpp"
#include "hybridoc/sparsify.hpp"
#include "hybridoc/text.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>

namespace hybridoc::cli {

namespace fs = std::filesystem;

namespace {

/// Bad flags or configuration; maps to exit status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path;
    std::map<std::string, std::string> overrides;  // key -> raw value
};

// Every config key becomes a --key flag, except those the subcommand already
// declares itself.
void add_common(CLI::App& sub, Common& common) {
    sub.add_option("--config", common.config_path,
                   std::string("config file (default: $") + config::kConfigEnvVar + ")")
        ->type_name("FILE");
    for (const auto& key : config::known_keys()) {
        if (sub.get_option_no_throw("--" + key.name)) continue;
        std::string help = key.help;
        if (!key.default_value.empty()) help += " [" + key.default_value + "]";
        sub.add_option_function<std::string>(
               "--" + key.name, [&common, name = key.name](const std::string& v) { common.overrides[name] = v; },
               help)
            ->type_name("VALUE");
    }
}

config::EngineConfig resolve_config(const Common& common) {
    std::optional<fs::path> path;
    if (!common.config_path.empty()) path = common.config_path;
    auto cfg = config::load(path);
    for (const auto& [key, value] : common.overrides) {
        try {
            cfg.set(key, value);
        } catch (const InvalidArgument& e) {
            throw UsageError(std::string("--") + key + ": " + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

fs::path required_path(const std::string& flag_value, const std::optional<fs::path>& from_config,
                       const char* what) {
    if (!flag_value.empty()) return flag_value;
    if (from_config) return *from_config;
    throw UsageError(std::string("missing ") + what);
}

sparsify::Resources load_resources(const config::EngineConfig& cfg) {
    sparsify::Resources res;
    if (cfg.lemma_map) res.lemmas = sparsify::LemmaMap::load(*cfg.lemma_map);
    if (cfg.stopwords) res.stopwords = sparsify::StopwordSet::load(*cfg.stopwords);
    return res;
}

/// Prints every violation and fails with a data error if there are any.
void require_valid(const fs::path& path, model::RecordKind kind, std::ostream& err) {
    const auto violations = model::validate_dump_file(path, kind);
    if (violations.empty()) return;
    for (const auto& v : violations) err << model::format_violation(path, v) << "\n";
    throw Error(std::to_string(violations.size()) + " violations in " + path.string());
}

std::vector<float> single_vector(const DenseRep& rep) {
    if (rep.kind == DenseKind::single && rep.count() == 1) return rep.vectors.front();
    return index::mean_pool(rep);
}

// ------------------------------------------------------------- subcommands

struct ValidateArgs {
    std::vector<std::string> corpora;
    std::vector<std::string> queries;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
    if (a.corpora.empty() && a.queries.empty()) throw UsageError("give --corpus and/or --queries");
    std::size_t total = 0;
    std::size_t records = 0;
    const auto check = [&](const std::string& path, model::RecordKind kind) {
        std::size_t n = 0;
        const auto violations = model::validate_dump_file(path, kind, &n);
        records += n;
        total += violations.size();
        for (const auto& v : violations) out << model::format_violation(path, v) << "\n";
    };
    for (const auto& p : a.corpora) check(p, model::RecordKind::document);
    for (const auto& p : a.queries) check(p, model::RecordKind::query);
    out << records << " records, " << total << " violations\n";
    return total == 0 ? kExitOk : kExitDataError;
}

struct IndexArgs {
    std::string corpus;
    std::string out;
};

int cmd_index(const IndexArgs& a, const config::EngineConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto target = required_path(a.out, cfg.index, "--out (or index in the config)");
    require_valid(a.corpus, model::RecordKind::document, err);
    const auto corpus = model::load_corpus(a.corpus);
    const auto snap = index::build_snapshot(corpus, load_resources(cfg), cfg.sparsify());
    index::save_snapshot(target, snap);
    out << "indexed " << snap.sparse.size() << " documents, " << snap.sparse.postings().size() << " lemmas, "
        << hybridoc::to_string(snap.dense.kind()) << " dense dim " << snap.dense.dim() << " -> " << target.string()
        << "\n";
    return kExitOk;
}

struct SearchArgs {
    std::string queries;
    std::string index;
    std::string out;
};

struct PreparedQuery {
    const QueryRecord* record;
    SparseVec sparse;
};

std::vector<PreparedQuery> prepare_queries(const std::vector<QueryRecord>& queries, const config::EngineConfig& cfg) {
    const auto res = load_resources(cfg);
    std::vector<PreparedQuery> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back({&q, sparsify::sparsify_record(q.raw_logits, res, cfg.sparsify())});
    return out;
}

model::Run search_all(const std::vector<PreparedQuery>& queries, const index::IndexSnapshot& snap,
                      const fusion::FusionConfig& fcfg) {
    model::Run run;
    for (const auto& q : queries) {
        const auto hits = fusion::retrieve_hybrid(q.record->dense, q.sparse, snap.sparse, snap.dense, fcfg);
        run[q.record->query_id] = fusion::to_scored(hits);
    }
    return run;
}

int cmd_search(const SearchArgs& a, const config::EngineConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto index_path = required_path(a.index, cfg.index, "--index (or index in the config)");
    require_valid(a.queries, model::RecordKind::query, err);
    const auto queries = model::load_queries(a.queries);
    const auto snap = index::load_snapshot(index_path);
    const auto run = search_all(prepare_queries(queries, cfg), snap, cfg.fusion());
    model::write_run(a.out, run);
    out << "searched " << queries.size() << " queries, m=" << cfg.m << ", lambda=" << text::format_real(cfg.lambda)
        << " -> " << a.out << "\n";
    return kExitOk;
}

struct RerankArgs {
    std::string run;
    std::string queries;
    std::string out;
    std::string index;
};

int cmd_rerank(const RerankArgs& a, const config::EngineConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.client) throw UsageError("missing --client (or client in the config)");
    auto client = rerank::make_model_client(*cfg.client);
    require_valid(a.queries, model::RecordKind::query, err);
    const auto queries = model::load_queries(a.queries);
    std::map<std::string, const QueryRecord*, std::less<>> by_id;
    for (const auto& q : queries) by_id.emplace(q.query_id, &q);

    std::vector<rerank::Demonstration> pool;
    if (cfg.demo_pool) pool = rerank::load_demo_pool(*cfg.demo_pool);

    std::optional<index::IndexSnapshot> snap;
    if (cfg.selection_strategy == rerank::SelectionStrategy::Kind::similar && !pool.empty()) {
        snap = index::load_snapshot(required_path(a.index, cfg.index, "--index for the similar strategy"));
    }

    rerank::RerankOptions opts;
    opts.strategy = cfg.strategy();
    opts.instruction = cfg.instruction;
    opts.parallelism = cfg.parallelism;

    const auto input = model::load_run(a.run);
    model::Run output;
    for (const auto& [qid, docs] : input) {
        auto it = by_id.find(qid);
        if (it == by_id.end()) throw NotFound("query \"" + qid + "\" of the run is not in " + a.queries);
        std::vector<std::string> candidates;
        for (const auto& d : docs) candidates.push_back(d.doc_id);
        const auto ranked =
            rerank::rerank_candidates(*it->second, candidates, *client, pool, opts, snap ? &snap->dense : nullptr);
        auto& list = output[qid];
        for (const auto& r : ranked) list.push_back({r.doc_id, r.score});
    }
    model::write_run(a.out, output);
    out << "reranked " << output.size() << " queries with " << pool.size() << " demos ("
        << rerank::to_string(cfg.selection_strategy) << ", k=" << cfg.demo_k << ") -> " << a.out << "\n";
    return kExitOk;
}

struct SynthArgs {
    std::string pairs;
    std::string queries;
    std::string index;
    std::string out;
    std::string stats;
    std::string checkpoint;
    bool resume = false;
};

int cmd_synth(const SynthArgs& a, const config::EngineConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.synth_endpoints.size() != 3) throw UsageError("missing --synth.endpoints (three endpoints)");
    std::vector<std::unique_ptr<demosynth::SynthEndpoint>> owned;
    for (const auto& spec : cfg.synth_endpoints) owned.push_back(demosynth::make_synth_endpoint(spec));
    std::array<demosynth::SynthEndpoint*, 3> endpoints{owned[0].get(), owned[1].get(), owned[2].get()};

    auto pairs = demosynth::load_pairs(a.pairs);
    require_valid(a.queries, model::RecordKind::query, err);
    const auto queries = model::load_queries(a.queries);
    std::map<std::string, const QueryRecord*, std::less<>> by_text;
    for (const auto& q : queries) {
        if (!q.text.empty()) by_text.emplace(q.text, &q);
    }
    const auto snap = index::load_snapshot(required_path(a.index, cfg.index, "--index (or index in the config)"));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto& p = pairs[i];
        auto q = by_text.find(p.query_text);
        if (q == by_text.end()) {
            throw ParseError(a.pairs, i + 1, "no query in " + a.queries + " has text \"" + p.query_text + "\"");
        }
        p.q_dense = single_vector(q->second->dense);
        p.pos_dense = single_vector(snap.dense.get(p.d_pos));
        p.neg_dense = single_vector(snap.dense.get(p.d_neg));
    }

    demosynth::BuildOptions opts;
    opts.checkpoint_path = a.checkpoint.empty() ? fs::path(a.out + ".checkpoint") : fs::path(a.checkpoint);
    opts.resume = a.resume;
    const auto result = demosynth::build_demo_pool(pairs, endpoints, cfg.synth(), opts);
    rerank::write_demo_pool(a.out, result.pool);
    const auto stats_text = demosynth::format_stats(result.stats);
    if (!a.stats.empty()) text::write_file_atomic(a.stats, stats_text);
    out << "accepted " << result.stats.accepted << " of " << result.stats.total << " pairs, " << result.pool.size()
        << " demos -> " << a.out << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string run;
    std::string qrels;
    std::string groups;
    std::string out;
    std::string per_query;
};

int cmd_eval(const EvalArgs& a, const config::EngineConfig& cfg, std::ostream& out, std::ostream& err) {
    std::optional<fs::path> groups;
    if (!a.groups.empty()) groups = a.groups;
    const auto run = model::load_run(a.run);
    const auto qrels = model::load_qrels(a.qrels);
    std::optional<model::GroupMap> group_map;
    if (groups) group_map = model::load_group_map(*groups);
    const auto report = eval::evaluate(run, qrels, group_map ? &*group_map : nullptr, cfg.eval());
    for (const auto& [qid, why] : report.skipped) err << "warning: skipped query " << qid << ": " << why << "\n";
    const auto text_report = eval::format_report(report);
    if (a.out.empty()) {
        out << text_report;
    } else {
        text::write_file_atomic(a.out, text_report);
        out << "mean nDCG@" << report.ndcg_k << " " << text::format_real(report.mean_ndcg) << ", weighted "
            << text::format_real(report.weighted_ndcg) << " -> " << a.out << "\n";
    }
    if (!a.per_query.empty()) text::write_file_atomic(a.per_query, eval::format_per_query(report));
    return kExitOk;
}

struct SweepArgs {
    std::string grid;
    std::string queries;
    std::string index;
    std::string out_dir;
    std::string qrels;
    std::string groups;
};

int cmd_sweep(const SweepArgs& a, const config::EngineConfig& cfg, std::ostream& out, std::ostream& err) {
    std::vector<double> grid;
    try {
        grid = parse_grid(a.grid);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto index_path = required_path(a.index, cfg.index, "--index (or index in the config)");
    require_valid(a.queries, model::RecordKind::query, err);
    const auto queries = model::load_queries(a.queries);
    const auto snap = index::load_snapshot(index_path);
    const auto prepared = prepare_queries(queries, cfg);
    std::optional<model::Qrels> qrels;
    if (!a.qrels.empty()) qrels = model::load_qrels(a.qrels);
    std::optional<model::GroupMap> groups;
    if (!a.groups.empty()) groups = model::load_group_map(a.groups);

    fs::create_directories(a.out_dir);
    std::string table = "lambda\trun";
    if (qrels) table += "\tmean_ndcg\tweighted_ndcg\tmean_recall";
    table += "\n";
    for (double lambda : grid) {
        auto fcfg = cfg.fusion();
        fcfg.lambda = lambda;
        const auto run = search_all(prepared, snap, fcfg);
        const auto name = sweep_run_name(lambda);
        model::write_run(fs::path(a.out_dir) / name, run);
        table += text::format_real(lambda) + "\t" + name;
        if (qrels) {
            const auto r = eval::evaluate(run, *qrels, groups ? &*groups : nullptr, cfg.eval());
            char buf[128];
            std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f", r.mean_ndcg, r.weighted_ndcg, r.mean_recall);
            table += buf;
        }
        table += "\n";
    }
    text::write_file_atomic(fs::path(a.out_dir) / "sweep.tsv", table);
    out << table;
    return kExitOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
    const auto parts = text::split(spec, ':');
    if (parts.size() != 3) throw InvalidArgument("grid must look like a:b:step");
    double v[3];
    for (int i = 0; i < 3; ++i) {
        try {
            std::size_t used = 0;
            const std::string s(parts[i]);
            v[i] = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v[i])) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw InvalidArgument("bad grid value \"" + std::string(parts[i]) + "\"");
        }
    }
    const double a = v[0], b = v[1], step = v[2];
    if (a < 0.0 || b > 1.0 || a > b) throw InvalidArgument("grid must satisfy 0 <= a <= b <= 1");
    if (!(step > 0.0)) throw InvalidArgument("grid step must be > 0");
    const double span = (b - a) / step;
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9));
    std::vector<double> out;
    for (std::size_t i = 0; i <= n; ++i) {
        double x = a + static_cast<double>(i) * step;
        x = std::round(x * 1e12) / 1e12;  // 0.1 * 3 -> 0.3
        out.push_back(std::min(x, 1.0));
    }
    return out;
}

std::string sweep_run_name(double lambda) { return "run_lambda_" + text::format_real(lambda) + ".tsv"; }

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hybridoc: hybrid sparse-dense retrieval, ICL reranking and evaluation", "hybridoc"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    Common common;
    int status = kExitOk;
    std::function<int()> action;

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "check corpus and query dumps");
    validate->add_option("--corpus", va.corpora, "corpus dump (repeatable)")->type_name("FILE");
    validate->add_option("--queries", va.queries, "query dump (repeatable)")->type_name("FILE");
    add_common(*validate, common);
    validate->callback([&] { action = [&] { resolve_config(common); return cmd_validate(va, out); }; });

    IndexArgs ia;
    auto* index_cmd = app.add_subcommand("index", "sparsify a corpus and write an index snapshot");
    index_cmd->add_option("--corpus", ia.corpus, "corpus dump")->required()->type_name("FILE");
    index_cmd->add_option("--out", ia.out, "snapshot path (default: index from the config)")->type_name("FILE");
    add_common(*index_cmd, common);
    index_cmd->callback([&] { action = [&] { return cmd_index(ia, resolve_config(common), out, err); }; });

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "hybrid first-stage retrieval into a run file");
    search->add_option("--queries", sa.queries, "query dump")->required()->type_name("FILE");
    search->add_option("--index", sa.index, "snapshot (default: index from the config)")->type_name("FILE");
    search->add_option("--out", sa.out, "run file to write")->required()->type_name("FILE");
    add_common(*search, common);
    search->callback([&] { action = [&] { return cmd_search(sa, resolve_config(common), out, err); }; });

    RerankArgs ra;
    auto* rerank_cmd = app.add_subcommand("rerank", "pointwise reranking of a run file");
    rerank_cmd->add_option("--run", ra.run, "input run file")->required()->type_name("FILE");
    rerank_cmd->add_option("--queries", ra.queries, "query dump (supplies text and embeddings)")
        ->required()
        ->type_name("FILE");
    rerank_cmd->add_option("--out", ra.out, "reranked run file")->required()->type_name("FILE");
    rerank_cmd->add_option("--index", ra.index, "snapshot for document embeddings (similar strategy)")
        ->type_name("FILE");
    add_common(*rerank_cmd, common);
    rerank_cmd->callback([&] { action = [&] { return cmd_rerank(ra, resolve_config(common), out, err); }; });

    SynthArgs ya;
    auto* synth = app.add_subcommand("synth-demos", "synthesize a verified demonstration pool");
    synth->add_option("--pairs", ya.pairs, "query_text<TAB>d_pos<TAB>d_neg file")->required()->type_name("FILE");
    synth->add_option("--queries", ya.queries, "query dump (query embeddings, matched by text)")
        ->required()
        ->type_name("FILE");
    synth->add_option("--index", ya.index, "snapshot (document embeddings)")->type_name("FILE");
    synth->add_option("--out", ya.out, "demonstration pool to write")->required()->type_name("FILE");
    synth->add_option("--stats", ya.stats, "stats report to write")->type_name("FILE");
    synth->add_option("--checkpoint", ya.checkpoint, "progress file (default: <out>.checkpoint)")->type_name("FILE");
    synth->add_flag("--resume", ya.resume, "continue from the checkpoint");
    add_common(*synth, common);
    synth->callback([&] { action = [&] { return cmd_synth(ya, resolve_config(common), out, err); }; });

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("eval", "nDCG, weighted nDCG and recall of a run");
    eval_cmd->add_option("--run", ea.run, "run file")->required()->type_name("FILE");
    eval_cmd->add_option("--qrels", ea.qrels, "judgments")->required()->type_name("FILE");
    eval_cmd->add_option("--groups", ea.groups, "query_id<TAB>group file")->type_name("FILE");
    eval_cmd->add_option("--out", ea.out, "report path (default: stdout)")->type_name("FILE");
    eval_cmd->add_option("--per-query", ea.per_query, "per-query TSV path")->type_name("FILE");
    add_common(*eval_cmd, common);
    eval_cmd->callback([&] { action = [&] { return cmd_eval(ea, resolve_config(common), out, err); }; });

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep-lambda", "one run (and metric row) per lambda grid value");
    sweep->add_option("grid", wa.grid, "a:b:step, e.g. 0:1:0.25")->required();
    sweep->add_option("--queries", wa.queries, "query dump")->required()->type_name("FILE");
    sweep->add_option("--index", wa.index, "snapshot (default: index from the config)")->type_name("FILE");
    sweep->add_option("--out-dir", wa.out_dir, "directory for run files and sweep.tsv")->required()->type_name("DIR");
    sweep->add_option("--qrels", wa.qrels, "judgments for metric rows")->type_name("FILE");
    sweep->add_option("--groups", wa.groups, "query_id<TAB>group file")->type_name("FILE");
    add_common(*sweep, common);
    sweep->callback([&] { action = [&] { return cmd_sweep(wa, resolve_config(common), out, err); }; });

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("hybridoc");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        status = action ? action() : kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return status;
}

}  // namespace hybridoc::cli
