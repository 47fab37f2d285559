#include "tqn/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <map>
#include <optional>

#include "tqn/binary_io.hpp"
#include "tqn/config.hpp"
#include "tqn/data.hpp"
#include "tqn/hashing.hpp"
#include "tqn/model.hpp"
#include "tqn/params.hpp"
#include "tqn/pipeline.hpp"

namespace tqn::cli {

namespace {

std::optional<std::uint64_t> seed_from_env() {
    const char* v = std::getenv("TQN_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    return parse_u64(v, "TQN_SEED");
}

std::string format_2dp(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct GenDataArgs {
    std::uint32_t classes = 0, dim = 0, per_class = 0;
    double spread = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
};

int cmd_gen_data(const GenDataArgs& a, std::ostream& out) {
    std::uint64_t seed = a.seed;
    if (auto env = seed_from_env()) seed = *env;
    LabeledDataset d;
    try {
        d = gen_clusters(a.classes, a.dim, a.per_class, a.spread, seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const DataFormat fmt = a.format.empty() ? format_for_path(a.out) : parse_data_format(a.format);
    save_dataset(d, a.out, fmt);
    out << "items=" << d.size() << '\n';
    return kExitOk;
}

struct ParamsArgs {
    std::uint32_t bits = 0, classes = 0;
    double delta = 0.0, omega = 0.0, eps = 0.0;
    std::string mode = "eq16";
};

int cmd_params(const ParamsArgs& a, std::ostream& out) {
    DerivedParams d;
    try {
        HashParams hp{a.bits, a.classes, a.delta, a.omega, a.eps, parse_alpha_d_mode(a.mode)};
        d = derive(hp);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    out << "M=" << d.min_bits << '\n'
        << "alpha_s=" << format_exact(d.alpha_s) << '\n'
        << "alpha_d=" << format_2dp(d.alpha_d) << '\n'
        << "alpha_d_exact=" << format_exact(d.alpha_d) << '\n'
        << "delta=" << format_exact(d.delta) << '\n';
    return kExitOk;
}

LabeledDataset load_any(const std::string& path, std::optional<DataFormat> fmt) {
    return load_dataset(path, fmt ? *fmt : format_for_path(path));
}

int cmd_train(const std::string& config_path, const std::map<std::string, std::string>& overrides,
              std::ostream& out) {
    RunSettings s;
    if (!config_path.empty()) load_config_file(s, config_path);
    for (const auto& key : config_keys()) {
        auto it = overrides.find(std::string(key.flag));
        if (it != overrides.end()) apply_setting(s, key.key, it->second, std::string(key.flag));
    }
    if (auto env = seed_from_env()) s.train.seed = *env;
    if (s.data_path.empty()) throw ConfigError("no dataset given (set data.path or --data)");
    if (!(s.holdout > 0.0 && s.holdout < 1.0)) throw ConfigError("data.holdout must lie in (0,1)");
    try {
        s.train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const LabeledDataset data = load_any(s.data_path, s.data_format);
    try {
        HashParams hp = s.train.hash;
        if (hp.classes == 0) hp.classes = data.num_classes;
        derive(hp);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const Split split = split_holdout(data, s.holdout);

    TwoStageTrainer trainer(split.database, s.train);
    trainer.run_triplet_stage();
    trainer.run_quantization_stage();

    RunReport report = trainer.report();
    report.eval = evaluate(trainer.model(), split.database, split.queries, s.metric);

    save_model(trainer.model(), s.checkpoint);
    write_curve_csv(report, s.curves);
    write_report(report, s.report);
    out << "metric=" << report.eval->metric << '\n'
        << "rf=" << format_exact(report.eval->rf) << '\n'
        << "bc=" << format_exact(report.eval->bc) << '\n'
        << "drop_rel=" << format_exact(report.eval->drop_rel) << '\n';
    return kExitOk;
}

struct EvalArgs {
    std::string checkpoint;
    std::string data, db, queries;
    double holdout = 1.0 / 6.0;
    std::string metric = "map";
    std::size_t k = 20;
    std::string codes_out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    MetricSpec metric;
    if (a.metric == "topk") metric.kind = MetricKind::TopK;
    else if (a.metric != "map") throw ConfigError("--metric must be map or topk");
    metric.k = a.k;
    const bool split_mode = !a.data.empty();
    if (split_mode == (!a.db.empty() || !a.queries.empty()) || (!split_mode && (a.db.empty() || a.queries.empty()))) {
        throw ConfigError("give either --data, or both --db and --queries");
    }

    const EmbeddingModel model = load_model(a.checkpoint);
    LabeledDataset db, queries;
    if (split_mode) {
        Split s = split_holdout(load_any(a.data, std::nullopt), a.holdout);
        db = std::move(s.database);
        queries = std::move(s.queries);
    } else {
        db = load_any(a.db, std::nullopt);
        queries = load_any(a.queries, std::nullopt);
    }
    if (db.dim() != model.input_dim() || queries.dim() != model.input_dim()) {
        throw std::runtime_error("dataset dimension does not match the checkpoint input size " +
                                 std::to_string(model.input_dim()));
    }

    EvalReport r;
    try {
        r = evaluate(model, db, queries, metric);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("metric undefined: ") + e.what());
    }
    if (!a.codes_out.empty()) save_codes(quantize(embed(model, db.features)), a.codes_out);
    out << "metric=" << r.metric << '\n'
        << "rf=" << format_exact(r.rf) << '\n'
        << "bc=" << format_exact(r.bc) << '\n'
        << "drop_rel=" << format_exact(r.drop_rel) << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Triplet quantization hashing toolkit", "tqn"};
    app.require_subcommand(1);

    GenDataArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic Gaussian-cluster dataset");
    gen_cmd->add_option("--classes", gen.classes)->required();
    gen_cmd->add_option("--dim", gen.dim)->required();
    gen_cmd->add_option("--per-class", gen.per_class)->required();
    gen_cmd->add_option("--spread", gen.spread)->required();
    gen_cmd->add_option("--seed", gen.seed)->required();
    gen_cmd->add_option("--out", gen.out)->required();
    gen_cmd->add_option("--format", gen.format, "csv | tqnf (default: by extension)");

    ParamsArgs par;
    auto* params_cmd = app.add_subcommand("params", "Derive M, alpha_s, alpha_d and delta");
    params_cmd->add_option("--bits", par.bits, "code length N")->required();
    params_cmd->add_option("--classes", par.classes, "class count C")->required();
    params_cmd->add_option("--delta", par.delta, "threshold margin Delta")->required();
    params_cmd->add_option("--omega", par.omega, "slack bits omega")->required();
    params_cmd->add_option("--eps", par.eps, "residual margin epsilon")->required();
    params_cmd->add_option("--mode", par.mode, "eq16 | cifar-table | inshop-table");

    std::string config_path;
    std::map<std::string, std::string> overrides;
    auto* train_cmd = app.add_subcommand("train", "Two-stage training with evaluation on a held-out split");
    train_cmd->add_option("--config", config_path, "key=value configuration file");
    std::vector<std::string> flag_values(config_keys().size());
    for (std::size_t i = 0; i < config_keys().size(); ++i) {
        const auto& k = config_keys()[i];
        train_cmd->add_option(std::string(k.flag), flag_values[i], std::string(k.help));
    }

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Compare real-valued and binary-code retrieval");
    eval_cmd->add_option("--checkpoint", ev.checkpoint)->required();
    eval_cmd->add_option("--data", ev.data, "dataset split into database and queries");
    eval_cmd->add_option("--holdout", ev.holdout, "per-class query fraction with --data");
    eval_cmd->add_option("--db", ev.db, "database dataset");
    eval_cmd->add_option("--queries", ev.queries, "query dataset");
    eval_cmd->add_option("--metric", ev.metric, "map | topk");
    eval_cmd->add_option("--k", ev.k, "cutoff for topk");
    eval_cmd->add_option("--codes-out", ev.codes_out, "write database codes (TQNC)");

    std::vector<std::string> argv_storage{"tqn"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen_data(gen, out);
        if (params_cmd->parsed()) return cmd_params(par, out);
        if (train_cmd->parsed()) {
            for (std::size_t i = 0; i < config_keys().size(); ++i) {
                const auto flag = std::string(config_keys()[i].flag);
                if (train_cmd->count(flag) > 0) overrides[flag] = flag_values[i];
            }
            return cmd_train(config_path, overrides, out);
        }
        if (eval_cmd->parsed()) return cmd_eval(ev, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace tqn::cli
