#include "cli.hpp"

#include "thermoreg/bench.hpp"
#include "thermoreg/csv.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>

namespace thermo::cli {
namespace {

constexpr const char* kDataEnv = "THERMOREG_DATA_DIR";
constexpr const char* kDataFile = "FLIR_groups1and2.csv";

struct Flags {
    std::string data;
    std::string schema;
    std::string recipe;
    std::string seeds;
    std::string out;
    std::string format;
    std::string model;
    std::string artifact;
    std::string config;
    std::vector<std::string> hp;
    std::vector<std::string> rows;
    std::optional<std::uint64_t> seed;
    int epochs = 0;
    int jobs = 0;
    int max_reps = 0;
    int folds = 0;
    bool nested = false;
    bool stratify = false;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string part;
    try {
        while (std::getline(ss, part, ',')) {
            const auto dots = part.find("..");
            if (dots != std::string::npos) {
                const auto lo = std::stoull(part.substr(0, dots));
                const auto hi = std::stoull(part.substr(dots + 2));
                if (hi < lo) {
                    throw ConfigError("empty seed range '" + part + "'");
                }
                for (auto s = lo; s <= hi; ++s) {
                    out.push_back(s);
                }
            } else if (!part.empty()) {
                out.push_back(std::stoull(part));
            }
        }
    } catch (const std::logic_error&) {
        throw ConfigError("cannot parse seed list '" + text + "'");
    }
    if (out.empty()) {
        throw ConfigError("seed list '" + text + "' is empty");
    }
    return out;
}

std::filesystem::path resolve_data(const std::string& path)
{
    std::filesystem::path p(path);
    if (std::filesystem::is_directory(p)) {
        p /= kDataFile;
    }
    return p;
}

// Defaults, then the environment, then flags, then the config file.
RunConfig build_config(const Flags& f)
{
    RunConfig cfg;
    if (const char* env = std::getenv(kDataEnv); env && *env) {
        cfg.data = resolve_data(env);
    }
    if (!f.data.empty()) cfg.data = resolve_data(f.data);
    if (!f.schema.empty()) cfg.schema_path = f.schema;
    if (!f.recipe.empty()) cfg.recipe = f.recipe;
    if (!f.seeds.empty()) cfg.seeds = parse_seeds(f.seeds);
    if (f.seed) {
        cfg.split.seed = *f.seed;
        if (f.seeds.empty()) {
            cfg.seeds = {*f.seed};
        }
    }
    cfg.split.stratify = f.stratify;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.format.empty()) cfg.format = parse_report_format(f.format);
    if (f.epochs > 0) cfg.epochs = f.epochs;
    if (f.jobs > 0) cfg.jobs = f.jobs;
    if (f.max_reps > 0) cfg.max_reps = f.max_reps;
    if (f.folds > 0) cfg.cv_folds = f.folds;
    cfg.nested = f.nested;
    for (const auto& r : f.rows) {
        try {
            cfg.cnn_rows.push_back(std::stoi(r));
        } catch (const std::logic_error&) {
            cfg.models.push_back(r);
        }
    }
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) {
            throw ConfigError("cannot open config '" + f.config + "'");
        }
        try {
            auto j = nlohmann::json::parse(in);
            if (j.contains("data")) {
                j["data"] = resolve_data(j["data"].get<std::string>()).string();
            }
            cfg = RunConfig::from_json(j, cfg);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config '" + f.config + "': " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

void print_written(const std::vector<std::filesystem::path>& paths)
{
    for (const auto& p : paths) {
        std::cout << "wrote " << p.string() << "\n";
    }
}

void print_table(const ReportTable& t)
{
    std::cout << t.title << "\n";
    for (const auto& r : t.rows) {
        std::cout << "  " << r.label << ": rmse " << format_double(r.rmse_seed_mean) << " +/- "
                  << format_double(r.rmse_seed_std);
        if (r.status != "ok") {
            std::cout << " [" << r.status << "]";
        }
        std::cout << "\n";
    }
}

EstimatorSpec model_spec(const Flags& f)
{
    EstimatorSpec spec(parse_family(f.model.empty() ? "linear" : f.model));
    for (const auto& a : f.hp) {
        spec.set_from_text(a);
    }
    return spec;
}

int cmd_ingest(const Flags& f)
{
    const auto cfg = build_config(f);
    const auto ctx = load_context(cfg);
    auto [train, test] = split(ctx.data, cfg.split);
    std::vector<std::filesystem::path> written;
    auto emit_csv = [&](const std::string& name, const CleanDataset& ds) {
        std::ostringstream s;
        write_clean_csv(s, ds);
        written.push_back(cfg.out / name);
        write_text_file(written.back(), s.str());
    };
    emit_csv("clean.csv", ctx.data);
    emit_csv("train.csv", train);
    emit_csv("test.csv", test);
    nlohmann::json manifest{{"rows", ctx.data.n_rows},
                            {"train_rows", train.n_rows},
                            {"test_rows", test.n_rows},
                            {"columns", ctx.data.numeric_names()},
                            {"categorical", ctx.data.categorical_names()},
                            {"target", ctx.data.target_name},
                            {"provenance", ctx.provenance()}};
    written.push_back(cfg.out / "ingest.json");
    write_text_file(written.back(), manifest.dump(2) + "\n");
    std::cout << "rows " << ctx.data.n_rows << " train " << train.n_rows << " test " << test.n_rows << "\n";
    print_written(written);
    return 0;
}

int cmd_features(const Flags& f)
{
    const auto cfg = build_config(f);
    const auto ctx = load_context(cfg);
    const auto recipe = resolve_recipe(cfg.recipe);
    const auto d = prepare_seed(ctx, recipe, cfg.split.seed);
    std::vector<std::filesystem::path> written;
    std::ostringstream tr;
    d.train.write_csv(tr);
    written.push_back(cfg.out / "features_train.csv");
    write_text_file(written.back(), tr.str());
    std::ostringstream te;
    d.test.write_csv(te);
    written.push_back(cfg.out / "features_test.csv");
    write_text_file(written.back(), te.str());
    nlohmann::json manifest{{"recipe", recipe.to_json()},
                            {"features", d.train.names},
                            {"count", d.train.cols()},
                            {"provenance", ctx.provenance()}};
    written.push_back(cfg.out / "features.json");
    write_text_file(written.back(), manifest.dump(2) + "\n");
    std::cout << "recipe " << recipe.name << ": " << d.train.cols() << " features\n";
    print_written(written);
    return 0;
}

int cmd_select(const Flags& f)
{
    const auto ctx = load_context(build_config(f));
    print_written(run_selection(ctx));
    return 0;
}

int cmd_fit(const Flags& f)
{
    const auto cfg = build_config(f);
    const auto ctx = load_context(cfg);
    const auto spec = model_spec(f);
    const auto d = prepare_seed(ctx, resolve_recipe(cfg.recipe), cfg.split.seed);
    const auto model = fit(spec, d.train);
    const auto m = compute_metrics(d.test.y(), model.predict(d.test));
    const auto path = f.artifact.empty() ? cfg.out / "model.json" : std::filesystem::path(f.artifact);
    write_text_file(path, model.to_json().dump(2) + "\n");
    std::cout << spec.label() << ": test mae " << format_double(m.mae) << " mse " << format_double(m.mse) << " rmse "
              << format_double(m.rmse) << "\n";
    print_written({path});
    return 0;
}

int cmd_evaluate(const Flags& f)
{
    const auto cfg = build_config(f);
    const auto ctx = load_context(cfg);
    const auto d = prepare_seed(ctx, resolve_recipe(cfg.recipe), cfg.split.seed);
    ReportTable t;
    t.title = "Model evaluation";
    t.evaluation = "fixed split seed " + std::to_string(cfg.split.seed);
    if (!f.artifact.empty()) {
        std::ifstream in(f.artifact);
        if (!in) {
            throw ConfigError("cannot open model artifact '" + f.artifact + "'");
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("model artifact: " + std::string(e.what()));
        }
        const auto model = TrainedModel::from_json(j);
        auto row = aggregate_row("test", d.test.cols(), {compute_metrics(d.test.y(), model.predict(d.test))});
        row.manifest = {{"model", model.spec().to_json()}};
        t.rows.push_back(std::move(row));
    } else {
        const auto spec = model_spec(f);
        const auto plan = kfold_plan(d.train.rows(), cfg.cv_folds, cfg.split.seed);
        const auto cv = cross_validate(spec, d.train, plan);
        auto cv_row = aggregate_row(std::to_string(cfg.cv_folds) + "-fold CV on training split", d.train.cols(),
                                    cv.folds);
        cv_row.manifest = {{"model", spec.to_json()}};
        t.rows.push_back(std::move(cv_row));
        const auto model = fit(spec, d.train);
        auto row = aggregate_row("test", d.train.cols(), {compute_metrics(d.test.y(), model.predict(d.test))});
        row.manifest = {{"model", spec.to_json()}};
        t.rows.push_back(std::move(row));
    }
    t.provenance = ctx.provenance();
    print_table(t);
    print_written(emit_report(t, cfg.out, "evaluate", cfg.format));
    return 0;
}

int cmd_table(const Flags& f, const std::string& stem, ReportTable (*runner)(const BenchContext&))
{
    const auto ctx = load_context(build_config(f));
    const auto t = runner(ctx);
    print_table(t);
    print_written(emit_report(t, ctx.cfg.out, stem, ctx.cfg.format));
    return 0;
}

void add_common(CLI::App* sub, Flags& f)
{
    sub->add_option("--data", f.data, "Dataset CSV or a directory holding FLIR_groups1and2.csv");
    sub->add_option("--schema", f.schema, "Schema JSON (default: built-in FLIR layout)");
    sub->add_option("--recipe", f.recipe, "Feature recipe preset (a-f, full38) or JSON path");
    sub->add_option("--seed", f.seed, "Split seed for single-run commands");
    sub->add_option("--seeds", f.seeds, "Seed list for tables, e.g. 0..9 or 1,4,7 (default 0..9)");
    sub->add_option("--out", f.out, "Output directory (default results)");
    sub->add_option("--format", f.format, "Report format: csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--config", f.config, "JSON run config; its fields override flags");
    sub->add_option("--jobs", f.jobs, "Parallel workers for independent seeds and rows");
    sub->add_option("--folds", f.folds, "Cross-validation folds (default 5)");
    sub->add_flag("--stratify", f.stratify, "Stratify the train/test split by target");
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Thermography regression benchmark"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);
    Flags f;

    auto* ingest = app.add_subcommand("ingest", "Clean the dataset and write the train/test split");
    auto* features = app.add_subcommand("features", "Build a feature recipe on the split");
    auto* select = app.add_subcommand("select", "Feature rankings, bio subset search and PCA comparison");
    auto* fitc = app.add_subcommand("fit", "Fit one estimator and save the model artifact");
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate an estimator or score a saved model");
    auto* t4 = app.add_subcommand("table-iv", "Ordinary least squares over recipes a-f");
    auto* t5 = app.add_subcommand("table-v", "Regression model comparison");
    auto* t6 = app.add_subcommand("table-vi", "1D-CNN architecture comparison");
    auto* fig2 = app.add_subcommand("fig-2", "RMSE versus number of T_Max_1 replicas");
    auto* sbsc = app.add_subcommand("sbs-audit", "Sequential backward selection from full38");
    for (auto* sub : {ingest, features, select, fitc, evaluate, t4, t5, t6, fig2, sbsc}) {
        add_common(sub, f);
    }
    for (auto* sub : {fitc, evaluate}) {
        sub->add_option("--model", f.model, "Estimator family: linear, quadratic, weighted, binning, piecewise, knn, "
                                            "svr, forest");
        sub->add_option("--hp", f.hp, "Hyperparameter override key=value (repeatable)");
        sub->add_option("--artifact", f.artifact, "Model artifact path (fit: output; evaluate: input)");
    }
    t5->add_option("--rows", f.rows, "Restrict to these row labels");
    t5->add_flag("--nested", f.nested, "Also run nested CV for the tuned rows");
    t6->add_option("--rows", f.rows, "Restrict to these row indices (0-6)");
    t6->add_option("--epochs", f.epochs, "Training epochs (default 1000)");
    fig2->add_option("--max-reps", f.max_reps, "Largest replica count (default 10)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(f);
        if (features->parsed()) return cmd_features(f);
        if (select->parsed()) return cmd_select(f);
        if (fitc->parsed()) return cmd_fit(f);
        if (evaluate->parsed()) return cmd_evaluate(f);
        if (t4->parsed()) return cmd_table(f, "table_iv", run_feature_table);
        if (t5->parsed()) return cmd_table(f, "table_v", run_model_table);
        if (t6->parsed()) return cmd_table(f, "table_vi", run_cnn_table);
        if (fig2->parsed()) return cmd_table(f, "fig_2", run_repetition_sweep);
        if (sbsc->parsed()) return cmd_table(f, "sbs_audit", run_sbs_audit);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace thermo::cli
