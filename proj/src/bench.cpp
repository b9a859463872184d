#include "thermoreg/bench.hpp"

#include "thermoreg/pca.hpp"
#include "thermoreg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace thermo {
namespace {

constexpr std::uint64_t kTuneStream = 0xC5;
constexpr std::uint64_t kSbsStream = 0x5B5;

// Per-(row, seed) outcome; metrics absent when the fit failed.
struct Outcome {
    std::optional<Metrics> metrics;
    std::string error;
    nlohmann::json detail;
};

ReportRow collect_row(const std::string& label, std::optional<Index> count, const std::vector<Outcome>& cells)
{
    std::vector<Metrics> ok;
    std::string status = "ok";
    for (const auto& c : cells) {
        if (c.metrics) {
            ok.push_back(*c.metrics);
        } else if (status == "ok") {
            status = "error: " + c.error;
        }
    }
    auto row = aggregate_row(label, count, ok);
    row.status = status;
    return row;
}

std::string recipe_title(const std::string& name)
{
    if (name == "a") return "Correlation-Bio Features Set (a)";
    if (name == "b") return "Comprehensive Bio Features Set (b)";
    if (name == "c") return "Optimized Correlation-Bio Set (c)";
    if (name == "d") return "Expanded Optimal Feature Set (d)";
    if (name == "e") return "Optimal Combo Feature Set (e)";
    if (name == "f") return "Final Engineered Feature Set (f)";
    return name;
}

template <class Fn>
Outcome guarded(Fn&& fn)
{
    Outcome c;
    try {
        fn(c);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        c.metrics.reset();
        c.error = e.what();
    }
    return c;
}

Metrics test_metrics(const TrainedModel& model, const FeatureMatrix& test)
{
    return compute_metrics(test.y(), model.predict(test));
}

FoldPlan tuning_plan(const BenchContext& ctx, Index rows, std::uint64_t seed)
{
    return kfold_plan(rows, ctx.cfg.cv_folds, derive_seed(seed, kTuneStream));
}

std::vector<SeedData> prepare_all(const BenchContext& ctx, const FeatureRecipe& recipe)
{
    std::vector<SeedData> out(ctx.cfg.seeds.size());
    parallel_for(out.size(), ctx.cfg.jobs,
                 [&](std::size_t i) { out[i] = prepare_seed(ctx, recipe, ctx.cfg.seeds[i]); });
    return out;
}

nlohmann::json seeds_detail(const std::vector<Outcome>& cells, const std::vector<std::uint64_t>& seeds)
{
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i].detail.is_null()) {
            out.push_back({{"seed", seeds[i]}, {"detail", cells[i].detail}});
        }
    }
    return out;
}

} // namespace

void RunConfig::validate() const
{
    if (seeds.empty()) {
        throw ConfigError("seed list is empty");
    }
    resolve_recipe(recipe);
    if (!(split.test_fraction > 0.0 && split.test_fraction < 1.0)) {
        throw ConfigError("test fraction must be in (0, 1)");
    }
    if (epochs < 1 || jobs < 1 || max_reps < 1 || cv_folds < 2 || sbs_target < 1) {
        throw ConfigError("epochs, jobs, max_reps and sbs_target must be positive; cv_folds at least 2");
    }
    for (const auto& m : models) {
        const auto& labels = model_table_labels();
        if (std::find(labels.begin(), labels.end(), m) == labels.end()) {
            throw ConfigError("unknown model table row '" + m + "'");
        }
    }
    for (int r : cnn_rows) {
        if (r < 0 || r >= static_cast<int>(cnn_table_rows().size())) {
            throw ConfigError("CNN table row " + std::to_string(r) + " out of range");
        }
    }
}

nlohmann::json RunConfig::to_json() const
{
    return {{"data", data.string()},
            {"schema", schema_path.string()},
            {"recipe", recipe},
            {"split", {{"test_fraction", split.test_fraction}, {"seed", split.seed}, {"stratify", split.stratify}}},
            {"seeds", seeds},
            {"out", out.string()},
            {"models", models},
            {"epochs", epochs},
            {"max_reps", max_reps},
            {"cv_folds", cv_folds},
            {"sbs_target", sbs_target},
            {"cnn_rows", cnn_rows},
            {"nested", nested}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j, RunConfig c)
{
    try {
        if (j.contains("data")) c.data = j.at("data").get<std::string>();
        if (j.contains("schema")) c.schema_path = j.at("schema").get<std::string>();
        if (j.contains("recipe")) c.recipe = j.at("recipe").get<std::string>();
        if (j.contains("split")) {
            const auto& s = j.at("split");
            c.split.test_fraction = s.value("test_fraction", c.split.test_fraction);
            c.split.seed = s.value("seed", c.split.seed);
            c.split.stratify = s.value("stratify", c.split.stratify);
        }
        if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("format")) c.format = parse_report_format(j.at("format").get<std::string>());
        if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
        c.epochs = j.value("epochs", c.epochs);
        c.jobs = j.value("jobs", c.jobs);
        c.max_reps = j.value("max_reps", c.max_reps);
        c.cv_folds = j.value("cv_folds", c.cv_folds);
        c.sbs_target = j.value("sbs_target", c.sbs_target);
        if (j.contains("cnn_rows")) c.cnn_rows = j.at("cnn_rows").get<std::vector<int>>();
        c.nested = j.value("nested", c.nested);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    return c;
}

nlohmann::json BenchContext::provenance() const
{
    return make_provenance(cfg.to_json(), cfg.seeds, schema.to_json());
}

BenchContext load_context(const RunConfig& cfg)
{
    cfg.validate();
    if (cfg.data.empty()) {
        throw ConfigError("no dataset given (use --data or THERMOREG_DATA_DIR)");
    }
    BenchContext ctx;
    ctx.cfg = cfg;
    ctx.schema = cfg.schema_path.empty() ? default_flir_schema() : Schema::load(cfg.schema_path);
    ctx.data = load_dataset(cfg.data, ctx.schema);
    return ctx;
}

SeedData prepare_seed(const BenchContext& ctx, const FeatureRecipe& recipe, std::uint64_t seed)
{
    SplitSpec spec = ctx.cfg.split;
    spec.seed = seed;
    auto [train, test] = split(ctx.data, spec);
    FittedRecipe fitted(recipe, train, ctx.schema);
    return SeedData{fitted.apply(train), fitted.apply(test)};
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn)
{
    std::vector<std::exception_ptr> errors(count);
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::mutex mu;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min(workers, count); ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = 0;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= count) {
                            return;
                        }
                        i = next++;
                    }
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

ReportTable run_feature_table(const BenchContext& ctx)
{
    ReportTable t;
    t.title = "Comparative analysis of feature sets (ordinary least squares)";
    t.evaluation = "fixed train/test split per seed; test-set metrics averaged over seeds";
    const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
    const EstimatorSpec ols(Family::linear, {{"l2", 0.0}});
    for (const auto& name : names) {
        const auto recipe = preset_recipe(name);
        std::vector<Outcome> cells(ctx.cfg.seeds.size());
        std::vector<std::vector<std::string>> feature_names(cells.size());
        parallel_for(cells.size(), ctx.cfg.jobs, [&](std::size_t i) {
            cells[i] = guarded([&](Outcome& c) {
                const auto d = prepare_seed(ctx, recipe, ctx.cfg.seeds[i]);
                feature_names[i] = d.train.names;
                c.metrics = test_metrics(fit(ols, d.train), d.test);
            });
        });
        std::optional<Index> count;
        if (!feature_names.front().empty()) {
            count = static_cast<Index>(feature_names.front().size());
        }
        auto row = collect_row(recipe_title(name), count, cells);
        row.manifest = {{"recipe", recipe.to_json()}, {"features", feature_names.front()},
                        {"estimator", ols.to_json()}};
        t.rows.push_back(std::move(row));
    }
    t.provenance = ctx.provenance();
    return t;
}

const std::vector<std::string>& model_table_labels()
{
    static const std::vector<std::string> labels{
        "1NN",     "Ordinary Linear Regression",  "KNN with Optimization over K", "Support Vector Regression",
        "Binning", "Piecewise Linear Regression", "Weighted Linear Regression",   "Quadratic Regression",
        "Random Forest",
    };
    return labels;
}

ReportTable run_model_table(const BenchContext& ctx)
{
    ReportTable t;
    t.title = "Performance of regression models on the final engineered feature set";
    t.evaluation = "fixed train/test split per seed; test-set metrics averaged over seeds; tuned rows select "
                   "hyperparameters by " + std::to_string(ctx.cfg.cv_folds) + "-fold CV on the training split";
    if (ctx.cfg.nested) {
        t.notes.push_back("nested CV summaries for tuned rows are in each row manifest and in cv/*.csv");
    }
    const auto recipe = resolve_recipe(ctx.cfg.recipe);
    const auto data = prepare_all(ctx, recipe);
    const auto& seeds = ctx.cfg.seeds;

    auto fixed = [&](const EstimatorSpec& spec) {
        return [spec](const SeedData& d, std::uint64_t, Outcome& c) {
            c.metrics = test_metrics(fit(spec, d.train), d.test);
        };
    };
    auto tuned = [&](std::function<GridSpec(std::uint64_t)> make_grid, std::string key) {
        return [&ctx, make_grid, key](const SeedData& d, std::uint64_t seed, Outcome& c) {
            const auto grid = make_grid(seed);
            const auto plan = tuning_plan(ctx, d.train.rows(), seed);
            const auto search = grid_search(grid, d.train, plan);
            const auto spec = grid.point(search.best);
            c.metrics = test_metrics(fit(spec, d.train), d.test);
            c.detail = {{"selected", spec.to_json()}, {"cv_rmse", search.rmse_mean[search.best]}};
            if (ctx.cfg.nested) {
                const auto outer = kfold_plan(d.train.rows(), ctx.cfg.cv_folds, derive_seed(seed, kTuneStream + 1));
                const auto nested = nested_cv(d.train, grid, outer, ctx.cfg.cv_folds);
                c.detail["nested"] = {{"best", nested.best.to_json()},
                                      {"outer_rmse_mean", nested.outer_rmse_mean},
                                      {"outer_rmse_std", nested.outer_rmse_std}};
                std::ostringstream csv;
                write_cv_csv(csv, nested);
                write_text_file(ctx.cfg.out / "cv" / (key + "_seed" + std::to_string(seed) + ".csv"), csv.str());
            }
        };
    };
    using RowFn = std::function<void(const SeedData&, std::uint64_t, Outcome&)>;
    const std::vector<std::pair<std::string, RowFn>> rows{
        {"1NN", fixed(EstimatorSpec(Family::knn, {{"n_neighbors", 1.0}}))},
        {"Ordinary Linear Regression", fixed(EstimatorSpec(Family::linear, {{"l2", 0.0}}))},
        {"KNN with Optimization over K", tuned([](std::uint64_t) { return knn_grid(1, 30); }, "knn")},
        {"Support Vector Regression", fixed(EstimatorSpec(Family::svr))},
        {"Binning", fixed(EstimatorSpec(Family::binning))},
        {"Piecewise Linear Regression", fixed(EstimatorSpec(Family::piecewise))},
        {"Weighted Linear Regression", fixed(EstimatorSpec(Family::weighted))},
        {"Quadratic Regression", fixed(EstimatorSpec(Family::quadratic))},
        {"Random Forest", tuned([](std::uint64_t s) { return forest_grid(s); }, "forest")},
    };
    const std::vector<nlohmann::json> estimators{
        EstimatorSpec(Family::knn, {{"n_neighbors", 1.0}}).to_json(),
        EstimatorSpec(Family::linear, {{"l2", 0.0}}).to_json(),
        {{"family", "knn"}, {"grid", "n_neighbors 1..30"}},
        EstimatorSpec(Family::svr).to_json(),
        EstimatorSpec(Family::binning).to_json(),
        EstimatorSpec(Family::piecewise).to_json(),
        EstimatorSpec(Family::weighted).to_json(),
        EstimatorSpec(Family::quadratic).to_json(),
        {{"family", "forest"}, {"grid", "n_estimators 50,100,150,200,250"}},
    };
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& [label, fn] = rows[r];
        if (!ctx.cfg.models.empty() &&
            std::find(ctx.cfg.models.begin(), ctx.cfg.models.end(), label) == ctx.cfg.models.end()) {
            continue;
        }
        std::vector<Outcome> cells(seeds.size());
        parallel_for(cells.size(), ctx.cfg.jobs, [&](std::size_t i) {
            cells[i] = guarded([&](Outcome& c) { fn(data[i], seeds[i], c); });
        });
        auto row = collect_row(label, data.front().train.cols(), cells);
        row.manifest = {{"recipe", recipe.to_json()}, {"features", data.front().train.names},
                        {"estimator", estimators[r]}};
        auto detail = seeds_detail(cells, seeds);
        if (!detail.empty()) {
            row.manifest["per_seed"] = detail;
        }
        t.rows.push_back(std::move(row));
    }
    t.provenance = ctx.provenance();
    return t;
}

const std::vector<CnnRow>& cnn_table_rows()
{
    static const std::vector<CnnRow> rows{
        {"2 x Conv1D(64), k=2, l2=0.01", 2, 64, 2, 0.01},   {"2 x Conv1D(32), k=2, l2=0.01", 2, 32, 2, 0.01},
        {"4 x Conv1D(16), k=2, l2=0.01", 4, 16, 2, 0.01},   {"5 x Conv1D(8), k=2, l2=0.01", 5, 8, 2, 0.01},
        {"4 x Conv1D(16), k=3, l2=0.01", 4, 16, 3, 0.01},   {"5 x Conv1D(16), k=3, l2=0.01", 5, 16, 3, 0.01},
        {"4 x Conv1D(16), k=3, l2=0.001", 4, 16, 3, 0.001},
    };
    return rows;
}

ReportTable run_cnn_table(const BenchContext& ctx)
{
    ReportTable t;
    t.title = "1D-CNN architecture comparison on the final engineered feature set";
    t.evaluation = "fixed train/test split per seed; weights from the best epoch on a 20% validation slice of "
                   "the training split; test-set metrics averaged over seeds";
    TrainConfig base;
    base.epochs = ctx.cfg.epochs;
    t.notes.push_back("epochs=" + std::to_string(base.epochs) + " batch_size=" + std::to_string(base.batch_size) +
                      " learning_rate=" + format_double(base.learning_rate));
    const auto recipe = resolve_recipe(ctx.cfg.recipe);
    const auto data = prepare_all(ctx, recipe);
    const auto& seeds = ctx.cfg.seeds;
    std::vector<int> selected = ctx.cfg.cnn_rows;
    if (selected.empty()) {
        for (int i = 0; i < static_cast<int>(cnn_table_rows().size()); ++i) {
            selected.push_back(i);
        }
    }
    std::vector<std::vector<Outcome>> cells(selected.size(), std::vector<Outcome>(seeds.size()));
    parallel_for(selected.size() * seeds.size(), ctx.cfg.jobs, [&](std::size_t task) {
        const std::size_t r = task / seeds.size();
        const std::size_t s = task % seeds.size();
        const auto& row = cnn_table_rows()[static_cast<std::size_t>(selected[r])];
        cells[r][s] = guarded([&](Outcome& c) {
            const auto& d = data[s];
            const auto spec = uniform_network(row.layers, row.filters, row.kernel_size, row.l2,
                                              static_cast<int>(d.train.cols()));
            TrainConfig cfg = base;
            cfg.seed = seeds[s];
            const auto net = train_with_holdout(spec, cfg, d.train);
            std::ostringstream hist;
            net.write_history_csv(hist);
            write_text_file(ctx.cfg.out / "history" /
                                ("cnn_row" + std::to_string(selected[r]) + "_seed" + std::to_string(seeds[s]) + ".csv"),
                            hist.str());
            c.metrics = compute_metrics(d.test.y(), net.predict(d.test));
            const Metrics final_m = compute_metrics(d.test.y(), net.predict(d.test, true));
            c.detail = {{"best_epoch", net.best_epoch}, {"final_epoch_rmse", final_m.rmse}};
        });
    });
    for (std::size_t r = 0; r < selected.size(); ++r) {
        const auto& def = cnn_table_rows()[static_cast<std::size_t>(selected[r])];
        auto row = collect_row(def.label, data.front().train.cols(), cells[r]);
        row.manifest = {{"recipe", recipe.to_json()},
                        {"network", uniform_network(def.layers, def.filters, def.kernel_size, def.l2,
                                                    static_cast<int>(data.front().train.cols()))
                                        .to_json()},
                        {"train", base.to_json()},
                        {"per_seed", seeds_detail(cells[r], seeds)}};
        row.manifest["train"].erase("seed");
        t.rows.push_back(std::move(row));
    }
    t.provenance = ctx.provenance();
    return t;
}

ReportTable run_repetition_sweep(const BenchContext& ctx)
{
    ReportTable t;
    t.title = "Test RMSE versus number of T_Max_1 replicas";
    t.evaluation = "fixed train/test split per seed; test-set metrics averaged over seeds; knn rows tune k over "
                   "1..30 by " + std::to_string(ctx.cfg.cv_folds) + "-fold CV on the training split";
    const auto& seeds = ctx.cfg.seeds;
    const int n_reps = ctx.cfg.max_reps + 1;
    // cells[pipeline][reps][seed]
    std::vector<std::vector<std::vector<Outcome>>> cells(
        3, std::vector<std::vector<Outcome>>(static_cast<std::size_t>(n_reps), std::vector<Outcome>(seeds.size())));
    std::vector<Index> counts(static_cast<std::size_t>(n_reps), 0);
    const EstimatorSpec ols(Family::linear, {{"l2", 0.0}});
    const EstimatorSpec ridge(Family::linear, {{"l2", 0.01}});
    parallel_for(static_cast<std::size_t>(n_reps) * seeds.size(), ctx.cfg.jobs, [&](std::size_t task) {
        const auto r = task / seeds.size();
        const auto s = task % seeds.size();
        const auto d = prepare_seed(ctx, replication_recipe(static_cast<int>(r)), seeds[s]);
        if (s == 0) {
            counts[r] = d.train.cols();
        }
        cells[0][r][s] = guarded([&](Outcome& c) {
            const auto grid = knn_grid(1, 30);
            const auto search = grid_search(grid, d.train, tuning_plan(ctx, d.train.rows(), seeds[s]));
            const auto spec = grid.point(search.best);
            c.metrics = test_metrics(fit(spec, d.train), d.test);
            c.detail = {{"selected", spec.to_json()}};
        });
        cells[1][r][s] = guarded([&](Outcome& c) { c.metrics = test_metrics(fit(ols, d.train), d.test); });
        cells[2][r][s] = guarded([&](Outcome& c) { c.metrics = test_metrics(fit(ridge, d.train), d.test); });
    });
    const std::vector<std::string> pipelines{"knn", "ols", "ridge"};
    for (std::size_t p = 0; p < pipelines.size(); ++p) {
        for (int r = 0; r < n_reps; ++r) {
            auto row = collect_row(pipelines[p] + " r=" + std::to_string(r), counts[static_cast<std::size_t>(r)],
                                   cells[p][static_cast<std::size_t>(r)]);
            row.manifest = {{"recipe", replication_recipe(r).to_json()}, {"replicas", r}};
            if (p == 0) {
                row.manifest["per_seed"] = seeds_detail(cells[p][static_cast<std::size_t>(r)], seeds);
            }
            t.rows.push_back(std::move(row));
        }
    }
    t.provenance = ctx.provenance();
    return t;
}

ReportTable run_sbs_audit(const BenchContext& ctx)
{
    ReportTable t;
    t.title = "Sequential backward selection audit (ordinary least squares)";
    t.evaluation = "SBS by " + std::to_string(ctx.cfg.cv_folds) +
                   "-fold CV RMSE on the training split; rows report test-set metrics averaged over seeds";
    const auto& seeds = ctx.cfg.seeds;
    const auto full = preset_recipe("full38");
    const auto final_recipe = resolve_recipe(ctx.cfg.recipe);
    const EstimatorSpec ols(Family::linear, {{"l2", 0.0}});
    std::vector<Outcome> sbs_cells(seeds.size());
    std::vector<Outcome> final_cells(seeds.size());
    std::vector<Index> start_counts(seeds.size(), 0);
    Index final_count = 0;
    parallel_for(seeds.size(), ctx.cfg.jobs, [&](std::size_t i) {
        sbs_cells[i] = guarded([&](Outcome& c) {
            const auto d = prepare_seed(ctx, full, seeds[i]);
            start_counts[i] = d.train.cols();
            const auto plan = kfold_plan(d.train.rows(), ctx.cfg.cv_folds, derive_seed(seeds[i], kSbsStream));
            const auto trace = sbs(d.train, ctx.cfg.sbs_target, plan);
            const auto train = d.train.select(trace.final_set);
            c.metrics = test_metrics(fit(ols, train), d.test.select(trace.final_set));
            c.detail = {{"final_set", trace.final_set}, {"start_count", d.train.cols()}};
            std::ostringstream csv;
            write_sbs_csv(csv, trace);
            write_text_file(ctx.cfg.out / "sbs" / ("trace_seed" + std::to_string(seeds[i]) + ".csv"), csv.str());
            write_text_file(ctx.cfg.out / "sbs" / ("trace_seed" + std::to_string(seeds[i]) + ".json"),
                            sbs_json(trace).dump(2) + "\n");
        });
        final_cells[i] = guarded([&](Outcome& c) {
            const auto d = prepare_seed(ctx, final_recipe, seeds[i]);
            if (i == 0) {
                final_count = d.train.cols();
            }
            c.metrics = test_metrics(fit(ols, d.train), d.test);
        });
    });
    auto sbs_row = collect_row("SBS-reduced set from full38", ctx.cfg.sbs_target, sbs_cells);
    sbs_row.manifest = {{"recipe", full.to_json()},
                        {"start_count", start_counts.front()},
                        {"validation", std::to_string(ctx.cfg.cv_folds) + "-fold CV on the training split"},
                        {"per_seed", seeds_detail(sbs_cells, seeds)}};
    t.rows.push_back(std::move(sbs_row));
    auto final_row = collect_row(recipe_title(final_recipe.name), final_count, final_cells);
    final_row.manifest = {{"recipe", final_recipe.to_json()}};
    t.rows.push_back(std::move(final_row));
    t.provenance = ctx.provenance();
    return t;
}

std::vector<std::filesystem::path> run_selection(const BenchContext& ctx)
{
    std::vector<std::filesystem::path> written;
    const auto& out = ctx.cfg.out;
    const auto seed = ctx.cfg.seeds.front();
    auto emit_pair = [&](const std::string& stem, const std::string& csv, const nlohmann::json& json) {
        if (ctx.cfg.format != ReportFormat::json) {
            written.push_back(out / (stem + ".csv"));
            write_text_file(written.back(), csv);
        }
        if (ctx.cfg.format != ReportFormat::csv) {
            nlohmann::json doc{{"seed", seed}, {"result", json}, {"provenance", ctx.provenance()}};
            written.push_back(out / (stem + ".json"));
            write_text_file(written.back(), doc.dump(2) + "\n");
        }
    };

    // Rankings over every numeric candidate of the full feature space.
    const auto full = prepare_seed(ctx, preset_recipe("full38"), seed);
    const auto plan = kfold_plan(full.train.rows(), ctx.cfg.cv_folds, derive_seed(seed, kTuneStream));
    const auto by_corr = pearson_rank(full.train);
    const auto by_rmse = single_feature_rmse(full.train, plan);
    {
        std::ostringstream a;
        write_ranking_csv(a, by_corr);
        emit_pair("ranking_correlation", a.str(), ranking_json(by_corr));
        std::ostringstream b;
        write_ranking_csv(b, by_rmse);
        emit_pair("ranking_rmse", b.str(), ranking_json(by_rmse));
    }

    // The correlation-bio table: the seven features in correlation order,
    // each with its single-feature RMSE.
    {
        const auto seven = full.train.select(correlation_bio_features());
        auto table = pearson_rank(seven);
        const auto rmses = single_feature_rmse(seven, plan);
        for (auto& e : table) {
            for (const auto& r : rmses) {
                if (r.feature == e.feature) {
                    e.rmse = r.rmse;
                }
            }
        }
        std::ostringstream csv;
        write_ranking_csv(csv, table);
        emit_pair("table_i", csv.str(), ranking_json(table));
    }

    // Every subset of the six bio candidates on top of the seven.
    {
        const auto comp = prepare_seed(ctx, preset_recipe("b"), seed);
        const auto comp_plan = kfold_plan(comp.train.rows(), ctx.cfg.cv_folds, derive_seed(seed, kTuneStream));
        const auto result = exhaustive_subset_search(comp.train, bio_candidate_features(), comp_plan);
        std::ostringstream csv;
        write_subsets_csv(csv, result);
        emit_pair("subset_search", csv.str(), subsets_json(result));
    }

    // PCA with MLE dimension versus no reduction, over all seeds.
    {
        ReportTable t;
        t.title = "PCA (MLE dimension) before ordinary least squares versus no PCA";
        t.evaluation = "fixed train/test split per seed; test-set metrics averaged over seeds";
        const auto recipe = resolve_recipe(ctx.cfg.recipe);
        const auto data = prepare_all(ctx, recipe);
        const EstimatorSpec ols(Family::linear, {{"l2", 0.0}});
        std::vector<Outcome> plain(data.size());
        std::vector<Outcome> reduced(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto& d = data[i];
            plain[i] = guarded([&](Outcome& c) { c.metrics = test_metrics(fit(ols, d.train), d.test); });
            reduced[i] = guarded([&](Outcome& c) {
                const auto p = pca_fit(d.train.values);
                const auto tr = pca_transform(p, d.train);
                const auto te = pca_transform(p, d.test);
                c.metrics = test_metrics(fit(ols, tr), te);
                c.detail = {{"k", p.k}};
            });
        }
        auto a = collect_row("no PCA", data.front().train.cols(), plain);
        a.manifest = {{"recipe", recipe.to_json()}};
        auto b = collect_row("PCA (MLE)", std::nullopt, reduced);
        b.manifest = {{"recipe", recipe.to_json()}, {"per_seed", seeds_detail(reduced, ctx.cfg.seeds)}};
        t.rows.push_back(std::move(a));
        t.rows.push_back(std::move(b));
        t.provenance = ctx.provenance();
        for (auto& p : emit_report(t, out, "pca_comparison", ctx.cfg.format)) {
            written.push_back(p);
        }
    }
    return written;
}

} // namespace thermo
