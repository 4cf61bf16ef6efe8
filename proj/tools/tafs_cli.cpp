// tafs command-line front end. Talks to the library through the C API only.

#include "tafs/tafs.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kNumeric = 3 };

int exit_code(tafs_status s) {
    switch (s) {
        case TAFS_OK: return kOk;
        case TAFS_ERR_CONFIG:
        case TAFS_ERR_ARGUMENT: return kConfig;
        case TAFS_ERR_NUMERIC: return kNumeric;
        case TAFS_ERR_DATA:
        case TAFS_ERR_IO:
        case TAFS_ERR_INTERNAL: return kData;
    }
    return kData;
}

struct Failure {
    tafs_status status;
};

void check(tafs_status s) {
    if (s != TAFS_OK) {
        throw Failure{s};
    }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Series = std::unique_ptr<tafs_series, Deleter<tafs_series, tafs_series_free>>;
using Frame = std::unique_ptr<tafs_frame, Deleter<tafs_frame, tafs_frame_free>>;
using Dataset = std::unique_ptr<tafs_dataset, Deleter<tafs_dataset, tafs_dataset_free>>;
using Regressor = std::unique_ptr<tafs_regressor, Deleter<tafs_regressor, tafs_regressor_free>>;
using Model = std::unique_ptr<tafs_model, Deleter<tafs_model, tafs_model_free>>;
using Selection = std::unique_ptr<tafs_selection, Deleter<tafs_selection, tafs_selection_free>>;
using Experiment = std::unique_ptr<tafs_experiment, Deleter<tafs_experiment, tafs_experiment_free>>;

template <typename Ptr, typename Fn>
Ptr make(Fn&& fn) {
    typename Ptr::pointer raw = nullptr;
    check(fn(&raw));
    return Ptr(raw);
}

std::mutex g_log_mutex;

void log_line(const char* line, void*) {
    std::lock_guard lock(g_log_mutex);
    std::cerr << line << '\n';
}

struct Global {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool fast = false;
    std::string out = "out";
};

std::string out_path(const Global& g, const std::string& given, const std::string& fallback) {
    if (!given.empty()) {
        return given;
    }
    fs::create_directories(g.out);
    return (fs::path(g.out) / fallback).string();
}

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// Regressor options shared by select, train and evaluate.
struct RegressorArgs {
    std::string family = "LR";
    bool untuned = false;
    std::vector<std::string> params;

    void add(CLI::App* cmd) {
        cmd->add_option("-r,--regressor", family, "LR Ridge Lasso DTR KNN MLP SVR ADA GBR RFR")->capture_default_str();
        cmd->add_flag("--untuned", untuned, "start from library defaults instead of the tuned values");
        cmd->add_option("-p,--param", params, "hyperparameter override key=value (repeatable)");
    }

    Regressor build(const Global& g) const {
        auto r = make<Regressor>(
            [&](tafs_regressor** p) { return tafs_regressor_create(family.c_str(), g.seed.value_or(0), !untuned, p); });
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
            }
            check(tafs_regressor_set(r.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
        }
        if (g.fast) {
            check(tafs_regressor_fast(r.get(), 50));
        }
        check(tafs_regressor_validate(r.get()));
        return r;
    }
};

// Chronological split shared by select, train and evaluate so that all
// three see the same scaled training rows.
struct SplitArgs {
    double train_fraction = 0.7;
    bool no_scale = false;

    void add(CLI::App* cmd) {
        cmd->add_option("--train-fraction", train_fraction, "share of rows used for training")->capture_default_str();
        cmd->add_flag("--no-scale", no_scale, "skip min-max scaling");
    }

    std::pair<Dataset, Dataset> apply(const tafs_dataset* data) const {
        tafs_dataset* train = nullptr;
        tafs_dataset* test = nullptr;
        check(tafs_dataset_split(data, train_fraction, 0, 0, no_scale ? 0 : 1, &train, &test));
        return {Dataset(train), Dataset(test)};
    }
};

Dataset restrict_to(Dataset data, const std::string& selection_path) {
    if (selection_path.empty()) {
        return data;
    }
    auto sel = make<Selection>([&](tafs_selection** p) { return tafs_selection_read(selection_path.c_str(), p); });
    return make<Dataset>([&](tafs_dataset** p) { return tafs_dataset_restrict(data.get(), sel.get(), p); });
}

void print_metrics(const tafs_metrics& m) {
    std::cout << "r2," << num(m.r2) << "\nmse," << num(m.mse) << "\nrmse," << num(m.rmse) << "\nmae," << num(m.mae)
              << "\nmape," << num(m.mape) << "\n";
    if (m.mape_skipped > 0) {
        std::cerr << "mape skipped " << m.mape_skipped << " of " << m.n << " targets near zero\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Technical-indicator feature selection for stock price regression"};
    app.set_version_flag("--version", std::string(tafs_version()));
    app.require_subcommand(1);

    Global g;
    app.add_option("--config", g.config, "experiment config file");
    app.add_option("--seed", g.seed, "global random seed");
    app.add_flag("--fast", g.fast, "small ensembles, reduced matrix");
    app.add_option("--out", g.out, "output directory")->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate and impute an OHLCV CSV");
    std::string ingest_input;
    std::size_t synthetic_days = 0;
    std::string ingest_output;
    auto* ingest_in = ingest->add_option("-i,--input", ingest_input, "OHLCV CSV");
    ingest->add_option("--synthetic", synthetic_days, "generate this many synthetic days instead")
        ->excludes(ingest_in);
    ingest->add_option("-o,--output", ingest_output, "cleaned CSV (default <out>/prices.csv)");

    // indicators
    auto* ind = app.add_subcommand("indicators", "compute the indicator frame");
    std::string ind_input;
    std::string roster_text;
    std::string roster_file;
    std::string ind_output;
    bool keep_warmup = false;
    bool list_only = false;
    ind->add_option("-i,--input", ind_input, "OHLCV CSV");
    ind->add_option("--roster", roster_text, "indicator specs separated by ';'");
    ind->add_option("--roster-file", roster_file, "one spec per line")->check(CLI::ExistingFile);
    ind->add_option("-o,--output", ind_output, "frame CSV (default <out>/features.csv)");
    ind->add_flag("--keep-warmup", keep_warmup, "keep rows with missing values");
    ind->add_flag("--list", list_only, "print the available indicators and exit");

    // window
    auto* win = app.add_subcommand("window", "build the sliding-window dataset");
    std::string win_features;
    std::string win_prices;
    std::size_t window = 3;
    std::size_t horizon = 3;
    std::string win_output;
    win->add_option("-f,--features", win_features, "frame CSV")->required();
    win->add_option("--prices", win_prices, "OHLCV CSV supplying the close targets")->required();
    win->add_option("-w,--window", window)->capture_default_str();
    win->add_option("--horizon", horizon)->capture_default_str();
    win->add_option("-o,--output", win_output, "dataset CSV (default <out>/dataset.csv)");

    // select
    auto* sel = app.add_subcommand("select", "SFS/SBS wrapper selection on the training split");
    std::string sel_data;
    std::string sel_output;
    std::string sel_method = "sfs";
    std::string sel_metric = "mse";
    std::size_t sel_folds = 5;
    std::size_t sel_steps = 0;
    std::size_t sel_threads = 1;
    bool sel_columns = false;
    RegressorArgs sel_reg;
    SplitArgs sel_split;
    sel->add_option("-d,--data", sel_data, "dataset CSV")->required();
    sel->add_option("-m,--method", sel_method, "sfs or sbs")->capture_default_str();
    sel->add_option("--metric", sel_metric, "r2 mse rmse mae mape")->capture_default_str();
    sel->add_option("--folds", sel_folds)->capture_default_str();
    sel->add_option("--max-steps", sel_steps, "0 runs the full path")->capture_default_str();
    sel->add_option("--threads", sel_threads)->capture_default_str();
    sel->add_flag("--per-column", sel_columns, "select single columns instead of indicator groups");
    sel->add_option("-o,--output", sel_output, "result JSON (default <out>/selection.json)");
    sel_reg.add(sel);
    sel_split.add(sel);

    // train
    auto* train = app.add_subcommand("train", "fit a regressor on the training split");
    std::string train_data;
    std::string train_selection;
    std::string train_model;
    RegressorArgs train_reg;
    SplitArgs train_split;
    train->add_option("-d,--data", train_data, "dataset CSV")->required();
    train->add_option("-s,--selection", train_selection, "restrict to a selection result's best subset");
    train->add_option("--model", train_model, "model file (default <out>/model.bin)");
    train_reg.add(train);
    train_split.add(train);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a model on the test split, or grid-search");
    std::string eval_data;
    std::string eval_model;
    std::string eval_selection;
    std::string grid;
    std::size_t grid_folds = 10;
    std::size_t grid_repeats = 3;
    std::string grid_metric = "mse";
    std::string grid_output;
    RegressorArgs eval_reg;
    SplitArgs eval_split;
    eval->add_option("-d,--data", eval_data, "dataset CSV")->required();
    auto* eval_model_opt = eval->add_option("--model", eval_model, "model file from train");
    eval->add_option("-s,--selection", eval_selection, "selection result used at training time");
    auto* grid_opt = eval->add_option("--grid", grid, "grid search, e.g. \"alpha=0,0.1,1;max_iter=1000\"");
    eval->add_option("--folds", grid_folds)->capture_default_str();
    eval->add_option("--repeats", grid_repeats)->capture_default_str();
    eval->add_option("--metric", grid_metric, "grid ranking metric")->capture_default_str();
    eval->add_option("-o,--output", grid_output, "grid CSV (default <out>/grid.csv)");
    eval_reg.add(eval);
    eval_split.add(eval);
    grid_opt->excludes(eval_model_opt);

    // run-experiment
    auto* run = app.add_subcommand("run-experiment", "full two-phase experiment");
    std::vector<std::string> settings;
    run->add_option("--set", settings, "override section.key=value (repeatable)");

    // report
    app.add_subcommand("report", "rebuild census and plots from <out>");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (ingest->parsed()) {
            if (ingest_input.empty() && synthetic_days == 0) {
                throw CLI::ValidationError("ingest", "give --input or --synthetic");
            }
            auto s = make<Series>([&](tafs_series** p) {
                return ingest_input.empty() ? tafs_series_synthetic(synthetic_days, g.seed.value_or(0), p)
                                            : tafs_series_load(ingest_input.c_str(), p);
            });
            const auto missing = tafs_series_missing(s.get());
            check(tafs_series_impute(s.get()));
            const auto path = out_path(g, ingest_output, "prices.csv");
            check(tafs_series_write(s.get(), path.c_str()));
            std::cout << "rows " << tafs_series_length(s.get()) << ", imputed " << missing << " missing cells -> "
                      << path << "\n";
        } else if (ind->parsed()) {
            if (list_only) {
                for (std::size_t i = 0; i < tafs_indicator_count(); ++i) {
                    std::cout << tafs_indicator_name(i) << "\n";
                }
                return kOk;
            }
            if (ind_input.empty()) {
                throw CLI::ValidationError("indicators", "--input is required");
            }
            if (!roster_text.empty() && !roster_file.empty()) {
                throw CLI::ValidationError("indicators", "--roster and --roster-file are exclusive");
            }
            if (!roster_file.empty()) {
                std::ifstream in(roster_file);
                roster_text.assign(std::istreambuf_iterator<char>(in), {});
            }
            auto s = make<Series>([&](tafs_series** p) { return tafs_series_load(ind_input.c_str(), p); });
            check(tafs_series_impute(s.get()));
            std::size_t dropped = 0;
            auto f = make<Frame>([&](tafs_frame** p) {
                return tafs_indicators_compute(s.get(), roster_text.empty() ? nullptr : roster_text.c_str(),
                                               keep_warmup ? 0 : 1, p, &dropped);
            });
            const auto path = out_path(g, ind_output, "features.csv");
            check(tafs_frame_write(f.get(), path.c_str()));
            std::cout << tafs_frame_rows(f.get()) << " rows x " << tafs_frame_cols(f.get()) << " columns ("
                      << dropped << " warm-up rows dropped) -> " << path << "\n";
        } else if (win->parsed()) {
            auto f = make<Frame>([&](tafs_frame** p) { return tafs_frame_read(win_features.c_str(), p); });
            auto s = make<Series>([&](tafs_series** p) { return tafs_series_load(win_prices.c_str(), p); });
            check(tafs_series_impute(s.get()));
            auto d = make<Dataset>([&](tafs_dataset** p) { return tafs_dataset_make(f.get(), s.get(), window, horizon, p); });
            const auto path = out_path(g, win_output, "dataset.csv");
            check(tafs_dataset_write(d.get(), path.c_str()));
            std::cout << tafs_dataset_rows(d.get()) << " samples x " << tafs_dataset_cols(d.get()) << " features -> "
                      << path << "\n";
        } else if (sel->parsed()) {
            auto d = make<Dataset>([&](tafs_dataset** p) { return tafs_dataset_read(sel_data.c_str(), p); });
            auto [tr, te] = sel_split.apply(d.get());
            auto r = sel_reg.build(g);
            tafs_selection_options o;
            tafs_selection_options_init(&o);
            o.method = sel_method.c_str();
            o.metric = sel_metric.c_str();
            o.cv_folds = sel_folds;
            o.max_steps = sel_steps;
            o.group_by_indicator = sel_columns ? 0 : 1;
            o.seed = g.seed.value_or(0);
            o.threads = sel_threads;
            auto result = make<Selection>([&](tafs_selection** p) { return tafs_selection_run(tr.get(), r.get(), &o, p); });
            const auto path = out_path(g, sel_output, "selection.json");
            check(tafs_selection_write(result.get(), path.c_str()));
            std::cout << "best " << sel_metric << " " << num(tafs_selection_best_score(result.get())) << " with";
            for (std::size_t i = 0; i < tafs_selection_best_count(result.get()); ++i) {
                std::cout << " " << tafs_selection_best_label(result.get(), i);
            }
            std::cout << " (" << tafs_selection_fits(result.get()) << " fits) -> " << path << "\n";
        } else if (train->parsed()) {
            auto d = restrict_to(make<Dataset>([&](tafs_dataset** p) { return tafs_dataset_read(train_data.c_str(), p); }),
                                 train_selection);
            auto [tr, te] = train_split.apply(d.get());
            auto r = train_reg.build(g);
            auto m = make<Model>([&](tafs_model** p) { return tafs_model_fit(r.get(), tr.get(), p); });
            for (std::size_t i = 0; i < tafs_model_warning_count(m.get()); ++i) {
                std::cerr << "warning: " << tafs_model_warning(m.get(), i) << "\n";
            }
            const auto path = out_path(g, train_model, "model.bin");
            check(tafs_model_save(m.get(), path.c_str()));
            std::cout << tafs_model_family(m.get()) << " on " << tafs_dataset_rows(tr.get()) << " x "
                      << tafs_model_features(m.get()) << " -> " << path << "\n";
        } else if (eval->parsed()) {
            auto d = restrict_to(make<Dataset>([&](tafs_dataset** p) { return tafs_dataset_read(eval_data.c_str(), p); }),
                                 eval_selection);
            auto [tr, te] = eval_split.apply(d.get());
            if (!grid.empty()) {
                auto r = eval_reg.build(g);
                const auto path = out_path(g, grid_output, "grid.csv");
                std::size_t best = 0;
                check(tafs_grid_search(r.get(), tr.get(), grid.c_str(), grid_folds, grid_repeats, grid_metric.c_str(),
                                       g.seed.value_or(0), path.c_str(), &best));
                std::cout << "best candidate " << best << " -> " << path << "\n";
            } else {
                if (eval_model.empty()) {
                    throw CLI::ValidationError("evaluate", "give --model or --grid");
                }
                auto m = make<Model>([&](tafs_model** p) { return tafs_model_load(eval_model.c_str(), p); });
                std::vector<double> yhat(tafs_dataset_rows(te.get()));
                check(tafs_model_predict(m.get(), te.get(), yhat.data()));
                std::vector<double> y(yhat.size());
                for (std::size_t i = 0; i < y.size(); ++i) {
                    y[i] = tafs_dataset_y(te.get(), i);
                }
                tafs_metrics metrics{};
                check(tafs_metrics_compute(y.data(), yhat.data(), y.size(), &metrics));
                print_metrics(metrics);
            }
        } else if (run->parsed()) {
            auto e = make<Experiment>(
                [&](tafs_experiment** p) { return tafs_experiment_load(g.config.empty() ? nullptr : g.config.c_str(), p); });
            if (g.seed) {
                check(tafs_experiment_set(e.get(), "seed", std::to_string(*g.seed).c_str()));
            }
            if (g.fast) {
                check(tafs_experiment_set(e.get(), "fast", "true"));
            }
            if (app.get_option("--out")->count() > 0 || g.config.empty()) {
                check(tafs_experiment_set(e.get(), "output.dir", g.out.c_str()));
            }
            for (const auto& kv : settings) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw CLI::ValidationError("--set", "expected section.key=value, got '" + kv + "'");
                }
                check(tafs_experiment_set(e.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
            }
            check(tafs_experiment_run(e.get(), log_line, nullptr));
            std::cout << "results in " << tafs_experiment_out_dir(e.get()) << "\n";
        } else {
            check(tafs_report_rebuild(g.out.c_str(), log_line, nullptr));
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << tafs_last_error() << "\n";
        return exit_code(f.status);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}
