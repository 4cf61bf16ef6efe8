#include "tafs/tafs.h"

#include "common/text.hpp"
#include "tafs/error.hpp"
#include "tafs/evaluate.hpp"
#include "tafs/experiment.hpp"
#include "tafs/indicators.hpp"
#include "tafs/ingest.hpp"
#include "tafs/regress.hpp"
#include "tafs/select.hpp"
#include "tafs/version.hpp"
#include "tafs/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

using namespace tafs;

struct tafs_series {
    ingest::PriceSeries value;
};
struct tafs_frame {
    FeatureFrame value;
};
struct tafs_dataset {
    windowing::WindowedDataset value;
};
struct tafs_regressor {
    regress::RegressorConfig value;
};
struct tafs_model {
    std::unique_ptr<regress::RegressorModel> value;
};
struct tafs_selection {
    select::SelectionResult value;
    std::vector<std::string> best_labels;
};
struct tafs_experiment {
    experiment::ExperimentConfig value;
    std::string base_dir = ".";
};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string g_last_error;

tafs_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return TAFS_ERR_CONFIG;
        case ErrorKind::Data: return TAFS_ERR_DATA;
        case ErrorKind::Numeric: return TAFS_ERR_NUMERIC;
        case ErrorKind::Io: return TAFS_ERR_IO;
    }
    return TAFS_ERR_INTERNAL;
}

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Runs `fn`, translating exceptions into a status and the thread's message.
template <typename Fn>
tafs_status guard(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return TAFS_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const ArgumentError& e) {
        g_last_error = e.what();
        return TAFS_ERR_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TAFS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TAFS_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return TAFS_ERR_INTERNAL;
    }
}

template <typename T>
void require(const T* p, const char* what) {
    if (p == nullptr) {
        throw ArgumentError(std::string(what) + " is NULL");
    }
}

template <typename Handle, typename Value>
void emit(Handle** out, Value&& value) {
    require(out, "output pointer");
    *out = new Handle{std::forward<Value>(value)};
}

std::vector<indicators::IndicatorSpec> roster_from(const char* text) {
    if (text == nullptr) {
        return indicators::default_roster();
    }
    std::string lines(text);
    std::replace(lines.begin(), lines.end(), ';', '\n');
    return indicators::parse_roster(std::string_view(lines));
}

evaluate::ParamGrid parse_grid(std::string_view text) {
    evaluate::ParamGrid grid;
    for (const auto& entry : detail::split(text, ';')) {
        const auto item = detail::trim(entry);
        if (item.empty()) {
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("grid entry '" + std::string(item) + "' lacks '='");
        }
        std::vector<std::string> values;
        for (const auto& v : detail::split(item.substr(eq + 1), ',')) {
            values.emplace_back(detail::trim(v));
        }
        grid.emplace_back(detail::lower(detail::trim(item.substr(0, eq))), std::move(values));
    }
    if (grid.empty()) {
        throw ConfigError("empty parameter grid");
    }
    return grid;
}

struct LogBridge {
    tafs_log_fn fn;
    void* user;
    void operator()(std::string_view line) const {
        if (fn != nullptr) {
            const std::string copy(line);
            fn(copy.c_str(), user);
        }
    }
};

}  // namespace

extern "C" {

const char* tafs_version(void) { return TAFS_VERSION_STRING; }

const char* tafs_last_error(void) { return g_last_error.c_str(); }

// ---- series

tafs_status tafs_series_load(const char* path, tafs_series** out) {
    return guard([&] {
        require(out, "output pointer");
        require(path, "path");
        emit(out, ingest::load_ohlcv(path));
    });
}

tafs_status tafs_series_synthetic(size_t days, uint64_t seed, tafs_series** out) {
    return guard([&] {
        require(out, "output pointer");
        emit(out, ingest::synthetic_ohlcv(days, seed));
    });
}

tafs_status tafs_series_impute(tafs_series* series) {
    return guard([&] {
        require(series, "series");
        series->value = ingest::impute_missing(std::move(series->value));
    });
}

size_t tafs_series_length(const tafs_series* series) { return series ? series->value.size() : 0; }

size_t tafs_series_missing(const tafs_series* series) { return series ? series->value.missing_count() : 0; }

tafs_status tafs_series_write(const tafs_series* series, const char* path) {
    return guard([&] {
        require(series, "series");
        require(path, "path");
        ingest::write_ohlcv(series->value, std::string(path));
    });
}

void tafs_series_free(tafs_series* series) { delete series; }

// ---- indicators

size_t tafs_indicator_count(void) { return indicators::native_registry().names().size(); }

const char* tafs_indicator_name(size_t i) {
    static const std::vector<std::string> names = indicators::native_registry().names();
    return i < names.size() ? names[i].c_str() : nullptr;
}

tafs_status tafs_indicators_compute(const tafs_series* series, const char* roster, int drop_warmup, tafs_frame** out,
                                    size_t* dropped) {
    return guard([&] {
        require(out, "output pointer");
        require(series, "series");
        auto frame = indicators::compute_all(roster_from(roster), series->value);
        std::size_t n = 0;
        if (drop_warmup != 0) {
            frame = indicators::drop_warmup(frame, &n);
        }
        emit(out, std::move(frame));
        if (dropped != nullptr) {
            *dropped = n;
        }
    });
}

tafs_status tafs_frame_read(const char* path, tafs_frame** out) {
    return guard([&] {
        require(out, "output pointer");
        require(path, "path");
        emit(out, read_frame_csv(std::string(path)));
    });
}

tafs_status tafs_frame_write(const tafs_frame* frame, const char* path) {
    return guard([&] {
        require(frame, "frame");
        require(path, "path");
        write_frame_csv(frame->value, std::string(path));
    });
}

size_t tafs_frame_rows(const tafs_frame* frame) { return frame ? frame->value.rows() : 0; }

size_t tafs_frame_cols(const tafs_frame* frame) { return frame ? frame->value.cols() : 0; }

const char* tafs_frame_column_name(const tafs_frame* frame, size_t col) {
    if (frame == nullptr || col >= frame->value.cols()) {
        return nullptr;
    }
    return frame->value.columns[col].name.c_str();
}

double tafs_frame_value(const tafs_frame* frame, size_t row, size_t col) {
    if (frame == nullptr || col >= frame->value.cols() || row >= frame->value.rows()) {
        return kNaN;
    }
    return frame->value.columns[col].values[row];
}

void tafs_frame_free(tafs_frame* frame) { delete frame; }

// ---- datasets

tafs_status tafs_dataset_make(const tafs_frame* frame, const tafs_series* series, size_t window, size_t horizon,
                              tafs_dataset** out) {
    return guard([&] {
        require(out, "output pointer");
        require(frame, "frame");
        require(series, "series");
        const auto imputed = ingest::impute_missing(frame->value);
        const auto targets = windowing::align_targets(imputed, series->value);
        emit(out, windowing::make_windows(imputed, targets, windowing::WindowSpec{window, horizon}));
    });
}

tafs_status tafs_dataset_from_arrays(const double* X, const double* y, size_t rows, size_t cols,
                                     const char* const* names, tafs_dataset** out) {
    return guard([&] {
        require(out, "output pointer");
        if (rows > 0 && cols > 0) {
            require(X, "X");
        }
        if (rows > 0) {
            require(y, "y");
        }
        windowing::WindowedDataset data;
        const auto r = static_cast<Eigen::Index>(rows);
        const auto c = static_cast<Eigen::Index>(cols);
        data.X = Matrix(r, c);
        data.y = Vector(r);
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = 0; j < c; ++j) {
                data.X(i, j) = X[i * c + j];
            }
            data.y(i) = y[i];
        }
        for (size_t j = 0; j < cols; ++j) {
            data.feature_names.push_back(names != nullptr && names[j] != nullptr ? std::string(names[j])
                                                                                  : "x" + std::to_string(j));
        }
        emit(out, std::move(data));
    });
}

tafs_status tafs_dataset_read(const char* path, tafs_dataset** out) {
    return guard([&] {
        require(out, "output pointer");
        require(path, "path");
        emit(out, windowing::read_dataset_csv(std::string(path)));
    });
}

tafs_status tafs_dataset_write(const tafs_dataset* data, const char* path) {
    return guard([&] {
        require(data, "dataset");
        require(path, "path");
        windowing::write_dataset_csv(data->value, std::string(path));
    });
}

tafs_status tafs_dataset_split(const tafs_dataset* data, double train_fraction, int shuffle, uint64_t seed, int scale,
                               tafs_dataset** train, tafs_dataset** test) {
    return guard([&] {
        require(data, "dataset");
        require(train, "train output");
        require(test, "test output");
        experiment::SplitOptions options;
        options.train_fraction = train_fraction;
        options.shuffle = shuffle != 0;
        options.seed = seed;
        options.scale = scale != 0;
        auto parts = experiment::split_dataset(data->value, options);
        auto a = std::make_unique<tafs_dataset>(tafs_dataset{std::move(parts.train)});
        auto b = std::make_unique<tafs_dataset>(tafs_dataset{std::move(parts.test)});
        *train = a.release();
        *test = b.release();
    });
}

size_t tafs_dataset_rows(const tafs_dataset* data) { return data ? data->value.rows() : 0; }

size_t tafs_dataset_cols(const tafs_dataset* data) { return data ? data->value.cols() : 0; }

const char* tafs_dataset_feature_name(const tafs_dataset* data, size_t col) {
    if (data == nullptr || col >= data->value.feature_names.size()) {
        return nullptr;
    }
    return data->value.feature_names[col].c_str();
}

double tafs_dataset_x(const tafs_dataset* data, size_t row, size_t col) {
    if (data == nullptr || row >= data->value.rows() || col >= data->value.cols()) {
        return kNaN;
    }
    return data->value.X(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

double tafs_dataset_y(const tafs_dataset* data, size_t row) {
    if (data == nullptr || row >= data->value.rows()) {
        return kNaN;
    }
    return data->value.y(static_cast<Eigen::Index>(row));
}

void tafs_dataset_free(tafs_dataset* data) { delete data; }

// ---- regressors

tafs_status tafs_regressor_create(const char* family, uint64_t seed, int tuned, tafs_regressor** out) {
    return guard([&] {
        require(out, "output pointer");
        require(family, "family");
        const auto f = regress::parse_family(family);
        regress::RegressorConfig config;
        if (tuned != 0) {
            config = regress::RegressorConfig::tuned(f, seed);
        } else {
            config.family = f;
            config.seed = seed;
        }
        emit(out, std::move(config));
    });
}

tafs_status tafs_regressor_set(tafs_regressor* config, const char* key, const char* value) {
    return guard([&] {
        require(config, "regressor");
        require(key, "key");
        require(value, "value");
        config->value.set(detail::lower(detail::trim(key)), std::string(detail::trim(value)));
    });
}

tafs_status tafs_regressor_fast(tafs_regressor* config, size_t cap) {
    return guard([&] {
        require(config, "regressor");
        config->value = config->value.fast(cap);
    });
}

tafs_status tafs_regressor_validate(const tafs_regressor* config) {
    return guard([&] {
        require(config, "regressor");
        config->value.validate();
    });
}

void tafs_regressor_free(tafs_regressor* config) { delete config; }

tafs_status tafs_model_fit(const tafs_regressor* config, const tafs_dataset* data, tafs_model** out) {
    return guard([&] {
        require(out, "output pointer");
        require(config, "regressor");
        require(data, "dataset");
        emit(out, regress::fit(config->value, data->value.X, data->value.y));
    });
}

tafs_status tafs_model_predict(const tafs_model* model, const tafs_dataset* data, double* out) {
    return guard([&] {
        require(model, "model");
        require(data, "dataset");
        const auto yhat = model->value->predict(data->value.X);
        if (yhat.size() > 0) {
            require(out, "output buffer");
        }
        std::copy(yhat.data(), yhat.data() + yhat.size(), out);
    });
}

tafs_status tafs_model_save(const tafs_model* model, const char* path) {
    return guard([&] {
        require(model, "model");
        require(path, "path");
        regress::save_model(*model->value, path);
    });
}

tafs_status tafs_model_load(const char* path, tafs_model** out) {
    return guard([&] {
        require(out, "output pointer");
        require(path, "path");
        emit(out, regress::load_model(path));
    });
}

const char* tafs_model_family(const tafs_model* model) {
    // family_name views static storage, so the pointer stays valid.
    return model ? regress::family_name(model->value->family()).data() : nullptr;
}

size_t tafs_model_features(const tafs_model* model) { return model ? model->value->n_features() : 0; }

size_t tafs_model_warning_count(const tafs_model* model) {
    return model ? model->value->info().warnings.size() : 0;
}

const char* tafs_model_warning(const tafs_model* model, size_t i) {
    if (model == nullptr || i >= model->value->info().warnings.size()) {
        return nullptr;
    }
    return model->value->info().warnings[i].c_str();
}

void tafs_model_free(tafs_model* model) { delete model; }

uint64_t tafs_fit_count(void) { return regress::fit_call_count(); }

// ---- metrics

tafs_status tafs_metrics_compute(const double* y, const double* yhat, size_t n, tafs_metrics* out) {
    return guard([&] {
        require(out, "output");
        if (n > 0) {
            require(y, "y");
            require(yhat, "yhat");
        }
        const auto r = evaluate::metrics(std::span<const double>(y, n), std::span<const double>(yhat, n));
        *out = tafs_metrics{r.r2, r.mse, r.rmse, r.mae, r.mape, r.mape_skipped, r.n};
    });
}

tafs_status tafs_grid_search(const tafs_regressor* base, const tafs_dataset* data, const char* grid, size_t folds,
                             size_t repeats, const char* metric, uint64_t seed, const char* csv_path, size_t* best) {
    return guard([&] {
        require(base, "regressor");
        require(data, "dataset");
        require(grid, "grid");
        evaluate::GridSearchOptions options;
        options.folds = folds;
        options.repeats = repeats;
        options.metric = metric ? evaluate::parse_metric(metric) : evaluate::Metric::MSE;
        options.seed = seed;
        const auto result = evaluate::grid_search(parse_grid(grid), base->value, data->value.X, data->value.y, options);
        if (csv_path != nullptr) {
            std::ofstream out(csv_path, std::ios::binary);
            if (!out) {
                throw IoError(std::string("cannot open '") + csv_path + "' for writing");
            }
            const auto width = result.fold_scores.cols();
            const auto& keys = result.candidates.front().params;
            for (const auto& [key, value] : keys) {
                out << key << ",";
            }
            out << "mean,stdev";
            for (Eigen::Index c = 0; c < width; ++c) {
                out << ",r" << c / static_cast<Eigen::Index>(folds) << "f" << c % static_cast<Eigen::Index>(folds);
            }
            out << "\n";
            for (std::size_t i = 0; i < result.candidates.size(); ++i) {
                const auto& cand = result.candidates[i];
                for (const auto& [key, value] : cand.params) {
                    out << value << ",";
                }
                out << format_number(cand.mean) << "," << format_number(cand.stdev);
                for (Eigen::Index c = 0; c < width; ++c) {
                    out << "," << format_number(result.fold_scores(static_cast<Eigen::Index>(i), c));
                }
                out << "\n";
            }
            if (!out) {
                throw IoError(std::string("failed writing '") + csv_path + "'");
            }
        }
        if (best != nullptr) {
            *best = result.best;
        }
    });
}

// ---- selection

void tafs_selection_options_init(tafs_selection_options* options) {
    if (options != nullptr) {
        *options = tafs_selection_options{"sfs", "mse", 5, 0, 1, 0, 0, 1};
    }
}

namespace {

tafs_selection* wrap(select::SelectionResult result) {
    auto out = std::make_unique<tafs_selection>();
    out->best_labels = result.labels(result.best_subset);
    out->value = std::move(result);
    return out.release();
}

}  // namespace

tafs_status tafs_selection_run(const tafs_dataset* data, const tafs_regressor* config,
                               const tafs_selection_options* options, tafs_selection** out) {
    return guard([&] {
        require(data, "dataset");
        require(config, "regressor");
        require(out, "output pointer");
        tafs_selection_options defaults;
        tafs_selection_options_init(&defaults);
        const auto& o = options ? *options : defaults;
        select::SelectionConfig sc;
        sc.method = select::parse_method(o.method ? o.method : "sfs");
        sc.metric = evaluate::parse_metric(o.metric ? o.metric : "mse");
        sc.regressor = config->value;
        sc.cv_folds = o.cv_folds;
        sc.cv_shuffle = o.cv_shuffle != 0;
        sc.group_by_indicator = o.group_by_indicator != 0;
        if (o.max_steps > 0) {
            sc.max_steps = o.max_steps;
        }
        sc.seed = o.seed;
        sc.threads = std::max<std::size_t>(1, o.threads);
        *out = wrap(select::run_selection(data->value, sc));
    });
}

tafs_status tafs_selection_read(const char* path, tafs_selection** out) {
    return guard([&] {
        require(path, "path");
        require(out, "output pointer");
        *out = wrap(select::read_selection(path));
    });
}

tafs_status tafs_selection_write(const tafs_selection* selection, const char* path) {
    return guard([&] {
        require(selection, "selection");
        require(path, "path");
        select::write_selection(selection->value, path);
    });
}

double tafs_selection_best_score(const tafs_selection* selection) {
    return selection ? selection->value.best_score : kNaN;
}

size_t tafs_selection_best_count(const tafs_selection* selection) {
    return selection ? selection->best_labels.size() : 0;
}

const char* tafs_selection_best_label(const tafs_selection* selection, size_t i) {
    if (selection == nullptr || i >= selection->best_labels.size()) {
        return nullptr;
    }
    return selection->best_labels[i].c_str();
}

size_t tafs_selection_fits(const tafs_selection* selection) { return selection ? selection->value.fits : 0; }

tafs_status tafs_dataset_restrict(const tafs_dataset* data, const tafs_selection* selection, tafs_dataset** out) {
    return guard([&] {
        require(out, "output pointer");
        require(data, "dataset");
        require(selection, "selection");
        const auto groups = data->value.groups(true);
        std::vector<std::size_t> ids;
        for (const auto& label : selection->best_labels) {
            const auto id = groups.find(label);
            if (id == groups.size()) {
                throw ReferenceError("selected group '" + label + "' is not in the dataset");
            }
            ids.push_back(id);
        }
        emit(out, data->value.select_columns(groups.columns_of(ids)));
    });
}

void tafs_selection_free(tafs_selection* selection) { delete selection; }

// ---- experiments

tafs_status tafs_experiment_load(const char* path, tafs_experiment** out) {
    return guard([&] {
        require(out, "output pointer");
        auto e = std::make_unique<tafs_experiment>();
        if (path != nullptr) {
            e->value = experiment::load_config(path);
            const auto parent = std::filesystem::path(path).parent_path();
            e->base_dir = parent.empty() ? "." : parent.string();
        }
        *out = e.release();
    });
}

tafs_status tafs_experiment_set(tafs_experiment* experiment, const char* key, const char* value) {
    return guard([&] {
        require(experiment, "experiment");
        require(key, "key");
        require(value, "value");
        const std::string_view k(key);
        const auto dot = k.rfind('.');
        const auto section = dot == std::string_view::npos ? std::string_view{} : k.substr(0, dot);
        const auto name = dot == std::string_view::npos ? k : k.substr(dot + 1);
        experiment::apply_setting(experiment->value, section, name, value, experiment->base_dir);
    });
}

tafs_status tafs_experiment_run(const tafs_experiment* experiment, tafs_log_fn log, void* user) {
    return guard([&] {
        require(experiment, "experiment");
        experiment::run_experiment(experiment->value, LogBridge{log, user});
    });
}

const char* tafs_experiment_out_dir(const tafs_experiment* experiment) {
    return experiment ? experiment->value.out_dir.c_str() : nullptr;
}

void tafs_experiment_free(tafs_experiment* experiment) { delete experiment; }

tafs_status tafs_report_rebuild(const char* out_dir, tafs_log_fn log, void* user) {
    return guard([&] {
        require(out_dir, "output directory");
        experiment::rebuild_report(out_dir, LogBridge{log, user});
    });
}

}  // extern "C"
