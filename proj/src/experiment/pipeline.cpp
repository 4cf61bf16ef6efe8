#include "tafs/experiment.hpp"

#include "tafs/error.hpp"
#include "tafs/feature_frame.hpp"
#include "tafs/version.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

namespace tafs::experiment {

namespace fs = std::filesystem;

namespace {

void say(const Log& log, const std::string& message) {
    if (log) {
        log(message);
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

// Scales the feature columns and (optionally) the target of `data` with
// ranges fitted on `fit`.
void scale(windowing::WindowedDataset& data, const ingest::ScalerParams& features,
           const ingest::ScalerParams* target) {
    data.X = ingest::minmax_transform(data.X, features);
    if (target != nullptr) {
        const auto y = ingest::minmax_transform(std::span<const double>(data.y.data(), data.rows()), *target);
        data.y = Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
    }
}

windowing::WindowedDataset take(const windowing::WindowedDataset& data, std::span<const std::size_t> rows) {
    windowing::WindowedDataset out;
    out.X = evaluate::take_rows(data.X, rows);
    out.y = evaluate::take_rows(data.y, rows);
    out.feature_names = data.feature_names;
    for (const auto r : rows) {
        if (!data.sample_dates.empty()) {
            out.sample_dates.push_back(data.sample_dates[r]);
        }
        if (!data.target_dates.empty()) {
            out.target_dates.push_back(data.target_dates[r]);
        }
    }
    return out;
}

}  // namespace

ingest::PriceSeries load_series(const ExperimentConfig& config) {
    auto series = config.input.empty() ? ingest::synthetic_ohlcv(config.synthetic_days, config.seed)
                                       : ingest::load_ohlcv(config.input);
    series.validate();
    if (series.missing_count() > 0) {
        series = ingest::impute_missing(std::move(series));
    }
    return series;
}

Prepared prepare(const ExperimentConfig& config) {
    Prepared p;
    p.series = load_series(config);
    p.frame = indicators::drop_warmup(indicators::compute_all(config.roster, p.series), &p.warmup_rows);

    const auto n = p.frame.rows();
    std::size_t sel_first = 0;
    std::size_t sel_last = 0;
    std::size_t pred_first = 0;
    std::size_t pred_last = n;
    if (config.selection_end || config.prediction_start) {
        const auto& dates = p.frame.dates;
        const auto lower = [&](Date d) {
            return static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), d) - dates.begin());
        };
        const auto upper = [&](Date d) {
            return static_cast<std::size_t>(std::upper_bound(dates.begin(), dates.end(), d) - dates.begin());
        };
        sel_first = config.selection_start ? lower(*config.selection_start) : 0;
        sel_last = upper(*config.selection_end);
        pred_first = lower(*config.prediction_start);
        pred_last = config.prediction_end ? upper(*config.prediction_end) : n;
    } else {
        sel_last = static_cast<std::size_t>(std::llround(config.selection_fraction * static_cast<double>(n)));
        pred_first = sel_last;
    }
    if (sel_last <= sel_first) {
        throw InsufficientSamplesError("the selection partition contains no rows after indicator warm-up");
    }
    if (pred_last <= pred_first) {
        throw InsufficientSamplesError("the prediction partition contains no rows after indicator warm-up");
    }
    p.selection_frame = p.frame.slice(sel_first, sel_last);
    p.prediction_frame = p.frame.slice(pred_first, pred_last);
    return p;
}

PartitionData build_partition(const ExperimentConfig& config, const FeatureFrame& frame,
                              const ingest::PriceSeries& series, std::size_t window) {
    const auto imputed = ingest::impute_missing(frame);
    const auto targets = windowing::align_targets(imputed, series);
    windowing::WindowSpec spec = config.window;
    spec.window = window;
    auto data = windowing::make_windows(imputed, targets, spec);

    const auto m = data.rows();
    if (m < 3) {
        throw InsufficientSamplesError("a partition of " + std::to_string(frame.rows()) + " days yields only " +
                                       std::to_string(m) + " windowed samples");
    }
    SplitOptions options;
    options.train_fraction = config.train_fraction;
    options.shuffle = config.shuffle_split;
    options.scale_target = config.scale_target;
    options.fit_on_full = config.scaler_fit_full;
    options.seed = config.seed;
    auto out = split_dataset(std::move(data), options);
    out.frame_rows = frame.rows();
    return out;
}

PartitionData split_dataset(windowing::WindowedDataset data, const SplitOptions& options) {
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie in (0, 1)");
    }
    const auto m = data.rows();
    if (m < 3) {
        throw InsufficientSamplesError("splitting needs at least 3 samples, got " + std::to_string(m));
    }
    auto n_train = static_cast<std::size_t>(std::floor(options.train_fraction * static_cast<double>(m)));
    n_train = std::clamp<std::size_t>(n_train, 2, m - 1);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (options.shuffle) {
        std::mt19937_64 rng(options.seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    const std::span<const std::size_t> all(order);

    PartitionData out;
    out.train = take(data, all.first(n_train));
    out.test = take(data, all.subspan(n_train));

    if (options.scale) {
        const auto& fit_on = options.fit_on_full ? data : out.train;
        const auto features = ingest::minmax_fit(fit_on.X);
        std::optional<ingest::ScalerParams> target;
        if (options.scale_target) {
            target = ingest::minmax_fit(std::span<const double>(fit_on.y.data(), fit_on.rows()));
        }
        const auto* target_ptr = target ? &*target : nullptr;
        scale(out.train, features, target_ptr);
        scale(out.test, features, target_ptr);
        scale(data, features, target_ptr);
    }
    out.full = std::move(data);
    return out;
}

std::vector<SelectionRun> selection_matrix(const ExperimentConfig& config) {
    std::vector<SelectionRun> runs;
    for (const auto method : config.methods) {
        for (const auto family : config.families) {
            for (const auto metric : config.metrics) {
                runs.push_back({method, family, metric});
            }
        }
    }
    return runs;
}

std::string run_name(const SelectionRun& run) {
    return std::string(select::method_name(run.method)) + "_" + std::string(regress::family_name(run.family)) + "_" +
           std::string(evaluate::metric_name(run.metric));
}

std::vector<select::SelectionResult> run_selection_phase(const ExperimentConfig& config, const PartitionData& selection,
                                                         const Log& log) {
    config.validate();
    const auto& data = config.score_on_full_partition ? selection.full : selection.train;
    if (data.rows() < config.cv_folds) {
        throw InsufficientSamplesError("the selection partition yields " + std::to_string(data.rows()) +
                                       " samples, fewer than cv_folds = " + std::to_string(config.cv_folds));
    }
    std::vector<select::SelectionResult> results;
    for (const auto& run : selection_matrix(config)) {
        select::SelectionConfig sc;
        sc.method = run.method;
        sc.regressor = config.regressor(run.family);
        sc.metric = run.metric;
        sc.cv_folds = config.cv_folds;
        sc.cv_shuffle = config.cv_shuffle;
        sc.group_by_indicator = config.group_by_indicator;
        if (config.max_steps > 0) {
            sc.max_steps = config.max_steps;
        }
        sc.seed = config.seed;
        sc.threads = config.threads;
        auto result = select::run_selection(data, sc);
        say(log, "selection " + run_name(run) + ": best " + std::string(evaluate::metric_name(run.metric)) + " " +
                     format_number(result.best_score) + " with " + std::to_string(result.best_subset.size()) + " of " +
                     std::to_string(result.groups.size()) + " groups (" + std::to_string(result.fits) + " fits)");
        results.push_back(std::move(result));
    }
    return results;
}

double PredictionReport::improvement(evaluate::Metric metric) const {
    if (metric == evaluate::Metric::R2) {
        return kMissing;
    }
    const double base = baseline.get(metric);
    if (!(base != 0.0) || std::isnan(base)) {
        return kMissing;
    }
    return 100.0 * (base - selected.get(metric)) / base;
}

std::vector<PredictionReport> run_prediction_phase(const ExperimentConfig& config, const PartitionData& prediction,
                                                   const std::vector<select::SelectionResult>& selections,
                                                   const Log& log) {
    const auto groups = prediction.train.groups(config.group_by_indicator);
    std::map<regress::Family, Vector> baselines;
    std::vector<PredictionReport> reports;
    for (const auto& s : selections) {
        std::vector<std::size_t> ids;
        for (const auto& label : s.labels(s.best_subset)) {
            const auto id = groups.find(label);
            if (id == groups.size()) {
                throw ReferenceError("selected feature group '" + label + "' is not in the prediction dataset");
            }
            ids.push_back(id);
        }
        const auto cols = groups.columns_of(ids);
        const auto reg = config.regressor(s.family);

        PredictionReport r;
        r.run = {s.method, s.family, s.metric};
        r.subset = s.labels(s.best_subset);
        r.test_dates = prediction.test.sample_dates;
        r.actual = prediction.test.y;
        const auto model = regress::fit(reg, prediction.train.select_columns(cols).X, prediction.train.y);
        r.predicted_selected = model->predict(prediction.test.select_columns(cols).X);
        auto it = baselines.find(s.family);
        if (it == baselines.end()) {
            const auto full = regress::fit(reg, prediction.train.X, prediction.train.y);
            it = baselines.emplace(s.family, full->predict(prediction.test.X)).first;
        }
        r.predicted_baseline = it->second;
        r.selected = evaluate::metrics(r.actual, r.predicted_selected);
        r.baseline = evaluate::metrics(r.actual, r.predicted_baseline);
        say(log, "prediction " + run_name(r.run) + ": test " + std::string(evaluate::metric_name(s.metric)) + " " +
                     format_number(r.selected.get(s.metric)) + " vs all features " +
                     format_number(r.baseline.get(s.metric)));
        reports.push_back(std::move(r));
    }
    return reports;
}

std::vector<SweepPoint> window_sweep(const ExperimentConfig& config, const Prepared& prepared, const Log& log) {
    std::vector<SweepPoint> points;
    const auto reg = config.regressor(config.sweep_family);
    for (const auto w : config.sweep_sizes) {
        const auto part = build_partition(config, prepared.prediction_frame, prepared.series, w);
        const auto model = regress::fit(reg, part.train.X, part.train.y);
        const double mse = evaluate::metrics(part.test.y, model->predict(part.test.X)).mse;
        say(log, "window sweep w=" + std::to_string(w) + ": test mse " + format_number(mse));
        points.push_back({w, mse});
    }
    return points;
}

void write_reports(const std::string& out_dir, const std::vector<PredictionReport>& reports) {
    const fs::path dir = fs::path(out_dir) / "reports";
    fs::create_directories(dir);

    std::vector<evaluate::MetricRow> rows;
    std::vector<evaluate::MetricRow> baseline_rows;
    std::map<std::pair<regress::Family, evaluate::Metric>, bool> seen;
    for (const auto& r : reports) {
        const auto family = std::string(regress::family_name(r.run.family));
        const auto metric = std::string(evaluate::metric_name(r.run.metric));
        rows.push_back({family + "SF", std::string(select::method_name(r.run.method)), metric,
                        r.selected.get(r.run.metric)});
        if (!seen[{r.run.family, r.run.metric}]) {
            seen[{r.run.family, r.run.metric}] = true;
            baseline_rows.push_back({family, "all", metric, r.baseline.get(r.run.metric)});
        }
    }
    rows.insert(rows.end(), baseline_rows.begin(), baseline_rows.end());
    {
        auto out = open_out(dir / "metrics.csv");
        evaluate::write_metrics_csv(rows, out);
    }
    {
        auto out = open_out(dir / "improvement.csv");
        out << "model,method,metric_name,baseline,selected,improvement_pct\n";
        for (const auto& r : reports) {
            for (const auto metric : evaluate::all_metrics()) {
                if (metric == evaluate::Metric::R2) {
                    continue;
                }
                out << regress::family_name(r.run.family) << "SF," << select::method_name(r.run.method) << "-"
                    << evaluate::metric_name(r.run.metric) << "," << evaluate::metric_name(metric) << ","
                    << format_number(r.baseline.get(metric)) << "," << format_number(r.selected.get(metric)) << ","
                    << format_number(r.improvement(metric)) << "\n";
            }
        }
    }
    {
        auto out = open_out(dir / "detail.csv");
        out << "model,method,selection_metric,subset_size,subset,test_samples";
        for (const auto metric : evaluate::all_metrics()) {
            out << "," << evaluate::metric_name(metric);
        }
        for (const auto metric : evaluate::all_metrics()) {
            out << ",baseline_" << evaluate::metric_name(metric);
        }
        out << "\n";
        for (const auto& r : reports) {
            std::string subset;
            for (const auto& g : r.subset) {
                subset += (subset.empty() ? "" : ";") + g;
            }
            out << regress::family_name(r.run.family) << "SF," << select::method_name(r.run.method) << ","
                << evaluate::metric_name(r.run.metric) << "," << r.subset.size() << "," << subset << ","
                << r.selected.n;
            for (const auto metric : evaluate::all_metrics()) {
                out << "," << format_number(r.selected.get(metric));
            }
            for (const auto metric : evaluate::all_metrics()) {
                out << "," << format_number(r.baseline.get(metric));
            }
            out << "\n";
        }
    }
}

Summary run_experiment(const ExperimentConfig& requested, const Log& log) {
    const auto config = resolve_profile(requested);
    config.validate();
    const fs::path root(config.out_dir);
    try {
        for (const auto* sub : {"selection", "reports", "plots"}) {
            fs::remove_all(root / sub);
        }
        fs::create_directories(root / "selection");
    } catch (const fs::filesystem_error& e) {
        throw IoError(std::string("cannot prepare output directory: ") + e.what());
    }

    const auto prepared = prepare(config);
    say(log, "data: " + std::to_string(prepared.series.size()) + " days, " + std::to_string(prepared.frame.cols()) +
                 " indicator columns, " + std::to_string(prepared.warmup_rows) + " warm-up rows dropped");
    const auto selection = build_partition(config, prepared.selection_frame, prepared.series, config.window.window);
    const auto prediction = build_partition(config, prepared.prediction_frame, prepared.series, config.window.window);
    say(log, "selection partition: " + std::to_string(selection.full.rows()) + " samples; prediction partition: " +
                 std::to_string(prediction.full.rows()) + " samples");

    const auto selections = run_selection_phase(config, selection, log);
    const auto runs = selection_matrix(config);
    for (std::size_t i = 0; i < selections.size(); ++i) {
        select::write_selection(selections[i], (root / "selection" / (run_name(runs[i]) + ".json")).string());
    }
    const auto reports = run_prediction_phase(config, prediction, selections, log);
    write_reports(config.out_dir, reports);
    const auto sweep = window_sweep(config, prepared, log);
    emit_plots(config.out_dir, reports, sweep, selections, log);

    {
        auto out = open_out(root / "config.ini");
        out << canonical_text(config);
    }
    {
        const auto text = canonical_text(config);
        char hash[32];
        std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
        const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
        const auto day = std::chrono::floor<std::chrono::days>(now);
        const std::chrono::hh_mm_ss hms(now - day);
        char stamp[32];
        std::snprintf(stamp, sizeof(stamp), "%sT%02d:%02d:%02dZ", format_date(Date{day}).c_str(),
                      static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                      static_cast<int>(hms.seconds().count()));
        auto out = open_out(root / "manifest");
        out << "version = " << TAFS_VERSION_STRING << "\n";
        out << "model_format = " << static_cast<int>(regress::kModelFormatVersion) << "\n";
        out << "config_hash = fnv1a64:" << hash << "\n";
        out << "seed = " << config.seed << "\n";
        out << "fast = " << (config.fast ? "true" : "false") << "\n";
        out << "selection_samples = " << selection.full.rows() << "\n";
        out << "prediction_samples = " << prediction.full.rows() << "\n";
        out << "timestamp = " << stamp << "\n";
    }

    Summary s;
    s.selection_runs = selections.size();
    s.prediction_reports = reports.size();
    s.selection_samples = selection.full.rows();
    s.prediction_samples = prediction.full.rows();
    return s;
}

}  // namespace tafs::experiment
