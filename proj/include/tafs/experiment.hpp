#pragma once

#include "tafs/date.hpp"
#include "tafs/evaluate.hpp"
#include "tafs/indicators.hpp"
#include "tafs/ingest.hpp"
#include "tafs/regress.hpp"
#include "tafs/select.hpp"
#include "tafs/windowing.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tafs::experiment {

using Log = std::function<void(std::string_view)>;

/// The whole two-phase run. Loaded from a sectioned key=value file:
///
///   seed = 7                 top-level: seed, fast, threads
///   [data]                   input, synthetic_days, selection_start/_end,
///                            prediction_start/_end, selection_fraction,
///                            train_fraction, shuffle_split, scale_target, scaler_fit
///   [indicators]             roster (specs separated by ';'), roster_file
///   [window]                 size, horizon, sweep, sweep_regressor
///   [selection]              methods, regressors, metrics, cv_folds, cv_shuffle,
///                            group_by_indicator, max_steps, score_on
///   [regressors.<family>]    hyperparameters layered over the tuned defaults
///   [output]                 dir
struct ExperimentConfig {
    std::string input;                // OHLCV CSV; empty means synthetic data
    std::size_t synthetic_days = 300;

    std::optional<Date> selection_start;
    std::optional<Date> selection_end;
    std::optional<Date> prediction_start;
    std::optional<Date> prediction_end;
    /// Share of rows given to the selection partition when no dates are set.
    double selection_fraction = 1006.0 / 3272.0;
    double train_fraction = 0.70;
    bool shuffle_split = false;
    bool scale_target = true;
    bool scaler_fit_full = false;  // fit the scalers on the whole partition

    std::vector<indicators::IndicatorSpec> roster = indicators::default_roster();

    windowing::WindowSpec window;
    std::vector<std::size_t> sweep_sizes{1, 2, 3, 5, 7, 10};
    regress::Family sweep_family = regress::Family::LR;

    std::vector<select::Method> methods{select::Method::SFS, select::Method::SBS};
    std::vector<regress::Family> families{regress::all_families().begin(), regress::all_families().end()};
    std::vector<evaluate::Metric> metrics{evaluate::all_metrics().begin(), evaluate::all_metrics().end()};
    std::size_t cv_folds = 5;
    bool cv_shuffle = false;
    bool group_by_indicator = true;
    std::size_t max_steps = 0;  // 0 = full greedy path
    bool score_on_full_partition = false;
    std::map<regress::Family, std::map<std::string, std::string>> overrides;

    bool fast = false;
    std::size_t fast_cap = 50;
    // Set when the roster or any of methods/regressors/metrics was assigned;
    // the fast profile leaves explicit choices alone.
    bool roster_set = false;
    bool matrix_set = false;
    std::size_t threads = 1;
    std::string out_dir = "out";
    std::uint64_t seed = 0;

    /// Throws ConfigError when the run cannot be described consistently.
    void validate() const;

    /// Tuned defaults, overrides, seed and the fast cap applied.
    regress::RegressorConfig regressor(regress::Family family) const;
};

/// Twelve common indicators used by the fast profile.
std::vector<indicators::IndicatorSpec> fast_roster();
/// With `fast` on, swaps an unset roster for fast_roster() and an unset
/// matrix for {SFS,SBS} x {LR,Ridge,KNN,DTR} x {MSE}.
ExperimentConfig resolve_profile(ExperimentConfig config);

/// `base_dir` resolves relative input/roster paths.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
/// Applies one `key` or `section.key` assignment as the file would.
void apply_setting(ExperimentConfig& config, std::string_view section, std::string_view key, std::string_view value,
                   const std::string& base_dir = ".");
/// Canonical text of every setting; equal configs give equal text.
std::string canonical_text(const ExperimentConfig& config);
/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

/// One partition after windowing, split and scaling.
struct PartitionData {
    windowing::WindowedDataset full;   // every window of the partition, scaled
    windowing::WindowedDataset train;  // first train_fraction of the rows
    windowing::WindowedDataset test;
    std::size_t frame_rows = 0;
};

struct Prepared {
    ingest::PriceSeries series;
    FeatureFrame frame;  // indicators after warm-up removal, before partitioning
    std::size_t warmup_rows = 0;
    FeatureFrame selection_frame;
    FeatureFrame prediction_frame;
};

struct SplitOptions {
    double train_fraction = 0.70;
    bool shuffle = false;       // seeded row shuffle before the cut
    bool scale = true;          // min-max scale the features
    bool scale_target = true;   // ... and the target
    bool fit_on_full = false;   // fit the scalers on all rows instead of train
    std::uint64_t seed = 0;
};

/// Train/test cut at floor(train_fraction*m), clamped to [2, m-1], then
/// scaling. Throws InsufficientSamplesError when m < 3.
PartitionData split_dataset(windowing::WindowedDataset data, const SplitOptions& options);

ingest::PriceSeries load_series(const ExperimentConfig& config);
Prepared prepare(const ExperimentConfig& config);
/// Imputes, windows, splits chronologically and scales one partition.
PartitionData build_partition(const ExperimentConfig& config, const FeatureFrame& frame,
                              const ingest::PriceSeries& series, std::size_t window);

struct SelectionRun {
    select::Method method;
    regress::Family family;
    evaluate::Metric metric;
};

std::vector<SelectionRun> selection_matrix(const ExperimentConfig& config);
std::string run_name(const SelectionRun& run);

std::vector<select::SelectionResult> run_selection_phase(const ExperimentConfig& config, const PartitionData& selection,
                                                         const Log& log = {});

struct PredictionReport {
    SelectionRun run;
    std::vector<std::string> subset;  // group labels
    evaluate::MetricReport selected;
    evaluate::MetricReport baseline;
    std::vector<Date> test_dates;
    Vector actual;
    Vector predicted_selected;
    Vector predicted_baseline;

    /// 100*(baseline-selected)/baseline for error metrics; NaN for r2 or a
    /// zero baseline.
    double improvement(evaluate::Metric metric) const;
};

/// Throws ReferenceError when a selected group is absent from `prediction`.
std::vector<PredictionReport> run_prediction_phase(const ExperimentConfig& config, const PartitionData& prediction,
                                                   const std::vector<select::SelectionResult>& selections,
                                                   const Log& log = {});

struct SweepPoint {
    std::size_t window = 0;
    double mse = 0.0;
};

/// Test MSE of the sweep regressor on the prediction partition per window size.
std::vector<SweepPoint> window_sweep(const ExperimentConfig& config, const Prepared& prepared, const Log& log = {});

void write_reports(const std::string& out_dir, const std::vector<PredictionReport>& reports);
/// Figure files: pred-vs-actual per report, window sweep, census (top 30).
void emit_plots(const std::string& out_dir, const std::vector<PredictionReport>& reports,
                const std::vector<SweepPoint>& sweep, const std::vector<select::SelectionResult>& selections,
                const Log& log = {});
/// Minimal standalone SVG line chart.
std::string svg_line_chart(std::string_view title, std::string_view x_label,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series,
                           std::size_t points);

struct Summary {
    std::size_t selection_runs = 0;
    std::size_t prediction_reports = 0;
    std::size_t selection_samples = 0;
    std::size_t prediction_samples = 0;
};

/// Full pipeline into config.out_dir.
Summary run_experiment(const ExperimentConfig& config, const Log& log = {});

/// Rebuilds census and plots from an existing output directory.
void rebuild_report(const std::string& out_dir, const Log& log = {});

}  // namespace tafs::experiment
