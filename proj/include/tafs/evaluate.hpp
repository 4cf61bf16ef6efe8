#pragma once

#include "tafs/linalg.hpp"
#include "tafs/regress.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tafs::evaluate {

enum class Metric : std::uint8_t { R2, MSE, RMSE, MAE, MAPE };

std::span<const Metric> all_metrics();
/// Lower-case name: "r2", "mse", "rmse", "mae", "mape".
std::string_view metric_name(Metric metric);
/// Case-insensitive; throws ConfigError.
Metric parse_metric(std::string_view name);
bool higher_is_better(Metric metric);

/// True when `a` is a strictly better score than `b`. NaN is worse than
/// any number.
bool better(Metric metric, double a, double b);

struct MetricReport {
    double r2 = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;  // NaN when every target is below the threshold
    std::size_t mape_skipped = 0;
    std::size_t n = 0;

    double get(Metric metric) const;
};

/// |y| below this is left out of MAPE.
inline constexpr double kMapeThreshold = 1e-12;

/// Throws ShapeError on length mismatch, EmptyInputError on empty input and
/// NumericInputError on non-finite entries.
///
/// R2 = 1 - SS_res/SS_tot. When y is constant SS_tot is 0; R2 is then 1 for
/// a perfect fit and 0 otherwise.
MetricReport metrics(std::span<const double> y, std::span<const double> yhat);
MetricReport metrics(const Vector& y, const Vector& yhat);

double score(Metric metric, const Vector& y, const Vector& yhat);

/// Train/test row indices of one fold.
struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// k near-equal blocks (the first m % k blocks get one extra row). Blocks are
/// contiguous in row order, or taken from a seeded permutation when
/// `shuffle` is set. Throws InsufficientSamplesError when m < k and
/// ConfigError when k < 2.
std::vector<Fold> make_folds(std::size_t m, std::size_t k, bool shuffle = false, std::uint64_t seed = 0);

/// Rows `rows` of X / y.
Matrix take_rows(const Matrix& X, std::span<const std::size_t> rows);
Vector take_rows(const Vector& y, std::span<const std::size_t> rows);

/// Fits on each fold's training rows and scores its test rows.
std::vector<double> fold_scores(const regress::RegressorConfig& config, const Matrix& X, const Vector& y,
                                std::span<const Fold> folds, Metric metric);

/// Ordered parameter grid; the last key varies fastest in the product.
using ParamGrid = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct GridCandidate {
    std::vector<std::pair<std::string, std::string>> params;
    double mean = 0.0;
    double stdev = 0.0;  // population standard deviation of the fold scores
};

struct GridSearchResult {
    std::vector<GridCandidate> candidates;
    /// candidates x (K * repeats); column r*K + f is fold f of repeat r.
    Matrix fold_scores;
    std::size_t best = 0;
    Metric metric = Metric::MSE;

    const GridCandidate& best_candidate() const { return candidates.at(best); }
};

struct GridSearchOptions {
    std::size_t folds = 10;
    std::size_t repeats = 3;
    Metric metric = Metric::MSE;
    std::uint64_t seed = 0;  // repeat r shuffles with seed + r
    std::size_t threads = 1;
};

/// Repeated shuffled K-fold over the Cartesian product of `grid` applied on
/// top of `base`. Best = best mean score, ties to the first candidate.
GridSearchResult grid_search(const ParamGrid& grid, const regress::RegressorConfig& base, const Matrix& X,
                             const Vector& y, const GridSearchOptions& options);

/// One line of the report CSV.
struct MetricRow {
    std::string model;
    std::string method;
    std::string metric_name;
    double value = 0.0;
};

/// Header `model,method,metric_name,value`.
void write_metrics_csv(std::span<const MetricRow> rows, std::ostream& out);

}  // namespace tafs::evaluate
