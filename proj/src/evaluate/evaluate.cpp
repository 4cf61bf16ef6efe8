#include "tafs/evaluate.hpp"

#include "common/parallel.hpp"
#include "common/text.hpp"
#include "tafs/error.hpp"
#include "tafs/feature_frame.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace tafs::evaluate {

namespace {

constexpr std::array<Metric, 5> kMetrics{Metric::R2, Metric::MSE, Metric::RMSE, Metric::MAE, Metric::MAPE};
constexpr std::array<std::string_view, 5> kMetricNames{"r2", "mse", "rmse", "mae", "mape"};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

}  // namespace

std::span<const Metric> all_metrics() { return kMetrics; }

std::string_view metric_name(Metric metric) { return kMetricNames[static_cast<std::size_t>(metric)]; }

Metric parse_metric(std::string_view name) {
    const auto wanted = detail::lower(detail::trim(name));
    for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
        if (kMetricNames[i] == wanted) {
            return kMetrics[i];
        }
    }
    throw ConfigError("unknown metric '" + std::string(name) + "' (expected r2, mse, rmse, mae or mape)");
}

bool higher_is_better(Metric metric) { return metric == Metric::R2; }

bool better(Metric metric, double a, double b) {
    if (std::isnan(a)) {
        return false;
    }
    if (std::isnan(b)) {
        return true;
    }
    return higher_is_better(metric) ? a > b : a < b;
}

double MetricReport::get(Metric metric) const {
    switch (metric) {
        case Metric::R2: return r2;
        case Metric::MSE: return mse;
        case Metric::RMSE: return rmse;
        case Metric::MAE: return mae;
        case Metric::MAPE: return mape;
    }
    return kMissing;
}

MetricReport metrics(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) {
        throw ShapeError("metrics got " + std::to_string(y.size()) + " targets but " + std::to_string(yhat.size()) +
                         " predictions");
    }
    if (y.empty()) {
        throw EmptyInputError("metrics need at least one sample");
    }
    const auto n = y.size();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(yhat[i])) {
            throw NumericInputError("metrics input contains NaN or infinite values");
        }
        mean += y[i];
    }
    mean /= static_cast<double>(n);

    double ss_res = 0.0;
    double ss_tot = 0.0;
    double abs_sum = 0.0;
    double pct_sum = 0.0;
    std::size_t pct_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - yhat[i];
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
        abs_sum += std::abs(r);
        if (std::abs(y[i]) >= kMapeThreshold) {
            pct_sum += std::abs(r / y[i]);
            ++pct_count;
        }
    }
    MetricReport m;
    m.n = n;
    m.mse = ss_res / static_cast<double>(n);
    m.rmse = std::sqrt(m.mse);
    m.mae = abs_sum / static_cast<double>(n);
    m.mape_skipped = n - pct_count;
    m.mape = pct_count == 0 ? kMissing : 100.0 * pct_sum / static_cast<double>(pct_count);
    if (ss_tot > 0.0) {
        m.r2 = 1.0 - ss_res / ss_tot;
    } else {
        m.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    }
    return m;
}

MetricReport metrics(const Vector& y, const Vector& yhat) {
    return metrics(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                   std::span<const double>(yhat.data(), static_cast<std::size_t>(yhat.size())));
}

double score(Metric metric, const Vector& y, const Vector& yhat) { return metrics(y, yhat).get(metric); }

std::vector<Fold> make_folds(std::size_t m, std::size_t k, bool shuffle, std::uint64_t seed) {
    if (k < 2) {
        throw ConfigError("cross-validation needs at least 2 folds, got " + std::to_string(k));
    }
    if (m < k) {
        throw InsufficientSamplesError("cannot split " + std::to_string(m) + " samples into " + std::to_string(k) +
                                       " folds");
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle) {
        std::mt19937_64 rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    std::vector<Fold> folds(k);
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = m / k + (f < m % k ? 1 : 0);
        std::vector<bool> in_test(m, false);
        for (std::size_t i = start; i < start + size; ++i) {
            in_test[order[i]] = true;
        }
        for (std::size_t r = 0; r < m; ++r) {
            (in_test[r] ? folds[f].test : folds[f].train).push_back(r);
        }
        start += size;
    }
    return folds;
}

Matrix take_rows(const Matrix& X, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

Vector take_rows(const Vector& y, std::span<const std::size_t> rows) {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

std::vector<double> fold_scores(const regress::RegressorConfig& config, const Matrix& X, const Vector& y,
                                std::span<const Fold> folds, Metric metric) {
    std::vector<double> scores;
    scores.reserve(folds.size());
    for (const auto& fold : folds) {
        const auto model = regress::fit(config, take_rows(X, fold.train), take_rows(y, fold.train));
        scores.push_back(score(metric, take_rows(y, fold.test), model->predict(take_rows(X, fold.test))));
    }
    return scores;
}

GridSearchResult grid_search(const ParamGrid& grid, const regress::RegressorConfig& base, const Matrix& X,
                             const Vector& y, const GridSearchOptions& options) {
    if (grid.empty()) {
        throw ConfigError("grid search needs at least one parameter");
    }
    for (const auto& [key, values] : grid) {
        if (values.empty()) {
            throw ConfigError("grid parameter '" + key + "' has no values");
        }
    }
    if (options.repeats < 1) {
        throw ConfigError("grid search needs at least one repeat");
    }
    if (y.size() != X.rows()) {
        throw ShapeError("grid search got " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) +
                         " targets");
    }
    const auto m = static_cast<std::size_t>(X.rows());
    std::vector<std::vector<Fold>> repeats;
    for (std::size_t r = 0; r < options.repeats; ++r) {
        repeats.push_back(make_folds(m, options.folds, true, options.seed + r));
    }

    GridSearchResult result;
    result.metric = options.metric;
    std::vector<std::size_t> index(grid.size(), 0);
    while (true) {
        GridCandidate c;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            c.params.emplace_back(grid[g].first, grid[g].second[index[g]]);
        }
        result.candidates.push_back(std::move(c));
        std::size_t g = grid.size();
        while (g > 0 && ++index[g - 1] == grid[g - 1].second.size()) {
            index[g - 1] = 0;
            --g;
        }
        if (g == 0) {
            break;
        }
    }

    const std::size_t width = options.folds * options.repeats;
    result.fold_scores = Matrix::Zero(static_cast<Eigen::Index>(result.candidates.size()),
                                      static_cast<Eigen::Index>(width));
    std::vector<regress::RegressorConfig> configs;
    for (const auto& c : result.candidates) {
        auto config = base;
        for (const auto& [key, value] : c.params) {
            config.set(key, value);
        }
        config.validate();
        configs.push_back(std::move(config));
    }
    const std::size_t jobs = configs.size() * options.repeats;
    detail::parallel_for(jobs, options.threads, [&](std::size_t job) {
        const auto ci = job / options.repeats;
        const auto r = job % options.repeats;
        const auto scores = fold_scores(configs[ci], X, y, repeats[r], options.metric);
        for (std::size_t f = 0; f < scores.size(); ++f) {
            result.fold_scores(static_cast<Eigen::Index>(ci), static_cast<Eigen::Index>(r * options.folds + f)) =
                scores[f];
        }
    });

    for (std::size_t ci = 0; ci < result.candidates.size(); ++ci) {
        const auto row = result.fold_scores.row(static_cast<Eigen::Index>(ci));
        double sum = 0.0;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            sum += row(j);
        }
        auto& c = result.candidates[ci];
        c.mean = sum / static_cast<double>(width);
        double ss = 0.0;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            ss += (row(j) - c.mean) * (row(j) - c.mean);
        }
        c.stdev = std::sqrt(ss / static_cast<double>(width));
        if (ci > 0 && better(options.metric, c.mean, result.candidates[result.best].mean)) {
            result.best = ci;
        }
    }
    return result;
}

void write_metrics_csv(std::span<const MetricRow> rows, std::ostream& out) {
    out << "model,method,metric_name,value\n";
    for (const auto& r : rows) {
        out << csv_field(r.model) << ',' << csv_field(r.method) << ',' << csv_field(r.metric_name) << ','
            << format_number(r.value) << '\n';
    }
}

}  // namespace tafs::evaluate
