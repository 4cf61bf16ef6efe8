#pragma once

#include "tafs/date.hpp"
#include "tafs/feature_frame.hpp"
#include "tafs/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tafs::ingest {

/// The CSV header accepted by load_ohlcv, verbatim.
inline constexpr std::string_view kOhlcvHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

/// Dated daily OHLCV bars as parallel columns. Missing cells are NaN.
struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> open;
    std::vector<double> high;
    std::vector<double> low;
    std::vector<double> close;
    std::vector<double> adj_close;
    std::vector<double> volume;

    std::size_t size() const { return dates.size(); }

    /// Throws EmptyInputError, ShapeError, OrderingError or SchemaError
    /// (for high < low or negative volume) when an invariant is broken.
    void validate() const;

    std::size_t missing_count() const;

    /// Rows [first, last).
    PriceSeries slice(std::size_t first, std::size_t last) const;
};

PriceSeries load_ohlcv(const std::string& path);
PriceSeries parse_ohlcv(std::istream& in);
void write_ohlcv(const PriceSeries& series, std::ostream& out);
void write_ohlcv(const PriceSeries& series, const std::string& path);

/// Replaces NaN entries by the mean of the column's remaining entries.
/// Throws DegenerateColumnError when a column has no values at all.
void impute_column(std::span<double> column, std::string_view name = "column");
PriceSeries impute_missing(PriceSeries series);
FeatureFrame impute_missing(FeatureFrame frame);

/// Per-column range observed on the fitting data.
struct ScalerParams {
    std::vector<std::string> names;
    std::vector<double> min;
    std::vector<double> max;

    std::size_t size() const { return min.size(); }
};

// Zero-range columns map to 0 everywhere. Values outside the fitted range
// extrapolate linearly; nothing is clipped. NaN entries are ignored by fit
// and passed through by transform.
ScalerParams minmax_fit(const FeatureFrame& frame);
FeatureFrame minmax_transform(const FeatureFrame& frame, const ScalerParams& params);
FeatureFrame minmax_inverse(const FeatureFrame& frame, const ScalerParams& params);

ScalerParams minmax_fit(const Matrix& X);
Matrix minmax_transform(const Matrix& X, const ScalerParams& params);
Matrix minmax_inverse(const Matrix& X, const ScalerParams& params);

/// Single-column variants used for the regression target.
ScalerParams minmax_fit(std::span<const double> column);
std::vector<double> minmax_transform(std::span<const double> column, const ScalerParams& params);
std::vector<double> minmax_inverse(std::span<const double> column, const ScalerParams& params);

/// Geometric-random-walk OHLCV bars on consecutive weekdays starting at
/// `start`. Deterministic for a given seed; used by demos and tests.
PriceSeries synthetic_ohlcv(std::size_t days, std::uint64_t seed,
                            Date start = Date{std::chrono::year{2010}, std::chrono::January, std::chrono::day{4}});

}  // namespace tafs::ingest
