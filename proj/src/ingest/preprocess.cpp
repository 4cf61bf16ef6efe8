#include "tafs/ingest.hpp"

#include "tafs/error.hpp"

#include <algorithm>

namespace tafs::ingest {

void impute_column(std::span<double> column, std::string_view name) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : column) {
        if (!is_missing(v)) {
            sum += v;
            ++count;
        }
    }
    if (count == 0) {
        throw DegenerateColumnError("column '" + std::string(name) + "' has no values to impute from");
    }
    if (count == column.size()) {
        return;
    }
    const double mean = sum / static_cast<double>(count);
    for (double& v : column) {
        if (is_missing(v)) {
            v = mean;
        }
    }
}

PriceSeries impute_missing(PriceSeries series) {
    impute_column(series.open, "Open");
    impute_column(series.high, "High");
    impute_column(series.low, "Low");
    impute_column(series.close, "Close");
    impute_column(series.adj_close, "Adj Close");
    impute_column(series.volume, "Volume");
    return series;
}

FeatureFrame impute_missing(FeatureFrame frame) {
    for (auto& col : frame.columns) {
        impute_column(col.values, col.name);
    }
    return frame;
}

namespace {

void observe(double v, double& lo, double& hi) {
    if (is_missing(v)) {
        return;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
}

double scale(double v, double lo, double hi) {
    if (is_missing(v)) {
        return v;
    }
    const double range = hi - lo;
    return range > 0.0 ? (v - lo) / range : 0.0;
}

double unscale(double v, double lo, double hi) {
    if (is_missing(v)) {
        return v;
    }
    return lo + v * (hi - lo);
}

void finish_fit(ScalerParams& p) {
    for (std::size_t c = 0; c < p.size(); ++c) {
        if (p.min[c] > p.max[c]) {
            throw DegenerateColumnError("column '" + p.names[c] + "' has no values to fit a scaler on");
        }
    }
}

void check_columns(std::size_t cols, const ScalerParams& params) {
    if (cols != params.size()) {
        throw SchemaError("scaler was fitted on " + std::to_string(params.size()) + " columns, got " +
                          std::to_string(cols));
    }
}

ScalerParams empty_params(std::size_t cols) {
    ScalerParams p;
    p.min.assign(cols, std::numeric_limits<double>::infinity());
    p.max.assign(cols, -std::numeric_limits<double>::infinity());
    return p;
}

}  // namespace

ScalerParams minmax_fit(const FeatureFrame& frame) {
    if (frame.rows() == 0 || frame.cols() == 0) {
        throw EmptyInputError("cannot fit a scaler on an empty frame");
    }
    auto p = empty_params(frame.cols());
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        p.names.push_back(frame.columns[c].name);
        for (double v : frame.columns[c].values) {
            observe(v, p.min[c], p.max[c]);
        }
    }
    finish_fit(p);
    return p;
}

FeatureFrame minmax_transform(const FeatureFrame& frame, const ScalerParams& params) {
    check_columns(frame.cols(), params);
    FeatureFrame out = frame;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        if (!params.names.empty() && params.names[c] != out.columns[c].name) {
            throw SchemaError("scaler column '" + params.names[c] + "' does not match frame column '" +
                              out.columns[c].name + "'");
        }
        for (double& v : out.columns[c].values) {
            v = scale(v, params.min[c], params.max[c]);
        }
    }
    return out;
}

FeatureFrame minmax_inverse(const FeatureFrame& frame, const ScalerParams& params) {
    check_columns(frame.cols(), params);
    FeatureFrame out = frame;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        for (double& v : out.columns[c].values) {
            v = unscale(v, params.min[c], params.max[c]);
        }
    }
    return out;
}

ScalerParams minmax_fit(const Matrix& X) {
    if (X.rows() == 0 || X.cols() == 0) {
        throw EmptyInputError("cannot fit a scaler on an empty matrix");
    }
    auto p = empty_params(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        p.names.push_back("x" + std::to_string(c));
        for (Eigen::Index r = 0; r < X.rows(); ++r) {
            observe(X(r, c), p.min[c], p.max[c]);
        }
    }
    finish_fit(p);
    return p;
}

Matrix minmax_transform(const Matrix& X, const ScalerParams& params) {
    check_columns(static_cast<std::size_t>(X.cols()), params);
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            out(r, c) = scale(X(r, c), params.min[c], params.max[c]);
        }
    }
    return out;
}

Matrix minmax_inverse(const Matrix& X, const ScalerParams& params) {
    check_columns(static_cast<std::size_t>(X.cols()), params);
    Matrix out(X.rows(), X.cols());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            out(r, c) = unscale(X(r, c), params.min[c], params.max[c]);
        }
    }
    return out;
}

ScalerParams minmax_fit(std::span<const double> column) {
    if (column.empty()) {
        throw EmptyInputError("cannot fit a scaler on an empty column");
    }
    auto p = empty_params(1);
    p.names.emplace_back("target");
    for (double v : column) {
        observe(v, p.min[0], p.max[0]);
    }
    finish_fit(p);
    return p;
}

std::vector<double> minmax_transform(std::span<const double> column, const ScalerParams& params) {
    check_columns(1, params);
    std::vector<double> out;
    out.reserve(column.size());
    for (double v : column) {
        out.push_back(scale(v, params.min[0], params.max[0]));
    }
    return out;
}

std::vector<double> minmax_inverse(std::span<const double> column, const ScalerParams& params) {
    check_columns(1, params);
    std::vector<double> out;
    out.reserve(column.size());
    for (double v : column) {
        out.push_back(unscale(v, params.min[0], params.max[0]));
    }
    return out;
}

}  // namespace tafs::ingest
