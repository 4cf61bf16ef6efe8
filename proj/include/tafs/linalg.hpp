#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace tafs {

// Row-major storage: every learner walks samples row by row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

}  // namespace tafs
