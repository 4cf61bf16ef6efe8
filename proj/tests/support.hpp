// Shared fixtures for the unit tests and the acceptance binary.
#pragma once

#include "tafs/ingest.hpp"
#include "tafs/linalg.hpp"
#include "tafs/windowing.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace tafs::test {

inline std::string data_path(const std::string& name) { return std::string(TAFS_TEST_DATA_DIR) + "/" + name; }

inline bool close_to(double a, double b, double tol) {
    if (std::isnan(a) || std::isnan(b)) {
        return std::isnan(a) && std::isnan(b);
    }
    return std::abs(a - b) <= tol;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix X(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            X(i, j) = n(rng);
        }
    }
    return X;
}

/// Flat bars (open = high = low = close) on consecutive days, volume 1000.
inline ingest::PriceSeries from_close(const std::vector<double>& close) {
    ingest::PriceSeries s;
    Date d{std::chrono::year{2021}, std::chrono::March, std::chrono::day{1}};
    for (const double c : close) {
        s.dates.push_back(d);
        d = add_days(d, 1);
        s.open.push_back(c);
        s.high.push_back(c);
        s.low.push_back(c);
        s.close.push_back(c);
        s.adj_close.push_back(c);
        s.volume.push_back(1000.0);
    }
    return s;
}

/// m rows, `groups` indicator groups named g1..gG with `lags` columns each
/// (`g3@0`, `g3@1`, ...), standard normal entries, and
/// y = sum(coef * column `g<k>@0`) + N(0, noise^2).
inline windowing::WindowedDataset planted(std::size_t m, std::size_t groups, std::size_t lags,
                                          const std::vector<std::pair<std::size_t, double>>& coefs, double noise,
                                          std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    windowing::WindowedDataset d;
    d.X = random_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(groups * lags), rng);
    for (std::size_t g = 1; g <= groups; ++g) {
        for (std::size_t lag = 0; lag < lags; ++lag) {
            d.feature_names.push_back("g" + std::to_string(g) + "@" + std::to_string(lag));
        }
    }
    std::normal_distribution<double> eps(0.0, noise);
    d.y = Vector::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (const auto& [g, c] : coefs) {
            d.y(r) += c * d.X(r, static_cast<Eigen::Index>((g - 1) * lags));
        }
        d.y(r) += eps(rng);
    }
    return d;
}

/// Ordinary least squares with intercept via the normal equations and
/// Gauss-Jordan elimination with partial pivoting. Deliberately naive: it is
/// the oracle the library's solvers are checked against.
struct NaiveOls {
    std::vector<double> beta;  // intercept first

    NaiveOls(const Matrix& X, const Vector& y) {
        const auto m = static_cast<std::size_t>(X.rows());
        const auto d = static_cast<std::size_t>(X.cols()) + 1;
        std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> row(d, 1.0);
            for (std::size_t j = 1; j < d; ++j) {
                row[j] = X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1));
            }
            for (std::size_t p = 0; p < d; ++p) {
                for (std::size_t q = 0; q < d; ++q) {
                    a[p][q] += row[p] * row[q];
                }
                a[p][d] += row[p] * y(static_cast<Eigen::Index>(i));
            }
        }
        for (std::size_t c = 0; c < d; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < d; ++r) {
                if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                    piv = r;
                }
            }
            std::swap(a[c], a[piv]);
            for (std::size_t r = 0; r < d; ++r) {
                if (r != c) {
                    const double f = a[r][c] / a[c][c];
                    for (std::size_t k = c; k <= d; ++k) {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
        for (std::size_t c = 0; c < d; ++c) {
            beta.push_back(a[c][d] / a[c][c]);
        }
    }

    double predict(const Matrix& X, Eigen::Index row) const {
        double v = beta[0];
        for (std::size_t j = 1; j < beta.size(); ++j) {
            v += beta[j] * X(row, static_cast<Eigen::Index>(j - 1));
        }
        return v;
    }
};

/// Contiguous k-fold MSE of OLS, written out longhand: fold f holds rows
/// [start_f, start_f + size_f) where the first m % k folds get one extra row.
inline double naive_cv_mse(const Matrix& X, const Vector& y, std::size_t k) {
    const auto m = static_cast<std::size_t>(X.rows());
    double total = 0.0;
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = m / k + (f < m % k ? 1 : 0);
        Matrix Xt(static_cast<Eigen::Index>(m - size), X.cols());
        Vector yt(static_cast<Eigen::Index>(m - size));
        Eigen::Index r = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (i < start || i >= start + size) {
                Xt.row(r) = X.row(static_cast<Eigen::Index>(i));
                yt(r) = y(static_cast<Eigen::Index>(i));
                ++r;
            }
        }
        const NaiveOls ols(Xt, yt);
        double sse = 0.0;
        for (std::size_t i = start; i < start + size; ++i) {
            const double e = y(static_cast<Eigen::Index>(i)) - ols.predict(X, static_cast<Eigen::Index>(i));
            sse += e * e;
        }
        total += sse / static_cast<double>(size);
        start += size;
    }
    return total / static_cast<double>(k);
}

/// Columns of `data` whose group (g<k>) is in `ids` (1-based group numbers).
inline Matrix group_columns(const windowing::WindowedDataset& data, std::size_t lags, const std::vector<std::size_t>& ids) {
    Matrix out(data.X.rows(), static_cast<Eigen::Index>(ids.size() * lags));
    Eigen::Index c = 0;
    for (const auto g : ids) {
        for (std::size_t lag = 0; lag < lags; ++lag) {
            out.col(c++) = data.X.col(static_cast<Eigen::Index>((g - 1) * lags + lag));
        }
    }
    return out;
}

}  // namespace tafs::test
