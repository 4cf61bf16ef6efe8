#include "tafs/regress/linear.hpp"

#include "regress/binary_io.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace tafs::regress {

namespace {

struct Centered {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::RowVectorXd x_mean;
    double y_mean = 0.0;
};

Centered center(const Matrix& X, const Vector& y, bool fit_intercept) {
    Centered c;
    c.X = X;
    c.y = y;
    if (fit_intercept) {
        c.x_mean = X.colwise().mean();
        c.y_mean = y.mean();
        c.X.rowwise() -= c.x_mean;
        c.y.array() -= c.y_mean;
    } else {
        c.x_mean = Eigen::RowVectorXd::Zero(X.cols());
    }
    return c;
}

double intercept_for(const Centered& c, const Vector& coef) { return c.y_mean - c.x_mean.dot(coef); }

}  // namespace

LinearModel::LinearModel(Family family, Vector coef, double intercept, FitInfo info)
    : RegressorModel(family, static_cast<std::size_t>(coef.size()), std::move(info)),
      coef_(std::move(coef)),
      intercept_(intercept) {}

Vector LinearModel::predict_rows(const Matrix& X) const {
    Vector out = X * coef_;
    out.array() += intercept_;
    return out;
}

void LinearModel::save_payload(std::ostream& out) const {
    io::put_vector(out, coef_);
    io::put_f64(out, intercept_);
}

std::unique_ptr<LinearModel> LinearModel::load_payload(Family family, std::istream& in, FitInfo info) {
    auto coef = io::get_vector(in);
    const double intercept = io::get_f64(in);
    return std::make_unique<LinearModel>(family, std::move(coef), intercept, std::move(info));
}

std::unique_ptr<LinearModel> fit_linear(const Matrix& X, const Vector& y, const LinearOptions& options) {
    const auto c = center(X, y, options.fit_intercept);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c.X);
    Vector coef = cod.solve(c.y);
    return std::make_unique<LinearModel>(Family::LR, coef, intercept_for(c, coef), FitInfo{});
}

std::unique_ptr<LinearModel> fit_ridge(const Matrix& X, const Vector& y, const RidgeOptions& options) {
    const auto c = center(X, y, options.fit_intercept);
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;
    Eigen::VectorXd s;
    {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(c.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
        U = svd.matrixU();
        V = svd.matrixV();
        s = svd.singularValues();
    }
    // Eigen 3.4.0's divide-and-conquer SVD can return NaN on nearly collinear
    // designs; the one-sided Jacobi variant is slower but does not.
    if (!U.allFinite() || !V.allFinite() || !s.allFinite()) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
        U = svd.matrixU();
        V = svd.matrixV();
        s = svd.singularValues();
    }
    const double cutoff = (s.size() > 0 ? s(0) : 0.0) * static_cast<double>(std::max(c.X.rows(), c.X.cols())) *
                          std::numeric_limits<double>::epsilon();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) {
            d(i) = s(i) / (s(i) * s(i) + options.alpha);
        }
    }
    Vector coef = V * (d.asDiagonal() * (U.transpose() * c.y));
    return std::make_unique<LinearModel>(Family::Ridge, coef, intercept_for(c, coef), FitInfo{});
}

std::unique_ptr<LinearModel> fit_lasso(const Matrix& X, const Vector& y, const LassoOptions& options) {
    const auto c = center(X, y, options.fit_intercept);
    const auto m = static_cast<double>(c.X.rows());
    const Eigen::Index d = c.X.cols();
    const Eigen::VectorXd col_sq = c.X.colwise().squaredNorm().transpose();

    Vector coef = Vector::Zero(d);
    Eigen::VectorXd residual = c.y;
    auto objective = [&] { return residual.squaredNorm() / (2.0 * m) + options.alpha * coef.lpNorm<1>(); };

    FitInfo info;
    info.converged = false;
    info.objective_trace.push_back(objective());
    for (std::size_t sweep = 0; sweep < options.max_iter; ++sweep) {
        double max_step = 0.0;
        double max_coef = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            if (col_sq(j) == 0.0) {
                continue;
            }
            const double old = coef(j);
            const double rho = (c.X.col(j).dot(residual) + col_sq(j) * old) / m;
            const double shrunk = std::copysign(std::max(std::abs(rho) - options.alpha, 0.0), rho);
            const double updated = shrunk / (col_sq(j) / m);
            if (updated != old) {
                residual -= (updated - old) * c.X.col(j);
                coef(j) = updated;
            }
            max_step = std::max(max_step, std::abs(updated - old));
            max_coef = std::max(max_coef, std::abs(updated));
        }
        info.iterations = sweep + 1;
        info.objective_trace.push_back(objective());
        if (max_coef == 0.0 || max_step <= options.tol * max_coef) {
            info.converged = true;
            break;
        }
    }
    if (!info.converged) {
        info.warnings.push_back("Lasso coordinate descent did not converge in " + std::to_string(options.max_iter) +
                                " sweeps");
    }
    const double intercept = intercept_for(c, coef);
    return std::make_unique<LinearModel>(Family::Lasso, coef, intercept, std::move(info));
}

}  // namespace tafs::regress
