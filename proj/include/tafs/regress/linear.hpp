#pragma once

#include "tafs/regress.hpp"

namespace tafs::regress {

struct LinearOptions {
    bool fit_intercept = true;
};

struct RidgeOptions {
    double alpha = 0.0;
    bool fit_intercept = true;
};

struct LassoOptions {
    double alpha = 0.1;
    std::size_t max_iter = 200;
    double tol = 1e-4;
    bool fit_intercept = true;
};

/// Affine predictor coef . x + intercept shared by LR, Ridge and Lasso.
class LinearModel final : public RegressorModel {
public:
    LinearModel(Family family, Vector coef, double intercept, FitInfo info);

    const Vector& coef() const { return coef_; }
    double intercept() const { return intercept_; }

    static std::unique_ptr<LinearModel> load_payload(Family family, std::istream& in, FitInfo info);

protected:
    Vector predict_rows(const Matrix& X) const override;
    void save_payload(std::ostream& out) const override;

private:
    Vector coef_;
    double intercept_;
};

/// Minimum-norm least squares through a complete orthogonal decomposition.
std::unique_ptr<LinearModel> fit_linear(const Matrix& X, const Vector& y, const LinearOptions& options);

/// Closed-form ridge on the thin SVD of the centred design; singular values
/// below the numerical-rank cutoff are dropped.
std::unique_ptr<LinearModel> fit_ridge(const Matrix& X, const Vector& y, const RidgeOptions& options);

/// Cyclic coordinate descent with soft-thresholding on
/// RSS/(2m) + alpha*||coef||_1. FitInfo::objective_trace holds the
/// objective before the first sweep and after every sweep.
std::unique_ptr<LinearModel> fit_lasso(const Matrix& X, const Vector& y, const LassoOptions& options);

}  // namespace tafs::regress
