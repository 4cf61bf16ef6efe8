#pragma once

#include "tafs/regress.hpp"

namespace tafs::regress {

struct SvrOptions {
    double C = 0.1;
    double gamma = 0.1;
    double epsilon = 0.1;
    double tol = 1e-3;         // KKT violation tolerance
    std::size_t max_iter = 0;  // 0 = max(10^7, 100*m)
};

/// Epsilon-insensitive support vector regression with an RBF kernel,
/// trained by sequential minimal optimisation with second-order working
/// set selection.
class SvrModel final : public RegressorModel {
public:
    SvrModel(Matrix support, Vector dual_coef, double rho, double gamma, Vector alpha, Vector alpha_star, FitInfo info);

    /// Dual variables per training row (empty after load()).
    const Vector& alpha() const { return alpha_; }
    const Vector& alpha_star() const { return alpha_star_; }
    double rho() const { return rho_; }

    static std::unique_ptr<SvrModel> load_payload(std::istream& in, FitInfo info);

protected:
    Vector predict_rows(const Matrix& X) const override;
    void save_payload(std::ostream& out) const override;

private:
    Matrix support_;
    Vector dual_coef_;  // alpha - alpha_star for each support row
    double rho_;
    double gamma_;
    Vector alpha_;
    Vector alpha_star_;
};

std::unique_ptr<SvrModel> fit_svr(const Matrix& X, const Vector& y, const SvrOptions& options);

}  // namespace tafs::regress
