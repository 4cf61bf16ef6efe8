#pragma once

#include "tafs/regress.hpp"

namespace tafs::regress {

struct MlpOptions {
    std::size_t hidden = 50;
    double alpha = 1.0;  // L2 penalty on weights (not biases)
    std::size_t max_iter = 2000;
    double tol = 1e-4;   // stop when the max-abs gradient falls below this
    std::size_t memory = 10;
};

/// Parameter layout of a one-hidden-layer network, flattened as
/// [W1 (inputs x hidden, row-major) | b1 | W2 (hidden) | b2].
struct MlpShape {
    std::size_t inputs = 0;
    std::size_t hidden = 0;

    std::size_t size() const { return inputs * hidden + hidden + hidden + 1; }
};

/// Loss 0.5*mean((yhat-y)^2) + alpha/(2m)*||W||^2 of a logistic-hidden,
/// identity-output network; writes the analytic gradient into `grad`.
double mlp_loss_and_gradient(const MlpShape& shape, std::span<const double> params, const Matrix& X, const Vector& y,
                             double alpha, std::span<double> grad);

/// Seeded uniform(-r, r) initialisation with r = sqrt(6/(fan_in+fan_out)).
std::vector<double> mlp_initial_params(const MlpShape& shape, std::uint64_t seed);

class MlpModel final : public RegressorModel {
public:
    MlpModel(MlpShape shape, std::vector<double> params, FitInfo info);

    const std::vector<double>& params() const { return params_; }

    static std::unique_ptr<MlpModel> load_payload(std::istream& in, FitInfo info);

protected:
    Vector predict_rows(const Matrix& X) const override;
    void save_payload(std::ostream& out) const override;

private:
    MlpShape shape_;
    std::vector<double> params_;
};

/// Full-batch L-BFGS training.
std::unique_ptr<MlpModel> fit_mlp(const Matrix& X, const Vector& y, const MlpOptions& options, std::uint64_t seed);

}  // namespace tafs::regress
