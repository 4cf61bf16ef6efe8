#pragma once

#include "tafs/regress/tree.hpp"

namespace tafs::regress {

enum class AdaLoss : std::uint8_t { Linear, Square, Exponential };

struct AdaOptions {
    std::size_t n_estimators = 2000;
    double learning_rate = 0.1;
    AdaLoss loss = AdaLoss::Square;
    std::size_t max_depth = 3;
};

struct GbrOptions {
    std::size_t n_estimators = 2000;  // 0 leaves only the constant mean model
    double learning_rate = 0.1;
    std::size_t max_depth = 3;
    std::size_t max_leaf_nodes = 30;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    double subsample = 1.0;
};

struct RfrOptions {
    std::size_t n_estimators = 1000;
    std::size_t max_features = 20;  // clamped to the feature count; 0 = all
    std::size_t max_depth = 0;
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    bool bootstrap = true;
};

/// A list of trees combined by weighted median (AdaBoost.R2), by a shrunken
/// sum on top of a constant (gradient boosting) or by averaging (forest).
class TreeEnsembleModel final : public RegressorModel {
public:
    enum class Combine : std::uint8_t { WeightedMedian, ShrunkSum, Mean };

    TreeEnsembleModel(Family family, std::size_t n_features, Combine combine, double base, double scale,
                      std::vector<RegressionTree> trees, std::vector<double> weights, FitInfo info);

    const std::vector<RegressionTree>& trees() const { return trees_; }
    const std::vector<double>& weights() const { return weights_; }

    static std::unique_ptr<TreeEnsembleModel> load_payload(Family family, std::size_t n_features, std::istream& in,
                                                           FitInfo info);

protected:
    Vector predict_rows(const Matrix& X) const override;
    void save_payload(std::ostream& out) const override;

private:
    Combine combine_;
    double base_;
    double scale_;
    std::vector<RegressionTree> trees_;
    std::vector<double> weights_;
};

/// AdaBoost.R2 with sample weights passed to the base trees.
std::unique_ptr<TreeEnsembleModel> fit_ada(const Matrix& X, const Vector& y, const AdaOptions& options,
                                           std::uint64_t seed);
std::unique_ptr<TreeEnsembleModel> fit_gbr(const Matrix& X, const Vector& y, const GbrOptions& options,
                                           std::uint64_t seed);
/// Tree t draws its bootstrap sample and split features from seed + t.
std::unique_ptr<TreeEnsembleModel> fit_rfr(const Matrix& X, const Vector& y, const RfrOptions& options,
                                           std::uint64_t seed);

}  // namespace tafs::regress
