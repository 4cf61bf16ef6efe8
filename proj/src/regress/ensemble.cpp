#include "tafs/regress/ensemble.hpp"

#include "regress/binary_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tafs::regress {

TreeEnsembleModel::TreeEnsembleModel(Family family, std::size_t n_features, Combine combine, double base, double scale,
                                     std::vector<RegressionTree> trees, std::vector<double> weights, FitInfo info)
    : RegressorModel(family, n_features, std::move(info)),
      combine_(combine),
      base_(base),
      scale_(scale),
      trees_(std::move(trees)),
      weights_(std::move(weights)) {}

Vector TreeEnsembleModel::predict_rows(const Matrix& X) const {
    Vector out = Vector::Constant(X.rows(), base_);
    if (trees_.empty()) {
        return out;
    }
    switch (combine_) {
        case Combine::ShrunkSum:
            for (const auto& tree : trees_) {
                out += scale_ * tree.predict(X);
            }
            break;
        case Combine::Mean: {
            Vector sum = Vector::Zero(X.rows());
            for (const auto& tree : trees_) {
                sum += tree.predict(X);
            }
            out = sum / static_cast<double>(trees_.size());
            break;
        }
        case Combine::WeightedMedian: {
            const std::size_t t = trees_.size();
            std::vector<Vector> preds;
            preds.reserve(t);
            for (const auto& tree : trees_) {
                preds.push_back(tree.predict(X));
            }
            std::vector<std::size_t> order(t);
            const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
            for (Eigen::Index r = 0; r < X.rows(); ++r) {
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) { return preds[a](r) < preds[b](r); });
                double cdf = 0.0;
                std::size_t pick = order.back();
                for (const auto e : order) {
                    cdf += weights_[e];
                    if (cdf >= 0.5 * total) {
                        pick = e;
                        break;
                    }
                }
                out(r) = preds[pick](r);
            }
            break;
        }
    }
    return out;
}

void TreeEnsembleModel::save_payload(std::ostream& out) const {
    io::put_u8(out, static_cast<std::uint8_t>(combine_));
    io::put_f64(out, base_);
    io::put_f64(out, scale_);
    io::put_doubles(out, weights_.data(), weights_.size());
    io::put_u64(out, trees_.size());
    for (const auto& tree : trees_) {
        tree.save(out);
    }
}

std::unique_ptr<TreeEnsembleModel> TreeEnsembleModel::load_payload(Family family, std::size_t n_features,
                                                                   std::istream& in, FitInfo info) {
    const auto combine = io::get_u8(in);
    if (combine > 2) {
        throw IoError("corrupt model artifact (ensemble combiner)");
    }
    const double base = io::get_f64(in);
    const double scale = io::get_f64(in);
    auto weights = io::get_doubles(in);
    const auto count = io::get_size(in, std::size_t{1} << 24);
    std::vector<RegressionTree> trees;
    trees.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        trees.push_back(RegressionTree::load(in));
    }
    if (static_cast<Combine>(combine) == Combine::WeightedMedian && weights.size() != trees.size()) {
        throw IoError("corrupt model artifact (ensemble weights)");
    }
    return std::make_unique<TreeEnsembleModel>(family, n_features, static_cast<Combine>(combine), base, scale,
                                               std::move(trees), std::move(weights), std::move(info));
}

std::unique_ptr<TreeEnsembleModel> fit_ada(const Matrix& X, const Vector& y, const AdaOptions& options,
                                           std::uint64_t seed) {
    const auto m = static_cast<std::size_t>(X.rows());
    std::vector<double> sample_weight(m, 1.0 / static_cast<double>(m));
    TreeOptions tree_options;
    tree_options.max_depth = options.max_depth;

    std::vector<RegressionTree> trees;
    std::vector<double> estimator_weights;
    FitInfo info;
    for (std::size_t t = 0; t < options.n_estimators; ++t) {
        std::mt19937_64 rng(seed + t);
        auto tree = RegressionTree::fit(X, y, sample_weight, tree_options, rng);
        const Vector pred = tree.predict(X);
        Eigen::ArrayXd error = (pred - y).cwiseAbs().array();
        const double error_max = error.maxCoeff();
        if (error_max != 0.0) {
            error /= error_max;
        }
        switch (options.loss) {
            case AdaLoss::Linear: break;
            case AdaLoss::Square: error = error.square(); break;
            case AdaLoss::Exponential: error = 1.0 - (-error).exp(); break;
        }
        double estimator_error = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            estimator_error += sample_weight[i] * error(static_cast<Eigen::Index>(i));
        }

        info.iterations = t + 1;
        if (estimator_error <= 0.0) {
            // Perfect fit: keep it with unit weight and stop.
            trees.push_back(std::move(tree));
            estimator_weights.push_back(1.0);
            break;
        }
        if (estimator_error >= 0.5) {
            if (trees.empty()) {
                trees.push_back(std::move(tree));
                estimator_weights.push_back(1.0);
            }
            info.warnings.push_back("AdaBoost stopped early: weighted error reached 0.5 at round " +
                                    std::to_string(t + 1));
            break;
        }
        const double beta = estimator_error / (1.0 - estimator_error);
        trees.push_back(std::move(tree));
        estimator_weights.push_back(options.learning_rate * std::log(1.0 / beta));
        if (t + 1 == options.n_estimators) {
            break;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            sample_weight[i] *= std::pow(beta, (1.0 - error(static_cast<Eigen::Index>(i))) * options.learning_rate);
            total += sample_weight[i];
        }
        if (!(total > 0.0)) {
            break;
        }
        for (double& w : sample_weight) {
            w /= total;
        }
    }
    return std::make_unique<TreeEnsembleModel>(Family::ADA, static_cast<std::size_t>(X.cols()),
                                               TreeEnsembleModel::Combine::WeightedMedian, 0.0, 1.0, std::move(trees),
                                               std::move(estimator_weights), std::move(info));
}

std::unique_ptr<TreeEnsembleModel> fit_gbr(const Matrix& X, const Vector& y, const GbrOptions& options,
                                           std::uint64_t seed) {
    const auto m = static_cast<std::size_t>(X.rows());
    const double base = y.mean();
    Vector current = Vector::Constant(X.rows(), base);
    TreeOptions tree_options;
    tree_options.max_depth = options.max_depth;
    tree_options.max_leaf_nodes = options.max_leaf_nodes;
    tree_options.min_samples_split = options.min_samples_split;
    tree_options.min_samples_leaf = options.min_samples_leaf;

    std::vector<RegressionTree> trees;
    trees.reserve(options.n_estimators);
    std::vector<double> weights;
    for (std::size_t t = 0; t < options.n_estimators; ++t) {
        std::mt19937_64 rng(seed + t);
        const Vector residual = y - current;
        if (options.subsample < 1.0) {
            // Sampling without replacement; out-of-bag rows get weight 0.
            weights.assign(m, 0.0);
            std::vector<std::size_t> rows(m);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            std::shuffle(rows.begin(), rows.end(), rng);
            const auto keep = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(options.subsample * static_cast<double>(m))));
            for (std::size_t i = 0; i < keep; ++i) {
                weights[rows[i]] = 1.0;
            }
        }
        auto tree = RegressionTree::fit(X, residual, weights, tree_options, rng);
        current += options.learning_rate * tree.predict(X);
        trees.push_back(std::move(tree));
    }
    FitInfo info;
    info.iterations = trees.size();
    return std::make_unique<TreeEnsembleModel>(Family::GBR, static_cast<std::size_t>(X.cols()),
                                               TreeEnsembleModel::Combine::ShrunkSum, base, options.learning_rate,
                                               std::move(trees), std::vector<double>{}, std::move(info));
}

std::unique_ptr<TreeEnsembleModel> fit_rfr(const Matrix& X, const Vector& y, const RfrOptions& options,
                                           std::uint64_t seed) {
    const auto m = static_cast<std::size_t>(X.rows());
    const auto d = static_cast<std::size_t>(X.cols());
    TreeOptions tree_options;
    tree_options.max_depth = options.max_depth;
    tree_options.min_samples_split = options.min_samples_split;
    tree_options.min_samples_leaf = options.min_samples_leaf;
    tree_options.max_features = options.max_features == 0 ? 0 : std::min(options.max_features, d);

    std::vector<RegressionTree> trees(options.n_estimators);
    for (std::size_t t = 0; t < options.n_estimators; ++t) {
        std::mt19937_64 rng(seed + t);
        std::vector<double> counts;
        if (options.bootstrap) {
            counts.assign(m, 0.0);
            std::uniform_int_distribution<std::size_t> pick(0, m - 1);
            for (std::size_t i = 0; i < m; ++i) {
                counts[pick(rng)] += 1.0;
            }
        }
        trees[t] = RegressionTree::fit(X, y, counts, tree_options, rng);
    }
    FitInfo info;
    info.iterations = trees.size();
    return std::make_unique<TreeEnsembleModel>(Family::RFR, d, TreeEnsembleModel::Combine::Mean, 0.0, 1.0,
                                               std::move(trees), std::vector<double>{}, std::move(info));
}

}  // namespace tafs::regress
