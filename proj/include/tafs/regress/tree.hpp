#pragma once

#include "tafs/regress.hpp"

#include <random>

namespace tafs::regress {

struct TreeOptions {
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::size_t max_leaf_nodes = 0;  // 0 = unlimited; otherwise best-first growth
    std::size_t max_features = 0;    // 0 = all features at every split
};

/// CART regression tree with squared-error impurity. Equal-quality splits
/// resolve to the lowest feature index, then the lowest threshold.
class RegressionTree {
public:
    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;     // x[feature] <= threshold goes left
        std::int32_t left = -1;
        std::int32_t right = -1;
        double value = 0.0;
    };

    /// `weights` may be empty (all ones). Rows with zero weight are ignored.
    /// `rng` is only drawn from when max_features < number of features.
    static RegressionTree fit(const Matrix& X, const Vector& y, std::span<const double> weights,
                              const TreeOptions& options, std::mt19937_64& rng);

    double predict_row(const double* row) const;
    Vector predict(const Matrix& X) const;

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t leaf_count() const;
    std::size_t depth() const;

    void save(std::ostream& out) const;
    static RegressionTree load(std::istream& in);

private:
    std::vector<Node> nodes_;
};

struct DtrOptions {
    TreeOptions tree{9, 2, 2, 0, 0};
};

class TreeModel final : public RegressorModel {
public:
    TreeModel(std::size_t n_features, RegressionTree tree, FitInfo info);

    const RegressionTree& tree() const { return tree_; }

    static std::unique_ptr<TreeModel> load_payload(std::size_t n_features, std::istream& in, FitInfo info);

protected:
    Vector predict_rows(const Matrix& X) const override;
    void save_payload(std::ostream& out) const override;

private:
    RegressionTree tree_;
};

std::unique_ptr<TreeModel> fit_dtr(const Matrix& X, const Vector& y, const DtrOptions& options, std::uint64_t seed);

}  // namespace tafs::regress
