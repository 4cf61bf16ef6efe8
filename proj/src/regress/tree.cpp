#include "tafs/regress/tree.hpp"

#include "regress/binary_io.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace tafs::regress {

namespace {

struct Split {
    bool valid = false;
    std::int32_t feature = -1;
    double threshold = 0.0;
    double gain = 0.0;  // decrease of weighted squared error
};

struct Pending {
    std::int32_t node = -1;
    std::vector<std::size_t> rows;
    std::size_t depth = 0;
    Split split;
};

class Builder {
public:
    Builder(const Matrix& X, const Vector& y, std::span<const double> weights, const TreeOptions& options,
            std::mt19937_64& rng)
        : X_(X), y_(y), weights_(weights), options_(options), rng_(rng) {}

    std::vector<RegressionTree::Node> build() {
        std::vector<std::size_t> rows;
        for (Eigen::Index r = 0; r < X_.rows(); ++r) {
            if (weight(static_cast<std::size_t>(r)) > 0.0) {
                rows.push_back(static_cast<std::size_t>(r));
            }
        }
        nodes_.clear();
        // Frontier ordered by gain, then by creation order for determinism.
        auto cmp = [](const Pending& a, const Pending& b) {
            if (a.split.gain != b.split.gain) {
                return a.split.gain < b.split.gain;
            }
            return a.node > b.node;
        };
        std::priority_queue<Pending, std::vector<Pending>, decltype(cmp)> frontier(cmp);
        const auto root = new_leaf(rows);
        push_child(frontier, root, std::move(rows), 0);

        const std::size_t leaf_limit = options_.max_leaf_nodes == 0 ? std::numeric_limits<std::size_t>::max()
                                                                     : options_.max_leaf_nodes;
        std::size_t leaves = 1;
        while (!frontier.empty() && leaves < leaf_limit) {
            Pending p = frontier.top();
            frontier.pop();
            std::vector<std::size_t> left;
            std::vector<std::size_t> right;
            for (const auto r : p.rows) {
                (value(r, static_cast<std::size_t>(p.split.feature)) <= p.split.threshold ? left : right).push_back(r);
            }
            auto& node = nodes_[static_cast<std::size_t>(p.node)];
            node.feature = p.split.feature;
            node.threshold = p.split.threshold;
            const auto left_id = static_cast<std::int32_t>(nodes_.size());
            nodes_[static_cast<std::size_t>(p.node)].left = left_id;
            nodes_[static_cast<std::size_t>(p.node)].right = left_id + 1;
            // Reserve both child slots before recursing into either.
            nodes_.emplace_back();
            nodes_.emplace_back();
            fill_leaf(left_id, left);
            fill_leaf(left_id + 1, right);
            ++leaves;
            push_child(frontier, left_id, std::move(left), p.depth + 1);
            push_child(frontier, left_id + 1, std::move(right), p.depth + 1);
        }
        return std::move(nodes_);
    }

private:
    template <typename Queue>
    void push_child(Queue& frontier, std::int32_t id, std::vector<std::size_t> rows, std::size_t depth) {
        Pending p;
        p.node = id;
        p.depth = depth;
        p.split = best_split(rows, depth);
        p.rows = std::move(rows);
        if (p.split.valid) {
            frontier.push(std::move(p));
        }
    }

    double weight(std::size_t r) const { return weights_.empty() ? 1.0 : weights_[r]; }
    double value(std::size_t r, std::size_t f) const {
        return X_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f));
    }

    std::int32_t new_leaf(const std::vector<std::size_t>& rows) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        fill_leaf(id, rows);
        return id;
    }

    void fill_leaf(std::int32_t id, const std::vector<std::size_t>& rows) {
        double w = 0.0;
        double s = 0.0;
        for (const auto r : rows) {
            w += weight(r);
            s += weight(r) * y_(static_cast<Eigen::Index>(r));
        }
        nodes_[static_cast<std::size_t>(id)].value = w > 0.0 ? s / w : 0.0;
    }

    bool constant_feature(const std::vector<std::size_t>& rows, std::size_t f) const {
        const double first = value(rows.front(), f);
        return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return value(r, f) == first; });
    }

    std::vector<std::size_t> candidate_features(const std::vector<std::size_t>& rows) {
        const auto d = static_cast<std::size_t>(X_.cols());
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (options_.max_features == 0 || options_.max_features >= d) {
            return all;
        }
        // Draw features in random order until enough non-constant ones are found.
        std::shuffle(all.begin(), all.end(), rng_);
        std::vector<std::size_t> chosen;
        for (const auto f : all) {
            if (!constant_feature(rows, f)) {
                chosen.push_back(f);
                if (chosen.size() == options_.max_features) {
                    break;
                }
            }
        }
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

    Split best_split(const std::vector<std::size_t>& rows, std::size_t depth) {
        Split best;
        const std::size_t n = rows.size();
        if (n == 0 || (options_.max_depth != 0 && depth >= options_.max_depth) || n < options_.min_samples_split ||
            n < 2 * options_.min_samples_leaf) {
            return best;
        }
        const double y0 = y_(static_cast<Eigen::Index>(rows.front()));
        if (std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return y_(static_cast<Eigen::Index>(r)) == y0; })) {
            return best;
        }

        double total_w = 0.0;
        double total_s = 0.0;
        for (const auto r : rows) {
            total_w += weight(r);
            total_s += weight(r) * y_(static_cast<Eigen::Index>(r));
        }
        const double parent_proxy = total_s * total_s / total_w;
        double best_proxy = -std::numeric_limits<double>::infinity();

        std::vector<std::pair<double, std::size_t>> sorted(n);
        for (const auto f : candidate_features(rows)) {
            for (std::size_t i = 0; i < n; ++i) {
                sorted[i] = {value(rows[i], f), rows[i]};
            }
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) {
                continue;
            }
            double left_w = 0.0;
            double left_s = 0.0;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                const auto r = sorted[p].second;
                left_w += weight(r);
                left_s += weight(r) * y_(static_cast<Eigen::Index>(r));
                if (sorted[p].first == sorted[p + 1].first) {
                    continue;
                }
                const std::size_t left_n = p + 1;
                if (left_n < options_.min_samples_leaf || n - left_n < options_.min_samples_leaf) {
                    continue;
                }
                const double right_w = total_w - left_w;
                const double right_s = total_s - left_s;
                if (left_w <= 0.0 || right_w <= 0.0) {
                    continue;
                }
                const double proxy = left_s * left_s / left_w + right_s * right_s / right_w;
                // Strict improvement beyond rounding noise; ties keep the earlier candidate.
                if (!best.valid || proxy > best_proxy + 1e-12 * std::max(1.0, std::abs(best_proxy))) {
                    best_proxy = proxy;
                    best.valid = true;
                    best.feature = static_cast<std::int32_t>(f);
                    double threshold = 0.5 * (sorted[p].first + sorted[p + 1].first);
                    if (!(threshold < sorted[p + 1].first)) {
                        threshold = sorted[p].first;
                    }
                    best.threshold = threshold;
                }
            }
        }
        if (best.valid) {
            best.gain = std::max(0.0, best_proxy - parent_proxy);
        }
        return best;
    }

    const Matrix& X_;
    const Vector& y_;
    std::span<const double> weights_;
    const TreeOptions& options_;
    std::mt19937_64& rng_;
    std::vector<RegressionTree::Node> nodes_;
};

}  // namespace

RegressionTree RegressionTree::fit(const Matrix& X, const Vector& y, std::span<const double> weights,
                                   const TreeOptions& options, std::mt19937_64& rng) {
    if (!weights.empty() && weights.size() != static_cast<std::size_t>(X.rows())) {
        throw ShapeError("tree sample weights do not match the number of rows");
    }
    RegressionTree tree;
    tree.nodes_ = Builder(X, y, weights, options, rng).build();
    return tree;
}

double RegressionTree::predict_row(const double* row) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto& node = nodes_[i];
        i = static_cast<std::size_t>(row[node.feature] <= node.threshold ? node.left : node.right);
    }
    return nodes_[i].value;
}

Vector RegressionTree::predict(const Matrix& X) const {
    Vector out(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        out(r) = predict_row(X.row(r).data());
    }
    return out;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

std::size_t RegressionTree::depth() const {
    std::size_t deepest = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [i, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (nodes_[i].feature >= 0) {
            stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
            stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
        }
    }
    return deepest;
}

void RegressionTree::save(std::ostream& out) const {
    io::put_u64(out, nodes_.size());
    for (const auto& n : nodes_) {
        io::put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.feature)));
        io::put_f64(out, n.threshold);
        io::put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.left)));
        io::put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(n.right)));
        io::put_f64(out, n.value);
    }
}

RegressionTree RegressionTree::load(std::istream& in) {
    RegressionTree tree;
    const auto count = io::get_size(in, std::size_t{1} << 28);
    if (count == 0) {
        throw IoError("corrupt model artifact (empty tree)");
    }
    tree.nodes_.resize(count);
    for (auto& n : tree.nodes_) {
        n.feature = static_cast<std::int32_t>(static_cast<std::int64_t>(io::get_u64(in)));
        n.threshold = io::get_f64(in);
        n.left = static_cast<std::int32_t>(static_cast<std::int64_t>(io::get_u64(in)));
        n.right = static_cast<std::int32_t>(static_cast<std::int64_t>(io::get_u64(in)));
        n.value = io::get_f64(in);
        const auto limit = static_cast<std::int32_t>(count);
        if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= limit || n.right >= limit)) {
            throw IoError("corrupt model artifact (bad tree link)");
        }
    }
    return tree;
}

TreeModel::TreeModel(std::size_t n_features, RegressionTree tree, FitInfo info)
    : RegressorModel(Family::DTR, n_features, std::move(info)), tree_(std::move(tree)) {}

Vector TreeModel::predict_rows(const Matrix& X) const { return tree_.predict(X); }

void TreeModel::save_payload(std::ostream& out) const { tree_.save(out); }

std::unique_ptr<TreeModel> TreeModel::load_payload(std::size_t n_features, std::istream& in, FitInfo info) {
    return std::make_unique<TreeModel>(n_features, RegressionTree::load(in), std::move(info));
}

std::unique_ptr<TreeModel> fit_dtr(const Matrix& X, const Vector& y, const DtrOptions& options, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto tree = RegressionTree::fit(X, y, {}, options.tree, rng);
    return std::make_unique<TreeModel>(static_cast<std::size_t>(X.cols()), std::move(tree), FitInfo{});
}

}  // namespace tafs::regress
