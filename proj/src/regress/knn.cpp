#include "tafs/regress/knn.hpp"

#include "regress/binary_io.hpp"

#include <algorithm>
#include <cmath>

namespace tafs::regress {

KnnModel::KnnModel(Matrix X, Vector y, KnnOptions options, FitInfo info)
    : RegressorModel(Family::KNN, static_cast<std::size_t>(X.cols()), std::move(info)),
      X_(std::move(X)),
      y_(std::move(y)),
      options_(options) {}

Vector KnnModel::predict_rows(const Matrix& X) const {
    const auto m = static_cast<std::size_t>(X_.rows());
    const std::size_t k = std::min(options_.n_neighbors, m);
    Vector out(X.rows());
    std::vector<std::pair<double, std::size_t>> dist(m);
    for (Eigen::Index q = 0; q < X.rows(); ++q) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto diff = X_.row(static_cast<Eigen::Index>(i)) - X.row(q);
            const double d =
                options_.metric == KnnMetric::Manhattan ? diff.cwiseAbs().sum() : std::sqrt(diff.squaredNorm());
            dist[i] = {d, i};
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

        double pred = 0.0;
        if (options_.weights == KnnWeights::Uniform) {
            for (std::size_t j = 0; j < k; ++j) {
                pred += y_(static_cast<Eigen::Index>(dist[j].second));
            }
            pred /= static_cast<double>(k);
        } else if (dist[0].first == 0.0) {
            double sum = 0.0;
            std::size_t count = 0;
            for (std::size_t j = 0; j < k && dist[j].first == 0.0; ++j) {
                sum += y_(static_cast<Eigen::Index>(dist[j].second));
                ++count;
            }
            pred = sum / static_cast<double>(count);
        } else {
            double wsum = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double w = 1.0 / dist[j].first;
                pred += w * y_(static_cast<Eigen::Index>(dist[j].second));
                wsum += w;
            }
            pred /= wsum;
        }
        out(q) = pred;
    }
    return out;
}

void KnnModel::save_payload(std::ostream& out) const {
    io::put_u64(out, options_.n_neighbors);
    io::put_u8(out, static_cast<std::uint8_t>(options_.metric));
    io::put_u8(out, static_cast<std::uint8_t>(options_.weights));
    io::put_matrix(out, X_);
    io::put_vector(out, y_);
}

std::unique_ptr<KnnModel> KnnModel::load_payload(std::istream& in, FitInfo info) {
    KnnOptions options;
    options.n_neighbors = io::get_size(in);
    const auto metric = io::get_u8(in);
    const auto weights = io::get_u8(in);
    if (metric > 1 || weights > 1 || options.n_neighbors == 0) {
        throw IoError("corrupt model artifact (KNN options)");
    }
    options.metric = static_cast<KnnMetric>(metric);
    options.weights = static_cast<KnnWeights>(weights);
    auto X = io::get_matrix(in);
    auto y = io::get_vector(in);
    if (y.size() != X.rows() || X.rows() == 0) {
        throw IoError("corrupt model artifact (KNN training set)");
    }
    return std::make_unique<KnnModel>(std::move(X), std::move(y), options, std::move(info));
}

std::unique_ptr<KnnModel> fit_knn(const Matrix& X, const Vector& y, const KnnOptions& options) {
    if (options.n_neighbors > static_cast<std::size_t>(X.rows())) {
        throw InsufficientSamplesError("n_neighbors=" + std::to_string(options.n_neighbors) + " exceeds the " +
                                       std::to_string(X.rows()) + " training rows");
    }
    return std::make_unique<KnnModel>(X, y, options, FitInfo{});
}

}  // namespace tafs::regress
