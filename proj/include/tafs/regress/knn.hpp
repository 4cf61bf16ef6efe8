#pragma once

#include "tafs/regress.hpp"

namespace tafs::regress {

enum class KnnMetric : std::uint8_t { Manhattan, Euclidean };
enum class KnnWeights : std::uint8_t { Uniform, Distance };

struct KnnOptions {
    std::size_t n_neighbors = 2;
    KnnMetric metric = KnnMetric::Manhattan;
    KnnWeights weights = KnnWeights::Distance;
};

/// Brute-force neighbour regression. Under distance weighting, neighbours at
/// distance zero take the whole vote (their targets are averaged).
/// Equidistant neighbours are ranked by training-row index.
class KnnModel final : public RegressorModel {
public:
    KnnModel(Matrix X, Vector y, KnnOptions options, FitInfo info);

    static std::unique_ptr<KnnModel> load_payload(std::istream& in, FitInfo info);

protected:
    Vector predict_rows(const Matrix& X) const override;
    void save_payload(std::ostream& out) const override;

private:
    Matrix X_;
    Vector y_;
    KnnOptions options_;
};

std::unique_ptr<KnnModel> fit_knn(const Matrix& X, const Vector& y, const KnnOptions& options);

}  // namespace tafs::regress
