#include "tafs/regress/mlp.hpp"

#include "regress/binary_io.hpp"
#include "regress/lbfgs.hpp"

#include <cmath>
#include <random>

namespace tafs::regress {

namespace {

using RowMatrixMap = Eigen::Map<const Matrix>;
using RowMatrixMapMut = Eigen::Map<Matrix>;
using VectorMap = Eigen::Map<const Vector>;
using VectorMapMut = Eigen::Map<Vector>;

struct Layers {
    RowMatrixMap w1;
    VectorMap b1;
    VectorMap w2;
    double b2;
};

Layers view(const MlpShape& shape, std::span<const double> p) {
    const auto in = static_cast<Eigen::Index>(shape.inputs);
    const auto h = static_cast<Eigen::Index>(shape.hidden);
    const double* base = p.data();
    return Layers{RowMatrixMap(base, in, h), VectorMap(base + in * h, h), VectorMap(base + in * h + h, h),
                  base[in * h + 2 * h]};
}

Matrix hidden_activations(const Layers& layers, const Matrix& X) {
    Matrix z = X * layers.w1;
    z.rowwise() += layers.b1.transpose();
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

double mlp_loss_and_gradient(const MlpShape& shape, std::span<const double> params, const Matrix& X, const Vector& y,
                             double alpha, std::span<double> grad) {
    const auto layers = view(shape, params);
    const auto m = static_cast<double>(X.rows());
    const Matrix a = hidden_activations(layers, X);
    Vector out = a * layers.w2;
    out.array() += layers.b2;
    const Vector delta = (out - y) / m;

    const double loss = 0.5 * (out - y).squaredNorm() / m +
                        0.5 * alpha * (layers.w1.squaredNorm() + layers.w2.squaredNorm()) / m;

    if (!grad.empty()) {
        const auto in = static_cast<Eigen::Index>(shape.inputs);
        const auto h = static_cast<Eigen::Index>(shape.hidden);
        double* g = grad.data();
        RowMatrixMapMut g_w1(g, in, h);
        VectorMapMut g_b1(g + in * h, h);
        VectorMapMut g_w2(g + in * h + h, h);

        g_w2 = a.transpose() * delta + (alpha / m) * layers.w2;
        g[in * h + 2 * h] = delta.sum();
        const Matrix delta_hidden =
            ((delta * layers.w2.transpose()).array() * a.array() * (1.0 - a.array())).matrix();
        g_w1 = X.transpose() * delta_hidden + (alpha / m) * layers.w1;
        g_b1 = delta_hidden.colwise().sum().transpose();
    }
    return loss;
}

std::vector<double> mlp_initial_params(const MlpShape& shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> p;
    p.reserve(shape.size());
    auto draw = [&](std::size_t count, double fan_in, double fan_out) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < count; ++i) {
            p.push_back(dist(rng));
        }
    };
    const auto in = static_cast<double>(shape.inputs);
    const auto h = static_cast<double>(shape.hidden);
    draw(shape.inputs * shape.hidden, in, h);
    draw(shape.hidden, in, h);
    draw(shape.hidden, h, 1.0);
    draw(1, h, 1.0);
    return p;
}

MlpModel::MlpModel(MlpShape shape, std::vector<double> params, FitInfo info)
    : RegressorModel(Family::MLP, shape.inputs, std::move(info)), shape_(shape), params_(std::move(params)) {}

Vector MlpModel::predict_rows(const Matrix& X) const {
    const auto layers = view(shape_, params_);
    Vector out = hidden_activations(layers, X) * layers.w2;
    out.array() += layers.b2;
    return out;
}

void MlpModel::save_payload(std::ostream& out) const {
    io::put_u64(out, shape_.inputs);
    io::put_u64(out, shape_.hidden);
    io::put_doubles(out, params_.data(), params_.size());
}

std::unique_ptr<MlpModel> MlpModel::load_payload(std::istream& in, FitInfo info) {
    MlpShape shape;
    shape.inputs = io::get_size(in);
    shape.hidden = io::get_size(in);
    auto params = io::get_doubles(in);
    if (params.size() != shape.size()) {
        throw IoError("corrupt model artifact (MLP parameter count)");
    }
    return std::make_unique<MlpModel>(shape, std::move(params), std::move(info));
}

std::unique_ptr<MlpModel> fit_mlp(const Matrix& X, const Vector& y, const MlpOptions& options, std::uint64_t seed) {
    const MlpShape shape{static_cast<std::size_t>(X.cols()), options.hidden};
    auto objective = [&](std::span<const double> p, std::span<double> g) {
        return mlp_loss_and_gradient(shape, p, X, y, options.alpha, g);
    };
    lbfgs::Options lo;
    lo.max_iter = options.max_iter;
    lo.memory = options.memory;
    lo.gtol = options.tol;
    auto result = lbfgs::minimize(objective, mlp_initial_params(shape, seed), lo);

    FitInfo info;
    info.iterations = result.iterations;
    info.converged = result.converged;
    info.objective_trace = std::move(result.trace);
    if (!result.converged) {
        info.warnings.push_back("MLP L-BFGS stopped without converging: " + result.message);
    }
    return std::make_unique<MlpModel>(shape, std::move(result.x), std::move(info));
}

}  // namespace tafs::regress
