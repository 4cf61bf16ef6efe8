#include "support.hpp"
#include "tafs/error.hpp"
#include "tafs/regress.hpp"
#include "tafs/regress/ensemble.hpp"
#include "tafs/regress/linear.hpp"
#include "tafs/regress/mlp.hpp"
#include "tafs/regress/svr.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tafs;
using regress::Family;
using regress::RegressorConfig;

namespace {

struct Data {
    Matrix X;
    Vector y;
};

Data linear_data(Eigen::Index m, Eigen::Index d, double noise, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Data out{test::random_matrix(m, d, rng), Vector(m)};
    const Matrix beta = test::random_matrix(d, 1, rng);
    std::normal_distribution<double> eps(0.0, noise);
    for (Eigen::Index i = 0; i < m; ++i) {
        out.y(i) = (out.X.row(i) * beta)(0, 0) + 0.5 + eps(rng);
    }
    return out;
}

const regress::LinearModel& as_linear(const regress::RegressorModel& m) {
    return dynamic_cast<const regress::LinearModel&>(m);
}

RegressorConfig small(Family f) { return RegressorConfig::tuned(f, 3).fast(10); }

}  // namespace

TEST_CASE("LR interpolates exactly linear data") {
    Matrix X(10, 1);
    Vector y(10);
    for (Eigen::Index i = 0; i < 10; ++i) {
        X(i, 0) = static_cast<double>(i) * 0.7 - 2.0;
        y(i) = 2.0 * X(i, 0) + 1.0;
    }
    const auto m = regress::fit(RegressorConfig::tuned(Family::LR), X, y);
    CHECK(std::abs(as_linear(*m).coef()(0) - 2.0) <= 1e-10);
    CHECK(std::abs(as_linear(*m).intercept() - 1.0) <= 1e-10);
}

TEST_CASE("LR agrees with the normal-equation oracle") {
    const auto d = linear_data(60, 5, 0.3, 1);
    const auto m = regress::fit(RegressorConfig::tuned(Family::LR), d.X, d.y);
    const test::NaiveOls ols(d.X, d.y);
    CHECK(std::abs(as_linear(*m).intercept() - ols.beta[0]) <= 1e-9);
    for (Eigen::Index j = 0; j < 5; ++j) {
        CHECK(std::abs(as_linear(*m).coef()(j) - ols.beta[static_cast<std::size_t>(j) + 1]) <= 1e-9);
    }
}

TEST_CASE("Ridge with alpha 0 equals LR") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = linear_data(40, 8, 1.0, seed);
        const auto lr = regress::fit(RegressorConfig::tuned(Family::LR), d.X, d.y);
        const auto ridge = regress::fit(RegressorConfig::tuned(Family::Ridge), d.X, d.y);
        CHECK((as_linear(*lr).coef() - as_linear(*ridge).coef()).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::abs(as_linear(*lr).intercept() - as_linear(*ridge).intercept()) <= 1e-8);
    }
}

TEST_CASE("Ridge coefficients shrink as alpha grows") {
    const auto d = linear_data(50, 6, 0.5, 9);
    double previous = std::numeric_limits<double>::infinity();
    for (const double alpha : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
        auto c = RegressorConfig::tuned(Family::Ridge);
        c.set("alpha", alpha);
        const double norm = as_linear(*regress::fit(c, d.X, d.y)).coef().norm();
        CHECK(norm <= previous);
        previous = norm;
    }
}

TEST_CASE("Ridge survives nearly collinear designs") {
    std::mt19937_64 rng(4);
    Matrix X = test::random_matrix(40, 12, rng);
    for (Eigen::Index j = 6; j < 12; ++j) {
        X.col(j) = X.col(j - 6) * (1.0 + 1e-13) + X.col(0) * 1e-14;
    }
    const Vector y = X.col(0) * 2.0;
    const auto m = regress::fit(RegressorConfig::tuned(Family::Ridge), X, y);
    CHECK(m->predict(X).allFinite());
    CHECK((m->predict(X) - y).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Lasso: dominating penalty zeroes the slopes") {
    auto d = linear_data(50, 4, 0.1, 2);
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
        auto col = d.X.col(j);
        const double mean = col.mean();
        const double sd = std::sqrt((col.array() - mean).square().mean());
        col = (col.array() - mean) / sd;
    }
    auto c = RegressorConfig::tuned(Family::Lasso);
    c.set("alpha", 1e6);
    const auto m = regress::fit(c, d.X, d.y);
    CHECK(as_linear(*m).coef().cwiseAbs().maxCoeff() == 0.0);
    CHECK(as_linear(*m).intercept() == doctest::Approx(d.y.mean()).epsilon(1e-12));
}

TEST_CASE("Lasso objective never increases across sweeps") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = linear_data(80, 10, 0.5, seed);
        for (const double alpha : {0.001, 0.05, 0.3}) {
            regress::LassoOptions o;
            o.alpha = alpha;
            o.max_iter = 500;
            const auto m = regress::fit_lasso(d.X, d.y, o);
            const auto& trace = m->info().objective_trace;
            REQUIRE(trace.size() >= 2);
            for (std::size_t i = 1; i < trace.size(); ++i) {
                CHECK(trace[i] <= trace[i - 1] + 1e-15 * std::abs(trace[i - 1]));
            }
        }
    }
}

TEST_CASE("Lasso non-convergence is reported, not thrown") {
    const auto d = linear_data(80, 10, 0.5, 1);
    auto c = RegressorConfig::tuned(Family::Lasso);
    c.set("alpha", 0.001).set("max_iter", 1.0);
    const auto m = regress::fit(c, d.X, d.y);
    CHECK_FALSE(m->info().converged);
    CHECK_FALSE(m->info().warnings.empty());
}

TEST_CASE("KNN with one neighbour and deep trees memorise the training rows") {
    const auto d = linear_data(30, 3, 1.0, 5);
    auto knn = RegressorConfig::tuned(Family::KNN);
    knn.set("n_neighbors", 1.0);
    CHECK(regress::fit(knn, d.X, d.y)->predict(d.X) == d.y);
    knn.set("metric", "euclidean").set("weights", "uniform");
    CHECK(regress::fit(knn, d.X, d.y)->predict(d.X) == d.y);

    auto dtr = RegressorConfig::tuned(Family::DTR);
    dtr.set("max_depth", 50.0).set("min_samples_leaf", 1.0);
    CHECK(regress::fit(dtr, d.X, d.y)->predict(d.X) == d.y);
}

TEST_CASE("KNN distance weighting gives zero-distance neighbours the whole vote") {
    Matrix X(3, 1);
    X << 0.0, 0.0, 5.0;
    Vector y(3);
    y << 1.0, 3.0, 100.0;
    auto c = RegressorConfig::tuned(Family::KNN);
    c.set("n_neighbors", 3.0);
    Matrix q(1, 1);
    q << 0.0;
    CHECK(regress::fit(c, X, y)->predict(q)(0) == 2.0);
}

TEST_CASE("GBR without estimators predicts the mean") {
    const auto d = linear_data(25, 2, 1.0, 6);
    auto c = RegressorConfig::tuned(Family::GBR);
    c.set("n_estimators", 0.0);
    const auto p = regress::fit(c, d.X, d.y)->predict(d.X);
    CHECK((p.array() - d.y.mean()).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("single-member ensembles reduce to their base tree") {
    const auto d = linear_data(60, 4, 1.0, 7);

    auto ada = RegressorConfig::tuned(Family::ADA);
    ada.set("n_estimators", 1.0);
    auto ada_base = RegressorConfig::tuned(Family::DTR);
    ada_base.set("max_depth", 3.0).set("min_samples_leaf", 1.0);
    CHECK((regress::fit(ada, d.X, d.y)->predict(d.X) - regress::fit(ada_base, d.X, d.y)->predict(d.X))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    auto gbr = RegressorConfig::tuned(Family::GBR);
    gbr.set("n_estimators", 1.0).set("learning_rate", 1.0);
    auto gbr_base = RegressorConfig::tuned(Family::DTR);
    gbr_base.set("max_depth", 3.0).set("min_samples_leaf", 1.0).set("max_leaf_nodes", 30.0);
    CHECK((regress::fit(gbr, d.X, d.y)->predict(d.X) - regress::fit(gbr_base, d.X, d.y)->predict(d.X))
              .cwiseAbs()
              .maxCoeff() <= 1e-9);

    auto rfr = RegressorConfig::tuned(Family::RFR);
    rfr.set("n_estimators", 1.0).set("bootstrap", "false");
    auto rfr_base = RegressorConfig::tuned(Family::DTR);
    rfr_base.set("max_depth", "None").set("min_samples_leaf", 1.0);
    CHECK(regress::fit(rfr, d.X, d.y)->predict(d.X) == regress::fit(rfr_base, d.X, d.y)->predict(d.X));
}

TEST_CASE("MLP analytic gradient matches central differences") {
    const auto d = linear_data(15, 3, 0.3, 8);
    const regress::MlpShape shape{3, 5};
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0.0, 0.7);
    std::vector<double> grad(shape.size());
    std::vector<double> dummy(shape.size());
    for (int point = 0; point < 20; ++point) {
        std::vector<double> p(shape.size());
        for (auto& v : p) {
            v = n(rng);
        }
        regress::mlp_loss_and_gradient(shape, p, d.X, d.y, 1.0, grad);
        std::vector<double> numeric(shape.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double h = 1e-5 * std::max(1.0, std::abs(p[i]));
            auto plus = p;
            auto minus = p;
            plus[i] += h;
            minus[i] -= h;
            numeric[i] = (regress::mlp_loss_and_gradient(shape, plus, d.X, d.y, 1.0, dummy) -
                          regress::mlp_loss_and_gradient(shape, minus, d.X, d.y, 1.0, dummy)) /
                         (2.0 * h);
        }
        double diff = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            diff += (grad[i] - numeric[i]) * (grad[i] - numeric[i]);
            scale += grad[i] * grad[i] + numeric[i] * numeric[i];
        }
        CHECK(std::sqrt(diff) / std::sqrt(scale) <= 1e-5);
    }
}

TEST_CASE("MLP training lowers the loss") {
    const auto d = linear_data(60, 3, 0.05, 10);
    regress::MlpOptions o;
    o.hidden = 8;
    o.alpha = 1e-3;
    o.max_iter = 300;
    const regress::MlpShape shape{3, 8};
    const auto init = regress::mlp_initial_params(shape, 4);
    std::vector<double> g(shape.size());
    const double before = regress::mlp_loss_and_gradient(shape, init, d.X, d.y, o.alpha, g);
    const auto m = regress::fit_mlp(d.X, d.y, o, 4);
    const double after = regress::mlp_loss_and_gradient(shape, m->params(), d.X, d.y, o.alpha, g);
    CHECK(after < 0.1 * before);
    const auto& trace = m->info().objective_trace;
    REQUIRE(!trace.empty());
    CHECK(trace.back() <= trace.front());
}

TEST_CASE("SVR dual stays in the box and small C keeps predictions bounded") {
    const auto d = linear_data(40, 2, 0.2, 11);
    for (const double C : {0.1, 1.0, 10.0}) {
        regress::SvrOptions o;
        o.C = C;
        const auto m = regress::fit_svr(d.X, d.y, o);
        CHECK(m->alpha().minCoeff() >= 0.0);
        CHECK(m->alpha_star().minCoeff() >= 0.0);
        CHECK(m->alpha().maxCoeff() <= C);
        CHECK(m->alpha_star().maxCoeff() <= C);
    }
    regress::SvrOptions tiny;
    tiny.C = 1e-6;
    const auto m = regress::fit_svr(d.X, d.y, tiny);
    CHECK(m->predict(d.X).cwiseAbs().maxCoeff() <= d.y.cwiseAbs().maxCoeff() + tiny.epsilon);
}

TEST_CASE("LR and Ridge are translation-equivariant in y") {
    const auto d = linear_data(30, 4, 0.5, 12);
    const Vector shifted = d.y.array() + 7.25;
    for (const auto f : {Family::LR, Family::Ridge}) {
        auto c = RegressorConfig::tuned(f);
        if (f == Family::Ridge) {
            c.set("alpha", 0.5);
        }
        const Vector a = regress::fit(c, d.X, d.y)->predict(d.X);
        const Vector b = regress::fit(c, d.X, shifted)->predict(d.X);
        CHECK(((b - a).array() - 7.25).abs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("every family is deterministic and round-trips through a saved model") {
    const auto d = linear_data(40, 3, 0.5, 13);
    for (const auto f : regress::all_families()) {
        INFO(regress::family_name(f));
        const auto c = small(f);
        const auto a = regress::fit(c, d.X, d.y);
        const auto b = regress::fit(c, d.X, d.y);
        const Vector pa = a->predict(d.X);
        CHECK(pa == b->predict(d.X));
        CHECK(pa.allFinite());

        std::stringstream io;
        a->save(io);
        const auto back = regress::RegressorModel::load(io);
        CHECK(back->family() == f);
        CHECK(back->n_features() == 3);
        CHECK(back->predict(d.X) == pa);
    }
}

TEST_CASE("seeded families change with the seed") {
    const auto d = linear_data(40, 3, 0.5, 14);
    auto a = RegressorConfig::tuned(Family::RFR, 1).fast(5);
    auto b = RegressorConfig::tuned(Family::RFR, 2).fast(5);
    a.set("max_features", 1.0);
    b.set("max_features", 1.0);
    CHECK(regress::fit(a, d.X, d.y)->predict(d.X) != regress::fit(b, d.X, d.y)->predict(d.X));
    b.set("random_state", 1.0);
    CHECK(regress::fit(a, d.X, d.y)->predict(d.X) == regress::fit(b, d.X, d.y)->predict(d.X));
}

TEST_CASE("input validation") {
    const auto d = linear_data(10, 2, 0.5, 15);
    const auto lr = RegressorConfig::tuned(Family::LR);
    Matrix bad = d.X;
    bad(3, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(regress::fit(lr, bad, d.y), NumericInputError);
    CHECK_THROWS_AS(regress::fit(lr, d.X.topRows(1), d.y.head(1)), InsufficientSamplesError);
    CHECK_THROWS_AS(regress::fit(lr, d.X, d.y.head(5)), ShapeError);
    CHECK_THROWS_AS(regress::fit(lr, Matrix(10, 0), d.y), ShapeError);
    const auto m = regress::fit(lr, d.X, d.y);
    CHECK_THROWS_AS(m->predict(Matrix(3, 3)), ShapeError);

    auto c = RegressorConfig::tuned(Family::Ridge);
    c.set("alpha", -1.0);
    CHECK_THROWS_AS(c.validate(), ConfigError);
    auto knn = RegressorConfig::tuned(Family::KNN);
    knn.set("n_neighbors", 0.0);
    CHECK_THROWS_AS(knn.validate(), ConfigError);
    auto unknown = RegressorConfig::tuned(Family::LR);
    unknown.set("depth", 2.0);
    CHECK_THROWS_AS(regress::fit(unknown, d.X, d.y), ConfigError);
    CHECK_THROWS_AS(regress::parse_family("XGB"), ConfigError);
    CHECK(regress::parse_family("ridge") == Family::Ridge);

    std::stringstream junk("not a model");
    CHECK_THROWS(regress::RegressorModel::load(junk));
}

TEST_CASE("tuned defaults validate and fast caps the ensembles") {
    for (const auto f : regress::all_families()) {
        CHECK_NOTHROW(RegressorConfig::tuned(f).validate());
    }
    CHECK(RegressorConfig::tuned(Family::ADA).params.at("n_estimators") == "2000");
    CHECK(RegressorConfig::tuned(Family::RFR).fast(50).params.at("n_estimators") == "50");
    CHECK(RegressorConfig::tuned(Family::GBR).fast(50).params.at("n_estimators") == "50");
    CHECK(RegressorConfig::tuned(Family::Ridge).params.at("alpha") == "0");
}

TEST_CASE("the fit counter counts every fit call") {
    const auto d = linear_data(10, 2, 0.5, 16);
    const auto before = regress::fit_call_count();
    for (int i = 0; i < 7; ++i) {
        regress::fit(RegressorConfig::tuned(Family::LR), d.X, d.y);
    }
    CHECK(regress::fit_call_count() - before == 7);
}
