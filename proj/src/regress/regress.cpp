#include "tafs/regress.hpp"

#include "common/text.hpp"
#include "regress/binary_io.hpp"
#include "tafs/error.hpp"
#include "tafs/regress/ensemble.hpp"
#include "tafs/regress/knn.hpp"
#include "tafs/regress/linear.hpp"
#include "tafs/regress/mlp.hpp"
#include "tafs/regress/svr.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>

namespace tafs::regress {

namespace {

constexpr std::array<Family, 10> kFamilies{Family::LR,  Family::Ridge, Family::Lasso, Family::DTR, Family::KNN,
                                           Family::MLP, Family::SVR,   Family::ADA,   Family::GBR, Family::RFR};
constexpr std::array<std::string_view, 10> kNames{"LR", "Ridge", "Lasso", "DTR", "KNN",
                                                  "MLP", "SVR", "ADA", "GBR", "RFR"};
std::atomic<std::uint64_t> g_fit_calls{0};

constexpr char kMagic[8] = {'T', 'A', 'F', 'S', 'M', 'D', 'L', '\0'};

std::string format_value(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

// Reads one family's keys out of a RegressorConfig. Every key must be
// consumed by exactly one accessor; leftovers are reported by finish().
class ParamReader {
public:
    explicit ParamReader(const RegressorConfig& config) : config_(config) {}

    double number(std::string_view key, double fallback, double lo, double hi, bool lo_open = false) {
        const auto* text = take(key);
        if (text == nullptr) {
            return fallback;
        }
        double v = 0.0;
        if (!detail::parse_double(detail::trim(*text), v) || !std::isfinite(v)) {
            fail(key, *text, "a finite number");
        }
        if (v < lo || v > hi || (lo_open && v == lo)) {
            fail(key, *text, "a value in " + std::string(lo_open ? "(" : "[") + format_value(lo) + ", " +
                                 format_value(hi) + "]");
        }
        return v;
    }

    // "None" maps to `none_value` when allowed.
    std::size_t count(std::string_view key, std::size_t fallback, std::size_t lo,
                      std::optional<std::size_t> none_value = std::nullopt) {
        const auto* text = take(key);
        if (text == nullptr) {
            return fallback;
        }
        const auto t = detail::trim(*text);
        if (none_value && detail::lower(t) == "none") {
            return *none_value;
        }
        double v = 0.0;
        if (!detail::parse_double(t, v) || v != std::floor(v) || v < static_cast<double>(lo) || v > 1e12) {
            fail(key, *text, "an integer >= " + std::to_string(lo) + (none_value ? " or None" : ""));
        }
        return static_cast<std::size_t>(v);
    }

    bool flag(std::string_view key, bool fallback) {
        const auto* text = take(key);
        if (text == nullptr) {
            return fallback;
        }
        const auto t = detail::lower(detail::trim(*text));
        if (t == "true" || t == "1") {
            return true;
        }
        if (t == "false" || t == "0") {
            return false;
        }
        fail(key, *text, "true or false");
    }

    std::string choice(std::string_view key, std::string_view fallback, std::initializer_list<std::string_view> allowed) {
        const auto* text = take(key);
        if (text == nullptr) {
            return std::string(fallback);
        }
        auto t = detail::lower(detail::trim(*text));
        if (t.size() >= 2 && (t.front() == '\'' || t.front() == '"') && t.back() == t.front()) {
            t = t.substr(1, t.size() - 2);
        }
        for (const auto a : allowed) {
            if (t == a) {
                return t;
            }
        }
        std::string options;
        for (const auto a : allowed) {
            options += (options.empty() ? "" : "|") + std::string(a);
        }
        fail(key, *text, options);
    }

    // Accepted for compatibility; has no effect on these solvers.
    void ignore(std::string_view key) { take(key); }

    std::uint64_t seed() {
        const auto* text = take("random_state");
        if (text == nullptr || detail::lower(detail::trim(*text)) == "none") {
            return config_.seed;
        }
        double v = 0.0;
        if (!detail::parse_double(detail::trim(*text), v) || v < 0 || v != std::floor(v) || v > 9.007e15) {
            fail("random_state", *text, "a non-negative integer or None");
        }
        return static_cast<std::uint64_t>(v);
    }

    void finish() const {
        for (const auto& [key, value] : config_.params) {
            if (!used_.contains(key)) {
                throw ConfigError("unknown " + std::string(family_name(config_.family)) + " parameter '" + key + "'");
            }
        }
    }

private:
    const std::string* take(std::string_view key) {
        const auto it = config_.params.find(key);
        if (it == config_.params.end()) {
            return nullptr;
        }
        used_.insert(std::string(key));
        return &it->second;
    }

    [[noreturn]] void fail(std::string_view key, const std::string& value, const std::string& expected) const {
        throw ConfigError(std::string(family_name(config_.family)) + " parameter " + std::string(key) + "='" + value +
                          "' must be " + expected);
    }

    const RegressorConfig& config_;
    std::set<std::string, std::less<>> used_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearOptions linear_options(ParamReader& p) {
    LinearOptions o;
    o.fit_intercept = p.flag("fit_intercept", true);
    p.flag("copy_x", true);
    p.ignore("n_jobs");
    if (p.flag("positive", false)) {
        throw ConfigError("LR parameter positive=True is not supported");
    }
    return o;
}

RidgeOptions ridge_options(ParamReader& p) {
    RidgeOptions o;
    o.alpha = p.number("alpha", o.alpha, 0.0, kInf);
    o.fit_intercept = p.flag("fit_intercept", true);
    p.flag("copy_x", true);
    p.choice("solver", "svd", {"svd", "auto"});
    return o;
}

LassoOptions lasso_options(ParamReader& p) {
    LassoOptions o;
    o.alpha = p.number("alpha", o.alpha, 0.0, kInf);
    o.max_iter = p.count("max_iter", o.max_iter, 1);
    o.tol = p.number("tol", o.tol, 0.0, kInf, true);
    o.fit_intercept = p.flag("fit_intercept", true);
    p.flag("copy_x", true);
    return o;
}

DtrOptions dtr_options(ParamReader& p) {
    DtrOptions o;
    p.choice("criterion", "squared_error", {"squared_error"});
    o.tree.max_depth = p.count("max_depth", o.tree.max_depth, 1, 0);
    o.tree.min_samples_leaf = p.count("min_samples_leaf", o.tree.min_samples_leaf, 1);
    o.tree.min_samples_split = p.count("min_samples_split", o.tree.min_samples_split, 2);
    o.tree.max_leaf_nodes = p.count("max_leaf_nodes", 0, 2, 0);
    o.tree.max_features = p.count("max_features", 0, 1, 0);
    return o;
}

KnnOptions knn_options(ParamReader& p) {
    KnnOptions o;
    o.n_neighbors = p.count("n_neighbors", o.n_neighbors, 1);
    o.metric = p.choice("metric", "manhattan", {"manhattan", "euclidean"}) == "manhattan" ? KnnMetric::Manhattan
                                                                                           : KnnMetric::Euclidean;
    o.weights = p.choice("weights", "distance", {"distance", "uniform"}) == "distance" ? KnnWeights::Distance
                                                                                       : KnnWeights::Uniform;
    p.count("leaf_size", 30, 1);
    p.choice("algorithm", "brute", {"brute", "auto"});
    return o;
}

MlpOptions mlp_options(ParamReader& p) {
    MlpOptions o;
    p.choice("activation", "logistic", {"logistic"});
    p.choice("solver", "lbfgs", {"lbfgs"});
    o.alpha = p.number("alpha", o.alpha, 0.0, kInf);
    o.hidden = p.count("hidden_layer_sizes", o.hidden, 1);
    o.max_iter = p.count("max_iter", o.max_iter, 1);
    o.tol = p.number("tol", o.tol, 0.0, kInf, true);
    o.memory = p.count("memory", o.memory, 1);
    // Step-size settings belong to the stochastic solvers.
    p.choice("learning_rate", "constant", {"constant", "invscaling", "adaptive"});
    p.number("learning_rate_init", 1e-3, 0.0, kInf, true);
    return o;
}

SvrOptions svr_options(ParamReader& p) {
    SvrOptions o;
    p.choice("kernel", "rbf", {"rbf"});
    o.C = p.number("c", o.C, 0.0, kInf, true);
    o.gamma = p.number("gamma", o.gamma, 0.0, kInf, true);
    o.epsilon = p.number("epsilon", o.epsilon, 0.0, kInf);
    o.tol = p.number("tol", o.tol, 0.0, kInf, true);
    o.max_iter = p.count("max_iter", 0, 0);
    return o;
}

AdaOptions ada_options(ParamReader& p) {
    AdaOptions o;
    o.n_estimators = p.count("n_estimators", o.n_estimators, 1);
    o.learning_rate = p.number("learning_rate", o.learning_rate, 0.0, kInf, true);
    const auto loss = p.choice("loss", "square", {"linear", "square", "exponential"});
    o.loss = loss == "linear" ? AdaLoss::Linear : (loss == "square" ? AdaLoss::Square : AdaLoss::Exponential);
    o.max_depth = p.count("max_depth", o.max_depth, 1);
    return o;
}

GbrOptions gbr_options(ParamReader& p) {
    GbrOptions o;
    o.n_estimators = p.count("n_estimators", o.n_estimators, 0);
    o.learning_rate = p.number("learning_rate", o.learning_rate, 0.0, kInf, true);
    o.max_depth = p.count("max_depth", o.max_depth, 1, 0);
    o.max_leaf_nodes = p.count("max_leaf_nodes", o.max_leaf_nodes, 2, 0);
    o.min_samples_split = p.count("min_samples_split", o.min_samples_split, 2);
    o.min_samples_leaf = p.count("min_samples_leaf", o.min_samples_leaf, 1);
    o.subsample = p.number("subsample", o.subsample, 0.0, 1.0, true);
    p.choice("loss", "squared_error", {"squared_error"});
    p.choice("criterion", "friedman_mse", {"squared_error", "friedman_mse"});
    // Quantile level of the huber/quantile losses; unused under squared error.
    p.number("alpha", 0.9, 0.0, 1.0, true);
    return o;
}

RfrOptions rfr_options(ParamReader& p) {
    RfrOptions o;
    o.n_estimators = p.count("n_estimators", o.n_estimators, 1);
    o.max_features = p.count("max_features", o.max_features, 1, 0);
    o.max_depth = p.count("max_depth", o.max_depth, 1, 0);
    o.min_samples_split = p.count("min_samples_split", o.min_samples_split, 2);
    o.min_samples_leaf = p.count("min_samples_leaf", o.min_samples_leaf, 1);
    o.bootstrap = p.flag("bootstrap", o.bootstrap);
    p.choice("criterion", "squared_error", {"squared_error"});
    return o;
}

void check_inputs(const Matrix& X, const Vector& y) {
    if (X.cols() < 1) {
        throw ShapeError("fit needs at least one feature column");
    }
    if (y.size() != X.rows()) {
        throw ShapeError("fit got " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) + " targets");
    }
    if (X.rows() < 2) {
        throw InsufficientSamplesError("fit needs at least 2 samples, got " + std::to_string(X.rows()));
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw NumericInputError("fit input contains NaN or infinite values");
    }
}

void put_string(std::ostream& out, const std::string& s) {
    io::put_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
    std::string s(io::get_size(in, std::size_t{1} << 20), '\0');
    if (!in.read(s.data(), static_cast<std::streamsize>(s.size()))) {
        throw IoError("truncated model artifact");
    }
    return s;
}

}  // namespace

std::span<const Family> all_families() { return kFamilies; }

std::string_view family_name(Family family) { return kNames[static_cast<std::size_t>(family)]; }

Family parse_family(std::string_view name) {
    const auto wanted = detail::lower(detail::trim(name));
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (detail::lower(kNames[i]) == wanted) {
            return kFamilies[i];
        }
    }
    throw ConfigError("unknown regressor family '" + std::string(name) + "'");
}

RegressorConfig& RegressorConfig::set(const std::string& key, double value) { return set(key, format_value(value)); }

RegressorConfig& RegressorConfig::set(const std::string& key, std::string value) {
    // Keys are case-insensitive ("Alpha", "C" and "copy_X" all appear in the wild).
    params[detail::lower(detail::trim(key))] = std::move(value);
    return *this;
}

void RegressorConfig::validate() const {
    ParamReader p(*this);
    switch (family) {
        case Family::LR: linear_options(p); break;
        case Family::Ridge: ridge_options(p); break;
        case Family::Lasso: lasso_options(p); break;
        case Family::DTR: dtr_options(p); break;
        case Family::KNN: knn_options(p); break;
        case Family::MLP: mlp_options(p); break;
        case Family::SVR: svr_options(p); break;
        case Family::ADA: ada_options(p); break;
        case Family::GBR: gbr_options(p); break;
        case Family::RFR: rfr_options(p); break;
    }
    p.seed();
    p.finish();
}

RegressorConfig RegressorConfig::tuned(Family family, std::uint64_t seed) {
    RegressorConfig c;
    c.family = family;
    c.seed = seed;
    switch (family) {
        case Family::LR:
            c.set("copy_X", "True").set("fit_intercept", "True").set("n_jobs", "None").set("positive", "False");
            break;
        case Family::Lasso: c.set("alpha", 0.1).set("max_iter", 200.0); break;
        case Family::Ridge: c.set("alpha", 0.0).set("fit_intercept", "True").set("solver", "svd"); break;
        case Family::DTR:
            c.set("criterion", "squared_error").set("max_depth", 9.0).set("min_samples_leaf", 2.0);
            break;
        case Family::KNN:
            c.set("leaf_size", 10.0).set("metric", "manhattan").set("n_neighbors", 2.0).set("weights", "distance");
            break;
        case Family::MLP:
            c.set("activation", "logistic")
                .set("alpha", 1.0)
                .set("hidden_layer_sizes", 50.0)
                .set("learning_rate", "constant")
                .set("learning_rate_init", 0.0001)
                .set("max_iter", 2000.0)
                .set("solver", "lbfgs");
            break;
        case Family::SVR: c.set("C", 0.1).set("gamma", 0.1).set("kernel", "rbf"); break;
        case Family::ADA: c.set("learning_rate", 0.1).set("loss", "square").set("n_estimators", 2000.0); break;
        case Family::GBR:
            c.set("alpha", 0.1)
                .set("criterion", "squared_error")
                .set("learning_rate", 0.1)
                .set("loss", "squared_error")
                .set("max_leaf_nodes", 30.0)
                .set("n_estimators", 2000.0);
            break;
        case Family::RFR:
            c.set("max_features", 20.0)
                .set("n_estimators", 1000.0)
                .set("criterion", "squared_error")
                .set("min_samples_split", 2.0);
            break;
    }
    return c;
}

RegressorConfig RegressorConfig::fast(std::size_t cap) const {
    RegressorConfig c = *this;
    if (family != Family::ADA && family != Family::GBR && family != Family::RFR) {
        return c;
    }
    std::size_t current = family == Family::ADA ? AdaOptions{}.n_estimators
                          : family == Family::GBR ? GbrOptions{}.n_estimators
                                                  : RfrOptions{}.n_estimators;
    if (const auto it = params.find("n_estimators"); it != params.end()) {
        double v = 0.0;
        if (detail::parse_double(detail::trim(it->second), v) && v >= 0.0) {
            current = static_cast<std::size_t>(v);
        }
    }
    if (current > cap) {
        c.set("n_estimators", static_cast<double>(cap));
    }
    return c;
}

Vector RegressorModel::predict(const Matrix& X) const {
    if (static_cast<std::size_t>(X.cols()) != n_features_) {
        throw ShapeError(std::string(family_name(family_)) + " model expects " + std::to_string(n_features_) +
                         " features, got " + std::to_string(X.cols()));
    }
    return predict_rows(X);
}

std::uint64_t fit_call_count() { return g_fit_calls.load(); }

std::unique_ptr<RegressorModel> fit(const RegressorConfig& config, const Matrix& X, const Vector& y) {
    ++g_fit_calls;
    ParamReader p(config);
    // Options are read before the data checks so that bad configs fail as config errors.
    switch (config.family) {
        case Family::LR: {
            const auto o = linear_options(p);
            p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_linear(X, y, o);
        }
        case Family::Ridge: {
            const auto o = ridge_options(p);
            p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_ridge(X, y, o);
        }
        case Family::Lasso: {
            const auto o = lasso_options(p);
            p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_lasso(X, y, o);
        }
        case Family::DTR: {
            const auto o = dtr_options(p);
            const auto seed = p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_dtr(X, y, o, seed);
        }
        case Family::KNN: {
            const auto o = knn_options(p);
            p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_knn(X, y, o);
        }
        case Family::MLP: {
            const auto o = mlp_options(p);
            const auto seed = p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_mlp(X, y, o, seed);
        }
        case Family::SVR: {
            const auto o = svr_options(p);
            p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_svr(X, y, o);
        }
        case Family::ADA: {
            const auto o = ada_options(p);
            const auto seed = p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_ada(X, y, o, seed);
        }
        case Family::GBR: {
            const auto o = gbr_options(p);
            const auto seed = p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_gbr(X, y, o, seed);
        }
        case Family::RFR: {
            const auto o = rfr_options(p);
            const auto seed = p.seed();
            p.finish();
            check_inputs(X, y);
            return fit_rfr(X, y, o, seed);
        }
    }
    throw ConfigError("unhandled regressor family");
}

void RegressorModel::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    io::put_u8(out, kModelFormatVersion);
    io::put_u8(out, static_cast<std::uint8_t>(family_));
    io::put_u64(out, n_features_);
    io::put_u64(out, info_.iterations);
    io::put_u8(out, info_.converged ? 1 : 0);
    io::put_u64(out, info_.warnings.size());
    for (const auto& w : info_.warnings) {
        put_string(out, w);
    }
    io::put_doubles(out, info_.objective_trace.data(), info_.objective_trace.size());
    save_payload(out);
    if (!out) {
        throw IoError("failed to write model artifact");
    }
}

std::unique_ptr<RegressorModel> RegressorModel::load(std::istream& in) {
    char magic[sizeof(kMagic)];
    if (!in.read(magic, sizeof(magic)) || !std::equal(magic, magic + sizeof(magic), kMagic)) {
        throw IoError("not a model artifact");
    }
    const auto version = io::get_u8(in);
    if (version != kModelFormatVersion) {
        throw IoError("unsupported model format version " + std::to_string(version));
    }
    const auto family_byte = io::get_u8(in);
    if (family_byte >= kFamilies.size()) {
        throw IoError("corrupt model artifact (family)");
    }
    const auto family = static_cast<Family>(family_byte);
    const auto n_features = io::get_size(in, std::size_t{1} << 32);
    FitInfo info;
    info.iterations = io::get_size(in);
    info.converged = io::get_u8(in) != 0;
    const auto n_warnings = io::get_size(in, 1 << 20);
    for (std::size_t i = 0; i < n_warnings; ++i) {
        info.warnings.push_back(get_string(in));
    }
    info.objective_trace = io::get_doubles(in);

    std::unique_ptr<RegressorModel> model;
    switch (family) {
        case Family::LR:
        case Family::Ridge:
        case Family::Lasso: model = LinearModel::load_payload(family, in, std::move(info)); break;
        case Family::DTR: model = TreeModel::load_payload(n_features, in, std::move(info)); break;
        case Family::KNN: model = KnnModel::load_payload(in, std::move(info)); break;
        case Family::MLP: model = MlpModel::load_payload(in, std::move(info)); break;
        case Family::SVR: model = SvrModel::load_payload(in, std::move(info)); break;
        case Family::ADA:
        case Family::GBR:
        case Family::RFR: model = TreeEnsembleModel::load_payload(family, n_features, in, std::move(info)); break;
    }
    if (model->n_features() != n_features) {
        throw IoError("corrupt model artifact (feature count)");
    }
    return model;
}

void save_model(const RegressorModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    model.save(out);
}

std::unique_ptr<RegressorModel> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return RegressorModel::load(in);
}

}  // namespace tafs::regress
