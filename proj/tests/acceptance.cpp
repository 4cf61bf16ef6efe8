// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include "support.hpp"
#include "tafs/evaluate.hpp"
#include "tafs/experiment.hpp"
#include "tafs/indicators.hpp"
#include "tafs/ingest.hpp"
#include "tafs/regress.hpp"
#include "tafs/regress/linear.hpp"
#include "tafs/regress/mlp.hpp"
#include "tafs/select.hpp"
#include "tafs/windowing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace tafs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects failed conditions; the first few are reported.
struct Checker {
    Outcome out;
    int failed = 0;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (failed++ < 3) {
                out.detail += (out.detail.empty() ? "" : "; ") + what;
            }
            out.ok = false;
        }
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

double mlp_err = 0.0;

// ---- 1. metrics

Outcome metric_oracle() {
    Checker c;
    {
        const std::vector<double> y{1, 2, 3};
        const std::vector<double> p{2, 2, 2};
        const auto r = evaluate::metrics(y, p);
        c.expect(std::fabs(r.mse - 2.0 / 3.0) <= 1e-9, "worked mse");
        c.expect(std::fabs(r.mae - 2.0 / 3.0) <= 1e-9, "worked mae");
        c.expect(std::fabs(r.mape - 400.0 / 9.0) <= 1e-9, "worked mape");
        c.expect(std::fabs(r.r2) <= 1e-9, "worked r2");
    }
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> mag(0.1, 100.0);
    std::normal_distribution<double> err(0.0, 5.0);
    std::uniform_int_distribution<int> len(2, 100);
    std::bernoulli_distribution neg(0.25);
    double worst = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const auto n = static_cast<std::size_t>(len(rng));
        std::vector<double> y(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = neg(rng) ? -mag(rng) : mag(rng);
            p[i] = y[i] + err(rng);
        }
        double mean = 0.0;
        for (const double v : y) mean += v;
        mean /= static_cast<double>(n);
        double sse = 0.0, sst = 0.0, ae = 0.0, ape = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sse += (y[i] - p[i]) * (y[i] - p[i]);
            sst += (y[i] - mean) * (y[i] - mean);
            ae += std::fabs(y[i] - p[i]);
            ape += std::fabs((y[i] - p[i]) / y[i]);
        }
        const double nn = static_cast<double>(n);
        const double want[5] = {1.0 - sse / sst, sse / nn, std::sqrt(sse / nn), ae / nn, 100.0 * ape / nn};
        const auto r = evaluate::metrics(y, p);
        const double got[5] = {r.r2, r.mse, r.rmse, r.mae, r.mape};
        for (int k = 0; k < 5; ++k) {
            const double rel = std::fabs(got[k] - want[k]) / std::max(1.0, std::fabs(want[k]));
            worst = std::max(worst, rel);
        }
    }
    c.expect(worst <= 1e-9, "max relative deviation " + sci(worst));
    if (c.out.ok) c.out.detail = "1000 pairs, max rel dev " + sci(worst);
    return c.out;
}

// ---- 2. windowing

Outcome windowing_shape_law() {
    Checker c;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    int combos = 0;
    for (const std::size_t rows : {10u, 50u, 200u}) {
        for (const std::size_t k : {1u, 5u}) {
            FeatureFrame f;
            Date d{std::chrono::year{2020}, std::chrono::January, std::chrono::day{1}};
            for (std::size_t t = 0; t < rows; ++t) {
                f.dates.push_back(d);
                d = add_days(d, 1);
            }
            for (std::size_t j = 0; j < k; ++j) {
                FeatureColumn col{"c" + std::to_string(j), {}};
                for (std::size_t t = 0; t < rows; ++t) col.values.push_back(n(rng));
                f.columns.push_back(col);
            }
            std::vector<double> y(rows);
            for (auto& v : y) v = n(rng);
            for (const std::size_t w : {1u, 3u, 10u}) {
                for (const std::size_t h : {1u, 3u}) {
                    if (rows < w + h) continue;
                    ++combos;
                    const auto data = windowing::make_windows(f, y, {w, h});
                    const auto tag = std::to_string(rows) + "/" + std::to_string(k) + "/" + std::to_string(w) + "/" +
                                     std::to_string(h);
                    c.expect(data.rows() == rows - w - h + 1, "rows " + tag);
                    c.expect(data.cols() == k * w, "cols " + tag);
                    // Row 0: column j*w + lag is frame column j on day (w-1-lag).
                    for (std::size_t j = 0; j < k; ++j) {
                        for (std::size_t lag = 0; lag < w; ++lag) {
                            const auto got = data.X(0, static_cast<Eigen::Index>(j * w + lag));
                            c.expect(got == f.columns[j].values[w - 1 - lag], "row0 " + tag);
                        }
                    }
                    c.expect(data.y(0) == y[w - 1 + h], "target " + tag);
                }
            }
        }
    }
    if (c.out.ok) c.out.detail = std::to_string(combos) + " shape combinations";
    return c.out;
}

// ---- 3. estimators

double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

Outcome estimator_sanity() {
    using regress::Family;
    using regress::RegressorConfig;
    Checker c;
    std::mt19937_64 rng(21);
    const Matrix X = test::random_matrix(80, 6, rng);
    Vector y = X * test::random_matrix(6, 1, rng);
    std::normal_distribution<double> eps(0.0, 0.3);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += eps(rng);

    const auto fast = [](Family f) { return RegressorConfig::tuned(f, 1).fast(50); };

    {
        const auto lr = regress::fit(fast(Family::LR), X, y);
        const auto ridge = regress::fit(fast(Family::Ridge), X, y);
        const auto& a = dynamic_cast<const regress::LinearModel&>(*lr);
        const auto& b = dynamic_cast<const regress::LinearModel&>(*ridge);
        c.expect((a.coef() - b.coef()).cwiseAbs().maxCoeff() <= 1e-8 && std::fabs(a.intercept() - b.intercept()) <= 1e-8,
                 "ridge(0) != LR");
    }
    for (const double alpha : {0.001, 0.01, 0.1}) {
        regress::LassoOptions o;
        o.alpha = alpha;
        const auto model = regress::fit_lasso(X, y, o);
        const auto& trace = model->info().objective_trace;
        bool mono = trace.size() >= 2;
        for (std::size_t i = 1; i < trace.size(); ++i) {
            mono = mono && trace[i] <= trace[i - 1] + 1e-15 * std::fabs(trace[i - 1]);
        }
        c.expect(mono, "lasso objective increased");
    }
    {
        const regress::MlpShape shape{6, 10};
        std::vector<double> grad(shape.size()), scratch(shape.size());
        std::normal_distribution<double> pn(0.0, 0.5);
        double worst = 0.0;
        const Matrix Xs = X.topRows(20);
        const Vector ys = y.head(20);
        for (int point = 0; point < 20; ++point) {
            std::vector<double> p(shape.size());
            for (auto& v : p) v = pn(rng);
            regress::mlp_loss_and_gradient(shape, p, Xs, ys, 0.5, grad);
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double h = 1e-5 * std::max(1.0, std::fabs(p[i]));
                auto up = p, down = p;
                up[i] += h;
                down[i] -= h;
                const double num = (regress::mlp_loss_and_gradient(shape, up, Xs, ys, 0.5, scratch) -
                                    regress::mlp_loss_and_gradient(shape, down, Xs, ys, 0.5, scratch)) /
                                   (2.0 * h);
                diff += (num - grad[i]) * (num - grad[i]);
                scale += num * num + grad[i] * grad[i];
            }
            worst = std::max(worst, std::sqrt(diff / scale));
        }
        c.expect(worst <= 1e-5, "mlp gradient rel err " + sci(worst));
        mlp_err = worst;
    }
    {
        auto knn = fast(Family::KNN);
        knn.set("n_neighbors", 1.0);
        c.expect(regress::fit(knn, X, y)->predict(X) == y, "knn(1) does not memorize");
    }
    {
        auto ada = fast(Family::ADA);
        ada.set("n_estimators", 1.0);
        auto ada_base = fast(Family::DTR);
        ada_base.set("max_depth", 3.0).set("min_samples_leaf", 1.0);
        c.expect(max_abs_diff(regress::fit(ada, X, y)->predict(X), regress::fit(ada_base, X, y)->predict(X)) <= 1e-12,
                 "ada(1) != tree");

        auto gbr = fast(Family::GBR);
        gbr.set("n_estimators", 1.0).set("learning_rate", 1.0);
        auto gbr_base = fast(Family::DTR);
        gbr_base.set("max_depth", 3.0).set("min_samples_leaf", 1.0).set("max_leaf_nodes", 30.0);
        c.expect(max_abs_diff(regress::fit(gbr, X, y)->predict(X), regress::fit(gbr_base, X, y)->predict(X)) <= 1e-9,
                 "gbr(1) != tree");

        auto rfr = fast(Family::RFR);
        rfr.set("n_estimators", 1.0).set("bootstrap", "false");
        auto rfr_base = fast(Family::DTR);
        rfr_base.set("max_depth", "None").set("min_samples_leaf", 1.0);
        c.expect(max_abs_diff(regress::fit(rfr, X, y)->predict(X), regress::fit(rfr_base, X, y)->predict(X)) == 0.0,
                 "rfr(1) != tree");
    }
    // Every family fits in its fast configuration.
    for (const auto f : regress::all_families()) {
        c.expect(regress::fit(fast(f), X, y)->predict(X).allFinite(), std::string(regress::family_name(f)) + " fit");
    }
    if (c.out.ok) c.out.detail = "all 10 families; MLP gradient rel err " + sci(mlp_err);
    return c.out;
}

// ---- 4. planted recovery

select::SelectionConfig lr_mse(select::Method m) {
    select::SelectionConfig c;
    c.method = m;
    c.regressor = regress::RegressorConfig::tuned(regress::Family::LR);
    c.metric = evaluate::Metric::MSE;
    c.cv_folds = 5;
    return c;
}

bool has(const std::vector<std::size_t>& v, std::size_t x) { return std::find(v.begin(), v.end(), x) != v.end(); }

Outcome planted_recovery() {
    Checker c;
    int sfs_ok = 0, sbs_ok = 0, small_ok = 0;
    const std::vector<std::pair<std::size_t, double>> coefs{{1, 3.0}, {5, -2.0}};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        // Noise variance 0.01.
        const auto d = test::planted(300, 20, 3, coefs, 0.1, seed);
        auto sc = lr_mse(select::Method::SFS);
        sc.max_steps = 2;
        const auto f = select::sfs(d, sc);
        if (f.selected.size() == 2 && has(f.selected, 0) && has(f.selected, 4)) ++sfs_ok;
        const auto b = select::sbs(d, lr_mse(select::Method::SBS));
        if (has(b.best_subset, 0) && has(b.best_subset, 4)) ++sbs_ok;

        // G=6: SBS against exhaustive scoring of every non-empty subset.
        const auto s = test::planted(300, 6, 3, coefs, 0.1, seed);
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> best_ids;
        for (unsigned mask = 1; mask < 64; ++mask) {
            std::vector<std::size_t> ids;
            for (std::size_t g = 0; g < 6; ++g) {
                if (mask & (1u << g)) ids.push_back(g + 1);
            }
            const double score = test::naive_cv_mse(test::group_columns(s, 3, ids), s.y, 5);
            if (score < best) {
                best = score;
                best_ids = ids;
            }
        }
        const auto small = select::sbs(s, lr_mse(select::Method::SBS));
        const bool oracle_has = has(best_ids, 1) && has(best_ids, 5);
        const bool sbs_has = has(small.best_subset, 0) && has(small.best_subset, 4);
        if (oracle_has && sbs_has && small.best_score >= best - 1e-12) ++small_ok;
    }
    c.expect(sfs_ok >= 18, "SFS first two picks " + std::to_string(sfs_ok) + "/20");
    c.expect(sbs_ok >= 18, "SBS retains both " + std::to_string(sbs_ok) + "/20");
    c.expect(small_ok >= 18, "G=6 exhaustive agreement " + std::to_string(small_ok) + "/20");
    c.out.detail = "SFS " + std::to_string(sfs_ok) + "/20, SBS " + std::to_string(sbs_ok) + "/20, G=6 exhaustive " +
                   std::to_string(small_ok) + "/20" + (c.out.ok ? "" : "; " + c.out.detail);
    return c.out;
}

// ---- 5. fit counts

Outcome fit_counts() {
    Checker c;
    const auto d = test::planted(100, 10, 2, {{1, 1.0}}, 0.1, 3);
    const auto before = regress::fit_call_count();
    const auto r = select::sfs(d, lr_mse(select::Method::SFS));
    const auto counted = regress::fit_call_count() - before;
    c.expect(counted == 275, "counter saw " + std::to_string(counted));
    c.expect(r.fits == 275, "result reports " + std::to_string(r.fits));
    if (c.out.ok) c.out.detail = "275 fits";
    return c.out;
}

// ---- 6. selection vs all features

Outcome selection_vs_baseline() {
    Checker c;
    std::map<regress::Family, int> wins;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed * 7919);
        std::uniform_real_distribution<double> mag(0.5, 2.0);
        std::bernoulli_distribution sign(0.5);
        std::vector<std::pair<std::size_t, double>> coefs;
        for (std::size_t g = 1; g <= 10; ++g) coefs.emplace_back(g, (sign(rng) ? 1.0 : -1.0) * mag(rng));
        const auto d = test::planted(200, 20, 3, coefs, 1.0, seed);
        experiment::SplitOptions so;
        so.scale = false;
        const auto part = experiment::split_dataset(d, so);
        for (const auto family : {regress::Family::LR, regress::Family::Ridge}) {
            auto sc = lr_mse(select::Method::SFS);
            sc.regressor = regress::RegressorConfig::tuned(family);
            const auto r = select::sfs(part.train, sc);
            const auto cols = part.train.groups().columns_of(r.best_subset);
            const auto sel = regress::fit(sc.regressor, part.train.select_columns(cols).X, part.train.y);
            const auto all = regress::fit(sc.regressor, part.train.X, part.train.y);
            const double sel_mse = evaluate::metrics(part.test.y, sel->predict(part.test.select_columns(cols).X)).mse;
            const double all_mse = evaluate::metrics(part.test.y, all->predict(part.test.X)).mse;
            if (sel_mse <= all_mse) ++wins[family];
        }
    }
    c.expect(wins[regress::Family::LR] >= 18, "LR " + std::to_string(wins[regress::Family::LR]) + "/20");
    c.expect(wins[regress::Family::Ridge] >= 18, "Ridge " + std::to_string(wins[regress::Family::Ridge]) + "/20");
    c.out.detail = "selected <= all-features test MSE: LR " + std::to_string(wins[regress::Family::LR]) +
                   "/20, Ridge " + std::to_string(wins[regress::Family::Ridge]) + "/20";
    return c.out;
}

// ---- 7. indicator golden values

Outcome indicator_golden() {
    Checker c;
    const auto roster = indicators::parse_roster(std::string_view("sma; ema; rsi; bbands; ppo; obv; willr; atr"));
    const auto series = ingest::load_ohlcv(test::data_path("indicator_input.csv"));
    const auto golden = read_frame_csv(test::data_path("indicator_golden.csv"));
    const auto frame = indicators::compute_all(roster, series);
    c.expect(frame.rows() == golden.rows(), "row count");
    double worst = 0.0;
    for (const auto& g : golden.columns) {
        const auto i = frame.find(g.name);
        if (i == frame.cols()) {
            c.expect(false, "missing column " + g.name);
            continue;
        }
        for (std::size_t t = 0; t < golden.rows(); ++t) {
            const double a = frame.columns[i].values[t];
            const double b = g.values[t];
            if (std::isnan(a) || std::isnan(b)) {
                c.expect(std::isnan(a) && std::isnan(b), g.name + " warm-up mismatch");
            } else {
                worst = std::max(worst, std::fabs(a - b));
            }
        }
    }
    c.expect(worst <= 1e-8, "max abs dev " + sci(worst));

    const auto flat = indicators::drop_warmup(indicators::compute_all(roster, test::from_close(std::vector<double>(60, 7.0))));
    std::vector<double> up(60);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = 1.0 + static_cast<double>(i);
    const auto mono = indicators::drop_warmup(indicators::compute_all(roster, test::from_close(up)));
    const auto col = [](const FeatureFrame& f, const char* name) { return f.columns[f.find(name)].values; };
    for (std::size_t t = 0; t < flat.rows(); ++t) {
        c.expect(col(flat, "sma")[t] == 7.0 && col(flat, "ema")[t] == 7.0, "constant sma/ema");
        c.expect(col(flat, "bbands:upper")[t] == 7.0 && col(flat, "atr")[t] == 0.0, "constant bbands/atr");
        c.expect(col(flat, "ppo:line")[t] == 0.0, "constant ppo");
    }
    for (std::size_t t = 0; t < mono.rows(); ++t) {
        c.expect(col(mono, "rsi")[t] == 100.0, "monotone rsi");
        c.expect(col(mono, "willr")[t] == 0.0, "monotone willr");
        c.expect(col(mono, "atr")[t] == 1.0, "monotone atr");
    }
    if (c.out.ok) c.out.detail = "max abs dev " + sci(worst);
    return c.out;
}

// ---- 8. determinism through the CLI

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().filename() == "manifest") continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[fs::relative(e.path(), root).generic_string()] = {std::istreambuf_iterator<char>(in), {}};
    }
    return files;
}

Outcome determinism(const fs::path& work) {
    Checker c;
    const fs::path a = work / "det_a";
    const fs::path b = work / "det_b";
    for (const auto& dir : {a, b}) {
        const std::string cmd = std::string("\"") + TAFS_CLI_PATH + "\" --fast --seed 7 --out \"" + dir.string() +
                                "\" run-experiment > \"" + dir.string() + ".log\" 2>&1";
        c.expect(std::system(cmd.c_str()) == 0, "cli run failed, see " + dir.string() + ".log");
    }
    if (!c.out.ok) return c.out;
    const auto ta = tree(a);
    const auto tb = tree(b);
    c.expect(!ta.empty(), "empty output tree");
    c.expect(ta.size() == tb.size(), "file sets differ");
    std::size_t same = 0;
    for (const auto& [name, body] : ta) {
        const auto it = tb.find(name);
        const bool eq = it != tb.end() && it->second == body;
        c.expect(eq, name + " differs");
        same += eq ? 1 : 0;
    }
    c.expect(fs::exists(a / "manifest") && fs::exists(b / "manifest"), "manifest missing");
    if (c.out.ok) c.out.detail = std::to_string(same) + " files byte-identical";
    return c.out;
}

// ---- 9. repeated k-fold

Outcome repeated_kfold() {
    Checker c;
    const auto d = test::planted(120, 3, 2, {{1, 1.0}}, 0.5, 9);
    evaluate::GridSearchOptions o;
    o.folds = 10;
    o.repeats = 3;
    const auto r = evaluate::grid_search({{"alpha", {"0", "0.1", "1"}}},
                                         regress::RegressorConfig::tuned(regress::Family::Ridge), d.X, d.y, o);
    c.expect(r.candidates.size() == 3, "candidate count");
    c.expect(r.fold_scores.rows() == 3 && r.fold_scores.cols() == 30,
             "fold matrix " + std::to_string(r.fold_scores.rows()) + "x" + std::to_string(r.fold_scores.cols()));
    c.expect(r.fold_scores.allFinite(), "non-finite fold score");
    if (c.out.ok) c.out.detail = "3 candidates x 30 fold scores";
    return c.out;
}

// ---- 10. end to end

Outcome end_to_end(const fs::path& work) {
    Checker c;
    experiment::ExperimentConfig config;
    config.synthetic_days = 300;
    config.fast = true;
    config.seed = 7;
    config.roster = experiment::fast_roster();
    config.roster_set = true;
    config.window = {3, 3};
    config.methods = {select::Method::SFS, select::Method::SBS};
    config.families = {regress::Family::LR, regress::Family::Ridge, regress::Family::KNN, regress::Family::DTR};
    config.metrics = {evaluate::Metric::MSE};
    config.matrix_set = true;
    config.out_dir = (work / "e2e").string();
    c.expect(config.roster.size() == 12, "roster size " + std::to_string(config.roster.size()));
    const auto summary = experiment::run_experiment(config);
    c.expect(summary.selection_runs == 8 && summary.prediction_reports == 8, "run counts");

    const fs::path out(config.out_dir);
    std::vector<std::string> expected{"config.ini", "manifest", "reports/metrics.csv", "reports/improvement.csv",
                                      "reports/detail.csv", "plots/window_sweep.csv", "plots/window_sweep.svg",
                                      "plots/census.csv", "plots/census.svg"};
    for (const auto* method : {"SFS", "SBS"}) {
        for (const auto* family : {"LR", "Ridge", "KNN", "DTR"}) {
            const std::string run = std::string(method) + "_" + family + "_mse";
            expected.push_back("selection/" + run + ".json");
            expected.push_back("plots/pred_" + run + ".csv");
            expected.push_back("plots/pred_" + run + ".svg");
        }
    }
    std::size_t present = 0;
    for (const auto& f : expected) {
        const bool ok = fs::exists(out / f) && fs::file_size(out / f) > 0;
        c.expect(ok, "missing " + f);
        present += ok ? 1 : 0;
    }
    if (c.out.ok) c.out.detail = std::to_string(present) + " files";
    return c.out;
}

}  // namespace

int main() {
    const fs::path work = fs::temp_directory_path() / "tafs_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0 = no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "metric oracle equivalence", 1.0, metric_oracle},
        {2, "windowing shape law", 1.0, windowing_shape_law},
        {3, "estimator sanity", 30.0, estimator_sanity},
        {4, "planted-feature recovery", 60.0, planted_recovery},
        {5, "fit-count accounting", 0.0, fit_counts},
        {6, "selection matches or beats all features", 0.0, selection_vs_baseline},
        {7, "indicator golden values", 0.0, indicator_golden},
        {8, "determinism", 0.0, [&] { return determinism(work); }},
        {9, "repeated k-fold shape", 0.0, repeated_kfold},
        {10, "end-to-end fast profile", 60.0, [&] { return end_to_end(work); }},
    };

    int failures = 0;
    for (const auto& cr : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.limit_s > 0.0 && secs >= cr.limit_s) {
            o.ok = false;
            o.detail += (o.detail.empty() ? "" : "; ") + std::string("over the time limit");
        }
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs", secs);
        std::cout << (o.ok ? "PASS" : "FAIL") << "  " << cr.id << ". " << cr.name << " (" << timing
                  << (cr.limit_s > 0.0 ? " of " + std::to_string(static_cast<int>(cr.limit_s)) + "s" : std::string())
                  << ")" << (o.detail.empty() ? "" : ": " + o.detail) << std::endl;
        failures += o.ok ? 0 : 1;
    }
    fs::remove_all(work);
    return failures == 0 ? 0 : 1;
}
