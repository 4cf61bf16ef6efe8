#include "support.hpp"
#include "tafs/error.hpp"
#include "tafs/ingest.hpp"
#include "tafs/windowing.hpp"

#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

using namespace tafs;
using windowing::WindowSpec;

namespace {

// Frame with k columns "f0".."f{k-1}" where entry (t, j) = 100*j + t.
FeatureFrame ramp(std::size_t n, std::size_t k) {
    FeatureFrame f;
    Date d{std::chrono::year{2022}, std::chrono::January, std::chrono::day{3}};
    for (std::size_t t = 0; t < n; ++t) {
        f.dates.push_back(d);
        d = add_days(d, 1);
    }
    for (std::size_t j = 0; j < k; ++j) {
        FeatureColumn c{"f" + std::to_string(j), {}};
        for (std::size_t t = 0; t < n; ++t) {
            c.values.push_back(100.0 * static_cast<double>(j) + static_cast<double>(t));
        }
        f.columns.push_back(std::move(c));
    }
    return f;
}

std::vector<double> day_targets(std::size_t n) {
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        y[t] = 1000.0 + static_cast<double>(t);
    }
    return y;
}

}  // namespace

TEST_CASE("n=6, k=2, w=3, h=3 gives one row") {
    const auto d = windowing::make_windows(ramp(6, 2), day_targets(6), WindowSpec{3, 3});
    REQUIRE(d.rows() == 1);
    CHECK(d.cols() == 6);
    CHECK(d.y(0) == 1005.0);  // day 6, 1-based
    CHECK(d.feature_names == std::vector<std::string>{"f0@0", "f0@1", "f0@2", "f1@0", "f1@1", "f1@2"});
    // lag 0 is the window's last day
    CHECK(d.X(0, 0) == 2.0);
    CHECK(d.X(0, 2) == 0.0);
    CHECK(d.X(0, 3) == 102.0);
}

TEST_CASE("w=1, h=1 degenerate window") {
    const auto d = windowing::make_windows(ramp(4, 1), day_targets(4), WindowSpec{1, 1});
    REQUIRE(d.rows() == 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(d.X(i, 0) == static_cast<double>(i));
        CHECK(d.y(i) == 1000.0 + static_cast<double>(i + 1));
    }
}

TEST_CASE("shape law and nested-loop oracle over a grid") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const std::size_t n : {10, 50, 200}) {
        for (const std::size_t k : {1, 5}) {
            for (const std::size_t w : {1, 3, 10}) {
                for (const std::size_t h : {1, 3}) {
                    if (n < w + h) {
                        continue;
                    }
                    auto f = ramp(n, k);
                    for (auto& c : f.columns) {
                        for (auto& v : c.values) {
                            v = u(rng);
                        }
                    }
                    std::vector<double> y(n);
                    for (auto& v : y) {
                        v = u(rng);
                    }
                    const auto d = windowing::make_windows(f, y, WindowSpec{w, h});
                    CHECK(d.rows() == n - w - h + 1);
                    CHECK(d.cols() == k * w);
                    // independent extraction of every row
                    for (std::size_t i = 0; i < d.rows(); ++i) {
                        std::size_t c = 0;
                        for (std::size_t j = 0; j < k; ++j) {
                            for (std::size_t lag = 0; lag < w; ++lag) {
                                CHECK(d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c++)) ==
                                      f.columns[j].values[i + w - 1 - lag]);
                            }
                        }
                        CHECK(d.y(static_cast<Eigen::Index>(i)) == y[i + w - 1 + h]);
                        CHECK(d.sample_dates[i] == f.dates[i + w - 1]);
                        CHECK(d.target_dates[i] == f.dates[i + w - 1 + h]);
                        CHECK(d.target_dates[i] > d.sample_dates[i]);
                    }
                    const std::set<std::string> unique(d.feature_names.begin(), d.feature_names.end());
                    CHECK(unique.size() == d.cols());
                }
            }
        }
    }
}

TEST_CASE("too little history and bad specs") {
    CHECK_THROWS_AS(windowing::make_windows(ramp(5, 1), day_targets(5), WindowSpec{3, 3}), InsufficientHistoryError);
    CHECK_THROWS_AS(windowing::make_windows(ramp(5, 1), day_targets(5), WindowSpec{0, 1}), ConfigError);
    CHECK_THROWS_AS(windowing::make_windows(ramp(5, 1), day_targets(5), WindowSpec{1, 0}), ConfigError);
    CHECK_THROWS_AS(windowing::make_windows(ramp(5, 1), day_targets(4), WindowSpec{1, 1}), ShapeError);
    auto holed = ramp(8, 1);
    holed.columns[0].values[3] = kMissing;
    CHECK_THROWS_AS(windowing::make_windows(holed, day_targets(8), WindowSpec{1, 1}), SchemaError);
}

TEST_CASE("permuting indicator columns permutes feature blocks") {
    const auto f = ramp(30, 3);
    FeatureFrame g = f;
    std::swap(g.columns[0], g.columns[2]);
    const auto a = windowing::make_windows(f, day_targets(30), WindowSpec{4, 2});
    const auto b = windowing::make_windows(g, day_targets(30), WindowSpec{4, 2});
    CHECK(a.X.block(0, 0, a.X.rows(), 4) == b.X.block(0, 8, b.X.rows(), 4));
    CHECK(a.X.block(0, 4, a.X.rows(), 4) == b.X.block(0, 4, b.X.rows(), 4));
    CHECK(a.y == b.y);
}

TEST_CASE("window-size sweep") {
    const auto f = ramp(20, 2);
    const auto y = day_targets(20);
    const std::vector<std::size_t> one{3};
    const auto single = windowing::window_size_sweep(f, y, one, 3);
    REQUIRE(single.size() == 1);
    CHECK(single[0].X == windowing::make_windows(f, y, WindowSpec{3, 3}).X);

    const std::vector<std::size_t> sizes{1, 2, 3};
    const auto sweep = windowing::window_size_sweep(f, y, sizes, 2);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        CHECK(sweep[i].rows() == 20 - sizes[i] - 2 + 1);
        CHECK(sweep[i].cols() == 2 * sizes[i]);
    }
    const std::vector<std::size_t> too_big{3, 25};
    CHECK_THROWS_AS(windowing::window_size_sweep(f, y, too_big, 1), InsufficientHistoryError);
}

TEST_CASE("targets align by date") {
    auto s = ingest::synthetic_ohlcv(30, 1);
    FeatureFrame f;
    f.dates.assign(s.dates.begin() + 5, s.dates.end());
    f.columns.push_back({"a", std::vector<double>(f.dates.size(), 1.0)});
    const auto y = windowing::align_targets(f, s);
    CHECK(y.front() == s.close[5]);
    CHECK(y.back() == s.close.back());
    f.dates[0] = add_days(s.dates.front(), -10);
    CHECK_THROWS_AS(windowing::align_targets(f, s), ReferenceError);
}

TEST_CASE("groups and column selection") {
    const auto d = windowing::make_windows(ramp(12, 3), day_targets(12), WindowSpec{2, 1});
    const auto g = d.groups(true);
    CHECK(g.labels == std::vector<std::string>{"f0", "f1", "f2"});
    CHECK(g.columns[1] == std::vector<std::size_t>{2, 3});
    const std::vector<std::size_t> ids{2, 0};
    CHECK(g.columns_of(ids) == std::vector<std::size_t>{0, 1, 4, 5});
    const auto per_col = d.groups(false);
    CHECK(per_col.size() == 6);
    const auto sub = d.select_columns(g.columns_of(ids));
    CHECK(sub.feature_names == std::vector<std::string>{"f0@0", "f0@1", "f2@0", "f2@1"});
    CHECK(sub.X.col(2) == d.X.col(4));
}

TEST_CASE("dataset CSV round trip") {
    const auto d = windowing::make_windows(ramp(15, 2), day_targets(15), WindowSpec{3, 2});
    std::stringstream io;
    windowing::write_dataset_csv(d, io);
    std::string header;
    std::getline(io, header);
    CHECK(header == "f0@0,f0@1,f0@2,f1@0,f1@1,f1@2,target");
    io.seekg(0);
    const auto back = windowing::read_dataset_csv(io);
    CHECK(back.X == d.X);
    CHECK(back.y == d.y);
    CHECK(back.feature_names == d.feature_names);
}
