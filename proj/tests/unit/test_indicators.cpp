#include "support.hpp"
#include "tafs/error.hpp"
#include "tafs/indicators.hpp"
#include "tafs/ingest.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace tafs;
using indicators::IndicatorSpec;

namespace {

const std::vector<double>& col(const FeatureFrame& f, std::string_view name) {
    const auto i = f.find(name);
    REQUIRE(i < f.cols());
    return f.columns[i].values;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST_CASE("sma on a constant series") {
    const auto f = indicators::compute(indicators::parse_spec("sma(length=3)"), test::from_close({2, 2, 2, 2}));
    const auto& v = col(f, "sma_3");
    CHECK(std::isnan(v[0]));
    CHECK(std::isnan(v[1]));
    CHECK(v[2] == 2.0);
    CHECK(v[3] == 2.0);
}

TEST_CASE("rsi of a strictly increasing series is 100") {
    std::vector<double> up(40);
    for (std::size_t i = 0; i < up.size(); ++i) {
        up[i] = 10.0 + static_cast<double>(i);
    }
    const auto f = indicators::compute({"rsi", {}}, test::from_close(up));
    const auto& v = col(f, "rsi");
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (!std::isnan(v[t])) {
            CHECK(v[t] == 100.0);
        }
    }
    CHECK(!std::isnan(v[14]));
}

TEST_CASE("bbands matches a direct rolling mean +- 2 population stdev") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n(50.0, 3.0);
    std::vector<double> c(25);
    for (auto& x : c) {
        x = n(rng);
    }
    const auto f = indicators::compute({"bbands", {}}, test::from_close(c));
    for (std::size_t t = 19; t < 25; ++t) {
        double mean = 0.0;
        for (std::size_t i = t - 19; i <= t; ++i) {
            mean += c[i];
        }
        mean /= 20.0;
        double var = 0.0;
        for (std::size_t i = t - 19; i <= t; ++i) {
            var += (c[i] - mean) * (c[i] - mean);
        }
        const double sd = std::sqrt(var / 20.0);
        CHECK(std::abs(col(f, "bbands:mid")[t] - mean) <= 1e-10);
        CHECK(std::abs(col(f, "bbands:lower")[t] - (mean - 2 * sd)) <= 1e-10);
        CHECK(std::abs(col(f, "bbands:upper")[t] - (mean + 2 * sd)) <= 1e-10);
    }
    CHECK(std::isnan(col(f, "bbands:mid")[18]));
}

TEST_CASE("golden values from the numpy oracle") {
    const auto series = ingest::load_ohlcv(test::data_path("indicator_input.csv"));
    const auto golden = read_frame_csv(test::data_path("indicator_golden.csv"));
    const auto roster = indicators::parse_roster(std::string_view("sma\nema\nrsi\nbbands\nppo\nobv\nwillr\natr\n"));
    const auto frame = indicators::compute_all(roster, series);
    REQUIRE(frame.rows() == golden.rows());
    for (const auto& g : golden.columns) {
        const auto& mine = col(frame, g.name);
        for (std::size_t t = 0; t < golden.rows(); ++t) {
            INFO(g.name << " row " << t);
            CHECK(test::close_to(mine[t], g.values[t], 1e-8));
        }
    }
}

TEST_CASE("constant and monotone series") {
    const auto roster = indicators::parse_roster(std::string_view("sma\nema\nrsi\nbbands\nppo\nobv\nwillr\natr\n"));
    const auto flat = indicators::drop_warmup(indicators::compute_all(roster, test::from_close(std::vector<double>(60, 7.0))));
    for (std::size_t t = 0; t < flat.rows(); ++t) {
        CHECK(col(flat, "sma")[t] == 7.0);
        CHECK(col(flat, "ema")[t] == 7.0);
        CHECK(col(flat, "bbands:lower")[t] == 7.0);
        CHECK(col(flat, "bbands:upper")[t] == 7.0);
        CHECK(col(flat, "ppo:line")[t] == 0.0);
        CHECK(col(flat, "atr")[t] == 0.0);
        CHECK(col(flat, "obv")[t] == 1000.0);
    }

    std::vector<double> up(60);
    for (std::size_t i = 0; i < up.size(); ++i) {
        up[i] = 1.0 + static_cast<double>(i);
    }
    const auto mono = indicators::drop_warmup(indicators::compute_all(roster, test::from_close(up)));
    for (std::size_t t = 0; t < mono.rows(); ++t) {
        CHECK(col(mono, "rsi")[t] == 100.0);
        CHECK(col(mono, "willr")[t] == 0.0);
        CHECK(col(mono, "atr")[t] == 1.0);
        CHECK(col(mono, "ppo:line")[t] > 0.0);
    }
    const auto& obv = col(mono, "obv");
    for (std::size_t t = 1; t < obv.size(); ++t) {
        CHECK(obv[t] - obv[t - 1] == 1000.0);
    }
}

TEST_CASE("length-1 sma and ema reproduce the input") {
    const auto s = ingest::synthetic_ohlcv(50, 2);
    const auto f = indicators::compute_all({indicators::parse_spec("sma(length=1)"), indicators::parse_spec("ema(length=1)")}, s);
    CHECK(f.columns[0].values == s.close);
    CHECK(f.columns[1].values == s.close);
}

TEST_CASE("compute_all concatenates in spec order") {
    const auto s = ingest::synthetic_ohlcv(10, 4);
    const auto one = indicators::compute_all({indicators::parse_spec("sma(length=3)")}, s);
    const auto direct = indicators::compute(indicators::parse_spec("sma(length=3)"), s);
    CHECK(one.columns[0].values.size() == direct.columns[0].values.size());
    for (std::size_t t = 0; t < 10; ++t) {
        CHECK(same(one.columns[0].values[t], direct.columns[0].values[t]));
    }

    const auto two = indicators::compute_all({indicators::parse_spec("sma(length=3)"), indicators::parse_spec("mom(length=2)")}, s);
    CHECK(two.cols() == 2);
    CHECK(two.columns[0].name == "sma_3");
    CHECK(two.columns[1].name == "mom_2");
    for (const auto& c : two.columns) {
        CHECK(c.name != "close");
    }
    CHECK_THROWS_AS(indicators::compute_all({{"sma", {}}, {"sma", {}}}, s), SchemaError);
    CHECK_THROWS_AS(indicators::compute_all({}, s), ConfigError);
}

TEST_CASE("default roster column count equals the registry's declared outputs") {
    const auto s = ingest::synthetic_ohlcv(300, 1);
    const auto roster = indicators::default_roster();
    std::size_t expected = 0;
    for (const auto& spec : roster) {
        expected += indicators::native_registry().output_columns(spec).size();
    }
    const auto f = indicators::compute_all(roster, s);
    CHECK(f.cols() == expected);
    CHECK(roster.size() == indicators::native_registry().names().size());
}

TEST_CASE("drop_warmup removes the longest warm-up") {
    const auto s = ingest::synthetic_ohlcv(120, 6);
    std::size_t dropped = 0;
    const auto f = indicators::drop_warmup(
        indicators::compute_all({indicators::parse_spec("sma(length=4)"), {"rsi", {}}, indicators::parse_spec("sma(length=53)")}, s),
        &dropped);
    CHECK(dropped == 52);
    CHECK(f.rows() == 120 - 52);
    for (const auto& c : f.columns) {
        for (const double v : c.values) {
            CHECK(!std::isnan(v));
        }
    }

    const auto macd = indicators::drop_warmup(indicators::compute_all({{"macd", {}}}, s), &dropped);
    CHECK(dropped == 33);

    FeatureFrame clean;
    clean.dates = {s.dates[0], s.dates[1]};
    clean.columns.push_back({"a", {1.0, 2.0}});
    const auto same_frame = indicators::drop_warmup(clean, &dropped);
    CHECK(dropped == 0);
    CHECK(same_frame.rows() == 2);

    FeatureFrame hole = clean;
    hole.columns[0].values = {kMissing, kMissing};
    CHECK_THROWS_AS(indicators::drop_warmup(hole), EmptyInputError);
}

TEST_CASE("registry: register, conflict, unknown, short history") {
    auto reg = indicators::Registry::with_natives();
    reg.register_indicator("twice_close", {}, [](const indicators::ParamSet&) {
        struct Twice : indicators::Indicator {
            std::vector<std::string> outputs() const override { return {""}; }
            std::size_t warmup() const override { return 0; }
            std::vector<std::vector<double>> compute(const ingest::PriceSeries& s) const override {
                std::vector<double> v;
                for (const double c : s.close) {
                    v.push_back(2.0 * c);
                }
                return {v};
            }
        };
        return std::unique_ptr<indicators::Indicator>(new Twice);
    });
    const auto s = ingest::synthetic_ohlcv(20, 8);
    const auto f = indicators::compute_all({{"twice_close", {}}, {"sma", {}}}, s, reg);
    CHECK(f.columns[0].name == "twice_close");
    CHECK(f.columns[0].values[5] == 2.0 * s.close[5]);

    CHECK_THROWS_AS(reg.register_indicator("sma", {}, nullptr), ConflictError);
    CHECK_THROWS_AS(indicators::compute({"foo", {}}, s), UnknownIndicatorError);
    CHECK_THROWS_AS(indicators::compute({"sma", {{"length", 0}}}, s), ConfigError);
    CHECK_THROWS_AS(indicators::compute({"sma", {{"bogus", 3}}}, s), ConfigError);
    CHECK_THROWS_AS(indicators::compute({"ichimoku", {}}, s), InsufficientHistoryError);
}

TEST_CASE("spec text round-trips") {
    const auto spec = indicators::parse_spec("bbands(length=10, std=1.5)");
    CHECK(spec.name == "bbands");
    CHECK(indicators::parse_spec(spec.to_string()).params == spec.params);
    CHECK(indicators::native_registry().label(spec) == "bbands_10_1p5");
    CHECK(indicators::native_registry().label({"bbands", {}}) == "bbands");
    CHECK_THROWS_AS(indicators::parse_spec("sma(length=3"), ConfigError);
    const auto roster = indicators::parse_roster(std::string_view("# comment\nsma\n\nrsi(length=7)\n"));
    CHECK(roster.size() == 2);
}

TEST_CASE("no look-ahead for every native indicator") {
    const auto s = ingest::synthetic_ohlcv(260, 12);
    const auto roster = indicators::default_roster();
    const auto full = indicators::compute_all(roster, s);
    for (const std::size_t t : {std::size_t{80}, std::size_t{150}, std::size_t{259}}) {
        const auto part = indicators::compute_all(roster, s.slice(0, t));
        for (std::size_t c = 0; c < full.cols(); ++c) {
            for (std::size_t i = 0; i < t; ++i) {
                INFO(full.columns[c].name << " t=" << t << " i=" << i);
                CHECK(same(part.columns[c].values[i], full.columns[c].values[i]));
            }
        }
    }
}

TEST_CASE("shifting the dates shifts the output dates only") {
    const auto s = ingest::synthetic_ohlcv(120, 13);
    auto moved = s;
    for (auto& d : moved.dates) {
        d = add_days(d, 400);
    }
    const auto a = indicators::compute_all(indicators::default_roster(), s);
    const auto b = indicators::compute_all(indicators::default_roster(), moved);
    CHECK(b.dates == moved.dates);
    for (std::size_t c = 0; c < a.cols(); ++c) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            CHECK(same(a.columns[c].values[i], b.columns[c].values[i]));
        }
    }
}

TEST_CASE("range and ordering properties") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = ingest::synthetic_ohlcv(200, seed);
        const auto f = indicators::drop_warmup(indicators::compute_all(indicators::default_roster(), s));
        const auto offset = s.size() - f.rows();
        for (std::size_t t = 0; t < f.rows(); ++t) {
            CHECK(col(f, "rsi")[t] >= 0.0);
            CHECK(col(f, "rsi")[t] <= 100.0);
            CHECK(col(f, "stoch:k")[t] >= 0.0);
            CHECK(col(f, "stoch:k")[t] <= 100.0);
            CHECK(col(f, "willr")[t] >= -100.0);
            CHECK(col(f, "willr")[t] <= 0.0);
            CHECK(col(f, "bbands:lower")[t] <= col(f, "bbands:mid")[t]);
            CHECK(col(f, "bbands:mid")[t] <= col(f, "bbands:upper")[t]);
            CHECK(col(f, "decay")[t] >= 0.0);
            CHECK(col(f, "decay")[t] >= s.close[t + offset]);
        }
    }
}

TEST_CASE("frame CSV round trip keeps blanks as missing") {
    const auto s = ingest::synthetic_ohlcv(40, 14);
    const auto f = indicators::compute_all({{"sma", {}}, {"bbands", {}}}, s);
    std::stringstream io;
    write_frame_csv(f, io);
    const auto back = read_frame_csv(io);
    REQUIRE(back.cols() == f.cols());
    CHECK(back.dates == f.dates);
    for (std::size_t c = 0; c < f.cols(); ++c) {
        CHECK(back.columns[c].name == f.columns[c].name);
        for (std::size_t t = 0; t < f.rows(); ++t) {
            CHECK(same(back.columns[c].values[t], f.columns[c].values[t]));
        }
    }
    CHECK(group_of("bbands:lower@2") == "bbands");
    CHECK(group_of("sma@0") == "sma");
}
