// Native indicator roster. Formulas and defaults follow the pandas-ta
// conventions, except where noted: EMA seeding by SMA, Wilder smoothing for
// RSI/ATR, population standard deviation, and no forward displacement of
// Ichimoku spans.

#include "indicators/native.hpp"

#include "indicators/rolling.hpp"
#include "tafs/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tafs::indicators {

namespace {

using rolling::Series;
using Outputs = std::vector<Series>;
using ComputeFn = std::function<Outputs(const ingest::PriceSeries&)>;

class NativeIndicator final : public Indicator {
public:
    NativeIndicator(std::vector<std::string> outputs, std::size_t warmup, ComputeFn fn)
        : outputs_(std::move(outputs)), warmup_(warmup), fn_(std::move(fn)) {}

    std::vector<std::string> outputs() const override { return outputs_; }
    std::size_t warmup() const override { return warmup_; }
    std::vector<std::vector<double>> compute(const ingest::PriceSeries& series) const override { return fn_(series); }

private:
    std::vector<std::string> outputs_;
    std::size_t warmup_;
    ComputeFn fn_;
};

std::unique_ptr<Indicator> make(std::vector<std::string> outputs, std::size_t warmup, ComputeFn fn) {
    return std::make_unique<NativeIndicator>(std::move(outputs), warmup, std::move(fn));
}

std::unique_ptr<Indicator> single(std::size_t warmup, ComputeFn fn) { return make({""}, warmup, std::move(fn)); }

// Element-wise combination; NaN in any operand gives NaN.
template <typename Fn>
Series zip(const Series& a, const Series& b, Fn fn) {
    Series out(a.size(), kMissing);
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (!is_missing(a[t]) && !is_missing(b[t])) {
            out[t] = fn(a[t], b[t]);
        }
    }
    return out;
}

template <typename Fn>
Series zip3(const Series& a, const Series& b, const Series& c, Fn fn) {
    Series out(a.size(), kMissing);
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (!is_missing(a[t]) && !is_missing(b[t]) && !is_missing(c[t])) {
            out[t] = fn(a[t], b[t], c[t]);
        }
    }
    return out;
}

double ratio_or(double num, double den, double fallback) { return den != 0.0 ? num / den : fallback; }

double flag(bool b) { return b ? 1.0 : 0.0; }

Series typical_price(const ingest::PriceSeries& s) {
    Series tp(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        tp[t] = (s.high[t] + s.low[t] + s.close[t]) / 3.0;
    }
    return tp;
}

// Percentage oscillator between a fast and slow EMA plus its signal line.
Outputs oscillator(const Series& x, std::size_t fast, std::size_t slow, std::size_t signal, bool percent) {
    const auto fast_ema = rolling::ema(x, fast);
    const auto slow_ema = rolling::ema(x, slow);
    const auto line = zip(fast_ema, slow_ema, [percent](double f, double s) {
        return percent ? 100.0 * ratio_or(f - s, s, 0.0) : f - s;
    });
    const auto sig = rolling::ema(line, signal);
    const auto hist = zip(line, sig, [](double l, double s) { return l - s; });
    return {line, hist, sig};
}

struct Bands {
    Series lower;
    Series mid;
    Series upper;
};

Bands bollinger(const Series& close, std::size_t n, double k) {
    const auto mid = rolling::sma(close, n);
    const auto sd = rolling::stdev(close, n);
    return {zip(mid, sd, [k](double m, double d) { return m - k * d; }), mid,
            zip(mid, sd, [k](double m, double d) { return m + k * d; })};
}

// Keltner channel with SMA basis and SMA of true range.
Bands keltner(const ingest::PriceSeries& s, std::size_t n, double scalar) {
    const auto basis = rolling::sma(s.close, n);
    const auto band = rolling::sma(rolling::true_range(s.high, s.low, s.close), n);
    return {zip(basis, band, [scalar](double b, double r) { return b - scalar * r; }), basis,
            zip(basis, band, [scalar](double b, double r) { return b + scalar * r; })};
}

// Smoothed momentum shared by squeeze and squeeze_pro.
Series squeeze_momentum(const Series& close, std::size_t mom_length, std::size_t mom_smooth) {
    return rolling::sma(rolling::diff(close, mom_length), mom_smooth);
}

Series inside(const Bands& bb, const Bands& kc) {
    Series out(bb.lower.size(), kMissing);
    for (std::size_t t = 0; t < out.size(); ++t) {
        if (!is_missing(bb.lower[t]) && !is_missing(kc.lower[t])) {
            out[t] = flag(bb.lower[t] > kc.lower[t] && bb.upper[t] < kc.upper[t]);
        }
    }
    return out;
}

Series outside(const Bands& bb, const Bands& kc) {
    Series out(bb.lower.size(), kMissing);
    for (std::size_t t = 0; t < out.size(); ++t) {
        if (!is_missing(bb.lower[t]) && !is_missing(kc.lower[t])) {
            out[t] = flag(bb.lower[t] < kc.lower[t] && bb.upper[t] > kc.upper[t]);
        }
    }
    return out;
}

std::size_t banker_round_half(std::size_t length) {
    return static_cast<std::size_t>(std::nearbyint(0.5 * static_cast<double>(length + 1)));
}

void add(std::vector<NativeDefinition>& out, std::string name, Params defaults, IndicatorFactory make_fn) {
    out.push_back({std::move(name), std::move(defaults), std::move(make_fn)});
}

}  // namespace

std::vector<NativeDefinition> native_definitions() {
    std::vector<NativeDefinition> defs;

    // Overlap / trend
    add(defs, "sma", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) { return Outputs{rolling::sma(s.close, n)}; });
    });
    add(defs, "ema", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) { return Outputs{rolling::ema(s.close, n)}; });
    });
    add(defs, "wma", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) { return Outputs{rolling::wma(s.close, n)}; });
    });
    add(defs, "dema", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(2 * (n - 1), [n](const auto& s) {
            const auto e1 = rolling::ema(s.close, n);
            const auto e2 = rolling::ema(e1, n);
            return Outputs{zip(e1, e2, [](double a, double b) { return 2.0 * a - b; })};
        });
    });
    add(defs, "tema", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(3 * (n - 1), [n](const auto& s) {
            const auto e1 = rolling::ema(s.close, n);
            const auto e2 = rolling::ema(e1, n);
            const auto e3 = rolling::ema(e2, n);
            return Outputs{zip3(e1, e2, e3, [](double a, double b, double c) { return 3.0 * a - 3.0 * b + c; })};
        });
    });
    add(defs, "trima", {{"length", 10}}, [](const ParamSet& p) {
        const auto half = banker_round_half(p.length("length"));
        return single(2 * (half - 1), [half](const auto& s) {
            return Outputs{rolling::sma(rolling::sma(s.close, half), half)};
        });
    });
    add(defs, "midpoint", {{"length", 2}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) {
            return Outputs{zip(rolling::highest(s.close, n), rolling::lowest(s.close, n),
                               [](double h, double l) { return 0.5 * (h + l); })};
        });
    });
    add(defs, "midprice", {{"length", 2}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) {
            return Outputs{zip(rolling::highest(s.high, n), rolling::lowest(s.low, n),
                               [](double h, double l) { return 0.5 * (h + l); })};
        });
    });

    // Momentum
    add(defs, "mom", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) { return Outputs{rolling::diff(s.close, n)}; });
    });
    add(defs, "roc", {{"length", 10}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) {
            return Outputs{zip(s.close, rolling::shift(s.close, n),
                               [](double c, double prev) { return 100.0 * ratio_or(c - prev, prev, 0.0); })};
        });
    });
    add(defs, "rsi", {{"length", 14}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) {
            const auto change = rolling::diff(s.close, 1);
            Series gain(change.size(), kMissing);
            Series loss(change.size(), kMissing);
            for (std::size_t t = 1; t < change.size(); ++t) {
                gain[t] = std::max(change[t], 0.0);
                loss[t] = std::max(-change[t], 0.0);
            }
            // Flat windows (no gains, no losses) read as neutral 50.
            return Outputs{zip(rolling::wilder(gain, n), rolling::wilder(loss, n),
                               [](double g, double l) { return 100.0 * ratio_or(g, g + l, 0.5); })};
        });
    });
    add(defs, "macd", {{"fast", 12}, {"slow", 26}, {"signal", 9}}, [](const ParamSet& p) {
        const auto fast = p.length("fast");
        const auto slow = p.length("slow");
        const auto sig = p.length("signal");
        return make({"line", "hist", "signal"}, std::max(fast, slow) - 1 + sig - 1,
                    [=](const auto& s) { return oscillator(s.close, fast, slow, sig, false); });
    });
    add(defs, "ppo", {{"fast", 12}, {"slow", 26}, {"signal", 9}}, [](const ParamSet& p) {
        const auto fast = p.length("fast");
        const auto slow = p.length("slow");
        const auto sig = p.length("signal");
        return make({"line", "hist", "signal"}, std::max(fast, slow) - 1 + sig - 1,
                    [=](const auto& s) { return oscillator(s.close, fast, slow, sig, true); });
    });
    add(defs, "pvo", {{"fast", 12}, {"slow", 26}, {"signal", 9}}, [](const ParamSet& p) {
        const auto fast = p.length("fast");
        const auto slow = p.length("slow");
        const auto sig = p.length("signal");
        return make({"line", "hist", "signal"}, std::max(fast, slow) - 1 + sig - 1,
                    [=](const auto& s) { return oscillator(s.volume, fast, slow, sig, true); });
    });
    add(defs, "stoch", {{"k", 14}, {"d", 3}, {"smooth_k", 3}}, [](const ParamSet& p) {
        const auto k = p.length("k");
        const auto d = p.length("d");
        const auto smooth = p.length("smooth_k");
        return make({"k", "d"}, k - 1 + smooth - 1 + d - 1, [=](const auto& s) {
            const auto hh = rolling::highest(s.high, k);
            const auto ll = rolling::lowest(s.low, k);
            Series raw(s.size(), kMissing);
            for (std::size_t t = 0; t < s.size(); ++t) {
                if (!is_missing(hh[t])) {
                    raw[t] = 100.0 * ratio_or(s.close[t] - ll[t], hh[t] - ll[t], 0.5);
                }
            }
            const auto pct_k = rolling::sma(raw, smooth);
            return Outputs{pct_k, rolling::sma(pct_k, d)};
        });
    });
    add(defs, "willr", {{"length", 14}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) {
            const auto hh = rolling::highest(s.high, n);
            const auto ll = rolling::lowest(s.low, n);
            Series out(s.size(), kMissing);
            for (std::size_t t = 0; t < s.size(); ++t) {
                if (!is_missing(hh[t])) {
                    out[t] = -100.0 * ratio_or(hh[t] - s.close[t], hh[t] - ll[t], 0.5);
                }
            }
            return Outputs{out};
        });
    });
    add(defs, "cci", {{"length", 20}, {"c", 0.015}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        const double c = p.get("c");
        return single(n - 1, [n, c](const auto& s) {
            const auto tp = typical_price(s);
            const auto mean = rolling::sma(tp, n);
            const auto mad = rolling::mean_abs_dev(tp, n);
            return Outputs{zip3(tp, mean, mad, [c](double x, double m, double d) { return ratio_or(x - m, c * d, 0.0); })};
        });
    });
    add(defs, "dpo", {{"length", 20}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        const auto lag = n / 2 + 1;
        return single(n - 1 + lag, [n, lag](const auto& s) {
            return Outputs{zip(s.close, rolling::shift(rolling::sma(s.close, n), lag),
                               [](double c, double m) { return c - m; })};
        });
    });
    add(defs, "slope", {{"length", 20}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) {
            auto d = rolling::diff(s.close, n);
            for (double& v : d) {
                v /= static_cast<double>(n);
            }
            return Outputs{d};
        });
    });

    // Volatility
    add(defs, "bbands", {{"length", 20}, {"std", 2}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        const double k = p.get("std");
        return make({"lower", "mid", "upper", "bandwidth", "percent"}, n - 1, [n, k](const auto& s) {
            auto bb = bollinger(s.close, n, k);
            const auto bandwidth = zip3(bb.lower, bb.mid, bb.upper, [](double l, double m, double u) {
                return 100.0 * ratio_or(u - l, m, 0.0);
            });
            const auto percent = zip3(s.close, bb.lower, bb.upper, [](double c, double l, double u) {
                return ratio_or(c - l, u - l, 0.5);
            });
            return Outputs{bb.lower, bb.mid, bb.upper, bandwidth, percent};
        });
    });
    add(defs, "atr", {{"length", 14}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) {
            return Outputs{rolling::wilder(rolling::true_range(s.high, s.low, s.close), n)};
        });
    });
    add(defs, "natr", {{"length", 14}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) {
            const auto atr = rolling::wilder(rolling::true_range(s.high, s.low, s.close), n);
            return Outputs{zip(atr, s.close, [](double a, double c) { return 100.0 * ratio_or(a, c, 0.0); })};
        });
    });
    add(defs, "stdev", {{"length", 20}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) { return Outputs{rolling::stdev(s.close, n)}; });
    });
    add(defs, "zscore", {{"length", 20}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n - 1, [n](const auto& s) {
            return Outputs{zip3(s.close, rolling::sma(s.close, n), rolling::stdev(s.close, n),
                                [](double c, double m, double d) { return ratio_or(c - m, d, 0.0); })};
        });
    });

    // Volume
    add(defs, "obv", {}, [](const ParamSet&) {
        return single(0, [](const auto& s) { return Outputs{rolling::obv(s.close, s.volume)}; });
    });
    add(defs, "mfi", {{"length", 14}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        return single(n, [n](const auto& s) {
            const auto tp = typical_price(s);
            Series pos(s.size(), kMissing);
            Series neg(s.size(), kMissing);
            for (std::size_t t = 1; t < s.size(); ++t) {
                const double flow = tp[t] * s.volume[t];
                pos[t] = tp[t] > tp[t - 1] ? flow : 0.0;
                neg[t] = tp[t] < tp[t - 1] ? flow : 0.0;
            }
            return Outputs{zip(rolling::sma(pos, n), rolling::sma(neg, n),
                               [](double up, double down) { return 100.0 * ratio_or(up, up + down, 0.5); })};
        });
    });
    add(defs, "aobv", {{"fast", 4}, {"slow", 12}, {"max_lookback", 2}, {"min_lookback", 2}, {"run_length", 2}},
        [](const ParamSet& p) {
            const auto fast = p.length("fast");
            const auto slow = p.length("slow");
            const auto max_lb = p.length("max_lookback");
            const auto min_lb = p.length("min_lookback");
            const auto run = p.length("run_length");
            const auto warm = std::max({max_lb - 1, min_lb - 1, std::max(fast, slow) - 1 + run});
            return make({"obv", "min", "max", "fast", "slow", "long", "short"}, warm, [=](const auto& s) {
                const auto obv = rolling::obv(s.close, s.volume);
                const auto f = rolling::ema(obv, fast);
                const auto sl = rolling::ema(obv, slow);
                const auto df = rolling::diff(f, run);
                const auto ds = rolling::diff(sl, run);
                const auto long_run = zip(df, ds, [](double a, double b) {
                    return flag((a > 0.0 && b < 0.0) || (a > 0.0 && b > 0.0));
                });
                const auto short_run = zip(df, ds, [](double a, double b) {
                    return flag((a < 0.0 && b > 0.0) || (a < 0.0 && b < 0.0));
                });
                return Outputs{obv, rolling::lowest(obv, min_lb), rolling::highest(obv, max_lb), f, sl, long_run,
                               short_run};
            });
        });

    // Figure-leader composites
    add(defs, "squeeze",
        {{"bb_length", 20}, {"bb_std", 2}, {"kc_length", 20}, {"kc_scalar", 1.5}, {"mom_length", 12}, {"mom_smooth", 6}},
        [](const ParamSet& p) {
            const auto bb_n = p.length("bb_length");
            const double bb_k = p.get("bb_std");
            const auto kc_n = p.length("kc_length");
            const double kc_k = p.get("kc_scalar");
            const auto mom_n = p.length("mom_length");
            const auto mom_s = p.length("mom_smooth");
            const auto warm = std::max({bb_n - 1, kc_n, mom_n + mom_s - 1});
            return make({"value", "on", "off", "no"}, warm, [=](const auto& s) {
                const auto bb = bollinger(s.close, bb_n, bb_k);
                const auto kc = keltner(s, kc_n, kc_k);
                const auto on = inside(bb, kc);
                const auto off = outside(bb, kc);
                const auto none = zip(on, off, [](double a, double b) { return flag(a == 0.0 && b == 0.0); });
                return Outputs{squeeze_momentum(s.close, mom_n, mom_s), on, off, none};
            });
        });
    add(defs, "squeeze_pro",
        {{"bb_length", 20},
         {"bb_std", 2},
         {"kc_length", 20},
         {"kc_scalar_wide", 2},
         {"kc_scalar_normal", 1.5},
         {"kc_scalar_narrow", 1},
         {"mom_length", 12},
         {"mom_smooth", 6}},
        [](const ParamSet& p) {
            const auto bb_n = p.length("bb_length");
            const double bb_k = p.get("bb_std");
            const auto kc_n = p.length("kc_length");
            const double wide = p.get("kc_scalar_wide");
            const double normal = p.get("kc_scalar_normal");
            const double narrow = p.get("kc_scalar_narrow");
            const auto mom_n = p.length("mom_length");
            const auto mom_s = p.length("mom_smooth");
            const auto warm = std::max({bb_n - 1, kc_n, mom_n + mom_s - 1});
            return make({"value", "on_wide", "on_normal", "on_narrow", "off_wide", "no"}, warm, [=](const auto& s) {
                const auto bb = bollinger(s.close, bb_n, bb_k);
                const auto kc_wide = keltner(s, kc_n, wide);
                const auto kc_normal = keltner(s, kc_n, normal);
                const auto kc_narrow = keltner(s, kc_n, narrow);
                const auto on_wide = inside(bb, kc_wide);
                const auto off_wide = outside(bb, kc_wide);
                const auto none = zip(on_wide, off_wide, [](double a, double b) { return flag(a == 0.0 && b == 0.0); });
                return Outputs{squeeze_momentum(s.close, mom_n, mom_s), on_wide, inside(bb, kc_normal),
                               inside(bb, kc_narrow), off_wide, none};
            });
        });
    add(defs, "thermo", {{"length", 20}, {"long", 2}, {"short", 0.5}}, [](const ParamSet& p) {
        const auto n = p.length("length");
        const double long_k = p.get("long");
        const double short_k = p.get("short");
        return make({"value", "ma", "long", "short"}, n, [=](const auto& s) {
            Series thermo(s.size(), kMissing);
            for (std::size_t t = 1; t < s.size(); ++t) {
                thermo[t] = std::max(std::abs(s.low[t - 1] - s.low[t]), std::abs(s.high[t] - s.high[t - 1]));
            }
            const auto ma = rolling::ema(thermo, n);
            return Outputs{thermo, ma,
                           zip(thermo, ma, [long_k](double v, double m) { return flag(v < m * long_k); }),
                           zip(thermo, ma, [short_k](double v, double m) { return flag(v > m * short_k); })};
        });
    });
    add(defs, "decay", {{"length", 5}}, [](const ParamSet& p) {
        const double step = 1.0 / static_cast<double>(p.length("length"));
        return single(0, [step](const auto& s) {
            Series out(s.size(), kMissing);
            double prev = 0.0;
            for (std::size_t t = 0; t < s.size(); ++t) {
                prev = std::max({s.close[t], t == 0 ? 0.0 : prev - step, 0.0});
                out[t] = prev;
            }
            return Outputs{out};
        });
    });
    add(defs, "ichimoku", {{"tenkan", 9}, {"kijun", 26}, {"senkou", 52}}, [](const ParamSet& p) {
        const auto tenkan = p.length("tenkan");
        const auto kijun = p.length("kijun");
        const auto senkou = p.length("senkou");
        return make({"conversion", "base", "span_a", "span_b"}, std::max({tenkan, kijun, senkou}) - 1,
                    [=](const auto& s) {
                        auto mid = [&s](std::size_t n) {
                            return zip(rolling::highest(s.high, n), rolling::lowest(s.low, n),
                                       [](double h, double l) { return 0.5 * (h + l); });
                        };
                        const auto conversion = mid(tenkan);
                        const auto base = mid(kijun);
                        const auto span_a = zip(conversion, base, [](double a, double b) { return 0.5 * (a + b); });
                        return Outputs{conversion, base, span_a, mid(senkou)};
                    });
    });

    return defs;
}

}  // namespace tafs::indicators
