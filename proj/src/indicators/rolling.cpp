#include "indicators/rolling.hpp"

#include "tafs/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tafs::indicators::rolling {

namespace {

// Calls fn(first, last) for every complete NaN-free window ending at t.
template <typename Fn>
Series windowed(const Series& x, std::size_t n, Fn fn) {
    Series out(x.size(), kMissing);
    if (n == 0) {
        return out;
    }
    std::size_t run = 0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        run = is_missing(x[t]) ? 0 : run + 1;
        if (run >= n) {
            out[t] = fn(t + 1 - n, t + 1);
        }
    }
    return out;
}

}  // namespace

Series sma(const Series& x, std::size_t n) {
    return windowed(x, n, [&](std::size_t a, std::size_t b) {
        double sum = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            sum += x[i];
        }
        return sum / static_cast<double>(n);
    });
}

Series wma(const Series& x, std::size_t n) {
    const double denom = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    return windowed(x, n, [&](std::size_t a, std::size_t b) {
        double sum = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            sum += static_cast<double>(i - a + 1) * x[i];
        }
        return sum / denom;
    });
}

Series ema(const Series& x, std::size_t n, double alpha) {
    Series out(x.size(), kMissing);
    const auto seeded = sma(x, n);
    std::size_t t = 0;
    while (t < x.size() && is_missing(seeded[t])) {
        ++t;
    }
    if (t == x.size()) {
        return out;
    }
    double value = seeded[t];
    out[t] = value;
    for (++t; t < x.size(); ++t) {
        value += alpha * (x[t] - value);
        out[t] = value;
    }
    return out;
}

Series ema(const Series& x, std::size_t n) { return ema(x, n, 2.0 / (static_cast<double>(n) + 1.0)); }

Series wilder(const Series& x, std::size_t n) { return ema(x, n, 1.0 / static_cast<double>(n)); }

Series highest(const Series& x, std::size_t n) {
    return windowed(x, n, [&](std::size_t a, std::size_t b) {
        return *std::max_element(x.begin() + static_cast<std::ptrdiff_t>(a), x.begin() + static_cast<std::ptrdiff_t>(b));
    });
}

Series lowest(const Series& x, std::size_t n) {
    return windowed(x, n, [&](std::size_t a, std::size_t b) {
        return *std::min_element(x.begin() + static_cast<std::ptrdiff_t>(a), x.begin() + static_cast<std::ptrdiff_t>(b));
    });
}

Series stdev(const Series& x, std::size_t n) {
    return windowed(x, n, [&](std::size_t a, std::size_t b) {
        double mean = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            mean += x[i];
        }
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            ss += (x[i] - mean) * (x[i] - mean);
        }
        return std::sqrt(ss / static_cast<double>(n));
    });
}

Series mean_abs_dev(const Series& x, std::size_t n) {
    return windowed(x, n, [&](std::size_t a, std::size_t b) {
        double mean = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            mean += x[i];
        }
        mean /= static_cast<double>(n);
        double dev = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            dev += std::abs(x[i] - mean);
        }
        return dev / static_cast<double>(n);
    });
}

Series diff(const Series& x, std::size_t n) {
    Series out(x.size(), kMissing);
    for (std::size_t t = n; t < x.size(); ++t) {
        out[t] = x[t] - x[t - n];
    }
    return out;
}

Series shift(const Series& x, std::size_t n) {
    Series out(x.size(), kMissing);
    for (std::size_t t = n; t < x.size(); ++t) {
        out[t] = x[t - n];
    }
    return out;
}

Series true_range(const Series& high, const Series& low, const Series& close) {
    Series out(close.size(), kMissing);
    for (std::size_t t = 1; t < close.size(); ++t) {
        out[t] = std::max({high[t] - low[t], std::abs(high[t] - close[t - 1]), std::abs(low[t] - close[t - 1])});
    }
    return out;
}

Series obv(const Series& close, const Series& volume) {
    Series out(close.size(), kMissing);
    double total = 0.0;
    for (std::size_t t = 0; t < close.size(); ++t) {
        double sign = 1.0;
        if (t > 0) {
            sign = close[t] > close[t - 1] ? 1.0 : (close[t] < close[t - 1] ? -1.0 : 0.0);
        }
        total += sign * volume[t];
        out[t] = total;
    }
    return out;
}

}  // namespace tafs::indicators::rolling
