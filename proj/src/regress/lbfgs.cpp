#include "regress/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace tafs::regress::lbfgs {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

struct Pair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

struct Probe {
    double step = 0.0;
    double f = 0.0;
    double slope = 0.0;
    std::vector<double> x;
    std::vector<double> g;
};

class LineSearch {
public:
    LineSearch(const Objective& objective, const std::vector<double>& x, double f0, const std::vector<double>& d,
               double slope0)
        : objective_(objective), x_(x), d_(d), f0_(f0), slope0_(slope0) {}

    bool run(double initial, Probe& out) {
        Probe prev{0.0, f0_, slope0_, {}, {}};
        double step = initial;
        for (int i = 0; i < 40; ++i) {
            Probe cur = probe(step);
            if (!std::isfinite(cur.f) || cur.f > f0_ + kC1 * step * slope0_ || (i > 0 && cur.f >= prev.f)) {
                return zoom(prev, cur, out);
            }
            if (std::abs(cur.slope) <= -kC2 * slope0_) {
                out = std::move(cur);
                return true;
            }
            if (cur.slope >= 0.0) {
                return zoom(cur, prev, out);
            }
            prev = std::move(cur);
            step *= 2.0;
        }
        return false;
    }

private:
    static constexpr double kC1 = 1e-4;
    static constexpr double kC2 = 0.9;

    Probe probe(double step) {
        Probe p;
        p.step = step;
        p.x.resize(x_.size());
        p.g.resize(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            p.x[i] = x_[i] + step * d_[i];
        }
        p.f = objective_(p.x, p.g);
        p.slope = dot(p.g, d_);
        return p;
    }

    bool sufficient(const Probe& p) const { return std::isfinite(p.f) && p.f <= f0_ + kC1 * p.step * slope0_; }

    bool zoom(Probe lo, Probe hi, Probe& out) {
        for (int i = 0; i < 40; ++i) {
            const double a = lo.step;
            const double b = hi.step;
            double step = cubic_min(lo, hi);
            const double lo_edge = std::min(a, b) + 0.1 * std::abs(b - a);
            const double hi_edge = std::max(a, b) - 0.1 * std::abs(b - a);
            if (!std::isfinite(step) || step < lo_edge || step > hi_edge) {
                step = 0.5 * (a + b);
            }
            if (std::abs(b - a) < 1e-16 * std::max(1.0, std::abs(a))) {
                break;
            }
            Probe cur = probe(step);
            if (!sufficient(cur) || cur.f >= lo.f) {
                hi = std::move(cur);
            } else {
                if (std::abs(cur.slope) <= -kC2 * slope0_) {
                    out = std::move(cur);
                    return true;
                }
                if (cur.slope * (hi.step - lo.step) >= 0.0) {
                    hi = std::move(lo);
                }
                lo = std::move(cur);
            }
        }
        // Accept the best Armijo point when the curvature condition is out of reach.
        if (lo.step > 0.0 && sufficient(lo) && lo.f < f0_) {
            out = std::move(lo);
            return true;
        }
        return false;
    }

    static double cubic_min(const Probe& p, const Probe& q) {
        if (!std::isfinite(p.f) || !std::isfinite(q.f)) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double d1 = p.slope + q.slope - 3.0 * (p.f - q.f) / (p.step - q.step);
        const double disc = d1 * d1 - p.slope * q.slope;
        if (disc < 0.0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double d2 = std::copysign(std::sqrt(disc), q.step - p.step);
        return q.step - (q.step - p.step) * (q.slope + d2 - d1) / (q.slope - p.slope + 2.0 * d2);
    }

    const Objective& objective_;
    const std::vector<double>& x_;
    const std::vector<double>& d_;
    double f0_;
    double slope0_;
};

}  // namespace

Result minimize(const Objective& objective, std::vector<double> x0, const Options& options) {
    Result r;
    r.x = std::move(x0);
    const std::size_t n = r.x.size();
    std::vector<double> g(n);
    r.f = objective(r.x, g);
    r.trace.push_back(r.f);
    if (max_abs(g) <= options.gtol) {
        r.converged = true;
        r.message = "gradient below tolerance";
        return r;
    }

    std::deque<Pair> history;
    std::vector<double> d(n);
    std::vector<double> alpha_buf;
    for (std::size_t k = 0; k < options.max_iter; ++k) {
        // Two-loop recursion.
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = -g[i];
        }
        alpha_buf.assign(history.size(), 0.0);
        for (std::size_t h = history.size(); h-- > 0;) {
            alpha_buf[h] = history[h].rho * dot(history[h].s, d);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] -= alpha_buf[h] * history[h].y[i];
            }
        }
        if (!history.empty()) {
            const auto& last = history.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (double& v : d) {
                v *= gamma;
            }
        }
        for (std::size_t h = 0; h < history.size(); ++h) {
            const double beta = history[h].rho * dot(history[h].y, d);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] += (alpha_buf[h] - beta) * history[h].s[i];
            }
        }
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            history.clear();
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = -g[i];
            }
            slope = dot(g, d);
        }

        const double initial = history.empty() ? std::min(1.0, 1.0 / std::max(max_abs(g), 1e-300)) : 1.0;
        Probe accepted;
        LineSearch search(objective, r.x, r.f, d, slope);
        if (!search.run(initial, accepted)) {
            if (!history.empty()) {
                history.clear();
                --k;  // retry this iteration along steepest descent
                continue;
            }
            r.iterations = k;
            r.message = "line search failed";
            return r;
        }

        Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            pair.s[i] = accepted.x[i] - r.x[i];
            pair.y[i] = accepted.g[i] - g[i];
        }
        const double sy = dot(pair.s, pair.y);
        if (sy > 1e-10 * std::sqrt(dot(pair.y, pair.y) * dot(pair.s, pair.s))) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (history.size() > options.memory) {
                history.pop_front();
            }
        }

        const double f_old = r.f;
        r.x = std::move(accepted.x);
        g = std::move(accepted.g);
        r.f = accepted.f;
        r.trace.push_back(r.f);
        r.iterations = k + 1;

        if (max_abs(g) <= options.gtol) {
            r.converged = true;
            r.message = "gradient below tolerance";
            return r;
        }
        if ((f_old - r.f) <= options.ftol * std::max({std::abs(f_old), std::abs(r.f), 1.0})) {
            r.converged = true;
            r.message = "relative reduction below tolerance";
            return r;
        }
    }
    r.message = "iteration limit reached";
    return r;
}

}  // namespace tafs::regress::lbfgs
