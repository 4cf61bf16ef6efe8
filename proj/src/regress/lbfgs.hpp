#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tafs::regress::lbfgs {

/// Returns f(x) and writes the gradient into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct Options {
    std::size_t max_iter = 2000;
    std::size_t memory = 10;
    double gtol = 1e-4;               // max-abs gradient
    double ftol = 2.220446049250313e-09;  // relative decrease between iterations
};

struct Result {
    std::vector<double> x;
    double f = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string message;
    std::vector<double> trace;  // f at x0 and after each iteration
};

/// Limited-memory BFGS with a strong-Wolfe line search.
Result minimize(const Objective& objective, std::vector<double> x0, const Options& options);

}  // namespace tafs::regress::lbfgs
