#pragma once

// Causal rolling-window building blocks. Every function returns a series
// aligned with its input; an entry is NaN when its window is incomplete
// or contains a NaN.

#include <cstddef>
#include <vector>

namespace tafs::indicators::rolling {

using Series = std::vector<double>;

Series sma(const Series& x, std::size_t n);
Series wma(const Series& x, std::size_t n);
/// Exponential average seeded with the mean of the first n defined values.
Series ema(const Series& x, std::size_t n, double alpha);
Series ema(const Series& x, std::size_t n);     // alpha = 2/(n+1)
Series wilder(const Series& x, std::size_t n);  // alpha = 1/n
Series highest(const Series& x, std::size_t n);
Series lowest(const Series& x, std::size_t n);
/// Population standard deviation.
Series stdev(const Series& x, std::size_t n);
/// Mean absolute deviation around the window mean.
Series mean_abs_dev(const Series& x, std::size_t n);
/// x[t] - x[t-n].
Series diff(const Series& x, std::size_t n);
/// x[t-n].
Series shift(const Series& x, std::size_t n);
/// max(high-low, |high-prev close|, |low-prev close|); index 0 is NaN.
Series true_range(const Series& high, const Series& low, const Series& close);
/// On-balance volume with the first bar counted as an up move.
Series obv(const Series& close, const Series& volume);

}  // namespace tafs::indicators::rolling
