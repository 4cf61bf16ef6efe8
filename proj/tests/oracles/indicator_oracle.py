#!/usr/bin/env python3
"""Reference values for a handful of indicators on random OHLCV bars.

Written against numpy only, without looking at the C++ code paths: rolling
windows come from sliding_window_view, smoothing from explicit recursions.

    python3 tests/oracles/indicator_oracle.py tests/data

writes indicator_input.csv (OHLCV) and indicator_golden.csv (expected frame).
"""
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

N = 100
SEED = 20240601


def bars(n, seed):
    rng = np.random.default_rng(seed)
    close = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.02, n)))
    open_ = close * (1.0 + rng.normal(0.0, 0.01, n))
    high = np.maximum(open_, close) * (1.0 + rng.uniform(0.0, 0.02, n))
    low = np.minimum(open_, close) * (1.0 - rng.uniform(0.0, 0.02, n))
    volume = rng.integers(100_000, 5_000_000, n).astype(float)
    # a few flat days so the tie branches of obv get exercised
    close[40] = close[39]
    close[70] = close[69]
    high[40] = max(high[40], close[40])
    low[40] = min(low[40], close[40])
    high[70] = max(high[70], close[70])
    low[70] = min(low[70], close[70])
    return open_, high, low, close, volume


def pad(values, n):
    out = np.full(n, np.nan)
    out[n - len(values):] = values
    return out


def sma(x, n):
    return pad(sliding_window_view(x, n).mean(axis=1), len(x))


def smoothed(x, n, alpha):
    """First value = mean of the first n valid inputs, then x*alpha + prev*(1-alpha)."""
    out = np.full(len(x), np.nan)
    valid = np.flatnonzero(~np.isnan(x))
    start = valid[0]
    seed_at = start + n - 1
    if seed_at >= len(x):
        return out
    prev = x[start:seed_at + 1].mean()
    out[seed_at] = prev
    for t in range(seed_at + 1, len(x)):
        prev = alpha * x[t] + (1.0 - alpha) * prev
        out[t] = prev
    return out


def ema(x, n):
    return smoothed(x, n, 2.0 / (n + 1))


def wilder(x, n):
    return smoothed(x, n, 1.0 / n)


def rsi(close, n=14):
    change = np.concatenate([[np.nan], np.diff(close)])
    up = wilder(np.where(np.isnan(change), np.nan, np.clip(change, 0, None)), n)
    down = wilder(np.where(np.isnan(change), np.nan, np.clip(-change, 0, None)), n)
    return 100.0 - 100.0 / (1.0 + up / down)


def bbands(close, n=20, k=2.0):
    win = sliding_window_view(close, n)
    mid = pad(win.mean(axis=1), len(close))
    sd = pad(win.std(axis=1, ddof=0), len(close))
    lower, upper = mid - k * sd, mid + k * sd
    return lower, mid, upper, 100.0 * (upper - lower) / mid, (close - lower) / (upper - lower)


def ppo(close, fast=12, slow=26, signal=9):
    f, s = ema(close, fast), ema(close, slow)
    line = (f - s) / s * 100.0
    sig = ema(line, signal)
    return line, line - sig, sig


def obv(close, volume):
    direction = np.sign(np.diff(close))
    return np.cumsum(np.concatenate([[volume[0]], direction * volume[1:]]))


def willr(high, low, close, n=14):
    hh = pad(sliding_window_view(high, n).max(axis=1), len(close))
    ll = pad(sliding_window_view(low, n).min(axis=1), len(close))
    return (hh - close) / (hh - ll) * -100.0


def atr(high, low, close, n=14):
    prev = np.concatenate([[np.nan], close[:-1]])
    tr = np.nanmax(np.vstack([high - low, np.abs(high - prev), np.abs(low - prev)]), axis=0)
    tr[0] = np.nan
    return wilder(tr, n)


def fmt(v):
    return "" if np.isnan(v) else repr(float(v))


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    open_, high, low, close, volume = bars(N, SEED)
    days, d = [], date(2015, 1, 5)
    while len(days) < N:
        if d.weekday() < 5:
            days.append(d.isoformat())
        d += timedelta(days=1)

    with open(out / "indicator_input.csv", "w") as f:
        f.write("Date,Open,High,Low,Close,Adj Close,Volume\n")
        for i in range(N):
            f.write(",".join([days[i]] + [fmt(v) for v in (open_[i], high[i], low[i], close[i], close[i], volume[i])]) + "\n")

    cols = {"sma": sma(close, 10), "ema": ema(close, 10), "rsi": rsi(close)}
    for name, values in zip(["lower", "mid", "upper", "bandwidth", "percent"], bbands(close)):
        cols["bbands:" + name] = values
    for name, values in zip(["line", "hist", "signal"], ppo(close)):
        cols["ppo:" + name] = values
    cols["obv"] = obv(close, volume)
    cols["willr"] = willr(high, low, close)
    cols["atr"] = atr(high, low, close)

    with open(out / "indicator_golden.csv", "w") as f:
        f.write("Date," + ",".join(cols) + "\n")
        for i in range(N):
            f.write(",".join([days[i]] + [fmt(v[i]) for v in cols.values()]) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
