"""Concordance and signal statistics for indicator evaluation.

Prediction probability (a tie-aware concordance statistic), Spearman
rank correlation, the std-ratio SNR in dB, and the first-order
effect-site concentration lag solved exactly for stepwise inputs.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as _sps

__all__ = [
    "prediction_probability",
    "spearman",
    "snr_db",
    "effect_site",
    "weighted_mean",
]


def prediction_probability(x, y):
    """P_K = (P_c + P_tx/2) / (P_c + P_d + P_tx) over all unordered pairs.

    Pairs tied only in y, or tied in both, are excluded.  Returns nan
    when every pair is excluded.  1 means the indicator x always ranks
    the outcome y correctly, 0.5 is chance, below 0.5 is inverse.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d and equally long")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    upper = np.triu(np.ones(len(x), dtype=bool), k=1)
    prod = sx[upper] * sy[upper]
    concordant = int(np.sum(prod > 0))
    discordant = int(np.sum(prod < 0))
    tie_x_only = int(np.sum((sx[upper] == 0) & (sy[upper] != 0)))
    denom = concordant + discordant + tie_x_only
    if denom == 0:
        return math.nan
    return (concordant + 0.5 * tie_x_only) / denom


def spearman(x, y):
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two equally long series")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValueError("zero variance in ranks")
    return float(_sps.spearmanr(x, y).statistic)


def snr_db(signal, noise):
    """20 log10 of the std ratio between signal and noise."""
    s = float(np.std(np.asarray(signal, dtype=float)))
    n = float(np.std(np.asarray(noise, dtype=float)))
    if s == 0.0 or n == 0.0:
        raise ValueError("zero standard deviation")
    return 20.0 * math.log10(s / n)


def effect_site(times, c_et, ke0=0.20, c0=None):
    """Effect-site concentration from end-tidal values.

    Solves dC_eff/dt = ke0 (C_et - C_eff) exactly per step with the
    end-tidal concentration held constant between samples; ``times``
    are in seconds and ``ke0`` in 1/min.  ``c0`` defaults to the first
    end-tidal value.
    """
    times = np.asarray(times, dtype=float)
    c_et = np.asarray(c_et, dtype=float)
    if times.shape != c_et.shape or times.ndim != 1 or len(times) < 1:
        raise ValueError("times and concentrations must be equal-length 1-d arrays")
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be strictly increasing")
    if ke0 < 0.0:
        raise ValueError("rate constant must be nonnegative")
    k = ke0 / 60.0
    out = np.empty_like(c_et)
    out[0] = c_et[0] if c0 is None else float(c0)
    for i in range(len(times) - 1):
        decay = math.exp(-k * (times[i + 1] - times[i]))
        out[i + 1] = c_et[i] + (out[i] - c_et[i]) * decay
    return out


def weighted_mean(values, weights):
    """Weighted average, e.g. per-record statistics weighted by length."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape or np.sum(weights) <= 0:
        raise ValueError("weights must match values and have positive sum")
    return float(np.sum(values * weights) / np.sum(weights))
