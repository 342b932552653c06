"""Dynamics indices over a time-varying power spectrum.

Dominant-frequency ridge extraction by dynamic programming, the
rhythmic/nonrhythmic power split and its log ratio (NRR), wave-shape
estimation by functional regression, and an almost-orthogonality
diagnostic for separated oscillatory components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

__all__ = [
    "RidgeCurve",
    "NRRSeries",
    "ShapeModel",
    "extract_ridge",
    "rhythmic_power",
    "nonrhythmic_power",
    "nrr",
    "nrr_series",
    "estimate_shape",
    "almost_orthogonality_check",
]

LOG_FLOOR = -50.0


@dataclass(frozen=True)
class RidgeCurve:
    """Per-frame dominant-frequency bin indices (0-based) and the penalty used."""

    indices: np.ndarray
    penalty: float


def _ridge_scores(v):
    total = float(np.sum(v))
    if total <= 0.0:
        return np.full(v.shape, LOG_FLOOR)
    with np.errstate(divide="ignore"):
        return np.maximum(np.log(v / total), LOG_FLOOR)


def extract_ridge(v, penalty):
    """Globally optimal ridge through the power map ``v`` (frames x bins).

    Maximizes sum of log normalized power minus penalty * (bin jump)^2
    by dynamic programming; zero-power bins enter at a fixed log floor.
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    if penalty < 0:
        raise ValueError("penalty must be nonnegative")
    n_frames, n_bins = v.shape
    score = _ridge_scores(v)
    if penalty == 0.0 or n_frames == 1:
        return RidgeCurve(indices=np.argmax(score, axis=1), penalty=penalty)
    bins = np.arange(n_bins)
    jump = penalty * (bins[:, None] - bins[None, :]) ** 2  # [to, from]
    dp = score[0].copy()
    back = np.zeros((n_frames, n_bins), dtype=int)
    for t in range(1, n_frames):
        cand = dp[None, :] - jump
        back[t] = np.argmax(cand, axis=1)
        dp = cand[bins, back[t]] + score[t]
    idx = np.empty(n_frames, dtype=int)
    idx[-1] = int(np.argmax(dp))
    for t in range(n_frames - 1, 0, -1):
        idx[t - 1] = back[t, idx[t]]
    return RidgeCurve(indices=idx, penalty=penalty)


def _band(center_bin, half_width_hz, dxi, n_bins):
    lo = math.floor(center_bin - half_width_hz / dxi)
    hi = math.ceil(center_bin + half_width_hz / dxi)
    return max(lo, 0), min(hi, n_bins - 1)


def rhythmic_power(v, ridge, frame, dxi, half_width=0.02, harmonics=1, freq_lo=0.0):
    """Power inside the band(s) around the ridge at one frame.

    The band spans floor/ceil of half_width (Hz) in bins around the
    ridge bin.  harmonics > 1 also sums the same-width bands at integer
    multiples of the ridge frequency (the displayed definition uses the
    fundamental band only).
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    idx = ridge.indices if isinstance(ridge, RidgeCurve) else np.asarray(ridge)
    n_bins = v.shape[1]
    center = int(idx[frame])
    lo, hi = _band(center, half_width, dxi, n_bins)
    total = float(np.sum(v[frame, lo : hi + 1]))
    for q in range(2, harmonics + 1):
        f_q = freq_lo + (center + 1) * dxi
        kq = int(round((q * f_q - freq_lo) / dxi)) - 1
        if kq >= n_bins:
            break
        lo, hi = _band(kq, half_width, dxi, n_bins)
        total += float(np.sum(v[frame, lo : hi + 1]))
    return total


def nonrhythmic_power(v, p_r, frame, dxi, floor_hz=0.1, freq_lo=0.0):
    """Total power from floor_hz upward minus the rhythmic part, floored at 0."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    start = max(0, math.ceil((floor_hz - freq_lo) / dxi) - 1)
    total = float(np.sum(v[frame, start:]))
    return max(total - p_r, 0.0)


def nrr(p_nr, p_r):
    """log10 of the nonrhythmic-to-rhythmic power ratio; nan when undefined."""
    if p_r <= 0.0:
        return math.nan
    if p_nr == 0.0:
        return -math.inf
    return math.log10(p_nr / p_r)


@dataclass(frozen=True)
class NRRSeries:
    """Per-frame rhythmic power, nonrhythmic power, and their log ratio."""

    times: np.ndarray
    ridge_freqs: np.ndarray
    p_r: np.ndarray
    p_nr: np.ndarray
    values: np.ndarray


def nrr_series(tfmap, penalty=0.5, half_width=0.02, floor_hz=0.1, harmonics=1, window=None):
    """NRR over a whole time-frequency map.

    ``window`` (frames) switches to the streaming flavor that rebuilds
    the ridge over a trailing window per frame; the default extracts a
    single global ridge.
    """
    v = tfmap.v
    dxi = float(tfmap.freqs[1] - tfmap.freqs[0]) if len(tfmap.freqs) > 1 else 1.0
    freq_lo = float(tfmap.freqs[0]) - dxi
    n_frames = v.shape[0]
    if window is None:
        ridge = extract_ridge(v, penalty).indices
    else:
        ridge = np.empty(n_frames, dtype=int)
        for t in range(n_frames):
            lo = max(0, t + 1 - window)
            ridge[t] = extract_ridge(v[lo : t + 1], penalty).indices[-1]
    p_r = np.empty(n_frames)
    p_nr = np.empty(n_frames)
    vals = np.empty(n_frames)
    for t in range(n_frames):
        p_r[t] = rhythmic_power(v, ridge, t, dxi, half_width, harmonics, freq_lo)
        p_nr[t] = nonrhythmic_power(v, p_r[t], t, dxi, floor_hz, freq_lo)
        vals[t] = nrr(p_nr[t], p_r[t])
    return NRRSeries(
        times=tfmap.times,
        ridge_freqs=tfmap.freqs[ridge],
        p_r=p_r,
        p_nr=p_nr,
        values=vals,
    )


@dataclass(frozen=True)
class ShapeModel:
    """Truncated Fourier model of a 1-periodic wave shape."""

    harmonics: int
    alphas: np.ndarray
    betas: np.ndarray

    @property
    def gamma(self):
        return np.concatenate([self.alphas, self.betas])

    def evaluate(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for ell in range(1, self.harmonics + 1):
            out += self.alphas[ell - 1] * np.cos(2.0 * math.pi * ell * u)
            out += self.betas[ell - 1] * np.sin(2.0 * math.pi * ell * u)
        return out


def _regressors(amplitude, phase, harmonics):
    ell = np.arange(1, harmonics + 1)[:, None]
    ang = 2.0 * math.pi * ell * phase[None, :]
    return np.vstack([amplitude[None, :] * np.cos(ang), amplitude[None, :] * np.sin(ang)])


def estimate_shape(y, amplitude, phase, harmonics, cond_limit=1e12):
    """Wave-shape Fourier coefficients by functional least squares.

    Regresses the observation on amplitude-weighted cos/sin of integer
    multiples of the estimated phase: gamma = (Y C^T)(C C^T)^{-1}.
    """
    y = np.asarray(y, dtype=float)
    amplitude = np.asarray(amplitude, dtype=float)
    phase = np.asarray(phase, dtype=float)
    if not (len(y) == len(amplitude) == len(phase)):
        raise ValueError("series lengths differ")
    if np.any(amplitude <= 0.0):
        raise ValueError("amplitude estimates must be positive")
    if np.any(np.diff(phase) <= 0.0):
        raise ValueError("phase estimates must be strictly increasing")
    if 2 * harmonics >= len(y):
        raise ValueError("need more samples than coefficients")
    c = _regressors(amplitude, phase, harmonics)
    gram = c @ c.T
    if np.linalg.cond(gram) > cond_limit:
        raise ValueError("regressor Gram matrix is numerically singular")
    gamma = np.linalg.solve(gram, c @ y)
    return ShapeModel(
        harmonics=harmonics, alphas=gamma[:harmonics], betas=gamma[harmonics:]
    )


def almost_orthogonality_check(f1, f2, interval, points_per_unit=2000):
    """Normalized inner product of two components over an interval.

    Small values confirm that components with separated instantaneous
    frequencies are nearly orthogonal; the boundary contribution decays
    like the reciprocal of the interval length.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if hi <= lo:
        raise ValueError("empty interval")
    num = max(int((hi - lo) * points_per_unit), 64) | 1
    t = np.linspace(lo, hi, num)
    a = np.asarray(f1(t), dtype=float)
    b = np.asarray(f2(t), dtype=float)
    ab = simpson(a * b, x=t)
    na = math.sqrt(simpson(a * a, x=t))
    nb = math.sqrt(simpson(b * b, x=t))
    return abs(ab) / (na * nb)
