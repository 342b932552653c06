"""Real-time blending interpolation of irregular samples.

The operator combines a quasi-interpolation scheme (local dual
functionals that reproduce polynomials of degree < m) with a completely
local interpolation correction on a refined knot sequence, so the
result both interpolates the data and preserves polynomials.  A
streaming implementation commits spline coefficients with a fixed lag
of about m+1 samples and never revises them; the committed prefix is
bit-identical to the batch computation because both paths evaluate the
same per-coefficient pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bsplines import SplineCurve, eval_bspline, eval_spline_curve

__all__ = [
    "QuasiCoeffRow",
    "quasi_coeffs",
    "refine_knots",
    "BlendingModel",
    "local_basis_eval",
    "blend_interpolate",
    "BlendingStream",
]


@dataclass(frozen=True)
class QuasiCoeffRow:
    """Weights pairing data sites with one B-spline coefficient."""

    k: int
    sites: np.ndarray
    a: np.ndarray


def _elem_symmetric_all(vals, top):
    """sigma_0..sigma_top of ``vals`` in one sweep."""
    e = np.zeros(top + 1, dtype=np.longdouble)
    e[0] = 1.0
    for v in vals:
        for i in range(top, 0, -1):
            e[i] += v * e[i - 1]
    return e


def _solve_pivoted(a, b):
    """Gaussian elimination with partial pivoting in extended precision."""
    a = np.array(a, dtype=np.longdouble)
    b = np.array(b, dtype=np.longdouble)
    n = len(b)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0.0:
            raise ValueError("coincident data times give a singular Vandermonde system")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, n):
            f = a[row, col] / a[col, col]
            a[row, col:] -= f * a[col, col:]
            b[row] -= f * b[col]
    x = np.zeros(n, dtype=np.longdouble)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - np.dot(a[row, row + 1 :], x[row + 1 :])) / a[row, row]
    return x


def _dual_weights(sites, inner_knots, m):
    """Solve for weights w with sum_j w_j p(sites[j]) = lambda(p), p in Pi_{m-1}.

    lambda is the B-spline dual functional whose action on x^l is
    sigma_l(inner_knots)/C(m-1, l).  Solved in a shifted/scaled basis in
    extended precision; Vandermonde systems on raw abscissae are badly
    conditioned.
    """
    sites = np.asarray(sites, dtype=np.longdouble)
    inner = np.asarray(inner_knots, dtype=np.longdouble)
    center = sites.mean()
    scale = max(float(sites[-1] - sites[0]), 1e-300)
    s = (sites - center) / scale
    kn = (inner - center) / scale
    sig = _elem_symmetric_all(kn, m - 1)
    rhs = np.array([sig[l] / math.comb(m - 1, l) for l in range(m)], dtype=np.longdouble)
    vand = np.vander(s, m, increasing=True).T  # row l = s**l
    return _solve_pivoted(vand, rhs).astype(float)


def quasi_coeffs(times, m, k):
    """Quasi-interpolation coefficient row a_{k,0..m-1}.

    Pairs the data sites times[k:k+m] with the dual functional of the
    B-spline whose interior knots are times[k+1:k+m-1]; the resulting
    operator reproduces polynomials of degree < m.
    """
    times = np.asarray(times, dtype=float)
    if m < 2:
        raise ValueError("quasi-interpolation needs order >= 2")
    if k < 0 or k + m > len(times):
        raise IndexError(f"need {m} data sites from index {k}")
    sites = times[k : k + m]
    if np.any(np.diff(sites) <= 0):
        raise ValueError("data times must be strictly increasing")
    a = _dual_weights(sites, times[k + 1 : k + m], m)
    return QuasiCoeffRow(k=k, sites=sites, a=a)


def _insert_counts(m, n_intervals):
    """Knots inserted per data interval: parity rule anchored at index 0."""
    if m % 2 == 0:
        return [m // 2 - 1] * n_intervals
    even, odd = (m + 1) // 2 - 1, (m + 1) // 2 - 2
    return [even if j % 2 == 0 else odd for j in range(n_intervals)]


def refine_knots(times, m):
    """Refined breakpoints containing the data times.

    Even m inserts m/2-1 equally spaced knots per interval; odd m
    alternates (m+1)/2-1 and (m+1)/2-2 insertions so that every
    consecutive pair of data times spans exactly m refined intervals.
    """
    times = np.asarray(times, dtype=float)
    if m < 3:
        raise ValueError("refinement defined for order >= 3")
    if np.any(np.diff(times) <= 0):
        raise ValueError("data times must be strictly increasing")
    counts = _insert_counts(m, len(times) - 1)
    out = [times[0]]
    for j, c in enumerate(counts):
        lo, hi = times[j], times[j + 1]
        for q in range(1, c + 1):
            out.append(lo + (hi - lo) * q / (c + 1))
        out.append(hi)
    return np.array(out)


def _data_positions(m, n_points):
    """Index of each data time inside the refined breakpoint list."""
    counts = _insert_counts(m, n_points - 1)
    pos = [0]
    for c in counts:
        pos.append(pos[-1] + c + 1)
    return pos


class _Engine:
    """Shared state for batch and streaming blending.

    All public results come from `_s_coefficient`, a pure function of
    local data, so a streamed prefix and a batch run agree exactly.
    """

    def __init__(self, m):
        if m < 3:
            raise ValueError("blending needs order >= 3")
        self.m = m
        self.times = []
        self.values = []
        self.breaks = []  # refined breakpoints through the newest sample
        self.pos = [0]  # data index -> index in breaks
        self.closed = False
        self._lam = {}
        self._qrow = {}

    # -- knot accessors ------------------------------------------------
    def append(self, t, x):
        if self.closed:
            raise ValueError("stream already closed")
        if self.times and t <= self.times[-1]:
            raise ValueError(f"non-monotone time {t} after {self.times[-1]}")
        self.times.append(float(t))
        self.values.append(float(x))
        j = len(self.times) - 1
        if j == 0:
            self.breaks.append(float(t))
            return
        counts = _insert_counts(self.m, j)[j - 1]
        lo, hi = self.times[j - 1], self.times[j]
        for q in range(1, counts + 1):
            self.breaks.append(lo + (hi - lo) * q / (counts + 1))
        self.breaks.append(float(hi))
        self.pos.append(len(self.breaks) - 1)

    def close(self):
        if len(self.times) < 2 * self.m:
            raise ValueError(f"need at least {2 * self.m} samples, got {len(self.times)}")
        self.closed = True

    @property
    def n(self):
        return len(self.times) - 1

    def tknot(self, i):
        """Data knot sequence with m-fold stacked ends (0-based)."""
        m = self.m
        j = i - (m - 1)
        if j <= 0:
            return self.times[0]
        if j >= self.n:
            if j > self.n and not self.closed:
                raise IndexError("right end not available before close")
            return self.times[min(j, self.n)]
        return self.times[j]

    def sknot(self, i):
        """Refined knot sequence with m-fold stacked ends (0-based)."""
        m = self.m
        q = i - (m - 1)
        last = len(self.breaks) - 1
        if q <= 0:
            return self.breaks[0]
        if q >= last:
            if q > last and not self.closed:
                raise IndexError("right end not available before close")
            return self.breaks[min(q, last)]
        return self.breaks[q]

    def n_scoeffs(self):
        return len(self.breaks) + self.m - 2

    # -- quasi-interpolation rows ---------------------------------------
    def _row_sites(self, j):
        """Data-site window for B-spline row j (0-based over tknots)."""
        m, n = self.m, self.n
        u = j - (m - 1)
        lo = min(max(u, 0), n - m + 1)
        if lo < 0:
            raise ValueError("not enough data for boundary rows")
        return lo

    def lambda_coeff(self, j):
        """Quasi-interpolation coefficient for B-spline row j."""
        if j in self._lam:
            return self._lam[j]
        m = self.m
        lo = self._row_sites(j)
        sites = np.array(self.times[lo : lo + m])
        inner = np.array([self.tknot(i) for i in range(j + 1, j + m)])
        w = _dual_weights(sites, inner, m)
        self._qrow[j] = w
        lam = float(np.dot(w, self.values[lo : lo + m]))
        self._lam[j] = lam
        return lam

    def quasi_value(self, t):
        """Quasi-interpolant evaluated at ``t``."""
        m = self.m
        span = self._t_span_of(t)
        total = 0.0
        for j in range(span - m + 1, span + 1):
            v = self._bspline_t(m, j, t)
            if v != 0.0:
                total += self.lambda_coeff(j) * v
        return total

    def _bspline_t(self, m, j, t):
        kn = np.array([self.tknot(i) for i in range(j, j + m + 1)])
        return _local_bspline(kn, m, t, closed_right=self.closed and t >= self.times[-1])

    def _bspline_s(self, kappa, t):
        m = self.m
        kn = np.array([self.sknot(i) for i in range(kappa, kappa + m + 1)])
        return _local_bspline(kn, m, t, closed_right=self.closed and t >= self.times[-1])

    # -- final coefficients ---------------------------------------------
    def kappa_of(self, j):
        """S-basis index of the local interpolation bump at data index j."""
        m = self.m
        if j == 0:
            return 0
        if self.closed and j == self.n:
            return self.n_scoeffs() - 1
        return m - 1 + self.pos[j - 1]

    def data_index_at_kappa(self, kappa):
        """Data index whose interpolation bump sits at ``kappa``, if any."""
        if kappa == 0:
            return 0
        if self.closed and kappa == self.n_scoeffs() - 1:
            return self.n
        q = kappa - (self.m - 1)
        lo = int(np.searchsorted(self.pos, q))
        if 0 <= lo < len(self.pos) and self.pos[lo] == q:
            j = lo + 1
            if 1 <= j <= self.n - 1:
                return j
        return None

    def _t_span_of(self, x):
        """Largest j with tknot(j) <= x among nonempty spans."""
        m, n = self.m, self.n
        # data span index d: times[d] <= x < times[d+1]
        d = int(np.searchsorted(self.times, x, side="right")) - 1
        d = min(max(d, 0), n - 1)
        return d + (m - 1)

    def _s_coefficient(self, kappa):
        """Final spline coefficient for S-basis index ``kappa``.

        Oslo (discrete B-spline) combination of the quasi-interpolation
        coefficients, plus the local interpolation correction when a
        data point's bump lives at this index.
        """
        m = self.m
        sk = self.sknot(kappa)
        mu = self._t_span_of(sk)
        alpha = {mu: 1.0}
        for r in range(1, m):
            skr = self.sknot(kappa + r)
            nxt = {}
            for u in range(mu - r, mu + 1):
                total = 0.0
                a_u = alpha.get(u, 0.0)
                if a_u != 0.0:
                    den = self.tknot(u + r) - self.tknot(u)
                    if den > 0.0:
                        total += (skr - self.tknot(u)) / den * a_u
                a_u1 = alpha.get(u + 1, 0.0)
                if a_u1 != 0.0:
                    den = self.tknot(u + r + 1) - self.tknot(u + 1)
                    if den > 0.0:
                        total += (self.tknot(u + r + 1) - skr) / den * a_u1
                if total != 0.0:
                    nxt[u] = total
            alpha = nxt
        coeff = 0.0
        for u, w in alpha.items():
            coeff += w * self.lambda_coeff(u)
        j = self.data_index_at_kappa(kappa)
        if j is not None:
            tj = self.times[j]
            norm = self._bspline_s(kappa, tj)
            if norm == 0.0:
                raise ValueError("zero normalizer for local interpolation basis")
            err = self.values[j] - self.quasi_value(tj)
            coeff += err / norm
        return coeff

    def committable_upto(self):
        """Smallest kappa not yet final (coefficients below it never change).

        A coefficient is safe once every quasi-interpolation row it
        touches is clear of the provisional right boundary, a lag of
        about m+1 samples behind the newest data point.
        """
        if self.closed:
            return self.n_scoeffs()
        m, n = self.m, self.n
        if n < 2 * m:
            return 0
        return m - 1 + self.pos[n - m]


def _local_bspline(kn, m, t, closed_right=False):
    """Order-m B-spline on the local knot window ``kn`` (len m+1)."""
    if t < kn[0] or t > kn[m]:
        return 0.0
    vals = np.zeros(m)
    for j in range(m):
        lo, hi = kn[j], kn[j + 1]
        if lo <= t < hi or (closed_right and t == hi and lo < hi):
            vals[j] = 1.0
    for r in range(2, m + 1):
        for j in range(m - r + 1):
            d1 = kn[j + r - 1] - kn[j]
            d2 = kn[j + r] - kn[j + 1]
            acc = 0.0
            if d1 > 0.0:
                acc += (t - kn[j]) / d1 * vals[j]
            if d2 > 0.0:
                acc += (kn[j + r] - t) / d2 * vals[j + 1]
            vals[j] = acc
    return float(vals[0])


@dataclass(frozen=True)
class BlendingModel:
    """Precomputed blending structures for a fixed data grid."""

    m: int
    times: np.ndarray
    breaks: np.ndarray
    positions: np.ndarray

    @classmethod
    def build(cls, times, m):
        times = np.asarray(times, dtype=float)
        return cls(
            m=m,
            times=times,
            breaks=refine_knots(times, m),
            positions=np.array(_data_positions(m, len(times))),
        )

    def stacked_knots(self):
        m = self.m
        return np.concatenate(
            [np.full(m - 1, self.breaks[0]), self.breaks, np.full(m - 1, self.breaks[-1])]
        )

    def bump_index(self, j):
        """S-basis index of the completely local basis bump at data index j."""
        if j == 0:
            return 0
        if j == len(self.times) - 1:
            return len(self.breaks) + self.m - 3
        return self.m - 1 + int(self.positions[j - 1])


def local_basis_eval(model, j, t):
    """Completely local interpolation basis L_j at ``t``.

    Normalized B-spline on the refined knots with support
    [t_{j-1}, t_{j+1}] and L_j(t_j) = 1.
    """
    knots = model.stacked_knots()
    kappa = model.bump_index(j)
    tj = model.times[j]
    norm = eval_bspline(knots, model.m, kappa, tj)
    if norm == 0.0:
        raise ValueError(f"zero normalizer at data index {j}")
    return eval_bspline(knots, model.m, kappa, t) / norm


def _run_engine(times, values, m):
    eng = _Engine(m)
    for t, x in zip(times, values):
        eng.append(t, x)
    eng.close()
    return eng


def _curve_from_engine(eng, coeffs):
    m = eng.m
    knots = np.concatenate(
        [np.full(m - 1, eng.breaks[0]), np.array(eng.breaks), np.full(m - 1, eng.breaks[-1])]
    )
    return SplineCurve(order=m, knots=knots, coeffs=np.asarray(coeffs))


def blend_interpolate(times, values, m):
    """Interpolating, polynomial-preserving spline through irregular samples.

    Returns a SplineCurve of order ``m`` on the refined, end-clamped
    knot sequence with f(t_j) = x_j; polynomial data of degree < m is
    reproduced everywhere.  Needs at least 2m samples.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ValueError("times and values must be 1-d arrays of equal length")
    if len(times) < 2 * m:
        raise ValueError(f"need at least {2 * m} samples for order {m}, got {len(times)}")
    eng = _run_engine(times, values, m)
    coeffs = [eng._s_coefficient(k) for k in range(eng.n_scoeffs())]
    return _curve_from_engine(eng, coeffs)


class BlendingStream:
    """Streaming blending interpolation with a fixed commit lag.

    ``push`` ingests one sample and returns the newly committed
    (index, coefficient) pairs; committed values are never revised and
    equal the batch computation exactly.  ``close`` finishes the tail
    and returns the full SplineCurve.
    """

    def __init__(self, m):
        self._eng = _Engine(m)
        self._committed = []

    @property
    def order(self):
        return self._eng.m

    @property
    def committed(self):
        return list(self._committed)

    def push(self, t, x):
        self._eng.append(t, x)
        fresh = []
        upto = self._eng.committable_upto()
        while len(self._committed) < upto:
            k = len(self._committed)
            c = self._eng._s_coefficient(k)
            self._committed.append(c)
            fresh.append((k, c))
        return fresh

    def close(self):
        self._eng.close()
        total = self._eng.n_scoeffs()
        while len(self._committed) < total:
            self._committed.append(self._eng._s_coefficient(len(self._committed)))
        return _curve_from_engine(self._eng, self._committed)
