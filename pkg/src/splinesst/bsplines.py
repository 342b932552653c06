"""B-splines on arbitrary knot sequences.

Evaluation and exact derivatives via the two-term recurrences, exact
rational tables of cardinal B-splines at integers, B-spline inner
products (closed form on uniform knots, Gauss-Legendre otherwise), and
the symmetric-function coefficients that reproduce monomials in a
B-spline basis.

Conventions
-----------
A knot sequence is a nondecreasing 1-d array ``knots``; the order-``m``
B-spline with index ``k`` lives on ``knots[k:k+m+1]`` (0-based).  Basis
functions are right-continuous, except at the final knot of the
sequence where the left limit is used so that partition of unity holds
on the closed interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "KnotError",
    "SplineCurve",
    "CardinalTable",
    "validate_knots",
    "eval_bspline",
    "eval_bspline_derivative",
    "cardinal_bspline",
    "cardinal_integer_values",
    "inner_product",
    "marsden_coefficients",
    "eval_spline_curve",
]


class KnotError(ValueError):
    """Knot sequence violates an order/multiplicity requirement."""


def validate_knots(knots, m):
    """Check nondecreasing knots with multiplicity at most ``m``."""
    knots = np.asarray(knots, dtype=float)
    if knots.ndim != 1 or knots.size < m + 1:
        raise KnotError(f"need at least {m + 1} knots for order {m}")
    if np.any(np.diff(knots) < 0):
        raise KnotError("knots must be nondecreasing")
    if np.any(knots[m:] <= knots[:-m]):
        raise KnotError(f"a knot is repeated more than {m} times")
    return knots


def _check_index(knots, m, k):
    if m < 1:
        raise ValueError(f"order must be >= 1, got {m}")
    if not 0 <= k <= len(knots) - m - 1:
        raise IndexError(f"B-spline index {k} out of range for {len(knots)} knots, order {m}")


def eval_bspline(knots, m, k, t):
    """Value of the normalized B-spline N_{m,k} at scalar ``t``.

    Cox-de Boor recursion with the 0/0 := 0 convention for repeated
    knots.  Returns 0 outside ``[knots[k], knots[k+m]]``.
    """
    knots = np.asarray(knots, dtype=float)
    _check_index(knots, m, k)
    if knots[k + m] <= knots[k]:
        raise KnotError(f"knot multiplicity exceeds order at index {k}")
    if t < knots[k] or t > knots[k + m]:
        return 0.0
    last = knots[-1]
    vals = np.zeros(m)
    for j in range(m):
        lo, hi = knots[k + j], knots[k + j + 1]
        if lo <= t < hi or (t == hi == last and lo < hi):
            vals[j] = 1.0
    for r in range(2, m + 1):
        for j in range(m - r + 1):
            i = k + j
            d1 = knots[i + r - 1] - knots[i]
            d2 = knots[i + r] - knots[i + 1]
            acc = 0.0
            if d1 > 0.0:
                acc += (t - knots[i]) / d1 * vals[j]
            if d2 > 0.0:
                acc += (knots[i + r] - t) / d2 * vals[j + 1]
            vals[j] = acc
    return float(vals[0])


def eval_bspline_derivative(knots, m, k, t, r=1):
    """r-th derivative of N_{m,k} at ``t`` via the lower-order recurrence.

    Exact piecewise-polynomial differentiation; ``r`` must satisfy
    0 <= r <= m-1 (higher derivatives are distributional).
    """
    knots = np.asarray(knots, dtype=float)
    _check_index(knots, m, k)
    if r < 0 or r >= m:
        raise ValueError(f"derivative order {r} not in [0, {m - 1}]")
    if r == 0:
        return eval_bspline(knots, m, k, t)
    # d/dt N_{m,k} = (m-1) [ N_{m-1,k}/g1 - N_{m-1,k+1}/g2 ], dropped where a gap is 0
    g1 = knots[k + m - 1] - knots[k]
    g2 = knots[k + m] - knots[k + 1]
    out = 0.0
    if g1 > 0.0:
        out += (m - 1) / g1 * eval_bspline_derivative(knots, m - 1, k, t, r - 1)
    if g2 > 0.0:
        out -= (m - 1) / g2 * eval_bspline_derivative(knots, m - 1, k + 1, t, r - 1)
    return out


def cardinal_bspline(m, t):
    """Cardinal B-spline N_m on integer knots [0, m], vectorized in ``t``.

    Uses the weighted recurrence from the indicator of [0, 1).
    """
    t = np.asarray(t, dtype=float)
    # row[j] holds N_r(t - j) for the shifts needed by the next level
    rows = [((t - j >= 0.0) & (t - j < 1.0)).astype(float) for j in range(m)]
    for r in range(2, m + 1):
        nxt = []
        for j in range(m - r + 1):
            u = t - j
            nxt.append((u * rows[j] + (r - u) * rows[j + 1]) / (r - 1))
        rows = nxt
    return rows[0]


@dataclass(frozen=True)
class CardinalTable:
    """Exact values of the cardinal B-spline N_r at the integers 0..r."""

    order: int
    values: tuple  # Fractions, length order + 1

    def as_floats(self):
        return np.array([float(v) for v in self.values])


def cardinal_integer_values(r):
    """Exact rational N_r(v) for v = 0..r (generalized Pascal triangle)."""
    if r < 2:
        raise ValueError("order must be >= 2")
    # N_1 at integers: 1 at v=0 (right-continuous indicator), else 0
    vals = {0: Fraction(1)}
    for order in range(2, r + 1):
        nxt = {}
        for v in range(order + 1):
            acc = Fraction(v) * vals.get(v, Fraction(0))
            acc += Fraction(order - v) * vals.get(v - 1, Fraction(0))
            nxt[v] = acc / (order - 1)
        vals = nxt
    return CardinalTable(r, tuple(vals[v] for v in range(r + 1)))


def _gauss_legendre_cache():
    cache = {}

    def get(q):
        if q not in cache:
            cache[q] = np.polynomial.legendre.leggauss(q)
        return cache[q]

    return get


_leggauss = _gauss_legendre_cache()


def _quad_intervals(f, breaks, nodes):
    """Integrate ``f`` over consecutive intervals with fixed-node Gauss-Legendre."""
    x, w = _leggauss(nodes)
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        total += half * np.sum(w * f(mid + half * x))
    return total


def _uniform_aligned(knots, m, k, u):
    """Spacing if both supports sit on one uniform grid, else None."""
    lo, hi = min(k, u), max(k, u) + m
    seg = np.diff(knots[lo : hi + 1])
    if seg.size == 0 or seg[0] <= 0.0:
        return None
    if np.all(seg == seg[0]):
        return float(seg[0])
    return None


def inner_product(knots, m, k, u):
    """L2 inner product of N_{m,k} and N_{m,u} on a shared knot sequence.

    On a uniform aligned grid this is the exact convolution value
    ``h * N_{2m}(m - |u - k|)``; otherwise per-interval Gauss-Legendre
    with ``m`` nodes, exact for the degree 2m-2 integrand.
    """
    knots = np.asarray(knots, dtype=float)
    _check_index(knots, m, k)
    _check_index(knots, m, u)
    if abs(u - k) >= m:
        return 0.0
    h = _uniform_aligned(knots, m, k, u)
    if h is not None:
        table = cardinal_integer_values(2 * m)
        return h * float(table.values[m - abs(u - k)])
    lo, hi = max(k, u), min(k, u) + m
    breaks = np.unique(knots[lo : hi + 1])

    def f(x):
        return np.array(
            [eval_bspline(knots, m, k, xi) * eval_bspline(knots, m, u, xi) for xi in np.atleast_1d(x)]
        )

    return _quad_intervals(f, breaks, m)


def _elementary_symmetric(vals, l):
    """Elementary symmetric polynomial sigma_l of ``vals``."""
    e = np.zeros(l + 1)
    e[0] = 1.0
    for v in vals:
        for i in range(min(l, len(vals)), 0, -1):
            e[i] += v * e[i - 1]
    return e[l]


def marsden_coefficients(knots, m, l):
    """Coefficients c with x^l = sum_j c[j] N_{m,j}(x) on the knot interior.

    ``c[j] = sigma_l(knots[j+1:j+m]) / C(m-1, l)`` for every valid
    B-spline index j.
    """
    knots = np.asarray(knots, dtype=float)
    if not 0 <= l <= m - 1:
        raise ValueError(f"monomial degree {l} not in [0, {m - 1}]")
    count = len(knots) - m
    out = np.empty(count)
    binom = math.comb(m - 1, l)
    for j in range(count):
        out[j] = _elementary_symmetric(knots[j + 1 : j + m], l) / binom
    return out


@dataclass(frozen=True)
class SplineCurve:
    """Spline as order + knots + one coefficient per basis function."""

    order: int
    knots: np.ndarray
    coeffs: np.ndarray
    _oob: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        coeffs = np.asarray(self.coeffs, dtype=float)
        if len(coeffs) != len(knots) - self.order:
            raise ValueError(
                f"{len(coeffs)} coefficients inconsistent with {len(knots)} knots at order {self.order}"
            )
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def domain(self):
        return float(self.knots[0]), float(self.knots[-1])


def eval_spline_curve(curve, t, return_mask=False):
    """Evaluate a SplineCurve with de Boor's algorithm, vectorized in ``t``.

    Points outside the knot range evaluate to 0; pass ``return_mask``
    to also receive the in-range flags.
    """
    knots, coeffs, m = curve.knots, curve.coeffs, curve.order
    p = m - 1
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    tt = np.atleast_1d(t)
    out = np.zeros_like(tt)
    inside = (tt >= knots[0]) & (tt <= knots[-1])
    span = np.searchsorted(knots, tt, side="right") - 1
    # final knot: step back to the last nonempty span
    at_end = inside & (tt >= knots[-1])
    if np.any(at_end):
        span[at_end] = np.max(np.nonzero(np.diff(knots) > 0)[0])
    for idx in np.nonzero(inside)[0]:
        x, kspan = tt[idx], int(span[idx])
        if kspan < p or kspan >= len(coeffs):
            # spans with a partial basis (unclamped ends): direct sum
            out[idx] = sum(
                coeffs[j] * eval_bspline(knots, m, j, x)
                for j in range(max(0, kspan - p), min(kspan, len(coeffs) - 1) + 1)
            )
            continue
        d = coeffs[kspan - p : kspan + 1].copy()
        for r in range(1, p + 1):
            for j in range(p, r - 1, -1):
                den = knots[j + 1 + kspan - r] - knots[j + kspan - p]
                alpha = 0.0 if den == 0.0 else (x - knots[j + kspan - p]) / den
                d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j]
        out[idx] = d[p]
    if scalar:
        result = float(out[0])
        return (result, bool(inside[0])) if return_mask else result
    return (out, inside) if return_mask else out
