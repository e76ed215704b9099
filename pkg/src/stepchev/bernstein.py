"""Bernstein-operator approximants and their Chernoff-type certificates.

``B_n(f, x) = sum_k C(n,k) f(k/n) x^k (1-x)^{n-k}`` is the expectation of
``f(xi/n)`` for ``xi ~ Binomial(n, x)``. Because the weights are a probability
distribution, ``B_n f - c = B_n (f - c)``: the deviation from a constant can be
summed directly from the recentred samples without cancellation. That is what
lets measured errors be compared with certificates far below machine epsilon.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from .certificates import (
    BoundCertificate,
    Formula,
    eps_01_bound,
    eps_pm1_bound,
    h_bound,
    two_segments_bound,
)
from .errors import PreconditionError
from .intervals import AffineMap, Interval, IntervalSystem, ValueSet, inflate
from .poly import Polynomial, from_samples

_BLOCK = 1 << 22


def binomial_weights(n: int, t: np.ndarray) -> np.ndarray:
    """Matrix ``W[j, k] = C(n,k) t_j^k (1-t_j)^{n-k}`` built in log space."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    k = np.arange(n + 1, dtype=float)
    logc = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
    logw = logc[None, :] + xlogy(k[None, :], t[:, None]) + xlog1py(n - k[None, :], -t[:, None])
    return np.exp(logw)


def bernstein_sum(samples, t, shift: float = 0.0) -> np.ndarray:
    """``sum_k (samples[k] - shift) * w_k(t)`` for ``t`` in [0, 1].

    Positive and negative contributions are accumulated separately so that
    tiny results keep full relative accuracy.
    """
    s = np.asarray(samples, dtype=float) - shift
    n = s.size - 1
    t = np.atleast_1d(np.asarray(t, dtype=float))
    pos, neg = np.where(s > 0, s, 0.0), np.where(s < 0, -s, 0.0)
    rows = max(1, _BLOCK // (n + 1))
    out = np.empty(t.size)
    for start in range(0, t.size, rows):
        w = binomial_weights(n, t[start:start + rows])
        out[start:start + rows] = w @ pos - w @ neg
    return out


class BernsteinPolynomial(Polynomial):
    """``B_n f`` on ``ref`` (``ref`` plays the role of ``[0, 1]``).

    Keeps the samples ``f(k/n)`` next to the Chebyshev coefficients; inside
    ``ref`` deviations from constants are evaluated in the Bernstein form.
    """

    def __init__(self, samples, ref=(0.0, 1.0), coeffs=None):
        samples = np.asarray(samples, dtype=float).copy()
        samples.flags.writeable = False
        lo, hi = tuple(ref) if not isinstance(ref, Interval) else (ref.lo, ref.hi)
        if coeffs is None:
            n = samples.size - 1
            coeffs = from_samples(
                lambda x: bernstein_sum(samples, (x - lo) / (hi - lo)), n, (lo, hi)
            ).coeffs
        super().__init__(coeffs, (lo, hi))
        self.samples = samples

    @property
    def n(self) -> int:
        return self.samples.size - 1

    def _unit(self, x):
        return (np.asarray(x, dtype=float) - self.ref.lo) / self.ref.length

    def deviation(self, x, c: float):
        x = np.asarray(x, dtype=float)
        t = self._unit(x).ravel()
        inside = (t >= 0.0) & (t <= 1.0)
        out = np.empty(t.size)
        out[inside] = bernstein_sum(self.samples, t[inside], shift=c)
        if not inside.all():
            out[~inside] = np.asarray(self(x.ravel()[~inside])) - c
        return out.reshape(x.shape)

    def pullback(self, amap: AffineMap) -> "BernsteinPolynomial":
        base = Polynomial.pullback(self, amap)
        samples = self.samples[::-1] if amap.scale < 0 else self.samples
        return BernsteinPolynomial(samples, base.ref, coeffs=base.coeffs)

    def scaled(self, factor: float, offset: float = 0.0) -> "BernsteinPolynomial":
        base = Polynomial.scaled(self, factor, offset)
        return BernsteinPolynomial(factor * self.samples + offset, self.ref, coeffs=base.coeffs)

    def __repr__(self):
        return f"BernsteinPolynomial(n={self.n}, ref=[{self.ref.lo}, {self.ref.hi}])"


def _check_prob(name, v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        raise PreconditionError(f"{name} must be a number, got {v!r}")


def divergence(p: float, q: float) -> float:
    """Binary Kullback-Leibler divergence ``H(p||q)`` with ``0 ln 0 = 0``."""
    _check_prob("p", p)
    _check_prob("q", q)
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise PreconditionError(f"probabilities out of range: p={p}, q={q}")
    if p == q:
        return 0.0
    if q in (0.0, 1.0):
        return math.inf
    h = float(xlogy(p, p) - xlogy(p, q) + xlogy(1 - p, 1 - p) - xlog1py(1 - p, -q))
    return max(h, 0.0)


def chernoff_lower_tail(n: int, x: float, a: float) -> float:
    """``exp(-n H(a||x))`` bounding ``P(xi_{n,x} <= a n)`` for ``a < x``."""
    if not (0.0 < a < x < 1.0):
        raise PreconditionError(f"lower tail needs 0 < a < x < 1, got a={a}, x={x}")
    return math.exp(-n * divergence(a, x))


def chernoff_upper_tail(n: int, x: float, b: float) -> float:
    """``exp(-n H(b||x))`` bounding ``P(xi_{n,x} >= b n)`` for ``b > x``."""
    if not (0.0 < x < b < 1.0):
        raise PreconditionError(f"upper tail needs 0 < x < b < 1, got x={x}, b={b}")
    return math.exp(-n * divergence(b, x))


def statement_bound(n: int, x: float, a: float, b: float, M: float) -> float:
    """Pointwise bound ``2M(e^{-nH(a||x)} + e^{-nH(b||x)})`` for ``f`` constant on
    ``(a, b)``; ``a = 0`` or ``b = 1`` drops the corresponding term."""
    if not (0.0 <= a < b <= 1.0) or not (a < x < b or (a == 0.0 and x == 0.0)):
        raise PreconditionError(f"need 0 <= a < x < b <= 1, got a={a}, x={x}, b={b}")
    total = 0.0
    if a > 0.0:
        total += math.exp(-n * divergence(a, x))
    if b < 1.0:
        total += math.exp(-n * divergence(b, x))
    return 2.0 * M * total


def bernstein_apply(f, n: int) -> BernsteinPolynomial:
    """``B_n f`` as a polynomial on ``[0, 1]``."""
    if n < 1:
        raise PreconditionError("Bernstein degree must be >= 1")
    k = np.arange(n + 1) / n
    try:
        samples = np.asarray(f(k), dtype=float)
        if samples.shape != k.shape:
            raise ValueError
    except (TypeError, ValueError):
        samples = np.array([float(f(v)) for v in k])
    return BernsteinPolynomial(samples, (0.0, 1.0))


def _step_samples(y0: float, y1: float, n: int) -> np.ndarray:
    k = np.arange(n + 1)
    out = np.where(2 * k < n, y0, y1).astype(float)
    if n % 2 == 0:
        out[n // 2] = 0.5 * (y0 + y1)
    return out


def _two_segment(h: float, y0: float, y1: float, n: int):
    poly = BernsteinPolynomial(_step_samples(y0, y1, n), (0.0, 1.0))
    amp = 0.5 * abs(y1 - y0)
    cert = BoundCertificate(
        Formula.H_BOUND, amp * h_bound(h, n), {"h": h, "n": n, "y0": y0, "y1": y1}
    )
    return poly, cert


def two_segment_approx(h: float, y0: float, y1: float, n: int):
    """``B_n`` of the step ``y0 -> y1`` at 1/2, certified on ``[0,h] u [1-h,1]``.

    The certificate is ``|y1 - y0|/2 * 2(4h(1-h))^{n/2}``; for ``y = (-1, 1)``
    this is exactly ``2(4h(1-h))^{n/2}``.
    """
    if not (0.0 < h < 0.5):
        raise PreconditionError(f"h must lie in (0, 1/2), got {h}")
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return _two_segment(h, float(y0), float(y1), n)


def equalize_two(system: IntervalSystem) -> IntervalSystem:
    """Enlarge the shorter of two segments outward to the longer one's length,
    keeping the gap, so the diameter becomes ``sigma + 4 delta``."""
    left, right = system.intervals
    width = max(left.length, right.length)
    if left.length < width:
        left = Interval(left.hi - width, left.hi)
    elif right.length < width:
        right = Interval(right.lo, right.lo + width)
    return IntervalSystem([left, right])


def equal_two_segment(system: IntervalSystem, y, n: int):
    """Two-segment Bernstein construction on an arbitrary pair of segments."""
    if system.s != 2:
        raise PreconditionError(f"equal_two_segment needs exactly 2 segments, got {system.s}")
    if n < 1:
        raise PreconditionError("n must be >= 1")
    y0, y1 = (float(v) for v in y)
    s, delta, sigma, _ = system.stats()
    eq = equalize_two(system)
    lo = eq.intervals[0].lo
    Dp = sigma + 4.0 * delta
    to_unit = AffineMap(1.0 / Dp, -lo / Dp)
    h = 2.0 * delta / Dp
    poly01, _ = _two_segment(h, y0, y1, n)
    amp = 0.5 * abs(y1 - y0)
    cert = BoundCertificate(
        Formula.TWO_SEG,
        amp * two_segments_bound(sigma, Dp, n),
        {"sigma": sigma, "delta": delta, "D": Dp, "h": h, "n": n},
    )
    return poly01.pullback(to_unit), cert


def eps_two(Y: ValueSet, delta: float, n: int):
    """Degree-``n`` polynomial sending each ``[y_i - delta, y_i + delta]`` close to ``y_i``."""
    if Y.s != 2:
        raise PreconditionError(f"eps_two needs a two-point value set, got {Y.s} points")
    system = inflate(Y, delta)
    y0, y1 = Y.points
    pm, _ = equal_two_segment(system, (-1.0, 1.0), n)
    half, mid = 0.5 * (y1 - y0), 0.5 * (y0 + y1)
    poly = pm.scaled(half, mid)
    if (y0, y1) == (-1.0, 1.0):
        value = eps_pm1_bound(delta, n)
    elif (y0, y1) == (0.0, 1.0):
        value = eps_01_bound(delta, n)
    else:
        sigma, D = (y1 - y0) - 2 * delta, (y1 - y0) + 2 * delta
        value = half * two_segments_bound(sigma, D, n)
    cert = BoundCertificate(Formula.EPS_TWO, value, {"delta": delta, "n": n, "y0": y0, "y1": y1})
    return poly, cert
