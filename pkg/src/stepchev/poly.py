"""Polynomials in a Chebyshev basis anchored to a reference interval.

A :class:`Polynomial` stores coefficients ``c_k`` of ``sum_k c_k T_k(t)``
where ``t`` is the affine image of ``x`` from ``ref`` onto ``[-1, 1]``.
Evaluation uses Clenshaw's recurrence (``numpy.polynomial.chebyshev``), so
degrees in the thousands stay accurate on and near ``ref``.

Conversions between representations go through :func:`from_samples`, which
interpolates at ``degree + 1`` Chebyshev points of the first kind. For a
target that is itself a polynomial of that degree the result is exact up to
rounding, which is how compositions and the Bernstein and Newton
constructions are brought into this basis.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct

from .errors import DegreeOverflowError
from .intervals import AffineMap, Interval, StepFunction

DEGREE_CAP = 4096
TRIM_TOL = 1e-300
_CHUNK = 65536


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("STEPCHEV_THREADS", "1")))
    except ValueError:
        return 1


def _as_ref(ref) -> Interval:
    if isinstance(ref, Interval):
        return ref
    lo, hi = ref
    return Interval(lo, hi)


class Polynomial:
    """Chebyshev series on ``ref``; ``degree == len(coeffs) - 1``."""

    def __init__(self, coeffs, ref=(-1.0, 1.0)):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        # drop trailing coefficients that cannot affect any evaluation
        n = c.size
        while n > 1 and abs(c[n - 1]) < TRIM_TOL:
            n -= 1
        c = c[:n]
        c.flags.writeable = False
        self.coeffs = c
        self.ref = _as_ref(ref)
        if self.ref.length <= 0:
            raise ValueError("reference interval must have positive length")

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def _t(self, x):
        lo, hi = self.ref.lo, self.ref.hi
        return (2.0 * x - (lo + hi)) / (hi - lo)

    def _eval_array(self, x: np.ndarray) -> np.ndarray:
        threads = _threads()
        if threads == 1 or x.size <= _CHUNK:
            return C.chebval(self._t(x), self.coeffs)
        chunks = np.array_split(x, math.ceil(x.size / _CHUNK))
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda xs: C.chebval(self._t(xs), self.coeffs), chunks))
        return np.concatenate(parts)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self._eval_array(arr.ravel()).reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    def deviation(self, x, c: float):
        """``p(x) - c``. Subclasses override this when they can do better
        than subtracting two nearly equal floats."""
        return np.asarray(self(x)) - c

    def pullback(self, amap: AffineMap) -> "Polynomial":
        """The polynomial ``x -> self(amap(x))``; exact, no refit."""
        inv = amap.inverse()
        a, b = inv(self.ref.lo), inv(self.ref.hi)
        c = self.coeffs
        if amap.scale < 0:
            c = c * (-1.0) ** np.arange(c.size)
        return Polynomial(c, (min(a, b), max(a, b)))

    def scaled(self, factor: float, offset: float = 0.0) -> "Polynomial":
        """``factor * p + offset``."""
        c = factor * self.coeffs
        c[0] += offset
        return Polynomial(c, self.ref)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self.scaled(1.0, float(other))
        if other.ref != self.ref:
            other = from_samples(other, other.degree, self.ref)
        n = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(n)
        c[: self.coeffs.size] += self.coeffs
        c[: other.coeffs.size] += other.coeffs
        return Polynomial(c, self.ref)

    def to_dict(self) -> dict:
        return {"ref": [self.ref.lo, self.ref.hi], "coeffs": [float(v) for v in self.coeffs]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "Polynomial":
        return cls(obj["coeffs"], tuple(obj["ref"]))

    @classmethod
    def from_json(cls, text: str) -> "Polynomial":
        return cls.from_dict(json.loads(text))

    @classmethod
    def constant(cls, value: float, ref=(-1.0, 1.0)) -> "Polynomial":
        return cls([float(value)], ref)

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, ref=[{self.ref.lo}, {self.ref.hi}])"


def evaluate(p: Polynomial, x):
    return p(x)


def chebyshev_nodes(n: int, ref=(-1.0, 1.0)) -> np.ndarray:
    """``n`` first-kind Chebyshev points mapped onto ``ref`` (descending)."""
    ref = _as_ref(ref)
    t = np.cos(np.pi * (2 * np.arange(n) + 1) / (2 * n))
    return 0.5 * (ref.lo + ref.hi) + 0.5 * (ref.hi - ref.lo) * t


def _call_vectorized(f, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(v)) for v in x])


def from_samples(f, degree: int, ref=(-1.0, 1.0)) -> Polynomial:
    """Interpolate ``f`` at ``degree + 1`` Chebyshev points on ``ref``."""
    ref = _as_ref(ref)
    n = degree + 1
    x = chebyshev_nodes(n, ref)
    y = _call_vectorized(f, x)
    c = dct(y, type=2) / n
    c[0] *= 0.5
    return Polynomial(c, ref)


def compose(outer: Polynomial, inner: Polynomial, cap: int = DEGREE_CAP) -> Polynomial:
    """``x -> outer(inner(x))`` on ``inner.ref``, refit in the stable basis."""
    degree = outer.degree * inner.degree
    if degree > cap:
        raise DegreeOverflowError(
            f"composition degree {outer.degree}*{inner.degree}={degree} exceeds cap {cap}"
        )
    if inner.degree == 0:
        return Polynomial.constant(outer(float(inner.coeffs[0])), inner.ref)
    return from_samples(lambda x: outer(inner(x)), degree, inner.ref)


def affine_pullback(p: Polynomial, amap: AffineMap) -> Polynomial:
    return p.pullback(amap)


# -- measurement --------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Verification grid. ``points_per_interval=None`` picks the default
    ``max(32 * (degree + 1), 257)``, scaled by ``multiplier``."""

    points_per_interval: int | None = None
    distribution: str = "clustered"
    refine: bool = True
    multiplier: float = 1.0

    def __post_init__(self):
        if self.points_per_interval is not None and self.points_per_interval < 2:
            raise ValueError("points_per_interval must be >= 2")
        if self.distribution not in ("clustered", "uniform"):
            raise ValueError(f"unknown grid distribution {self.distribution!r}")
        if self.multiplier <= 0:
            raise ValueError("grid multiplier must be positive")

    def count(self, degree: int) -> int:
        base = self.points_per_interval or max(32 * (degree + 1), 257)
        return max(2, int(math.ceil(base * self.multiplier)))

    def points(self, iv: Interval, degree: int) -> np.ndarray:
        if iv.length == 0:
            return np.array([iv.lo])
        n = self.count(degree)
        if self.distribution == "uniform":
            x = np.linspace(iv.lo, iv.hi, n)
        else:
            u = 0.5 * (1.0 - np.cos(np.pi * np.arange(n) / (n - 1)))
            x = iv.lo + iv.length * u
        x[0], x[-1] = iv.lo, iv.hi
        return x


DEFAULT_GRID = GridSpec()

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(g, a: float, b: float, iters: int = 40) -> float:
    """Best value of scalar ``g`` seen by a golden-section search on [a, b]."""
    best = max(g(a), g(b))
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        best = max(best, gc, gd)
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INV_PHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INV_PHI * (b - a)
            gd = g(d)
    return max(best, gc, gd)


def _sup_on(func, x: np.ndarray, refine: bool) -> float:
    """max |func| over grid ``x``, optionally polished around the argmax."""
    vals = np.abs(np.asarray(func(x), dtype=float))
    if vals.size == 0:
        return 0.0
    j = int(np.argmax(vals))
    best = float(vals[j])
    if refine and x.size > 1:
        a = x[max(j - 1, 0)]
        b = x[min(j + 1, x.size - 1)]
        if b > a:
            best = max(best, _golden_max(lambda t: abs(float(func(np.array([t]))[0])), a, b))
    return best


def sup_norm(p: Polynomial, on, grid: GridSpec = DEFAULT_GRID) -> float:
    iv = _as_ref(on)
    x = grid.points(iv, p.degree)
    return _sup_on(lambda t: p.deviation(t, 0.0), x, grid.refine)


@dataclass
class ErrorReport:
    per_interval_error: list
    global_error: float
    hull_norm: float
    grid_size: int
    degree: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def csv_row(self, certificate: float | None = None) -> str:
        buf = io.StringIO()
        cert = "" if certificate is None else f"{certificate:.17g}"
        csv.writer(buf, lineterminator="\n").writerow(
            [self.degree, f"{self.global_error:.17g}", f"{self.hull_norm:.17g}", cert]
        )
        return buf.getvalue()


def sup_error(p: Polynomial, f: StepFunction, grid: GridSpec = DEFAULT_GRID) -> ErrorReport:
    """Measured ``max |p - y_i|`` on each segment and ``max |p|`` on the hull.

    Grid maxima are lower bounds on the true sup-norms; ``refine`` polishes
    each one with a golden-section search between neighbouring grid points.
    """
    per = []
    size = 0
    for iv, y in zip(f.system, f.values):
        x = grid.points(iv, p.degree)
        size += x.size
        per.append(_sup_on(lambda t, y=y: p.deviation(t, y), x, grid.refine))
    hull = f.system.hull
    if hull.length > 0:
        xh = grid.points(hull, p.degree)
        size += xh.size
        hull_norm = _sup_on(lambda t: p.deviation(t, 0.0), xh, grid.refine)
    else:
        hull_norm = abs(float(p.deviation(np.array([hull.lo]), 0.0)[0]))
    return ErrorReport(per, max(per), float(hull_norm), size, p.degree)
