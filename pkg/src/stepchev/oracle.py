"""Ground truth for the certificates: exact binomial tails and a numerical
minimax fit on a union of segments.

The minimax fit is Lawson's algorithm: repeatedly solve a weighted least
squares problem and multiply the weights by the residual magnitudes. It
needs no alternation structure, which on a union of segments is awkward to
set up for an exchange method. For any probability weights ``w`` the
weighted least-squares residual ``sqrt(sum w r^2)`` is a lower bound on the
discrete minimax error, so every iteration brackets the optimum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import gammaln, xlog1py, xlogy

from .errors import PreconditionError, SandwichViolation
from .intervals import StepFunction
from .poly import GridSpec, Polynomial, sup_error, sup_norm

ORACLE_DEGREE_CAP = 64
ORACLE_FLOOR = 1e-12
"""Relative to ``max|y_i|``: below this the double-precision least-squares
residuals stagnate, so the oracle no longer estimates ``E_n``."""


# -- binomial tails -----------------------------------------------------------

def _exact_tail(n: int, x: Fraction, k: int, side: str) -> Fraction:
    rng = range(0, k + 1) if side == "lower" else range(k, n + 1)
    return sum((math.comb(n, j) * x**j * (1 - x) ** (n - j) for j in rng), Fraction(0))


def exact_binomial_tail(n: int, x, k: int, side: str = "lower"):
    """``P(xi <= k)`` (``side="lower"``) or ``P(xi >= k)`` for ``xi ~ Bin(n, x)``.

    A :class:`~fractions.Fraction` ``x`` gives an exact rational result.
    Floats are summed term by term in log space with ``math.fsum``.
    """
    if side not in ("lower", "upper"):
        raise PreconditionError(f"side must be 'lower' or 'upper', got {side!r}")
    if not (0 <= k <= n):
        raise PreconditionError(f"need 0 <= k <= n, got k={k}, n={n}")
    if n > 10_000:
        raise PreconditionError("exact tails are limited to n <= 10^4")
    if not (0 <= x <= 1):
        raise PreconditionError(f"x must lie in [0, 1], got {x}")
    if isinstance(x, Fraction):
        return _exact_tail(n, x, k, side)
    x = float(x)
    j = np.arange(k + 1) if side == "lower" else np.arange(k, n + 1)
    jf = j.astype(float)
    logp = (
        gammaln(n + 1.0) - gammaln(jf + 1.0) - gammaln(n - jf + 1.0)
        + xlogy(jf, x) + xlog1py(n - jf, -x)
    )
    return min(1.0, math.fsum(np.exp(logp)))


# -- minimax ------------------------------------------------------------------

@dataclass
class OracleResult:
    best_error: float
    polynomial: Polynomial
    iterations: int
    converged: bool
    duality_gap_estimate: float
    lower_bound: float = 0.0
    degree: int = 0
    bounded: bool = False

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "bounded": self.bounded,
            "best_error": self.best_error,
            "lower_bound": self.lower_bound,
            "iterations": self.iterations,
            "converged": self.converged,
            "duality_gap_estimate": self.duality_gap_estimate,
            "polynomial": self.polynomial.to_dict(),
        }

    def csv_row(self) -> list:
        return [self.degree, f"{self.best_error:.17g}", self.converged]


def oracle_grid(f: StepFunction, degree: int, grid: GridSpec | None = None, factor: int = 1):
    """Grid over each segment with at least ``8 (degree + 1)`` points."""
    if grid is None:
        grid = GridSpec(points_per_interval=max(8 * (degree + 1), 64), refine=False)
    xs, ys = [], []
    for iv, y in zip(f.system, f.values):
        if iv.length == 0:
            pts = np.array([iv.lo])
        else:
            n = grid.count(degree) * factor
            pts = GridSpec(points_per_interval=n, distribution=grid.distribution).points(iv, degree)
        xs.append(pts)
        ys.append(np.full(pts.size, y))
    return np.concatenate(xs), np.concatenate(ys)


def _solve(V, f, w):
    sw = np.sqrt(w)
    A = V * sw[:, None]
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    c, *_ = np.linalg.lstsq(A / norms, f * sw, rcond=None)
    return c / norms


def minimax_fit(
    f: StepFunction,
    degree: int,
    bounded: bool = False,
    grid: GridSpec | None = None,
    max_iter: int = 500,
    damping: float = 0.5,
    tol: float = 1e-9,
) -> OracleResult:
    """Estimate ``min_P max_K |f - P|`` over polynomials of degree ``degree``.

    With ``bounded=True`` the polynomial must also satisfy ``|P| <= max|y_i|``
    on the convex hull of ``K``. Hull rows enter the least-squares problem
    with targets clipped to the bound; their weights double whenever the
    bound is violated there.
    """
    if degree < 0 or degree > ORACLE_DEGREE_CAP:
        raise PreconditionError(f"oracle degree must lie in [0, {ORACLE_DEGREE_CAP}]")
    hull = f.system.hull
    ref = (hull.lo, hull.hi) if hull.length > 0 else (hull.lo - 1.0, hull.hi + 1.0)
    M = f.sup

    if len(set(f.values)) == 1:
        p = Polynomial.constant(f.values[0], ref)
        return OracleResult(0.0, p, 0, True, 0.0, 0.0, degree, bounded)

    x, y = oracle_grid(f, degree, grid)
    lo, hi = ref
    to_t = lambda v: (2.0 * v - (lo + hi)) / (hi - lo)
    V = C.chebvander(to_t(x), degree)
    if np.linalg.cond(V) > 1e12:
        warnings.warn("oracle least-squares system is ill-conditioned", RuntimeWarning)
    N = x.size

    if bounded:
        xh = GridSpec(points_per_interval=max(16 * (degree + 1), 128)).points(hull, degree)
        Vh = C.chebvander(to_t(xh), degree)
        wh = np.zeros(xh.size)
        hull_base = 1.0 / N

    w = np.full(N, 1.0 / N)
    best_err, best_c, best_lower = math.inf, None, 0.0
    prev_err = math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        if bounded:
            ph = Vh @ best_c if best_c is not None else np.zeros(xh.size)
            A = np.vstack([V, Vh])
            rhs = np.concatenate([y, np.clip(ph, -M, M)])
            c = _solve(A, rhs, np.concatenate([w, wh]))
        else:
            c = _solve(V, y, w)
        r = y - V @ c
        absr = np.abs(r)
        err = float(absr.max())
        lower = math.sqrt(float(np.dot(w, r * r)) / w.sum())
        feasible = True
        if bounded:
            over = np.abs(Vh @ c) - M
            violated = over > 1e-12 * max(M, 1.0)
            feasible = not violated.any()
            wh = np.where(violated, np.maximum(2.0 * wh, hull_base), wh)
            if not feasible:
                # pull the iterate back inside the bound; keeps a usable candidate
                scale = M / (M + over.max())
                cs = c * scale
                es = float(np.abs(y - V @ cs).max())
                if es < best_err:
                    best_err, best_c = es, cs
        if feasible and err < best_err:
            best_err, best_c = err, c
        if not bounded:
            best_lower = max(best_lower, lower)
        if abs(prev_err - err) <= tol * max(err, 1e-300) and feasible:
            converged = True
            break
        prev_err = err
        if err == 0.0:
            converged = True
            break
        # damped Lawson update
        step = w * absr
        step /= step.sum()
        w = (1.0 - damping) * w + damping * step
        w /= w.sum()

    poly = Polynomial(best_c, ref)
    if bounded:
        # final feasibility on a dense refined hull grid
        norm = sup_norm(poly, hull if hull.length > 0 else ref)
        if norm > M:
            poly = poly.scaled(M / norm)
    xf, yf = oracle_grid(f, degree, grid, factor=4)
    fine = float(np.abs(yf - poly(xf)).max())
    gap = (fine - best_err) / best_err if best_err > 0 else 0.0
    return OracleResult(fine, poly, it, converged, gap, best_lower, degree, bounded)


# -- sandwich -----------------------------------------------------------------

@dataclass
class SandwichReport:
    oracle: float | None
    measured: float
    certificate: float
    hull_norm: float
    degree: int
    oracle_lower: float | None = None
    scale: float = 1.0

    @property
    def resolved(self) -> bool:
        """Whether the oracle is above its noise floor, so the lower leg means something."""
        return self.oracle is not None and self.oracle > ORACLE_FLOOR * self.scale

    @property
    def ok(self) -> bool:
        """Upper leg against the certificate; lower leg against the oracle's
        weighted least-squares lower bound, which is rigorous for the grid
        (its ``best_error`` only brackets the optimum from above)."""
        upper = self.measured <= self.certificate + 1e-12
        floor = self.oracle_lower if self.oracle_lower is not None else self.oracle
        lower = not self.resolved or floor <= self.measured
        return upper and lower

    def to_dict(self) -> dict:
        return dict(vars(self), ok=self.ok, resolved=self.resolved)


def sandwich(f: StepFunction, construction, grid: GridSpec | None = None, raise_on_fail=True):
    """Check ``oracle <= measured <= certificate`` for ``(poly, certificate)``.

    The oracle leg is skipped above the oracle degree cap.
    """
    poly, cert = construction[0], construction[1]
    report = sup_error(poly, f) if grid is None else sup_error(poly, f, grid)
    oracle = lower = None
    if poly.degree <= ORACLE_DEGREE_CAP:
        res = minimax_fit(f, poly.degree)
        oracle, lower = res.best_error, res.lower_bound
    out = SandwichReport(
        oracle, report.global_error, cert.value, report.hull_norm, poly.degree, lower, f.sup
    )
    if raise_on_fail and not out.ok:
        raise SandwichViolation(oracle, report.global_error, cert.value)
    return out
