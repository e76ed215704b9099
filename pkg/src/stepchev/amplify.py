"""General-position constructions: a coarse base approximant of error at most
1/2, sharpened by composing with a Bernstein amplifier.

For a system normalized to ``[-1, 1]`` with sign values the base is a
polynomial fit to the piecewise linear continuous extension of the step
(slopes at most ``2/sigma``) at degree ``floor(4 pi / sigma)``. Once its error
against the extension is at most 1/4 it is shrunk by 4/5, which keeps it
inside ``[-1, 1]`` on the hull and within 1/2 of the values on ``K``. The
amplifier, ``B_m`` of the sign step on ``[-1, 1]``, then maps
``[-1, -1/2] u [1/2, 1]`` to within ``2(3/4)^{m/2}`` of ``-1`` and ``1``.

Values that are not signs are written as convex combinations of sign
patterns; the same combination of the per-pattern approximants inherits the
certificate.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .bernstein import equal_two_segment, eps_two, two_segment_approx
from .certificates import PIPELINE_RATE, BoundCertificate, Formula, eps_pm1_bound, h_bound, trivial
from .errors import ConstructionError, DegreeOverflowError, PreconditionError
from .intervals import AffineMap, StepFunction, ValueSet, inflate, normalize
from .newton import small_delta_for_system
from .poly import DEFAULT_GRID, DEGREE_CAP, ErrorReport, GridSpec, Polynomial, compose, from_samples, sup_error, sup_norm

BASE_TARGET = 0.25
BASE_SHRINK = 0.8
ESCALATION = 1.5
ESCALATION_CAP = 16


class JacksonBase(NamedTuple):
    poly: Polynomial
    degree: int
    base_error: float
    hull_norm: float
    fit_error: float


def linear_extension(f: StepFunction):
    """Continuous piecewise linear ``g`` equal to ``y_i`` on ``I_i``, linear across
    gaps and constant outside the hull."""
    knots, vals = [], []
    for iv, y in zip(f.system, f.values):
        knots += [iv.lo, iv.hi]
        vals += [y, y]
    knots, vals = np.array(knots), np.array(vals)
    return lambda x: np.interp(x, knots, vals)


def base_target_degree(sigma: float) -> int:
    """``floor(4 pi / sigma)`` for a system normalized to ``[-1, 1]``."""
    return max(1, int(math.floor(4.0 * math.pi / sigma)))


def _fit_error(p: Polynomial, g, f: StepFunction, degree: int) -> float:
    x = GridSpec(refine=False).points(f.system.hull, degree)
    knots = np.array([e for iv in f.system for e in (iv.lo, iv.hi)])
    x = np.union1d(x, knots)
    return float(np.abs(p(x) - g(x)).max())


def jackson_base(f: StepFunction, grid: GridSpec = DEFAULT_GRID) -> JacksonBase:
    """Base approximant with error <= 1/2 on ``K`` and ``|P| <= 1`` on ``[-1, 1]``.

    ``f`` must be normalized (hull ``[-1, 1]``) with values in ``{-1, 1}``.
    """
    hull = f.system.hull
    if abs(hull.lo + 1.0) > 1e-12 or abs(hull.hi - 1.0) > 1e-12:
        raise PreconditionError("jackson_base expects a system normalized to [-1, 1]")
    if any(abs(v) != 1.0 for v in f.values):
        raise PreconditionError("jackson_base expects values in {-1, 1}")
    if len(set(f.values)) == 1:
        p = Polynomial.constant(f.values[0])
        return JacksonBase(p, 0, 0.0, 1.0, 0.0)

    _, _, sigma, _ = f.system.stats()
    n0 = base_target_degree(sigma)
    if n0 > DEGREE_CAP:
        raise DegreeOverflowError(f"base degree {n0} exceeds cap {DEGREE_CAP}")
    g = linear_extension(f)
    degree, cap = n0, min(ESCALATION_CAP * n0, DEGREE_CAP)
    while True:
        p = from_samples(g, degree, (-1.0, 1.0))
        fit = _fit_error(p, g, f, degree)
        if fit <= BASE_TARGET:
            shrunk = p.scaled(BASE_SHRINK)
            hull_norm = sup_norm(shrunk, (-1.0, 1.0), grid)
            if hull_norm <= 1.0:
                break
        if degree >= cap:
            raise ConstructionError(
                f"base fit error {fit:.3g} > 1/4 at the degree cap {cap}"
            )
        degree = min(cap, int(math.ceil(ESCALATION * degree)))
    report = sup_error(shrunk, f, grid)
    return JacksonBase(shrunk, degree, report.global_error, hull_norm, fit)


def amplifier(m: int, eps: float = 0.5):
    """Bernstein sign amplifier on ``[-1, 1]``, certified on
    ``[-1, -1 + eps] u [1 - eps, 1]``."""
    if m < 1:
        raise PreconditionError("amplifier degree m must be >= 1")
    if not (0.0 < eps <= 0.5):
        raise PreconditionError(f"amplifier needs 0 < eps <= 1/2, got {eps}")
    p01, _ = two_segment_approx(eps / 2.0, -1.0, 1.0, m)
    poly = p01.pullback(AffineMap(0.5, 0.5))
    cert = BoundCertificate(Formula.H_BOUND, h_bound(eps / 2.0, m), {"eps": eps, "m": m})
    return poly, cert


def vertex_decomposition(values) -> list:
    """Write ``values`` in ``[-1, 1]^s`` as a convex combination of sign vectors.

    Uses ``y_i = E_t sign(y_i - t)`` for ``t`` uniform on ``[-1, 1]``.
    """
    y = np.asarray(values, dtype=float)
    if np.any(np.abs(y) > 1.0 + 1e-15):
        raise PreconditionError("vertex decomposition needs |y_i| <= 1")
    cuts = np.unique(np.concatenate([[-1.0, 1.0], np.clip(y, -1.0, 1.0)]))
    out = {}
    for a, b in zip(cuts[:-1], cuts[1:]):
        t = 0.5 * (a + b)
        v = tuple(1.0 if yi > t else -1.0 for yi in y)
        out[v] = out.get(v, 0.0) + 0.5 * (b - a)
    return [(w, v) for v, w in out.items() if w > 0]


@dataclass
class PipelineReport:
    base_degree: int
    base_error: float
    amplifier_degree: int
    total_degree: int
    certificate: BoundCertificate
    measured: ErrorReport
    polynomial: Polynomial = field(repr=False, default=None)
    notes: list = field(default_factory=list)
    base_certificate: float = 0.5

    def stages(self) -> list:
        return [
            ("base", self.base_degree, self.base_error, self.base_certificate),
            ("amplifier", self.amplifier_degree, None, self.certificate.params.get("amplifier_bound")),
            ("composed", self.total_degree, self.measured.global_error, self.certificate.value),
        ]

    def to_dict(self) -> dict:
        return {
            "base_degree": self.base_degree,
            "base_error": self.base_error,
            "amplifier_degree": self.amplifier_degree,
            "total_degree": self.total_degree,
            "certificate": self.certificate.to_dict(),
            "measured": self.measured.to_dict(),
            "base_certificate": self.base_certificate,
            "notes": list(self.notes),
            "polynomial": None if self.polynomial is None else self.polynomial.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["stage", "degree", "measured", "certificate"])
        for stage, deg, meas, cert in self.stages():
            fmt = lambda v: "" if v is None else f"{v:.17g}"
            w.writerow([stage, deg, fmt(meas), fmt(cert)])
        return buf.getvalue()


def _bases(fn: StepFunction, grid: GridSpec):
    """Sign-pattern decomposition of normalized ``fn`` with one base each."""
    M = fn.sup
    parts = vertex_decomposition([y / M for y in fn.values])
    bases = [(w, jackson_base(StepFunction(fn.system, v), grid)) for w, v in parts]
    return M, bases


def _pipeline(f: StepFunction, m: int | None, budget: int | None, grid: GridSpec):
    if f.s < 2:
        raise PreconditionError("the pipeline needs at least two segments")
    fn_system, amap = normalize(f.system, (-1.0, 1.0))
    fn = StepFunction(fn_system, f.values)
    M = fn.sup
    if M == 0:
        raise PreconditionError("the zero function needs no pipeline")
    if m is not None:
        target = base_target_degree(fn_system.stats().sigma)
        if m * target > DEGREE_CAP:
            raise DegreeOverflowError(f"pipeline degree {m}*{target} exceeds cap {DEGREE_CAP}")
    M, bases = _bases(fn, grid)
    n0 = max(b.degree for _, b in bases)
    base_error = max(b.base_error for _, b in bases)
    if base_error > 0.5:
        raise ConstructionError(f"base error {base_error:.3g} exceeds 1/2")
    if m is None:
        m = budget // n0 if n0 else budget
    if m < 1:
        return None, n0, base_error, m
    amp, amp_cert = amplifier(m, 0.5)
    total = None
    for w, b in bases:
        piece = compose(amp, b.poly).scaled(w)
        total = piece if total is None else total + piece
    poly = total.scaled(M).pullback(amap)
    _, _, sigma, D = f.system.stats()
    n = max(1, m * n0)
    params = {
        "m": m,
        "n0": n0,
        "eps": 0.5,
        "amplifier_bound": amp_cert.value,
        "rate_c": PIPELINE_RATE * m * D / (n * sigma),
        "vertices": len(bases),
    }
    cert = BoundCertificate(Formula.PIPELINE, M * amp_cert.value, params)
    return (poly, cert), n0, base_error, m


def general_pipeline(f: StepFunction, m: int, grid: GridSpec = DEFAULT_GRID) -> PipelineReport:
    """Base of error 1/2 composed with a degree-``m`` amplifier.

    Certificate ``max|y| * 2(3/4)^{m/2}`` at total degree ``m * n0``; this is
    ``2 exp(-c n sigma / D)`` with the explicit ``c`` reported as ``rate_c``.
    """
    if m < 1:
        raise PreconditionError("pipeline amplifier degree m must be >= 1")
    built, n0, base_error, m = _pipeline(f, m, None, grid)
    poly, cert = built
    measured = sup_error(poly, f, grid)
    notes = [] if cert.params["vertices"] == 1 else [f"{cert.params['vertices']} sign patterns"]
    return PipelineReport(n0, base_error, m, m * n0, cert, measured, poly, notes)


def eps_general(Y: ValueSet, delta: float, n: int, grid: GridSpec = DEFAULT_GRID):
    """Amplifier for any value set from the pipeline, within a degree budget ``n``.

    The amplifier degree is ``m = floor(n / n0)``; the remainder of the budget
    is unused. With ``m = 0`` the midpoint constant is returned.
    """
    system = inflate(Y, delta)
    half, mid = 0.5 * Y.D_hat, 0.5 * (Y.points[0] + Y.points[-1])
    f = StepFunction(system, [(y - mid) / half for y in Y.points])
    built, n0, _, m = _pipeline(f, None, n, grid)
    if built is None:
        return Polynomial.constant(mid, (system.hull.lo, system.hull.hi)), trivial(half, m=0, n0=n0)
    poly, cert = built
    params = dict(cert.params, D_hat=Y.D_hat, unused_degree=n - m * n0)
    return poly.scaled(half, mid), BoundCertificate(Formula.EPS_GENERAL, half * cert.value, params)


_PRIORITY = {"constant": 0, "bernstein": 1, "newton": 2, "pipeline": 3, "trivial": 4}


def choose_best(f: StepFunction, degree_budget: int, grid: GridSpec = DEFAULT_GRID):
    """Smallest certificate among the applicable constructions within the budget.

    Returns ``(polynomial, certificate, method)``; ties go to the smaller
    degree, then to the Bernstein construction.
    """
    hull = f.system.hull
    ref = (hull.lo, hull.hi) if hull.length > 0 else (hull.lo - 1.0, hull.hi + 1.0)
    if len(set(f.values)) == 1:
        return Polynomial.constant(f.values[0], ref), trivial(0.0), "constant"
    cands = [("trivial", Polynomial.constant(0.0, ref), trivial(f.sup))]
    if f.s == 2 and degree_budget >= 1:
        cands.append(("bernstein", *equal_two_segment(f.system, f.values, degree_budget)))
    if degree_budget >= 1:
        cands.append(("newton", *small_delta_for_system(f, degree_budget)))
    try:
        built, _, _, _ = _pipeline(f, None, degree_budget, grid)
    except ConstructionError:
        built = None
    if built is not None:
        cands.append(("pipeline", *built))
    cands = [("trivial" if c.formula is Formula.TRIVIAL else t, p, c) for t, p, c in cands]
    tag, poly, cert = min(cands, key=lambda c: (c[2].value, c[1].degree, _PRIORITY[c[0]]))
    return poly, cert, tag


def self_amplify(f: StepFunction, inner_degree: int, m: int, grid: GridSpec = DEFAULT_GRID):
    """Compose the best degree-``inner_degree`` approximant with a two-value
    amplifier of degree ``m`` built for its measured error."""
    if any(v not in (-1.0, 1.0) for v in f.values):
        raise PreconditionError("self_amplify needs values in {-1, 1}")
    if m < 1:
        raise PreconditionError("m must be >= 1")
    inner, inner_cert, tag = choose_best(f, inner_degree, grid)
    eps_inner = sup_error(inner, f, grid).global_error
    if eps_inner >= 1.0:
        raise ConstructionError(f"inner error {eps_inner:.3g} >= 1; amplification impossible")
    if eps_inner == 0.0:
        measured = sup_error(inner, f, grid)
        cert = BoundCertificate(Formula.EPS_TWO, 0.0, {"eps_inner": 0.0, "m": m, "inner": tag})
        return PipelineReport(inner.degree, 0.0, m, inner.degree, cert, measured, inner,
                              base_certificate=inner_cert.value)
    amp, _ = eps_two(ValueSet([-1.0, 1.0]), eps_inner, m)
    poly = compose(amp, inner)
    value = eps_pm1_bound(eps_inner, m)
    cert = BoundCertificate(
        Formula.EPS_TWO, value, {"eps_inner": eps_inner, "m": m, "inner": tag, "amplifier_bound": value}
    )
    measured = sup_error(poly, f, grid)
    return PipelineReport(inner.degree, eps_inner, m, m * inner.degree, cert, measured, poly,
                          base_certificate=inner_cert.value)
