"""Small-radius constructions from confluent Newton interpolation.

Around centers ``z_1, ..., z_s`` (pairwise at least 1 apart) the polynomial
``P_i`` interpolates 1 at ``z_i`` and 0 at every other center, each with
multiplicity ``n`` and all derivatives zero. The ``P_i`` sum to 1 and each
is at most ``(2 delta)^n (2D + 1)^{n(s-1)}`` within ``delta`` of a foreign
center, so ``sum_i w_i P_i`` is within ``2(s-1)(A(Z) delta)^n`` of ``w_i``
near ``z_i`` with ``A(Z) = 2(1 + 2 diam Z)^{s-1}``.

The interpolants are built directly from divided differences over repeated
nodes: for a function that is locally constant around each node all the
derivative data is zero, so a confluent entry is simply 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .certificates import BoundCertificate, Formula, A_const, bnd_limit, small_delta_bound, trivial
from .errors import PreconditionError
from .intervals import AffineMap, StepFunction, ValueSet, inflate
from .poly import Polynomial, from_samples

SEPARATION_RTOL = 1e-12


@dataclass(frozen=True)
class NodeSystem:
    centers: tuple
    multiplicity: int

    def __init__(self, centers, multiplicity: int):
        zs = tuple(complex(z) if isinstance(z, complex) else float(z) for z in centers)
        if not zs:
            raise PreconditionError("a node system needs at least one center")
        if multiplicity < 1:
            raise PreconditionError("multiplicity must be >= 1")
        for i, a in enumerate(zs):
            for b in zs[i + 1:]:
                if abs(a - b) < 1.0 - SEPARATION_RTOL:
                    raise PreconditionError(
                        f"centers {a} and {b} are closer than 1; rescale first"
                    )
        object.__setattr__(self, "centers", zs)
        object.__setattr__(self, "multiplicity", int(multiplicity))

    @property
    def s(self) -> int:
        return len(self.centers)

    @property
    def is_real(self) -> bool:
        return not any(isinstance(z, complex) for z in self.centers)

    @property
    def diam(self) -> float:
        zs = self.centers
        return max(abs(a - b) for a in zs for b in zs)

    @property
    def A(self) -> float:
        return A_const(self.centers)

    @property
    def degree(self) -> int:
        return self.s * self.multiplicity - 1

    def ref(self):
        """Real interval holding every radius-1/2 disk around a center."""
        re = [z.real if isinstance(z, complex) else z for z in self.centers]
        return (min(re) - 0.5, max(re) + 0.5)


@dataclass(frozen=True)
class DividedDifferenceTable:
    """``table[k][j] = f[nodes[j], ..., nodes[j+k]]``.

    With ``dps`` set, entries are mpmath numbers at that many digits and
    calls evaluate in the same precision.
    """

    nodes: tuple
    values: tuple
    table: tuple
    dps: int | None = None

    @property
    def coefficients(self) -> np.ndarray:
        """Top row, the Newton-form coefficients."""
        return np.array([col[0] for col in self.table])

    def __call__(self, z):
        if self.dps is None:
            return newton_eval(self.coefficients, self.nodes, z)
        with mpmath.workdps(self.dps):
            zz = np.vectorize(mpmath.mpmathify, otypes=[object])(np.asarray(z, dtype=object))
            return newton_eval(self.coefficients, self.nodes, zz)


def divided_differences(
    nodes, f, locally_constant: bool = False, dps: int | None = None
) -> DividedDifferenceTable:
    """Full divided-difference table over ``nodes``.

    ``f`` is a callable or a sequence of values at the nodes. Repeated nodes
    must be contiguous and are only supported when ``locally_constant`` is
    true, in which case every derivative datum is zero. ``dps`` switches to
    mpmath arithmetic with that many decimal digits.
    """
    if dps is not None:
        with mpmath.workdps(dps):
            nodes = [mpmath.mpmathify(z) for z in nodes]
            f = [mpmath.mpmathify(v) for v in (map(f, nodes) if callable(f) else f)]
            return _divided_differences(nodes, f, locally_constant, dps)
    return _divided_differences(nodes, f, locally_constant, None)


def _divided_differences(nodes, f, locally_constant, dps):
    zs = list(nodes)
    N = len(zs)
    if N == 0:
        raise PreconditionError("need at least one node")
    vals = list(f(z) for z in zs) if callable(f) else list(f)
    if len(vals) != N:
        raise PreconditionError("one value per node is required")
    seen = set()
    for j, z in enumerate(zs):
        if j and z == zs[j - 1]:
            if not locally_constant:
                raise PreconditionError(
                    "repeated nodes need derivative data; declare the function "
                    "locally constant (unsupported confluency)"
                )
            if vals[j] != vals[j - 1]:
                raise PreconditionError(f"conflicting values at repeated node {z}")
            continue
        if z in seen:
            raise PreconditionError(f"repeated node {z} is not contiguous")
        seen.add(z)

    if dps is not None:
        dtype = object
    elif any(isinstance(v, complex) for v in zs + vals):
        dtype = complex
    else:
        dtype = float
    col = np.array(vals, dtype=dtype)
    table = [col]
    for k in range(1, N):
        prev = table[-1]
        nxt = np.empty(N - k, dtype=dtype)
        for j in range(N - k):
            den = zs[j + k] - zs[j]
            # a block of k+1 equal nodes: k-th derivative over k!, zero here
            nxt[j] = 0.0 if den == 0 else (prev[j + 1] - prev[j]) / den
        table.append(nxt)
    return DividedDifferenceTable(tuple(zs), tuple(vals), tuple(table), dps)


def newton_eval(coeffs, nodes, z):
    """Nested evaluation of ``sum_k c_k prod_{j<k} (z - nodes[j])``."""
    z = np.asarray(z)
    c = np.asarray(coeffs)
    dtype = object if object in (z.dtype, c.dtype) else np.result_type(c, z, float)
    acc = np.full(z.shape, c[-1], dtype=dtype)
    for k in range(c.size - 2, -1, -1):
        acc = c[k] + (z - nodes[k]) * acc
    return acc


def _hermite_nodes(centers, n, last=None):
    order = [z for z in centers if last is None or z != last]
    if last is not None:
        order.append(last)
    return [z for z in order for _ in range(n)]


def _newton_form(Z: NodeSystem, data, last=None, dps=None) -> DividedDifferenceTable:
    """Confluent interpolant of the locally constant function ``z_j -> data[j]``."""
    n = Z.multiplicity
    lookup = dict(zip(Z.centers, data))
    nodes = _hermite_nodes(Z.centers, n, last)
    return divided_differences(nodes, [lookup[z] for z in nodes], locally_constant=True, dps=dps)


def partition_newton_forms(Z: NodeSystem, dps: int | None = None) -> list:
    """Newton forms of ``P_1, ..., P_s``; works for complex centers.

    The centers are rotated so ``z_i`` comes last, which makes the first
    ``n(s-1)`` divided differences of ``P_i`` vanish. Far from the centers the
    individual ``P_i`` grow large, so checking ``sum P_i = 1`` there to tight
    tolerances needs ``dps``.
    """
    forms = []
    for i, zi in enumerate(Z.centers):
        data = [1.0 if j == i else 0.0 for j in range(Z.s)]
        forms.append(_newton_form(Z, data, last=zi, dps=dps))
    return forms


def partition_residual(Z: NodeSystem, x, dps: int = 40) -> float:
    """``max |sum_i P_i(x) - 1|`` over points ``x``, computed at ``dps`` digits."""
    forms = partition_newton_forms(Z, dps=dps)
    with mpmath.workdps(dps):
        total = forms[0](x)
        for form in forms[1:]:
            total = total + form(x)
        return float(max(abs(v - 1) for v in np.atleast_1d(total)))


def _to_poly(form: DividedDifferenceTable, Z: NodeSystem) -> Polynomial:
    return from_samples(lambda x: np.real(form(x)), Z.degree, Z.ref())


def partition_of_unity(Z: NodeSystem) -> list:
    """Polynomials ``P_1, ..., P_s`` of degree ``ns - 1`` summing to 1.

    Real centers give :class:`Polynomial` objects; complex centers give the
    Newton forms (callables on complex arguments).
    """
    forms = partition_newton_forms(Z)
    if not Z.is_real:
        return forms
    if Z.s == 1:
        return [Polynomial.constant(1.0, Z.ref())]
    return [_to_poly(form, Z) for form in forms]


def partition_bound(Z: NodeSystem, delta: float) -> BoundCertificate:
    """``(2 delta)^n (2D + 1)^{n(s-1)}`` for each ``P_i`` near a foreign center."""
    n = Z.multiplicity
    return BoundCertificate(
        Formula.BND_LIMIT, bnd_limit(Z.centers, delta, n), {"delta": delta, "n": n, "D": Z.diam}
    )


def small_delta_approx(Z: NodeSystem, w, delta: float):
    """``P = sum_i w_i P_i`` with the certificate ``2(s-1)(A(Z) delta)^n``.

    ``P`` itself does not depend on ``delta``; only the certificate does.
    """
    w = list(w)
    if len(w) != Z.s:
        raise PreconditionError(f"{len(w)} values for {Z.s} centers")
    if any(abs(v) > 1.0 + 1e-15 for v in w):
        raise PreconditionError("all |w_i| must be <= 1")
    if not (0.0 <= delta < 0.5):
        raise PreconditionError(f"the certificate needs 0 <= delta < 1/2, got {delta}")
    n = Z.multiplicity
    params = {"n": n, "s": Z.s, "A": Z.A, "delta": delta}
    if Z.s == 1 or len(set(w)) == 1:
        poly = Polynomial.constant(w[0].real if isinstance(w[0], complex) else w[0], Z.ref())
        return poly, BoundCertificate(Formula.SMALL_DELTA, 0.0, params)
    form = _newton_form(Z, w)
    cert = BoundCertificate(Formula.SMALL_DELTA, small_delta_bound(Z.centers, delta, n), params)
    if not Z.is_real or any(isinstance(v, complex) for v in w):
        return form, cert
    return _to_poly(form, Z), cert


def small_delta_for_system(f: StepFunction, n: int, u: float | None = None):
    """Degree ``<= n`` approximant for locally small segments.

    With ``m = floor((n+1)/s)`` the construction rescales the system so the
    centers are at least 1 apart and interpolates with multiplicity ``m``.
    ``u`` defaults to ``sigma / D``.
    """
    s, delta, sigma, D = f.system.stats()
    M = f.sup
    hull = f.system.hull
    if s == 1:
        return Polynomial.constant(f.values[0], (hull.lo - 1.0, hull.hi + 1.0)), trivial(0.0, m=0)
    ratio = sigma / D
    if u is None:
        u = ratio
    if u <= 0 or ratio < u * (1.0 - SEPARATION_RTOL):
        raise PreconditionError(f"need 0 < u <= sigma/D = {ratio}, got u={u}")
    m = (n + 1) // s
    zero = Polynomial.constant(0.0, (hull.lo, hull.hi))
    if m == 0 or M == 0:
        return zero, trivial(M, m=m)
    scale = 1.0 / (u * D)
    amap = AffineMap(scale, -hull.lo * scale)
    centers = [amap(c) for c in f.system.centers]
    d_tilde = delta * scale
    if d_tilde >= 0.5:
        return zero, trivial(M, m=m, u=u, delta_tilde=d_tilde)
    raw = M * small_delta_bound(centers, d_tilde, m)
    if raw >= M:
        # the bound is no better than the zero polynomial, and the
        # interpolant is numerically meaningless in this regime
        return zero, trivial(M, m=m, u=u, delta_tilde=d_tilde, raw_certificate=raw)
    Z = NodeSystem(centers, m)
    poly, cert = small_delta_approx(Z, [y / M for y in f.values], d_tilde)
    out = poly.pullback(amap).scaled(M)
    params = dict(cert.params, m=m, u=u, delta_tilde=d_tilde, raw_certificate=raw)
    return out, BoundCertificate(Formula.SMALL_DELTA, M * cert.value, params)


def eps_small_delta(Y: ValueSet, delta: float, n: int):
    """Amplifier for a many-point value set built from :func:`small_delta_for_system`."""
    system = inflate(Y, delta)
    half, mid = 0.5 * Y.D_hat, 0.5 * (Y.points[0] + Y.points[-1])
    f = StepFunction(system, [(y - mid) / half for y in Y.points])
    poly, cert = small_delta_for_system(f, n)
    out = poly.scaled(half, mid)
    return out, BoundCertificate(cert.formula, half * cert.value, dict(cert.params, D_hat=Y.D_hat))
