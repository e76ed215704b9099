"""Disjoint segment systems, step functions on them, and value sets.

Every bound in this package is parameterized by a handful of geometric
quantities of the segment system ``K = I_1 u ... u I_s``:

* ``s``     -- number of segments,
* ``delta`` -- half of the longest segment length,
* ``sigma`` -- smallest gap between two segments,
* ``D``     -- diameter of the union.

Value sets ``Y = {y_1 < ... < y_s}`` carry the analogous ``sigma_hat``
(smallest gap between values) and ``D_hat`` (diameter).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import DisjointnessError, PreconditionError, ProblemFormatError


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise PreconditionError(f"non-finite endpoint in [{lo}, {hi}]")
        if lo > hi:
            raise PreconditionError(f"interval with lo > hi: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi


class SystemStats(NamedTuple):
    s: int
    delta: float
    sigma: float
    D: float


def _as_interval(obj) -> Interval:
    if isinstance(obj, Interval):
        return obj
    lo, hi = obj
    return Interval(lo, hi)


@dataclass(frozen=True)
class IntervalSystem:
    """Pairwise disjoint closed segments, kept sorted by left endpoint."""

    intervals: tuple

    def __init__(self, intervals: Iterable):
        ivs = sorted((_as_interval(iv) for iv in intervals), key=lambda iv: iv.lo)
        if not ivs:
            raise PreconditionError("an interval system needs at least one segment")
        for prev, nxt in zip(ivs, ivs[1:]):
            if nxt.lo - prev.hi <= 0:
                raise DisjointnessError(
                    f"segments [{prev.lo}, {prev.hi}] and [{nxt.lo}, {nxt.hi}] "
                    "overlap or touch"
                )
        object.__setattr__(self, "intervals", tuple(ivs))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i) -> Interval:
        return self.intervals[i]

    @property
    def s(self) -> int:
        return len(self.intervals)

    @property
    def hull(self) -> Interval:
        return Interval(self.intervals[0].lo, self.intervals[-1].hi)

    @property
    def centers(self) -> list:
        return [iv.center for iv in self.intervals]

    def gaps(self) -> list:
        return [b.lo - a.hi for a, b in zip(self.intervals, self.intervals[1:])]

    def stats(self) -> SystemStats:
        return system_stats(self)

    def mapped(self, amap: "AffineMap") -> "IntervalSystem":
        out = []
        for iv in self.intervals:
            a, b = amap(iv.lo), amap(iv.hi)
            out.append(Interval(min(a, b), max(a, b)))
        return IntervalSystem(out)

    def to_list(self) -> list:
        return [[iv.lo, iv.hi] for iv in self.intervals]


def system_stats(system: IntervalSystem) -> SystemStats:
    """Return ``(s, delta, sigma, D)``; ``sigma`` is ``inf`` for one segment."""
    ivs = system.intervals
    delta = 0.5 * max(iv.length for iv in ivs)
    gaps = system.gaps()
    sigma = min(gaps) if gaps else math.inf
    D = ivs[-1].hi - ivs[0].lo
    return SystemStats(len(ivs), delta, sigma, D)


@dataclass(frozen=True)
class StepFunction:
    """``f = sum_i values[i] * 1_{I_i}`` on an interval system."""

    system: IntervalSystem
    values: tuple

    def __init__(self, system, values: Sequence[float]):
        if not isinstance(system, IntervalSystem):
            system = IntervalSystem(system)
        values = tuple(float(v) for v in values)
        if len(values) != system.s:
            raise PreconditionError(
                f"{len(values)} values given for {system.s} segments"
            )
        if not all(math.isfinite(v) for v in values):
            raise PreconditionError("step values must be finite")
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "values", values)

    @property
    def s(self) -> int:
        return self.system.s

    @property
    def sup(self) -> float:
        return max(abs(v) for v in self.values)

    def scaled(self, factor: float) -> "StepFunction":
        return StepFunction(self.system, [factor * v for v in self.values])


@dataclass(frozen=True)
class ValueSet:
    """Strictly increasing finite set of values ``y_1 < ... < y_s``."""

    points: tuple

    def __init__(self, points: Iterable[float]):
        pts = tuple(float(p) for p in points)
        if len(pts) < 2:
            raise PreconditionError("a value set needs at least two points")
        if not all(math.isfinite(p) for p in pts):
            raise PreconditionError("value set entries must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise PreconditionError(f"value set must be strictly increasing: {pts}")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def s(self) -> int:
        return len(self.points)

    @property
    def sigma_hat(self) -> float:
        return min(b - a for a, b in zip(self.points, self.points[1:]))

    @property
    def D_hat(self) -> float:
        return self.points[-1] - self.points[0]


@dataclass(frozen=True)
class AffineMap:
    """``x -> scale * x + shift``."""

    scale: float
    shift: float = 0.0

    def __post_init__(self):
        scale, shift = float(self.scale), float(self.shift)
        if scale == 0 or not math.isfinite(scale) or not math.isfinite(shift):
            raise PreconditionError(f"affine map must be invertible, got scale={scale}")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "shift", shift)

    def __call__(self, x):
        return self.scale * x + self.shift

    def inverse(self) -> "AffineMap":
        return AffineMap(1.0 / self.scale, -self.shift / self.scale)

    def then(self, other: "AffineMap") -> "AffineMap":
        """The map ``x -> other(self(x))``."""
        return AffineMap(other.scale * self.scale, other.scale * self.shift + other.shift)

    @classmethod
    def between(cls, src: Interval, dst: Interval) -> "AffineMap":
        """Increasing map sending ``src`` onto ``dst``."""
        if src.length <= 0:
            raise PreconditionError("cannot map a degenerate interval")
        scale = dst.length / src.length
        return cls(scale, dst.lo - scale * src.lo)


IDENTITY = AffineMap(1.0, 0.0)

_TARGETS = {(0.0, 1.0): Interval(0.0, 1.0), (-1.0, 1.0): Interval(-1.0, 1.0)}


def inflate(Y: ValueSet, delta: float) -> IntervalSystem:
    """Segments ``[y_i - delta, y_i + delta]`` around each value."""
    half = 0.5 * Y.sigma_hat
    if not (0 < delta < half):
        raise PreconditionError(
            f"delta={delta} must satisfy 0 < delta < sigma_hat/2 = {half}"
        )
    return IntervalSystem([(y - delta, y + delta) for y in Y.points])


def normalize(system: IntervalSystem, target=(-1.0, 1.0)):
    """Map ``system`` affinely so its convex hull becomes ``target``.

    ``target`` must be ``[0, 1]`` or ``[-1, 1]``. Returns the mapped system and
    the increasing map from original to normalized coordinates.
    """
    key = tuple(float(t) for t in target)
    if key not in _TARGETS:
        raise PreconditionError(f"normalization target must be [0,1] or [-1,1], got {target}")
    hull = system.hull
    if hull.length <= 0:
        raise PreconditionError("a single-point system cannot be normalized")
    amap = AffineMap.between(hull, _TARGETS[key])
    mapped = system.mapped(amap)
    # pin the hull endpoints exactly; the interior is only rounded
    ivs = list(mapped.intervals)
    ivs[0] = Interval(key[0], min(max(ivs[0].hi, key[0]), key[1]))
    ivs[-1] = Interval(max(min(ivs[-1].lo, key[1]), key[0]), key[1])
    if len(ivs) == 1:
        ivs = [Interval(*key)]
    return IntervalSystem(ivs), amap


# -- JSON problem files -------------------------------------------------------

def _finite(x, what):
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ProblemFormatError(f"{what}: expected a number, got {x!r}") from None
    if not math.isfinite(v):
        raise ProblemFormatError(f"{what}: NaN/Inf not allowed")
    return v


def parse_problem(obj: dict):
    """Build a problem from its JSON form.

    ``{"intervals": [[lo, hi], ...], "values": [...]}`` gives a StepFunction;
    ``{"value_set": [...], "delta": d}`` gives ``(ValueSet, delta)``.
    """
    if not isinstance(obj, dict):
        raise ProblemFormatError("problem must be a JSON object")
    if "value_set" in obj:
        Y = ValueSet([_finite(v, "value_set") for v in obj["value_set"]])
        if "delta" not in obj:
            raise ProblemFormatError("value_set problems need a 'delta'")
        return Y, _finite(obj["delta"], "delta")
    if "intervals" not in obj:
        raise ProblemFormatError("problem needs 'intervals' or 'value_set'")
    ivs = []
    for pair in obj["intervals"]:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ProblemFormatError(f"interval must be [lo, hi], got {pair!r}")
        ivs.append(Interval(_finite(pair[0], "interval"), _finite(pair[1], "interval")))
    system = IntervalSystem(ivs)
    values = obj.get("values")
    if values is None:
        raise ProblemFormatError("interval problems need 'values'")
    # values follow the user's interval order, which may differ from sorted order
    order = sorted(range(len(ivs)), key=lambda i: ivs[i].lo)
    values = [_finite(v, "values") for v in values]
    if len(values) != len(ivs):
        raise ProblemFormatError(f"{len(values)} values given for {len(ivs)} segments")
    return StepFunction(system, [values[i] for i in order])


def load_problem(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON in {path}: {exc}") from exc
    return parse_problem(obj)
