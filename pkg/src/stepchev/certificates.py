"""Closed-form error certificates attached to every construction."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum


class Formula(str, Enum):
    H_BOUND = "H_BOUND"          # 2(4h(1-h))^{n/2} on [0,h] u [1-h,1]
    TWO_SEG = "TWO_SEG"          # 2(1 - sigma^2/D^2)^{n/2}, two segments
    SMALL_DELTA = "SMALL_DELTA"  # 2(s-1)(A(Z) delta)^n, Newton partition of unity
    PIPELINE = "PIPELINE"        # base of error 1/2, then a Bernstein amplifier
    EPS_TWO = "EPS_TWO"          # two-value amplifier
    EPS_GENERAL = "EPS_GENERAL"  # many-value amplifier via the pipeline
    BND_LIMIT = "BND_LIMIT"      # (2 delta)^n (2D+1)^{n(s-1)} per partition polynomial
    TRIVIAL = "TRIVIAL"          # the zero (or midpoint constant) approximant


@dataclass(frozen=True)
class BoundCertificate:
    formula: Formula
    value: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.value >= 0):
            raise ValueError(f"certificate value must be >= 0, got {self.value}")

    def to_dict(self) -> dict:
        return {"formula": self.formula.value, "value": self.value, "params": dict(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def trivial(bound: float, **params) -> BoundCertificate:
    return BoundCertificate(Formula.TRIVIAL, float(bound), params)


def h_bound(h: float, n: int) -> float:
    """``2 (4h(1-h))^{n/2}``."""
    return 2.0 * (4.0 * h * (1.0 - h)) ** (n / 2.0)


def two_segments_bound(sigma: float, D: float, n: int) -> float:
    """``2 (1 - sigma^2/D^2)^{n/2}`` for two equal segments (``D = sigma + 4 delta``)."""
    return 2.0 * (1.0 - (sigma / D) ** 2) ** (n / 2.0)


def eps_pm1_bound(delta: float, n: int) -> float:
    """Two-value amplifier bound for ``Y = {-1, 1}``."""
    return 2.0 * (4.0 * delta / (1.0 + delta) ** 2) ** (n / 2.0)


def eps_01_bound(delta: float, n: int) -> float:
    """Two-value amplifier bound for ``Y = {0, 1}``."""
    return (8.0 * delta / (1.0 + 2.0 * delta) ** 2) ** (n / 2.0)


def A_const(centers) -> float:
    """``A(Z) = 2 (1 + 2 diam Z)^{s-1}``; centers may be complex."""
    zs = list(centers)
    diam = max(abs(a - b) for a in zs for b in zs)
    return 2.0 * (1.0 + 2.0 * diam) ** (len(zs) - 1)


def small_delta_bound(centers, delta: float, n: int) -> float:
    """``2 (s-1) (A(Z) delta)^n``, valid for ``delta < 1/2``."""
    s = len(list(centers))
    return 2.0 * (s - 1) * (A_const(centers) * delta) ** n


def bnd_limit(centers, delta: float, n: int) -> float:
    """``(2 delta)^n (2D + 1)^{n(s-1)}`` bounding each off-center partition polynomial."""
    zs = list(centers)
    diam = max(abs(a - b) for a in zs for b in zs)
    return (2.0 * delta) ** n * (2.0 * diam + 1.0) ** (n * (len(zs) - 1))


def pipeline_bound(m: int, eps: float = 0.5) -> float:
    """Amplifier bound after a base of accuracy ``eps``: ``h_bound(eps/2, m)``."""
    return h_bound(eps / 2.0, m)


PIPELINE_RATE = math.log(4.0 / 3.0) / 2.0
