"""External fields and the cubic spectral curves they determine.

A curve is stored as ``w**3 - c2(z) w**2 + c1(z) w - c0(z) = 0``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .poly import Poly, eval_poly


@dataclass(frozen=True)
class ExternalField:
    """Potential ``v``, source strength ``a`` and fractions ``x1 + x2 = 1``."""

    v: Poly
    a: float
    x1: float = 0.5
    x2: float = 0.5

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"source strength must be positive, got {self.a}")
        if not (0.0 < self.x2 < 1.0) or not (0.0 < self.x1 < 1.0):
            raise ValueError("fractions must lie in (0, 1)")
        if self.x1 + self.x2 != 1.0:
            raise ValueError("fractions must sum to 1")

    @classmethod
    def with_x2(cls, v: Poly, a: float, x2: float = 0.5) -> "ExternalField":
        return cls(v, a, 1.0 - x2, x2)

    @property
    def vprime(self) -> Poly:
        return self.v.deriv()

    @property
    def v1prime(self) -> Poly:
        return self.vprime + self.a

    @property
    def v2prime(self) -> Poly:
        return self.vprime - self.a


@dataclass(frozen=True)
class SpectralCurve:
    c2: Poly
    c1: Poly
    c0: Poly
    a: float
    field: str = "general"
    x1: float = 0.5
    x2: float = 0.5
    params: dict = dc_field(default_factory=dict)

    def coefficients_at(self, z):
        return eval_poly(self.c2, z), eval_poly(self.c1, z), eval_poly(self.c0, z)

    def vprime(self, z):
        return eval_poly(self.c2, z)

    def vj_prime(self, j: int, z):
        """``V_1' = V' + a`` and ``V_2' = V' - a``."""
        return self.vprime(z) + (self.a if j == 1 else -self.a)

    def _derivs(self):
        cached = self.__dict__.get("_deriv_cache")
        if cached is None:
            cached = (self.c2.deriv(), self.c1.deriv(), self.c0.deriv())
            object.__setattr__(self, "_deriv_cache", cached)
        return cached

    def partials(self, z, w):
        """Return ``(dP/dw, dP/dz)`` of the cubic at ``(z, w)``."""
        c2, c1, _ = self.coefficients_at(z)
        dc2, dc1, dc0 = self._derivs()
        d2, d1, d0 = eval_poly(dc2, z), eval_poly(dc1, z), eval_poly(dc0, z)
        pw = (3.0 * w - 2.0 * c2) * w + c1
        pz = (-d2 * w + d1) * w - d0
        return pw, pz

    @property
    def is_symmetric_quartic(self) -> bool:
        return self.field == "quartic"

    def to_dict(self) -> dict:
        out = {
            "c2": self.c2.to_list(),
            "c1": self.c1.to_list(),
            "c0": self.c0.to_list(),
            "a": float(self.a),
            "field": self.field,
            "x1": float(self.x1),
            "x2": float(self.x2),
        }
        if self.params:
            out["params"] = {k: float(v) for k, v in self.params.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralCurve":
        return cls(Poly(d["c2"]), Poly(d["c1"]), Poly(d["c0"]), d["a"], d["field"],
                   d.get("x1", 0.5), d.get("x2", 0.5), dict(d.get("params", {})))

    @classmethod
    def from_json(cls, text: str) -> "SpectralCurve":
        return cls.from_dict(json.loads(text))


def gaussian_curve(a: float, x2: float = 0.5) -> SpectralCurve:
    """Curve for ``V = z**2 / 2`` with fractions ``(1 - x2, x2)``."""
    if not a > 0:
        raise ValueError("a must be positive")
    if not 0.0 < x2 < 1.0:
        raise ValueError("x2 must lie in (0, 1)")
    return SpectralCurve(
        c2=Poly([0.0, 1.0]),
        c1=Poly([-(a * a - 1.0)]),
        c0=Poly([-a * (2.0 * x2 - 1.0), -a * a]),
        a=a,
        field="gaussian",
        x1=1.0 - x2,
        x2=x2,
    )


def quartic_curve(a: float, alpha: float, beta: float) -> SpectralCurve:
    """Symmetric quartic curve for ``V = z**4 / 4`` with free ``alpha, beta``."""
    if not a > 0:
        raise ValueError("a must be positive")
    return SpectralCurve(
        c2=Poly([0.0, 0.0, 0.0, 1.0]),
        c1=Poly([alpha, 0.0, 1.0]),
        c0=Poly([0.0, -beta, 0.0, -a * a]),
        a=a,
        field="quartic",
        params={"alpha": alpha, "beta": beta},
    )


def general_curve(fld: ExternalField, c1_tail: Sequence[float],
                  c0_tail: Sequence[float]) -> SpectralCurve:
    """Curve for a polynomial potential of degree ``d >= 2``.

    ``c1 = lead(V') z**(d-2) - a**2 + sum(c1_tail[k] z**k)`` with ``d - 2``
    tail slots and ``c0 = -a**2 lead(V') z**(d-1) + sum(c0_tail[k] z**k)``
    with ``d - 1`` slots.
    """
    d = fld.v.degree
    if d < 2:
        raise ValueError(f"potential must have degree >= 2, got {d}")
    if len(c1_tail) != d - 2:
        raise ValueError(f"c1_tail needs {d - 2} entries, got {len(c1_tail)}")
    if len(c0_tail) != d - 1:
        raise ValueError(f"c0_tail needs {d - 1} entries, got {len(c0_tail)}")
    lead = fld.vprime.lead
    a2 = fld.a * fld.a
    c1 = [0.0] * (d - 1)
    c1[d - 2] = lead
    c1[0] -= a2
    for k, t in enumerate(c1_tail):
        c1[k] += t
    c0 = [0.0] * d
    c0[d - 1] = -a2 * lead
    for k, t in enumerate(c0_tail):
        c0[k] += t
    return SpectralCurve(fld.vprime, Poly(c1), Poly(c0), fld.a, "general", fld.x1, fld.x2)


def curve_residual(curve: SpectralCurve, z, w):
    """Value of ``w**3 - c2 w**2 + c1 w - c0`` at ``(z, w)``."""
    c2, c1, c0 = curve.coefficients_at(z)
    return ((w - c2) * w + c1) * w - c0


def curve_scale(curve: SpectralCurve, z, w) -> float:
    """Magnitude scale for relative residuals at ``(z, w)``."""
    c2, c1, c0 = curve.coefficients_at(z)
    aw = abs(w)
    return aw ** 3 + abs(c2) * aw * aw + abs(c1) * aw + abs(c0)
