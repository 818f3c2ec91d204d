"""Discriminants, branch points and the three labelled sheets of the curve.

Sheets are labelled by their behaviour at infinity::

    r1 ~ -a + x1/z,    r2 ~ a + x2/z,    r3 ~ V'(z) - 1/z

and continued to finite ``z`` along paths that stay in one half-plane.
``f1 = r1 + a`` and ``f2 = r2 - a``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .curve import SpectralCurve, curve_residual, curve_scale
from .poly import Poly, RootFindingError, SquareStructureError, eval_poly, extract_square_factor, resultant, roots

SAFETY_FRACTION = 1e-4


class BranchClassificationError(ValueError):
    """The discriminant does not have the one-cut root signature."""

    def __init__(self, message: str, signature: dict | None = None):
        super().__init__(message)
        self.signature = signature or {}


class TooCloseToBranchPoint(ValueError):
    def __init__(self, message: str, distance: float):
        super().__init__(message)
        self.distance = distance


# -- discriminant -------------------------------------------------------------

def discriminant_t(curve: SpectralCurve) -> Poly:
    """Sextic ``q(t)`` whose value at ``t = z**2`` is ``9 * disc_w``.

    Non-quartic curves get the discriminant as a polynomial in ``z``.
    """
    if not curve.is_symmetric_quartic:
        return discriminant_z(curve)
    al = curve.params["alpha"]
    be = curve.params["beta"]
    a = curve.a
    a2 = a * a
    return Poly([
        -36.0 * al ** 3,
        9.0 * (-12.0 * al * al - 27.0 * be * be),
        9.0 * (-54.0 * be * a2 - 12.0 * al - 18.0 * al * be),
        9.0 * (-27.0 * a2 * a2 - 18.0 * al * a2 + al * al - 18.0 * be - 4.0),
        9.0 * (2.0 * al - 18.0 * a2),
        9.0 * (4.0 * be + 1.0),
        36.0 * a2,
    ])


def discriminant_z(curve: SpectralCurve) -> Poly:
    """``9 * disc_w`` of the cubic, as a polynomial in ``z``."""
    b, c, d = -curve.c2, curve.c1, -curve.c0
    disc = 18 * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * c * c * c - 27 * d * d
    return 9.0 * disc


def discriminant_by_resultant(curve: SpectralCurve, z: complex) -> complex:
    """``9 * disc_w`` at one ``z`` via the Sylvester resultant in ``w``."""
    c2, c1, c0 = curve.coefficients_at(z)
    p = Poly([-c0, c1, -c2, 1.0])
    # Res(p, p') = -disc for a monic cubic
    return -9.0 * resultant(p, p.deriv())


# -- branch structure ---------------------------------------------------------

@dataclass(frozen=True)
class BranchStructure:
    gamma1: float
    gamma2: float
    lambda_star: complex | None
    i1: tuple[float, float]
    i2: tuple[float, float]
    factor_residual: float
    a: float = 0.0
    square_factor: Poly | None = None

    @property
    def endpoints(self) -> tuple[float, float, float, float]:
        return (self.i1[0], self.i1[1], self.i2[0], self.i2[1])

    def cut(self, j: int) -> tuple[float, float]:
        return self.i1 if j == 1 else self.i2

    @property
    def min_spacing(self) -> float:
        e = self.endpoints
        return min(e[1] - e[0], e[2] - e[1], e[3] - e[2])

    @property
    def width(self) -> float:
        return min(self.i1[1] - self.i1[0], self.i2[1] - self.i2[0])

    @property
    def safety_radius(self) -> float:
        return SAFETY_FRACTION * self.width

    def which_cut(self, x: float) -> int:
        """1 or 2 if real ``x`` lies in a closed cut, else 0."""
        if self.i1[0] <= x <= self.i1[1]:
            return 1
        if self.i2[0] <= x <= self.i2[1]:
            return 2
        return 0

    @property
    def nodes(self) -> list[complex]:
        """Points where two sheets cross without branching (quartic only)."""
        if self.lambda_star is None:
            return []
        s = complex(self.lambda_star) ** 0.5
        return [s, -s, s.conjugate(), -s.conjugate()]

    def to_dict(self) -> dict:
        ls = self.lambda_star
        return {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "lambda_star": None if ls is None else [ls.real, ls.imag],
            "i1": list(self.i1),
            "i2": list(self.i2),
            "factor_residual": self.factor_residual,
        }


def _signature(rs) -> dict:
    sig = {"positive_simple": 0, "negative_real": 0, "real_multiple": 0,
           "complex_simple": 0, "complex_double": 0, "complex_higher": 0}
    for r, m in zip(rs.roots, rs.multiplicities):
        if r.imag == 0.0:
            if r.real > 0 and m == 1:
                sig["positive_simple"] += 1
            elif m > 1:
                sig["real_multiple"] += 1
            else:
                sig["negative_real"] += 1
        else:
            key = {1: "complex_simple", 2: "complex_double"}.get(m, "complex_higher")
            sig[key] += 1
    return sig


def branch_points(q: Poly, a: float, tol: float = 1e-6) -> BranchStructure:
    """Classify the roots of the sextic ``q(t)``.

    The admissible signature is two simple positive roots ``gamma1**2 <
    gamma2**2`` and one conjugate pair of double roots.
    """
    try:
        rs = roots(q, tol=1e-8)
    except RootFindingError as exc:
        raise BranchClassificationError(f"root finder failed: {exc}") from exc
    # snap numerically real roots
    snapped = []
    for r in rs.roots:
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r)):
            r = complex(r.real, 0.0)
        snapped.append(r)
    rs = type(rs)(snapped, rs.multiplicities, rs.residuals, rs.iterations, rs.converged)
    sig = _signature(rs)
    expected = {"positive_simple": 2, "negative_real": 0, "real_multiple": 0,
                "complex_simple": 0, "complex_double": 2, "complex_higher": 0}
    if sig != expected:
        found = ", ".join(f"{k}={v}" for k, v in sig.items() if v)
        raise BranchClassificationError(f"wrong root signature: {found}", sig)
    t1, t2 = sorted(r.real for r, m in zip(rs.roots, rs.multiplicities) if r.imag == 0.0)
    try:
        s, residual = extract_square_factor(q, [t1, t2], tol=tol)
    except SquareStructureError as exc:
        raise BranchClassificationError(str(exc), sig) from exc
    disc = s.coeffs[1] ** 2 - 4.0 * s.coeffs[0]
    lam = complex(-s.coeffs[1] / 2.0, math.sqrt(max(-disc, 0.0)) / 2.0)
    g1, g2 = math.sqrt(t1), math.sqrt(t2)
    return BranchStructure(g1, g2, lam, (-g2, -g1), (g1, g2), residual, a, s)


def branch_points_general(curve: SpectralCurve) -> BranchStructure:
    """Branch points from the discriminant in ``z`` (two real cuts expected)."""
    disc = discriminant_z(curve)
    try:
        rs = roots(disc, tol=1e-8)
    except RootFindingError as exc:
        raise BranchClassificationError(f"root finder failed: {exc}") from exc
    real_simple = []
    for r, m in zip(rs.roots, rs.multiplicities):
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r)):
            if m != 1:
                raise BranchClassificationError(f"real multiple root at {r.real}")
            real_simple.append(r.real)
    if len(real_simple) != 4:
        raise BranchClassificationError(
            f"expected four real branch points, found {len(real_simple)}",
            {"real_simple": len(real_simple)})
    e = sorted(real_simple)
    sym = abs(e[0] + e[3]) <= 1e-10 * abs(e[3]) and abs(e[1] + e[2]) <= 1e-10 * abs(e[3])
    g1, g2 = (0.5 * (e[2] - e[1]), 0.5 * (e[3] - e[0])) if sym else (e[2], e[3])
    return BranchStructure(g1, g2, None, (e[0], e[1]), (e[2], e[3]), 0.0, curve.a)


def branch_structure(curve: SpectralCurve, tol: float = 1e-6) -> BranchStructure:
    if curve.is_symmetric_quartic:
        return branch_points(discriminant_t(curve), curve.a, tol)
    return branch_points_general(curve)


# -- roots --------------------------------------------------------------------

def _real_scalar(z) -> bool:
    return isinstance(z, (int, float, np.floating)) or (
        isinstance(z, (complex, np.complexfloating)) and z.imag == 0.0)


def roots_at(curve: SpectralCurve, z) -> tuple[complex, complex, complex]:
    """Unlabelled roots of the cubic at ``z``."""
    c2, c1, c0 = curve.coefficients_at(z)
    if _real_scalar(z):
        return kernels.cubic_roots_real(-np.real(c2), np.real(c1), -np.real(c0))
    return kernels.cubic_roots(-c2, c1, -c0)


def roots_at_many(curve: SpectralCurve, zs) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex).ravel()
    c2 = eval_poly(curve.c2, zs)
    c1 = eval_poly(curve.c1, zs)
    c0 = eval_poly(curve.c0, zs)
    return kernels.cubic_roots_batch(-c2, c1, -c0)


def relative_residual(curve: SpectralCurve, z, w) -> float:
    s = curve_scale(curve, z, w)
    r = abs(curve_residual(curve, z, w))
    return r / s if s > 0 else r


# -- labelled sheets ----------------------------------------------------------

@dataclass(frozen=True)
class SheetValues:
    z: complex
    r1: complex
    r2: complex
    r3: complex
    f1: complex
    f2: complex
    residuals: tuple[float, float, float]

    @property
    def r(self) -> tuple[complex, complex, complex]:
        return (self.r1, self.r2, self.r3)


def _make_values(curve: SpectralCurve, z, r) -> SheetValues:
    res = tuple(relative_residual(curve, z, w) for w in r)
    return SheetValues(complex(z), complex(r[0]), complex(r[1]), complex(r[2]),
                       complex(r[0] + curve.a), complex(r[1] - curve.a), res)


class SheetTracker:
    """Continuation engine labelling the sheets of one curve.

    Values at the anchor and the real-axis orderings are cached after the
    first use and never change afterwards.
    """

    def __init__(self, curve: SpectralCurve, branch: BranchStructure | None = None,
                 min_step: float = 1e-13):
        self.curve = curve
        self.branch = branch if branch is not None else branch_structure(curve)
        self.height = 0.25 * self.branch.min_spacing
        self.min_step = min_step
        self.singular = self._singular_points()
        self.anchor, self.anchor_values = self._find_anchor()
        self._orders: dict[int, tuple[int, int, int]] = {}

    def _singular_points(self) -> np.ndarray:
        # zeros of the discriminant: branch points and sheet crossings
        try:
            pts = roots(discriminant_z(self.curve), tol=1e-6).roots
        except RootFindingError:
            pts = list(self.branch.endpoints) + self.branch.nodes
        return np.array(pts, dtype=complex)

    def _step_cap(self, zc: complex, length: float, floor: float) -> float:
        dist = float(np.min(np.abs(self.singular - zc)))
        return min(1.0, max(floor, 0.25 * dist / length))

    # targets at infinity
    def _targets(self, z):
        c = self.curve
        return np.array([-c.a + c.x1 / z, c.a + c.x2 / z, c.vprime(z) - 1.0 / z])

    def _find_anchor(self):
        e = self.branch.endpoints
        R = 2.0 * max(abs(x) for x in e) + 1.0
        for _ in range(60):
            tgt = self._targets(R)
            rts = np.array(roots_at(self.curve, R))
            sep = min(abs(tgt[i] - tgt[j]) for i in range(3) for j in range(i + 1, 3))
            perm = [int(np.argmin(abs(rts - t))) for t in tgt]
            if len(set(perm)) == 3:
                err = max(abs(rts[perm[i]] - tgt[i]) for i in range(3))
                if err <= 0.01 * sep:
                    return R, rts[perm]
            R *= 2.0
        raise RuntimeError("could not separate the sheets at infinity")

    def _step_ok(self, w, pred, new):
        """Match predicted values to new roots; None if ambiguous."""
        motion = np.abs(pred - w)
        perm = []
        for i in range(3):
            d = np.abs(new - pred[i])
            order = np.argsort(d)
            if d[order[0]] > 0.25 * d[order[1]]:
                return None
            perm.append(int(order[0]))
        if len(set(perm)) != 3:
            return None
        # each root must move little compared with its distance to the others
        for i in range(3):
            gap = min(abs(new[perm[i]] - new[k]) for k in range(3) if k != perm[i])
            if gap < 10.0 * motion[i]:
                return None
        return new[perm]

    def _track(self, z0: complex, w: np.ndarray, z1: complex) -> np.ndarray:
        dz = z1 - z0
        length = abs(dz)
        if length == 0.0:
            return w
        s = 0.0
        ds = min(1.0, 0.25 * self.height / length)
        ds_max = ds
        while s < 1.0:
            ds = min(ds, 1.0 - s)
            zc = z0 + s * dz
            zn = z0 + (s + ds) * dz
            pw, pz = self.curve.partials(zc, w)
            slope = np.where(pw != 0, -pz / np.where(pw != 0, pw, 1.0), 0.0)
            pred = w + slope * (zn - zc)
            new = np.array(kernels.cubic_roots(*(-self.curve.c2(zn), self.curve.c1(zn),
                                                 -self.curve.c0(zn))))
            matched = self._step_ok(w, pred, new)
            if matched is None:
                ds *= 0.5
                if ds * length < self.min_step * (1.0 + abs(zc)):
                    dist = min(abs(zc - e) for e in self.branch.endpoints)
                    raise TooCloseToBranchPoint(
                        f"too close to branch point: distance {dist:.3e} at z={zc}", dist)
                continue
            w = matched
            s += ds
            ds = min(ds * 2.0, self._step_cap(zn, length, ds_max))
        return w

    def _continue_upper(self, z: complex) -> np.ndarray:
        R = self.anchor
        w = self.anchor_values.astype(complex)
        if z.imag >= self.height:
            legs = [complex(R, z.imag), z]
        else:
            legs = [complex(R, self.height), complex(z.real, self.height), z]
        zc = complex(R)
        for target in legs:
            w = self._track(zc, w, target)
            zc = target
        return w

    def continue_to(self, z) -> np.ndarray:
        """Labelled ``(r1, r2, r3)`` at ``z`` by path continuation."""
        z = complex(z)
        if z.imag < 0.0:
            return np.conj(self._continue_upper(z.conjugate()))
        if z.imag == 0.0:
            cut = self.branch.which_cut(z.real)
            if cut:
                raise ValueError(f"z={z.real} lies on cut I{cut}; use boundary_values")
        return self._continue_upper(z)

    # real axis
    def _interval_index(self, x: float) -> int:
        e = self.branch.endpoints
        if x < e[0]:
            return 0
        if e[1] < x < e[2]:
            return 1
        if x > e[3]:
            return 2
        raise ValueError(f"x={x} is on a cut")

    def _representative(self, idx: int) -> float:
        e = self.branch.endpoints
        pad = max(1.0, e[3] - e[0])
        return (e[0] - pad, 0.5 * (e[1] + e[2]), e[3] + pad)[idx]

    def real_order(self, idx: int) -> tuple[int, int, int]:
        """Sheet index at each position of the ascending real roots."""
        if idx not in self._orders:
            x = self._representative(idx)
            w = self._continue_upper(complex(x, 0.0)).real
            self._orders[idx] = tuple(int(k) for k in np.argsort(w))
        return self._orders[idx]

    def real_off_cut(self, x: float) -> np.ndarray:
        """Labelled real sheet values at real ``x`` off the cuts."""
        order = self.real_order(self._interval_index(x))
        rts = np.sort(np.real(roots_at(self.curve, float(x))))
        out = np.empty(3)
        for pos, sheet in enumerate(order):
            out[sheet] = rts[pos]
        return out

    def real_upper(self, x: float) -> np.ndarray:
        """Labelled limits from the upper half-plane at real ``x`` (not an endpoint)."""
        j = self.branch.which_cut(x)
        if not j:
            return self.real_off_cut(x).astype(complex)
        return np.array(_cut_values(self.curve, x, j))

    def real_upper_many(self, xs) -> np.ndarray:
        """Vectorised :meth:`real_upper`; returns an ``(N, 3)`` array."""
        xs = np.asarray(xs, dtype=float).ravel()
        rts = roots_at_many(self.curve, xs)
        out = np.empty((xs.size, 3), dtype=complex)
        e = self.branch.endpoints
        for n, x in enumerate(xs):
            j = self.branch.which_cut(x)
            if j:
                rj, rk, r3 = _split_cut_roots(rts[n])
                out[n] = (rj, rk, r3) if j == 1 else (rk, rj, r3)
                continue
            idx = 0 if x < e[0] else (1 if x < e[2] else 2)
            order = self.real_order(idx)
            srt = np.sort(rts[n].real)
            for pos, sheet in enumerate(order):
                out[n, sheet] = srt[pos]
        return out

    def track_along(self, z0: complex, w0, zs) -> np.ndarray:
        """Labelled values at each point of ``zs``, continued from ``(z0, w0)``."""
        out = np.empty((len(zs), 3), dtype=complex)
        zc, w = complex(z0), np.asarray(w0, dtype=complex)
        for n, z in enumerate(zs):
            w = self._track(zc, w, complex(z))
            zc = complex(z)
            out[n] = w
        return out

    def values(self, z) -> SheetValues:
        z = complex(z)
        if z.imag == 0.0:
            r = self.real_off_cut(z.real)
        else:
            r = self.continue_to(z)
        return _make_values(self.curve, z, r)


def _split_cut_roots(rts) -> tuple[complex, complex, complex]:
    """Return ``(rj_plus, rk, r3_plus)`` from the roots at a point of ``I_j``."""
    rts = list(rts)
    cplx = [w for w in rts if w.imag != 0.0]
    if len(cplx) == 2:
        rk = next(w for w in rts if w.imag == 0.0)
        rj_plus = cplx[0] if cplx[0].imag < 0 else cplx[1]
        return rj_plus, rk, rj_plus.conjugate()
    # rounding produced three real roots: the coalescing pair is the closest one
    rs = sorted(rts, key=lambda w: w.real)
    if abs(rs[1] - rs[0]) <= abs(rs[2] - rs[1]):
        return rs[0], rs[2], rs[1]
    return rs[1], rs[0], rs[2]


def _cut_values(curve: SpectralCurve, x: float, j: int) -> tuple[complex, complex, complex]:
    """Upper limits ``(r1+, r2+, r3+)`` at real ``x`` inside ``I_j``."""
    rj, rk, r3 = _split_cut_roots(roots_at(curve, float(x)))
    return (rj, rk, r3) if j == 1 else (rk, rj, r3)


def label_sheets(curve: SpectralCurve, branch: BranchStructure, z,
                 tracker: SheetTracker | None = None) -> SheetValues:
    tracker = tracker or SheetTracker(curve, branch)
    return tracker.values(z)


@dataclass(frozen=True)
class BoundaryValues:
    f_plus: complex
    f_minus: complex
    r3_plus: complex
    r3_minus: complex
    f_other: float

    def __iter__(self):
        return iter((self.f_plus, self.f_minus, self.r3_plus, self.r3_minus))


def boundary_values(curve: SpectralCurve, branch: BranchStructure, x: float, j: int,
                    allow_near_endpoint: bool = False) -> BoundaryValues:
    """Boundary values of ``f_j`` and ``r3`` from both sides of ``I_j``."""
    lo, hi = branch.cut(j)
    if not lo < x < hi:
        raise ValueError(f"x={x} is not inside I{j}=[{lo}, {hi}]")
    if not allow_near_endpoint and min(x - lo, hi - x) < branch.safety_radius:
        raise ValueError(f"x={x} is within the endpoint safety radius of I{j}")
    r = _cut_values(curve, x, j)
    shift = curve.a if j == 1 else -curve.a
    f_plus = r[j - 1] + shift
    k = 2 if j == 1 else 1
    f_other = (r[k - 1] + (curve.a if k == 1 else -curve.a)).real
    return BoundaryValues(f_plus, f_plus.conjugate(), r[2], r[2].conjugate(), f_other)


# -- Cardano auxiliaries ------------------------------------------------------

@dataclass(frozen=True)
class CardanoAux:
    bigR: Poly
    bigH: Poly
    eta: float


def cardano_aux(curve: SpectralCurve, branch: BranchStructure) -> CardanoAux:
    """Auxiliary polynomials of the closed-form cubic solution (quartic only)."""
    if not curve.is_symmetric_quartic:
        raise ValueError("Cardano auxiliaries are defined for the symmetric quartic only")
    al, be, a = curve.params["alpha"], curve.params["beta"], curve.a
    bigR = Poly([0.0, be, 0.0, al / 3.0 + a * a, 0.0, 1.0 / 3.0, 0.0, 0.0, 0.0, -2.0 / 27.0])
    bigH = Poly([-al / 3.0, 0.0, -1.0 / 3.0, 0.0, 0.0, 0.0, 1.0 / 9.0])
    rs = roots(bigR, tol=1e-8)
    pos = sorted(r.real for r in rs.roots if abs(r.imag) <= 1e-9 * (1 + abs(r)) and r.real > 0)
    eta = pos[-1] if pos else float("nan")
    return CardanoAux(bigR, bigH, eta)


def sqrt_minus_q(branch: BranchStructure, z) -> complex:
    """Square root of ``-q(z**2)`` analytic off the two cuts."""
    z = complex(z)
    g1, g2 = branch.gamma1, branch.gamma2
    lam = complex(branch.lambda_star)
    z2 = z * z
    poly = (z2 - lam) * (z2 - lam.conjugate())
    s = np.sqrt(z - g1) * np.sqrt(z - g2) * np.sqrt(z + g1) * np.sqrt(z + g2)
    return complex(6j * branch.a * poly * s)


# -- export -------------------------------------------------------------------

SHEET_COLUMNS = ("z_re", "z_im", "r1_re", "r1_im", "r2_re", "r2_im", "r3_re", "r3_im")


def sheet_sweep(tracker: SheetTracker, zs: Iterable[complex]) -> list[tuple[float, ...]]:
    rows = []
    for z in zs:
        v = tracker.values(z)
        rows.append((v.z.real, v.z.imag, v.r1.real, v.r1.imag,
                     v.r2.real, v.r2.imag, v.r3.real, v.r3.imag))
    return rows


def write_sheet_csv(path, rows: Sequence[Sequence[float]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SHEET_COLUMNS)
        for row in rows:
            w.writerow([f"{x:.17g}" for x in row])
