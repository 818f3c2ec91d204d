"""Limiting eigenvalue density, g-functions and the g-level equilibrium checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import SpectralCurve
from .poly import Poly, eval_poly
from .quad import checked_panel, cumulative, gl_nodes, integrate_panel
from .sheets import BranchStructure, SheetTracker, _split_cut_roots, roots_at, roots_at_many


def _shift(curve: SpectralCurve, j: int) -> float:
    return curve.a if j == 1 else -curve.a


def density_at(curve: SpectralCurve, branch: BranchStructure, x: float) -> float:
    """``-Im f_j^+(x) / pi`` on ``I_j`` and zero elsewhere."""
    j = branch.which_cut(x)
    lo, hi = branch.cut(j) if j else (0.0, 0.0)
    if not j or x <= lo or x >= hi:
        return 0.0
    rj, _, _ = _split_cut_roots(roots_at(curve, float(x)))
    return max(0.0, -rj.imag / math.pi)


def density_many(curve: SpectralCurve, branch: BranchStructure, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float).ravel()
    rts = roots_at_many(curve, xs)
    out = np.zeros(xs.size)
    for n, x in enumerate(xs):
        j = branch.which_cut(x)
        if not j:
            continue
        lo, hi = branch.cut(j)
        if lo < x < hi:
            rj, _, _ = _split_cut_roots(rts[n])
            out[n] = max(0.0, -rj.imag / math.pi)
    return out


@dataclass
class DensityProfile:
    support: list
    xs: np.ndarray
    rho: np.ndarray
    masses: list
    total_mass: float
    cdf_x: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    cdf_y: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))

    def cdf(self, x):
        """Cumulative mass up to ``x`` (linear between fine knots)."""
        return np.interp(x, self.cdf_x, self.cdf_y, left=0.0, right=self.total_mass)

    def to_dict(self) -> dict:
        return {
            "support": [list(map(float, s)) for s in self.support],
            "masses": [float(m) for m in self.masses],
            "total_mass": float(self.total_mass),
            "xs": [float(x) for x in self.xs],
            "rho": [float(r) for r in self.rho],
        }


def _theta_mass(curve, branch, lo, hi, t0, t1, order=64) -> float:
    # mass of [lo + h(1 - cos t0), ...] via x = c - h cos(theta)
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    f = lambda th: density_many(curve, branch, c - h * np.cos(th)) * h * np.sin(th)  # noqa: E731
    x, w = gl_nodes(order)
    half, mid = 0.5 * (t1 - t0), 0.5 * (t1 + t0)
    return float(half * np.dot(w, f(mid + half * x)))


def profile(curve: SpectralCurve, branch: BranchStructure, points_per_cut: int = 200,
            cdf_knots: int = 400) -> DensityProfile:
    """Density on a Chebyshev grid per cut, cut masses and a fine CDF table."""
    xs, rho, masses = [], [], []
    cdf_x, cdf_y = [], []
    acc = 0.0
    for j in (1, 2):
        lo, hi = branch.cut(j)
        c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        k = np.arange(points_per_cut)
        grid = c - h * np.cos(math.pi * (k + 0.5) / points_per_cut)
        xs.append(grid)
        rho.append(density_many(curve, branch, grid))
        masses.append(_theta_mass(curve, branch, lo, hi, 0.0, math.pi, 128))
        thetas = np.linspace(0.0, math.pi, cdf_knots + 1)
        part = [0.0]
        for t0, t1 in zip(thetas[:-1], thetas[1:]):
            part.append(part[-1] + _theta_mass(curve, branch, lo, hi, t0, t1, 8))
        cdf_x.append(c - h * np.cos(thetas))
        cdf_y.append(acc + np.array(part))
        acc += part[-1]
    return DensityProfile(
        support=[branch.i1, branch.i2],
        xs=np.concatenate(xs),
        rho=np.concatenate(rho),
        masses=masses,
        total_mass=float(sum(masses)),
        cdf_x=np.concatenate(cdf_x),
        cdf_y=np.concatenate(cdf_y),
    )


def edge_mass(curve: SpectralCurve, branch: BranchStructure, endpoint: float, d: float) -> float:
    """Mass of the density between ``endpoint`` and the point ``d`` inside its cut."""
    j = branch.which_cut(endpoint)
    lo, hi = branch.cut(j)
    f = lambda x: density_many(curve, branch, x)  # noqa: E731
    if endpoint == lo:
        return float(integrate_panel(f, lo, lo + d, True, False, 32))
    return float(integrate_panel(f, hi - d, hi, False, True, 32))


# -- g-functions ---------------------------------------------------------------

def _antiderivative(p: Poly) -> Poly:
    return Poly([0.0] + [c / (k + 1) for k, c in enumerate(p.coeffs)])


class GFunctionSet:
    """``g_j(z) = (1/x_j) int_{delta_j}^z f_j - c_j`` and ``g_0 = x_1 g_1 + x_2 g_2``.

    ``delta_j`` is the right end of ``I_j`` and ``c_j`` makes ``g_j - log z``
    vanish at infinity.
    """

    def __init__(self, curve: SpectralCurve, branch: BranchStructure,
                 tracker: SheetTracker | None = None, cutoff_factor: float = 1e4):
        self.curve = curve
        self.branch = branch
        self.tracker = tracker or SheetTracker(curve, branch)
        self.x = {1: curve.x1, 2: curve.x2}
        self.v = _antiderivative(curve.c2)
        self.cutoff = cutoff_factor * max(abs(e) for e in branch.endpoints)
        self.c = {1: self._constant(1), 2: self._constant(2)}
        self.ell: dict[int, float] = {}

    def f_real(self, j: int, xs) -> np.ndarray:
        """``f_j`` limits from above at real points."""
        vals = self.tracker.real_upper_many(xs)[:, j - 1]
        return vals + _shift(self.curve, j)

    def _constant(self, j: int) -> float:
        lo, delta = self.branch.cut(j)
        xj = self.x[j]
        s0 = lo
        f = lambda s: (self.f_real(j, s) - xj / (s - s0)).real  # noqa: E731
        sing = sorted(self.branch.endpoints)
        knots = [delta] + [e for e in sing if e > delta]
        L = self.cutoff
        step = delta - lo
        while knots[-1] + step < L:
            knots.append(knots[-1] + step)
            step *= 2.0
        knots.append(L)
        total = 0.0
        # f_j = r_j -/+ a loses about log10(a) digits to cancellation
        noise = 1e-14 * (1.0 + self.curve.a + max(abs(e) for e in sing) ** 3)
        for a, b in zip(knots[:-1], knots[1:]):
            total += checked_panel(f, a, b, a in sing, b in sing, 64, 1e-9, noise * (b - a))
        tail = L * f(np.array([L]))[0]
        total += tail
        return float(total / xj - math.log(delta - s0))

    def V(self, j: int, z):
        return eval_poly(self.v, z) + (self.curve.a if j == 1 else -self.curve.a) * z

    def g(self, j: int, z) -> complex:
        """``g_j`` at ``z`` off ``(-inf, delta_j]``; on that ray, the limit from above."""
        z = complex(z)
        if z.imag < 0:
            return self.g(j, z.conjugate()).conjugate()
        if z.imag == 0.0:
            return complex(self.g_upper_real(j, [z.real])[0])
        # g^+ at Re z, then straight up
        x0 = z.real
        e = np.asarray(self.branch.endpoints)
        d = float(np.min(np.abs(e - x0)))
        if d == 0.0:
            x0 += 1e-12 * (1.0 + abs(x0))
            d = float(np.min(np.abs(e - x0)))
        base = complex(self.g_upper_real(j, [x0])[0])
        return base + self._vertical(j, x0, z.imag, d) / self.x[j]

    def _vertical(self, j: int, x0: float, height: float, d: float, order: int = 32) -> complex:
        """``int_0^height f_j(x0 + i t) i dt`` with panels doubling away from the axis."""
        knots = [0.0, min(height, 0.5 * d)]
        while knots[-1] < height:
            knots.append(min(height, 2.0 * knots[-1]))
        xg, wg = gl_nodes(order)
        w = self.tracker.real_upper(x0)
        zc = complex(x0, 0.0)
        shift = _shift(self.curve, j)
        total = 0j
        for k, (t0, t1) in enumerate(zip(knots[:-1], knots[1:])):
            if k == 0:
                # t = u**2 absorbs a square-root start near an endpoint
                u = 0.5 * math.sqrt(t1) * (xg + 1.0)
                ts, ws = u * u, 0.5 * math.sqrt(t1) * wg * 2.0 * u
            else:
                ts = t0 + 0.5 * (t1 - t0) * (xg + 1.0)
                ws = 0.5 * (t1 - t0) * wg
            pts = x0 + 1j * ts
            vals = self.tracker.track_along(zc, w, pts)
            total += 1j * np.dot(ws, vals[:, j - 1] + shift)
            zc, w = complex(x0, t1), self.tracker.track_along(pts[-1], vals[-1], [complex(x0, t1)])[0]
        return total

    def g_upper_real(self, j: int, xs) -> np.ndarray:
        """``g_j^+`` at real points by integration along the upper side of the axis."""
        xs = np.asarray(xs, dtype=float)
        _, delta = self.branch.cut(j)
        xj = self.x[j]
        f = lambda s: self.f_real(j, s)  # noqa: E731
        integ = cumulative(f, delta, xs, self.branch.endpoints, order=32)
        return integ / xj - self.c[j]

    def g0(self, z) -> complex:
        return self.x[1] * self.g(1, z) + self.x[2] * self.g(2, z)

    def combination(self, j: int, xs) -> np.ndarray:
        """``g0^- + x_j g_j^+ - V_j`` at real points (before subtracting ``x_j ell_j``)."""
        xs = np.asarray(xs, dtype=float)
        gp = {k: self.g_upper_real(k, xs) for k in (1, 2)}
        g0_minus = self.x[1] * np.conj(gp[1]) + self.x[2] * np.conj(gp[2])
        return g0_minus + self.x[j] * gp[j] - self.V(j, xs)


def g_function(curve: SpectralCurve, branch: BranchStructure, j: int, z,
               gset: GFunctionSet | None = None) -> complex:
    z = complex(z)
    _, delta = branch.cut(j)
    if z.imag == 0.0 and z.real <= delta:
        raise ValueError(f"z={z.real} lies on the branch ray (-inf, {delta}] of g_{j}")
    gset = gset or GFunctionSet(curve, branch)
    return gset.g(j, z)


@dataclass(frozen=True)
class GConditions:
    ell: float
    constancy_dev: float
    outside_margin: float
    imag_offset: float
    argmax_outside: float


def check_g_conditions(curve: SpectralCurve, branch: BranchStructure, j: int,
                       gset: GFunctionSet | None = None, grid_size: int = 200,
                       span: float = 10.0) -> GConditions:
    """Equality on ``I_j`` and strict inequality off it, at the g level.

    ``ell_j`` is real; the combination keeps a constant imaginary part from
    the branch of the logarithms, reported as ``imag_offset``.
    """
    gset = gset or GFunctionSet(curve, branch)
    lo, hi = branch.cut(j)
    k = np.arange(grid_size)
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    on = c - h * np.cos(math.pi * (k + 0.5) / grid_size)
    mid = np.array([c])
    e_mid = gset.combination(j, mid)[0]
    xj = gset.x[j]
    ell = e_mid.real / xj
    e_on = gset.combination(j, on) - xj * ell
    dev = float(np.max(np.abs(e_on - (e_mid - xj * ell))))
    reach = span * max(abs(x) for x in branch.endpoints)
    off = _complement_grid(branch, j, reach, grid_size)
    e_off = (gset.combination(j, off) - xj * ell).real
    i = int(np.argmax(e_off))
    gset.ell[j] = ell
    return GConditions(float(ell), dev, float(e_off[i]), float(e_mid.imag), float(off[i]))


def _complement_grid(branch: BranchStructure, j: int, reach: float, n: int) -> np.ndarray:
    e = branch.endpoints
    lo, hi = branch.cut(j)
    pieces = [(-reach, e[0]), (e[1], e[2]), (e[3], reach)]
    other = branch.cut(2 if j == 1 else 1)
    pieces.append(other)
    pts = []
    for a, b in pieces:
        if (a, b) == (lo, hi):
            continue
        t = (np.arange(n) + 0.5) / n
        pts.append(a + (b - a) * t)
    return np.sort(np.concatenate(pts))
