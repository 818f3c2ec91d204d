"""Numerical certification of the equilibrium conditions for a solved curve.

Every check returns a :class:`CheckRecord` carrying the worst residual or
margin, where it occurred and a pass flag; :func:`full_report` assembles
them into a :class:`VerificationReport`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .curve import SpectralCurve, gaussian_curve
from .density import GFunctionSet, check_g_conditions, density_many, edge_mass, profile
from .params import NoAdmissibleParameters, solve_parameters
from .quad import QuadratureError, cumulative
from .sheets import (BranchClassificationError, BranchStructure, SheetTracker, boundary_values,
                     branch_structure, relative_residual, roots_at)

BOUNDARY_TOL = 1e-10
ENTIRETY_TOL = 1e-8
SIGN_TOL = 1e-6
EXPONENT_BAND = (0.45, 0.55)
INTEGRATED_BAND = (1.45, 1.55)
CONSTANCY_TOL = 1e-6
MASS_TOL = 1e-6


@dataclass
class CheckRecord:
    name: str
    worst: float
    at: float | list | None
    passed: bool
    grid: str = ""
    skipped: bool = False
    detail: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.worst = float(self.worst)
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return {"name": self.name, "worst": self.worst, "at": self.at, "pass": self.passed,
                "grid": self.grid, "skipped": self.skipped, "detail": self.detail}

    @classmethod
    def from_dict(cls, d: dict) -> "CheckRecord":
        return cls(d["name"], d["worst"], d["at"], d["pass"], d.get("grid", ""),
                   d.get("skipped", False), d.get("detail", {}))


def _interior_grid(lo: float, hi: float, n: int, frac: float) -> np.ndarray:
    pad = frac * (hi - lo)
    return np.linspace(lo + pad, hi - pad, n)


def _z_point(z: complex) -> list:
    return [float(z.real), float(z.imag)]


# -- boundary relations ---------------------------------------------------------

def check_boundary_relation(curve: SpectralCurve, branch: BranchStructure, j: int,
                            grid_size: int = 200) -> CheckRecord:
    """``f_j^+ + f_j^- + f_k - V_j'`` on an interior grid of ``I_j``."""
    lo, hi = branch.cut(j)
    pad = 2.0 * branch.safety_radius / (hi - lo)
    xs = _interior_grid(lo, hi, grid_size, pad)
    worst, at, vieta = 0.0, None, 0.0
    for x in xs:
        bv = boundary_values(curve, branch, x, j)
        res = abs(bv.f_plus + bv.f_minus + bv.f_other - curve.vj_prime(j, x))
        if res >= worst:
            worst, at = res, float(x)
        vieta = max(vieta, max(relative_residual(curve, x, w) for w in roots_at(curve, x)))
    return CheckRecord(f"boundary_relation_I{j}", float(worst), at, worst <= BOUNDARY_TOL,
                       f"{grid_size} interior points of I{j}", detail={"vieta_residual": vieta})


# -- signs, variational inequalities and jump phase ------------------------------

def check_measure_sign(curve: SpectralCurve, branch: BranchStructure, j: int,
                       grid_size: int = 200, frac: float = 0.01) -> CheckRecord:
    lo, hi = branch.cut(j)
    xs = _interior_grid(lo, hi, grid_size, frac)
    vals = np.array([2.0 * boundary_values(curve, branch, x, j).f_plus.imag for x in xs])
    i = int(np.argmax(vals))
    return CheckRecord(f"measure_sign_I{j}", float(vals[i]), float(xs[i]), vals[i] <= -SIGN_TOL,
                       f"{grid_size} points at >= {frac:.0%} of I{j} from its ends",
                       detail={"margin": float(-vals[i])})


def variational_chains(curve: SpectralCurve, branch: BranchStructure, tracker: SheetTracker,
                       j: int, grid_size: int = 100, span: float = 10.0) -> dict:
    """Cumulative integrals of ``Re(r_j - r3^-)`` leaving ``I_j`` on both sides.

    Returns per-piece checkpoint arrays ``{label: (xs, values)}``.
    """
    e = branch.endpoints
    lo, hi = branch.cut(j)
    reach = span * max(abs(x) for x in e)

    def integrand(s):
        vals = tracker.real_upper_many(s)
        return (vals[:, j - 1] - np.conj(vals[:, 2])).real

    t = (np.arange(grid_size) + 1.0) / grid_size
    right_pieces = [(a, b) for a, b in ((e[1], e[2]), (e[2], e[3]), (e[3], reach)) if a >= hi]
    left_pieces = [(a, b) for a, b in ((e[1], e[2]), (e[0], e[1]), (-reach, e[0])) if b <= lo]
    out = {}
    for a, b in right_pieces:
        xs = a + (b - a) * t
        out[f"({a:.6g}, {b:.6g})"] = (xs, None)
    for a, b in left_pieces:
        xs = b - (b - a) * t
        out[f"({a:.6g}, {b:.6g})"] = (xs, None)
    right_x = np.concatenate([v[0] for k, v in out.items() if v[0][0] > hi]) if right_pieces else np.zeros(0)
    left_x = np.concatenate([v[0] for k, v in out.items() if v[0][0] < lo]) if left_pieces else np.zeros(0)
    vals_r = cumulative(integrand, hi, right_x, e, order=32).real if right_x.size else np.zeros(0)
    vals_l = cumulative(integrand, lo, left_x, e, order=32).real if left_x.size else np.zeros(0)
    lookup = dict(zip(right_x.tolist(), vals_r.tolist()))
    lookup.update(zip(left_x.tolist(), vals_l.tolist()))
    return {k: (xs, np.array([lookup[x] for x in xs.tolist()])) for k, (xs, _) in out.items()}


def check_variational(curve: SpectralCurve, branch: BranchStructure, tracker: SheetTracker,
                      j: int, grid_size: int = 100) -> CheckRecord:
    chains = variational_chains(curve, branch, tracker, j, grid_size)
    worst, at, margins = -math.inf, None, {}
    for label, (xs, vals) in chains.items():
        i = int(np.argmax(vals))
        margins[label] = float(-vals[i])
        if vals[i] > worst:
            worst, at = float(vals[i]), float(xs[i])
    return CheckRecord(f"variational_I{j}", worst, at, worst < 0.0,
                       f"{grid_size} checkpoints on each of {len(chains)} intervals, truncated at 10*max|endpoint|",
                       detail={"margins": margins})


def jump_phase(curve: SpectralCurve, branch: BranchStructure, j: int, xs) -> np.ndarray:
    """``theta_j(x) = (2 pi / x_j) int_x^{delta_j} rho``."""
    lo, hi = branch.cut(j)
    xj = curve.x1 if j == 1 else curve.x2
    f = lambda s: density_many(curve, branch, s)  # noqa: E731
    integ = cumulative(f, hi, np.asarray(xs, dtype=float), (lo, hi), order=32).real
    return -2.0 * math.pi / xj * integ


def check_jump_phase(curve: SpectralCurve, branch: BranchStructure, j: int,
                     grid_size: int = 200) -> CheckRecord:
    lo, hi = branch.cut(j)
    xs = np.linspace(lo, hi, grid_size + 2)[1:-1]
    theta = jump_phase(curve, branch, j, xs)
    steps = np.diff(theta)
    i = int(np.argmax(steps))
    full = float(jump_phase(curve, branch, j, [lo])[0])
    ok = bool(np.all(steps < 0) and np.all(theta > 0) and abs(full - 2 * math.pi) <= 1e-5)
    return CheckRecord(f"jump_phase_decreasing_I{j}", float(steps[i]), float(xs[i]), ok,
                       f"{grid_size} interior points of I{j}",
                       detail={"theta_left": full, "theta_min": float(theta.min())})


# -- edge exponents -------------------------------------------------------------

def edge_samples(curve: SpectralCurve, branch: BranchStructure, endpoint: float,
                 ks=(2, 3, 4, 5)) -> tuple[np.ndarray, np.ndarray]:
    """Distances into the cut and ``-Im f_j^+`` there."""
    j = branch.which_cut(endpoint)
    if not j:
        raise ValueError(f"{endpoint} is not a cut endpoint")
    lo, hi = branch.cut(j)
    width = branch.gamma2 - branch.gamma1
    inward = 1.0 if endpoint == lo else -1.0
    ds = np.array([10.0 ** -k * width for k in ks])
    ys = density_many(curve, branch, endpoint + inward * ds) * math.pi
    return ds, ys


def check_edge_exponent(curve: SpectralCurve, branch: BranchStructure,
                        endpoint: float) -> CheckRecord:
    ds, ys = edge_samples(curve, branch, endpoint)
    if np.any(ys <= 0):
        raise ValueError(f"insufficient clean samples near {endpoint}: {ys}")
    slope = float(np.polyfit(np.log(ds), np.log(ys), 1)[0])
    masses = np.array([edge_mass(curve, branch, endpoint, d) for d in ds])
    slope_int = float(np.polyfit(np.log(ds), np.log(masses), 1)[0])
    ok = EXPONENT_BAND[0] <= slope <= EXPONENT_BAND[1]
    ok_int = INTEGRATED_BAND[0] <= slope_int <= INTEGRATED_BAND[1]
    return CheckRecord(f"edge_exponent_{endpoint:+.6f}", slope, float(endpoint), ok and ok_int,
                       "distances 1e-2..1e-5 of (gamma2 - gamma1)",
                       detail={"integrated_exponent": slope_int})


# -- entirety of H2 and H3 -----------------------------------------------------------

def h2(curve: SpectralCurve, z, f1, f2):
    return f1 * f1 + f1 * f2 + f2 * f2 - f1 * curve.vj_prime(1, z) - f2 * curve.vj_prime(2, z)


def h3(curve: SpectralCurve, z, f1, f2):
    v1, v2 = curve.vj_prime(1, z), curve.vj_prime(2, z)
    return f1 * f2 * (f1 + f2) - v1 * f1 * (v1 - f1) - v2 * f2 * (v2 - f2)


def h3_scale(curve: SpectralCurve, z, f1, f2) -> float:
    v1, v2 = curve.vj_prime(1, z), curve.vj_prime(2, z)
    return abs(f1 * f2 * (f1 + f2)) + abs(v1 * f1 * (v1 - f1)) + abs(v2 * f2 * (v2 - f2))


def h2_expected(curve: SpectralCurve, z):
    return -curve.c1(z) - curve.a ** 2


def h3_expected(curve: SpectralCurve, z):
    return (-curve.c1(z) - 2.0 * curve.a ** 2) * curve.vprime(z) - curve.c0(z)


def entirety_points(branch: BranchStructure, n: int = 50, seed: int = 11) -> list[complex]:
    """Seeded sample: a box around the cuts plus points within 1e-3 of them."""
    rng = np.random.default_rng(seed)
    g = max(abs(e) for e in branch.endpoints)
    n_near = n // 5
    pts = []
    for _ in range(n - n_near):
        pts.append(complex(rng.uniform(-1.5 * g, 1.5 * g), rng.uniform(-g, g)))
    for _ in range(n_near):
        j = int(rng.integers(1, 3))
        lo, hi = branch.cut(j)
        x = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo))
        y = rng.uniform(1e-5, 1e-3) * (1 if rng.random() < 0.5 else -1)
        pts.append(complex(x, y))
    return pts


def check_entirety(curve: SpectralCurve, branch: BranchStructure, tracker: SheetTracker,
                   n_points: int = 50, grid_size: int = 100, seed: int = 11) -> list[CheckRecord]:
    recs = []
    # identities at scattered complex points
    worst2, at2, worst3, at3 = 0.0, None, 0.0, None
    for z in entirety_points(branch, n_points, seed):
        v = tracker.values(z)
        r2 = abs(h2(curve, z, v.f1, v.f2) - h2_expected(curve, z)) / (1.0 + abs(z) ** 2)
        r3 = abs(h3(curve, z, v.f1, v.f2) - h3_expected(curve, z)) / max(h3_scale(curve, z, v.f1, v.f2), 1.0)
        if r2 >= worst2:
            worst2, at2 = r2, _z_point(z)
        if r3 >= worst3:
            worst3, at3 = r3, _z_point(z)
    recs.append(CheckRecord("h2_identity", worst2, at2, worst2 <= ENTIRETY_TOL,
                            f"{n_points} seeded complex points, scale 1+|z|^2"))
    recs.append(CheckRecord("h3_identity", worst3, at3, worst3 <= ENTIRETY_TOL,
                            f"{n_points} seeded complex points, relative to term magnitudes"))
    # jumps across the cuts
    for name, fn in (("h2", h2), ("h3", h3)):
        worst, at = 0.0, None
        for j in (1, 2):
            lo, hi = branch.cut(j)
            for x in _interior_grid(lo, hi, grid_size, 0.001):
                bv = boundary_values(curve, branch, x, j)
                fo = bv.f_other
                if j == 1:
                    jump = fn(curve, x, bv.f_plus, fo) - fn(curve, x, bv.f_minus, fo)
                else:
                    jump = fn(curve, x, fo, bv.f_plus) - fn(curve, x, fo, bv.f_minus)
                if abs(jump) >= worst:
                    worst, at = abs(jump), float(x)
        recs.append(CheckRecord(f"{name}_jump", worst, at, worst <= ENTIRETY_TOL,
                                f"{grid_size} interior points per cut"))
    recs.append(uniqueness_probe(curve, tracker))
    return recs


def uniqueness_probe(curve: SpectralCurve, tracker: SheetTracker,
                     z: complex = complex(1.0, 2.0)) -> CheckRecord:
    """Perturb ``f2`` by ``eps / z**2``; the ``H2`` identity must break linearly."""
    v = tracker.values(z)
    base = h2_expected(curve, z)
    eps = [1e-2, 1e-3, 1e-4]
    errs = [abs(h2(curve, z, v.f1, v.f2 + e / z ** 2) - base) for e in eps]
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    worst = max(abs(r - 10.0) for r in ratios)
    return CheckRecord("uniqueness_probe", float(worst), _z_point(z), worst <= 0.5,
                       "eps in 1e-2, 1e-3, 1e-4", detail={"errors": errs, "ratios": ratios})


# -- report ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    a: float
    alpha: float | None
    beta: float | None
    gamma1: float | None
    gamma2: float | None
    checks: list
    field: str = "quartic"
    tolerances: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"a": self.a, "alpha": self.alpha, "beta": self.beta, "gamma1": self.gamma1,
                "gamma2": self.gamma2, "field": self.field, "tolerances": self.tolerances,
                "checks": [c.to_dict() for c in self.checks], "pass": self.passed}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["a"], d["alpha"], d["beta"], d["gamma1"], d["gamma2"],
                   [CheckRecord.from_dict(c) for c in d["checks"]], d.get("field", "quartic"),
                   d.get("tolerances", {}))


def _failed(name: str, exc: Exception) -> CheckRecord:
    return CheckRecord(name, math.inf, None, False, skipped=True, detail={"error": str(exc)})


def full_report(a: float, field_kind: str = "quartic", x2: float = 0.5,
                grid_size: int = 200, tol: float = 1e-12) -> VerificationReport:
    """Solve, classify and run every check; failures are recorded, not raised."""
    tolerances = {"solver": tol, "boundary": BOUNDARY_TOL, "entirety": ENTIRETY_TOL,
                  "sign": SIGN_TOL, "exponent_band": list(EXPONENT_BAND),
                  "constancy": CONSTANCY_TOL, "mass": MASS_TOL}
    report = VerificationReport(float(a), None, None, None, None, [], field_kind, tolerances)
    checks = report.checks
    try:
        if field_kind == "quartic":
            params = solve_parameters(a, tol)
            report.alpha, report.beta = params.alpha, params.beta
            checks.append(CheckRecord("parameter_gradient", params.grad_norm, [params.alpha, params.beta],
                                      params.grad_norm <= tol, "rescaled units",
                                      detail={"iterations": params.iterations}))
            checks.append(CheckRecord("b2_residual", params.b2_residual, [params.alpha, params.beta],
                                      params.b2_residual <= tol, "rescaled units"))
            curve = params.curve()
        else:
            curve = gaussian_curve(a, x2)
        branch = branch_structure(curve)
    except (NoAdmissibleParameters, BranchClassificationError, ValueError) as exc:
        checks.append(_failed("solve_and_classify", exc))
        return report
    report.gamma1, report.gamma2 = branch.gamma1, branch.gamma2
    if field_kind == "quartic":
        checks.append(CheckRecord("square_factor_residual", branch.factor_residual, None,
                                  branch.factor_residual <= 1e-6, "coefficients of q(t)"))
    tracker = SheetTracker(curve, branch)

    def run(name, fn):
        try:
            out = fn()
        except (QuadratureError, ValueError, RuntimeError) as exc:
            checks.append(_failed(name, exc))
            return
        checks.extend(out if isinstance(out, list) else [out])

    for j in (1, 2):
        run(f"boundary_relation_I{j}", lambda j=j: check_boundary_relation(curve, branch, j, grid_size))
    for j in (1, 2):
        run(f"measure_sign_I{j}", lambda j=j: check_measure_sign(curve, branch, j, grid_size))
    for j in (1, 2):
        run(f"variational_I{j}", lambda j=j: check_variational(curve, branch, tracker, j, grid_size // 2))
    for j in (1, 2):
        run(f"jump_phase_decreasing_I{j}", lambda j=j: check_jump_phase(curve, branch, j, grid_size))
    for e in branch.endpoints:
        run(f"edge_exponent_{e:+.6f}", lambda e=e: check_edge_exponent(curve, branch, e))
    run("entirety", lambda: check_entirety(curve, branch, tracker))

    def mass_checks():
        prof = profile(curve, branch, grid_size)
        targets = (curve.x1, curve.x2)
        recs = [CheckRecord(f"mass_I{j}", abs(m - t), None, abs(m - t) <= MASS_TOL, "128-node rule")
                for j, (m, t) in enumerate(zip(prof.masses, targets), start=1)]
        recs.append(CheckRecord("total_mass", abs(prof.total_mass - 1.0), None,
                                abs(prof.total_mass - 1.0) <= MASS_TOL, "sum of cut masses"))
        return recs

    run("mass", mass_checks)

    def g_checks():
        gset = GFunctionSet(curve, branch, tracker)
        recs = []
        for j in (1, 2):
            gc = check_g_conditions(curve, branch, j, gset, grid_size)
            recs.append(CheckRecord(f"g_equality_I{j}", gc.constancy_dev, None,
                                    gc.constancy_dev <= CONSTANCY_TOL, f"{grid_size} points of I{j}",
                                    detail={"ell": gc.ell, "imag_offset": gc.imag_offset}))
            recs.append(CheckRecord(f"g_inequality_I{j}", gc.outside_margin, gc.argmax_outside,
                                    gc.outside_margin < 0.0, "complement of I{j} within 10*max|endpoint|"))
        return recs

    run("g_conditions", g_checks)
    return report


def probe_threshold(a_values, field_kind: str = "quartic", grid_size: int = 100) -> dict:
    """Smallest ``a`` (scanning downward) with every check passing."""
    results = {}
    smallest = None
    for a in sorted(a_values, reverse=True):
        rep = full_report(a, field_kind, grid_size=grid_size)
        results[a] = rep.passed
        if not rep.passed:
            break
        smallest = a
    return {"smallest_passing": smallest, "results": results}
