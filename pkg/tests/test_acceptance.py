"""Acceptance criteria 1 to 11, one test each.

Every test records a ``criterion N: PASS|FAIL | detail`` line (shown in the
pytest terminal summary and printed directly) and then asserts the criterion
exactly as stated. Run standalone with ``python3 tests/test_acceptance.py``.
"""
import hashlib
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from extsource.density import GFunctionSet, check_g_conditions, density_many, profile
from extsource.mc import McConfig, cluster_edges, compare_histogram, gaussian_profile, sample_spectrum_gaussian
from extsource.params import (calibrate_kappa, corrected_identity_ratio, identity_ratio, solve_parameters,
                              sweep_points)
from extsource.sheets import SheetTracker, branch_points, branch_structure, discriminant_t
from extsource.verify import (check_boundary_relation, check_edge_exponent, check_entirety,
                              check_jump_phase, check_measure_sign, check_variational)

A10 = 10.0


def _record(log, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
    print(line)
    log.append(line)
    assert ok, line


@pytest.fixture(scope="module")
def solved():
    return {a: solve_parameters(a) for a in (5.0, 10.0, 20.0, 50.0)}


@pytest.fixture(scope="module")
def setup10(solved):
    curve = solved[A10].curve()
    branch = branch_structure(curve)
    return curve, branch, SheetTracker(curve, branch)


def test_criterion_01_resultant_identity(acceptance_log):
    t0 = time.perf_counter()
    calibrate_kappa.cache_clear()
    pts = sweep_points(100)
    kappa = calibrate_kappa(100)
    ratios = np.array([identity_ratio(*p) for p in pts])
    worst = float(np.max(np.abs(ratios / kappa - 1.0)))
    elapsed = time.perf_counter() - t0
    fixed = np.array([corrected_identity_ratio(*p) for p in pts])
    spread_fixed = float(np.max(np.abs(fixed / fixed[0] - 1.0)))
    ok = worst <= 1e-6 and elapsed < 10.0
    _record(acceptance_log, 1, ok,
            f"max |ratio/kappa - 1| = {worst:.3e} over {len(pts)} points (tol 1e-6), {elapsed:.1f}s; "
            f"Res/(a^2 B1^3 B2) spread {spread_fixed:.1e}")


def test_criterion_02_parameter_expansions(acceptance_log):
    t0 = time.perf_counter()
    worst, iters = 0.0, []
    ok = True
    for a in (5.0, 10.0, 20.0, 50.0):
        p = solve_parameters(a)
        da = abs(p.alpha / a ** 2 - (-1 + a ** (-4 / 3))) / a ** (-8 / 3)
        db = abs(p.beta / a ** (4 / 3) - (1 - a ** (-4 / 3) / 3)) / a ** (-8 / 3)
        worst = max(worst, da, db)
        iters.append(p.iterations)
        ok &= p.iterations <= 30 and da <= 1 and db <= 1
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 5.0
    _record(acceptance_log, 2, ok,
            f"worst deviation {worst:.3f} a^(-8/3), Newton steps {iters}, {elapsed:.2f}s")


def test_criterion_03_hessian_scale(acceptance_log, solved):
    ratios = {a: solved[a].hessian_ratio for a in (5.0, 10.0, 20.0, 50.0)}
    raw = {a: solved[a].hessian_ratio_raw for a in (20.0, 50.0)}
    ok = all(0.8 <= ratios[a] <= 1.25 for a in (20.0, 50.0))
    _record(acceptance_log, 3, ok,
            "rescaled |det|/(4782969 a^(80/3)) = "
            + ", ".join(f"{r:.3f} (a={a:g})" for a, r in ratios.items())
            + "; in (alpha, beta) units " + ", ".join(f"{r:.2e} (a={a:g})" for a, r in raw.items()))


def test_criterion_04_branch_structure(acceptance_log, solved):
    ok, parts = True, []
    for a in (10.0, 20.0, 50.0):
        b = branch_points(discriminant_t(solved[a].curve()), a)
        target = a ** (2 / 3) * (1 + 2 * math.sqrt(2 / 3) * a ** (-2 / 3))
        dev = abs(b.gamma2 ** 2 - target)
        ok &= b.factor_residual <= 1e-6 and dev <= 5 * a ** (-2 / 3)
        parts.append(f"a={a:g}: residual {b.factor_residual:.1e}, |gamma2^2 - approx| {dev:.3f}")
    _record(acceptance_log, 4, ok, "; ".join(parts))


def test_criterion_05_boundary_relations(acceptance_log, setup10):
    curve, branch, _ = setup10
    recs = [check_boundary_relation(curve, branch, j, 200) for j in (1, 2)]
    worst = max(r.worst for r in recs)
    _record(acceptance_log, 5, worst <= 1e-10, f"max residual {worst:.2e} over 2 x 200 points")


def test_criterion_06_signs(acceptance_log, setup10):
    curve, branch, tracker = setup10
    signs = [check_measure_sign(curve, branch, j, 200) for j in (1, 2)]
    var = [check_variational(curve, branch, tracker, j, 100) for j in (1, 2)]
    phase = [check_jump_phase(curve, branch, j, 200) for j in (1, 2)]
    margins = {f"I{j} {k}": v for j, r in enumerate(var, 1) for k, v in r.detail["margins"].items()}
    ok = all(r.worst <= -1e-6 for r in signs) and all(m > 0 for m in margins.values())
    ok &= all(r.passed for r in phase)
    _record(acceptance_log, 6, ok,
            f"max 2 Im f+ = {max(r.worst for r in signs):.3f}; variational margins "
            + ", ".join(f"{k} {v:.3e}" for k, v in margins.items()))


def test_criterion_07_edge_exponents(acceptance_log, setup10):
    curve, branch, _ = setup10
    slopes = [check_edge_exponent(curve, branch, e).worst for e in branch.endpoints]
    ok = all(0.45 <= s <= 0.55 for s in slopes)
    _record(acceptance_log, 7, ok, "slopes " + ", ".join(f"{s:.4f}" for s in slopes))


def test_criterion_08_entirety(acceptance_log, setup10):
    curve, branch, tracker = setup10
    recs = {r.name: r for r in check_entirety(curve, branch, tracker, n_points=50)}
    ok = all(recs[k].worst <= 1e-8 for k in ("h2_identity", "h2_jump", "h3_jump"))
    _record(acceptance_log, 8, ok,
            f"H2 identity {recs['h2_identity'].worst:.1e} (x(1+|z|^2)), jumps H2 {recs['h2_jump'].worst:.1e}, "
            f"H3 {recs['h3_jump'].worst:.1e}; H3 identity {recs['h3_identity'].worst:.1e}")


def test_criterion_09_density(acceptance_log, setup10):
    curve, branch, tracker = setup10
    prof = profile(curve, branch, 200)
    sym = float(np.max(np.abs(prof.rho - density_many(curve, branch, -prof.xs))))
    gset = GFunctionSet(curve, branch, tracker)
    z = 100 * branch.gamma2
    decay = max(abs(gset.g(j, z) - math.log(z)) for j in (1, 2))
    conds = [check_g_conditions(curve, branch, j, gset) for j in (1, 2)]
    ok = (abs(prof.total_mass - 1) <= 1e-6 and all(abs(m - 0.5) <= 1e-6 for m in prof.masses)
          and sym <= 1e-10 and decay <= 1e-3
          and all(c.constancy_dev <= 1e-6 and c.outside_margin < 0 for c in conds))
    _record(acceptance_log, 9, ok,
            f"mass {prof.total_mass:.15f}, cuts {prof.masses[0]:.12f}/{prof.masses[1]:.12f}, symmetry {sym:.1e}, "
            f"|g - log z| at 100 gamma2 = {decay:.2e} (tol 1e-3), constancy "
            f"{max(c.constancy_dev for c in conds):.1e}, outside margin {max(c.outside_margin for c in conds):.2e}")


def test_criterion_10_monte_carlo(acceptance_log):
    t0 = time.perf_counter()
    ok, parts = True, []
    for a in (2.0, 3.0):
        batch = sample_spectrum_gaussian(McConfig(400, 100, 2024, 80), a)
        prof = gaussian_profile(a)
        sup, _ = compare_histogram(batch, prof)
        edges = cluster_edges(batch)
        bps = [e for s in prof.support for e in s]
        edge_dev = max(abs(x - y) for x, y in zip(edges, bps))
        ok &= sup <= 0.02 and edge_dev < 0.1
        parts.append(f"a={a:g}: cdf sup {sup:.4f}, edge deviation {edge_dev:.3f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed <= 300
    _record(acceptance_log, 10, ok, "; ".join(parts) + f", {elapsed:.0f}s")


def test_criterion_11_determinism(acceptance_log, tmp_path):
    commands = [
        ["mc", "--a", "2", "--n", "400", "--samples", "100", "--seed", "7"],
        ["density", "--a", "10", "--grid", "400", "--format", "csv"],
        ["quartic-solve", "--a", "10", "--format", "json"],
        ["verify", "--a", "10", "--grid", "100", "--format", "json"],
        ["gaussian-curve", "--a", "2", "--format", "csv"],
    ]
    digests = {}
    ok = True
    for cmd in commands:
        hashes = []
        for k in range(2):
            path = tmp_path / f"{cmd[0]}_{k}.out"
            subprocess.run([sys.executable, "-m", "extsource", *cmd, "--out", str(path)],
                           check=True, env=dict(os.environ))
            hashes.append(hashlib.sha256(path.read_bytes()).hexdigest())
        ok &= hashes[0] == hashes[1]
        digests[cmd[0]] = hashes[0][:12]
    _record(acceptance_log, 11, ok, "identical bytes for " + ", ".join(f"{k} {v}" for k, v in digests.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
