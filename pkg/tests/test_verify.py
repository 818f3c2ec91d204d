import json

import numpy as np
import pytest

from extsource.sheets import SheetTracker
from extsource.verify import (VerificationReport, check_boundary_relation, check_edge_exponent, check_entirety,
                              check_jump_phase, check_measure_sign, check_variational, full_report, h2,
                              h2_expected, jump_phase, uniqueness_probe, variational_chains)


@pytest.fixture(scope="module")
def report10():
    return full_report(10.0)


def test_report_passes(report10):
    assert report10.passed
    assert all(c.at is not None or c.name in ("square_factor_residual", "mass_I1", "mass_I2", "total_mass",
                                              "g_equality_I1", "g_equality_I2") for c in report10.checks)


def test_report_round_trip(report10):
    d = json.loads(report10.to_json())
    assert set(["a", "alpha", "beta", "gamma1", "gamma2", "checks", "pass"]) <= set(d)
    back = VerificationReport.from_dict(d)
    assert back.to_dict() == report10.to_dict()


def test_report_below_threshold():
    rep = full_report(0.1)
    assert not rep.passed
    assert rep.checks[0].skipped and "no admissible parameters" in rep.checks[0].detail["error"]


def test_boundary_relation_gaussian(gauss2):
    c, b = gauss2
    rec = check_boundary_relation(c, b, 1, 100)
    assert rec.passed and rec.worst <= 1e-10


def test_boundary_relation_vieta_scale(curve10, branch10):
    rec = check_boundary_relation(curve10, branch10, 2, 50)
    assert rec.worst <= 1e-10 and rec.detail["vieta_residual"] < 1e-14


def test_reflection_invariance(curve10, branch10, tracker10):
    for fn in (check_measure_sign,):
        r1, r2 = fn(curve10, branch10, 1, 50), fn(curve10, branch10, 2, 50)
        assert r1.worst == pytest.approx(r2.worst, rel=1e-10)
        assert r1.at == pytest.approx(-r2.at, rel=1e-10)
    v1 = check_variational(curve10, branch10, tracker10, 1, 40)
    v2 = check_variational(curve10, branch10, tracker10, 2, 40)
    assert v1.worst == pytest.approx(v2.worst, rel=1e-8)


def test_variational_pointwise(curve10, branch10, tracker10):
    g1, g2 = branch10.gamma1, branch10.gamma2
    xs = np.linspace(-g1 + 1e-3, g1 - 1e-3, 50)
    vals = tracker10.real_upper_many(xs)
    assert np.all((vals[:, 0] - vals[:, 2]).real < 0)
    xs = np.linspace(g1 + 1e-3, g2 - 1e-3, 50)
    vals = tracker10.real_upper_many(xs)
    assert np.all((vals[:, 0] - np.conj(vals[:, 2])).real < 0)


def test_variational_margins_shrink_toward_cut(curve10, branch10, tracker10):
    chains = variational_chains(curve10, branch10, tracker10, 2, 50)
    xs, vals = chains[next(k for k in chains if k.startswith(f"({branch10.gamma2:.6g}"))]
    assert np.all(vals < 0) and np.all(np.diff(vals) < 0)


def test_jump_phase(curve10, branch10):
    g1, g2 = branch10.gamma1, branch10.gamma2
    th = jump_phase(curve10, branch10, 2, np.linspace(g1, g2, 30))
    assert th[0] == pytest.approx(2 * np.pi, abs=1e-6)
    assert th[-1] == pytest.approx(0.0, abs=1e-12)
    assert check_jump_phase(curve10, branch10, 1, 50).passed


@pytest.mark.parametrize("sign", [-1, 1])
def test_edge_exponents(curve10, branch10, sign):
    for g in (branch10.gamma1, branch10.gamma2):
        rec = check_edge_exponent(curve10, branch10, sign * g)
        assert 0.45 <= rec.worst <= 0.55
        assert rec.detail["integrated_exponent"] == pytest.approx(1.5, abs=0.05)


def test_edge_exponent_rejects_non_endpoint(curve10, branch10):
    with pytest.raises(ValueError):
        check_edge_exponent(curve10, branch10, 0.0)


def test_entirety(curve10, branch10, tracker10):
    recs = {r.name: r for r in check_entirety(curve10, branch10, tracker10)}
    assert all(r.passed for r in recs.values())


def test_h2_identity_gaussian(gauss2):
    c, b = gauss2
    t = SheetTracker(c, b)
    for z in (0.3 + 0.4j, 3.0 - 0.001j):
        v = t.values(z)
        assert abs(h2(c, z, v.f1, v.f2) - h2_expected(c, z)) < 1e-10 * (1 + abs(z) ** 2)


def test_uniqueness_probe_linear(curve10, tracker10):
    rec = uniqueness_probe(curve10, tracker10)
    assert rec.passed
    errs = rec.detail["errors"]
    assert errs[0] > 1e-4


def test_gaussian_report():
    assert full_report(3.0, "gaussian").passed
