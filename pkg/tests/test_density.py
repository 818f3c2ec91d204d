import math

import numpy as np
import pytest

from extsource.density import (check_g_conditions, density_at, density_many, edge_mass, g_function, profile)


@pytest.fixture(scope="module")
def prof10(curve10, branch10):
    return profile(curve10, branch10, 200)


def test_masses(prof10):
    assert prof10.total_mass == pytest.approx(1.0, abs=1e-6)
    for m in prof10.masses:
        assert m == pytest.approx(0.5, abs=1e-6)


def test_symmetry(prof10, curve10, branch10):
    mirrored = density_many(curve10, branch10, -prof10.xs)
    assert np.max(np.abs(prof10.rho - mirrored)) <= 1e-10


def test_density_zero_off_support(curve10, branch10):
    assert density_at(curve10, branch10, 0.0) == 0.0
    assert density_at(curve10, branch10, 3.0) == 0.0
    assert density_at(curve10, branch10, branch10.gamma2) == 0.0
    assert density_at(curve10, branch10, 2.1) > 0


def test_cdf_monotone(prof10):
    xs = np.linspace(-3, 3, 400)
    c = prof10.cdf(xs)
    assert np.all(np.diff(c) >= -1e-15)
    assert c[0] == 0.0 and c[-1] == pytest.approx(1.0, abs=1e-6)
    assert prof10.cdf(0.0) == pytest.approx(0.5, abs=1e-6)


def test_gaussian_density_semicircle_limit():
    # a -> small x2 splitting is not needed: two cuts of the a=3 Gaussian carry equal mass
    from extsource.curve import gaussian_curve
    from extsource.sheets import branch_structure
    c = gaussian_curve(3.0)
    p = profile(c, branch_structure(c), 100)
    assert p.masses == pytest.approx([0.5, 0.5], abs=1e-6)


def test_gaussian_unequal_fractions():
    from extsource.curve import gaussian_curve
    from extsource.sheets import branch_structure
    c = gaussian_curve(3.0, 0.3)
    p = profile(c, branch_structure(c), 100)
    assert p.masses == pytest.approx([0.7, 0.3], abs=1e-6)


def test_edge_mass_three_halves(curve10, branch10):
    e = branch10.gamma2
    d = np.array([1e-3, 1e-4])
    m = [edge_mass(curve10, branch10, e, x) for x in d]
    slope = math.log(m[0] / m[1]) / math.log(d[0] / d[1])
    assert slope == pytest.approx(1.5, abs=0.02)


def test_g_log_decay(gset10, branch10):
    # g_j - log z = O(1/z) with a constant equal to the cut's first moment over x_j
    for z in (1e3 * branch10.gamma2, 1e4 * branch10.gamma2):
        for j in (1, 2):
            assert abs(gset10.g(j, complex(z, 1.0)) - np.log(complex(z, 1.0))) < 3 / z


def test_g_derivative(gset10):
    z, h = complex(0.7, 1.1), 1e-5
    v = gset10.tracker.values(z)
    for j, f in ((1, v.f1), (2, v.f2)):
        deriv = (gset10.g(j, z + h) - gset10.g(j, z - h)) / (2 * h)
        assert deriv == pytest.approx(f / 0.5, abs=1e-7)


def test_g_function_rejects_branch_ray(curve10, branch10, gset10):
    with pytest.raises(ValueError):
        g_function(curve10, branch10, 1, -5.0, gset10)
    assert np.isfinite(g_function(curve10, branch10, 2, 5.0, gset10))


@pytest.mark.parametrize("j", [1, 2])
def test_g_conditions(curve10, branch10, gset10, j):
    gc = check_g_conditions(curve10, branch10, j, gset10)
    assert gc.constancy_dev <= 1e-6
    assert gc.outside_margin < 0
    assert gc.ell == pytest.approx(29.4503, abs=1e-3)
