import numpy as np
import pytest

from extsource.sheets import (BranchClassificationError, SheetTracker, TooCloseToBranchPoint, boundary_values,
                              branch_points, branch_structure, cardano_aux, discriminant_by_resultant,
                              discriminant_t, discriminant_z, roots_at, sheet_sweep, sqrt_minus_q,
                              write_sheet_csv)
from extsource.curve import gaussian_curve, quartic_curve


def test_discriminant_forms_agree(curve10):
    q, qz = discriminant_t(curve10), discriminant_z(curve10)
    for z in (0.3 + 0.1j, 1.9, 2.7 - 1.0j):
        assert q(z * z) == pytest.approx(qz(z), rel=1e-10)
        assert discriminant_by_resultant(curve10, z) == pytest.approx(qz(z), rel=1e-8)


def test_branch_structure_a10(branch10):
    assert branch10.gamma1 == pytest.approx(1.74764, abs=1e-5)
    assert branch10.gamma2 == pytest.approx(2.51076, abs=1e-5)
    assert branch10.lambda_star == pytest.approx(complex(-2.3932, 3.9363), abs=1e-4)
    assert branch10.factor_residual <= 1e-6


def test_cardano_eta_outside_support(curve10, branch10):
    aux = cardano_aux(curve10, branch10)
    assert aux.eta > branch10.gamma2
    assert aux.bigH(0.0) == pytest.approx(-curve10.params["alpha"] / 3)


def test_wrong_signature_raises():
    with pytest.raises(BranchClassificationError) as info:
        branch_points(discriminant_t(quartic_curve(10.0, -95.0, 30.0)), 10.0)
    assert isinstance(info.value.signature, dict)


def test_sqrt_minus_q_squares_and_signs(curve10, branch10):
    q = discriminant_t(curve10)
    for z in (0.5 + 0.7j, -3.0 + 0.2j, 2.2 + 1e-3j):
        assert sqrt_minus_q(branch10, z) ** 2 == pytest.approx(-q(z * z), rel=1e-9)
    mid = 0.5 * (branch10.gamma1 + branch10.gamma2)
    s = sqrt_minus_q(branch10, mid)
    assert s.real < 0 and abs(s.imag) < 1e-9 * abs(s)
    s = sqrt_minus_q(branch10, 3.0)
    assert s.imag > 0 and abs(s.real) < 1e-9 * abs(s)


def test_anchor_and_asymptotics(tracker10, curve10):
    z = complex(40.0, 25.0)
    v = tracker10.values(z)
    assert abs(v.r1 - (-10 + 0.5 / z)) < 5 / abs(z) ** 2
    assert abs(v.r2 - (10 + 0.5 / z)) < 5 / abs(z) ** 2
    assert abs(v.r3 - (z ** 3 - 1 / z)) < 5 / abs(z) ** 2


def test_symmetry_and_conjugation(tracker10):
    for z in (0.4 + 0.9j, 2.1 + 0.05j, -1.3 + 2.0j):
        v, m = tracker10.values(z), tracker10.values(-z)
        assert m.r1 == pytest.approx(-v.r2, abs=1e-10)
        assert m.r3 == pytest.approx(-v.r3, abs=1e-10)
        c = tracker10.values(z.conjugate())
        assert c.r1 == pytest.approx(v.r1.conjugate(), abs=1e-12)


def test_real_orderings(tracker10, branch10):
    def order(x):
        r = tracker10.real_off_cut(x)
        return tuple(np.argsort(r))
    assert order(-5.0) == (2, 0, 1)
    assert order(0.0) == (0, 2, 1)
    assert order(5.0) == (0, 1, 2)


def test_boundary_values_limit(curve10, branch10, tracker10):
    x = 2.1
    bv = boundary_values(curve10, branch10, x, 2)
    above = tracker10.values(complex(x, 1e-7))
    assert above.f2 == pytest.approx(bv.f_plus, abs=1e-5)
    assert bv.f_plus.imag < 0 and bv.f_minus == bv.f_plus.conjugate()
    assert bv.r3_minus == bv.r3_plus.conjugate()


def test_boundary_values_guards(curve10, branch10):
    with pytest.raises(ValueError):
        boundary_values(curve10, branch10, 3.0, 2)
    with pytest.raises(ValueError):
        boundary_values(curve10, branch10, branch10.gamma2 - 1e-9, 2)


def test_on_cut_continuation_rejected(tracker10):
    with pytest.raises(ValueError):
        tracker10.continue_to(2.0)


def test_too_close_to_branch_point(curve10, branch10):
    t = SheetTracker(curve10, branch10)
    t.continue_to(complex(branch10.gamma2, 1e-10))
    with pytest.raises(TooCloseToBranchPoint) as info:
        t.continue_to(complex(branch10.gamma2, 1e-15))
    assert info.value.distance < 1e-10


def test_roots_at_residuals(curve10):
    from extsource.sheets import relative_residual
    for z in (0.3, 2.0 + 1j, -4.0):
        for w in roots_at(curve10, z):
            assert relative_residual(curve10, z, w) < 1e-14


def test_gaussian_branch_points():
    c = gaussian_curve(2.0)
    b = branch_structure(c)
    q = discriminant_z(c)
    for e in b.endpoints:
        assert abs(q(e)) < 1e-9 * (1 + abs(q(0.0)))
    assert b.i1[0] == pytest.approx(-b.i2[1])


def test_gaussian_asymmetric_fractions():
    c = gaussian_curve(2.0, 0.3)
    b = branch_structure(c)
    t = SheetTracker(c, b)
    z = complex(30.0, 20.0)
    v = t.values(z)
    assert abs(v.r1 - (-2 + 0.7 / z)) < 5 / abs(z) ** 2
    assert abs(v.r2 - (2 + 0.3 / z)) < 5 / abs(z) ** 2


def test_sheet_csv(tmp_path, tracker10):
    rows = sheet_sweep(tracker10, [0.5 + 0.5j, 3.0])
    path = tmp_path / "s.csv"
    write_sheet_csv(path, rows)
    text = path.read_text()
    assert text.startswith("z_re,z_im") and text.count("\n") == 3
