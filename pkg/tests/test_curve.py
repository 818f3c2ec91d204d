import pytest

from extsource.curve import (ExternalField, SpectralCurve, curve_residual, gaussian_curve, general_curve,
                             quartic_curve)
from extsource.poly import Poly


def test_gaussian_coefficients():
    c = gaussian_curve(2.0, 0.3)
    z = 0.7
    assert c.c2(z) == pytest.approx(z)
    assert c.c1(z) == pytest.approx(1 - 4.0)
    assert c.c0(z) == pytest.approx(-(4.0 * z + 2.0 * (0.6 - 1.0)))


def test_quartic_coefficients():
    c = quartic_curve(3.0, -2.0, 0.5)
    z = 1.3
    assert c.c2(z) == pytest.approx(z ** 3)
    assert c.c1(z) == pytest.approx(z ** 2 - 2.0)
    assert c.c0(z) == pytest.approx(-(9.0 * z ** 3 + 0.5 * z))
    assert c.is_symmetric_quartic


def test_general_reduces_to_gaussian():
    fld = ExternalField.with_x2(Poly([0, 0, 0.5]), 2.0, 0.5)
    g = general_curve(fld, [], [0.0])
    ref = gaussian_curve(2.0)
    for z in (0.3, 1.7 + 0.2j):
        assert g.coefficients_at(z) == pytest.approx(ref.coefficients_at(z))


def test_general_reduces_to_quartic():
    fld = ExternalField(Poly([0, 0, 0, 0, 0.25]), 3.0)
    g = general_curve(fld, [-2.0 + 9.0, 0.0], [0.0, -0.5, 0.0])
    ref = quartic_curve(3.0, -2.0, 0.5)
    for z in (0.3, 1.7 + 0.2j):
        assert g.coefficients_at(z) == pytest.approx(ref.coefficients_at(z))


def test_general_slot_validation():
    fld = ExternalField(Poly([0, 0, 0, 0, 0.25]), 3.0)
    with pytest.raises(ValueError):
        general_curve(fld, [1.0], [0.0, 0.0, 0.0])


@pytest.mark.parametrize("a,x2", [(0.0, 0.5), (-1.0, 0.5), (1.0, 0.0), (1.0, 1.0)])
def test_field_validation(a, x2):
    with pytest.raises(ValueError):
        ExternalField.with_x2(Poly([0, 0, 0.5]), a, x2)


def test_partials_match_finite_differences():
    c = quartic_curve(2.0, -3.0, 1.0)
    z, w = 0.4 + 0.3j, 1.1 - 0.2j
    pw, pz = c.partials(z, w)
    h = 1e-6
    assert pw == pytest.approx((curve_residual(c, z, w + h) - curve_residual(c, z, w - h)) / (2 * h), rel=1e-7)
    assert pz == pytest.approx((curve_residual(c, z + h, w) - curve_residual(c, z - h, w)) / (2 * h), rel=1e-7)


def test_json_round_trip():
    c = quartic_curve(10.0, -95.3, 21.2)
    back = SpectralCurve.from_json(c.to_json())
    assert back == c
    g = gaussian_curve(2.0, 0.3)
    assert SpectralCurve.from_json(g.to_json()) == g


def test_vj_prime():
    c = gaussian_curve(2.0)
    assert c.vj_prime(1, 1.5) == pytest.approx(3.5)
    assert c.vj_prime(2, 1.5) == pytest.approx(-0.5)
