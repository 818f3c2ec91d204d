import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extsource import _kernels_py, kernels

compiled = pytest.importorskip("extsource._kernels")
reals = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def _match(a, b):
    """Largest relative distance from a root of either set to the other set."""
    d_ab = max(min(abs(x - y) for y in b) / (1 + abs(x)) for x in a)
    d_ba = max(min(abs(x - y) for x in a) / (1 + abs(y)) for y in b)
    return max(d_ab, d_ba)


def test_backend_selected():
    assert kernels.BACKEND == "cython"


def test_pure_override():
    env = dict(os.environ, EXTSOURCE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from extsource import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@settings(max_examples=200, deadline=None)
@given(reals, reals, reals)
def test_real_cubic_agreement(b, c, d):
    assert _match(compiled.cubic_roots_real(b, c, d), _kernels_py.cubic_roots_real(b, c, d)) < 1e-9


@settings(max_examples=200, deadline=None)
@given(reals, reals, reals, reals, reals, reals)
def test_complex_cubic_agreement(br, bi, cr, ci, dr, di):
    args = complex(br, bi), complex(cr, ci), complex(dr, di)
    assert _match(compiled.cubic_roots(*args), _kernels_py.cubic_roots(*args)) < 1e-9


@pytest.mark.parametrize("mod", [_kernels_py, compiled])
def test_cubic_residual(mod):
    rng = np.random.default_rng(3)
    for _ in range(200):
        b, c, d = rng.normal(size=3) * 10
        for w in mod.cubic_roots_real(b, c, d):
            scale = abs(w) ** 3 + abs(b * w * w) + abs(c * w) + abs(d)
            assert abs(((w + b) * w + c) * w + d) <= 1e-13 * scale


def test_batch_and_horner_agree():
    rng = np.random.default_rng(5)
    b, c, d = (rng.normal(size=100) + 1j * rng.normal(size=100) for _ in range(3))
    x = compiled.cubic_roots_batch(b, c, d)
    y = _kernels_py.cubic_roots_batch(b, c, d)
    for row_x, row_y in zip(x, y):
        assert _match(row_x, row_y) < 1e-9
    coeffs = rng.normal(size=6).astype(complex)
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    np.testing.assert_allclose(compiled.horner(coeffs, z), _kernels_py.horner(coeffs, z), rtol=1e-13)


def test_aberth_agree():
    poly = np.array([-6.0, 11.0, -6.0, 1.0], dtype=complex)
    start = 2.0 * np.exp(2j * np.pi * (np.arange(3) + 0.25) / 3)
    for mod in (compiled, _kernels_py):
        out = mod.aberth(poly, start.copy())
        rts = out[0] if isinstance(out, tuple) else out
        assert sorted(np.round(np.real(rts), 10)) == [1.0, 2.0, 3.0]
