"""Pure-Python implementations of the numerical kernels.

These mirror ``_kernels.pyx`` line for line and are used whenever the
compiled module is unavailable (or ``EXTSOURCE_PURE=1`` is set).
"""
import cmath
import math

import numpy as np

_TWO_PI_3 = 2.0 * math.pi / 3.0
_OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)


def _cbrt(x):
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _newton_real(b, c, d, w, steps=4):
    # Newton on w^3 + b w^2 + c w + d, keeping only improving iterates.
    f = ((w + b) * w + c) * w + d
    for _ in range(steps):
        df = (3.0 * w + 2.0 * b) * w + c
        if df == 0.0:
            break
        wn = w - f / df
        fn = ((wn + b) * wn + c) * wn + d
        if abs(fn) >= abs(f):
            break
        w, f = wn, fn
        if f == 0.0:
            break
    return w


def _newton_complex(b, c, d, w, steps=4):
    f = ((w + b) * w + c) * w + d
    for _ in range(steps):
        df = (3.0 * w + 2.0 * b) * w + c
        if df == 0:
            break
        wn = w - f / df
        fn = ((wn + b) * wn + c) * wn + d
        if abs(fn) >= abs(f):
            break
        w, f = wn, fn
        if f == 0:
            break
    return w


def _pair_sum(b, c, w, prod):
    # Sum of the two remaining roots; pick the Vieta route with less cancellation.
    s_direct = -b - w
    err_direct = abs(b) + abs(w)
    if w != 0:
        s_alt = (c - prod) / w
        err_alt = (abs(c) + abs(prod)) / abs(w)
        if err_alt < err_direct:
            return s_alt
    return s_direct


def cubic_roots_real(b, c, d):
    """Roots of ``w**3 + b w**2 + c w + d`` for real ``b, c, d``.

    Real roots come back with zero imaginary part and a complex pair comes
    back exactly conjugate.
    """
    b = float(b)
    c = float(c)
    d = float(d)
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d
    if p == 0.0 and q == 0.0:
        return (complex(shift), complex(shift), complex(shift))
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    # p >= 0 with disc <= 0 only happens through underflow; the trig form needs p < 0
    if disc > 0.0 or p >= 0.0:
        big = _cbrt(abs(q) / 2.0 + math.sqrt(max(disc, 0.0)))
        big = -big if q > 0.0 else big
        y = big - p / (3.0 * big) if big != 0.0 else 0.0
        w = y + shift
    else:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        arg = min(1.0, max(-1.0, arg))
        phi = math.acos(arg) / 3.0
        ys = sorted(r * math.cos(phi - _TWO_PI_3 * k) for k in range(3))
        # isolate the root farthest from the other two before deflating
        if ys[1] - ys[0] > ys[2] - ys[1]:
            w = ys[0] + shift
        else:
            w = ys[2] + shift
    w = _newton_real(b, c, d, w)
    prod = -d / w if w != 0.0 else 0.0
    if w == 0.0:
        # w = 0 is a root, so d = 0 and the rest solve w^2 + b w + c
        s = -b
        prod = c
    else:
        s = _pair_sum(b, c, w, prod)
    qd = s * s - 4.0 * prod
    if qd >= 0.0:
        sq = math.sqrt(qd)
        w1 = 0.5 * (s + math.copysign(sq, s))
        w2 = prod / w1 if w1 != 0.0 else 0.5 * (s - math.copysign(sq, s))
        w1 = _newton_real(b, c, d, w1)
        w2 = _newton_real(b, c, d, w2)
        return (complex(w), complex(w1), complex(w2))
    z1 = complex(0.5 * s, 0.5 * math.sqrt(-qd))
    z1 = _newton_complex(b, c, d, z1)
    if z1.imag < 0.0:
        z1 = z1.conjugate()
    return (complex(w), z1, z1.conjugate())


def cubic_roots(b, c, d):
    """Roots of ``w**3 + b w**2 + c w + d`` for complex coefficients."""
    b = complex(b)
    c = complex(c)
    d = complex(d)
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d
    if p == 0 and q == 0:
        return (shift, shift, shift)
    sq = cmath.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3)
    t1 = -q / 2.0 + sq
    t2 = -q / 2.0 - sq
    t = t1 if abs(t1) >= abs(t2) else t2
    u = t ** (1.0 / 3.0) if t != 0 else 0j
    cands = []
    for k in range(3):
        uk = u * _OMEGA ** k
        vk = -p / (3.0 * uk) if uk != 0 else 0j
        cands.append(uk + vk + shift)
    w = max(cands, key=abs)
    w = _newton_complex(b, c, d, w)
    if w == 0:
        s = -b
        prod = c
    else:
        prod = -d / w
        s = _pair_sum(b, c, w, prod)
    r = cmath.sqrt(s * s - 4.0 * prod)
    if (s.conjugate() * r).real < 0.0:
        r = -r
    w1 = 0.5 * (s + r)
    w2 = prod / w1 if w1 != 0 else 0.5 * (s - r)
    w1 = _newton_complex(b, c, d, w1)
    w2 = _newton_complex(b, c, d, w2)
    return (w, w1, w2)


def cubic_roots_batch(b, c, d):
    """Vectorised front end: returns an ``(N, 3)`` complex array.

    Rows whose coefficients are all real use the real-coefficient solver.
    """
    b = np.asarray(b, dtype=complex).ravel()
    c = np.asarray(c, dtype=complex).ravel()
    d = np.asarray(d, dtype=complex).ravel()
    out = np.empty((b.size, 3), dtype=complex)
    for i in range(b.size):
        bi, ci, di = b[i], c[i], d[i]
        if bi.imag == 0.0 and ci.imag == 0.0 and di.imag == 0.0:
            out[i] = cubic_roots_real(bi.real, ci.real, di.real)
        else:
            out[i] = cubic_roots(bi, ci, di)
    return out


def horner(coeffs, z):
    """Evaluate the ascending-order polynomial ``coeffs`` at every ``z``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for ck in coeffs[::-1]:
        acc = acc * z + ck
    return acc


def aberth(coeffs, z0, maxiter=500, tol=1e-15):
    """Aberth-Ehrlich simultaneous iteration.

    ``coeffs`` is ascending and ``z0`` holds one starting point per root.
    Returns ``(roots, iterations, converged)``.
    """
    c = [complex(x) for x in coeffs]
    n = len(c) - 1
    dc = [k * c[k] for k in range(1, n + 1)]
    ac = [abs(x) for x in c]
    eps = 2.220446049250313e-16
    z = [complex(x) for x in z0]
    done = [False] * n
    for it in range(1, maxiter + 1):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p = 0j
            for ck in reversed(c):
                p = p * zi + ck
            dp = 0j
            for ck in reversed(dc):
                dp = dp * zi + ck
            scale = 0.0
            azi = abs(zi)
            for ak in reversed(ac):
                scale = scale * azi + ak
            if abs(p) <= 4.0 * n * eps * scale:
                done[i] = True
                continue
            ratio = p / dp if dp != 0 else complex(1e-3 * (1.0 + abs(zi)))
            acc = 0j
            for k in range(n):
                if k != i:
                    diff = zi - z[k]
                    if diff != 0:
                        acc += 1.0 / diff
            denom = 1.0 - ratio * acc
            step = ratio / denom if denom != 0 else ratio
            z[i] = zi - step
            if abs(step) <= tol * abs(z[i]):
                done[i] = True
        if all(done):
            return np.array(z), it, True
    return np.array(z), maxiter, False
