# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cubic solvers, Horner evaluation and Aberth iteration.

Mirrors ``_kernels_py.py``; both backends must return the same roots to
rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, fmax, cos, acos, cbrt, copysign, M_PI

cnp.import_array()

cdef double _TWO_PI_3 = 2.0 * M_PI / 3.0
cdef double complex _OMEGA = -0.5 + 0.8660254037844386j


cdef inline double _cabs(double complex z) nogil:
    return abs(z)


cdef double _newton_real(double b, double c, double d, double w, int steps) nogil:
    cdef double f = ((w + b) * w + c) * w + d
    cdef double df, wn, fn
    cdef int k
    for k in range(steps):
        df = (3.0 * w + 2.0 * b) * w + c
        if df == 0.0:
            break
        wn = w - f / df
        fn = ((wn + b) * wn + c) * wn + d
        if fabs(fn) >= fabs(f):
            break
        w = wn
        f = fn
        if f == 0.0:
            break
    return w


cdef double complex _newton_complex(double complex b, double complex c,
                                    double complex d, double complex w,
                                    int steps) nogil:
    cdef double complex f = ((w + b) * w + c) * w + d
    cdef double complex df, wn, fn
    cdef int k
    for k in range(steps):
        df = (3.0 * w + 2.0 * b) * w + c
        if df == 0:
            break
        wn = w - f / df
        fn = ((wn + b) * wn + c) * wn + d
        if _cabs(fn) >= _cabs(f):
            break
        w = wn
        f = fn
        if f == 0:
            break
    return w


cdef double _pair_sum_real(double b, double c, double w, double prod) nogil:
    cdef double s_direct = -b - w
    cdef double err_direct = fabs(b) + fabs(w)
    cdef double err_alt
    if w != 0.0:
        err_alt = (fabs(c) + fabs(prod)) / fabs(w)
        if err_alt < err_direct:
            return (c - prod) / w
    return s_direct


cdef double complex _pair_sum_complex(double complex b, double complex c,
                                      double complex w, double complex prod) nogil:
    cdef double complex s_direct = -b - w
    cdef double err_direct = _cabs(b) + _cabs(w)
    cdef double err_alt
    if w != 0:
        err_alt = (_cabs(c) + _cabs(prod)) / _cabs(w)
        if err_alt < err_direct:
            return (c - prod) / w
    return s_direct


cdef void _real_solve(double b, double c, double d, double complex* out) nogil:
    cdef double shift = -b / 3.0
    cdef double p = c - b * b / 3.0
    cdef double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d
    cdef double disc, big, y, w, r, arg, phi, y0, y1, y2, t
    cdef double prod, s, qd, sq, w1, w2
    cdef double complex z1
    if p == 0.0 and q == 0.0:
        out[0] = shift
        out[1] = shift
        out[2] = shift
        return
    disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0)
    # p >= 0 with disc <= 0 only happens through underflow; the trig form needs p < 0
    if disc > 0.0 or p >= 0.0:
        big = cbrt(fabs(q) / 2.0 + sqrt(fmax(disc, 0.0)))
        if q > 0.0:
            big = -big
        y = big - p / (3.0 * big) if big != 0.0 else 0.0
        w = y + shift
    else:
        r = 2.0 * sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * sqrt(-3.0 / p)
        if arg > 1.0:
            arg = 1.0
        if arg < -1.0:
            arg = -1.0
        phi = acos(arg) / 3.0
        y0 = r * cos(phi)
        y1 = r * cos(phi - _TWO_PI_3)
        y2 = r * cos(phi - 2.0 * _TWO_PI_3)
        # sort three values
        if y0 > y1:
            t = y0; y0 = y1; y1 = t
        if y1 > y2:
            t = y1; y1 = y2; y2 = t
        if y0 > y1:
            t = y0; y0 = y1; y1 = t
        if y1 - y0 > y2 - y1:
            w = y0 + shift
        else:
            w = y2 + shift
    w = _newton_real(b, c, d, w, 4)
    if w == 0.0:
        s = -b
        prod = c
    else:
        prod = -d / w
        s = _pair_sum_real(b, c, w, prod)
    qd = s * s - 4.0 * prod
    out[0] = w
    if qd >= 0.0:
        sq = sqrt(qd)
        w1 = 0.5 * (s + copysign(sq, s))
        w2 = prod / w1 if w1 != 0.0 else 0.5 * (s - copysign(sq, s))
        out[1] = _newton_real(b, c, d, w1, 4)
        out[2] = _newton_real(b, c, d, w2, 4)
        return
    z1 = 0.5 * s + 0.5 * sqrt(-qd) * 1j
    z1 = _newton_complex(b, c, d, z1, 4)
    if z1.imag < 0.0:
        z1 = z1.conjugate()
    out[1] = z1
    out[2] = z1.conjugate()


cdef void _complex_solve(double complex b, double complex c, double complex d,
                         double complex* out):
    cdef double complex shift = -b / 3.0
    cdef double complex p = c - b * b / 3.0
    cdef double complex q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d
    cdef double complex sq, t1, t2, t, u, uk, vk, cand, w, prod, s, r, w1, w2
    cdef double best = -1.0
    cdef int k
    if p == 0 and q == 0:
        out[0] = shift
        out[1] = shift
        out[2] = shift
        return
    sq = ((q / 2.0) ** 2 + (p / 3.0) ** 3) ** 0.5
    t1 = -q / 2.0 + sq
    t2 = -q / 2.0 - sq
    t = t1 if _cabs(t1) >= _cabs(t2) else t2
    u = t ** (1.0 / 3.0) if t != 0 else 0j
    w = 0j
    uk = u
    for k in range(3):
        vk = -p / (3.0 * uk) if uk != 0 else 0j
        cand = uk + vk + shift
        if _cabs(cand) > best:
            best = _cabs(cand)
            w = cand
        uk = uk * _OMEGA
    w = _newton_complex(b, c, d, w, 4)
    if w == 0:
        s = -b
        prod = c
    else:
        prod = -d / w
        s = _pair_sum_complex(b, c, w, prod)
    r = (s * s - 4.0 * prod) ** 0.5
    if (s.conjugate() * r).real < 0.0:
        r = -r
    w1 = 0.5 * (s + r)
    w2 = prod / w1 if w1 != 0 else 0.5 * (s - r)
    out[0] = w
    out[1] = _newton_complex(b, c, d, w1, 4)
    out[2] = _newton_complex(b, c, d, w2, 4)


def cubic_roots_real(b, c, d):
    """Roots of ``w**3 + b w**2 + c w + d`` for real ``b, c, d``."""
    cdef double complex out[3]
    _real_solve(float(b), float(c), float(d), out)
    return (out[0], out[1], out[2])


def cubic_roots(b, c, d):
    """Roots of ``w**3 + b w**2 + c w + d`` for complex coefficients."""
    cdef double complex out[3]
    _complex_solve(complex(b), complex(c), complex(d), out)
    return (out[0], out[1], out[2])


def cubic_roots_batch(b, c, d):
    """Vectorised front end returning an ``(N, 3)`` complex array."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] bb = np.ascontiguousarray(np.ravel(b), dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cc = np.ascontiguousarray(np.ravel(c), dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] dd = np.ascontiguousarray(np.ravel(d), dtype=complex)
    cdef Py_ssize_t n = bb.shape[0], i
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] res = np.empty((n, 3), dtype=complex)
    cdef double complex out[3]
    for i in range(n):
        if bb[i].imag == 0.0 and cc[i].imag == 0.0 and dd[i].imag == 0.0:
            _real_solve(bb[i].real, cc[i].real, dd[i].real, out)
        else:
            _complex_solve(bb[i], cc[i], dd[i], out)
        res[i, 0] = out[0]
        res[i, 1] = out[1]
        res[i, 2] = out[2]
    return res


def horner(coeffs, z):
    """Evaluate the ascending-order polynomial ``coeffs`` at every ``z``."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cf = np.ascontiguousarray(coeffs, dtype=complex)
    zarr = np.asarray(z, dtype=complex)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(zarr.ravel())
    cdef Py_ssize_t n = zz.shape[0], m = cf.shape[0], i, k
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] res = np.empty(n, dtype=complex)
    cdef double complex acc, zi
    for i in range(n):
        zi = zz[i]
        acc = 0
        for k in range(m - 1, -1, -1):
            acc = acc * zi + cf[k]
        res[i] = acc
    return res.reshape(zarr.shape)


def aberth(coeffs, z0, int maxiter=500, double tol=1e-15):
    """Aberth-Ehrlich simultaneous iteration; returns ``(roots, iterations, converged)``."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] c = np.ascontiguousarray(coeffs, dtype=complex)
    cdef Py_ssize_t n = c.shape[0] - 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] z = np.array(z0, dtype=complex).ravel()
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done = np.zeros(n, dtype=np.uint8)
    cdef double eps = 2.220446049250313e-16
    cdef double scale, azi
    cdef double complex zi, p, dp, ratio, acc, diff, denom, step
    cdef Py_ssize_t i, k, ndone
    cdef int it
    for it in range(1, maxiter + 1):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p = 0
            dp = 0
            scale = 0.0
            azi = _cabs(zi)
            for k in range(n, -1, -1):
                p = p * zi + c[k]
                scale = scale * azi + _cabs(c[k])
                if k >= 1:
                    dp = dp * zi + k * c[k]
            if _cabs(p) <= 4.0 * n * eps * scale:
                done[i] = 1
                continue
            if dp != 0:
                ratio = p / dp
            else:
                ratio = 1e-3 * (1.0 + azi)
            acc = 0
            for k in range(n):
                if k != i:
                    diff = zi - z[k]
                    if diff != 0:
                        acc = acc + 1.0 / diff
            denom = 1.0 - ratio * acc
            step = ratio / denom if denom != 0 else ratio
            z[i] = zi - step
            if _cabs(step) <= tol * _cabs(z[i]):
                done[i] = 1
        ndone = 0
        for i in range(n):
            ndone += done[i]
        if ndone == n:
            return z, it, True
    return z, maxiter, False
