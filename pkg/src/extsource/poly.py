"""Dense univariate polynomials: evaluation, roots, resultants, square factors.

Coefficients are stored in ascending order of degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels

CLUSTER_RADIUS = 1e-6


class RootFindingError(RuntimeError):
    """Raised when simultaneous iteration does not converge.

    ``partial`` holds the best RootSet reached.
    """

    def __init__(self, message: str, partial: "RootSet"):
        super().__init__(message)
        self.partial = partial


class ResultantOverflow(OverflowError):
    """The resultant magnitude exceeds the float range.

    ``mantissa`` and ``exponent`` give the value as mantissa * 10**exponent.
    """

    def __init__(self, mantissa: float, exponent: int):
        super().__init__(f"resultant overflows float: {mantissa!r}e{exponent}")
        self.mantissa = mantissa
        self.exponent = exponent


class SquareStructureError(ValueError):
    """No square factorization within tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def _trim(coeffs: Sequence) -> tuple:
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    if not c:
        c = [0.0]
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """Polynomial with ascending coefficients; trailing zeros are trimmed."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1.0) -> "Poly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        return eval_poly(self, z)

    def deriv(self) -> "Poly":
        if self.degree == 0:
            return Poly([0.0])
        return Poly([k * self.coeffs[k] for k in range(1, len(self.coeffs))])

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-x for x in self.coeffs])

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Long division; returns (quotient, remainder)."""
        other = _as_poly(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dv = other.degree
        if self.degree < dv:
            return Poly([0.0]), Poly(rem)
        quot = [0] * (self.degree - dv + 1)
        for k in range(self.degree - dv, -1, -1):
            coef = rem[k + dv] / other.lead
            quot[k] = coef
            for i, oc in enumerate(other.coeffs):
                rem[k + i] -= coef * oc
        return Poly(quot), Poly(rem[:dv] if dv > 0 else [0.0])

    def to_list(self) -> list:
        return [_plain(c) for c in self.coeffs]


def _plain(c):
    if isinstance(c, complex):
        return c.real if c.imag == 0 else [c.real, c.imag]
    return float(c)


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([x])


def eval_poly(p: Poly, z):
    """Horner evaluation at a scalar or array ``z``."""
    if np.ndim(z) == 0:
        acc = 0
        for c in reversed(p.coeffs):
            acc = acc * z + c
        return acc
    return kernels.horner(np.asarray(p.coeffs, dtype=complex), z)


# ``eval`` is the public name; keep the builtin reachable through ``builtins``.
eval = eval_poly  # noqa: A001


@dataclass(frozen=True)
class RootSet:
    roots: list
    multiplicities: list
    residuals: list
    iterations: int = 0
    converged: bool = True

    def expanded(self) -> list:
        out = []
        for r, m in zip(self.roots, self.multiplicities):
            out.extend([r] * m)
        return out


def relative_residual(p: Poly, r: complex) -> float:
    num = abs(eval_poly(p, r))
    ar = abs(r)
    scale = 0.0
    for c in reversed(p.coeffs):
        scale = scale * ar + abs(c)
    return num / scale if scale > 0 else num


def _start_points(c: np.ndarray) -> np.ndarray:
    n = len(c) - 1
    lead = c[-1]
    radius = 0.0
    for k in range(n):
        if c[k] != 0:
            radius = max(radius, abs(c[k] / lead) ** (1.0 / (n - k)))
    radius = 2.0 * radius if radius > 0 else 1.0
    centre = -c[n - 1] / (n * lead)
    ang = 2.0 * math.pi * np.arange(n) / n + 0.4
    return centre + radius * np.exp(1j * ang)


def _cluster(raw: Sequence[complex], radius: float) -> list[list[complex]]:
    # single-linkage grouping under the relative cluster radius
    groups: list[list[complex]] = []
    for r in raw:
        hits = [g for g in groups
                if any(abs(r - s) < radius * (1.0 + abs(s)) for s in g)]
        merged = [r]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)
    return groups


def roots(p: Poly, tol: float = 1e-9, maxiter: int = 500,
          cluster_radius: float = CLUSTER_RADIUS) -> RootSet:
    """All complex roots of ``p`` with multiplicities and relative residuals."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no finite root set")
    c = np.asarray(p.coeffs, dtype=complex)
    nzero = 0
    while nzero < len(c) - 1 and c[nzero] == 0:
        nzero += 1
    core = c[nzero:]
    raw: list[complex] = [0j] * nzero
    iters, ok = 0, True
    n = len(core) - 1
    if n == 1:
        raw.append(-core[0] / core[1])
    elif n >= 2:
        z, iters, ok = kernels.aberth(core, _start_points(core), maxiter)
        raw.extend(complex(x) for x in z)
    groups = _cluster(raw, cluster_radius)
    rts, mult, res = [], [], []
    for g in sorted(groups, key=lambda g: (np.mean(g).real, np.mean(g).imag)):
        r = complex(np.mean(g))
        m = len(g)
        if m > 1:
            if _is_real(p) and abs(r.imag) < cluster_radius * (1.0 + abs(r)):
                r = complex(r.real, 0.0)
            r = _polish_multiple(p, r, m)
        if abs(r.imag) <= 1e-14 * (1.0 + abs(r.real)) and _is_real(p):
            r = complex(r.real, 0.0)
        rts.append(r)
        mult.append(len(g))
        res.append(relative_residual(p, r))
    out = RootSet(rts, mult, res, iters, ok)
    if not ok:
        raise RootFindingError(f"Aberth iteration did not converge in {maxiter} steps", out)
    worst = max(res) if res else 0.0
    if worst > tol:
        raise RootFindingError(f"root residual {worst:.3e} exceeds tolerance {tol:.1e}", out)
    return out


def _polish_multiple(p: Poly, r: complex, m: int) -> complex:
    # an m-fold root is a simple root of the (m-1)-th derivative
    d = p
    for _ in range(m - 1):
        d = d.deriv()
    dd = d.deriv()
    best, best_f = r, abs(eval_poly(d, r))
    for _ in range(8):
        slope = eval_poly(dd, best)
        if slope == 0:
            break
        cand = best - eval_poly(d, best) / slope
        f = abs(eval_poly(d, cand))
        if f >= best_f:
            break
        best, best_f = cand, f
    return complex(best)


def _is_real(p: Poly) -> bool:
    return all(not isinstance(x, complex) or x.imag == 0 for x in p.coeffs)


def sylvester(p: Poly, q: Poly) -> list[list]:
    """Sylvester matrix with descending-coefficient rows."""
    m, n = p.degree, q.degree
    size = m + n
    pd = list(reversed(p.coeffs))
    qd = list(reversed(q.coeffs))
    rows = []
    for i in range(n):
        rows.append([0] * i + pd + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + qd + [0] * (size - n - 1 - i))
    return rows


def _bareiss(mat: list[list[Fraction]]) -> Fraction:
    a = [row[:] for row in mat]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def resultant_scaled(p: Poly, q: Poly) -> tuple[float, int]:
    """Resultant as ``(mantissa, exponent)`` with value mantissa * 10**exponent."""
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    if p.degree == 0 and q.degree == 0:
        return 1.0, 0
    mat = np.array(sylvester(p, q), dtype=complex if not (_is_real(p) and _is_real(q)) else float)
    sign, logabs = np.linalg.slogdet(mat)
    if logabs == -np.inf or sign == 0:
        return 0.0, 0
    log10 = logabs / math.log(10.0)
    exponent = int(math.floor(log10))
    mant = 10.0 ** (log10 - exponent)
    if np.iscomplexobj(sign) and abs(sign.imag) > 0:
        return complex(sign) * mant, exponent
    return float(np.real(sign)) * mant, exponent


def resultant(p: Poly, q: Poly, exact: bool = False):
    """Determinant of the Sylvester matrix of ``p`` and ``q``.

    ``exact=True`` evaluates the determinant in rational arithmetic on the
    (float) coefficients, for real inputs only.
    """
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    if exact:
        mat = [[Fraction(x) for x in row] for row in sylvester(p, q)]
        if not mat:
            return 1.0
        return float(_bareiss(mat))
    mant, exp10 = resultant_scaled(p, q)
    if exp10 > 307:
        raise ResultantOverflow(mant, exp10)
    return mant * 10.0 ** exp10


def extract_square_factor(p: Poly, simple_roots: Sequence[complex],
                          tol: float = 1e-6) -> tuple[Poly, float]:
    """Split a sextic as ``lead * (t - r1)(t - r2) * s(t)**2``.

    Returns the monic quadratic ``s`` and the sup-norm coefficient mismatch
    relative to ``max |p_k|``.
    """
    if p.degree != 6:
        raise ValueError(f"expected a degree-6 polynomial, got degree {p.degree}")
    if len(simple_roots) != 2:
        raise ValueError("exactly two simple roots are required")
    lin = Poly.from_roots(simple_roots)
    quart, _ = p.divmod(lin)
    lead = p.lead
    qc = [x / lead for x in quart.coeffs]
    s1 = qc[3] / 2.0
    s0 = (qc[2] - s1 * s1) / 2.0
    if all(abs(complex(x).imag) == 0 for x in (s1, s0)):
        s1, s0 = complex(s1).real, complex(s0).real
    s = Poly([s0, s1, 1.0])
    rebuilt = lin * s * s * lead
    n = max(len(rebuilt.coeffs), len(p.coeffs))
    a = list(rebuilt.coeffs) + [0] * (n - len(rebuilt.coeffs))
    b = list(p.coeffs) + [0] * (n - len(p.coeffs))
    norm = max(abs(x) for x in p.coeffs)
    residual = max(abs(x - y) for x, y in zip(a, b)) / norm
    if residual > tol:
        raise SquareStructureError(
            f"no square structure: residual {residual:.3e} above {tol:.1e}", residual)
    return s, float(residual)
