"""Gauss-Legendre quadrature with square-root endpoint substitution."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np


class QuadratureError(RuntimeError):
    def __init__(self, message: str, interval: tuple[float, float]):
        super().__init__(message)
        self.interval = interval


@lru_cache(maxsize=16)
def gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(f: Callable, lo: float, hi: float, order: int = 64):
    """Plain Gauss-Legendre rule on ``[lo, hi]``; ``f`` is vectorised."""
    x, w = gl_nodes(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * np.dot(w, f(mid + half * x))


def integrate_panel(f: Callable, lo: float, hi: float, sing_lo: bool = False,
                    sing_hi: bool = False, order: int = 64):
    """Integral over one panel with ``u**2`` substitution at singular ends."""
    if lo == hi:
        return 0.0
    if sing_lo and sing_hi:
        mid = 0.5 * (lo + hi)
        return (integrate_panel(f, lo, mid, True, False, order)
                + integrate_panel(f, mid, hi, False, True, order))
    if sing_lo:
        length = hi - lo
        return gauss_legendre(lambda u: 2.0 * u * f(lo + u * u), 0.0, np.sqrt(abs(length)), order) * np.sign(length)
    if sing_hi:
        length = hi - lo
        return gauss_legendre(lambda u: 2.0 * u * f(hi - u * u), 0.0, np.sqrt(abs(length)), order) * np.sign(length)
    return gauss_legendre(f, lo, hi, order)


def checked_panel(f: Callable, lo: float, hi: float, sing_lo: bool = False,
                  sing_hi: bool = False, order: int = 64, rtol: float = 1e-10,
                  atol: float = 1e-13):
    """Panel integral confirmed against a two-panel split."""
    whole = integrate_panel(f, lo, hi, sing_lo, sing_hi, order)
    mid = 0.5 * (lo + hi)
    split = (integrate_panel(f, lo, mid, sing_lo, False, order)
             + integrate_panel(f, mid, hi, False, sing_hi, order))
    if abs(whole - split) > rtol * abs(split) + atol:
        raise QuadratureError(
            f"quadrature did not converge on [{lo}, {hi}]: {abs(whole - split):.3e}", (lo, hi))
    return split


def cumulative(f: Callable, anchor: float, xs: Sequence[float],
               singular: Sequence[float] = (), order: int = 32) -> np.ndarray:
    """``int_anchor^x f`` for each ``x``, integrating panel by panel.

    Panel ends at points of ``singular`` get the square-root substitution.
    """
    xs = np.asarray(xs, dtype=float)
    sing = set(float(s) for s in singular)
    core = sorted(sing | {float(anchor)})
    gaps = np.diff(core)
    h0 = float(min(gaps[gaps > 0])) if np.any(gaps > 0) else 1.0
    extra = list(np.arange(core[0], core[-1], 0.5 * h0))
    # geometric panels away from the singular hull
    for sign, edge in ((1.0, core[-1]), (-1.0, core[0])):
        far = np.max(sign * (xs - edge)) if xs.size else 0.0
        step = h0
        pos = step
        while pos < far:
            extra.append(edge + sign * pos)
            step *= 1.5
            pos += step
    knots = np.unique(np.concatenate([xs, list(sing), [anchor], extra]))
    ia = int(np.searchsorted(knots, anchor))
    vals = np.zeros(len(knots), dtype=complex)
    for i in range(ia + 1, len(knots)):
        lo, hi = knots[i - 1], knots[i]
        vals[i] = vals[i - 1] + integrate_panel(f, lo, hi, lo in sing, hi in sing, order)
    for i in range(ia - 1, -1, -1):
        lo, hi = knots[i], knots[i + 1]
        vals[i] = vals[i + 1] - integrate_panel(f, lo, hi, lo in sing, hi in sing, order)
    idx = np.searchsorted(knots, xs)
    return vals[idx]
