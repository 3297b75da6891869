"""Scalar search for concave objectives."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def ternary_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9):
    """Maximize a concave ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    Golden-section variant of ternary search: one new evaluation per
    iteration, bracket shrinks until its width is below ``tol``. The end
    points are compared against the interior winner so maximizers sitting
    exactly on the boundary are returned exactly.
    """
    if hi < lo:
        raise ValueError("empty interval")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    best = (x, f(x))
    for edge in (lo, hi):
        fe = f(edge)
        if fe > best[1]:
            best = (edge, fe)
    return best
