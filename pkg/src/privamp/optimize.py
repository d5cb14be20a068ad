"""One-dimensional maximization used by every s-, t- and R'-optimization."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal ``f`` on [lo, hi].

    The endpoints are compared at the end, so a maximum on the boundary is
    returned exactly.
    """
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
    best = [(fc, c), (fd, d), (f(lo), lo), (f(hi), hi)]
    value, x = max(best, key=lambda t: (t[0], -abs(t[1] - lo)))
    return x, value


def maximize(
    f: Callable[[float], float], lo: float, hi: float, grid: int = 64, tol: float = 1e-10
) -> tuple[float, float]:
    """Coarse grid scan followed by golden-section refinement around the best point.

    Robust for quasi-concave objectives and for maxima sitting on an endpoint.
    Ties on the grid go to the lowest index.
    """
    xs = np.linspace(lo, hi, grid)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, grid - 1)]
    x, v = golden_max(f, a, b, tol)
    if vals[i] > v:
        return float(xs[i]), float(vals[i])
    return float(x), float(v)


def minimize(
    f: Callable[[float], float], lo: float, hi: float, grid: int = 64, tol: float = 1e-10
) -> tuple[float, float]:
    x, v = maximize(lambda t: -f(t), lo, hi, grid, tol)
    return x, -v
