"""One-dimensional search utilities: golden-section maximization with a
coarse multistart grid, and bisection for monotone root finding."""

from __future__ import annotations

import math
from typing import Callable, Sequence

__all__ = ["golden_max", "grid_then_golden", "bisect_increasing", "bisect_sign_change"]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f: Callable[[float], float], a: float, b: float,
               tol: float = 1e-13, max_iter: int = 200) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [a, b].

    Returns (argmax, max).  Ties move the bracket toward the right probe,
    which handles flat plateaus at the bracket edges.
    """
    h = b - a
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(max_iter):
        if h <= tol or h <= 1e-15 * max(abs(a), abs(b), 1.0):
            break
        if yc > yd:
            b, d, yd = d, c, yc
            h = b - a
            c = a + _INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INV_PHI * h
            yd = f(d)
    if yc > yd:
        return c, yc
    return d, yd


def grid_then_golden(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    grid: int = 4096,
    starts: int = 8,
    circular: bool = False,
    tol: float = 1e-13,
) -> tuple[float, float]:
    """Coarse grid scan followed by golden-section refinement.

    The top ``starts`` grid points (deduplicated so adjacent indices do
    not waste starts) each seed a golden-section search on the bracket of
    their two neighbours.  ``circular`` treats [lo, hi) as periodic.
    """
    if grid < 8:
        raise ValueError("grid too small")
    span = hi - lo
    n = grid
    step = span / n
    xs = [lo + i * step for i in range(n if circular else n + 1)]
    ys = [f(x) for x in xs]
    order = sorted(range(len(xs)), key=lambda i: ys[i], reverse=True)
    chosen: list[int] = []
    for i in order:
        if len(chosen) >= starts:
            break
        if any(min(abs(i - j), (len(xs) - abs(i - j)) if circular else abs(i - j)) <= 1
               for j in chosen):
            continue
        chosen.append(i)
    best_x, best_y = xs[order[0]], ys[order[0]]
    for i in chosen:
        if circular:
            a = lo + (i - 1) * step
            b = lo + (i + 1) * step
            x, y = golden_max(lambda t: f(lo + (t - lo) % span), a, b, tol=tol)
            x = lo + (x - lo) % span
        else:
            a = max(lo, xs[i] - step)
            b = min(hi, xs[i] + step)
            x, y = golden_max(f, a, b, tol=tol)
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y


def bisect_increasing(f: Callable[[float], float], target: float,
                      lo: float, hi: float, max_iter: int = 200) -> float:
    """Root of f(x) = target for increasing f with f(lo) < target < f(hi)."""
    flo, fhi = f(lo), f(hi)
    if not (flo < target < fhi):
        raise ValueError(f"bracket does not contain the target: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_sign_change(f: Callable[[float], float], lo: float, hi: float,
                       max_iter: int = 80) -> float:
    """Root location for f with f(lo), f(hi) of opposite (or zero) sign."""
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if (flo <= 0.0) == (fm <= 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
