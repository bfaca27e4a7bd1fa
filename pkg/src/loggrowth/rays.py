"""Rays in R^n and their standardized representatives.

A closed ray a + R_{>=0} v (|v| = 1) is identified with any ray that
contains it or is contained in it; the canonical representative of the
class is the standardized ray o + R_{>=0} v where o is the orthogonal
projection of a onto the hyperplane normal to v (o is the closest point
of the carrier line to the origin).  Pairs (o, v) with o _|_ v and |v| = 1
parameterize the standardized rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = ["Ray", "StandardizedRay", "standardize_ray", "phi"]

_UNIT_TOL = 1e-12


def _norm(v: Sequence[float]) -> float:
    return math.sqrt(math.fsum(float(c) * float(c) for c in v))


def _dot(a: Sequence[float], b: Sequence[float]) -> float:
    return math.fsum(float(x) * float(y) for x, y in zip(a, b))


@dataclass(frozen=True)
class Ray:
    """Closed ray a + R_{>=0} v with a unit direction v."""

    a: tuple[float, ...]
    v: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(float(c) for c in self.a))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        if len(self.a) != len(self.v):
            raise ValueError("base point and direction must share a dimension")
        if abs(_norm(self.v) - 1.0) > _UNIT_TOL:
            raise ValueError(f"direction must be a unit vector, |v| = {_norm(self.v)!r}")

    @property
    def dim(self) -> int:
        return len(self.v)

    def point_at(self, r: float) -> tuple[float, ...]:
        return tuple(a + r * v for a, v in zip(self.a, self.v))


@dataclass(frozen=True)
class StandardizedRay:
    """Ray o + R_{>=0} v with o _|_ v and |v| = 1."""

    o: tuple[float, ...]
    v: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "o", tuple(float(c) for c in self.o))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        if len(self.o) != len(self.v):
            raise ValueError("offset and direction must share a dimension")
        if abs(_norm(self.v) - 1.0) > _UNIT_TOL:
            raise ValueError(f"direction must be a unit vector, |v| = {_norm(self.v)!r}")
        if abs(_dot(self.o, self.v)) > _UNIT_TOL * max(1.0, _norm(self.o)):
            raise ValueError("offset must be orthogonal to the direction")

    @property
    def dim(self) -> int:
        return len(self.v)

    @property
    def offset_norm(self) -> float:
        return _norm(self.o)

    def point_at(self, r: float) -> tuple[float, ...]:
        return phi(self.o, self.v, r)


def standardize_ray(a: Sequence[float], v: Sequence[float]) -> StandardizedRay:
    """Project the base point onto the normal hyperplane of v.

    The result o = a - (a.v) v is invariant under sliding a along the
    ray's carrier line, so equivalent rays share one representative.
    """
    if len(a) != len(v):
        raise ValueError("base point and direction must share a dimension")
    if abs(_norm(v) - 1.0) > _UNIT_TOL:
        raise ValueError(f"direction must be a unit vector, |v| = {_norm(v)!r}")
    s = _dot(a, v)
    o = tuple(float(ai) - s * float(vi) for ai, vi in zip(a, v))
    # Squash rounding residue so the constructor's orthogonality check holds.
    resid = _dot(o, v)
    if resid != 0.0:
        o = tuple(oi - resid * vi for oi, vi in zip(o, v))
    return StandardizedRay(o, tuple(float(c) for c in v))


def phi(o: Sequence[float], v: Sequence[float], r: float) -> tuple[float, ...]:
    """Point o + r*v of the standardized ray (o, v).

    With o _|_ v the squared norm of the result is |o|^2 + r^2.
    """
    if r < 0:
        raise ValueError("ray parameter must be nonnegative")
    return tuple(float(oi) + r * float(vi) for oi, vi in zip(o, v))
