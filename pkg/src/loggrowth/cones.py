"""Sampled cones at infinity for membership-defined subsets of R^n.

Sets are boolean predicate trees over atoms ``expr cmp 0``; membership is
three-valued (In / Out / Boundary within an atom tolerance), evaluated
exactly when the query point is rational and the atom admits exact
arithmetic, and in floating point with a tolerance band otherwise.

The cones at infinity are approximated by sampling along a geometric
radius ladder:

- the *base at radius r* collects unit directions u with r*u in the set;
- the *tangent base at infinity* keeps the directions that stay within a
  tolerance of the base at every tail radius (the sampled counterpart of
  the Hausdorff limit of the rescaled slices);
- the *strong base* keeps directions whose entire sampled ray tail lies
  inside the set;
- the ray-cone tests ask the same questions for affine rays, comparing
  ray points and set points at matched norms.

In the plane the circle slice at each radius is resolved exactly-ish: the
angular roots of every atom along the circle are bracketed on the grid
and refined by bisection, and the circle decomposes into arcs classified
by a midpoint probe.  This keeps shrinking slices visible (a fixed
angular grid would eventually miss a set thinner than one grid cell).
All verdicts are sampled approximations, never exactness claims.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import expressions as ex
from .rays import StandardizedRay, standardize_ray
from .search import bisect_sign_change

__all__ = [
    "Membership",
    "Atom",
    "And",
    "Or",
    "Not",
    "DefinableSet",
    "DirectionSet",
    "Cone",
    "TangentReport",
    "DensityReport",
    "standardize_ray",
    "default_radii",
    "base_at_radius",
    "tangent_base_at_infinity",
    "strong_base_at_infinity",
    "ray_in_tangent_ray_cone",
    "ray_in_strong_ray_cone",
    "density_report",
    "hausdorff_distance",
]

TWO_PI = 2.0 * math.pi


class Membership(Enum):
    OUT = 0
    BOUNDARY = 1
    IN = 2


_CMPS = ("<", "<=", "=", "!=")


@dataclass(frozen=True)
class Atom:
    expr: ex.Expr
    cmp: str

    def __post_init__(self) -> None:
        if self.cmp not in _CMPS:
            raise ValueError(f"cmp must be one of {_CMPS}, got {self.cmp!r}")


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Not:
    child: object


_Node = Union[Atom, And, Or, Not]


def _atom_membership_sign(sign: int, cmp: str) -> Membership:
    if cmp == "<":
        return Membership.IN if sign < 0 else Membership.OUT
    if cmp == "<=":
        return Membership.IN if sign <= 0 else Membership.OUT
    if cmp == "=":
        return Membership.IN if sign == 0 else Membership.OUT
    return Membership.OUT if sign == 0 else Membership.IN


@dataclass(frozen=True)
class DefinableSet:
    """Membership predicate over R^arity with three-valued evaluation."""

    root: _Node
    arity: int
    boundary_tol: float = 1e-9

    def membership(self, point: Sequence) -> Membership:
        """In/Out/Boundary at the point.

        Points given entirely as ints/Fractions take the exact path when
        every atom allows exact arithmetic; otherwise atom values within
        boundary_tol of zero report Boundary.  An atom whose expression
        is undefined at the point counts as Out.
        """
        exact = all(isinstance(c, (int, Fraction)) for c in point)
        return self._eval(self.root, point, exact)

    def contains(self, point: Sequence, include_boundary: bool = False) -> bool:
        m = self.membership(point)
        return m is Membership.IN or (include_boundary and m is Membership.BOUNDARY)

    def _eval(self, node: _Node, point: Sequence, exact: bool) -> Membership:
        if isinstance(node, Atom):
            return self._eval_atom(node, point, exact)
        if isinstance(node, Not):
            m = self._eval(node.child, point, exact)
            if m is Membership.IN:
                return Membership.OUT
            if m is Membership.OUT:
                return Membership.IN
            return Membership.BOUNDARY
        if isinstance(node, And):
            out = Membership.IN
            for ch in node.children:
                m = self._eval(ch, point, exact)
                if m.value < out.value:
                    out = m
                if out is Membership.OUT:
                    break
            return out
        if isinstance(node, Or):
            out = Membership.OUT
            for ch in node.children:
                m = self._eval(ch, point, exact)
                if m.value > out.value:
                    out = m
                if out is Membership.IN:
                    break
            return out
        raise TypeError(f"unknown node {node!r}")

    def _eval_atom(self, atom: Atom, point: Sequence, exact: bool) -> Membership:
        fv = ex.eval_float(atom.expr, [float(c) for c in point])
        if exact:
            # Trust the float sign when it clears a guard band scaled to
            # the point's magnitude; fall back to exact arithmetic only
            # near zero, where strictness decisions actually live.
            if fv is not None:
                m = max((abs(float(c)) for c in point), default=0.0)
                guard = max(self.boundary_tol, 1e-12 * (1.0 + m * m))
                if abs(fv) > guard:
                    return _atom_membership_sign(1 if fv > 0 else -1, atom.cmp)
            v = ex.eval_exact(atom.expr, [Fraction(c) for c in point])
            if isinstance(v, Fraction):
                sign = (v > 0) - (v < 0)
                return _atom_membership_sign(sign, atom.cmp)
            if v is ex.ExactResult.OUT_OF_DOMAIN:
                return Membership.OUT
        if fv is None:
            return Membership.OUT
        if abs(fv) <= self.boundary_tol:
            return Membership.BOUNDARY
        return _atom_membership_sign(1 if fv > 0 else -1, atom.cmp)

    def atoms(self) -> list[Atom]:
        out: list[Atom] = []

        def walk(node: _Node) -> None:
            if isinstance(node, Atom):
                out.append(node)
            elif isinstance(node, Not):
                walk(node.child)
            else:
                for ch in node.children:
                    walk(ch)

        walk(self.root)
        return out

    # -- JSON set-specification format -------------------------------------

    @staticmethod
    def from_json(obj: Union[str, dict], boundary_tol: float = 1e-9) -> "DefinableSet":
        """Build from {"and"/"or": [...]}, {"not": {...}} or an atom
        {"expr": text, "cmp": "<"|"<="|"="|"!="}."""
        if isinstance(obj, str):
            obj = json.loads(obj)

        def build(o: dict) -> _Node:
            if "and" in o:
                return And(tuple(build(c) for c in o["and"]))
            if "or" in o:
                return Or(tuple(build(c) for c in o["or"]))
            if "not" in o:
                return Not(build(o["not"]))
            if "expr" in o:
                return Atom(ex.parse(o["expr"]), o.get("cmp", "<"))
            raise ValueError(f"unrecognized set node: {o!r}")

        root = build(obj)
        n = 0

        def max_arity(node: _Node) -> int:
            if isinstance(node, Atom):
                return ex.arity(node.expr)
            if isinstance(node, Not):
                return max_arity(node.child)
            return max((max_arity(c) for c in node.children), default=0)

        n = max(max_arity(root), 1)
        return DefinableSet(root, n, boundary_tol)

    def to_json(self) -> dict:
        def emit(node: _Node) -> dict:
            if isinstance(node, Atom):
                return {"expr": ex.to_text(node.expr), "cmp": node.cmp}
            if isinstance(node, Not):
                return {"not": emit(node.child)}
            if isinstance(node, And):
                return {"and": [emit(c) for c in node.children]}
            return {"or": [emit(c) for c in node.children]}

        return emit(self.root)


# ---------------------------------------------------------------------------
# Direction sets and cones


@dataclass(frozen=True)
class DirectionSet:
    """Finite sampled subset of the unit sphere.

    ``members`` are explicit unit vectors; in the plane an optional list
    of angular ``arcs`` (lo, hi) refines the picture between grid
    directions.  Members closer than the merge tolerance are deduplicated.
    """

    n: int
    members: tuple[tuple[float, ...], ...]
    resolution: float
    tolerance: float
    arcs: Optional[tuple[tuple[float, float], ...]] = None

    def __post_init__(self) -> None:
        for m in self.members:
            norm = math.sqrt(sum(c * c for c in m))
            if abs(norm - 1.0) > 1e-9:
                raise ValueError("direction members must be unit vectors")
        object.__setattr__(self, "members", _dedup(self.members, self.tolerance, self.n))

    @property
    def is_empty(self) -> bool:
        return not self.members and not self.arcs

    def distance_to(self, v: Sequence[float]) -> float:
        """Euclidean distance from v to the sampled set (inf if empty)."""
        if self.is_empty:
            return math.inf
        best = math.inf
        if self.arcs is not None and self.n == 2:
            phi = math.atan2(v[1], v[0]) % TWO_PI
            for lo, hi in self.arcs:
                best = min(best, _chord(_angle_to_interval(phi, lo, hi)))
        for m in self.members:
            best = min(best, _euclid(v, m))
        return best


def _euclid(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def _dedup(members: Iterable[Sequence[float]], tol: float, n: int):
    """Merge directions closer than tol: angle sort in the plane, cell
    hashing in higher dimension (approximate, adequate for sampled sets)."""
    members = [tuple(float(c) for c in m) for m in members]
    if len(members) < 2 or tol <= 0.0:
        return tuple(members)
    if n == 2:
        angle_tol = 2.0 * math.asin(min(1.0, tol / 2.0))
        tagged = sorted((math.atan2(m[1], m[0]) % TWO_PI, m) for m in members)
        kept = [tagged[0]]
        for phi, m in tagged[1:]:
            if phi - kept[-1][0] > angle_tol:
                kept.append((phi, m))
        if len(kept) > 1 and (TWO_PI - kept[-1][0] + kept[0][0]) <= angle_tol:
            kept.pop()
        return tuple(m for _, m in kept)
    seen: dict[tuple[int, ...], tuple[float, ...]] = {}
    for m in members:
        key = tuple(int(round(c / tol)) for c in m)
        seen.setdefault(key, m)
    return tuple(seen.values())


def _chord(delta: float) -> float:
    return 2.0 * math.sin(min(abs(delta), math.pi) / 2.0)


def _angle_to_interval(phi: float, lo: float, hi: float) -> float:
    """Circular angular distance from phi to the arc [lo, hi]."""
    width = hi - lo
    rel = (phi - lo) % TWO_PI
    if rel <= width:
        return 0.0
    gap = TWO_PI - width
    past = rel - width
    return min(past, gap - past)


@dataclass(frozen=True)
class Cone:
    """R_{>=0} times a base of directions; membership rescales to the
    sphere, so it is invariant under positive scaling by construction."""

    n: int
    base: DirectionSet | None = None
    center: tuple[float, ...] | None = None
    angular_radius: float | None = None

    def contains(self, point: Sequence[float], tol: float = 1e-9) -> bool:
        norm = math.sqrt(sum(float(c) ** 2 for c in point))
        if norm == 0.0:
            return True
        u = tuple(float(c) / norm for c in point)
        if self.center is not None:
            dot = max(-1.0, min(1.0, sum(a * b for a, b in zip(u, self.center))))
            return math.acos(dot) <= (self.angular_radius or 0.0) + tol
        assert self.base is not None
        return self.base.distance_to(u) <= self.base.tolerance + tol


# ---------------------------------------------------------------------------
# Grids and schedules


def default_radii(max_doublings: int = 20, start: float = 10.0) -> tuple[float, ...]:
    return tuple(start * 2.0 ** j for j in range(max_doublings + 1))


def _circle_grid(grid: int) -> list[float]:
    return [TWO_PI * i / grid for i in range(grid)]


def _fibonacci_sphere(count: int) -> list[tuple[float, float, float]]:
    pts = []
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    for i in range(count):
        z = 1.0 - 2.0 * (i + 0.5) / count
        r = math.sqrt(max(0.0, 1.0 - z * z))
        t = TWO_PI * i / golden
        pts.append((r * math.cos(t), r * math.sin(t), z))
    return pts


def _grid_directions(n: int, grid: int) -> list[tuple[float, ...]]:
    if n == 2:
        return [(math.cos(t), math.sin(t)) for t in _circle_grid(grid)]
    if n == 3:
        return _fibonacci_sphere(grid)
    raise ValueError("direction grids are provided for n = 2 and n = 3")


# ---------------------------------------------------------------------------
# Circle slices (n = 2): per-atom root refinement along the circle


def _circle_arcs(A: DefinableSet, r: float, grid: int,
                 include_boundary: bool = False) -> tuple[tuple[float, float], ...]:
    """Angular arcs of {theta : (r cos, r sin) in A}, refined at atom roots."""
    thetas = _circle_grid(grid)
    criticals: set[float] = set()
    for atom in A.atoms():
        expr = atom.expr

        def val(theta: float) -> float | None:
            return ex.eval_float(expr, (r * math.cos(theta), r * math.sin(theta)))

        vals = [val(t) for t in thetas]
        for i in range(grid):
            v0, v1 = vals[i], vals[(i + 1) % grid]
            t0 = thetas[i]
            t1 = thetas[i] + TWO_PI / grid
            if v0 is None or v1 is None:
                if (v0 is None) != (v1 is None):
                    criticals.add(t1 % TWO_PI)
                continue
            if v0 == 0.0:
                criticals.add(t0)
            if (v0 < 0.0 < v1) or (v1 < 0.0 < v0):
                root = bisect_sign_change(lambda t: val(t) or 0.0, t0, t1)
                criticals.add(root % TWO_PI)
    cuts = sorted(criticals)
    if not cuts:
        probe = A.contains((r, 0.0), include_boundary) and \
            A.contains((-r, 0.0), include_boundary) and \
            A.contains((0.0, r), include_boundary)
        return ((0.0, TWO_PI),) if probe else ()
    arcs: list[tuple[float, float]] = []
    for i, lo in enumerate(cuts):
        hi = cuts[(i + 1) % len(cuts)]
        width = (hi - lo) % TWO_PI
        if width == 0.0:
            width = TWO_PI
        mid = lo + width / 2.0
        if A.contains((r * math.cos(mid), r * math.sin(mid)), include_boundary):
            arcs.append((lo, lo + width))
    # Join arcs that share an endpoint (a critical angle interior to the set).
    joined: list[tuple[float, float]] = []
    for arc in arcs:
        if joined and abs(joined[-1][1] % TWO_PI - arc[0] % TWO_PI) < 1e-12:
            joined[-1] = (joined[-1][0], joined[-1][1] + (arc[1] - arc[0]))
        else:
            joined.append(arc)
    if len(joined) > 1 and abs((joined[-1][1] % TWO_PI) - joined[0][0]) < 1e-12:
        first = joined.pop(0)
        joined[-1] = (joined[-1][0], joined[-1][1] + (first[1] - first[0]))
    return tuple(joined)


class _ArcsCache:
    def __init__(self, A: DefinableSet, grid: int, include_boundary: bool = False):
        self.A = A
        self.grid = grid
        self.include_boundary = include_boundary
        self._store: dict[float, tuple[tuple[float, float], ...]] = {}

    def at(self, r: float) -> tuple[tuple[float, float], ...]:
        if r not in self._store:
            self._store[r] = _circle_arcs(self.A, r, self.grid, self.include_boundary)
        return self._store[r]


def _angle_distance_to_arcs(phi: float, arcs: Sequence[tuple[float, float]]) -> float:
    if not arcs:
        return math.inf
    return min(_angle_to_interval(phi % TWO_PI, lo, hi) for lo, hi in arcs)


# ---------------------------------------------------------------------------
# Bases at finite radius and at infinity


def base_at_radius(A: DefinableSet, r: float, grid: int = 4096,
                   include_boundary: bool = False,
                   refine: bool = True) -> DirectionSet:
    """Directions u on the sampling grid with r*u in A.

    In the plane, with ``refine`` (default), the circle slice is resolved
    into arcs at atom-root precision and arc midpoints join the members,
    so slices thinner than the grid spacing remain visible.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    n = A.arity
    resolution = _chord(TWO_PI / grid) if n == 2 else 4.0 / math.sqrt(grid)
    tol = resolution / 4.0
    if n == 2 and refine:
        arcs = _circle_arcs(A, r, grid, include_boundary)
        members: list[tuple[float, ...]] = []
        for lo, hi in arcs:
            mid = (lo + hi) / 2.0
            members.append((math.cos(mid), math.sin(mid)))
            step = TWO_PI / grid
            k = int((hi - lo) / step)
            for i in range(k + 1):
                t = lo + i * step
                if lo <= t <= hi:
                    members.append((math.cos(t), math.sin(t)))
        return DirectionSet(2, tuple(members), resolution, tol, arcs)
    members = tuple(u for u in _grid_directions(n, grid)
                    if A.contains(tuple(r * c for c in u), include_boundary))
    return DirectionSet(n, members, resolution, tol)


@dataclass(frozen=True)
class TangentReport:
    stabilized: bool
    tail_radii: tuple[float, ...]
    per_radius_distance: tuple[float, ...]


def tangent_base_at_infinity(
    A: DefinableSet,
    radii: Sequence[float] | None = None,
    tol: float = 1e-3,
    grid: int = 4096,
    tail: int = 8,
    full_output: bool = False,
):
    """Grid directions that stay within tol of the base at every tail radius.

    This samples the Hausdorff limit of the rescaled slices; the verdict
    is reported as stabilized when dropping the largest radius does not
    change the kept set.
    """
    rs = tuple(radii) if radii is not None else default_radii()
    if len(rs) < 4:
        raise ValueError("schedule needs at least 4 radii")
    tail_rs = rs[-tail:]
    n = A.arity
    dirs = _grid_directions(n, grid)
    if n == 2:
        cache = _ArcsCache(A, grid)
        angle_tol = 2.0 * math.asin(min(1.0, tol / 2.0))
        dists = []
        for r in tail_rs:
            arcs = cache.at(r)
            dists.append([_angle_distance_to_arcs(math.atan2(u[1], u[0]), arcs)
                          for u in dirs])
        kept, kept_prev = [], []
        for i, u in enumerate(dirs):
            if all(row[i] <= angle_tol for row in dists):
                kept.append(u)
            if all(row[i] <= angle_tol for row in dists[:-1]):
                kept_prev.append(u)
    else:
        bases = [base_at_radius(A, r, grid) for r in tail_rs]
        kept = [u for u in dirs if all(b.distance_to(u) <= tol for b in bases)]
        kept_prev = [u for u in dirs if all(b.distance_to(u) <= tol for b in bases[:-1])]
    resolution = _chord(TWO_PI / grid) if n == 2 else 4.0 / math.sqrt(grid)
    ds = DirectionSet(n, tuple(kept), resolution, resolution / 4.0)
    if not full_output:
        return ds
    per_r = tuple(hausdorff_distance(base_at_radius(A, r, grid), ds) for r in tail_rs)
    return ds, TangentReport(len(kept) == len(kept_prev), tail_rs, per_r)


def strong_base_at_infinity(
    A: DefinableSet,
    t_schedule: Sequence[float] | None = None,
    grid: int = 4096,
    tail: int = 8,
    include_boundary: bool = False,
) -> DirectionSet:
    """Directions v whose sampled ray tail {t*v} lies inside A."""
    ts = tuple(t_schedule) if t_schedule is not None else default_radii()
    tail_ts = ts[-tail:]
    n = A.arity
    members = []
    for u in _grid_directions(n, grid):
        # Exact sample points (floats convert exactly), so strict atoms
        # on the boundary are honored rather than reported as Boundary.
        if all(A.contains(tuple(Fraction(t) * Fraction(c) for c in u), include_boundary)
               for t in tail_ts):
            members.append(u)
    resolution = _chord(TWO_PI / grid) if n == 2 else 4.0 / math.sqrt(grid)
    return DirectionSet(n, tuple(members), resolution, resolution / 4.0)


# ---------------------------------------------------------------------------
# Ray cones


def ray_in_tangent_ray_cone(
    A: DefinableSet,
    ray: StandardizedRay,
    radii: Sequence[float] | None = None,
    tol: float = 1e-3,
    grid: int = 4096,
    tail: int = 8,
    _cache: _ArcsCache | None = None,
) -> bool:
    """Sampled test: does A approximate the ray at matched norms?

    For each tail radius rho the unique ray point y with |y| = rho is
    compared against the circle slice of A at the same norm; the ray
    passes when the angular mismatch stays below tol at every tail
    radius.  The tolerance is measured on directions (chord scaled by the
    common norm), which makes the verdict depend on the direction only,
    matching the inclusion between the ray cone and the tangent cone.
    """
    rs = tuple(radii) if radii is not None else default_radii()
    tail_rs = [r for r in rs[-tail:] if r > ray.offset_norm * 2.0]
    if not tail_rs:
        raise ValueError("schedule tail does not clear the ray offset")
    n = A.arity
    if n == 2:
        cache = _cache or _ArcsCache(A, grid)
        angle_tol = 2.0 * math.asin(min(1.0, tol / 2.0))
        for rho in tail_rs:
            s = math.sqrt(rho * rho - ray.offset_norm ** 2)
            y = ray.point_at(s)
            phi = math.atan2(y[1], y[0])
            if _angle_distance_to_arcs(phi, cache.at(rho)) > angle_tol:
                return False
        return True
    for rho in tail_rs:
        s = math.sqrt(rho * rho - ray.offset_norm ** 2)
        y = ray.point_at(s)
        base = base_at_radius(A, rho, grid)
        u = tuple(c / rho for c in y)
        if base.distance_to(u) > tol:
            return False
    return True


def ray_in_strong_ray_cone(
    A: DefinableSet,
    ray: StandardizedRay,
    t_schedule: Sequence[float] | None = None,
    tail: int = 8,
    include_boundary: bool = False,
) -> bool:
    """Sampled test: does the ray tail {o + t*v} lie inside A?

    Sample points are formed exactly (floats convert to exact rationals),
    so strict versus non-strict atoms are honored exactly whenever the
    atoms admit exact arithmetic.
    """
    ts = tuple(t_schedule) if t_schedule is not None else default_radii()
    for t in ts[-tail:]:
        point = tuple(
            Fraction(o) + Fraction(t) * Fraction(v)
            for o, v in zip(ray.o, ray.v)
        )
        if not A.contains(point, include_boundary):
            return False
    return True


# ---------------------------------------------------------------------------
# Density at infinity


@dataclass(frozen=True)
class DensityReport:
    spherically_dense: bool
    strongly_spherically_dense: bool
    ray_dense: bool
    strongly_ray_dense: bool
    sampled_rays: int
    failing_ray: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None
    note: str = "sampled verdicts on finite schedules; not exactness claims"

    def to_json(self) -> dict:
        return {
            "spherically_dense": self.spherically_dense,
            "strongly_spherically_dense": self.strongly_spherically_dense,
            "ray_dense": self.ray_dense,
            "strongly_ray_dense": self.strongly_ray_dense,
            "sampled_rays": self.sampled_rays,
            "failing_ray": None if self.failing_ray is None else
                {"o": list(self.failing_ray[0]), "v": list(self.failing_ray[1])},
            "note": self.note,
        }


DEFAULT_OFFSETS = (0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0)


def _sample_rays(n: int, direction_count: int,
                 offsets: Sequence[float]) -> list[StandardizedRay]:
    rays = []
    if n != 2:
        raise ValueError("ray sampling for density is provided in the plane")
    for i in range(direction_count):
        t = TWO_PI * i / direction_count
        v = (math.cos(t), math.sin(t))
        perp = (-v[1], v[0])
        for w in offsets:
            rays.append(StandardizedRay((w * perp[0], w * perp[1]), v))
    return rays


def density_report(
    A: DefinableSet,
    direction_count: int = 64,
    offsets: Sequence[float] = DEFAULT_OFFSETS,
    radii: Sequence[float] | None = None,
    grid: int = 4096,
    tol: float = 1e-3,
    tail: int = 8,
) -> DensityReport:
    """The four sampled density predicates at infinity.

    Spherical density asks the tangent (resp. strong) base to cover the
    whole direction grid; ray density asks every sampled standardized ray
    to pass the tangent (resp. strong) ray-cone test.
    """
    rs = tuple(radii) if radii is not None else default_radii()
    tangent = tangent_base_at_infinity(A, rs, tol=tol, grid=grid, tail=tail)
    spher = len(tangent.members) == grid
    strong = strong_base_at_infinity(A, rs, grid=grid, tail=tail)
    strong_spher = len(strong.members) == grid
    rays = _sample_rays(A.arity, direction_count, offsets)
    cache = _ArcsCache(A, grid)
    ray_dense = True
    strong_ray_dense = True
    failing = None
    for ray in rays:
        if ray_dense and not ray_in_tangent_ray_cone(A, ray, rs, tol=tol, grid=grid,
                                                     tail=tail, _cache=cache):
            ray_dense = False
        if strong_ray_dense and not ray_in_strong_ray_cone(A, ray, rs, tail=tail):
            strong_ray_dense = False
            if failing is None:
                failing = (ray.o, ray.v)
        if not ray_dense and not strong_ray_dense:
            break
    return DensityReport(spher, strong_spher, ray_dense, strong_ray_dense,
                         len(rays), failing)


# ---------------------------------------------------------------------------
# Hausdorff distance between direction sets


def _interval_items(ds: DirectionSet) -> list[tuple[float, float]]:
    items: list[tuple[float, float]] = []
    if ds.arcs:
        for lo, hi in ds.arcs:
            items.append((lo % TWO_PI, hi - lo))
    for m in ds.members:
        items.append((math.atan2(m[1], m[0]) % TWO_PI, 0.0))
    items.sort()
    return items


def _dist_to_items(phi: float, items: list[tuple[float, float]]) -> float:
    return min(_angle_to_interval(phi, lo, lo + w) for lo, w in items)


def _directed_2d(d1: DirectionSet, d2: DirectionSet) -> float:
    items1 = _interval_items(d1)
    items2 = _interval_items(d2)
    # Candidates for the supremum: endpoints of d1's intervals, plus the
    # midpoints of d2's gaps that fall inside d1's arcs (local maxima of
    # the distance function along an arc).
    candidates: list[float] = []
    for lo, w in items1:
        candidates.append(lo)
        if w > 0.0:
            candidates.append((lo + w) % TWO_PI)
    if d1.arcs:
        gap_mids = []
        for (lo_a, w_a), (lo_b, _) in zip(items2, items2[1:] + items2[:1]):
            end_a = lo_a + w_a
            gap = (lo_b - end_a) % TWO_PI
            if gap > 0.0:
                gap_mids.append((end_a + gap / 2.0) % TWO_PI)
        for mid in gap_mids:
            for lo, w in items1:
                if w > 0.0 and (mid - lo) % TWO_PI <= w:
                    candidates.append(mid)
                    break
    return max(_chord(_dist_to_items(phi, items2)) for phi in candidates)


def hausdorff_distance(d1: DirectionSet, d2: DirectionSet) -> float:
    """Max of the two directed sup-min euclidean distances.

    Distance to an empty set is +inf; between two empty sets it is 0.
    """
    if d1.is_empty and d2.is_empty:
        return 0.0
    if d1.is_empty or d2.is_empty:
        return math.inf
    if d1.n == 2 and d2.n == 2:
        return max(_directed_2d(d1, d2), _directed_2d(d2, d1))
    a = np.array(d1.members)
    b = np.array(d2.members)
    dm = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))
