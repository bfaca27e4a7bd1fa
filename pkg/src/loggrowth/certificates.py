"""Per-ray growth certificates, polynomial cones, and ray surveys.

A certificate (N, d, t) witnesses |f(o + r v)| <= d * r^N for sampled
r > t along a standardized ray.  Certification tries a symbolic route
first (restrict the expression to the ray, expand, take the bound
exponent of the dominant monomial) and falls back to a numeric route:
window growth exponents along a doubling radius ladder, with

    N = ceil(stable_slope - snap) + 1

where ``snap`` (default 0.01) keeps a slope sitting epsilon above an
integer from overshooting by a whole extra power, and the +1 gives slack
that absorbs logarithmic drift.  The constant d and threshold t are
fitted from the ladder samples and every certificate is re-validated on
a twice-denser ladder; ``validated`` reports that check.

A survey certifies a seeded family of standardized rays (low-discrepancy
directions crossed with transversal offsets), aggregates the maxima N_U
and d_U, and records a sphere-supremum trace for contrast: the explicit
construction in ``counterexample`` certifies along every sampled ray with
small N while its sphere suprema grow exponentially.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from . import expressions as ex
from . import multiseries as ms
from .cones import Cone
from .counterexample import BuiltinFunction, max_on_circle
from .monomials import iterated_exp
from .multiseries import GrowthCertificate, GrowthKind
from .rays import StandardizedRay, phi, standardize_ray
from .search import grid_then_golden

__all__ = [
    "GrowthCertificate",
    "UncertifiableOnSchedule",
    "CertifyConfig",
    "RaySurveyReport",
    "phi",
    "certify_ray",
    "find_polynomial_cone",
    "survey_rays",
    "sphere_sup",
    "ray_sampler",
    "restrict_any",
]

Target = Union[ex.Expr, BuiltinFunction]

TWO_PI = 2.0 * math.pi


class UncertifiableOnSchedule(Exception):
    """Window slopes kept increasing through the last window (or the ray
    tail is undefined): no polynomial bound is certifiable on this
    schedule.  For a function known to admit per-ray polynomial bounds
    this signals schedule exhaustion, not a counterexample."""

    def __init__(self, message: str, slopes: Sequence[float] = ()):  # noqa: D107
        super().__init__(message)
        self.slopes = tuple(slopes)


@dataclass(frozen=True)
class CertifyConfig:
    fit_start: float = 10.0
    fit_doublings: int = 16
    validate_max: float = 1e6
    snap: float = 0.1
    spread: float = 0.1
    margin: float = 1.05
    d_floor: float = 1e-12
    trace_radii: tuple[float, ...] = (5.0, 10.0, 15.0, 20.0)
    grid: int = 4096
    offset_bound: float = 10.0
    expansion: ms.ExpansionConfig = field(default_factory=ms.ExpansionConfig)

    def fit_radii(self) -> list[float]:
        return [self.fit_start * 2.0 ** j for j in range(self.fit_doublings + 1)]

    def dense_radii(self, factor: int = 2) -> list[float]:
        out = []
        j = 0.0
        step = 1.0 / factor
        while True:
            r = self.fit_start * 2.0 ** j
            if r > self.validate_max:
                break
            out.append(r)
            j += step
        return out


DEFAULT_CONFIG = CertifyConfig()


def restrict_any(f: Target, ray: StandardizedRay):
    """Unary view of f along the ray: an expression when f is one, else a
    closure r -> f(o + r v)."""
    if isinstance(f, ex.Expr):
        return ex.restrict_to_ray(f, ray)

    def section(r: float) -> float | None:
        return f.eval_float(ray.point_at(r))

    return section


def _ray_values_fn(f: Target, ray: StandardizedRay) -> Callable[[float], float | None]:
    if isinstance(f, ex.Expr):
        return lambda r: ex.eval_float(f, ray.point_at(r))
    return lambda r: f.eval_float(ray.point_at(r))


def _window_slopes(samples: list[tuple[float, float]]) -> list[float]:
    slopes = []
    for (r1, v1), (r2, v2) in zip(samples, samples[1:]):
        if v1 <= 0.0 or v2 <= 0.0 or not math.isfinite(v1) or not math.isfinite(v2):
            continue
        slopes.append(math.log(v2 / v1) / math.log(r2 / r1))
    return slopes


def _numeric_exponent(slopes: list[float], cfg: CertifyConfig) -> int:
    if len(slopes) < 3:
        raise UncertifiableOnSchedule("too few usable slope windows", slopes)
    tail = slopes[-4:] if len(slopes) >= 4 else slopes
    rising = all(b > a for a, b in zip(tail, tail[1:]))
    if rising and tail[-1] - tail[0] > cfg.spread:
        increments = [b - a for a, b in zip(tail, tail[1:])]
        accelerating = all(b >= a - 1e-9 for a, b in zip(increments, increments[1:]))
        if accelerating:
            raise UncertifiableOnSchedule(
                f"slopes increase through the last window: {tail}", slopes)
    last3 = slopes[-3:]
    if max(last3) - min(last3) < cfg.spread:
        est = last3[-1]
    elif len(slopes) >= 4 and all(a > b for a, b in zip(tail, tail[1:])):
        est = slopes[-1]
    else:
        est = max(last3)
    return math.ceil(est - cfg.snap) + 1


def _t_floor(f: Target, cfg: CertifyConfig) -> float:
    depth = ex.log_depth(f) if isinstance(f, ex.Expr) else f.log_depth
    if depth <= 4:
        return float(iterated_exp(depth, 64))
    return math.inf


def _stable_threshold(values: Callable[[float], float | None],
                      cfg: CertifyConfig) -> float:
    """Left edge of the final stable slope run along the fit ladder.

    Certificates describe ray tails; starting the threshold after the
    transient (axis crossings, sign changes, early humps) keeps the
    constant d a property of the tail rather than of the transient.
    """
    fit = [(r, values(r)) for r in cfg.fit_radii()]
    fit_def = [(r, abs(v)) for r, v in fit if v is not None and math.isfinite(v)]
    radii = [r for r, _ in fit_def]
    slopes = _window_slopes(fit_def)
    if len(slopes) < 2:
        return cfg.fit_start
    s_end = slopes[-1]
    k = len(slopes)
    while k > 0 and abs(slopes[k - 1] - s_end) <= 2.5 * cfg.spread:
        k -= 1
    t_stable = radii[k] if k > 0 else cfg.fit_start
    return min(t_stable, cfg.validate_max / 16.0)


def _fit_certificate(values: Callable[[float], float | None], N: int,
                     t_floor: float, cfg: CertifyConfig,
                     mode: str = "ray") -> GrowthCertificate:
    t = max(cfg.fit_start, t_floor, _stable_threshold(values, cfg))

    def ratio(log_r: float) -> float:
        r = 10.0 ** log_r
        v = values(r)
        if v is None or not math.isfinite(v):
            return -math.inf
        return abs(v) / r ** N

    # The supremum of |F(r)|/r^N over (t, inf) typically sits at the
    # threshold or at an interior hump; locate it by multistart
    # refinement on the log-radius axis so denser validation ladders
    # cannot discover a larger ratio later.
    lo = math.log10(t * (1.0 + 1e-9))
    hi = math.log10(cfg.validate_max)
    _, sup_est = grid_then_golden(ratio, lo, hi, grid=128, starts=6, tol=1e-10)
    if not math.isfinite(sup_est):
        raise UncertifiableOnSchedule("ray tail mostly undefined")
    d = max(sup_est * cfg.margin, cfg.d_floor)
    validated = True
    dense = [(r, values(r)) for r in cfg.dense_radii(4) if r > t]
    dense_def = [(r, abs(v)) for r, v in dense if v is not None and math.isfinite(v)]
    if not dense_def:
        raise UncertifiableOnSchedule("ray tail mostly undefined")
    if any(v > d * r ** N for r, v in dense_def):
        d = max(v / r ** N for r, v in dense_def) * cfg.margin
        validated = all(v <= d * r ** N for r, v in dense_def)
    samples = tuple((r, v, d * r ** N) for r, v in
                    [(r, v) for r, v in dense_def if r in set(cfg.dense_radii(2))] or dense_def)
    step = max(1, len(samples) // 24)
    return GrowthCertificate(N, d, t, samples[::step], validated, mode)


def certify_ray(f: Target, ray: StandardizedRay,
                config: CertifyConfig | None = None) -> GrowthCertificate:
    """Certificate |f| <= d * r^N along the ray, validated by sampling.

    Expressions go through the symbolic route first (ray restriction plus
    the growth classifier); built-ins and symbolic failures use the
    numeric slope route.  Raises UncertifiableOnSchedule when the slopes
    keep increasing through the last window.
    """
    cfg = config or DEFAULT_CONFIG
    values = _ray_values_fn(f, ray)
    t_floor = _t_floor(f, cfg)
    if isinstance(f, ex.Expr):
        try:
            cls = ms.classify_growth(ex.restrict_to_ray(f, ray), cfg.expansion)
            if cls.kind is GrowthKind.POLY_BOUNDED and cls.N is not None:
                return _fit_certificate(values, cls.N, t_floor, cfg)
        except (ms.OutOfFragment, ms.DepthExhausted):
            pass
    fit = [(r, values(r)) for r in cfg.fit_radii()]
    fit_def = [(r, abs(v)) for r, v in fit if v is not None and math.isfinite(v)]
    if len(fit_def) < 3:
        raise UncertifiableOnSchedule("ray tail mostly undefined")
    if all(v < 1e-300 for _, v in fit_def):
        return GrowthCertificate(0, cfg.d_floor, max(cfg.fit_start, t_floor), (), True)
    N = _numeric_exponent(_window_slopes(fit_def), cfg)
    return _fit_certificate(values, N, t_floor, cfg)


# ---------------------------------------------------------------------------
# Polynomial cones


def find_polynomial_cone(
    f: Target,
    config: CertifyConfig | None = None,
    center_angle: float | None = None,
    samples_per_ring: int = 9,
) -> tuple[Cone, GrowthCertificate]:
    """Greedy direction-ball search for a cone of certifiable directions.

    Certifies the center direction (ray through the origin), then doubles
    the angular radius while every sampled direction in the ball
    certifies with a common (N, d, T); returns the largest ball that
    validated.  Raises RuntimeError when no center certifies.
    """
    cfg = config or DEFAULT_CONFIG
    if (isinstance(f, ex.Expr) and ex.arity(f) != 2) or \
            (isinstance(f, BuiltinFunction) and f.arity != 2):
        raise ValueError("cone search is implemented in the plane")
    if center_angle is not None:
        centers = [center_angle]
    else:
        centers = [math.pi, math.pi / 2, 3 * math.pi / 2, math.pi / 4,
                   3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4, 0.0]
    errors = []
    for theta0 in centers:
        try:
            cone, cert = _grow_ball(f, theta0, cfg, samples_per_ring)
            return cone, cert
        except UncertifiableOnSchedule as exc:
            errors.append(f"center {theta0:.3f}: {exc}")
    raise RuntimeError("no certifiable center direction found: " + "; ".join(errors))


def _origin_ray(theta: float) -> StandardizedRay:
    return StandardizedRay((0.0, 0.0), (math.cos(theta), math.sin(theta)))


def _grow_ball(f: Target, theta0: float, cfg: CertifyConfig,
               samples_per_ring: int) -> tuple[Cone, GrowthCertificate]:
    cert_cache: dict[float, GrowthCertificate] = {}

    def cert_at(theta: float) -> GrowthCertificate:
        if theta not in cert_cache:
            cert_cache[theta] = certify_ray(f, _origin_ray(theta), cfg)
        return cert_cache[theta]

    center_cert = cert_at(theta0)
    best: tuple[float, GrowthCertificate] = (0.0, center_cert)
    rho = math.pi / 64.0
    while rho <= math.pi + 1e-12:
        rho_eff = min(rho, math.pi)
        offsets = [rho_eff * (2.0 * i / (samples_per_ring - 1) - 1.0)
                   for i in range(samples_per_ring)]
        try:
            certs = [cert_at(theta0 + off) for off in offsets]
        except UncertifiableOnSchedule:
            break
        N = max(c.N for c in certs)
        T = max(c.t for c in certs)
        d = cfg.d_floor
        ok = True
        for off in offsets:
            values = _ray_values_fn(f, _origin_ray(theta0 + off))
            for r in cfg.dense_radii():
                if r <= T:
                    continue
                v = values(r)
                if v is None or not math.isfinite(v):
                    ok = False
                    break
                d = max(d, abs(v) / r ** N)
            if not ok:
                break
        if not ok:
            break
        d *= cfg.margin
        sample_values = _ray_values_fn(f, _origin_ray(theta0))
        samples = tuple((r, abs(sample_values(r) or 0.0), d * r ** N)
                        for r in cfg.dense_radii() if r > T)
        best = (rho_eff, GrowthCertificate(N, d, T, samples[:: max(1, len(samples) // 24)],
                                           True, "cone"))
        if rho_eff >= math.pi:
            break
        rho *= 2.0
    rho_best, cert = best
    center = (math.cos(theta0), math.sin(theta0))
    return Cone(2, center=center, angular_radius=rho_best), cert


# ---------------------------------------------------------------------------
# Ray surveys


@dataclass(frozen=True)
class RaySurveyReport:
    """Per-ray certificates with aggregated maxima and a sphere trace."""

    entries: tuple[tuple[StandardizedRay, Optional[GrowthCertificate], str], ...]
    N_U: Optional[int]
    d_U: Optional[float]
    sphere_trace: tuple[tuple[float, float], ...]
    seed: int
    count: int

    @property
    def validated_count(self) -> int:
        return sum(1 for _, c, _ in self.entries if c is not None and c.validated)

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "seed": self.seed,
            "validated": self.validated_count,
            "N_U": self.N_U,
            "d_U": self.d_U,
            "sphere_trace": [{"r": r, "sup": s} for r, s in self.sphere_trace],
            "rays": [
                {
                    "o": list(ray.o),
                    "v": list(ray.v),
                    "certificate": cert.to_json() if cert is not None else None,
                    "error": err or None,
                }
                for ray, cert, err in self.entries
            ],
        }


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_PLASTIC = 0.7548776662466927


def ray_sampler(seed: int, n: int = 2, offset_bound: float = 10.0):
    """Deterministic standardized-ray generator.

    In the plane: golden-angle low-discrepancy directions crossed with a
    Kronecker sequence of transversal offsets in [-offset_bound,
    offset_bound], both phase-shifted by the seed.  Higher dimensions use
    a seeded Gaussian direction with a projected offset.
    """
    rng = random.Random(seed)
    u0, u1 = rng.random(), rng.random()

    def make(i: int) -> StandardizedRay:
        if n == 2:
            t = TWO_PI * ((u0 + (i + 1) * _GOLDEN) % 1.0)
            w = offset_bound * (2.0 * ((u1 + (i + 1) * _PLASTIC) % 1.0) - 1.0)
            v = (math.cos(t), math.sin(t))
            return StandardizedRay((-w * v[1], w * v[0]), v)
        coords = [rng.gauss(0.0, 1.0) for _ in range(n)]
        norm = math.sqrt(sum(c * c for c in coords))
        v = tuple(c / norm for c in coords)
        raw = [rng.uniform(-offset_bound, offset_bound) for _ in range(n)]
        return standardize_ray(tuple(raw), v)

    return make


def survey_rays(
    f: Target,
    count: int = 100,
    seed: int = 42,
    config: CertifyConfig | None = None,
    sampler=None,
) -> RaySurveyReport:
    """Certify a seeded family of rays and trace sphere suprema.

    N_U and d_U are the maxima of the per-ray certificate fields;
    failures are recorded per ray and excluded from the aggregates.
    Deterministic for a fixed seed and configuration.
    """
    if count < 1:
        raise ValueError("count must be positive")
    cfg = config or DEFAULT_CONFIG
    n = ex.arity(f) if isinstance(f, ex.Expr) else f.arity
    gen = sampler or ray_sampler(seed, max(n, 2), cfg.offset_bound)
    entries = []
    for i in range(count):
        ray = gen(i)
        try:
            cert = certify_ray(f, ray, cfg)
            entries.append((ray, cert, ""))
        except UncertifiableOnSchedule as exc:
            entries.append((ray, None, str(exc)))
    certs = [c for _, c, _ in entries if c is not None]
    N_U = max((c.N for c in certs), default=None)
    d_U = max((c.d for c in certs), default=None)
    trace = tuple((r, sphere_sup(f, r, cfg.grid)) for r in cfg.trace_radii)
    return RaySurveyReport(tuple(entries), N_U, d_U, trace, seed, count)


def sphere_sup(f: Target, r: float, grid: int = 4096) -> float:
    """Supremum estimate of |f| over the sphere of radius r (grid scan
    plus golden-section refinement in the plane)."""
    if isinstance(f, BuiltinFunction) and f.name == "counterexample-f":
        return max_on_circle(r, grid)[0]
    n = ex.arity(f) if isinstance(f, ex.Expr) else f.arity
    if n == 2:
        def value(theta: float) -> float:
            p = (r * math.cos(theta), r * math.sin(theta))
            v = ex.eval_float(f, p) if isinstance(f, ex.Expr) else f.eval_float(p)
            return abs(v) if v is not None and math.isfinite(v) else -math.inf

        _, best = grid_then_golden(value, 0.0, TWO_PI, grid=grid, starts=8, circular=True)
        return best
    from .cones import _grid_directions  # local import to avoid cycles

    best = -math.inf
    for u in _grid_directions(n, grid):
        p = tuple(r * c for c in u)
        v = ex.eval_float(f, p) if isinstance(f, ex.Expr) else f.eval_float(p)
        if v is not None and math.isfinite(v):
            best = max(best, abs(v))
    return best
