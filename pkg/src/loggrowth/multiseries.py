"""Asymptotic expansion of unary fragment expressions at +infinity.

The normal form is a finite sum of log-power monomials with exact (or
high-precision) coefficients plus a bounded remainder::

    f(x) = c_1 m_1(x) + ... + c_j m_j(x) + O(d * tau(x)),   x > t

with m_1 > m_2 > ... > tau in the dominance order.  The expansion is
computed structurally:

- sums and products combine termwise with conservative remainder
  bookkeeping;
- a rational power of a series c0*m0*(1 + eps) goes through the binomial
  series in eps (eps collects the subdominant part, so eps(x) -> 0);
- log(c0*m0*(1 + eps)) splits into log(c0), the exact log of the monomial
  (which lives one log level deeper), and the log(1 + eps) series;
- min/max/abs resolve to the eventually dominant branch, decided by the
  exact sign of the leading coefficient of the difference.

Remainder constants are conservative and the final tail bound and
threshold are validated by sampling (20 log-spaced points up to 1e12 by
default); no symbolic remainder proof is attempted.  Branch decisions
(and only those) demand exact coefficient signs: if a decision would rest
on an inexact constant the expansion refuses with OutOfFragment rather
than guessing from floating noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import mpmath
from mpmath import mp

from . import expressions as ex
from .monomials import (
    UNIT,
    LogPowMonomial,
    Order,
    bound_exponent,
    eval_monomial,
    iterated_exp,
    lex_compare,
    mul as mono_mul,
    pow_monomial,
)

__all__ = [
    "OutOfFragment",
    "DepthExhausted",
    "TailBound",
    "MultiSeries",
    "PreparedForm",
    "GrowthKind",
    "GrowthClass",
    "GrowthCertificate",
    "ExpansionConfig",
    "OracleReport",
    "expand",
    "prepared_form",
    "classify_growth",
    "numeric_growth_oracle",
]


class OutOfFragment(Exception):
    """The expression left the normalizable fragment (structurally or
    because a branch decision would depend on an inexact sign)."""


class DepthExhausted(Exception):
    """Cancellation prevented resolving the expansion at the requested
    truncation depth."""


Coeff = Union[Fraction, mpmath.mpf]


@dataclass(frozen=True)
class ExpansionConfig:
    depth: int = 4
    precision: int = 128
    sample_count: int = 20
    sample_max: float = 1e12
    unit_target: float = 1.01


DEFAULT_CONFIG = ExpansionConfig()


def _is_exact(c: Coeff) -> bool:
    return isinstance(c, Fraction)


def _to_mpf(c) -> mpmath.mpf:
    if isinstance(c, Fraction):
        return mp.mpf(c.numerator) / mp.mpf(c.denominator)
    return mp.mpf(c)


def _c_add(a: Coeff, b: Coeff) -> Coeff:
    if _is_exact(a) and _is_exact(b):
        return a + b
    return _to_mpf(a) + _to_mpf(b)


def _c_mul(a: Coeff, b: Coeff) -> Coeff:
    if _is_exact(a) and _is_exact(b):
        return a * b
    return _to_mpf(a) * _to_mpf(b)


def _c_div(a: Coeff, b: Coeff) -> Coeff:
    if _is_exact(a) and _is_exact(b):
        return a / b
    return _to_mpf(a) / _to_mpf(b)


def _c_neg(a: Coeff) -> Coeff:
    return -a


def _c_abs_float(a: Coeff) -> float:
    if _is_exact(a):
        return abs(a.numerator) / a.denominator if a.denominator else math.inf
    return abs(float(a))


def _exact_sign(c: Coeff, context: str) -> int:
    """Sign of a coefficient when it is exactly known; OutOfFragment otherwise."""
    if not _is_exact(c):
        raise OutOfFragment(f"{context} requires an exact coefficient sign")
    return (c > 0) - (c < 0)


Term = tuple[Coeff, LogPowMonomial]
Tail = Optional[tuple[float, LogPowMonomial]]


@dataclass(frozen=True)
class _Series:
    """Internal truncated series: terms sorted strictly decreasing, plus
    an optional remainder bound (d, tau) meaning |rest| <= d * tau(x)
    eventually."""

    terms: tuple[Term, ...]
    tail: Tail


def _sort_terms(bucket: dict[tuple, Term]) -> tuple[Term, ...]:
    items = [t for t in bucket.values() if t[0] != 0]
    items.sort(key=lambda t: t[1].exponents + (Fraction(0),) * 8, reverse=True)
    # Tuple-key sort needs equal lengths; redo with padded keys.
    width = max((len(t[1].exponents) for t in items), default=1)

    def key(t: Term):
        exps = t[1].exponents
        return exps + (Fraction(0),) * (width - len(exps))

    items.sort(key=key, reverse=True)
    return tuple(items)


def _merge_tail(a: Tail, b: Tail) -> Tail:
    if a is None:
        return b
    if b is None:
        return a
    da, ta = a
    db, tb = b
    tau = ta if lex_compare(ta, tb) is not Order.LESS else tb
    return (da + db, tau)


def _truncate(cfg: ExpansionConfig, terms: tuple[Term, ...], tail: Tail) -> _Series:
    if len(terms) <= cfg.depth:
        return _Series(terms, tail)
    kept = terms[: cfg.depth]
    for c, m in terms[cfg.depth:]:
        tail = _merge_tail(tail, (_c_abs_float(c), m))
    return _Series(kept, tail)


def _zero() -> _Series:
    return _Series((), None)


def _const_series(c: Coeff) -> _Series:
    if c == 0:
        return _zero()
    return _Series(((c, UNIT),), None)


def _add(cfg: ExpansionConfig, a: _Series, b: _Series) -> _Series:
    bucket: dict[tuple, Term] = {}
    for c, m in a.terms + b.terms:
        k = m.exponents
        if k in bucket:
            bucket[k] = (_c_add(bucket[k][0], c), m)
        else:
            bucket[k] = (c, m)
    return _truncate(cfg, _sort_terms(bucket), _merge_tail(a.tail, b.tail))


def _neg(a: _Series) -> _Series:
    return _Series(tuple((_c_neg(c), m) for c, m in a.terms), a.tail)


def _coeff_sum(a: _Series) -> float:
    total = sum(_c_abs_float(c) for c, _ in a.terms)
    if a.tail is not None:
        total += a.tail[0]
    return total


def _dominant_monomial(a: _Series) -> LogPowMonomial | None:
    if a.terms:
        return a.terms[0][1]
    if a.tail is not None:
        return a.tail[1]
    return None


def _mul_series(cfg: ExpansionConfig, a: _Series, b: _Series) -> _Series:
    bucket: dict[tuple, Term] = {}
    for ca, ma in a.terms:
        for cb, mb in b.terms:
            m = mono_mul(ma, mb)
            k = m.exponents
            c = _c_mul(ca, cb)
            if k in bucket:
                bucket[k] = (_c_add(bucket[k][0], c), m)
            else:
                bucket[k] = (c, m)
    tail: Tail = None
    if a.tail is not None and b.terms:
        da, ta = a.tail
        tail = _merge_tail(tail, (da * sum(_c_abs_float(c) for c, _ in b.terms),
                                  mono_mul(ta, b.terms[0][1])))
    if b.tail is not None and a.terms:
        db, tb = b.tail
        tail = _merge_tail(tail, (db * sum(_c_abs_float(c) for c, _ in a.terms),
                                  mono_mul(tb, a.terms[0][1])))
    if a.tail is not None and b.tail is not None:
        tail = _merge_tail(tail, (a.tail[0] * b.tail[0], mono_mul(a.tail[1], b.tail[1])))
    return _truncate(cfg, _sort_terms(bucket), tail)


def _pow_int(cfg: ExpansionConfig, a: _Series, n: int) -> _Series:
    result = _const_series(Fraction(1))
    base = a
    k = n
    while k > 0:
        if k & 1:
            result = _mul_series(cfg, result, base)
        k >>= 1
        if k:
            base = _mul_series(cfg, base, base)
    return result


def _binom(q: Fraction, i: int) -> Fraction:
    num = Fraction(1)
    for j in range(i):
        num *= q - j
    return num / math.factorial(i)


def _eps_of(cfg: ExpansionConfig, a: _Series) -> tuple[Coeff, LogPowMonomial, _Series]:
    """Write a = c0*m0*(1 + eps) with eps collecting the subdominant part."""
    c0, m0 = a.terms[0]
    inv_m0 = pow_monomial(m0, Fraction(-1))
    eps_terms = tuple(
        (_c_div(c, c0), mono_mul(m, inv_m0)) for c, m in a.terms[1:]
    )
    tail: Tail = None
    if a.tail is not None:
        d, tau = a.tail
        c0a = _c_abs_float(c0)
        tail = (d / c0a if c0a else math.inf, mono_mul(tau, inv_m0))
    return c0, m0, _Series(eps_terms, tail)


def _safe_powf(base: float, k: int) -> float:
    try:
        v = base ** k
    except OverflowError:
        return math.inf
    return min(v, 1e300)


def _series_expand_in_eps(
    cfg: ExpansionConfig,
    eps: _Series,
    coeff_fn: Callable[[int], Fraction],
    start: int,
    remainder_scale: float,
) -> _Series:
    """Sum coeff_fn(i) * eps^i for i in [start, I] with a remainder term.

    The remainder is bounded by |coeff_fn(I+1)| * remainder_scale *
    amp^(I+1) * eps_dom^(I+1), with amp the coefficient mass of eps; this
    is conservative and later validated by sampling.
    """
    order = cfg.depth + 1
    acc = _zero()
    power = _const_series(Fraction(1)) if start == 0 else None
    if start == 1:
        power = eps
    for i in range(start, order + 1):
        if power is None:
            power = _pow_int(cfg, eps, i)
        coeff = coeff_fn(i)
        if coeff != 0:
            acc = _add(cfg, acc, _Series(
                tuple((_c_mul(coeff, c), m) for c, m in power.terms),
                None if power.tail is None else (power.tail[0] * _c_abs_float(coeff), power.tail[1]),
            ))
        power = _mul_series(cfg, power, eps) if i < order else power
    dom = _dominant_monomial(eps)
    if dom is not None:
        amp = _coeff_sum(eps)
        c_rem = _c_abs_float(coeff_fn(order + 1)) * remainder_scale * _safe_powf(amp, order + 1)
        acc = _Series(acc.terms, _merge_tail(
            acc.tail, (min(c_rem, 1e300), pow_monomial(dom, Fraction(order + 1)))))
    return acc


def _exact_fraction_power(c: Fraction, q: Fraction) -> Coeff:
    """c^q exactly when possible, else a working-precision real."""
    if q.denominator == 1:
        return c ** int(q)
    root = _exact_root(c, q.denominator)
    if root is not None:
        return root ** q.numerator
    return mp.power(_to_mpf(c), _to_mpf(q))


def _exact_root(c: Fraction, k: int) -> Fraction | None:
    if c < 0:
        return None

    def iroot(n: int) -> int | None:
        if n in (0, 1):
            return n
        r = round(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** k == n:
                return cand
        return None

    rn = iroot(c.numerator)
    rd = iroot(c.denominator)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _series_pow(cfg: ExpansionConfig, a: _Series, q: Fraction) -> _Series:
    if q == 0:
        return _const_series(Fraction(1))
    if q == 1:
        return a
    if not a.terms:
        if a.tail is None:
            if q > 0:
                return _zero()
            raise OutOfFragment("negative power of the zero function")
        raise DepthExhausted("leading term hidden by cancellation under a power")
    if q.denominator == 1 and q > 0:
        return _pow_int(cfg, a, int(q))
    c0, m0, eps = _eps_of(cfg, a)
    if q.denominator != 1:
        if _exact_sign(c0, "fractional power") <= 0:
            raise OutOfFragment("fractional power of an eventually nonpositive function")
    elif _exact_sign(c0, "negative integer power") == 0:  # pragma: no cover
        raise OutOfFragment("inverse of the zero function")
    if _is_exact(c0):
        lead: Coeff = _exact_fraction_power(c0, q)
    else:
        lead = mp.power(_to_mpf(c0), _to_mpf(q))
    body = _series_expand_in_eps(cfg, eps, lambda i: _binom(q, i), 0,
                                 remainder_scale=2.0 ** (abs(float(q)) + cfg.depth + 2))
    m0q = pow_monomial(m0, q)
    shifted = _Series(
        tuple((_c_mul(lead, c), mono_mul(m, m0q)) for c, m in body.terms),
        None if body.tail is None else (body.tail[0] * _c_abs_float(lead), mono_mul(body.tail[1], m0q)),
    )
    return _truncate(cfg, shifted.terms, shifted.tail)


def _series_log(cfg: ExpansionConfig, a: _Series) -> _Series:
    if not a.terms:
        if a.tail is None:
            raise OutOfFragment("log of the zero function")
        raise DepthExhausted("leading term hidden by cancellation under a log")
    c0, m0, eps = _eps_of(cfg, a)
    if _exact_sign(c0, "log") <= 0:
        raise OutOfFragment("log of an eventually nonpositive function")
    parts: list[Term] = []
    for j, qj in enumerate(m0.exponents):
        if qj != 0:
            exps = (Fraction(0),) * (j + 1) + (Fraction(1),)
            parts.append((qj, LogPowMonomial(exps)))
    if c0 != 1:
        if _is_exact(c0):
            parts.append((mp.log(_to_mpf(c0)), UNIT))
        else:
            parts.append((mp.log(_to_mpf(c0)), UNIT))
    acc = _Series(tuple(parts), None)
    body = _series_expand_in_eps(
        cfg, eps,
        lambda i: Fraction(0) if i == 0 else Fraction((-1) ** (i + 1), i),
        1, remainder_scale=2.0 ** (cfg.depth + 2),
    )
    return _add(cfg, acc, body)


def _leading_sign(d: _Series, context: str) -> int | None:
    """Sign of the eventually dominant value of d; None if d == 0 exactly."""
    if d.terms:
        return _exact_sign(d.terms[0][0], context)
    if d.tail is None:
        return None
    raise DepthExhausted(f"{context}: difference vanished to truncation depth")


def _series_minmax(cfg: ExpansionConfig, a: _Series, b: _Series, want_max: bool) -> _Series:
    sign = _leading_sign(_add(cfg, a, _neg(b)), "max branch" if want_max else "min branch")
    if sign is None or sign == 0:
        return a
    if want_max:
        return a if sign > 0 else b
    return b if sign > 0 else a


def _series_abs(cfg: ExpansionConfig, a: _Series) -> _Series:
    sign = _leading_sign(a, "abs branch")
    if sign is None:
        return a
    return a if sign > 0 else _neg(a)


def _expand_node(cfg: ExpansionConfig, e: ex.Expr) -> _Series:
    if isinstance(e, ex.Const):
        return _const_series(e.value)
    if isinstance(e, ex.Var):
        return _Series(((Fraction(1), LogPowMonomial((Fraction(1),))),), None)
    if isinstance(e, ex.Add):
        return _add(cfg, _expand_node(cfg, e.lhs), _expand_node(cfg, e.rhs))
    if isinstance(e, ex.Sub):
        return _add(cfg, _expand_node(cfg, e.lhs), _neg(_expand_node(cfg, e.rhs)))
    if isinstance(e, ex.Mul):
        return _mul_series(cfg, _expand_node(cfg, e.lhs), _expand_node(cfg, e.rhs))
    if isinstance(e, ex.Div):
        return _mul_series(cfg, _expand_node(cfg, e.lhs),
                           _series_pow(cfg, _expand_node(cfg, e.rhs), Fraction(-1)))
    if isinstance(e, ex.Pow):
        return _series_pow(cfg, _expand_node(cfg, e.base), e.exponent)
    if isinstance(e, ex.Log):
        return _series_log(cfg, _expand_node(cfg, e.arg))
    if isinstance(e, ex.Abs):
        return _series_abs(cfg, _expand_node(cfg, e.arg))
    if isinstance(e, ex.Min):
        return _series_minmax(cfg, _expand_node(cfg, e.lhs), _expand_node(cfg, e.rhs), want_max=False)
    if isinstance(e, ex.Max):
        return _series_minmax(cfg, _expand_node(cfg, e.lhs), _expand_node(cfg, e.rhs), want_max=True)
    if isinstance(e, ex.Exp):
        raise OutOfFragment("exp is outside the normalizable fragment")
    if isinstance(e, ex.Atan2):
        raise OutOfFragment("atan2 is outside the normalizable fragment")
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# Public types


@dataclass(frozen=True)
class TailBound:
    monomial: LogPowMonomial
    d: float


@dataclass(frozen=True)
class MultiSeries:
    """Validated expansion: terms, remainder bound and threshold.

    For x > threshold, |f(x) - sum_i c_i m_i(x)| <= tail.d * tail.monomial(x)
    held on every validation sample (tail None means the sum is exact).
    """

    terms: tuple[Term, ...]
    tail: TailBound | None
    threshold: float
    depth: int

    @property
    def dominant(self) -> Term | None:
        return self.terms[0] if self.terms else None

    def evaluate_terms(self, x, precision: int = 128) -> mpmath.mpf:
        with mp.workprec(precision + 16):
            total = mp.mpf(0)
            for c, m in self.terms:
                total += _to_mpf(c) * eval_monomial(m, x, precision)
        return total


@dataclass(frozen=True)
class PreparedForm:
    """f(x) = a * m(x) * u(x) with 0 <= u(x) <= d for x > t (sampled)."""

    a: Coeff
    monomial: LogPowMonomial
    d: float
    t: float

    @property
    def is_zero(self) -> bool:
        return self.a == 0


class GrowthKind(Enum):
    POLY_BOUNDED = "PolyBounded"
    SUPER_POLYNOMIAL = "SuperPolynomial"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class GrowthCertificate:
    """Witness (N, d, t): |f(r)| <= d * r^N for sampled r > t."""

    N: int
    d: float
    t: float
    samples: tuple[tuple[float, float, float], ...]
    validated: bool
    mode: str = "ray"

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "t": self.t,
            "validated": self.validated,
            "mode": self.mode,
            "samples": [
                {"r": r, "abs_f": a, "bound": b} for r, a, b in self.samples
            ],
        }


@dataclass(frozen=True)
class GrowthClass:
    kind: GrowthKind
    N: int | None = None
    certificate: GrowthCertificate | None = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"class": self.kind.value, "N": self.N, "note": self.note}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


# ---------------------------------------------------------------------------
# Expansion with sampled validation


def _series_depth(s: _Series) -> int:
    depths = [m.depth for _, m in s.terms]
    if s.tail is not None:
        depths.append(s.tail[1].depth)
    return max(depths, default=0)


def _threshold_candidates(ek: float) -> list[float]:
    base = [1.0, math.e, 10.0, 100.0, 1e3, 1e4, 1e6, 1e9]
    return sorted({max(ek, c) for c in base})


def _log_spaced(t: float, hi: float, count: int) -> list[float]:
    lo = max(t, 1e-6)
    ratio = (hi / lo) ** (1.0 / count)
    return [lo * ratio ** (i + 1) for i in range(count)]


def expand(e: ex.Expr, depth: int = 4, config: ExpansionConfig | None = None) -> MultiSeries:
    """Expand a unary fragment expression into a validated multiseries.

    Raises OutOfFragment when the expression cannot be normalized (exp,
    atan2, fractional power or log of an eventually nonpositive function,
    or a branch decision resting on an inexact sign) and DepthExhausted
    when cancellation hides the leading behavior at this depth.
    """
    cfg = config or DEFAULT_CONFIG
    if depth != cfg.depth:
        cfg = ExpansionConfig(depth, cfg.precision, cfg.sample_count, cfg.sample_max, cfg.unit_target)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not ex.is_log_analytic(e):
        raise OutOfFragment("expression contains exp")
    if ex.arity(e) > 1:
        raise OutOfFragment("expansion handles unary expressions only")
    raw = _expand_node(cfg, e)
    k = _series_depth(raw)
    ek = float(iterated_exp(k, 64)) if k <= 4 else math.inf
    if not math.isfinite(ek):
        raise OutOfFragment("log depth too large for the validation window")
    if raw.tail is None:
        return MultiSeries(raw.terms, None, max(ek, 1.0), k)
    # Fit and validate the remainder constant by sampling.  Differences
    # below the evaluation noise floor (the expansion has converged past
    # working precision there) count as zero rather than as remainder.
    d_sym, tau = raw.tail
    noise_scale = mp.mpf(2) ** (-(cfg.precision - 8))
    for t in _threshold_candidates(ek):
        if t >= cfg.sample_max / 100:
            break
        xs = _log_spaced(t, cfg.sample_max, cfg.sample_count)
        ratios = []
        ok = True
        for x in xs:
            r = ex.evaluate(e, [x], cfg.precision)
            if not r.defined:
                ok = False
                break
            approx = _series_terms_value(raw.terms, x, cfg.precision)
            tau_val = eval_monomial(tau, x, cfg.precision)
            diff = abs(r.value - approx)
            if diff <= max(abs(r.value), abs(approx)) * noise_scale:
                continue
            ratios.append(diff / tau_val)
        if not ok:
            continue
        d_emp = float(max(ratios)) if ratios else 0.0
        d = max(d_emp * 1.0000001, min(max(d_emp * 2.0, 1e-30), d_sym))
        return MultiSeries(raw.terms, TailBound(tau, d), t, k)
    raise DepthExhausted("no sampling threshold validated the remainder bound")


def _series_terms_value(terms: tuple[Term, ...], x, precision: int) -> mpmath.mpf:
    with mp.workprec(precision + 16):
        total = mp.mpf(0)
        for c, m in terms:
            total += _to_mpf(c) * eval_monomial(m, x, precision)
    return total


def prepared_form(e: ex.Expr, config: ExpansionConfig | None = None) -> PreparedForm:
    """Leading coefficient, dominant monomial, and a sampled unit bound.

    The unit u(x) = f(x) / (a * m(x)) tends to 1; t is chosen as the
    smallest schedule point past which every sampled u lies in [0, d].
    The zero function returns a = 0.
    """
    cfg = config or DEFAULT_CONFIG
    ms = expand(e, cfg.depth, cfg)
    k = ms.depth
    ek = float(iterated_exp(k, 64)) if k <= 4 else math.inf
    if not ms.terms:
        if ms.tail is None:
            return PreparedForm(Fraction(0), UNIT, 0.0, max(ek, 1.0))
        raise DepthExhausted("cannot prepare: leading term hidden by cancellation")
    a, m = ms.terms[0]
    best: tuple[float, float] | None = None
    for t in _threshold_candidates(ek):
        if t >= cfg.sample_max / 100:
            break
        us = _unit_samples(e, a, m, t, cfg)
        if us is None:
            continue
        u_max = max(us)
        if min(us) < 0:
            continue
        d = 1.0 if ms.tail is None and len(ms.terms) == 1 else max(1.0, u_max) * 1.001
        if best is None:
            best = (t, d)
        if u_max <= cfg.unit_target:
            return PreparedForm(a, m, d, t)
    if best is not None:
        return PreparedForm(a, m, best[1], best[0])
    raise DepthExhausted("no sampling threshold validated the unit bound")


def _unit_samples(e: ex.Expr, a: Coeff, m: LogPowMonomial, t: float,
                  cfg: ExpansionConfig) -> list[float] | None:
    xs = _log_spaced(t, cfg.sample_max, cfg.sample_count)
    out = []
    with mp.workprec(cfg.precision + 16):
        av = _to_mpf(a)
        for x in xs:
            r = ex.evaluate(e, [x], cfg.precision)
            if not r.defined:
                return None
            mv = eval_monomial(m, x, cfg.precision)
            if mv == 0 or av == 0:
                return None
            out.append(float(r.value / (av * mv)))
    return out


# ---------------------------------------------------------------------------
# Growth classification


def classify_growth(e: ex.Expr, config: ExpansionConfig | None = None) -> GrowthClass:
    """Decide polynomial boundedness at +infinity for a unary expression.

    Fragment expressions classify through the prepared form: N is the
    bound exponent of the dominant monomial.  Expressions containing exp
    fall back to the numeric slope oracle and report SuperPolynomial only
    when the window estimates diverge upward; everything else is Unknown.
    """
    cfg = config or DEFAULT_CONFIG
    if ex.is_log_analytic(e) and ex.arity(e) <= 1:
        try:
            pf = prepared_form(e, cfg)
        except (OutOfFragment, DepthExhausted) as exc:
            return GrowthClass(GrowthKind.UNKNOWN, note=f"expansion failed: {exc}")
        if pf.is_zero:
            cert = GrowthCertificate(0, 1e-12, pf.t, (), True)
            return GrowthClass(GrowthKind.POLY_BOUNDED, 0, cert, "identically zero beyond threshold")
        N = bound_exponent(pf.monomial)
        cert = _fit_unary_certificate(e, N, pf, cfg)
        return GrowthClass(GrowthKind.POLY_BOUNDED, N, cert)
    report = numeric_growth_oracle(e, precision=cfg.precision)
    if report.trend == "increasing":
        return GrowthClass(GrowthKind.SUPER_POLYNOMIAL,
                           note=f"oracle slopes diverge: {report.slopes()}")
    return GrowthClass(GrowthKind.UNKNOWN, note=f"oracle trend {report.trend}")


def _fit_unary_certificate(e: ex.Expr, N: int, pf: PreparedForm,
                           cfg: ExpansionConfig) -> GrowthCertificate:
    xs = _log_spaced(pf.t, cfg.sample_max, 2 * cfg.sample_count)
    ratio_max = 0.0
    with mp.workprec(cfg.precision + 16):
        for x in xs:
            r = ex.evaluate(e, [x], cfg.precision)
            if not r.defined:
                continue
            ratio_max = max(ratio_max, float(abs(r.value) / mp.power(mp.mpf(x), N)))
    d = max(ratio_max * 1.01, 1e-12)
    samples = []
    validated = True
    with mp.workprec(cfg.precision + 16):
        for x in _log_spaced(pf.t, cfg.sample_max, 4 * cfg.sample_count):
            r = ex.evaluate(e, [x], cfg.precision)
            if not r.defined:
                continue
            bound = float(d * mp.power(mp.mpf(x), N))
            absf = float(abs(r.value))
            if absf > bound:
                validated = False
            samples.append((x, absf, bound))
    return GrowthCertificate(N, d, pf.t, tuple(samples[:: max(1, len(samples) // 20)]), validated)


# ---------------------------------------------------------------------------
# Numeric slope oracle


@dataclass(frozen=True)
class OracleReport:
    """Per-window growth exponents log|f(x2)/f(x1)| / log(x2/x1)."""

    windows: tuple[tuple[float, float, float | None], ...]
    estimate: float | None
    trend: str

    def slopes(self) -> list[float]:
        return [s for _, _, s in self.windows if s is not None]

    def to_json(self) -> dict:
        return {
            "windows": [
                {"x_lo": lo, "x_hi": hi, "slope": s} for lo, hi, s in self.windows
            ],
            "estimate": self.estimate,
            "trend": self.trend,
        }


DEFAULT_ORACLE_SCHEDULE = (1e3, 1e6, 1e12, 1e24, 1e48)


def numeric_growth_oracle(
    f,
    schedule: Sequence[float] | None = None,
    precision: int = 128,
) -> OracleReport:
    """Window growth exponents of |f| along a geometric-in-log schedule.

    ``f`` is a unary expression or a callable returning an mpf (or None
    when undefined).  Stability means the last three window slopes agree
    within 0.1; a monotone rise of more than 0.5 across the final windows
    reports the divergence trend "increasing".
    """
    pts = tuple(schedule) if schedule is not None else DEFAULT_ORACLE_SCHEDULE
    if len(pts) < 2:
        raise ValueError("schedule needs at least two points")
    values: list[tuple[float, mpmath.mpf] | None] = []
    with mp.workprec(precision + 16):
        for x in pts:
            if isinstance(f, ex.Expr):
                r = ex.evaluate(f, [x], precision)
                values.append((x, abs(r.value)) if r.defined else None)
            else:
                v = f(x)
                values.append((x, abs(mp.mpf(v))) if v is not None else None)
    defined = [v for v in values if v is not None]
    if not defined:
        raise ValueError("all oracle samples are out of the domain")
    windows: list[tuple[float, float, float | None]] = []
    with mp.workprec(precision + 16):
        for left, right in zip(values, values[1:]):
            if left is None or right is None:
                continue
            (x1, f1), (x2, f2) = left, right
            if f1 == 0 or f2 == 0:
                windows.append((x1, x2, None))
                continue
            slope = float(mp.log(f2 / f1) / mp.log(mp.mpf(x2) / mp.mpf(x1)))
            windows.append((x1, x2, slope))
    slopes = [s for _, _, s in windows if s is not None]
    if len(slopes) >= 3 and max(slopes[-3:]) - min(slopes[-3:]) < 0.1:
        return OracleReport(tuple(windows), sum(slopes[-3:]) / 3.0, "stable")
    tail = slopes[-4:] if len(slopes) >= 4 else slopes
    if len(tail) >= 2 and all(b > a for a, b in zip(tail, tail[1:])) and tail[-1] - tail[0] > 0.5:
        return OracleReport(tuple(windows), None, "increasing")
    if len(tail) >= 2 and all(b < a for a, b in zip(tail, tail[1:])) and tail[0] - tail[-1] > 0.5:
        return OracleReport(tuple(windows), None, "decreasing")
    return OracleReport(tuple(windows), slopes[-1] if slopes else None, "unstable")
