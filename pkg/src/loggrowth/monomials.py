"""Exact algebra and asymptotic ordering of log-power monomials.

A log-power monomial is the scale factor

    x^q0 * log(x)^q1 * log_2(x)^q2 * ... * log_k(x)^qk

with exact rational exponents, where ``log_j`` is the j-times iterated
logarithm.  As x -> +infinity these monomials are totally ordered by
dominance, and the dominance order is exactly the lexicographic order on
the exponent sequence (q0, ..., qk): a higher power of x beats any power
of log(x), which beats any power of log(log(x)), and so on.

Everything in this module is exact (``fractions.Fraction``) except
``eval_monomial``, which evaluates at a point using mpmath at a requested
bit precision.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import mp

__all__ = [
    "Order",
    "LogPowMonomial",
    "UNIT",
    "monomial",
    "lex_compare",
    "mul",
    "pow_monomial",
    "eval_monomial",
    "bound_exponent",
    "IteratedExpTable",
    "iterated_exp",
    "iterated_log",
]

_GUARD_BITS = 32


class Order(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _canonical(exponents: Iterable[Fraction]) -> tuple[Fraction, ...]:
    exps = tuple(Fraction(q) for q in exponents)
    while len(exps) > 1 and exps[-1] == 0:
        exps = exps[:-1]
    if not exps:
        exps = (Fraction(0),)
    return exps


@dataclass(frozen=True)
class LogPowMonomial:
    """Exponent sequence (q0, ..., qk); trailing zeros are trimmed.

    The all-zero monomial is the multiplicative unit and is stored as the
    single exponent (0,).
    """

    exponents: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponents", _canonical(self.exponents))

    @property
    def depth(self) -> int:
        """Number of iterated-log factors, i.e. k = len(exponents) - 1."""
        return len(self.exponents) - 1

    def is_unit(self) -> bool:
        return self.exponents == (Fraction(0),)

    def __mul__(self, other: "LogPowMonomial") -> "LogPowMonomial":
        return mul(self, other)

    def __pow__(self, q) -> "LogPowMonomial":
        return pow_monomial(self, q)

    def to_text(self) -> str:
        """Render as e.g. ``x^(3/2) log^(-1) log_2^(2)``; unit is ``1``."""
        parts = []
        for j, q in enumerate(self.exponents):
            if q == 0:
                continue
            base = "x" if j == 0 else ("log" if j == 1 else f"log_{j}")
            parts.append(base if q == 1 else f"{base}^({q})")
        return " ".join(parts) if parts else "1"

    @staticmethod
    def from_text(text: str) -> "LogPowMonomial":
        return _parse_monomial_text(text)

    def to_json(self) -> list[str]:
        """Exponents as a JSON-ready list of "num/den" strings."""
        return [str(q) for q in self.exponents]

    @staticmethod
    def from_json(items: Sequence[str]) -> "LogPowMonomial":
        return LogPowMonomial(tuple(Fraction(s) for s in items))

    def __str__(self) -> str:
        return self.to_text()


UNIT = LogPowMonomial((Fraction(0),))


def monomial(*exponents) -> LogPowMonomial:
    """Convenience constructor accepting ints/strings/Fractions."""
    return LogPowMonomial(tuple(Fraction(q) for q in exponents))


_FACTOR_RE = re.compile(
    r"(?P<base>x|log(?:_(?P<iter>\d+))?)\s*(?:\^\s*(?:\((?P<pexp>-?\d+(?:/\d+)?)\)|(?P<exp>-?\d+(?:/\d+)?)))?"
)


def _parse_monomial_text(text: str) -> LogPowMonomial:
    text = text.strip()
    if text in ("1", ""):
        return UNIT
    pos = 0
    exps: dict[int, Fraction] = {}
    while pos < len(text):
        if text[pos].isspace() or text[pos] == "*":
            pos += 1
            continue
        m = _FACTOR_RE.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse monomial factor at position {pos}: {text[pos:]!r}")
        base = m.group("base")
        if base == "x":
            idx = 0
        elif base == "log":
            idx = 1
        else:
            idx = int(m.group("iter"))
        exp_text = m.group("pexp") or m.group("exp")
        q = Fraction(exp_text) if exp_text is not None else Fraction(1)
        exps[idx] = exps.get(idx, Fraction(0)) + q
        pos = m.end()
    top = max(exps) if exps else 0
    return LogPowMonomial(tuple(exps.get(j, Fraction(0)) for j in range(top + 1)))


def lex_compare(m1: LogPowMonomial, m2: LogPowMonomial) -> Order:
    """Dominance order at +infinity: GREATER iff m1(x)/m2(x) -> +infinity.

    Dominance of log-power scales is lexicographic in the exponent
    sequence; equality means identical canonical exponents.
    """
    n = max(len(m1.exponents), len(m2.exponents))
    a = m1.exponents + (Fraction(0),) * (n - len(m1.exponents))
    b = m2.exponents + (Fraction(0),) * (n - len(m2.exponents))
    if a == b:
        return Order.EQUAL
    return Order.GREATER if a > b else Order.LESS


def mul(m1: LogPowMonomial, m2: LogPowMonomial) -> LogPowMonomial:
    """Componentwise exponent addition (pointwise product of the scales)."""
    n = max(len(m1.exponents), len(m2.exponents))
    a = m1.exponents + (Fraction(0),) * (n - len(m1.exponents))
    b = m2.exponents + (Fraction(0),) * (n - len(m2.exponents))
    return LogPowMonomial(tuple(x + y for x, y in zip(a, b)))


def pow_monomial(m: LogPowMonomial, q) -> LogPowMonomial:
    """Componentwise exponent scaling by the exact rational q."""
    q = Fraction(q)
    return LogPowMonomial(tuple(x * q for x in m.exponents))


@dataclass(frozen=True)
class IteratedExpTable:
    """Tower e_0 = 0, e_j = exp(e_{j-1}) at a fixed working precision.

    e_j is the smallest argument for which the j-times iterated logarithm
    is defined and nonnegative, hence the natural domain threshold for a
    monomial of depth j.
    """

    precision: int
    values: tuple[mpmath.mpf, ...]

    @staticmethod
    def build(max_index: int, precision: int = 128) -> "IteratedExpTable":
        with mp.workprec(precision + _GUARD_BITS):
            vals = [mp.mpf(0)]
            for _ in range(max_index):
                vals.append(mp.exp(vals[-1]))
        return IteratedExpTable(precision, tuple(vals))

    def __getitem__(self, j: int) -> mpmath.mpf:
        return self.values[j]


def iterated_exp(j: int, precision: int = 128) -> mpmath.mpf:
    """e_j of the tower e_0 = 0, e_j = exp(e_{j-1})."""
    if j < 0:
        raise ValueError("index must be nonnegative")
    return IteratedExpTable.build(j, precision)[j]


def iterated_log(x, k: int, precision: int = 128) -> mpmath.mpf:
    """k-times iterated logarithm; requires x > e_k."""
    with mp.workprec(precision + _GUARD_BITS):
        v = _to_mpf(x)
        for _ in range(k):
            if v <= 0:
                raise ValueError("iterated log left the positive domain")
            v = mp.log(v)
        return +v


def _to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)
    return mp.mpf(x)


def eval_monomial(m: LogPowMonomial, x, precision: int = 128) -> mpmath.mpf:
    """Evaluate x^q0 * prod_j log_j(x)^qj at the requested bit precision.

    Requires x > e_k for k = m.depth so that every iterated log factor is
    positive; raises ValueError otherwise.
    """
    k = m.depth
    with mp.workprec(precision + _GUARD_BITS):
        xv = _to_mpf(x)
        ek = IteratedExpTable.build(k, precision)[k]
        if not xv > ek:
            raise ValueError(f"eval_monomial requires x > e_{k} = {ek}; got x = {xv}")
        result = mp.mpf(1)
        base = xv
        for j, q in enumerate(m.exponents):
            if j > 0:
                base = mp.log(base)
            if q == 0:
                continue
            if q.denominator == 1:
                result *= mp.power(base, int(q))
            else:
                result *= mp.power(base, _to_mpf(q))
        out = result
    with mp.workprec(precision):
        return +out


def bound_exponent(m: LogPowMonomial) -> int:
    """Minimal integer N with m(x) <= x^N for all sufficiently large x.

    For non-integer q0 this is ceil(q0).  For integer q0 the log factors
    decide: if (q1, ..., qk) is lexicographically <= 0 the monomial is
    eventually below x^q0 itself (N = q0), otherwise the positive log
    factor forces N = q0 + 1.
    """
    q0 = m.exponents[0]
    if q0.denominator != 1:
        return math.ceil(q0)
    rest = m.exponents[1:]
    zeros = (Fraction(0),) * len(rest)
    if rest <= zeros:
        return int(q0)
    return int(q0) + 1
