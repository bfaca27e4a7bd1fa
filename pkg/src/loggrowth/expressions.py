"""A concrete expression fragment: AST, parser, printer, evaluators.

The fragment covers exact rational constants, variables x1..xn, the four
arithmetic operations, powers with exact rational exponent literals,
log, abs, min, max, sqrt (sugar for ^(1/2)), plus two guarded built-ins:
exp (allowed so super-polynomial reference functions are expressible, but
it disqualifies an expression from the log-analytic fragment) and atan2
(allowed so angular/argument oracles are expressible).

Grammar (EBNF sketch)::

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := atom ['^' rational]
    atom     := rational | var | func '(' expr {',' expr} ')' | '(' expr ')'
    func     := log | exp | sqrt | abs | min | max | atan2
    var      := 'x' positive-integer
    rational := ['-'] integer ['/' positive-integer]

``a/b`` between two bare integers lexes as a single rational literal (the
atom rule wins); parenthesize the denominator to force a division node.
The exponent after ``^`` may optionally be parenthesized.  Evaluation
never raises on domain failures: results carry a Defined/OutOfDomain
status so samplers can skim partial domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Mapping, Sequence, Union

import mpmath
from mpmath import mp

from .rays import StandardizedRay

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Div",
    "Pow",
    "Log",
    "Exp",
    "Abs",
    "Min",
    "Max",
    "Atan2",
    "ParseError",
    "parse",
    "to_text",
    "EvalStatus",
    "EvalResult",
    "evaluate",
    "eval_float",
    "eval_exact",
    "ExactResult",
    "arity",
    "log_depth",
    "is_log_analytic",
    "substitute",
    "restrict_to_ray",
    "iter_nodes",
]


class Expr:
    """Base class for expression nodes; instances are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    index: int

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError("variable indices start at 1")


@dataclass(frozen=True)
class Add(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Sub(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Mul(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Div(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponent", Fraction(self.exponent))


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Abs(Expr):
    arg: Expr


@dataclass(frozen=True)
class Min(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Max(Expr):
    lhs: Expr
    rhs: Expr


@dataclass(frozen=True)
class Atan2(Expr):
    y: Expr
    x: Expr


def iter_nodes(e: Expr) -> Iterator[Expr]:
    """Yield every node of the tree (preorder)."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Add, Sub, Mul, Div, Min, Max)):
            stack.append(node.rhs)
            stack.append(node.lhs)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, (Log, Exp, Abs)):
            stack.append(node.arg)
        elif isinstance(node, Atan2):
            stack.append(node.x)
            stack.append(node.y)


def arity(e: Expr) -> int:
    """Smallest n such that every variable index is <= n."""
    return max((node.index for node in iter_nodes(e) if isinstance(node, Var)), default=0)


def log_depth(e: Expr) -> int:
    """Maximal nesting depth of Log nodes (syntactic bound on log order)."""
    if isinstance(e, Log):
        return 1 + log_depth(e.arg)
    if isinstance(e, (Add, Sub, Mul, Div, Min, Max)):
        return max(log_depth(e.lhs), log_depth(e.rhs))
    if isinstance(e, Pow):
        return log_depth(e.base)
    if isinstance(e, (Exp, Abs)):
        return log_depth(e.arg)
    if isinstance(e, Atan2):
        return max(log_depth(e.y), log_depth(e.x))
    return 0


def is_log_analytic(e: Expr) -> bool:
    """True iff the tree contains no Exp node."""
    return not any(isinstance(node, Exp) for node in iter_nodes(e))


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


_FUNCTIONS = {"log", "exp", "sqrt", "abs", "min", "max", "atan2"}


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                raise ParseError("decimal literals are not allowed; use an exact rational like 1/2", i)
            tokens.append(_Token("int", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if c in "+-*/^(),":
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.next()

    def parse(self) -> Expr:
        e = self.parse_expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return e

    def parse_expr(self) -> Expr:
        e = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.parse_term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def parse_term(self) -> Expr:
        e = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            rhs = self.parse_factor()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def parse_factor(self) -> Expr:
        e = self.parse_atom()
        if self.peek().kind == "^":
            self.next()
            q = self.parse_exponent()
            e = Pow(e, q)
        return e

    def parse_exponent(self) -> Fraction:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            q = self.parse_rational_literal(in_exponent=True)
            self.expect(")")
            return q
        return self.parse_rational_literal(in_exponent=True)

    def parse_rational_literal(self, in_exponent: bool = False) -> Fraction:
        sign = 1
        tok = self.peek()
        if tok.kind == "-":
            self.next()
            sign = -1
            tok = self.peek()
        if tok.kind != "int":
            what = "exponent" if in_exponent else "constant"
            raise ParseError(f"{what} must be an exact rational literal", tok.pos)
        num = int(self.next().text)
        den = 1
        if self.peek().kind == "/" and self.peek(1).kind == "int":
            self.next()
            den = int(self.next().text)
            if den == 0:
                raise ParseError("denominator must be a positive integer", tok.pos)
        return Fraction(sign * num, den)

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "-" and self.peek(1).kind == "int":
            return Const(self.parse_rational_literal())
        if tok.kind == "int":
            return Const(self.parse_rational_literal())
        if tok.kind == "(":
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        if tok.kind == "ident":
            return self.parse_ident()
        raise ParseError(f"expected an atom, found {tok.text or 'end of input'!r}", tok.pos)

    def parse_ident(self) -> Expr:
        tok = self.next()
        name = tok.text
        if name in _FUNCTIONS:
            self.expect("(")
            args = [self.parse_expr()]
            while self.peek().kind == ",":
                self.next()
                args.append(self.parse_expr())
            self.expect(")")
            return self.build_call(name, args, tok.pos)
        if name.startswith("x") and name[1:].isdigit():
            index = int(name[1:])
            if index < 1:
                raise ParseError("variable indices start at 1", tok.pos)
            return Var(index)
        raise ParseError(f"unknown identifier {name!r}", tok.pos)

    def build_call(self, name: str, args: list[Expr], pos: int) -> Expr:
        def need(count: int) -> None:
            if len(args) != count:
                raise ParseError(f"{name} takes exactly {count} argument(s), got {len(args)}", pos)

        if name == "log":
            need(1)
            return Log(args[0])
        if name == "exp":
            need(1)
            return Exp(args[0])
        if name == "sqrt":
            need(1)
            return Pow(args[0], Fraction(1, 2))
        if name == "abs":
            need(1)
            return Abs(args[0])
        if name == "atan2":
            need(2)
            return Atan2(args[0], args[1])
        if len(args) < 2:
            raise ParseError(f"{name} takes at least 2 arguments", pos)
        node_cls = Min if name == "min" else Max
        e = node_cls(args[0], args[1])
        for extra in args[2:]:
            e = node_cls(e, extra)
        return e


def parse(text: str, arity_hint: int | None = None) -> Expr:
    """Parse source text into the unique AST under the grammar's precedence.

    ``arity_hint`` optionally caps the variable indices; an index beyond
    it raises ParseError.
    """
    e = _Parser(text).parse()
    if arity_hint is not None:
        n = arity(e)
        if n > arity_hint:
            raise ParseError(f"variable x{n} exceeds declared arity {arity_hint}", 0)
    return e


# ---------------------------------------------------------------------------
# Printing (precedence-aware; parse(to_text(e)) reproduces e structurally)

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_ATOM = 1, 2, 3


def _print(e: Expr, level: int) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Add):
        s = f"{_print(e.lhs, _LEVEL_ADD)} + {_print(e.rhs, _LEVEL_MUL)}"
        return f"({s})" if level > _LEVEL_ADD else s
    if isinstance(e, Sub):
        s = f"{_print(e.lhs, _LEVEL_ADD)} - {_print(e.rhs, _LEVEL_MUL)}"
        return f"({s})" if level > _LEVEL_ADD else s
    if isinstance(e, Mul):
        s = f"{_print(e.lhs, _LEVEL_MUL)}*{_print(e.rhs, _LEVEL_ATOM)}"
        return f"({s})" if level > _LEVEL_MUL else s
    if isinstance(e, Div):
        # Parenthesized denominator: a bare integer there would lex into
        # the numerator's rational literal.
        s = f"{_print(e.lhs, _LEVEL_MUL)}/({_print(e.rhs, _LEVEL_ADD)})"
        return f"({s})" if level > _LEVEL_MUL else s
    if isinstance(e, Pow):
        base = _print(e.base, _LEVEL_ATOM)
        if not isinstance(e.base, (Var, Const, Log, Exp, Abs, Min, Max, Atan2)):
            base = f"({base})"
        return f"{base}^({e.exponent})"
    if isinstance(e, Log):
        return f"log({_print(e.arg, _LEVEL_ADD)})"
    if isinstance(e, Exp):
        return f"exp({_print(e.arg, _LEVEL_ADD)})"
    if isinstance(e, Abs):
        return f"abs({_print(e.arg, _LEVEL_ADD)})"
    if isinstance(e, Min):
        return f"min({_print(e.lhs, _LEVEL_ADD)}, {_print(e.rhs, _LEVEL_ADD)})"
    if isinstance(e, Max):
        return f"max({_print(e.lhs, _LEVEL_ADD)}, {_print(e.rhs, _LEVEL_ADD)})"
    if isinstance(e, Atan2):
        return f"atan2({_print(e.y, _LEVEL_ADD)}, {_print(e.x, _LEVEL_ADD)})"
    raise TypeError(f"unknown node {e!r}")


def to_text(e: Expr) -> str:
    return _print(e, _LEVEL_ADD)


# ---------------------------------------------------------------------------
# Evaluation


class EvalStatus(Enum):
    DEFINED = "Defined"
    OUT_OF_DOMAIN = "OutOfDomain"


@dataclass(frozen=True)
class EvalResult:
    value: mpmath.mpf | None
    status: EvalStatus

    @property
    def defined(self) -> bool:
        return self.status is EvalStatus.DEFINED


class _DomainFailure(Exception):
    pass


def _to_mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)
    return mp.mpf(x)


def _eval_mp(e: Expr, point: Sequence[mpmath.mpf]) -> mpmath.mpf:
    if isinstance(e, Const):
        return _to_mpf(e.value)
    if isinstance(e, Var):
        return point[e.index - 1]
    if isinstance(e, Add):
        return _eval_mp(e.lhs, point) + _eval_mp(e.rhs, point)
    if isinstance(e, Sub):
        return _eval_mp(e.lhs, point) - _eval_mp(e.rhs, point)
    if isinstance(e, Mul):
        return _eval_mp(e.lhs, point) * _eval_mp(e.rhs, point)
    if isinstance(e, Div):
        den = _eval_mp(e.rhs, point)
        if den == 0:
            raise _DomainFailure
        return _eval_mp(e.lhs, point) / den
    if isinstance(e, Pow):
        base = _eval_mp(e.base, point)
        q = e.exponent
        if base == 0:
            if q < 0:
                raise _DomainFailure
            return mp.mpf(0) if q > 0 else mp.mpf(1)
        if base < 0:
            if q.denominator != 1:
                raise _DomainFailure
            return mp.power(base, int(q))
        if q.denominator == 1:
            return mp.power(base, int(q))
        return mp.power(base, _to_mpf(q))
    if isinstance(e, Log):
        arg = _eval_mp(e.arg, point)
        if arg <= 0:
            raise _DomainFailure
        return mp.log(arg)
    if isinstance(e, Exp):
        return mp.exp(_eval_mp(e.arg, point))
    if isinstance(e, Abs):
        return abs(_eval_mp(e.arg, point))
    if isinstance(e, Min):
        return min(_eval_mp(e.lhs, point), _eval_mp(e.rhs, point))
    if isinstance(e, Max):
        return max(_eval_mp(e.lhs, point), _eval_mp(e.rhs, point))
    if isinstance(e, Atan2):
        return mp.atan2(_eval_mp(e.y, point), _eval_mp(e.x, point))
    raise TypeError(f"unknown node {e!r}")


def evaluate(e: Expr, point: Sequence, precision: int = 128) -> EvalResult:
    """Evaluate at the given point with mpmath at `precision` bits.

    Domain failures (log of a nonpositive value, a non-integer power of a
    negative value, division by zero) return an OutOfDomain status rather
    than raising.  Guard bits are added internally and the result is
    rounded back to the requested precision, so the value is deterministic
    for a fixed precision.
    """
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    n = arity(e)
    if len(point) != n and not (n == 0 and len(point) >= 0):
        if len(point) < n:
            raise ValueError(f"point has dimension {len(point)}, expression needs {n}")
    guard = 32 + max(0, int(math.log2(sum(1 for _ in iter_nodes(e)) + 1)) * 2)
    with mp.workprec(precision + guard):
        pt = [_to_mpf(c) for c in point]
        try:
            value = _eval_mp(e, pt)
        except _DomainFailure:
            return EvalResult(None, EvalStatus.OUT_OF_DOMAIN)
    with mp.workprec(precision):
        return EvalResult(+value, EvalStatus.DEFINED)


def eval_float(e: Expr, point: Sequence[float]) -> float | None:
    """Fast double-precision evaluation; None on domain failures.

    Overflow saturates to +/-inf rather than failing, which keeps slope
    samplers monotone.
    """
    try:
        return _eval_float(e, point)
    except _DomainFailure:
        return None


def _eval_float(e: Expr, point: Sequence[float]) -> float:
    if isinstance(e, Const):
        return e.value.numerator / e.value.denominator
    if isinstance(e, Var):
        return float(point[e.index - 1])
    if isinstance(e, Add):
        return _eval_float(e.lhs, point) + _eval_float(e.rhs, point)
    if isinstance(e, Sub):
        return _eval_float(e.lhs, point) - _eval_float(e.rhs, point)
    if isinstance(e, Mul):
        return _eval_float(e.lhs, point) * _eval_float(e.rhs, point)
    if isinstance(e, Div):
        den = _eval_float(e.rhs, point)
        if den == 0.0:
            raise _DomainFailure
        return _eval_float(e.lhs, point) / den
    if isinstance(e, Pow):
        base = _eval_float(e.base, point)
        q = e.exponent
        if base == 0.0:
            if q < 0:
                raise _DomainFailure
            return 0.0 if q > 0 else 1.0
        if base < 0.0 and q.denominator != 1:
            raise _DomainFailure
        try:
            if q.denominator == 1:
                return base ** int(q)
            return math.pow(base, q.numerator / q.denominator)
        except OverflowError:
            return math.inf if base > 0 or q.numerator % 2 == 0 else -math.inf
    if isinstance(e, Log):
        arg = _eval_float(e.arg, point)
        if arg <= 0.0:
            raise _DomainFailure
        return math.log(arg)
    if isinstance(e, Exp):
        try:
            return math.exp(_eval_float(e.arg, point))
        except OverflowError:
            return math.inf
    if isinstance(e, Abs):
        return abs(_eval_float(e.arg, point))
    if isinstance(e, Min):
        return min(_eval_float(e.lhs, point), _eval_float(e.rhs, point))
    if isinstance(e, Max):
        return max(_eval_float(e.lhs, point), _eval_float(e.rhs, point))
    if isinstance(e, Atan2):
        return math.atan2(_eval_float(e.y, point), _eval_float(e.x, point))
    raise TypeError(f"unknown node {e!r}")


class ExactResult(Enum):
    INEXACT = "inexact"
    OUT_OF_DOMAIN = "out-of-domain"


class _Inexact(Exception):
    pass


def eval_exact(e: Expr, point: Sequence[Fraction]) -> Union[Fraction, ExactResult]:
    """Exact rational evaluation when the tree permits it.

    Log, Exp, Atan2 and non-integer powers make the value irrational in
    general, in which case ExactResult.INEXACT is returned.  Division by
    zero and negative-base non-integer powers give OUT_OF_DOMAIN.
    """
    try:
        return _eval_exact(e, [Fraction(c) for c in point])
    except _Inexact:
        return ExactResult.INEXACT
    except _DomainFailure:
        return ExactResult.OUT_OF_DOMAIN


def _eval_exact(e: Expr, point: Sequence[Fraction]) -> Fraction:
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return point[e.index - 1]
    if isinstance(e, Add):
        return _eval_exact(e.lhs, point) + _eval_exact(e.rhs, point)
    if isinstance(e, Sub):
        return _eval_exact(e.lhs, point) - _eval_exact(e.rhs, point)
    if isinstance(e, Mul):
        return _eval_exact(e.lhs, point) * _eval_exact(e.rhs, point)
    if isinstance(e, Div):
        den = _eval_exact(e.rhs, point)
        if den == 0:
            raise _DomainFailure
        return _eval_exact(e.lhs, point) / den
    if isinstance(e, Pow):
        base = _eval_exact(e.base, point)
        q = e.exponent
        if q.denominator == 1:
            if base == 0 and q < 0:
                raise _DomainFailure
            return base ** int(q)
        if base == 0:
            return Fraction(0) if q > 0 else Fraction(1)
        if base < 0:
            raise _DomainFailure
        raise _Inexact
    if isinstance(e, Abs):
        return abs(_eval_exact(e.arg, point))
    if isinstance(e, Min):
        return min(_eval_exact(e.lhs, point), _eval_exact(e.rhs, point))
    if isinstance(e, Max):
        return max(_eval_exact(e.lhs, point), _eval_exact(e.rhs, point))
    if isinstance(e, Log):
        arg = _eval_exact(e.arg, point)
        if arg <= 0:
            raise _DomainFailure
        if arg == 1:
            return Fraction(0)
        raise _Inexact
    raise _Inexact


# ---------------------------------------------------------------------------
# Substitution and ray restriction


def substitute(e: Expr, mapping: Mapping[int, Expr]) -> Expr:
    """Replace Var(i) by mapping[i]; untouched variables stay."""
    if isinstance(e, Var):
        return mapping.get(e.index, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return Add(substitute(e.lhs, mapping), substitute(e.rhs, mapping))
    if isinstance(e, Sub):
        return Sub(substitute(e.lhs, mapping), substitute(e.rhs, mapping))
    if isinstance(e, Mul):
        return Mul(substitute(e.lhs, mapping), substitute(e.rhs, mapping))
    if isinstance(e, Div):
        return Div(substitute(e.lhs, mapping), substitute(e.rhs, mapping))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), e.exponent)
    if isinstance(e, Log):
        return Log(substitute(e.arg, mapping))
    if isinstance(e, Exp):
        return Exp(substitute(e.arg, mapping))
    if isinstance(e, Abs):
        return Abs(substitute(e.arg, mapping))
    if isinstance(e, Min):
        return Min(substitute(e.lhs, mapping), substitute(e.rhs, mapping))
    if isinstance(e, Max):
        return Max(substitute(e.lhs, mapping), substitute(e.rhs, mapping))
    if isinstance(e, Atan2):
        return Atan2(substitute(e.y, mapping), substitute(e.x, mapping))
    raise TypeError(f"unknown node {e!r}")


def _coordinate_expr(o: Fraction, v: Fraction) -> Expr:
    if v == 0:
        return Const(o)
    term = Var(1) if v == 1 else Mul(Const(v), Var(1))
    if o == 0:
        return term
    return Add(Const(o), term)


def restrict_to_ray(e: Expr, ray: StandardizedRay) -> Expr:
    """Unary expression r |-> e(o + r*v) by exact substitution.

    Float ray data converts to exact rationals (binary floats are exact),
    so the restriction agrees pointwise with direct evaluation wherever
    both are defined.
    """
    n = arity(e)
    if ray.dim < n:
        raise ValueError(f"ray has dimension {ray.dim}, expression needs {n}")
    mapping = {
        i + 1: _coordinate_expr(Fraction(ray.o[i]), Fraction(ray.v[i]))
        for i in range(ray.dim)
    }
    return substitute(e, mapping)
