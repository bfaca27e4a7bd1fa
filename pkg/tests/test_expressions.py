import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from loggrowth import counterexample as cx
from loggrowth import expressions as ex
from loggrowth.rays import StandardizedRay


def test_parse_basic_shapes():
    e = ex.parse("x1^(3/2)*log(x1)")
    assert isinstance(e, ex.Mul)
    assert isinstance(e.lhs, ex.Pow) and e.lhs.exponent == Fraction(3, 2)
    assert isinstance(e.rhs, ex.Log)
    assert ex.arity(e) == 1
    assert ex.is_log_analytic(e)


def test_parse_exp_flags_not_log_analytic():
    e = ex.parse("exp(x1)")
    assert isinstance(e, ex.Exp)
    assert not ex.is_log_analytic(e)


def test_parse_nested_log_depth():
    assert ex.log_depth(ex.parse("log(log(x1))")) == 2
    assert ex.log_depth(ex.parse("x1^2 + x2")) == 0
    assert ex.log_depth(ex.parse("log(x1)*log(log(x1))")) == 2


def test_log_depth_of_inner_max_formula():
    # -y*((log y)^2 - 2 log y + 2 - x) uses only unnested logs.
    h = ex.parse("0 - x2*(log(x2)^2 - 2*log(x2) + 2 - x1)")
    assert ex.log_depth(h) == 1
    assert ex.is_log_analytic(h)


def test_parse_sqrt_desugars():
    assert ex.parse("sqrt(x1)") == ex.Pow(ex.Var(1), Fraction(1, 2))


def test_parse_rational_literal_greedy():
    e = ex.parse("3/2*x1")
    assert e == ex.Mul(ex.Const(Fraction(3, 2)), ex.Var(1))
    # with a variable denominator it is a division
    assert isinstance(ex.parse("3/x1"), ex.Div)
    # subtraction then negative literal
    e2 = ex.parse("x1 - -3")
    assert e2 == ex.Sub(ex.Var(1), ex.Const(Fraction(-3)))


def test_parse_errors_carry_positions():
    with pytest.raises(ex.ParseError) as err:
        ex.parse("x1 + )")
    assert err.value.position == 5
    with pytest.raises(ex.ParseError):
        ex.parse("foo(x1)")
    with pytest.raises(ex.ParseError):
        ex.parse("x1^(x2)")
    with pytest.raises(ex.ParseError):
        ex.parse("1.5*x1")
    with pytest.raises(ex.ParseError):
        ex.parse("x0 + 1")


def test_parse_min_max_variadic_and_atan2():
    e = ex.parse("min(x1, x2, 3)")
    assert e == ex.Min(ex.Min(ex.Var(1), ex.Var(2)), ex.Const(Fraction(3)))
    a = ex.parse("atan2(x2, x1)")
    assert isinstance(a, ex.Atan2)
    assert ex.is_log_analytic(a)  # only exp is excluded
    with pytest.raises(ex.ParseError):
        ex.parse("atan2(x1)")


def test_eval_examples():
    with mp.workprec(200):
        e_hp = mp.exp(1)
    r = ex.evaluate(ex.parse("x1*log(x1)"), [e_hp], 128)
    assert r.defined
    assert abs(r.value - e_hp) < mp.mpf("1e-30")
    r2 = ex.evaluate(ex.parse("log(x1)"), [-1.0], 128)
    assert r2.status is ex.EvalStatus.OUT_OF_DOMAIN
    assert ex.evaluate(ex.parse("1/(x1 - x1)"), [3.0]).status is ex.EvalStatus.OUT_OF_DOMAIN
    assert ex.evaluate(ex.parse("x1^(1/2)"), [-4.0]).status is ex.EvalStatus.OUT_OF_DOMAIN
    assert ex.evaluate(ex.parse("x1^(-3)"), [-2.0]).value == mp.mpf(-0.125)


def test_eval_inner_max_formula_against_maximizer():
    # h(4, e^2) must equal 2 e^2; the independent check is that the 1-D
    # numeric maximizer of h(4, .) returns the same value.
    from loggrowth.search import grid_then_golden

    h = ex.parse("0 - x2*(log(x2)^2 - 2*log(x2) + 2 - x1)")
    with mp.workprec(160):
        e2 = mp.exp(2)
        want = 2 * e2
    got = ex.evaluate(h, [mp.mpf(4), e2], 128)
    assert got.defined
    assert abs(got.value - want) < mp.mpf("1e-25")
    _, oracle_max = grid_then_golden(lambda s: cx.eval_h(4.0, math.exp(s)),
                                     -5.0, 5.0, grid=512, starts=4, tol=1e-12)
    assert abs(oracle_max - float(want)) <= 1e-9 * float(want)


def test_eval_precision_monotone():
    e = ex.parse("sqrt(x1^2 + log(x1))*x1^(1/3)")
    lo = ex.evaluate(e, [7.0], 64)
    hi = ex.evaluate(e, [7.0], 128)
    assert abs(lo.value - hi.value) <= abs(hi.value) * mp.mpf(2) ** -60


def test_eval_requires_min_precision():
    with pytest.raises(ValueError):
        ex.evaluate(ex.Var(1), [1.0], 32)


def test_eval_float_matches_mp():
    e = ex.parse("max(x1^2, x1*log(x1)) + min(x1, 5) - abs(x1 - 7)")
    for x in (1.5, 3.0, 8.0, 120.0):
        f = ex.eval_float(e, (x,))
        m = ex.evaluate(e, [x], 128)
        assert abs(f - float(m.value)) < 1e-12 * max(1.0, abs(f))
    assert ex.eval_float(ex.parse("log(x1)"), (-3.0,)) is None


def test_eval_exact():
    e = ex.parse("x1^2/(x2 + 1) - 3/4")
    v = ex.eval_exact(e, [Fraction(1, 2), Fraction(1)])
    assert v == Fraction(1, 4) / 2 - Fraction(3, 4)
    assert ex.eval_exact(ex.parse("log(x1)"), [Fraction(2)]) is ex.ExactResult.INEXACT
    assert ex.eval_exact(ex.parse("1/x1"), [Fraction(0)]) is ex.ExactResult.OUT_OF_DOMAIN
    assert ex.eval_exact(ex.parse("log(x1)"), [Fraction(1)]) == 0


_consts = st.fractions(min_value=-5, max_value=5, max_denominator=6)
_exponents = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda q: q != 0)


def _exprs(depth: int):
    if depth == 0:
        return st.one_of(
            st.builds(ex.Const, _consts),
            st.builds(ex.Var, st.integers(min_value=1, max_value=3)),
        )
    sub = _exprs(depth - 1)
    return st.one_of(
        st.builds(ex.Const, _consts),
        st.builds(ex.Var, st.integers(min_value=1, max_value=3)),
        st.builds(ex.Add, sub, sub),
        st.builds(ex.Sub, sub, sub),
        st.builds(ex.Mul, sub, sub),
        st.builds(ex.Div, sub, sub),
        st.builds(ex.Pow, sub, _exponents),
        st.builds(ex.Log, sub),
        st.builds(ex.Exp, sub),
        st.builds(ex.Abs, sub),
        st.builds(ex.Min, sub, sub),
        st.builds(ex.Max, sub, sub),
        st.builds(ex.Atan2, sub, sub),
    )


@settings(max_examples=300, deadline=None)
@given(_exprs(3))
def test_print_parse_round_trip(e):
    assert ex.parse(ex.to_text(e)) == e


def test_restrict_to_ray_examples():
    e = ex.parse("x1 + x2")
    ray = StandardizedRay((0.0, 1.0), (1.0, 0.0))
    g = ex.restrict_to_ray(e, ray)
    for r in (0.0, 1.0, 2.5, 10.0):
        assert abs(ex.eval_float(g, (r,)) - (r + 1.0)) < 1e-12

    e2 = ex.parse("x1^2 + x2^2")
    ray2 = StandardizedRay((0.0, 0.0), (0.6, 0.8))
    g2 = ex.restrict_to_ray(e2, ray2)
    for r in (0.5, 3.0, 7.0):
        assert abs(ex.eval_float(g2, (r,)) - r * r) < 1e-9 * max(1.0, r * r)


def test_restrict_builtin_counterexample_matches_direct():
    f = cx.counterexample_function()
    ray = StandardizedRay((0.0, 0.5), (1.0, 0.0))
    section = lambda r: f.eval_float(ray.point_at(r))
    assert section(10.0) == cx.eval_f(10.0, 0.5)


def test_restrict_to_ray_random_agreement():
    rng = random.Random(4242)
    pool = [ex.parse(s) for s in (
        "x1^2 + x2^2", "x1*x2 + 3", "log(x1^2 + x2^2 + 1)",
        "sqrt(x1^2 + x2^2 + 1) - x2", "max(x1, x2)*min(x1, x2)",
        "abs(x1 - x2) + x1",
    )]
    checked = 0
    for _ in range(1000):
        e = rng.choice(pool)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        v = (math.cos(theta), math.sin(theta))
        w = rng.uniform(-5.0, 5.0)
        ray = StandardizedRay((-w * v[1], w * v[0]), v)
        r = rng.uniform(0.0, 50.0)
        g = ex.restrict_to_ray(e, ray)
        direct = ex.eval_float(e, ray.point_at(r))
        restricted = ex.eval_float(g, (r,))
        if direct is None or restricted is None:
            assert direct is None and restricted is None
            continue
        checked += 1
        assert abs(direct - restricted) <= 1e-9 * max(1.0, abs(direct))
    assert checked > 900


def test_restrict_to_ray_dimension_mismatch():
    with pytest.raises(ValueError):
        ex.restrict_to_ray(ex.parse("x1 + x2 + x3"),
                           StandardizedRay((0.0, 0.0), (1.0, 0.0)))
