import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from loggrowth import expressions as ex
from loggrowth.monomials import (
    UNIT,
    IteratedExpTable,
    LogPowMonomial,
    Order,
    bound_exponent,
    eval_monomial,
    iterated_exp,
    lex_compare,
    monomial,
    mul,
    pow_monomial,
)


def test_canonical_trims_trailing_zeros():
    assert monomial(2, 0, 0).exponents == (Fraction(2),)
    assert monomial(0, 0).exponents == (Fraction(0),)
    assert monomial(0).exponents == (Fraction(0),)
    assert UNIT.is_unit()
    assert monomial(0, 1).depth == 1


def test_lex_compare_examples():
    assert lex_compare(monomial(1, 0), monomial(0, 5)) is Order.GREATER
    assert lex_compare(monomial("1/2", -2), monomial("1/2", -3)) is Order.GREATER
    assert lex_compare(monomial(2, -1), monomial(2, -1)) is Order.EQUAL


def test_lex_compare_total_order_random_triples():
    rng = random.Random(1234)

    def rand_monomial():
        k = rng.randint(0, 3)
        return LogPowMonomial(tuple(
            Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for _ in range(k + 1)))

    for _ in range(2000):
        a, b, c = rand_monomial(), rand_monomial(), rand_monomial()
        ab, ba = lex_compare(a, b), lex_compare(b, a)
        assert ab.value == -ba.value
        if ab is Order.EQUAL:
            assert a.exponents == b.exponents
        # transitivity
        if lex_compare(a, b) is not Order.GREATER and lex_compare(b, c) is not Order.GREATER:
            assert lex_compare(a, c) is not Order.GREATER


def test_mul_and_pow():
    assert mul(monomial(1, 2), monomial(-1, 1)) == monomial(0, 3)
    assert pow_monomial(monomial("3/2", 1), 2) == monomial(3, 2)
    m = monomial("5/3", -2, 1)
    assert mul(m, UNIT) == m
    assert mul(UNIT, m) == m


def test_mul_is_evaluation_homomorphism():
    rng = random.Random(7)
    with mp.workprec(160):
        x = mp.exp(10)
    for _ in range(25):
        m1 = LogPowMonomial(tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3))
                                  for _ in range(rng.randint(1, 3))))
        m2 = LogPowMonomial(tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3))
                                  for _ in range(rng.randint(1, 3))))
        with mp.workprec(200):
            lhs = eval_monomial(mul(m1, m2), x, 128)
            rhs = eval_monomial(m1, x, 128) * eval_monomial(m2, x, 128)
            assert abs(lhs - rhs) <= abs(rhs) * mp.mpf("1e-20")


def test_eval_monomial_examples():
    with mp.workprec(128):
        e2 = mp.exp(2)
        assert abs(eval_monomial(monomial(0, 1), e2) - 2) < mp.mpf("1e-30")
        e1 = mp.exp(1)
        assert abs(eval_monomial(monomial(1, 1), e1) - e1) < mp.mpf("1e-30")


def test_eval_monomial_double_log_cross_checked():
    # Independent evaluator: log(log(x1)) at x = e^(e^2) must give 2.
    with mp.workprec(160):
        x = mp.exp(mp.exp(2))
    got = eval_monomial(monomial(0, 0, 1), x, 128)
    oracle = ex.evaluate(ex.parse("log(log(x1))"), [x], 128)
    assert oracle.defined
    assert abs(got - 2) < mp.mpf("1e-25")
    assert abs(got - oracle.value) < mp.mpf("1e-25")


def test_eval_monomial_domain_threshold():
    with pytest.raises(ValueError):
        eval_monomial(monomial(0, 1), 0.5)  # needs x > e_1 = 1
    with pytest.raises(ValueError):
        eval_monomial(monomial(0, 0, 1), 2.0)  # needs x > e_2 = e


def test_iterated_exp_table():
    table = IteratedExpTable.build(4, 128)
    assert table[0] == 0
    assert table[1] == 1
    with mp.workprec(128):
        assert abs(table[2] - mp.e) < mp.mpf("1e-35")
        assert abs(table[3] - mp.exp(mp.e)) < mp.mpf("1e-33")
    assert iterated_exp(2) == table[2]


def test_bound_exponent_examples():
    assert bound_exponent(monomial(2, -1)) == 2
    assert bound_exponent(monomial(2, 1)) == 3
    assert bound_exponent(monomial("3/2", 7)) == 2
    assert bound_exponent(UNIT) == 0
    assert bound_exponent(monomial(-2)) == -2
    assert bound_exponent(monomial(0, 0, 1)) == 1


def test_bound_exponent_oracle_x2_logx():
    # x^2 log x <= x^3 and > x^2 at e^10 and e^20, extended precision.
    m = monomial(2, 1)
    with mp.workprec(160):
        for p in (10, 20):
            x = mp.exp(p)
            v = eval_monomial(m, x, 150)
            assert v <= x ** 3
            assert v > x ** 2


def test_bound_exponent_oracle_three_halves_log7():
    # m(x)/x^2 must decrease strictly toward 0 between e^100 and e^200.
    m = monomial("3/2", 7)
    with mp.workprec(400):
        r1 = eval_monomial(m, mp.exp(100), 380) / mp.exp(100) ** 2
        r2 = eval_monomial(m, mp.exp(200), 380) / mp.exp(200) ** 2
    assert r2 < r1


def test_order_evaluation_consistency():
    rng = random.Random(99)
    schedule = [10, 20, 40, 80]
    for _ in range(20):
        m1 = LogPowMonomial(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 2))
                                  for _ in range(rng.randint(1, 2))))
        m2 = LogPowMonomial(tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 2))
                                  for _ in range(rng.randint(1, 2))))
        if lex_compare(m1, m2) is not Order.LESS:
            continue
        with mp.workprec(300):
            ratios = [eval_monomial(m1, mp.exp(p), 280) / eval_monomial(m2, mp.exp(p), 280)
                      for p in schedule]
        for a, b in zip(ratios, ratios[1:]):
            assert b < a


def test_text_round_trip():
    cases = [UNIT, monomial(2, -1), monomial("3/2", 0, "1/3"), monomial(0, 5),
             monomial(-1), monomial(0, 0, -2)]
    for m in cases:
        assert LogPowMonomial.from_text(m.to_text()) == m
    assert monomial("3/2", 1).to_text() == "x^(3/2) log"
    assert LogPowMonomial.from_text("x^(1/2) log^(-2) log_2^(3)") == \
        monomial("1/2", -2, 3)


def test_json_round_trip():
    m = monomial("3/2", -1, "2/7")
    assert m.to_json() == ["3/2", "-1", "2/7"]
    assert LogPowMonomial.from_json(m.to_json()) == m
