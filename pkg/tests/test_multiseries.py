import math
from fractions import Fraction

import pytest
from mpmath import mp

from loggrowth import expressions as ex
from loggrowth import multiseries as ms
from loggrowth.monomials import UNIT, eval_monomial, lex_compare, monomial, Order

# Fragment corpus used for the classifier/oracle agreement properties.
# Every entry is (source, expected bound exponent).
FRAGMENT_CORPUS = [
    ("x1^2*log(x1)", 3),
    ("x1^(3/2)*log(x1)", 2),
    ("log(x1^3 + x1)", 1),
    ("sqrt(x1^2 + log(x1))", 1),
    ("x1 + x1", 1),
    ("7", 0),
    ("x1^2*log(x1) + 5*x1*log(log(x1))^3", 3),
    ("x1/(log(x1))", 1),
    ("(x1^2 + 1)/(x1 + 1)", 1),
    ("log(log(x1))", 1),
    ("min(x1^2, x1^3)", 2),
    ("max(x1^2, x1*log(x1))", 2),
    ("abs(5 - x1)", 1),
    ("sqrt(x1)*log(x1)^2", 1),
    ("x1^(7/3)", 3),
    ("(x1 + log(x1))^2", 2),
    ("1/(x1^2 + 1)", -2),
    ("log(x1)^5/x1", 0),
    ("x1^(1/2) + x1^(1/3)", 1),
    ("log(x1^2 + x1 + 1)*x1", 2),
    ("min(x1 + 1, x1 + 2)", 1),
    ("abs(x1^2 - x1^3)", 3),
]


def _direct(e, x, prec=160):
    r = ex.evaluate(e, [x], prec)
    assert r.defined
    return r.value


def test_expand_log_poly():
    e = ex.parse("log(x1^3 + x1)")
    s = ms.expand(e)
    assert s.terms[0] == (Fraction(3), monomial(0, 1))
    assert s.terms[1] == (Fraction(1), monomial(-2))
    # Oracle: against direct evaluation the error is below x^-2.
    for x in (1e3, 1e6):
        err = abs(float(_direct(e, x) - s.evaluate_terms(x, 160)))
        assert err <= x ** -2


def test_expand_exact_sum():
    s = ms.expand(ex.parse("x1 + x1"))
    assert s.terms == ((Fraction(2), monomial(1)),)
    assert s.tail is None


def test_expand_sqrt():
    e = ex.parse("sqrt(x1^2 + log(x1))")
    s = ms.expand(e)
    assert s.terms[0] == (Fraction(1), monomial(1))
    assert s.terms[1] == (Fraction(1, 2), monomial(-1, 1))
    for x in (1e3, 1e6, 1e9):
        direct = _direct(e, x)
        rel = abs(float((direct - s.evaluate_terms(x, 160)) / direct))
        assert rel <= 10.0 * x ** -2 * math.log(x) ** 2


def test_expand_soundness_on_corpus():
    # |expr - sum| <= d * tail(x) at 20 log-spaced points in (t, 1e12).
    for src, _ in FRAGMENT_CORPUS:
        e = ex.parse(src)
        s = ms.expand(e)
        if s.tail is None:
            continue
        lo = max(s.threshold, 1.0)
        for i in range(20):
            x = lo * (1e12 / lo) ** ((i + 1) / 20.0)
            direct = _direct(e, x)
            approx = s.evaluate_terms(x, 160)
            bound = s.tail.d * eval_monomial(s.tail.monomial, x, 160)
            noise = abs(direct) * mp.mpf(2) ** -120
            assert abs(direct - approx) <= bound + noise, (src, x)


def test_expand_rejects_exp_and_atan2():
    with pytest.raises(ms.OutOfFragment):
        ms.expand(ex.parse("exp(x1)"))
    with pytest.raises(ms.OutOfFragment):
        ms.expand(ex.parse("atan2(x1, 2)"))
    with pytest.raises(ms.OutOfFragment):
        ms.expand(ex.parse("x1 + x2"))


def test_expand_rejects_negative_body_under_log_and_root():
    with pytest.raises(ms.OutOfFragment):
        ms.expand(ex.parse("log(0 - x1)"))
    with pytest.raises(ms.OutOfFragment):
        ms.expand(ex.parse("sqrt(0 - x1)"))


def test_expand_depth_exhausted_on_hidden_leading_term():
    # The difference of these is below every kept term: branch decisions
    # cannot resolve.
    e = ex.parse("max(log(x1^3 + x1) - 3*log(x1) - 1/x1^2, 0 - 1)")
    with pytest.raises((ms.DepthExhausted, ms.OutOfFragment)):
        ms.expand(e, depth=2)


def test_prepared_form_monomial_case():
    pf = ms.prepared_form(ex.parse("x1^2*log(x1)"))
    assert pf.a == Fraction(1)
    assert pf.monomial == monomial(2, 1)
    assert pf.d == 1.0
    assert pf.t >= 1.0  # never below the log-positivity threshold


def test_prepared_form_log_example():
    e = ex.parse("log(x1^3 + x1)")
    pf = ms.prepared_form(e)
    assert pf.a == Fraction(3)
    assert pf.monomial == monomial(0, 1)
    assert pf.d <= 1.01
    # Sampled unit stays inside [0, d] past the threshold.
    for i in range(20):
        x = pf.t * (1e9 / pf.t) ** ((i + 1) / 20.0)
        u = float(_direct(e, x) / (3 * eval_monomial(pf.monomial, x, 160)))
        assert 0.0 <= u <= pf.d


def test_prepared_form_zero():
    pf = ms.prepared_form(ex.parse("x1 - x1"))
    assert pf.is_zero
    assert pf.a == 0


def test_prepared_form_units_on_corpus():
    for src, _ in FRAGMENT_CORPUS:
        e = ex.parse(src)
        pf = ms.prepared_form(e)
        if pf.is_zero:
            continue
        with mp.workprec(200):
            a = mp.mpf(pf.a.numerator) / pf.a.denominator if isinstance(pf.a, Fraction) else mp.mpf(pf.a)
            for i in range(12):
                x = pf.t * (1e12 / pf.t) ** ((i + 1) / 12.0)
                u = float(_direct(e, x) / (a * eval_monomial(pf.monomial, x, 160)))
                assert -1e-12 <= u <= pf.d * (1 + 1e-12), (src, x, u)


def test_classify_growth_examples():
    g = ms.classify_growth(ex.parse("x1^2*log(x1) + 5*x1*log(log(x1))^3"))
    assert g.kind is ms.GrowthKind.POLY_BOUNDED
    assert g.N == 3
    pf = ms.prepared_form(ex.parse("x1^2*log(x1) + 5*x1*log(log(x1))^3"))
    assert pf.monomial == monomial(2, 1)

    g2 = ms.classify_growth(ex.parse("2*exp(sqrt(x1))*(sqrt(x1) - 1)"))
    assert g2.kind is ms.GrowthKind.SUPER_POLYNOMIAL

    g3 = ms.classify_growth(ex.parse("7"))
    assert g3.kind is ms.GrowthKind.POLY_BOUNDED
    assert g3.N == 0


def test_classify_certificates_validate():
    for src, n_expected in FRAGMENT_CORPUS:
        g = ms.classify_growth(ex.parse(src))
        assert g.kind is ms.GrowthKind.POLY_BOUNDED, src
        assert g.N == n_expected, src
        assert g.certificate is not None and g.certificate.validated, src


def test_classify_unknown_for_stable_exp_expression():
    # exp(log(x1)) grows like x but the fragment cannot prove it.
    g = ms.classify_growth(ex.parse("exp(log(x1))"))
    assert g.kind in (ms.GrowthKind.UNKNOWN, ms.GrowthKind.SUPER_POLYNOMIAL)
    assert g.kind is ms.GrowthKind.UNKNOWN


def test_oracle_pure_power():
    rep = ms.numeric_growth_oracle(ex.parse("x1^2"))
    assert rep.trend == "stable"
    assert abs(rep.estimate - 2.0) <= 0.01
    for _, _, s in rep.windows:
        assert abs(s - 2.0) <= 0.01


def test_oracle_power_log_schedule():
    sched = [10.0 ** (3 * 2 ** j) for j in range(5)]
    rep = ms.numeric_growth_oracle(ex.parse("x1^(3/2)*log(x1)"), sched)
    slopes = rep.slopes()
    assert all(1.5 < s < 1.7 for s in slopes)
    assert all(b < a for a, b in zip(slopes, slopes[1:]))


def test_oracle_divergence():
    rep = ms.numeric_growth_oracle(ex.parse("2*exp(sqrt(x1))*(sqrt(x1) - 1)"))
    assert rep.trend == "increasing"
    slopes = rep.slopes()
    assert all(b > a for a, b in zip(slopes, slopes[1:]))


def test_oracle_all_out_of_domain():
    with pytest.raises(ValueError):
        ms.numeric_growth_oracle(ex.parse("log(0 - x1)"))


def test_classifier_oracle_agreement():
    # Window slopes never exceed N + 0.2 past 1e6.
    for src, _ in FRAGMENT_CORPUS:
        e = ex.parse(src)
        g = ms.classify_growth(e)
        rep = ms.numeric_growth_oracle(e)
        for lo, hi, s in rep.windows:
            if s is None or lo < 1e6:
                continue
            assert s <= g.N + 0.2, (src, lo, hi, s)


def test_multiseries_terms_strictly_decreasing():
    for src, _ in FRAGMENT_CORPUS:
        s = ms.expand(ex.parse(src))
        for (c1, m1), (c2, m2) in zip(s.terms, s.terms[1:]):
            assert lex_compare(m1, m2) is Order.GREATER
        for c, _ in s.terms:
            assert c != 0
