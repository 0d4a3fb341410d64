import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from noetherp.cyclo import CycRat
from noetherp.poly import Poly, PolyRing, SizeLimitExceeded, elementary_symmetric

R = PolyRing(("x1", "x2", "x3"), 2)
SYMS = sympy.symbols("x1 x2 x3")


def to_sympy(f: Poly):
    out = 0
    for e, c in f.terms.items():
        term = sympy.Rational(c.num[0], c.den)
        for s, k in zip(SYMS, e):
            term *= s**k
        out += term
    return sympy.expand(out)


monomial = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(monomial, st.integers(-5, 5), max_size=5).map(
    lambda d: Poly(R, {e: CycRat.from_rational(2, c) for e, c in d.items() if c})
)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_ring_ops_match_sympy(f, g):
    assert to_sympy(f + g) == sympy.expand(to_sympy(f) + to_sympy(g))
    assert to_sympy(f - g) == sympy.expand(to_sympy(f) - to_sympy(g))
    assert to_sympy(f * g) == sympy.expand(to_sympy(f) * to_sympy(g))


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_exact_div_recovers_factor(f, g):
    if g.is_zero():
        return
    assert (f * g).exact_div(g) == f


def test_exact_div_none_when_not_divisible():
    x1, x2, _ = R.gens()
    assert (x1 * x1 + x2).exact_div(x1) is None


@settings(max_examples=40, deadline=None)
@given(polys, st.sampled_from([0, 1, 2]))
def test_derivative_matches_sympy(f, i):
    assert to_sympy(f.derivative(i)) == sympy.expand(sympy.diff(to_sympy(f), SYMS[i]))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_elementary_symmetric_matches_sympy(k):
    from itertools import combinations

    want = sum(sympy.Mul(*c) for c in combinations(SYMS, k))
    assert to_sympy(elementary_symmetric(k, R.gens())) == sympy.expand(want)


def test_elementary_symmetric_range():
    with pytest.raises(ValueError):
        elementary_symmetric(4, R.gens())


def test_radical_reduction():
    ring = PolyRing.with_radical(("x1", "x2", "W"), 3, "W", 2, {"x1": 1, "x2": 1})
    W = ring.var("W")
    assert W * W == ring.var("x1") * ring.var("x2")
    assert (W**3).degree_in(2) == 1


def test_text_is_grlex_descending():
    x1, x2, x3 = R.gens()
    assert (x3 + x1 * x2 + x1 + 2).to_text() == "x1*x2 + x1 + x3 + 2"


def test_term_cap():
    small = PolyRing(("a", "b", "c"), 2, term_cap=8)
    a, b, c = small.gens()
    s = a + b + c
    with pytest.raises(SizeLimitExceeded):
        _ = s * s * s


def test_zeta_coefficients_over_q_zeta3():
    ring = PolyRing(("x",), 3)
    x = ring.var("x")
    z = ring.zeta()
    # (x - 1)(x - zeta)(x - zeta^2) = x^3 - 1
    assert (x - 1) * (x - z) * (x - z * z) == x**3 - 1


def test_evaluate_and_apply_monomial():
    x1, x2, x3 = R.gens()
    f = x1 * x2 + 3 * x3
    pt = [CycRat.from_rational(2, v) for v in (2, 5, 7)]
    assert f.evaluate(pt) == 31
    g = f.apply_monomial((1, 0, 2), [CycRat.one(2)] * 3)
    assert g == x1 * x2 + 3 * x3
