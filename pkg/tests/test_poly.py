import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dynirr.poly import (
    DegreeGuardError,
    IntPoly,
    PolySyntaxError,
    bareiss_det,
    compose,
    derivative,
    detect_shape,
    discriminant,
    eval_rational,
    iterate,
    iterate_mod,
    parse_poly,
    resultant_int,
    resultant_of_iterate,
    squarefree_decomposition,
    sylvester_resultant,
)


def P(*c):
    return IntPoly(tuple(c))


def rand_poly(rng, max_deg, lo=-9, hi=9, min_deg=0):
    d = rng.randint(min_deg, max_deg)
    c = [rng.randint(lo, hi) for _ in range(d)] + [rng.choice([v for v in range(lo, hi + 1) if v])]
    return IntPoly(tuple(c))


def naive_rem(a: IntPoly, m: IntPoly):
    """Long division over Q, returned as a list of Fractions."""
    r = [Fraction(c) for c in a.coeffs]
    while len(r) >= len(m.coeffs) and any(r):
        q = r[-1] / m.lc
        shift = len(r) - len(m.coeffs)
        for i, c in enumerate(m.coeffs):
            r[shift + i] -= q * c
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    return r


coeff_lists = st.lists(st.integers(-20, 20), min_size=1, max_size=6)


# -- parsing ---------------------------------------------------------------

@pytest.mark.parametrize("text,coeffs", [
    ("x^2+1", (1, 0, 1)),
    ("(x-2)^2+2", (6, -4, 1)),
    ("coeffs:0,0,1", (0, 0, 1)),
    ("(x+2)^3-2", (6, 12, 6, 1)),
    ("-x^2 - 3*x", (0, -3, -1)),
    ("2*(x+1)*(x-1)", (-2, 0, 2)),
    ("  7 ", (7,)),
])
def test_parse(text, coeffs):
    assert parse_poly(text).coeffs == coeffs


@pytest.mark.parametrize("bad", ["2x", "x^", "(x+1", "x^-1", "y+1", "", "x**2", "coeffs:1,a"])
def test_parse_rejects(bad):
    with pytest.raises(PolySyntaxError):
        parse_poly(bad)


def test_parse_degree_guard():
    with pytest.raises(DegreeGuardError):
        parse_poly("x^100", degree_guard=50)


def test_canonical_printing_round_trip():
    f = parse_poly("(x-2)^2+2")
    assert f.to_coeffs_str() == "coeffs:6,-4,1"
    assert parse_poly(f.to_coeffs_str()) == f
    assert parse_poly(str(f)) == f


@given(coeff_lists)
def test_print_parse_round_trip(c):
    f = IntPoly(tuple(c))
    assert parse_poly(str(f)) == f
    assert parse_poly(f.to_coeffs_str()) == f


# -- derivative / compose / iterate / eval --------------------------------

def test_derivative():
    assert derivative(P(1, 0, 1)) == P(0, 2)
    assert derivative(P(6, -4, 1)) == P(-4, 2)
    assert derivative(P(5)).is_zero()


def test_compose():
    f = P(1, 0, 1)
    assert compose(f, f) == P(2, 0, 2, 0, 1)
    assert compose(P(3, -1, 4), P(0, 1)) == P(3, -1, 4)
    assert compose(P(0, 1), P(3, -1, 4)) == P(3, -1, 4)


def test_iterate_examples():
    f = P(1, 0, 1)
    assert iterate(f, 0) == P(0, 1)
    assert iterate(f, 2) == P(2, 0, 2, 0, 1)
    # orbit of 0 is 0, 1, 2, 5, 26
    assert iterate(f, 3)(0) == 5
    assert iterate(f, 4)(0) == 26


def test_iterate_degree_guard():
    with pytest.raises(DegreeGuardError):
        iterate(P(1, 0, 1), 5, degree_guard=16)


def test_eval_rational():
    assert eval_rational(P(1, 0, 1), Fraction(1, 2)) == Fraction(5, 4)
    assert eval_rational(P(6, -4, 1), 2) == 2
    assert eval_rational(P(1, 0, 1), 0) == 1


def test_iterate_recursion_and_degree():
    rng = random.Random(1)
    for _ in range(60):
        f = rand_poly(rng, 5, min_deg=1)
        for n in range(1, 4):
            fn = iterate(f, n)
            assert fn == compose(f, iterate(f, n - 1))
            assert fn.degree == f.degree ** n


def test_semigroup_law():
    rng = random.Random(2)
    for _ in range(40):
        f = rand_poly(rng, 3, min_deg=1, lo=-4, hi=4)
        for m in range(0, 5):
            for n in range(0, 5 - m):
                assert iterate(f, m + n) == compose(iterate(f, m), iterate(f, n))


@given(coeff_lists, coeff_lists, st.integers(-50, 50))
def test_compose_is_evaluation(a, b, x):
    f, g = IntPoly(tuple(a)), IntPoly(tuple(b))
    assert compose(f, g)(x) == f(g(x))


@given(coeff_lists, coeff_lists)
def test_derivative_product_rule(a, b):
    f, g = IntPoly(tuple(a)), IntPoly(tuple(b))
    assert derivative(f * g) == derivative(f) * g + f * derivative(g)


# -- resultants -----------------------------------------------------------

def test_resultant_examples():
    assert resultant_int(P(1, 0, 1), P(0, 2)) == 4
    assert resultant_int(P(2, 0, 2, 0, 1), P(0, 2)) == 32
    f, g, h = P(1, 1), P(-1, 1), P(2, 0, 1)
    assert resultant_int(f * g, h) == resultant_int(f, h) * resultant_int(g, h) == 9


def test_resultant_matches_sylvester_oracle():
    rng = random.Random(3)
    for _ in range(200):
        a = rand_poly(rng, 6, min_deg=1)
        b = rand_poly(rng, 6, min_deg=1)
        assert resultant_int(a, b) == sylvester_resultant(a, b)


def test_resultant_multiplicativity():
    rng = random.Random(4)
    for _ in range(100):
        f, g, h = (rand_poly(rng, 4, min_deg=1) for _ in range(3))
        assert resultant_int(f * g, h) == resultant_int(f, h) * resultant_int(g, h)


def test_bareiss_det_small():
    assert bareiss_det([[2, 1], [1, 3]]) == 5
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[1, 2], [2, 4]]) == 0


def test_resultant_of_iterate_sequence():
    f = P(1, 0, 1)
    assert [resultant_of_iterate(f, n) for n in range(1, 6)] == [4, 32, 1280, 1703936, 2907692859392]
    rng = random.Random(5)
    for _ in range(20):
        f = rand_poly(rng, 3, min_deg=2, lo=-5, hi=5)
        g = rand_poly(rng, 3, min_deg=1, lo=-5, hi=5)
        for n in (1, 2, 3):
            assert resultant_of_iterate(f, n, g) == sylvester_resultant(iterate(f, n), g)


def test_discriminant():
    assert discriminant(P(1, 0, 1)) == -4
    assert discriminant(P(6, -4, 1)) == -8
    assert discriminant(P(-1, 0, 1)) == 4


# -- iterate_mod ----------------------------------------------------------

def test_iterate_mod_examples():
    assert iterate_mod(P(1, 0, 1), 2, P(0, 2)) == (P(2), 1)
    assert iterate_mod(P(1, 0, 1), 5, P(0, 2)) == (P(677), 1)
    f, m = P(3, 1, 4, 1), P(1, 0, 1)
    num, den = iterate_mod(f, 1, m)
    assert [Fraction(c, den) for c in num.coeffs] == naive_rem(f, m)


def test_iterate_mod_matches_remainder():
    rng = random.Random(6)
    cases = 0
    while cases < 50:
        f = rand_poly(rng, 4, min_deg=2, lo=-5, hi=5)
        m = rand_poly(rng, 4, min_deg=1, lo=-5, hi=5)
        n = rng.randint(1, 4)
        if f.degree ** n > 1 << 12:
            continue
        num, den = iterate_mod(f, n, m)
        assert [Fraction(c, den) for c in num.coeffs] == naive_rem(iterate(f, n), m)
        cases += 1


# -- squarefree and shape -------------------------------------------------

def _expand_sqf(content, factors):
    out = IntPoly.const(content)
    for g, k in factors:
        out = out * g ** k
    return out


def test_squarefree_examples():
    content, factors = squarefree_decomposition(P(0, 0, -12, 12))
    assert content == 12
    assert sorted((g.coeffs, k) for g, k in factors) == [((-1, 1), 1), ((0, 1), 2)]
    assert squarefree_decomposition(P(1, 0, 1)) == (1, [(P(1, 0, 1), 1)])
    assert squarefree_decomposition(P(1, -2, 1)) == (1, [(P(-1, 1), 2)])


def test_squarefree_round_trip():
    rng = random.Random(7)
    for _ in range(100):
        f = rand_poly(rng, 3, min_deg=1, lo=-4, hi=4) ** rng.randint(1, 3) * rand_poly(rng, 3, lo=-4, hi=4)
        content, factors = squarefree_decomposition(f)
        assert _expand_sqf(content, factors) == f


def test_detect_shape_examples():
    sh = detect_shape(P(0, 0, 0, -4, 3))
    assert (sh.c, sh.h, sh.a, sh.b, sh.gamma) == (12, P(0, 1), 1, -1, 1)
    assert detect_shape(P(0, 0, 0, 1, 1)).gamma == Fraction(-3, 4)
    assert detect_shape(P(0, 4, 0, 0, 1)) is None


def test_trinomial_gamma_formula():
    # f = r (x - u)^d + s (x - u)^(d-1) + t  has  gamma = u - (d-1) s / (d r)
    x = IntPoly.x()
    for r, u, s, t, d in [(1, 0, 1, 0, 4), (2, 3, -5, 1, 4), (-3, -1, 2, 7, 6), (1, 2, 0, 2, 2)]:
        f = r * (x - u) ** d + s * (x - u) ** (d - 1) + t
        sh = detect_shape(f)
        assert sh.gamma == u - Fraction((d - 1) * s, d * r)


def test_detect_shape_round_trip():
    rng = random.Random(8)
    found = 0
    for _ in range(300):
        h = rand_poly(rng, 2, lo=-3, hi=3)
        lin = P(rng.randint(-3, 3), rng.choice([-3, -2, -1, 1, 2, 3]))
        df = rng.choice([1, 2, 3, 6]) * h * h * lin
        # integrate df when the coefficients allow it
        coeffs = [0]
        for i, c in enumerate(df.coeffs):
            if c % (i + 1):
                break
            coeffs.append(c // (i + 1))
        else:
            f = IntPoly(tuple(coeffs)) + rng.randint(-5, 5)
            if f.degree >= 2:
                sh = detect_shape(f)
                assert sh is not None
                assert sh.expand() == [Fraction(c) for c in derivative(f).coeffs]
                found += 1
    assert found > 20


def test_detect_shape_strict_absorbs_content():
    sh = detect_shape(P(0, 0, 0, -4, 3), strict=True)
    assert sh.c == 1 and sh.gamma == 1
    assert sh.expand() == [Fraction(c) for c in derivative(P(0, 0, 0, -4, 3)).coeffs]
