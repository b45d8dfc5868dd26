import random
from fractions import Fraction

import pytest

from dynirr import modp
from dynirr.modp import ModPoly, iterate_modp, legendre_euler, orbit_mod, reduce_mod
from dynirr.poly import IntPoly, derivative, detect_shape, iterate, parse_poly
from dynirr.stability import (
    Policy,
    Reason,
    VerdictKind,
    default_depth,
    depth_capped,
    symbol_conditions_report,
    quadratic_stability,
    shaped_filter,
    shaped_symbols,
    stability_verdict,
)

PRIMES_500 = [p for p in range(3, 500) if modp.is_prime(p)]


def test_quadratic_examples():
    v = quadratic_stability(parse_poly("x^2+1"), 3)
    assert v.kind is VerdictKind.STABLE
    assert set(v.certificate.symbols[2:]) <= {-1}
    v = quadratic_stability(parse_poly("x^2+1"), 5)
    assert v.kind is VerdictKind.NOT_STABLE and v.witness.n == 1
    assert v.witness.reason is Reason.DISC_SQUARE
    assert quadratic_stability(parse_poly("(x-2)^2+2"), 13).kind is VerdictKind.STABLE


def test_quadratic_degenerate_primes():
    assert quadratic_stability(parse_poly("x^2+1"), 2).kind is VerdictKind.DEGENERATE
    assert quadratic_stability(parse_poly("3*x^2+1"), 3).kind is VerdictKind.DEGENERATE


@pytest.mark.parametrize("p,n", [(11, 3), (13, 1), (17, 1), (19, 3)])
def test_quadratic_witnesses_for_small_primes(p, n):
    v = quadratic_stability(parse_poly("x^2+1"), p)
    assert v.kind is VerdictKind.NOT_STABLE and v.witness.n == n


def test_quadratic_soundness_against_rabin():
    rng = random.Random(20)
    stable_seen = 0
    for _ in range(200):
        f = IntPoly((rng.randint(-50, 50), rng.randint(-50, 50), 1))
        p = rng.choice(PRIMES_500)
        v = quadratic_stability(f, p)
        fp = reduce_mod(f, p)[0]
        if v.kind is VerdictKind.STABLE:
            stable_seen += 1
            assert depth_capped(f, p, 4).kind is VerdictKind.UNKNOWN
        elif v.kind is VerdictKind.NOT_STABLE and v.witness.n <= 6:
            n = v.witness.n
            assert not modp.is_irreducible(iterate_modp(fp, n))
            if n > 1:
                assert modp.is_irreducible(iterate_modp(fp, n - 1))
    assert stable_seen > 0


def test_quadratic_matches_rabin_on_every_prime_below_200():
    # exact verdicts agree with direct irreducibility up to the depth Rabin can see
    for f in (parse_poly("x^2+1"), parse_poly("(x-2)^2+2"), parse_poly("x^2-x-1"), parse_poly("x^2+3*x+5")):
        for p in PRIMES_500[:45]:
            v = quadratic_stability(f, p)
            r = depth_capped(f, p, 5)
            if v.kind is VerdictKind.STABLE:
                assert r.kind is VerdictKind.UNKNOWN
            elif v.witness.n <= 5:
                assert r.kind is VerdictKind.NOT_STABLE and r.witness.n == v.witness.n
            else:
                assert r.kind is VerdictKind.UNKNOWN


def test_quadratic_never_symbol_zero():
    # once Disc is a nonsquare, f has no root in F_p, so no f^(n)(gamma) vanishes
    rng = random.Random(26)
    for _ in range(300):
        f = IntPoly((rng.randint(-30, 30), rng.randint(-30, 30), 1))
        v = quadratic_stability(f, rng.choice(PRIMES_500[:30]))
        assert v.witness is None or v.witness.reason is not Reason.SYMBOL_ZERO


def test_shaped_symbol_zero_witness():
    f = parse_poly("x^4-3*x^3+2")
    sh = detect_shape(f)
    assert sh.gamma == Fraction(9, 4)
    v = shaped_filter(f, sh, 13)
    assert (v.witness.n, v.witness.reason) == (2, Reason.SYMBOL_ZERO)
    assert symbol_conditions_report(f, 13, 2)[0].symbol == 0


def test_certificate_finiteness():
    rng = random.Random(21)
    for _ in range(100):
        f = IntPoly((rng.randint(-20, 20), rng.randint(-20, 20), 1))
        p = rng.choice(PRIMES_500)
        v = quadratic_stability(f, p)
        if v.certificate is None:
            continue
        c = v.certificate
        fp = reduce_mod(f, p)[0]
        o = orbit_mod(fp, c.gamma)
        # the point after the last stored one is the cycle entry, so its symbol repeats
        nxt = fp(o.points[-1])
        assert legendre_euler(f.lc * nxt, p) == c.symbols[c.tail_len]


# -- shaped path -----------------------------------------------------------

def random_shaped_quartic(rng):
    """f with f' = 12 c (x - r)^2 (a x + b), a monic-free integral antiderivative."""
    while True:
        r, a, b = rng.randint(-4, 4), rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(-4, 4)
        c = rng.choice([1, -1, 2])
        df = IntPoly((-r, 1)) ** 2 * IntPoly((b, a)) * (12 * c)
        coeffs = [rng.randint(-6, 6)] + [df.coeffs[i] // (i + 1) for i in range(len(df.coeffs))]
        f = IntPoly(tuple(coeffs))
        assert derivative(f) == df
        if f.degree == 4:
            return f


def test_shaped_symbols_match_direct_resultants():
    rng = random.Random(22)
    compared = 0
    for _ in range(20):
        f = random_shaped_quartic(rng)
        sh = detect_shape(f)
        for p in PRIMES_500:
            if p >= 200:
                break
            if shaped_filter(f, sh, p).kind is VerdictKind.DEGENERATE:
                continue
            direct = [row.symbol for row in symbol_conditions_report(f, p, 4)]
            assert shaped_symbols(f, sh, p, 4) == direct, (f, p)
            compared += 1
    assert compared >= 100


def test_shaped_example_x4_plus_x3():
    f = parse_poly("x^4+x^3")
    sh = detect_shape(f)
    assert sh.gamma == Fraction(-3, 4)
    v = shaped_filter(f, sh, 7)
    assert v.kind in (VerdictKind.NOT_STABLE, VerdictKind.PASSES_FILTER, VerdictKind.DEGENERATE)
    direct = [r.symbol for r in symbol_conditions_report(f, 7, 4)]
    assert shaped_symbols(f, sh, 7, 4) == direct


def test_shaped_filter_disc_gate():
    rng = random.Random(23)
    hits = 0
    for _ in range(30):
        f = random_shaped_quartic(rng)
        sh = detect_shape(f)
        for p in PRIMES_500[3:40]:
            v = shaped_filter(f, sh, p)
            if v.kind is VerdictKind.DEGENERATE:
                continue
            from dynirr.poly import discriminant
            disc = discriminant(f)
            sym = legendre_euler(disc.numerator * pow(disc.denominator, -1, p), p)
            if sym != -1:
                assert v.witness == type(v.witness)(1, Reason.DISC_SQUARE)
                hits += 1
    assert hits > 0


def test_passes_filter_is_sound_for_small_depth():
    # PassesFilter never coexists with a symbol failure in the direct report
    rng = random.Random(24)
    for _ in range(15):
        f = random_shaped_quartic(rng)
        sh = detect_shape(f)
        for p in PRIMES_500[2:30]:
            v = shaped_filter(f, sh, p)
            if v.kind is VerdictKind.PASSES_FILTER:
                assert all(r.ok for r in symbol_conditions_report(f, p, 4))


# -- direct report ---------------------------------------------------------

def test_symbol_conditions_report_examples():
    rows = symbol_conditions_report(parse_poly("x^2+1"), 3, 3)
    assert [r.symbol for r in rows] == [-1, -1]
    assert [r.value for r in rows] == [32 % 3, 1280 % 3]
    assert symbol_conditions_report(parse_poly("x^2+1"), 3, 1) == []


def test_parity_dichotomy():
    assert {r.branch for r in symbol_conditions_report(parse_poly("x^4+x^3+2"), 5, 3)} == {"even"}
    assert {r.branch for r in symbol_conditions_report(parse_poly("x^3+x+1"), 5, 3)} == {"odd"}
    assert {r.branch for r in symbol_conditions_report(parse_poly("(x+2)^3-2"), 7, 3)} == {"odd"}


def test_odd_branch_necessary_condition():
    # stable cubic at p = 7: the odd-degree condition must hold at every n
    rows = symbol_conditions_report(parse_poly("(x+2)^3-2"), 7, 4)
    assert all(r.ok for r in rows)


# -- depth-capped and dispatcher ------------------------------------------

def test_depth_capped_examples():
    v = depth_capped(parse_poly("x^2+1"), 3, 4)
    assert v.kind is VerdictKind.UNKNOWN and v.depth_checked == 4
    v = depth_capped(parse_poly("x^2+1"), 5, 4)
    assert v.kind is VerdictKind.NOT_STABLE and v.witness == type(v.witness)(1, Reason.REDUCIBLE_AT)
    assert depth_capped(parse_poly("(x+2)^3-2"), 7, 4).kind is VerdictKind.UNKNOWN


def test_default_depth():
    assert default_depth(2) == 14
    assert default_depth(3) == 8
    assert default_depth(4) == 7


def test_dispatcher_examples():
    assert stability_verdict(parse_poly("x^2+1"), 3).kind is VerdictKind.STABLE
    f = parse_poly("x^4+x^3")
    for p in PRIMES_500[:25]:
        assert stability_verdict(f, p, depth=3).kind is not VerdictKind.STABLE
    g = parse_poly("x^3+x+1")
    for p in PRIMES_500[:25]:
        assert stability_verdict(g, p, depth=3).kind in (VerdictKind.UNKNOWN, VerdictKind.NOT_STABLE,
                                                          VerdictKind.DEGENERATE)


def test_dispatcher_never_stable_above_degree_two():
    rng = random.Random(25)
    for _ in range(20):
        f = random_shaped_quartic(rng)
        for p in PRIMES_500[:20]:
            assert stability_verdict(f, p, depth=3).kind is not VerdictKind.STABLE


def test_dispatcher_policies():
    f = parse_poly("x^2+1")
    assert stability_verdict(f, 3, Policy.RABIN, depth=3).kind is VerdictKind.UNKNOWN
    assert stability_verdict(f, 3, "filter").kind is VerdictKind.PASSES_FILTER
    with pytest.raises(ValueError):
        stability_verdict(parse_poly("x^3+1"), 5, "exact")
    with pytest.raises(ValueError):
        stability_verdict(parse_poly("x^3+1"), 5, "filter")


def test_degenerate_prime_routes_to_rabin():
    # p = 2 has no symbol test; x^2 + 1 = (x + 1)^2 mod 2 is refuted directly
    v = stability_verdict(parse_poly("x^2+1"), 2)
    assert v.kind is VerdictKind.NOT_STABLE and v.witness.reason is Reason.REDUCIBLE_AT
    # x^2 + x + 1 is irreducible mod 2 and stays Degenerate
    v = stability_verdict(parse_poly("x^2+x+1"), 2, depth=4)
    assert v.kind in (VerdictKind.DEGENERATE, VerdictKind.NOT_STABLE)
