"""Exact rational dynamics: valuations, heights, pre-periodicity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .poly import DEFAULT_DEGREE_GUARD, IntPoly, derivative, resultant_of_iterate


def vp(x, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def _vp_int(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def weil_height(x) -> float:
    """max(log|num|, log|den|), with h(0) = 0."""
    x = Fraction(x)
    if x == 0:
        return 0.0
    return max(math.log(abs(x.numerator)), math.log(x.denominator))


def escape_radius(f: IntPoly) -> Fraction:
    """R_f = (2 + sum_{i<d} |f_i|) / |f_d|: beyond max(1, R_f) every step at least doubles |x|."""
    d = f.degree
    return Fraction(2 + sum(abs(c) for c in f.coeffs[:d]), abs(f.lc))


@dataclass(frozen=True)
class Cycle:
    enter: int
    length: int


@dataclass(frozen=True)
class Escape:
    reason: str  # "RadiusRule" or "DenominatorRule"
    at: int
    value: Fraction
    bound: Fraction  # R_f for RadiusRule, f_d for DenominatorRule

    def recheck(self, f: IntPoly) -> bool:
        if self.reason == "RadiusRule":
            return abs(self.value) >= max(Fraction(1), self.bound)
        return f.lc % self.value.denominator != 0


def is_preperiodic(f: IntPoly, x0, max_steps: Optional[int] = None) -> Tuple[bool, object]:
    """Decide whether x0 has a finite forward orbit under f.

    Terminates: an orbit that never triggers either escape rule stays in
    |x| < max(1, R_f) with denominators dividing f_d, a finite set.
    """
    if f.degree < 2:
        raise ValueError("pre-periodicity needs deg f >= 2")
    radius = max(Fraction(1), escape_radius(f))
    fd = f.lc
    x = Fraction(x0)
    seen = {}
    i = 0
    while True:
        if x in seen:
            return True, Cycle(enter=seen[x], length=i - seen[x])
        seen[x] = i
        if abs(x) >= radius:
            return False, Escape("RadiusRule", i, x, escape_radius(f))
        # some prime q has v_q(x) < -v_q(f_d)  <=>  den(x) does not divide f_d
        if fd % x.denominator:
            return False, Escape("DenominatorRule", i, x, Fraction(fd))
        if max_steps is not None and i >= max_steps:
            raise RuntimeError("step limit reached")
        x = Fraction(f(x))
        i += 1


@dataclass(frozen=True)
class HeightReport:
    n: int
    value: Fraction
    height: float
    ratio: float


def height_growth_report(f: IntPoly, x0, n_max: int, max_digits: int = 10 ** 6) -> List[HeightReport]:
    """Heights of f^(n)(x0) and their normalization h / d^n for n = 1..n_max."""
    d = f.degree
    rows = []
    x = Fraction(x0)
    for n in range(1, n_max + 1):
        x = Fraction(f(x))
        if max(x.numerator.bit_length(), x.denominator.bit_length()) > max_digits * 3.33:
            raise ValueError("orbit value exceeds the size guard")
        h = weil_height(x)
        rows.append(HeightReport(n, x, h, h / d ** n))
    return rows


def height_constant(f: IntPoly) -> float:
    """Default C_f = log(1 + sum |f_i|)."""
    return math.log(1 + sum(abs(c) for c in f.coeffs))


def height_lower_bound_holds(f: IntPoly, x0, n: int, c_f: Optional[float] = None) -> bool:
    """Check h(f^(n)(x0)) >= d^n (h(x0) - C_f)."""
    if c_f is None:
        c_f = height_constant(f)
    x = Fraction(x0)
    for _ in range(n):
        x = Fraction(f(x))
    return weil_height(x) >= f.degree ** n * (weil_height(x0) - c_f)


@dataclass(frozen=True)
class ResultantHeightRow:
    n: int
    resultant: int
    height: float
    ratio: float


def resultant_height_report(f: IntPoly, n_max: int,
                            degree_guard: int = DEFAULT_DEGREE_GUARD) -> List[ResultantHeightRow]:
    """h(Res(f^(n), f')) and h / d^n for n = 1..n_max."""
    d = f.degree
    if d < 2:
        raise ValueError("needs a nonconstant derivative (deg f >= 2)")
    if d ** n_max > degree_guard:
        raise ValueError(f"{d}^{n_max} exceeds the degree guard")
    df = derivative(f)
    rows = []
    for n in range(1, n_max + 1):
        r = resultant_of_iterate(f, n, df)
        h = weil_height(r)
        rows.append(ResultantHeightRow(n, r, h, h / d ** n))
    return rows


def beg_log_bound(d: int, s: int, q_s: int, h_b: float, kappa: float = 1.0) -> float:
    """Natural log of (4ds)^(212 d^4 s) * Q_S^(20 d^3) * exp(kappa * h_b).

    kappa stands in for the non-effective constant and is illustrative only.
    """
    if d < 3 or s < 1:
        raise ValueError("needs d >= 3 and s >= 1")
    return 212 * d ** 4 * s * math.log(4 * d * s) + 20 * d ** 3 * math.log(q_s) + kappa * h_b
