"""Per-prime stability verdicts for integer polynomials."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from . import modp
from .modp import ModPoly, OrbitRecord, legendre_euler, orbit_mod, reduce_mod
from .poly import (
    DEFAULT_DEGREE_GUARD,
    IntPoly,
    ShapeData,
    derivative,
    detect_shape,
    discriminant,
)

DEFAULT_DEPTH_BUDGET = 1 << 14


class VerdictKind(str, enum.Enum):
    STABLE = "Stable"
    NOT_STABLE = "NotStable"
    PASSES_FILTER = "PassesFilter"
    UNKNOWN = "Unknown"
    DEGENERATE = "Degenerate"


class Reason(str, enum.Enum):
    REDUCIBLE_AT = "ReducibleAt"
    SYMBOL_NOT_MINUS_ONE = "SymbolNotMinusOne"
    SYMBOL_ZERO = "SymbolZero"
    DISC_SQUARE = "DiscSquare"


class Policy(str, enum.Enum):
    AUTO = "auto"
    EXACT = "exact"
    FILTER = "filter"
    RABIN = "rabin"


@dataclass(frozen=True)
class Witness:
    n: int
    reason: Reason


@dataclass(frozen=True)
class OrbitCertificate:
    """Symbols of f_d * f^(n)(gamma) along the tail and cycle of the orbit of gamma mod p."""

    p: int
    gamma: int
    tail_len: int
    cycle_len: int
    symbols: Tuple[int, ...]


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witness: Optional[Witness] = None
    depth_checked: int = 0
    certificate: Optional[OrbitCertificate] = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "depth_checked": self.depth_checked}
        if self.witness is not None:
            out["witness"] = {"n": self.witness.n, "reason": self.witness.reason.value}
        if self.certificate is not None:
            c = self.certificate
            out["certificate"] = {
                "p": c.p, "gamma": c.gamma, "tail_len": c.tail_len,
                "cycle_len": c.cycle_len, "symbols": list(c.symbols),
            }
        if self.note:
            out["note"] = self.note
        return out


def _degenerate(note: str) -> Verdict:
    return Verdict(VerdictKind.DEGENERATE, note=note)


def _not_stable(n: int, reason: Reason, **kw) -> Verdict:
    return Verdict(VerdictKind.NOT_STABLE, Witness(n, reason), **kw)


def default_depth(d: int, budget: int = DEFAULT_DEPTH_BUDGET) -> int:
    """Largest n with d^n <= budget (at least 1)."""
    if d < 2:
        return 1
    n = 1
    while d ** (n + 1) <= budget:
        n += 1
    return n


def _residue(x: Fraction, p: int) -> int:
    return x.numerator * pow(x.denominator, -1, p) % p


def _first_bad_index(orbit: OrbitRecord, bad: List[int], n_min: int = 2) -> Optional[int]:
    """Smallest n >= n_min whose orbit position is in ``bad``."""
    best = None
    for j in bad:
        if j < orbit.tail_len and j < n_min:
            continue
        n = orbit.first_index_at_least(j, n_min)
        if best is None or n < best:
            best = n
    return best


# -- quadratics -------------------------------------------------------------

def quadratic_stability(f: IntPoly, p: int) -> Verdict:
    """Exact decision for deg f = 2 over F_p, p odd and not dividing f_d.

    f_p is stable iff Disc(f) is a nonsquare and f_d * f^(n)(gamma) is a
    nonsquare for every n >= 2; the infinite family is closed off by the
    finite orbit of gamma mod p.
    """
    if f.degree != 2:
        raise ValueError("quadratic_stability needs deg f = 2")
    if p == 2:
        return _degenerate("p = 2 is outside the symbol criterion")
    fd = f.lc
    if fd % p == 0:
        return _degenerate("p divides the leading coefficient")
    disc = discriminant(f)
    if legendre_euler(_residue(disc, p), p) != -1:
        return _not_stable(1, Reason.DISC_SQUARE)
    fp, _ = reduce_mod(f, p)
    gamma = (-f[1]) * pow(2 * fd, -1, p) % p
    orbit = orbit_mod(fp, gamma)
    symbols = tuple(legendre_euler(fd * x, p) for x in orbit.points)
    cert = OrbitCertificate(p, gamma, orbit.tail_len, orbit.cycle_len, symbols)
    return _check_orbit_symbols(orbit, symbols, cert, stable_kind=VerdictKind.STABLE)


def _check_orbit_symbols(orbit, symbols, cert, stable_kind, zero_at=None) -> Verdict:
    relevant = orbit.recurring_after(2)
    zero = [j for j in relevant if symbols[j] == 0]
    plus = [j for j in relevant if symbols[j] == 1]
    n_zero = _first_bad_index(orbit, zero)
    if zero_at is not None and (n_zero is None or zero_at < n_zero):
        n_zero = zero_at
    n_plus = _first_bad_index(orbit, plus)
    if n_zero is not None and (n_plus is None or n_zero <= n_plus):
        return _not_stable(n_zero, Reason.SYMBOL_ZERO, certificate=cert)
    if n_plus is not None:
        return _not_stable(n_plus, Reason.SYMBOL_NOT_MINUS_ONE, certificate=cert)
    return Verdict(stable_kind, certificate=cert)


# -- shaped even-degree polynomials ----------------------------------------

def _shape_degenerate_reason(f: IntPoly, shape: ShapeData, p: int) -> Optional[str]:
    if p == 2:
        return "p = 2 is outside the symbol criterion"
    if p <= f.degree:
        return "p <= deg f"
    if f.lc % p == 0:
        return "p divides the leading coefficient"
    bad = shape.a * shape.c.denominator * shape.c.numerator * shape.h.lc
    if bad % p == 0:
        return "p divides a, the shape constant, or lc(h)"
    return None


def _h_root_orbits(fp: ModPoly, h: IntPoly, seed: int = 0) -> List[Tuple[OrbitRecord, object]]:
    """Orbit of one root per irreducible factor of h mod p, with the field's zero.

    Roots in F_p itself use plain integer arithmetic.
    """
    hp, _ = reduce_mod(h, fp.p)
    out = []
    for fld, beta in modp.iter_extension_roots(hp, seed):
        if fld.degree == 1:
            out.append((orbit_mod(fp, beta[0] if beta else 0), 0))
        else:
            out.append((orbit_mod(fp, beta, fld), ()))
    return out


def _h_root_zero_index(f: IntPoly, shape: ShapeData, p: int, seed: int = 0) -> Optional[int]:
    """Smallest n >= 2 with f^(n)(beta) = 0 for a root beta of h, in its extension field."""
    if shape.h.degree < 1:
        return None
    fp, _ = reduce_mod(f, p)
    best = None
    for orbit, zero in _h_root_orbits(fp, shape.h, seed):
        zeros = [j for j in orbit.recurring_after(2) if orbit.points[j] == zero]
        n = _first_bad_index(orbit, zeros)
        if n is not None and (best is None or n < best):
            best = n
    return best


def shaped_symbols(f: IntPoly, shape: ShapeData, p: int, n_max: int, seed: int = 0) -> List[int]:
    """Symbols of f_d^k Res(f^(n), f') for n = 2..n_max through the gamma-orbit shortcut."""
    fp, _ = reduce_mod(f, p)
    orbit = orbit_mod(fp, _residue(shape.gamma, p))
    root_orbits = _h_root_orbits(fp, shape.h, seed) if shape.h.degree >= 1 else []
    out = []
    for n in range(2, n_max + 1):
        if any(o.points[o.index_of(n)] == zero for o, zero in root_orbits):
            out.append(0)
        else:
            out.append(legendre_euler(f.lc * orbit.points[orbit.index_of(n)], p))
    return out


def shaped_filter(f: IntPoly, shape: ShapeData, p: int, seed: int = 0) -> Verdict:
    """Necessary-condition filter for shaped f of even degree >= 4.

    Since f' = c h^2 (a x + b), the symbol of f_d^k Res(f^(n), f') equals
    that of f_d * f^(n)(gamma) unless f^(n) vanishes at a root of h.
    """
    d = f.degree
    if d < 4 or d % 2:
        raise ValueError("shaped_filter needs even degree >= 4")
    why = _shape_degenerate_reason(f, shape, p)
    if why:
        return _degenerate(why)
    disc = discriminant(f)
    if legendre_euler(_residue(disc, p), p) != -1:
        return _not_stable(1, Reason.DISC_SQUARE)
    fp, _ = reduce_mod(f, p)
    gamma = _residue(shape.gamma, p)
    orbit = orbit_mod(fp, gamma)
    symbols = tuple(legendre_euler(f.lc * x, p) for x in orbit.points)
    cert = OrbitCertificate(p, gamma, orbit.tail_len, orbit.cycle_len, symbols)
    zero_at = _h_root_zero_index(f, shape, p, seed)
    return _check_orbit_symbols(orbit, symbols, cert, VerdictKind.PASSES_FILTER, zero_at)


# -- direct symbol report ---------------------------------------------------

@dataclass(frozen=True)
class SymbolRow:
    n: int
    branch: str
    value: int
    symbol: int
    ok: bool


def symbol_conditions_report(f: IntPoly, p: int, n_max: int,
                   degree_guard: int = DEFAULT_DEGREE_GUARD) -> List[SymbolRow]:
    """Direct symbols of the necessary conditions for n = 2..n_max.

    Even d: f_d^k Res(f^(n), f') must be a nonsquare.  Odd d:
    (-1)^((d-1)/2) f_d^((n-1)k+1) Res(f^(n), f') must be a square.
    Here k = deg f' mod p and f_p^(n) is materialized.
    """
    if p == 2:
        raise ValueError("symbol conditions need an odd prime")
    d = f.degree
    if d < 2:
        raise ValueError("need deg f >= 2")
    if n_max >= 2 and d ** n_max > degree_guard:
        raise ValueError(f"{d}^{n_max} exceeds the degree guard")
    fp, dropped = reduce_mod(f, p)
    if dropped:
        raise ValueError(f"degenerate prime {p}: p divides the leading coefficient")
    dfp = fp.derivative()
    if dfp.degree < 1:
        raise ValueError(f"degenerate prime {p}: derivative is constant mod p")
    k = dfp.degree
    fd = fp.lc
    rows = []
    it = fp
    for n in range(2, n_max + 1):
        it = modp.compose_mod(fp, it)
        res = modp.resultant_mod(it, dfp)
        if d % 2 == 0:
            value = pow(fd, k, p) * res % p
            sym = legendre_euler(value, p)
            rows.append(SymbolRow(n, "even", value, sym, sym == -1))
        else:
            sign = -1 if ((d - 1) // 2) % 2 else 1
            value = sign * pow(fd, (n - 1) * k + 1, p) * res % p
            sym = legendre_euler(value, p)
            rows.append(SymbolRow(n, "odd", value, sym, sym == 1))
    return rows


# -- depth-capped Rabin ------------------------------------------------------

def depth_capped(f: IntPoly, p: int, n_max: int,
                 degree_guard: int = DEFAULT_DEGREE_GUARD) -> Verdict:
    """Rabin-test f_p^(n) for n = 1..n_max."""
    fp, _ = reduce_mod(f, p)
    if fp.degree < 1:
        return _degenerate("f is constant modulo p")
    if fp.degree > 1 and fp.degree ** n_max > degree_guard:
        raise ValueError(f"{fp.degree}^{n_max} exceeds the degree guard")
    it = ModPoly(p, (0, 1))
    for n in range(1, n_max + 1):
        it = modp.compose_mod(fp, it)
        if not modp.is_irreducible(it):
            return _not_stable(n, Reason.REDUCIBLE_AT, depth_checked=n)
    return Verdict(VerdictKind.UNKNOWN, depth_checked=n_max)


# -- dispatcher -------------------------------------------------------------

def stability_verdict(f: IntPoly, p: int, policy="auto", depth: Optional[int] = None,
                      shape: Optional[ShapeData] = None, seed: int = 0) -> Verdict:
    """Combine the exact, filter and Rabin paths.

    NotStable from any path wins; Stable is only produced by the exact
    quadratic decision.  Degenerate primes fall back to Rabin and stay
    Degenerate unless Rabin refutes them.
    """
    policy = Policy(policy)
    d = f.degree
    if d < 2:
        raise ValueError("stability needs deg f >= 2")
    if depth is None:
        depth = default_depth(d)
    if shape is None and d % 2 == 0:
        shape = detect_shape(f)

    if policy is Policy.EXACT and d != 2:
        raise ValueError("exact policy only applies to quadratics")
    if policy is Policy.FILTER and (shape is None or d % 2):
        raise ValueError("filter policy needs an even-degree shaped polynomial")
    if policy is Policy.RABIN:
        return depth_capped(f, p, depth)

    if d == 2 and policy in (Policy.AUTO, Policy.EXACT):
        primary = quadratic_stability(f, p)
    elif d == 2:
        primary = _quadratic_as_filter(f, p)
    elif shape is not None and d % 2 == 0:
        primary = shaped_filter(f, shape, p, seed)
    else:
        return depth_capped(f, p, depth)

    if primary.kind is VerdictKind.DEGENERATE:
        fallback = depth_capped(f, p, depth)
        if fallback.kind is VerdictKind.NOT_STABLE:
            return fallback
        return Verdict(VerdictKind.DEGENERATE, depth_checked=fallback.depth_checked,
                       note=primary.note)
    if primary.kind in (VerdictKind.NOT_STABLE, VerdictKind.STABLE) or policy is Policy.FILTER:
        return primary
    rabin = depth_capped(f, p, depth)
    if rabin.kind is VerdictKind.NOT_STABLE:
        return rabin
    return Verdict(primary.kind, depth_checked=rabin.depth_checked,
                   certificate=primary.certificate)


def _quadratic_as_filter(f: IntPoly, p: int) -> Verdict:
    v = quadratic_stability(f, p)
    if v.kind is VerdictKind.STABLE:
        return Verdict(VerdictKind.PASSES_FILTER, certificate=v.certificate)
    return v
