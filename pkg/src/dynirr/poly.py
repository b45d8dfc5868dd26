"""Exact integer polynomials: parsing, iteration, resultants, shape detection.

Polynomials are dense, with coefficients stored in ascending order, so
``IntPoly((6, -4, 1))`` is ``x^2 - 4*x + 6``.  Rationals are plain
:class:`fractions.Fraction` values.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

DEFAULT_DEGREE_GUARD = 1 << 20
MAX_EXPONENT = 1 << 16

Number = Union[int, Fraction]


class PolySyntaxError(ValueError):
    """Raised when polynomial text cannot be parsed."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class DegreeGuardError(ValueError):
    """Raised when a materialized polynomial would exceed the degree guard."""


def _trim(coeffs: Iterable[int]) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Dense univariate polynomial over Z, ascending coefficients."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        return IntPoly(_mul_lists(self.coeffs, _as_poly(other).coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = IntPoly((1,))
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __call__(self, x):
        """Horner evaluation at an int, Fraction, or IntPoly."""
        if isinstance(x, IntPoly):
            return compose(self, x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPoly":
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        return IntPoly(c // g for c in self.coeffs)

    def to_coeffs_str(self) -> str:
        return "coeffs:" + ",".join(str(c) for c in (self.coeffs or (0,)))

    def __str__(self) -> str:
        return format_poly(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPoly({list(self.coeffs)})"


def _as_poly(v) -> IntPoly:
    if isinstance(v, IntPoly):
        return v
    if isinstance(v, int):
        return IntPoly((v,))
    raise TypeError(f"cannot convert {type(v).__name__} to IntPoly")


def _mul_lists(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def format_poly(coeffs: Sequence, var: str = "x") -> str:
    """Human-readable form that parses back to the same polynomial."""
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}*{mono}"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# -- parsing ---------------------------------------------------------------

class _Parser:
    # expr   := term (('+' | '-') term)*
    # term   := unary ('*' unary)*
    # unary  := ('+' | '-') unary | power
    # power  := atom ('^' INT)?
    # atom   := INT | 'x' | 'X' | '(' expr ')'

    def __init__(self, text: str, degree_guard: int):
        self.text = text
        self.pos = 0
        self.degree_guard = degree_guard

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _int_literal(self) -> int:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise PolySyntaxError("expected integer literal", start)
        return int(self.text[start:self.pos])

    def parse(self) -> IntPoly:
        result = self._expr()
        if self._peek():
            raise PolySyntaxError(f"unexpected {self._peek()!r}", self.pos)
        return result

    def _expr(self) -> IntPoly:
        acc = self._term()
        while self._peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def _term(self) -> IntPoly:
        acc = self._unary()
        while self._peek() == "*":
            self.pos += 1
            rhs = self._unary()
            if acc.degree + rhs.degree > self.degree_guard:
                raise DegreeGuardError("product exceeds degree guard")
            acc = acc * rhs
        return acc

    def _unary(self) -> IntPoly:
        ch = self._peek()
        if ch == "-":
            self.pos += 1
            return -self._unary()
        if ch == "+":
            self.pos += 1
            return self._unary()
        return self._power()

    def _power(self) -> IntPoly:
        base = self._atom()
        if self._peek() == "^":
            self.pos += 1
            if not self._peek().isdigit():
                raise PolySyntaxError("exponent must be a nonnegative integer literal", self.pos)
            epos = self.pos
            e = self._int_literal()
            if e > MAX_EXPONENT:
                raise PolySyntaxError(f"exponent {e} exceeds {MAX_EXPONENT}", epos)
            if base.degree > 0 and base.degree * e > self.degree_guard:
                raise DegreeGuardError("power exceeds degree guard")
            return base ** e
        return base

    def _atom(self) -> IntPoly:
        ch = self._peek()
        if ch.isdigit():
            return IntPoly.const(self._int_literal())
        if ch in ("x", "X"):
            self.pos += 1
            return IntPoly.x()
        if ch == "(":
            self.pos += 1
            inner = self._expr()
            if self._peek() != ")":
                raise PolySyntaxError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if not ch:
            raise PolySyntaxError("unexpected end of input", self.pos)
        raise PolySyntaxError(f"unexpected {ch!r}", self.pos)


def parse_poly(text: str, degree_guard: int = DEFAULT_DEGREE_GUARD) -> IntPoly:
    """Parse ``x^2+1``-style text or a ``coeffs:a0,a1,...`` list.

    Implicit multiplication is not accepted: write ``2*x``, not ``2x``.
    """
    stripped = text.strip()
    if stripped.startswith("coeffs:"):
        body = stripped[len("coeffs:"):]
        offset = text.index("coeffs:") + len("coeffs:")
        coeffs = []
        for part in body.split(","):
            item = part.strip()
            try:
                coeffs.append(int(item))
            except ValueError:
                raise PolySyntaxError(f"bad coefficient {item!r}", offset) from None
            offset += len(part) + 1
        return IntPoly(coeffs)
    return _Parser(text, degree_guard).parse()


# -- basic operations -------------------------------------------------------

def derivative(f: IntPoly) -> IntPoly:
    return IntPoly(i * c for i, c in enumerate(f.coeffs) if i > 0)


def compose(f: IntPoly, g: IntPoly) -> IntPoly:
    """Return f(g(x))."""
    acc = IntPoly()
    for c in reversed(f.coeffs):
        acc = acc * g + c
    return acc


def iterate(f: IntPoly, n: int, degree_guard: int = DEFAULT_DEGREE_GUARD) -> IntPoly:
    """The n-th iterate f^(n), with f^(0) = x."""
    if n < 0:
        raise ValueError("iterate count must be nonnegative")
    if f.degree > 1 and f.degree ** n > degree_guard:
        raise DegreeGuardError(f"deg f^({n}) = {f.degree}^{n} exceeds guard {degree_guard}")
    return _iterate_cached(f, n)


@functools.lru_cache(maxsize=256)
def _iterate_cached(f: IntPoly, n: int) -> IntPoly:
    if n == 0:
        return IntPoly.x()
    return compose(f, _iterate_cached(f, n - 1))


def eval_rational(f: IntPoly, x: Number) -> Fraction:
    return Fraction(f(Fraction(x)))


# -- rational polynomial helpers (lists of Fractions, ascending) ------------

def _qtrim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _qdivmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple:
    a = _qtrim([Fraction(c) for c in a])
    b = _qtrim([Fraction(c) for c in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    inv = 1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return _qtrim(q), _qtrim(a[: len(b) - 1])


def _qgcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    a = _qtrim([Fraction(c) for c in a])
    b = _qtrim([Fraction(c) for c in b])
    while b:
        a, b = b, _qdivmod(a, b)[1]
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def _to_primitive(a: Sequence[Fraction]) -> IntPoly:
    """Scale a rational polynomial to a primitive integer one, lc > 0."""
    den = 1
    for c in a:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    return IntPoly(int(Fraction(c) * den) for c in a).primitive()


# -- resultants -------------------------------------------------------------

def _pseudo_rem(a: list, b: list) -> list:
    """prem(a, b) = lc(b)^(deg a - deg b + 1) * a mod b, in Z[x]."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        dr = len(r) - 1
        c = r[-1]
        r = [lb * ri for ri in r]
        for j, bj in enumerate(b):
            r[dr - db + j] -= c * bj
        e -= 1
        while r and r[-1] == 0:
            r.pop()
    if e > 0 and r:
        s = lb ** e
        r = [s * ri for ri in r]
    return r


def resultant_int(a: IntPoly, b: IntPoly) -> int:
    """Resultant via the subresultant polynomial remainder sequence.

    Equals the Sylvester determinant of (a, b).
    """
    if a.is_zero() or b.is_zero():
        raise ValueError("resultant of the zero polynomial")
    A, B = list(a.coeffs), list(b.coeffs)
    sign = 1
    if len(A) < len(B):
        A, B = B, A
        if (len(A) - 1) * (len(B) - 1) % 2:
            sign = -1
    if len(B) == 1:
        return sign * B[0] ** (len(A) - 1)
    g = h = 1
    while True:
        da, db = len(A) - 1, len(B) - 1
        delta = da - db
        if da % 2 == 1 and db % 2 == 1:
            sign = -sign
        R = _pseudo_rem(A, B)
        if not R:
            return 0
        dr = len(R) - 1
        div = g * h ** delta
        A = B
        B = [c // div for c in R]
        g = A[-1]
        # h <- g^delta * h^(1 - delta)
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = g ** delta // h ** (delta - 1)
        if dr == 0:
            da = len(A) - 1
            # res(A, c) = c^deg A, corrected by the accumulated scaling
            c = B[0]
            return sign * _final_scale(c, da, h)


def _final_scale(c: int, da: int, h: int) -> int:
    # With B = c constant: res = h^(1 - da) * c^da
    if da == 0:
        return 1
    num = c ** da
    den = h ** (da - 1)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("non-exact subresultant division")
    return q


def sylvester_matrix(a: IntPoly, b: IntPoly) -> list:
    m, n = a.degree, b.degree
    size = m + n
    rows = []
    ra = list(reversed(a.coeffs))
    rb = list(reversed(b.coeffs))
    for i in range(n):
        rows.append([0] * i + ra + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + rb + [0] * (size - n - 1 - i))
    return rows


def discriminant(f: IntPoly) -> Fraction:
    d = f.degree
    if d < 2:
        raise ValueError("discriminant needs deg f >= 2")
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return Fraction(sign * resultant_int(f, derivative(f)), f.lc)


# -- quotient-ring iteration ------------------------------------------------

def iterate_mod_rational(f: IntPoly, n: int, m: IntPoly) -> list:
    """f^(n) mod m over Q, as an ascending list of Fractions."""
    if m.degree < 1:
        raise ValueError("modulus must be nonconstant")
    mq = [Fraction(c) for c in m.coeffs]
    r = _qdivmod([Fraction(0), Fraction(1)], mq)[1]
    for _ in range(n):
        acc: list = []
        for c in reversed(f.coeffs):
            acc = _qdivmod(_mul_lists(acc, r), mq)[1] if acc else []
            if acc:
                acc[0] += c
                acc = _qtrim(acc)
            elif c:
                acc = [Fraction(c)]
        r = acc
    return r


def _clear_denominators(r: Sequence[Fraction]) -> tuple:
    den = 1
    for c in r:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return IntPoly(int(c * den) for c in r), den


def iterate_mod(f: IntPoly, n: int, m: IntPoly) -> tuple:
    """f^(n) reduced modulo m without materializing f^(n).

    Returns ``(num, den)`` with f^(n) = num/den (mod m), num in Z[x]
    and den a positive integer (1 when the remainder is integral).
    """
    return _clear_denominators(iterate_mod_rational(f, n, m))


def resultant_of_iterate(f: IntPoly, n: int, g: Optional[IntPoly] = None) -> int:
    """Res(f^(n), g) with g = f' by default, via iterate_mod.

    Uses Res(A, B) = (-1)^(deg A deg B) lc(B)^(deg A - deg r) Res(B, r)
    where r = A mod B, so f^(n) is never expanded.
    """
    if g is None:
        g = derivative(f)
    if g.is_zero():
        raise ValueError("resultant with the zero polynomial")
    big_deg = f.degree ** n
    if g.degree == 0:
        return g.lc ** big_deg
    k = g.degree
    r = iterate_mod_rational(f, n, g)
    if not r:
        return 0
    num, den = _clear_denominators(r)
    sign = -1 if (big_deg * k) % 2 else 1
    value = sign * Fraction(g.lc) ** (big_deg - num.degree) * Fraction(resultant_int(g, num), den ** k)
    if value.denominator != 1:
        raise ArithmeticError("non-integral resultant")
    return int(value)


# -- squarefree decomposition and derivative shape -------------------------

def squarefree_decomposition(f: IntPoly) -> tuple:
    """Yun's algorithm over Q.

    Returns ``(content, [(factor, multiplicity), ...])`` with primitive,
    squarefree, pairwise coprime integer factors (positive leading
    coefficient) and integer content, so that
    ``f == content * prod(factor**mult)``.
    """
    if f.degree < 1:
        raise ValueError("squarefree decomposition needs a nonconstant polynomial")
    a = [Fraction(c) for c in f.coeffs]
    da = [Fraction(c) for c in derivative(f).coeffs]
    g = _qgcd(a, da)
    b = _qdivmod(a, g)[0]
    c = _qdivmod(da, g)[0]
    db = [Fraction(i * x) for i, x in enumerate(b)][1:]
    d = [ci - di for ci, di in _zip_longest(c, db)]
    d = _qtrim(d)
    factors = []
    i = 1
    while len(b) > 1:
        a_i = _qgcd(b, d)
        b = _qdivmod(b, a_i)[0]
        c = _qdivmod(d, a_i)[0]
        db = [Fraction(j * x) for j, x in enumerate(b)][1:]
        d = _qtrim([ci - di for ci, di in _zip_longest(c, db)])
        if len(a_i) > 1:
            factors.append((_to_primitive(a_i), i))
        i += 1
    prod = IntPoly((1,))
    for fac, mult in factors:
        prod = prod * fac ** mult
    content = f.lc // prod.lc
    return content, factors


def _zip_longest(u, v):
    n = max(len(u), len(v))
    for i in range(n):
        yield (u[i] if i < len(u) else Fraction(0), v[i] if i < len(v) else Fraction(0))


@dataclass(frozen=True)
class ShapeData:
    """f' = c * h(x)^2 * (a*x + b), with gamma = -b/a."""

    c: Fraction
    h: IntPoly
    a: int
    b: int
    gamma: Fraction

    def expand(self) -> list:
        """c * h^2 * (a x + b) as an ascending list of Fractions."""
        h2 = _mul_lists(self.h.coeffs, self.h.coeffs)
        lin = _mul_lists(h2, [self.b, self.a])
        return [self.c * x for x in lin]


def detect_shape(f: IntPoly, strict: bool = False) -> Optional[ShapeData]:
    """Detect f' = c h^2 (a x + b); None if f' has no such factorization.

    With ``strict`` the constant is absorbed into the linear factor so that
    h and (a x + b) are integral and c = 1.
    """
    if f.degree < 2:
        raise ValueError("shape detection needs deg f >= 2")
    content, factors = squarefree_decomposition(derivative(f))
    odd = [(fac, m) for fac, m in factors if m % 2 == 1]
    if len(odd) != 1 or odd[0][0].degree != 1:
        return None
    lin, lin_mult = odd[0]
    h = IntPoly((1,))
    for fac, m in factors:
        h = h * fac ** (m // 2)
    b, a = lin.coeffs
    c = Fraction(content)
    if strict:
        a, b, c = a * content, b * content, Fraction(1)
    return ShapeData(c=c, h=h, a=a, b=b, gamma=Fraction(-b, a))


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination determinant."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def sylvester_resultant(a: IntPoly, b: IntPoly) -> int:
    """Resultant as the Sylvester determinant; slow cross-check for resultant_int."""
    if a.is_zero() or b.is_zero():
        raise ValueError("resultant of the zero polynomial")
    if a.degree == 0 and b.degree == 0:
        return 1
    return bareiss_det(sylvester_matrix(a, b))
