"""Arithmetic over F_p and small extensions F_p[x]/(m).

Polynomials over F_p are :class:`ModPoly` values holding ascending residue
tuples.  Large products go through Kronecker substitution on Python ints;
Rabin's test for high degrees builds the Frobenius matrix with numpy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .poly import IntPoly

MAX_PRIME_BITS = 62
_KRONECKER_MIN = 48


# -- primes and symbols -----------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    if p.bit_length() > MAX_PRIME_BITS:
        raise ValueError(f"prime {p} exceeds {MAX_PRIME_BITS} bits")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def jacobi(m: int, n: int) -> int:
    """Jacobi symbol (m/n) for odd n >= 3, by binary reciprocity."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd n >= 3, got {n}")
    m %= n
    result = 1
    while m:
        while m % 2 == 0:
            m //= 2
            if n % 8 in (3, 5):
                result = -result
        m, n = n, m
        if m % 4 == 3 and n % 4 == 3:
            result = -result
        m %= n
    return result if n == 1 else 0


def legendre_euler(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    if p == 2:
        raise ValueError("Euler's criterion needs an odd prime")
    t = pow(a % p, (p - 1) // 2, p)
    if t == 0:
        return 0
    return 1 if t == 1 else -1


def cubic_residue(a: int, p: int) -> bool:
    """True iff a is a cube modulo p (p not dividing a)."""
    if a % p == 0:
        raise ValueError("cubic residuosity undefined when p | a")
    if p % 3 != 1:
        return True
    return pow(a, (p - 1) // 3, p) == 1


# -- polynomials over F_p ---------------------------------------------------

def _trim(c: List[int]) -> List[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _kronecker_mul(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    n = min(len(a), len(b))
    width = 2 * (p - 1).bit_length() + n.bit_length() + 1
    width = (width + 7) // 8 * 8
    nbytes = width // 8
    A = int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in a), "little")
    B = int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in b), "little")
    out_len = len(a) + len(b) - 1
    raw = (A * B).to_bytes(out_len * nbytes, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") % p for i in range(out_len)]


def _mul(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    if min(len(a), len(b)) >= _KRONECKER_MIN:
        return _trim(_kronecker_mul(a, b, p))
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim([c % p for c in out])


def _divmod(a: Sequence[int], b: Sequence[int], p: int) -> Tuple[List[int], List[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    if len(r) <= db:
        return [], _trim(r)
    inv = pow(b[-1], -1, p)
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] * inv % p
        if c:
            q[i - db] = c
            base = i - db
            for j in range(db):
                r[base + j] = (r[base + j] - c * b[j]) % p
        r[i] = 0
    return _trim(q), _trim(r[:db])


class _Reducer:
    """Fast remainder modulo a fixed polynomial via a reversed-inverse series."""

    def __init__(self, m: Sequence[int], p: int):
        self.m = list(m)
        self.p = p
        self.n = len(m) - 1
        rev = self.m[::-1]
        # inverse of rev(m) modulo x^n by Newton iteration
        inv = [pow(rev[0], -1, p)]
        prec = 1
        while prec < self.n:
            prec = min(2 * prec, self.n)
            t = _mul(rev[:prec], inv, p)[:prec]
            t = [(-c) % p for c in t] + [0] * (prec - len(t))
            t[0] = (t[0] + 2) % p
            inv = _mul(inv, t, p)[:prec]
        self.inv = inv

    def rem(self, a: Sequence[int]) -> List[int]:
        n, p = self.n, self.p
        if len(a) <= n:
            return list(a)
        k = len(a) - n
        if k > n:
            return _divmod(a, self.m, p)[1]
        q_rev = _mul(list(a[::-1][:k]), self.inv[:k], p)[:k]
        q = (q_rev + [0] * (k - len(q_rev)))[::-1]
        qm = _mul(q, self.m, p)
        low = [(a[i] - (qm[i] if i < len(qm) else 0)) % p for i in range(n)]
        return _trim(low)


def _gcd(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _divmod(a, b, p)[1]
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _powmod(base: Sequence[int], e: int, m: Sequence[int], p: int) -> List[int]:
    red = _Reducer(m, p)
    result = [1] if len(m) > 1 else []
    b = red.rem(_divmod(base, m, p)[1] if len(base) >= len(m) else list(base))
    while e:
        if e & 1:
            result = red.rem(_mul(result, b, p))
        e >>= 1
        if e:
            b = red.rem(_mul(b, b, p))
    return result


def _check_same_field(a: "ModPoly", b: "ModPoly"):
    if a.p != b.p:
        raise ValueError(f"mismatched characteristics {a.p} and {b.p}")


@dataclass(frozen=True)
class ModPoly:
    """Polynomial over F_p with ascending coefficients in [0, p)."""

    p: int
    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_trim([int(c) % self.p for c in self.coeffs])))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def monic(self) -> "ModPoly":
        inv = pow(self.lc, -1, self.p)
        return ModPoly(self.p, [c * inv for c in self.coeffs])

    def __add__(self, other: "ModPoly") -> "ModPoly":
        _check_same_field(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        return ModPoly(self.p, [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self) -> "ModPoly":
        return ModPoly(self.p, [-c for c in self.coeffs])

    def __sub__(self, other: "ModPoly") -> "ModPoly":
        return self + (-other)

    def __mul__(self, other: "ModPoly") -> "ModPoly":
        _check_same_field(self, other)
        return ModPoly(self.p, _mul(self.coeffs, other.coeffs, self.p))

    def __divmod__(self, other: "ModPoly"):
        _check_same_field(self, other)
        q, r = _divmod(self.coeffs, other.coeffs, self.p)
        return ModPoly(self.p, q), ModPoly(self.p, r)

    def __mod__(self, other: "ModPoly") -> "ModPoly":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "ModPoly") -> "ModPoly":
        return divmod(self, other)[0]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def derivative(self) -> "ModPoly":
        return ModPoly(self.p, [i * c for i, c in enumerate(self.coeffs)][1:])

    def __str__(self) -> str:
        from .poly import format_poly
        return f"{format_poly(self.coeffs)} over F_{self.p}"


def reduce_mod(f: IntPoly, p: int) -> Tuple[ModPoly, bool]:
    """Reduce f modulo p; the flag is True when p divides the leading coefficient."""
    fp = ModPoly(p, f.coeffs)
    return fp, fp.degree < f.degree


def rem(a: ModPoly, m: ModPoly) -> ModPoly:
    if m.degree < 1:
        raise ValueError("modulus must be nonconstant")
    return a % m


def gcd(a: ModPoly, b: ModPoly) -> ModPoly:
    """Monic gcd (zero if both inputs are zero)."""
    _check_same_field(a, b)
    return ModPoly(a.p, _gcd(a.coeffs, b.coeffs, a.p))


def powmod(base: ModPoly, e: int, m: ModPoly) -> ModPoly:
    _check_same_field(base, m)
    if m.degree < 1:
        raise ValueError("modulus must be nonconstant")
    if e < 0:
        raise ValueError("negative exponent")
    return ModPoly(m.p, _powmod(base.coeffs, e, m.coeffs, m.p))


def compose_mod(f: ModPoly, g: ModPoly) -> ModPoly:
    """f(g(x)) over F_p."""
    _check_same_field(f, g)
    p = f.p
    acc: List[int] = []
    for c in reversed(f.coeffs):
        acc = _mul(acc, g.coeffs, p)
        if acc:
            acc[0] = (acc[0] + c) % p
            acc = _trim(acc)
        elif c:
            acc = [c]
    return ModPoly(p, acc)


def iterate_modp(f: ModPoly, n: int) -> ModPoly:
    g = ModPoly(f.p, (0, 1))
    for _ in range(n):
        g = compose_mod(f, g)
    return g


def resultant_mod(a: ModPoly, b: ModPoly) -> int:
    """Res(a, b) in F_p by the Euclidean algorithm."""
    _check_same_field(a, b)
    if a.is_zero() or b.is_zero():
        raise ValueError("resultant of the zero polynomial")
    p = a.p
    A, B = list(a.coeffs), list(b.coeffs)
    res = 1
    while True:
        da, db = len(A) - 1, len(B) - 1
        if db == 0:
            return res * pow(B[0], da, p) % p
        if da == 0:
            return res * pow(A[0], db, p) % p
        # Res(A, B) = (-1)^(da db) Res(B, A) = (-1)^(da db) lc(B)^(da - dr) Res(B, R)
        R = _divmod(A, B, p)[1]
        if not R:
            return 0
        dr = len(R) - 1
        if (da * db) % 2:
            res = -res
        res = res * pow(B[-1], da - dr, p) % p
        A, B = B, R


# -- irreducibility -----------------------------------------------------------

def _small_prime_factors(n: int) -> List[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


class _Frobenius:
    """Iterates x -> x^p modulo a fixed polynomial of degree n."""

    def __init__(self, f: Sequence[int], p: int):
        self.f = list(f)
        self.p = p
        self.n = len(f) - 1
        n = self.n
        xp = _powmod([0, 1], p, self.f, p)
        self.xp = xp + [0] * (n - len(xp))
        self.matrix = None
        if n >= 16 and n * (p - 1) ** 2 < 2 ** 53:
            self.matrix = self._build_matrix()
        else:
            self.reducer = _Reducer(self.f, p)

    def _build_matrix(self) -> np.ndarray:
        n, p = self.n, self.p
        monic_inv = pow(self.f[-1], -1, p)
        tail = np.array([c * monic_inv % p for c in self.f[:-1]], dtype=np.int64)
        # rows of the "multiply by x^p mod f" map: x^j * x^p mod f
        mult = np.zeros((n, n), dtype=np.int64)
        row = np.array(self.xp, dtype=np.int64)
        for j in range(n):
            mult[j] = row
            top = row[-1]
            row = np.roll(row, 1)
            row[0] = 0
            row = (row - top * tail) % p
        mult_f = mult.astype(np.float64)
        # Frobenius matrix: row i = x^(i p) mod f
        frob = np.zeros((n, n), dtype=np.float64)
        cur = np.zeros(n, dtype=np.float64)
        cur[0] = 1.0
        for i in range(n):
            frob[i] = cur
            cur = np.fmod(cur @ mult_f, p)
        return frob

    def apply(self, g: List[int]) -> List[int]:
        """g(x)^p mod f, for g of degree < n."""
        if self.matrix is not None:
            v = np.zeros(self.n, dtype=np.float64)
            v[: len(g)] = g
            out = np.fmod(v @ self.matrix, self.p).astype(np.int64)
            return _trim([int(c) for c in out])
        return _compose_mod(g, self.xp, self.reducer, self.p)


def _compose_mod(g: Sequence[int], h: Sequence[int], red: _Reducer, p: int) -> List[int]:
    acc: List[int] = []
    for c in reversed(g):
        acc = red.rem(_mul(acc, h, p)) if acc else []
        if acc:
            acc[0] = (acc[0] + c) % p
            acc = _trim(acc)
        elif c:
            acc = [c]
    return acc


def is_irreducible(f: ModPoly) -> bool:
    """Rabin's irreducibility test."""
    n = f.degree
    if n < 1:
        raise ValueError("irreducibility needs deg f >= 1")
    if n == 1:
        return True
    p = f.p
    fc = list(f.monic().coeffs)
    if fc[0] == 0:
        return False
    frob = _Frobenius(fc, p)
    needed = {n // q for q in _small_prime_factors(n)}
    x = [0, 1]
    cur = x
    for k in range(1, n + 1):
        cur = frob.apply(cur) if k > 1 else list(frob.xp)
        cur = _trim(list(cur))
        if k in needed:
            diff = list(cur) + [0] * max(0, 2 - len(cur))
            diff[1] = (diff[1] - 1) % p
            if len(_gcd(fc, _trim(diff), p)) > 1:
                return False
    return _trim(list(cur)) == x


# -- extension fields and orbits ---------------------------------------------

@dataclass(frozen=True)
class ExtField:
    """F_p[x]/(modulus) for an irreducible modulus; elements are residue tuples."""

    p: int
    modulus: ModPoly

    def __post_init__(self):
        if self.modulus.degree < 1 or not is_irreducible(self.modulus):
            raise ValueError("extension modulus must be irreducible")

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def element(self, coeffs: Sequence[int]) -> tuple:
        r = _divmod([c % self.p for c in coeffs], list(self.modulus.coeffs), self.p)[1]
        return tuple(r)

    def generator(self) -> tuple:
        """The class of x, a root of the modulus."""
        return self.element([0, 1])

    def add(self, a: tuple, b: tuple) -> tuple:
        n = max(len(a), len(b))
        return tuple(_trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % self.p
                            for i in range(n)]))

    def mul(self, a: tuple, b: tuple) -> tuple:
        return tuple(_divmod(_mul(a, b, self.p), list(self.modulus.coeffs), self.p)[1])

    def evaluate(self, f: ModPoly, x: tuple) -> tuple:
        acc: tuple = ()
        for c in reversed(f.coeffs):
            acc = self.add(self.mul(acc, x), (c,))
        return acc


@dataclass(frozen=True)
class OrbitRecord:
    """Orbit x0, f(x0), ... split into a tail of length rho and a cycle of length lam."""

    points: tuple
    tail_len: int
    cycle_len: int

    def index_of(self, n: int) -> int:
        """Position in ``points`` holding f^(n)(x0)."""
        if n < len(self.points):
            return n
        return self.tail_len + (n - self.tail_len) % self.cycle_len

    def first_index_at_least(self, j: int, n_min: int) -> int:
        """Smallest n >= n_min with f^(n)(x0) = points[j]."""
        if j >= n_min:
            return j
        if j < self.tail_len:
            raise ValueError("tail point never recurs")
        steps = -(-(n_min - j) // self.cycle_len)
        return j + steps * self.cycle_len

    def recurring_after(self, n_min: int) -> List[int]:
        """Indices j of points that equal f^(n)(x0) for some n >= n_min."""
        return sorted(set(range(min(n_min, len(self.points)), len(self.points)))
                      | set(range(self.tail_len, len(self.points))))


def orbit_mod(f: ModPoly, x0, field: Optional[ExtField] = None) -> OrbitRecord:
    """Brent cycle detection for x -> f(x) over F_p or an extension field."""
    if field is None:
        step = f
        x0 = x0 % f.p
    else:
        def step(x):
            return field.evaluate(f, x)
    # Brent: find cycle length lam
    power = lam = 1
    tortoise = x0
    hare = step(x0)
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(hare)
        lam += 1
    # tail length rho
    tortoise = hare = x0
    for _ in range(lam):
        hare = step(hare)
    rho = 0
    while tortoise != hare:
        tortoise = step(tortoise)
        hare = step(hare)
        rho += 1
    points = [x0]
    for _ in range(rho + lam - 1):
        points.append(step(points[-1]))
    return OrbitRecord(tuple(points), rho, lam)


# -- factorization ----------------------------------------------------------

def _pth_root(a: List[int], p: int) -> List[int]:
    # a is a polynomial in x^p; over F_p the coefficients are their own p-th roots
    return [a[i] for i in range(0, len(a), p)]


def _squarefree_split(f: List[int], p: int) -> List[Tuple[List[int], int]]:
    """Squarefree factorization of a monic polynomial over F_p."""
    out: List[Tuple[List[int], int]] = []
    df = _trim([i * c % p for i, c in enumerate(f)][1:])
    if not df:
        for g, m in _squarefree_split(_pth_root(f, p), p):
            out.append((g, m * p))
        return out
    c = _gcd(f, df, p)
    w = _divmod(f, c, p)[0]
    i = 1
    while len(w) > 1:
        y = _gcd(w, c, p)
        fac = _divmod(w, y, p)[0]
        if len(fac) > 1:
            out.append((fac, i))
        w = y
        c = _divmod(c, y, p)[0]
        i += 1
    if len(c) > 1:
        for g, m in _squarefree_split(_pth_root(c, p), p):
            out.append((g, m * p))
    return out


def _distinct_degree(f: List[int], p: int) -> List[Tuple[List[int], int]]:
    out = []
    i = 1
    h = [0, 1]
    rest = list(f)
    while len(rest) - 1 >= 2 * i:
        h = _powmod(h, p, rest, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _gcd(rest, _trim(diff), p)
        if len(g) > 1:
            out.append((g, i))
            rest = _divmod(rest, g, p)[0]
            h = _divmod(h, rest, p)[1]
        i += 1
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree(f: List[int], d: int, p: int, rng: random.Random) -> List[List[int]]:
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            t, cur = list(a), list(a)
            for _ in range(d - 1):
                cur = _powmod(cur, 2, f, p)
                t = _trim([((t[i] if i < len(t) else 0) + (cur[i] if i < len(cur) else 0)) % 2
                           for i in range(max(len(t), len(cur)))])
            b = t
        else:
            b = _powmod(a, (p ** d - 1) // 2, f, p)
            b = list(b) + [0] * max(0, 1 - len(b))
            b[0] = (b[0] - 1) % p
            b = _trim(b)
        g = _gcd(f, b, p)
        if 1 < len(g) < len(f):
            return (_equal_degree(g, d, p, rng)
                    + _equal_degree(_divmod(f, g, p)[0], d, p, rng))


def factor_small(f: ModPoly, seed: int = 0) -> List[Tuple[ModPoly, int]]:
    """Factor into monic irreducibles with multiplicities (deg f <= 64).

    Cantor-Zassenhaus splitting draws from ``random.Random(seed)``.
    """
    if f.degree > 64:
        raise ValueError("factor_small is limited to degree 64")
    if f.degree < 1:
        return []
    p = f.p
    rng = random.Random(seed)
    out = []
    for sf, mult in _squarefree_split(list(f.monic().coeffs), p):
        for block, d in _distinct_degree(sf, p):
            for g in _equal_degree(block, d, p, rng):
                out.append((ModPoly(p, g), mult))
    out.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs, fm[1]))
    return out


def roots_mod(f: ModPoly) -> List[int]:
    return sorted((-g.coeffs[0]) % f.p for g, _ in factor_small(f) if g.degree == 1)


def iter_extension_roots(h: ModPoly, seed: int = 0) -> Iterator[Tuple[ExtField, tuple]]:
    """One root per irreducible factor of h, inside the matching extension field."""
    for g, _ in factor_small(h, seed):
        field = ExtField(h.p, g)
        yield field, field.generator()
