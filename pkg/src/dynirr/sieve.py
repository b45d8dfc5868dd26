"""Square-sieve experiment, square products, and almost-prime character sums."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .modp import jacobi
from .poly import IntPoly, derivative, detect_shape, resultant_of_iterate
from .rational_orbit import is_preperiodic


class ZeroResultantError(ArithmeticError):
    """f^(n) and f' share a root over Q, so the resultant vanishes."""


class ParityPreconditionError(ValueError):
    """The pair does not come from one (u mod 4, nu mod 2) class, or m is even."""


@dataclass(frozen=True)
class UNuPair:
    """f_d * Res(f^(n), f') = 2^nu * u with u odd."""

    n: int
    u: int
    nu: int

    @property
    def value(self) -> int:
        return self.u << self.nu

    @property
    def label(self) -> Tuple[int, int]:
        return (self.u % 4, self.nu % 2)


def scaled_resultant(f: IntPoly, n: int) -> int:
    """f_d * Res(f^(n), f')."""
    return f.lc * resultant_of_iterate(f, n, derivative(f))


def u_nu_decompose(f: IntPoly, n: int) -> UNuPair:
    if n < 2:
        raise ValueError("decomposition is defined for n >= 2")
    value = scaled_resultant(f, n)
    if value == 0:
        raise ZeroResultantError(f"Res(f^({n}), f') = 0")
    nu = (value & -value).bit_length() - 1
    return UNuPair(n, value >> nu, nu)


def select_congruent_subset(pairs: Sequence[UNuPair]) -> Tuple[Tuple[int, int], List[UNuPair]]:
    """Largest class under (u mod 4, nu mod 2); ties go to the class of the smallest n."""
    if not pairs:
        raise ValueError("no pairs to select from")
    classes: Dict[Tuple[int, int], List[UNuPair]] = {}
    for pr in pairs:
        if pr.u % 2 == 0:
            raise ValueError(f"u_{pr.n} = {pr.u} is even")
        classes.setdefault(pr.label, []).append(pr)
    best = max(classes.items(), key=lambda kv: (len(kv[1]), -min(p.n for p in kv[1])))
    return best[0], sorted(best[1], key=lambda p: p.n)


def parity_identity_check(r: UNuPair, s: UNuPair, m: int) -> bool:
    """Sign of (-1)^(((u_r+u_s-2)/2)((m-1)/2) + (nu_r+nu_s)((m^2-1)/8)) is +1."""
    if m % 2 == 0:
        raise ParityPreconditionError("m must be odd")
    if (r.u - s.u) % 4 or (r.nu - s.nu) % 2:
        raise ParityPreconditionError(f"pairs n={r.n} and n={s.n} lie in different classes")
    e = ((r.u + s.u - 2) // 2) * ((m - 1) // 2) + (r.nu + s.nu) * ((m * m - 1) // 8)
    return e % 2 == 0


def sieve_sum_S(f: IntPoly, Q: int, indices: Iterable[int],
                values: Optional[Dict[int, int]] = None) -> int:
    """Sum over primes p in [Q, 2Q] of |sum_n (f_d Res(f^(n), f') / p)|^2."""
    from .scan import primes_in
    if Q < 3:
        raise ValueError("Q must be at least 3")
    idx = sorted(set(indices))
    if not idx:
        return 0
    if values is None:
        values = {n: scaled_resultant(f, n) for n in idx}
    vals = [values[n] for n in idx]
    total = 0
    for p in primes_in(Q, 2 * Q):
        inner = sum(jacobi(v % p, p) for v in vals)
        total += inner * inner
    return total


def suggested_window(Q: int, c1: float = 1.0, c2: float = 1.0) -> Tuple[int, int]:
    """N = max(2, floor(c1 log log Q)), t = max(2, floor(c2 log log log Q))."""
    def lg(x):
        return math.log(x) if x > 1 else 0.0
    ll = lg(lg(Q))
    lll = lg(ll)
    return max(2, int(c1 * ll)), max(2, int(c2 * lll))


@dataclass
class SieveReport:
    Q: int
    N: int
    t: int
    chosen: List[int]
    label: Tuple[int, int]
    S: int
    pf: int
    bound: Fraction
    bound_holds: bool
    pairs: List[UNuPair] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "Q": self.Q, "N": self.N, "t": self.t, "chosen": self.chosen,
            "class": {"u_mod_4": self.label[0], "nu_mod_2": self.label[1]},
            "S": self.S, "P_f": self.pf, "bound": str(self.bound),
            "bound_holds": self.bound_holds,
            "pairs": [{"n": p.n, "u": str(p.u), "nu": p.nu} for p in self.pairs],
            "notes": self.notes,
        }


def verify_pf_bound(f: IntPoly, Q: int, N: int, t: int, policy: str = "auto",
                    depth: Optional[int] = None, threads: int = 1) -> SieveReport:
    """Run the whole square-sieve pipeline on [N, N+t] and compare P_f(Q) with 16 S / t^2."""
    from .scan import scan_density
    if t < 1:
        raise ValueError("t must be positive")
    notes = []
    if f.degree % 2 == 0:
        shape = detect_shape(f)
        if shape is None:
            notes.append("f' is not of the form c h^2 (a x + b)")
        elif is_preperiodic(f, shape.gamma)[0]:
            notes.append(f"gamma = {shape.gamma} is pre-periodic: the density hypothesis fails")
    else:
        notes.append("odd degree: the square-sieve argument assumes even degree")
    pairs = [u_nu_decompose(f, n) for n in range(N, N + t + 1)]
    label, chosen = select_congruent_subset(pairs)
    values = {pr.n: pr.value for pr in pairs}
    S = sieve_sum_S(f, Q, [pr.n for pr in chosen], values)
    report = scan_density(f, Q, policy=policy, depth=depth, threads=threads)
    bound = Fraction(16 * S, t * t)
    return SieveReport(Q, N, t, [pr.n for pr in chosen], label, S, report.pf,
                       bound, report.pf <= bound, pairs, notes)


@dataclass(frozen=True)
class SquareScan:
    diagonal: List[Tuple[int, int]]
    off_diagonal: List[Tuple[int, int]]


def _is_square(v: int) -> bool:
    return v >= 0 and math.isqrt(v) ** 2 == v


def square_product_scan(f: IntPoly, N: int, t: int) -> SquareScan:
    """Pairs n1 <= n2 in [N, N+t] with u_{n1} u_{n2} a perfect square."""
    pairs = [u_nu_decompose(f, n) for n in range(N, N + t + 1)]
    diag, off = [], []
    for i, a in enumerate(pairs):
        for b in pairs[i:]:
            if _is_square(a.u * b.u):
                (diag if a.n == b.n else off).append((a.n, b.n))
    return SquareScan(diag, off)


# -- eta and almost primes ----------------------------------------------------

@dataclass(frozen=True)
class EtaSolution:
    t: float
    eta: float
    residual: float

    @property
    def asymptotic(self) -> Optional[float]:
        """Leading-order prediction (log t)^-2, defined for t > e."""
        return math.log(self.t) ** -2 if self.t > math.e else None

    @property
    def log_exponent(self) -> Optional[float]:
        """e with eta = (log t)^e; tends to -2 as t grows."""
        return math.log(self.eta) / math.log(math.log(self.t)) if self.t > math.e else None


def eta_for_t(t: float, tol: float = 1e-12) -> EtaSolution:
    """Solve eta^(eta^(-1/2) / 4) = 1/t for eta in (0, 1) by bisection."""
    if t <= 1:
        raise ValueError("t must exceed 1")
    target = -math.log(t)

    def phi(eta):
        return math.log(eta) / (4.0 * math.sqrt(eta))

    # phi increases on (0, 1) from -inf to 0; bisect in log-space for tiny roots
    lo, hi = -745.0, 0.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if phi(math.exp(mid)) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    eta = math.exp(0.5 * (lo + hi))
    residual = abs(eta ** (eta ** -0.5 / 4) - 1 / t)
    if residual >= tol:
        raise ArithmeticError(f"bisection residual {residual} above {tol}")
    return EtaSolution(t, eta, residual)


def smallest_factor_bound(eta: float, M: int) -> int:
    """Largest integer B with B <= M^eta."""
    b = int(M ** eta)
    eps = 1e-12
    while (b + 1) > 0 and math.log(b + 1) <= eta * math.log(M) + eps:
        b += 1
    while b > 0 and math.log(b) > eta * math.log(M) + eps:
        b -= 1
    return b


def _small_primes(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if mark[q]:
            mark[q * q::q] = False
    return np.nonzero(mark)[0]


def almost_primes(eta: float, M: int, segment: int = 1 << 16) -> List[int]:
    """Integers 1 <= m <= M with no prime divisor <= M^eta (1 included)."""
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    if M < 2:
        raise ValueError("M must be at least 2")
    B = smallest_factor_bound(eta, M)
    primes = _small_primes(B)
    out: List[int] = []
    for lo in range(1, M + 1, segment):
        hi = min(M, lo + segment - 1)
        keep = np.ones(hi - lo + 1, dtype=bool)
        for q in primes:
            q = int(q)
            start = ((lo + q - 1) // q) * q
            keep[start - lo::q] = False
        out.extend(int(v) for v in np.nonzero(keep)[0] + lo)
    return out


def is_perfect_square(q: int) -> bool:
    return _is_square(q)


@dataclass(frozen=True)
class CharSum:
    q: int
    total: int
    count: int
    q_is_square: bool


def charsum_almost_primes(q: int, eta: float, M: int) -> CharSum:
    """Exact sum of (m/q) over m in P(eta, M)."""
    if q < 3 or q % 2 == 0:
        raise ValueError("q must be odd and at least 3")
    ms = almost_primes(eta, M)
    return CharSum(q, sum(jacobi(m, q) for m in ms), len(ms), is_perfect_square(q))


def charsum_primes(q: int, M: int) -> Tuple[int, float]:
    """Exact sum of (p/q) over primes p <= M, and the reference M^(1/2) log(qM)."""
    from .scan import primes_in
    if q < 3 or q % 2 == 0:
        raise ValueError("q must be odd and at least 3")
    total = sum(jacobi(p, q) for p in primes_in(2, M)) if M >= 2 else 0
    return total, math.sqrt(M) * math.log(q * M)
