"""Prime scans: density P_f(Q) over dyadic intervals and replication suites."""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .modp import cubic_residue
from .poly import IntPoly, detect_shape, parse_poly
from .stability import (
    Policy,
    Verdict,
    VerdictKind,
    default_depth,
    depth_capped,
    quadratic_stability,
    stability_verdict,
)

MAX_SIEVE_HI = 1 << 48
SEGMENT = 1 << 15
CHUNK = 1 << 14
VERBOSE_LIMIT = 10 ** 5

JONES_POLY = "x^2+1"
PROGRESSION_POLY = "(x-2)^2+2"
CUBIC_POLY = "(x+2)^3-2"


def _base_primes(limit: int) -> np.ndarray:
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if mark[q]:
            mark[q * q::q] = False
    return np.nonzero(mark)[0]


def primes_in(lo: int, hi: int) -> Iterator[int]:
    """Primes in [lo, hi], ascending, by a segmented sieve of Eratosthenes."""
    lo = max(lo, 2)
    if hi > MAX_SIEVE_HI:
        raise ValueError(f"upper limit {hi} exceeds 2^48")
    if hi < lo:
        return
    base = _base_primes(math.isqrt(hi))
    for seg_lo in range(lo, hi + 1, SEGMENT):
        seg_hi = min(hi, seg_lo + SEGMENT - 1)
        mark = np.ones(seg_hi - seg_lo + 1, dtype=bool)
        for q in base:
            q = int(q)
            if q * q > seg_hi:
                break
            start = max(q * q, (seg_lo + q - 1) // q * q)
            mark[start - seg_lo::q] = False
        for v in np.nonzero(mark)[0]:
            yield int(v) + seg_lo


def prime_count(lo: int, hi: int) -> int:
    return sum(1 for _ in primes_in(lo, hi))


@dataclass
class ScanReport:
    f: IntPoly
    Q: int
    policy: str
    depth: int
    counts: dict
    pf: int
    pf_label: str
    total: int
    verdicts: Optional[List[Tuple[int, Verdict]]] = None
    wall_time: float = 0.0

    def to_dict(self, timestamp: bool = True) -> dict:
        out = {
            "f": self.f.to_coeffs_str(),
            "f_text": str(self.f),
            "Q": self.Q,
            "policy": self.policy,
            "depth": self.depth,
            "total": self.total,
            "counts": {k.value: self.counts.get(k.value, 0) for k in VerdictKind},
            "P_f": self.pf,
            "P_f_label": self.pf_label,
        }
        if self.verdicts is not None:
            out["verdicts"] = [dict(p=p, **v.to_dict()) for p, v in self.verdicts]
        if timestamp:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2)


def _scan_chunk(args) -> List[Tuple[int, Verdict]]:
    f, lo, hi, policy, depth, seed = args
    shape = detect_shape(f) if f.degree % 2 == 0 else None
    return [(p, stability_verdict(f, p, policy, depth, shape=shape, seed=seed))
            for p in primes_in(lo, hi)]


def scan_density(f: IntPoly, Q: int, policy: str = "auto", depth: Optional[int] = None,
                 threads: int = 1, verbose: bool = False, seed: int = 0) -> ScanReport:
    """Apply the stability verdict to every prime in [Q, 2Q].

    Work is cut into fixed chunks of consecutive integers and merged in
    chunk order, so the report does not depend on ``threads``.
    """
    if Q < 2:
        raise ValueError("Q must be at least 2")
    if threads < 1:
        raise ValueError("threads must be positive")
    policy = Policy(policy).value
    if depth is None:
        depth = default_depth(f.degree)
    started = time.perf_counter()
    jobs = [(f, lo, min(2 * Q, lo + CHUNK - 1), policy, depth, seed)
            for lo in range(Q, 2 * Q + 1, CHUNK)]
    if threads == 1 or len(jobs) == 1:
        parts = [_scan_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_scan_chunk, jobs))
    verdicts = [pv for part in parts for pv in part]
    counts = Counter(v.kind.value for _, v in verdicts)
    exact = f.degree == 2 and policy in ("auto", "exact")
    if exact:
        pf, label = counts[VerdictKind.STABLE.value], "exact"
    else:
        pf = sum(counts[k.value] for k in (VerdictKind.STABLE, VerdictKind.PASSES_FILTER, VerdictKind.UNKNOWN))
        label = "upper proxy"
    keep = verbose or len(verdicts) <= VERBOSE_LIMIT
    return ScanReport(f, Q, policy, depth, dict(sorted(counts.items())), pf, label, len(verdicts),
                      verdicts if keep else None, time.perf_counter() - started)


SERIES_HEADER = ("Q", "primes", "stable", "ratio")


def density_series(f: IntPoly, Qs: Sequence[int], policy: str = "auto",
                   depth: Optional[int] = None, threads: int = 1) -> List[tuple]:
    """Rows (Q, prime count, P_f(Q), P_f(Q) / max(1, prime count))."""
    if list(Qs) != sorted(Qs):
        raise ValueError("Qs must be ascending")
    rows = []
    for Q in Qs:
        rep = scan_density(f, Q, policy, depth, threads)
        rows.append((Q, rep.total, rep.pf, rep.pf / max(1, rep.total)))
    return rows


# -- replication suites -------------------------------------------------------

@dataclass
class ReplicationResult:
    name: str
    checked: List[int]
    violations: List[int]
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"name": self.name, "checked": len(self.checked),
                "violations": self.violations, **self.extra}


def replicate_jones(qmax: int) -> ReplicationResult:
    """Stable primes p <= qmax for x^2 + 1 other than p = 3 (expected: none)."""
    if qmax < 3:
        raise ValueError("qmax must be at least 3")
    f = parse_poly(JONES_POLY)
    checked, stable = [], []
    for p in primes_in(3, qmax):
        checked.append(p)
        if quadratic_stability(f, p).kind is VerdictKind.STABLE:
            stable.append(p)
    return ReplicationResult("jones", checked, [p for p in stable if p != 3],
                             {"stable": stable})


def replicate_progression(qmax: int) -> ReplicationResult:
    """Primes p = 5 mod 8 up to qmax where (x-2)^2 + 2 is not Stable (expected: none)."""
    if qmax < 5:
        raise ValueError("qmax must be at least 5")
    f = parse_poly(PROGRESSION_POLY)
    checked, failures, other = [], [], []
    for p in primes_in(3, qmax):
        stable = quadratic_stability(f, p).kind is VerdictKind.STABLE
        if p % 8 == 5:
            checked.append(p)
            if not stable:
                failures.append(p)
        elif stable:
            other.append(p)
    return ReplicationResult("progression", checked, failures,
                             {"stable_outside_progression": len(other),
                              "stable_outside_progression_first": other[:20]})


def cubic_qualifies(p: int) -> bool:
    """2 is a cubic non-residue mod p and p = 4, 7 mod 9."""
    return p % 9 in (4, 7) and not cubic_residue(2, p)


def replicate_cubic(qmax: int, depth: int = 6) -> ReplicationResult:
    """Qualifying primes for (x+2)^3 - 2 that depth-capped Rabin refutes (expected: none)."""
    if qmax < 7:
        raise ValueError("qmax must be at least 7")
    f = parse_poly(CUBIC_POLY)
    checked, contradictions = [], []
    for p in primes_in(5, qmax):
        if not cubic_qualifies(p):
            continue
        checked.append(p)
        if depth_capped(f, p, depth).kind is VerdictKind.NOT_STABLE:
            contradictions.append(p)
    return ReplicationResult("cubic", checked, contradictions, {"depth": depth})
