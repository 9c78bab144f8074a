"""Independent finite-field verification of decompositions.

Everything here deliberately avoids the engine's own machinery: solution
sets are enumerated point by point over F_p grids with numpy power
tables, simplicity is checked by specializing fibers and running dense
univariate gcds mod p, and the resultant oracle is a Bareiss determinant
of the literal Sylvester matrix.  Exact characteristic-zero statements
specialize correctly modulo all but finitely many primes, so agreement
on several usable primes is strong evidence, not proof; the report says
which primes were used and never passes silently when all primes fail.

Large grids are subsampled per axis (deterministically, from the seed),
and every verdict is exact over the enumerated grid.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algebraic import Decomposition, SimpleSystem
from .poly import ContractViolation, Poly, Relation, divexact

DEFAULT_PRIMES = (101, 1009, 10007)
HAND_PRIMES = (7, 11, 13)

GRID_LIMIT = 2_000_000


class BadPrime(Exception):
    """A coefficient denominator vanishes mod p; skip this prime."""


@dataclass(frozen=True)
class FpPoint:
    """A grid point: prime plus residues aligned with the ranking's variables."""

    p: int
    values: Tuple[int, ...]

    def as_dict(self, ranking) -> Dict[str, int]:
        return {ranking.var_text(k): v
                for k, v in zip(_var_keys(ranking), self.values)}


def _var_keys(ranking) -> Tuple[int, ...]:
    return tuple(range(len(ranking.names)))


def _coeff_mod(c: Fraction, p: int) -> int:
    den = c.denominator % p
    if den == 0:
        raise BadPrime(f"denominator {c.denominator} vanishes mod {p}")
    return c.numerator % p * pow(den, -1, p) % p


def _axes(n: int, p: int, seed: int = 0) -> List[np.ndarray]:
    """Per-variable residue samples; the full 0..p-1 axis when the grid fits."""
    if p ** n <= GRID_LIMIT:
        return [np.arange(p, dtype=np.int64) for _ in range(n)]
    per_axis = max(2, int(GRID_LIMIT ** (1.0 / n)))
    axes = []
    for i in range(n):
        rng = random.Random(f"axes:{seed}:{p}:{i}")
        axes.append(np.array(sorted(rng.sample(range(p), min(per_axis, p))),
                             dtype=np.int64))
    return axes


def _eval_grid(poly: Poly, axes: Sequence[np.ndarray], p: int) -> np.ndarray:
    """poly mod p on the cartesian grid of the axes, shape = axis lengths."""
    n = len(axes)
    shape = tuple(len(a) for a in axes)
    power: Dict[Tuple[int, int], np.ndarray] = {}

    def axis_power(i: int, e: int) -> np.ndarray:
        got = power.get((i, e))
        if got is None:
            got = np.ones(len(axes[i]), dtype=np.int64)
            base = axes[i] % p
            k = e
            while k:
                got = got * base % p
                k -= 1
            view = [1] * n
            view[i] = len(axes[i])
            got = got.reshape(view)
            power[(i, e)] = got
        return got

    # every factor is < p, so terms stay < p after each mod and the sum
    # over all monomials fits in int64 without intermediate reductions
    acc = np.zeros(shape, dtype=np.int64)
    for mono, c in poly.terms.items():
        term = np.int64(_coeff_mod(c, p))
        for k, e in mono:
            term = term * axis_power(k, e) % p
        acc += term
    return acc % p


def _relation_mask(rel: Relation, axes, p, cache=None) -> np.ndarray:
    key = (rel.poly.key, rel.is_eq)
    if cache is not None and key in cache:
        return cache[key]
    vals = _eval_grid(rel.poly, axes, p)
    mask = (vals == 0) if rel.is_eq else (vals != 0)
    if cache is not None:
        cache[key] = mask
    return mask


def _system_mask(rels: Iterable[Relation], axes, p, shape,
                 cache=None) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    for rel in rels:
        mask &= _relation_mask(rel, axes, p, cache)
    return mask


def _point_of(index: Tuple[int, ...], axes, p: int) -> FpPoint:
    return FpPoint(p, tuple(int(axes[i][j]) for i, j in enumerate(index)))


def enumerate_solutions(relations: Sequence[Relation], ranking,
                        p: int) -> set:
    """All grid points of F_p^n satisfying every relation.

    Raises BadPrime when a coefficient cannot be specialized mod p.
    """
    n = len(ranking.names)
    axes = _axes(n, p)
    shape = tuple(len(a) for a in axes)
    mask = _system_mask(relations, axes, p, shape)
    return {_point_of(tuple(ix), axes, p) for ix in np.argwhere(mask)}


# -- simplicity sampling -------------------------------------------------------


def _fp_normalize(cs: List[int], p: int) -> List[int]:
    while cs and cs[-1] % p == 0:
        cs.pop()
    return [c % p for c in cs]


def _fp_deriv(cs: List[int], p: int) -> List[int]:
    return _fp_normalize([c * e for e, c in enumerate(cs)][1:], p)


def _fp_gcd_degree(a: List[int], b: List[int], p: int) -> int:
    """Degree of gcd of two dense F_p[x] polynomials (euclidean remainders)."""
    a, b = _fp_normalize(list(a), p), _fp_normalize(list(b), p)
    while b:
        inv = pow(b[-1], -1, p)
        while len(a) >= len(b):
            if not a:
                break
            f = a[-1] * inv % p
            off = len(a) - len(b)
            for i, c in enumerate(b):
                a[off + i] = (a[off + i] - f * c) % p
            a = _fp_normalize(a, p)
        a, b = b, a
    return len(a) - 1 if a else -1


def _specialize(poly: Poly, x, point: Dict, p: int) -> List[int]:
    """Dense coefficient list of poly in x at an F_p point of the lower variables."""
    out = [0] * (poly.degree_in(x) + 1)
    for mono, c in poly.terms.items():
        val = _coeff_mod(c, p)
        deg = 0
        for k, e in mono:
            if k == x:
                deg = e
            else:
                val = val * pow(point[k] % p, e, p) % p
        out[deg] = (out[deg] + val) % p
    return out


@dataclass
class RelationCheck:
    leader: str
    samples: int
    ok: bool
    failure: Optional[Dict[str, int]] = None
    reason: Optional[str] = None

    def to_dict(self):
        out = {"leader": self.leader, "samples": self.samples, "ok": self.ok}
        if not self.ok:
            out["failure"] = self.failure
            out["reason"] = self.reason
        return out


@dataclass
class SimpleReport:
    p: int
    ok: bool
    checks: Tuple[RelationCheck, ...]

    def to_dict(self):
        return {"prime": self.p, "ok": self.ok,
                "checks": [c.to_dict() for c in self.checks]}


def check_simple(system: SimpleSystem, p: int, samples: int = 20,
                 seed: int = 0, cache=None) -> SimpleReport:
    """Sample fibers of each relation and test the simplicity conditions.

    For each relation with leader x and each sampled solution of the
    relations below x: the initial must not vanish (the degree in x is
    preserved), and the specialized univariate must be square-free; for
    equations the count of distinct roots in the closure then equals the
    main degree, which is checked as deg minus gcd-with-derivative degree.
    cache, when given, memoizes relation masks across calls that share a
    prime and seed.
    """
    ranking = system.ranking
    n = len(ranking.names)
    axes = _axes(n, p, seed)
    shape = tuple(len(a) for a in axes)
    checks = []
    ok = True
    rels = sorted(system.relations, key=lambda r: r.sort_key())
    for idx, rel in enumerate(rels):
        x = rel.poly.leader
        lower = [r for r in rels if r.poly.leader < x]
        mask = _system_mask(lower, axes, p, shape, cache)
        hits = np.argwhere(mask)
        rng = random.Random(f"fiber:{seed}:{p}:{idx}")
        if len(hits) > samples:
            rows = sorted(rng.sample(range(len(hits)), samples))
            hits = hits[rows]
        failure = reason = None
        for ix in hits:
            point = {k: int(axes[k][j]) for k, j in enumerate(ix)}
            cs = _specialize(rel.poly, x, point, p)
            want = rel.poly.mdeg
            if len(cs) - 1 != want or cs[-1] % p == 0 or _fp_normalize(
                    list(cs), p) == []:
                failure, reason = point, "initial vanished"
                break
            dcs = _fp_deriv(cs, p)
            g = _fp_gcd_degree(cs, dcs, p)
            if g != 0:
                failure, reason = point, "fiber not square-free"
                break
            if rel.is_eq and (len(cs) - 1) - max(g, 0) != want:
                failure, reason = point, "distinct root count below mdeg"
                break
        good = failure is None
        ok &= good
        checks.append(RelationCheck(
            leader=ranking.var_text(x), samples=len(hits), ok=good,
            failure=None if good else {ranking.var_text(k): v
                                       for k, v in failure.items()},
            reason=reason))
    return SimpleReport(p=p, ok=ok, checks=tuple(checks))


# -- decomposition checking ----------------------------------------------------


@dataclass
class PrimeReport:
    p: int
    input_points: int
    system_points: Tuple[int, ...]
    union_equal: bool
    disjoint: bool
    counterexample: Optional[Dict[str, int]] = None
    simple: Optional[Tuple[SimpleReport, ...]] = None

    @property
    def ok(self) -> bool:
        return (self.union_equal and self.disjoint
                and (self.simple is None or all(s.ok for s in self.simple)))

    def to_dict(self):
        out = {"prime": self.p, "input_points": self.input_points,
               "system_points": list(self.system_points),
               "union_equal": self.union_equal, "disjoint": self.disjoint}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.simple is not None:
            out["simple"] = [s.to_dict() for s in self.simple]
        return out


@dataclass
class VerifyReport:
    """Aggregated verdict: pass | fail | inconclusive.

    Union-equality and disjointness are exact over each enumerated grid,
    so a failure at any usable prime is conclusive.  Simplicity sampling
    tests a characteristic-zero claim mod p, which may fail for the
    finitely many primes dividing a certified-nonzero constant; such a
    failure therefore only decides the verdict when every usable prime
    agrees,  with the per-prime details kept in the report either way.
    """

    verdict: str
    primes: Tuple[PrimeReport, ...]
    skipped: Tuple[Tuple[int, str], ...]

    def to_dict(self):
        return {"verdict": self.verdict,
                "primes": [r.to_dict() for r in self.primes],
                "skipped": [{"prime": p, "reason": why}
                            for p, why in self.skipped]}


def check_decomposition(relations: Sequence[Relation],
                        decomposition: Decomposition,
                        primes: Sequence[int] = DEFAULT_PRIMES,
                        simple_samples: int = 0,
                        seed: int = 0) -> VerifyReport:
    """Check union-equality and disjointness of a decomposition over F_p.

    Every usable prime must see the union of the output solution sets
    equal the input solution set, with pairwise empty intersections;
    simple_samples > 0 additionally runs check_simple on every system.
    Simplicity failures flip the verdict only when every usable prime
    reports one.  The verdict is inconclusive when no prime is usable.
    """
    ranking = decomposition.ranking
    n = len(ranking.names)
    reports: List[PrimeReport] = []
    skipped: List[Tuple[int, str]] = []
    for p in primes:
        try:
            axes = _axes(n, p, seed)
            shape = tuple(len(a) for a in axes)
            cache: Dict = {}
            in_mask = _system_mask(relations, axes, p, shape, cache)
            sys_masks = [_system_mask(s.relations, axes, p, shape, cache)
                         for s in decomposition.systems]
            union = np.zeros(shape, dtype=bool)
            overlap = np.zeros(shape, dtype=bool)
            for m in sys_masks:
                overlap |= union & m
                union |= m
            union_equal = bool(np.array_equal(union, in_mask))
            disjoint = not bool(overlap.any())
            counter = None
            if not union_equal:
                bad = np.argwhere(union ^ in_mask)[0]
                counter = _point_of(tuple(bad), axes, p).as_dict(ranking)
            elif not disjoint:
                bad = np.argwhere(overlap)[0]
                counter = _point_of(tuple(bad), axes, p).as_dict(ranking)
            simple = None
            if simple_samples:
                simple = tuple(check_simple(s, p, simple_samples, seed, cache)
                               for s in decomposition.systems)
            reports.append(PrimeReport(
                p=p, input_points=int(in_mask.sum()),
                system_points=tuple(int(m.sum()) for m in sys_masks),
                union_equal=union_equal, disjoint=disjoint,
                counterexample=counter, simple=simple))
        except BadPrime as bad:
            skipped.append((p, str(bad)))
    def simple_failed(r: PrimeReport) -> bool:
        return r.simple is not None and not all(s.ok for s in r.simple)

    if not reports:
        verdict = "inconclusive"
    elif any(not (r.union_equal and r.disjoint) for r in reports):
        verdict = "fail"
    elif simple_samples and all(simple_failed(r) for r in reports):
        verdict = "fail"
    else:
        verdict = "pass"
    return VerifyReport(verdict=verdict, primes=tuple(reports),
                        skipped=tuple(skipped))


# -- resultant oracle ----------------------------------------------------------


def sylvester_resultant(p: Poly, q: Poly, x) -> Poly:
    """Resultant of p and q in x as the Bareiss determinant of the
    Sylvester matrix; entries stay in the coefficient ring throughout."""
    dp, dq = p.degree_in(x), q.degree_in(x)
    if dp < 1 or dq < 1:
        raise ContractViolation("sylvester_resultant needs both degrees >= 1")
    ranking = p.ranking
    zero = Poly.zero(ranking)
    size = dp + dq
    rows: List[List[Poly]] = []
    pc = [p.coeff_of(x, dp - i) for i in range(dp + 1)]
    qc = [q.coeff_of(x, dq - i) for i in range(dq + 1)]
    for r in range(dq):
        rows.append([zero] * r + pc + [zero] * (size - dp - 1 - r))
    for r in range(dp):
        rows.append([zero] * r + qc + [zero] * (size - dq - 1 - r))

    sign = 1
    prev = Poly.constant(1, ranking)
    for k in range(size - 1):
        if rows[k][k].is_zero:
            pivot = next((i for i in range(k + 1, size)
                          if not rows[i][k].is_zero), None)
            if pivot is None:
                return zero
            rows[k], rows[pivot] = rows[pivot], rows[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                rows[i][j] = divexact(
                    rows[k][k] * rows[i][j] - rows[i][k] * rows[k][j], prev)
            rows[i][k] = zero
        prev = rows[k][k]
    det = rows[size - 1][size - 1]
    return det.scale(sign) if sign < 0 else det


# -- fuzzing -------------------------------------------------------------------


def random_system(seed: int, n_vars: int = 3, max_deg: int = 3,
                  n_rels: int = 3, ineq_ratio: float = 0.25):
    """A reproducible sparse random system; returns (ranking, relations)."""
    from .poly import Ranking

    rng = random.Random(seed)
    ranking = Ranking([f"x{i + 1}" for i in range(n_vars)])
    rels: List[Relation] = []
    for _ in range(n_rels):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            mono = []
            budget = max_deg
            for k in rng.sample(range(n_vars), rng.randint(0, n_vars)):
                e = rng.randint(0, budget)
                budget -= e
                if e:
                    mono.append((k, e))
            mono = tuple(sorted(mono, reverse=True))
            c = rng.choice([c for c in range(-4, 5) if c])
            terms[mono] = terms.get(mono, 0) + c
        poly = Poly(terms, ranking)
        if poly.is_zero:
            continue
        rels.append(Relation(poly, rng.random() >= ineq_ratio))
    return ranking, rels
