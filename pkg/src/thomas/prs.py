"""Subresultant polynomial remainder sequences, cached by input identity.

For p, q both leading in x with deg_x(p) > deg_x(q), the chain records
the subresultants S_j for j < deg_x(q); the accessors add the boundary
conventions on top:

    prs(d_p) = p,  prs(d_q) = q,  prs(j) = 0 for d_q < j < d_p,
    res(d_p) = 1,  res(j) = coefficient of x^j in prs(j),  res(0) = prs(0).

A subresultant that is defective (its degree is below its index) counts
as 0 for prs(), and its res() is 0 as well, which is exactly the
convention the splitting algorithms rely on: res(j) vanishes iff the
gcd of the specialized pair has degree > j, wherever the initials stay
nonzero.

The cache is a plain dict keyed by the ranking fingerprint and the
canonical forms of p, q and x.  Lookups and insert-if-absent are safe
under CPython's GIL for concurrent readers; entries are immutable once
stored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

from .poly import ContractViolation, Poly, classical_prem, divexact


@dataclass(frozen=True)
class PrsResult:
    """Chain container with the boundary conventions baked into accessors."""

    x: object
    p: Poly
    q: Poly
    d_p: int
    d_q: int
    chain: Dict[int, Poly] = field(default_factory=dict)

    def prs(self, i: int) -> Poly:
        if i < 0 or i > self.d_p:
            raise ContractViolation(f"PRS index {i} outside 0..{self.d_p}")
        if i == self.d_p:
            return self.p
        if i == self.d_q:
            return self.q
        if i > self.d_q:
            return Poly.zero(self.p.ranking)
        entry = self.chain.get(i)
        if entry is None or entry.degree_in(self.x) != i:
            return Poly.zero(self.p.ranking)
        return entry

    def res(self, i: int) -> Poly:
        if i < 0 or i > self.d_p:
            raise ContractViolation(f"res index {i} outside 0..{self.d_p}")
        if i == self.d_p:
            return Poly.constant(1, self.p.ranking)
        if i == 0:
            if self.d_q == 0:
                return self.q
            entry = self.chain.get(0)
            return entry if entry is not None else Poly.zero(self.p.ranking)
        return self.prs(i).coeff_of(self.x, i)


_CACHE: dict = {}
_HITS = 0
_MISSES = 0


def cache_stats():
    return {"hits": _HITS, "misses": _MISSES, "entries": len(_CACHE)}

def reset_cache():
    global _HITS, _MISSES
    _CACHE.clear()
    _HITS = 0
    _MISSES = 0


def _lc(p: Poly, x) -> Poly:
    return p.coeff_of(x, p.degree_in(x))


def _compute_chain(p: Poly, q: Poly, x) -> Dict[int, Poly]:
    """Ducos-style subresultant chain; records S_j keyed by index j."""
    d_p, d_q = p.degree_in(x), q.degree_in(x)
    out: Dict[int, Poly] = {}
    s = _lc(q, x) ** (d_p - d_q)
    a = q
    b = classical_prem(p, -q, x)
    while not b.is_zero:
        d = a.degree_in(x)
        e = b.degree_in(x)
        out[d - 1] = b
        delta = d - e
        if delta > 1:
            c = divexact(_lc(b, x) ** (delta - 1) * b, s ** (delta - 1))
            out[e] = c
        else:
            c = b
        if e == 0:
            break
        b = divexact(classical_prem(a, -b, x), s ** delta * _lc(a, x))
        a = c
        s = _lc(a, x)
    return out


def subresultant_prs(p: Poly, q: Poly, x) -> PrsResult:
    """Cached subresultant chain of (p, q) in x; needs deg_x(p) > deg_x(q) >= 1."""
    d_p, d_q = p.degree_in(x), q.degree_in(x)
    if d_q < 1 or d_p <= d_q:
        raise ContractViolation(
            f"subresultant_prs needs deg_x(p) > deg_x(q) >= 1, got {d_p}, {d_q}")
    global _HITS, _MISSES
    key = (p.ranking.fingerprint, x, p.key, q.key)
    hit = _CACHE.get(key)
    if hit is not None:
        _HITS += 1
        return hit
    _MISSES += 1
    result = PrsResult(x=x, p=p, q=q, d_p=d_p, d_q=d_q,
                       chain=_compute_chain(p, q, x))
    _CACHE[key] = result
    return result


def chain_for_split(p: Poly, q: Poly, x) -> PrsResult:
    """Chain used by the splitting algorithms; tolerates deg_x(q) == 0.

    When q does not involve x (including q == 0) the defining
    determinants degenerate and the conventions above already describe
    the whole object, so a chainless PrsResult covers it: res(0) == q,
    every middle res vanishes and prs(d_p) == p.
    """
    d_p, d_q = p.degree_in(x), q.degree_in(x)
    if d_p < 1 or (not q.is_zero and d_p <= d_q):
        raise ContractViolation("chain_for_split needs deg_x(p) > deg_x(q)")
    if q.is_zero or d_q == 0:
        return PrsResult(x=x, p=p, q=q, d_p=d_p, d_q=0, chain={})
    return subresultant_prs(p, q, x)
