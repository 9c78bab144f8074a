"""Sparse multivariate polynomials over Q with a ranking-aware term order.

A polynomial is stored as a dict mapping monomials to nonzero Fraction
coefficients.  A monomial is a tuple of (variable key, exponent) pairs,
sorted by descending variable key, with all exponents positive.  Variable
keys are whatever the active ranking hands out; they only need to be
totally ordered and hashable.  With that layout, plain tuple comparison
of monomials is exactly the lexicographic order induced by the ranking,
so the leading monomial, the leader and the initial all fall out of
``max()`` calls.

The pseudo-division here keeps the multiplier sparse: the remainder is
multiplied by init(q) only when a new leading term actually has to be
eliminated, so m divides init(q)^(deg p - deg q + 1) instead of always
equaling it.  ``classical_prem`` recovers the dense multiplier when a
subresultant computation needs it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union


class ContractViolation(ValueError):
    """An operation was called outside its stated preconditions."""


Mono = tuple  # tuple[(var_key, exp), ...], var keys descending, exps > 0

_ONE_MONO: Mono = ()

Scalar = Union[int, Fraction]


class Ranking:
    """A total order on named algebraic variables, listed ascending.

    ``Ranking(["a", "b", "x"])`` makes x the highest variable.  Keys are
    the integer positions, so later names compare larger.
    """

    mode = "algebraic"

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ContractViolation(f"duplicate variable names in ranking: {names}")
        if not names:
            raise ContractViolation("ranking needs at least one variable")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self.fingerprint = ("alg",) + names
        self.constant_key = -1

    def key(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ContractViolation(f"variable {name!r} not declared in ranking") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def var_of(self, key: int) -> str:
        return self.names[key]

    def var_text(self, key) -> str:
        return self.names[key]

    def __repr__(self):
        return "Ranking(%s)" % " < ".join(self.names)


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        k1, e1 = m1[i]
        k2, e2 = m2[j]
        if k1 == k2:
            out.append((k1, e1 + e2))
            i += 1
            j += 1
        elif k1 > k2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_div(m1: Mono, m2: Mono) -> Optional[Mono]:
    """m1 / m2 as a monomial, or None when m2 does not divide m1."""
    if not m2:
        return m1
    rest = dict(m1)
    for k, e in m2:
        have = rest.get(k, 0)
        if have < e:
            return None
        if have == e:
            del rest[k]
        else:
            rest[k] = have - e
    return tuple(sorted(rest.items(), reverse=True))


def _mono_degree_in(m: Mono, x) -> int:
    for k, e in m:
        if k == x:
            return e
        if k < x:
            break
    return 0


class Poly:
    """Immutable sparse polynomial over Q attached to a ranking."""

    __slots__ = ("terms", "ranking", "_key", "_univ_cache")

    def __init__(self, terms: Mapping[Mono, Scalar], ranking):
        clean = {}
        for mono, c in terms.items():
            if not isinstance(c, Fraction):
                c = Fraction(c)
            if c != 0:
                clean[mono] = c
        self.terms = clean
        self.ranking = ranking
        self._key = None
        self._univ_cache = None

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, ranking) -> "Poly":
        return cls({}, ranking)

    @classmethod
    def constant(cls, c: Scalar, ranking) -> "Poly":
        return cls({_ONE_MONO: Fraction(c)}, ranking)

    @classmethod
    def variable(cls, var, ranking) -> "Poly":
        return cls({((ranking.key(var), 1),): Fraction(1)}, ranking)

    @classmethod
    def from_var_key(cls, key, ranking) -> "Poly":
        return cls({((key, 1),): Fraction(1)}, ranking)

    # -- basic structure ----------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(m == _ONE_MONO for m in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ContractViolation("constant_value on a nonconstant polynomial")
        return self.terms[_ONE_MONO]

    @property
    def leader(self):
        """Key of the highest-ranking variable present, None for constants."""
        best = None
        for mono in self.terms:
            if mono:
                k = mono[0][0]
                if best is None or k > best:
                    best = k
        return best

    def leader_or_constant_key(self):
        ld = self.leader
        return self.ranking.constant_key if ld is None else ld

    @property
    def mdeg(self) -> int:
        """Degree in the leader; 0 for constants."""
        x = self.leader
        if x is None:
            return 0
        return max(_mono_degree_in(m, x) for m in self.terms)

    def degree_in(self, x) -> int:
        if self.is_zero:
            return -1
        return max(_mono_degree_in(m, x) for m in self.terms)

    def as_univariate(self, x) -> dict:
        """View as a univariate polynomial in x: degree -> coefficient Poly."""
        if self._univ_cache is not None and self._univ_cache[0] == x:
            return self._univ_cache[1]
        buckets: dict = {}
        for mono, c in self.terms.items():
            d = _mono_degree_in(mono, x)
            rest = tuple(p for p in mono if p[0] != x) if d else mono
            buckets.setdefault(d, {})[rest] = c
        out = {d: Poly(t, self.ranking) for d, t in buckets.items()}
        self._univ_cache = (x, out)
        return out

    def coeff_of(self, x, d: int) -> "Poly":
        return self.as_univariate(x).get(d, Poly.zero(self.ranking))

    @property
    def init(self) -> "Poly":
        """Initial: the leading coefficient w.r.t. the leader."""
        x = self.leader
        if x is None:
            raise ContractViolation("init of a constant polynomial")
        return self.coeff_of(x, self.mdeg)

    def tail(self) -> "Poly":
        """self - init * leader^mdeg."""
        x = self.leader
        if x is None:
            raise ContractViolation("tail of a constant polynomial")
        d = self.mdeg
        kept = {m: c for m, c in self.terms.items() if _mono_degree_in(m, x) != d}
        return Poly(kept, self.ranking)

    def leading_monomial(self) -> Mono:
        if self.is_zero:
            raise ContractViolation("leading monomial of zero")
        return max(self.terms)

    def leading_coefficient(self) -> Fraction:
        return self.terms[self.leading_monomial()]

    def vars_present(self) -> tuple:
        seen = set()
        for mono in self.terms:
            for k, _ in mono:
                seen.add(k)
        return tuple(sorted(seen))

    def total_degree(self) -> int:
        if self.is_zero:
            return 0
        return max(sum(e for _, e in m) for m in self.terms)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other, self.ranking)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(out, self.ranking)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, self.ranking)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return Poly.zero(self.ranking)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        for m2, c2 in b.items():
            for m1, c1 in a.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(out, self.ranking)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero(self.ranking)
        return Poly({m: v * c for m, v in self.terms.items()}, self.ranking)

    def __pow__(self, n: int):
        if n < 0:
            raise ContractViolation("negative power of a polynomial")
        result = Poly.constant(1, self.ranking)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def times_var_power(self, x, e: int) -> "Poly":
        if e == 0 or self.is_zero:
            return self
        shift = ((x, e),)
        return Poly({_mono_mul(m, shift): c for m, c in self.terms.items()}, self.ranking)

    # -- calculus and specialization ------------------------------------

    def derivative(self, x) -> "Poly":
        """Partial derivative with respect to the variable with key x."""
        out: dict = {}
        for mono, c in self.terms.items():
            e = _mono_degree_in(mono, x)
            if not e:
                continue
            rest = tuple((k, v) if k != x else (k, v - 1) for k, v in mono)
            rest = tuple(p for p in rest if p[1] > 0)
            s = out.get(rest, 0) + c * e
            if s:
                out[rest] = s
            else:
                del out[rest]
        return Poly(out, self.ranking)

    def substitute(self, assignment: Mapping) -> "Poly":
        """Replace variables by values or polynomials; keys are var keys."""
        result = Poly.zero(self.ranking)
        one = Poly.constant(1, self.ranking)
        for mono, c in self.terms.items():
            term = one.scale(c)
            static = []
            for k, e in mono:
                if k in assignment:
                    v = assignment[k]
                    if not isinstance(v, Poly):
                        v = Poly.constant(v, self.ranking)
                    term = term * v ** e
                else:
                    static.append((k, e))
            if static:
                term = Poly({tuple(static): Fraction(1)}, self.ranking) * term
            result = result + term
        return result

    def evaluate(self, point: Mapping) -> Fraction:
        """Evaluate at a full point; every variable present must be assigned."""
        total = Fraction(0)
        for mono, c in self.terms.items():
            v = c
            for k, e in mono:
                if k not in point:
                    raise ContractViolation(
                        f"evaluate: no value for {self.ranking.var_text(k)}")
                v *= Fraction(point[k]) ** e
            total += v
        return total

    def evaluate_below(self, x, point: Mapping) -> "Poly":
        """Specialize every variable ranking below x; higher ones stay symbolic."""
        for k in self.vars_present():
            if k < x and k not in point:
                raise ContractViolation(
                    f"evaluate_below: no value for {self.ranking.var_text(k)}")
        return self.substitute({k: v for k, v in point.items() if k < x})

    # -- identity -------------------------------------------------------

    @property
    def key(self):
        """Canonical hashable form; equal keys mean equal polynomials."""
        if self._key is None:
            self._key = tuple(sorted(self.terms.items(), reverse=True))
        return self._key

    def sort_key(self):
        return (self.leader_or_constant_key(), self.mdeg, self.key)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    # -- rendering ------------------------------------------------------

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), reverse=True):
            factors = [
                self.ranking.var_text(k) + (f"^{e}" if e > 1 else "")
                for k, e in mono
            ]
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(("- " if c < 0 else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


@dataclass(frozen=True)
class Relation:
    """An equation (p = 0) or inequation (p != 0)."""

    poly: Poly
    is_eq: bool

    @property
    def leader(self):
        return self.poly.leader

    @property
    def kind(self) -> str:
        return "eq" if self.is_eq else "neq"

    def is_trivially_true(self) -> bool:
        p = self.poly
        return p.is_zero if self.is_eq else (p.is_constant and not p.is_zero)

    def is_inconsistent_marker(self) -> bool:
        """Nonzero constant equation, or the zero inequation."""
        p = self.poly
        if self.is_eq:
            return p.is_constant and not p.is_zero
        return p.is_zero

    def sort_key(self):
        return (self.poly.leader_or_constant_key(), 0 if self.is_eq else 1,
                self.poly.key)

    def __str__(self):
        return f"{self.poly} {'=' if self.is_eq else '<>'} 0"


@dataclass(frozen=True)
class PseudoDivision:
    """m * p == quo * q + rem with deg_x(rem) < deg_x(q).

    The multiplier m is a power of init(q); steps records which power.
    """

    m: Poly
    quo: Poly
    rem: Poly
    steps: int


def pseudo_division(p: Poly, q: Poly, x) -> PseudoDivision:
    """Sparse pseudo-division of p by q with respect to the variable x.

    Requires deg_x(q) >= 1.  Repeatedly eliminates the leading term of
    the running remainder, multiplying by init(q) only when needed.
    """
    if q.is_zero:
        raise ContractViolation("pseudo-division by zero")
    dq = q.degree_in(x)
    if dq < 1:
        raise ContractViolation("pseudo-division needs deg_x(divisor) >= 1")
    ranking = p.ranking
    qu = q.as_univariate(x)
    iq = qu[dq]
    rem = dict(p.as_univariate(x))
    quo: dict = {}
    m = Poly.constant(1, ranking)
    steps = 0
    while rem:
        dr = max(rem)
        if dr < dq:
            break
        t = rem.pop(dr)
        # rem <- rem*iq - t*x^(dr-dq)*(q - iq*x^dq); the x^dr terms cancel
        new_rem: dict = {d: c * iq for d, c in rem.items()}
        for d, c in qu.items():
            if d == dq:
                continue
            shift = d + dr - dq
            cur = new_rem.get(shift)
            val = (cur - t * c) if cur is not None else (-t) * c
            if val.is_zero:
                new_rem.pop(shift, None)
            else:
                new_rem[shift] = val
        rem = new_rem
        quo = {d: c * iq for d, c in quo.items()}
        quo[dr - dq] = quo.get(dr - dq, Poly.zero(ranking)) + t
        m = m * iq
        steps += 1
    z = Poly.zero(ranking)
    rem_poly = sum((c.times_var_power(x, d) for d, c in rem.items()), z)
    quo_poly = sum((c.times_var_power(x, d) for d, c in quo.items()), z)
    return PseudoDivision(m=m, quo=quo_poly, rem=rem_poly, steps=steps)


def prem(p: Poly, q: Poly, x) -> Poly:
    return pseudo_division(p, q, x).rem


def pquo(p: Poly, q: Poly, x) -> Poly:
    return pseudo_division(p, q, x).quo


def prem_multiplier(p: Poly, q: Poly, x) -> Poly:
    return pseudo_division(p, q, x).m


def classical_prem(p: Poly, q: Poly, x) -> Poly:
    """Pseudo-remainder with the dense multiplier init(q)^(dp - dq + 1).

    Requires deg_x(p) >= deg_x(q) >= 1.  Subresultant chains need this
    exact multiplier; everything else uses the sparse prem.
    """
    dp, dq = p.degree_in(x), q.degree_in(x)
    if dq < 1 or dp < dq:
        raise ContractViolation("classical_prem needs deg_x(p) >= deg_x(q) >= 1")
    div = pseudo_division(p, q, x)
    missing = (dp - dq + 1) - div.steps
    iq = q.coeff_of(x, dq)
    return div.rem * iq ** missing


def divexact(a: Poly, b: Poly) -> Poly:
    """Exact quotient a / b in the polynomial ring.

    Raises ContractViolation when b does not divide a.
    """
    if b.is_zero:
        raise ContractViolation("division by zero polynomial")
    ranking = a.ranking
    if a.is_zero:
        return a
    lm_b = b.leading_monomial()
    lc_b = b.leading_coefficient()
    out: dict = {}
    rem = dict(a.terms)
    while rem:
        m = max(rem)
        c = rem[m]
        t_mono = _mono_div(m, lm_b)
        if t_mono is None:
            raise ContractViolation("divexact: division is not exact")
        t_coef = c / lc_b
        out[t_mono] = t_coef
        for mb, cb in b.terms.items():
            mm = _mono_mul(t_mono, mb)
            s = rem.get(mm, 0) - t_coef * cb
            if s:
                rem[mm] = s
            else:
                rem.pop(mm, None)
    return Poly(out, ranking)
