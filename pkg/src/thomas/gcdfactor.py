"""Content extraction, gcds and factorization for ranked sparse polynomials.

Everything here works with canonical representatives: integer-primitive
coefficients and a positive leading coefficient in the global term
order.  The primitive-PRS gcd is only ever applied to the small
coefficient polynomials that show up during content stripping, so no
special effort is made to be clever about it.

Irreducible factorization over Q delegates to sympy; it is an optional
optimization of the decomposition algorithm, not part of its core, and
reimplementing Zassenhaus here would buy nothing.  The results are
converted back into canonical form and a rational unit.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .poly import ContractViolation, Poly, divexact, prem


def integer_primitive(p: Poly):
    """Split p as content * primitive with positive rational content.

    The primitive part has coprime integer coefficients; its sign is
    whatever p had.  The zero polynomial returns (0, p).
    """
    if p.is_zero:
        return Fraction(0), p
    num = 0
    den = 1
    for c in p.terms.values():
        num = gcd(num, c.numerator)
        den = lcm(den, c.denominator)
    content = Fraction(num, den)
    return content, p.scale(1 / content)


def normalize_sign(p: Poly) -> Poly:
    """Flip the sign so the leading coefficient in the term order is positive."""
    if p.is_zero:
        return p
    return -p if p.leading_coefficient() < 0 else p


def canonical(p: Poly) -> Poly:
    """The canonical associate: integer-primitive with positive lead."""
    if p.is_zero:
        return p
    return normalize_sign(integer_primitive(p)[1])


def is_associate(p: Poly, q: Poly) -> bool:
    """True when p and q differ by a nonzero rational factor."""
    return canonical(p) == canonical(q)


def content_in(p: Poly, x) -> Poly:
    """Gcd of the coefficients of p viewed as univariate in x, canonical."""
    if p.is_zero:
        raise ContractViolation("content of the zero polynomial")
    coeffs = list(p.as_univariate(x).values())
    g = None
    for c in coeffs:
        g = canonical(c) if g is None else poly_gcd(g, c)
        if g.is_constant:
            return Poly.constant(1, p.ranking)
    return g


def primitive_part_in(p: Poly, x) -> Poly:
    return divexact(p, content_in(p, x))


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Gcd in Q[vars], canonical; constants count as units.

    Primitive PRS: strip contents, pseudo-divide primitive parts, and
    recurse on the contents, which live in strictly lower variables.
    """
    if p.is_zero:
        return canonical(q)
    if q.is_zero:
        return canonical(p)
    if p.is_constant or q.is_constant:
        return Poly.constant(1, p.ranking)
    xp, xq = p.leader, q.leader
    if xp != xq:
        if xp > xq:
            return poly_gcd(content_in(p, xp), q)
        return poly_gcd(p, content_in(q, xq))
    x = xp
    cp = content_in(p, x)
    cq = content_in(q, x)
    c = poly_gcd(cp, cq)
    a = divexact(p, cp)
    b = divexact(q, cq)
    if a.degree_in(x) < b.degree_in(x):
        a, b = b, a
    while True:
        r = prem(a, b, x)
        if r.is_zero:
            g = canonical(b)
            break
        if r.degree_in(x) == 0:
            g = Poly.constant(1, p.ranking)
            break
        # the integer content must go as well: over Q the polynomial
        # content is trivial and prem otherwise doubles coefficient
        # sizes every step
        a, b = b, canonical(primitive_part_in(r, x))
    return canonical(c * g)


def content_free(p: Poly) -> Poly:
    """Strip the content with respect to the leader, then canonicalize.

    Sound as a system simplification only when the caller knows the
    content cannot vanish on the solutions at hand, e.g. because the
    initial is protected by an inequation.
    """
    if p.is_constant:
        raise ContractViolation("content_free needs a nonconstant polynomial")
    cont = content_in(p, p.leader)
    if not cont.is_constant:
        p = divexact(p, cont)
    return canonical(p)


def squarefree_part(p: Poly) -> Poly:
    """Product of the distinct irreducible factors involving the leader.

    Computed as pp / gcd(pp, d pp / d leader) on the content-free part;
    returned canonical.
    """
    if p.is_constant:
        raise ContractViolation("squarefree_part needs a nonconstant polynomial")
    pp = content_free(p)
    x = pp.leader
    dp = pp.derivative(x)
    g = poly_gcd(pp, dp)
    if g.is_constant:
        return pp
    return canonical(divexact(pp, g))


def _to_sympy(p: Poly):
    import sympy

    keys = list(p.vars_present())
    gens = [sympy.Symbol(f"g{i}") for i in range(len(keys))]
    pos = {k: i for i, k in enumerate(keys)}
    rep = {}
    for mono, c in p.terms.items():
        ev = [0] * len(keys)
        for k, e in mono:
            ev[pos[k]] = e
        rep[tuple(ev)] = sympy.Rational(c.numerator, c.denominator)
    return sympy.Poly.from_dict(rep, *gens, domain="QQ"), keys


def _from_sympy(sp, keys, ranking) -> Poly:
    terms = {}
    for ev, c in sp.as_dict().items():
        mono = tuple(sorted(
            ((keys[i], e) for i, e in enumerate(ev) if e), reverse=True))
        terms[mono] = Fraction(c.p, c.q)
    return Poly(terms, ranking)


def factor_with_unit(p: Poly):
    """Exact factorization p == unit * prod(f_i ** m_i) over Q.

    The factors are canonical (integer-primitive, positive lead) and
    sorted deterministically; the unit is a rational, possibly negative.
    """
    if p.is_constant:
        raise ContractViolation("factor needs a nonconstant polynomial")
    sp, keys = _to_sympy(p)
    coeff, flist = sp.factor_list()
    unit = Fraction(coeff.p, coeff.q)
    factors = []
    for f, mult in flist:
        g = _from_sympy(f, keys, p.ranking)
        c, g = integer_primitive(g)
        if g.leading_coefficient() < 0:
            g = -g
            c = -c
        unit *= c ** mult
        factors.append((g, int(mult)))
    factors.sort(key=lambda fm: fm[0].sort_key())
    return unit, factors


def factor(p: Poly):
    """Factor list [(f, mult), ...] whose product is p up to a positive unit.

    A negative overall unit is absorbed by peeling one copy of a factor
    off with flipped sign, so the product always reproduces p's sign.
    """
    unit, factors = factor_with_unit(p)
    if unit < 0:
        f, m = factors[0]
        replacement = [(-f, 1)]
        if m > 1:
            replacement.append((f, m - 1))
        factors = replacement + factors[1:]
    return factors
