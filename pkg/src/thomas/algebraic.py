"""Disjoint decomposition of algebraic systems into simple systems.

A system in progress keeps a candidate simple part (one relation per
leader, equations square-free with protected initials) and a queue of
unprocessed relations.  Each step selects a queue relation, reduces it
modulo the candidate equations, and either consumes it, refines the
candidate, or splits the system into complementary cases.  Splitting is
driven by the subresultant chain of the two polynomials involved: the
first index i whose principal coefficient does not vanish identically
on the current solutions tells how large the specialized gcd is, and
the chain polynomial of that index is the gcd, quotient divisor, or
square-free cofactor the refinement needs.

The union of the emitted systems' solution sets equals the input's and
the sets are pairwise disjoint; disjointness comes from every split
queueing the defining polynomial as an inequation on one side and as
an equation on the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from . import prs
from .gcdfactor import (canonical, content_free, content_in, factor_with_unit,
                        squarefree_part)
from .poly import (ContractViolation, Poly, Relation, divexact, pquo, prem,
                   pseudo_division)


class StepBudgetExceeded(RuntimeError):
    """The decomposition exceeded the configured number of loop steps."""


@dataclass(frozen=True)
class DecomposeOptions:
    """Tuning knobs for the decomposition loop.

    strategy: queue selection, "equations-first" or "leader-first".
    factor: split on factorizations over Q before dispatching.
    coeff_reduce: fully reduce non-leader coefficients after reduction.
    delay_squarefree: postpone square-free splits until the queue is
      first exhausted (algebraic mode only).
    early_ineq_check: after each insertion, discard the system if a
      queued inequation reduces to zero.
    step_budget: abort with StepBudgetExceeded after this many loop
      steps; 0 means unlimited.
    trace_hook: called as trace_hook(work, result) after every step
      with the live system lists; intended for instrumented tests.
    """

    strategy: str = "equations-first"
    factor: bool = False
    coeff_reduce: bool = True
    delay_squarefree: bool = False
    early_ineq_check: bool = True
    step_budget: int = 0
    trace_hook: Optional[Callable] = None

    def __post_init__(self):
        if self.strategy not in ("equations-first", "leader-first"):
            raise ContractViolation(f"unknown strategy {self.strategy!r}")


@dataclass
class DecomposeStats:
    steps: int = 0
    splits: int = 0
    factor_splits: int = 0
    discarded: int = 0
    prs_hits: int = 0
    prs_misses: int = 0

    def to_dict(self):
        return dict(self.__dict__)


class TriangularSystem:
    """Candidate simple part plus work queue; base for both theories."""

    def __init__(self, ranking):
        self.ranking = ranking
        self.candidate: Dict[object, Relation] = {}
        self.queue: List[Relation] = []
        self._queued: Dict[tuple, bool] = {}
        self.inconsistent = False
        self.phase2 = False  # delay-squarefree: queue has been emptied once

    # -- queue ----------------------------------------------------------

    def enqueue(self, rel: Relation):
        if rel.is_trivially_true():
            return
        if rel.is_inconsistent_marker():
            self.inconsistent = True
            return
        if rel.is_eq:
            rel = Relation(canonical(rel.poly), True)
        else:
            # p != 0 holds iff both the content and the square-free part
            # of p are nonzero, identically in every specialization, so
            # splitting them keeps guards small through repeated merges
            cont = content_in(rel.poly, rel.poly.leader)
            if not cont.is_constant:
                self.enqueue(Relation(cont, False))
            rel = Relation(squarefree_part(rel.poly), False)
        key = (rel.poly.key, rel.is_eq)
        if key in self._queued:
            return
        if (rel.poly.key, not rel.is_eq) in self._queued:
            # both p = 0 and p != 0 are asserted: no solutions
            self.inconsistent = True
            return
        self._queued[key] = True
        self.queue.append(rel)

    def dequeue(self, index: int) -> Relation:
        rel = self.queue.pop(index)
        del self._queued[(rel.poly.key, rel.is_eq)]
        return rel

    def copy(self) -> "TriangularSystem":
        new = self.__class__.__new__(self.__class__)
        new.ranking = self.ranking
        new.candidate = dict(self.candidate)
        new.queue = list(self.queue)
        new._queued = dict(self._queued)
        new.inconsistent = self.inconsistent
        new.phase2 = self.phase2
        return new

    # -- reduction --------------------------------------------------------

    def find_reductor(self, p: Poly) -> Optional[Poly]:
        """Equation usable to pseudo-divide p at its leader, if any."""
        x = p.leader
        slot = self.candidate.get(x)
        if slot is None or not slot.is_eq:
            return None
        if p.mdeg < slot.poly.mdeg:
            return None
        return slot.poly

    def find_coeff_reductor(self, v, deg: int) -> Optional[Poly]:
        """Equation usable to reduce a coefficient of degree deg in v."""
        slot = self.candidate.get(v)
        if slot is None or not slot.is_eq:
            return None
        if deg < slot.poly.mdeg:
            return None
        return slot.poly

    def reduce(self, p: Poly) -> Poly:
        """Pseudo-reduce p modulo the candidate equations.

        The result vanishes on exactly the same solutions of the current
        system as p does, and is no longer reducible: its leader carries
        no usable equation and its initial does not reduce to zero.
        """
        q = p
        while True:
            if q.leader is None:
                return q
            r = self.find_reductor(q)
            if r is None:
                break
            q = prem(q, r, q.leader)
        if q.leader is None:
            return q
        if self.reduce(q.init).is_zero:
            return self.reduce(q.tail())
        return q

    def reduce_with_certificate(self, p: Poly):
        """Like reduce, but returns (result, certificate)."""
        one = Poly.constant(1, self.ranking)
        m = one
        terms: List[Tuple[Poly, Poly]] = []
        q = p
        while q.leader is not None:
            r = self.find_reductor(q)
            if r is None:
                break
            div = pseudo_division(q, r, q.leader)
            m = div.m * m
            terms = [(div.m * c, rr) for c, rr in terms]
            terms.append((div.quo, r))
            q = div.rem
        if q.leader is None:
            return q, ReductionCertificate(p, m, tuple(terms), one, q)
        iq = q.init
        red_i, cert_i = self.reduce_with_certificate(iq)
        if not red_i.is_zero:
            return q, ReductionCertificate(p, m, tuple(terms), one, q)
        x, d = q.leader, q.mdeg
        xd = Poly.from_var_key(x, self.ranking).times_var_power(x, d - 1)
        out, cert_t = self.reduce_with_certificate(q.tail())
        m_i, m_t, w_t = cert_i.m, cert_t.m, cert_t.w
        total_m = m_i * m_t * m
        total_terms = [(m_i * m_t * c, rr) for c, rr in terms]
        total_terms += [(m_t * xd * c, rr) for c, rr in cert_i.terms]
        total_terms += [(m_i * c, rr) for c, rr in cert_t.terms]
        return out, ReductionCertificate(p, total_m, tuple(total_terms),
                                         m_i * w_t, out)

    def coeff_reduce(self, p: Poly) -> Poly:
        """Reduce every non-leader coefficient of p as far as possible."""
        while True:
            x = p.leader
            if x is None:
                return p
            target = None
            for v in p.vars_present():
                if v == x:
                    continue
                if self.find_coeff_reductor(v, p.degree_in(v)) is not None:
                    if target is None or v > target:
                        target = v
            if target is None:
                return p
            r = self.find_coeff_reductor(target, p.degree_in(target))
            p = pseudo_division(p, r, target).rem

    def full_reduce(self, p: Poly, coeff: bool) -> Poly:
        """reduce, then alternate with coeff_reduce until stable.

        Coefficient reduction can cancel the whole leading coefficient
        block and drop the leader, reopening leader reduction, so the
        two are iterated; both steps shrink the degree vector, so this
        terminates.
        """
        q = self.reduce(p)
        while coeff:
            q2 = self.coeff_reduce(q)
            if q2 == q:
                break
            q = self.reduce(q2)
        return q

    # -- insertion ---------------------------------------------------------

    def insert_equation(self, p: Poly, at_leader, options) -> bool:
        """Replace the candidate relation at at_leader with p = 0.

        The polynomial is coefficient-reduced and content-stripped
        first.  Returns False (after queueing p instead) when p
        degenerated away from the expected leader; reduction can only
        do that when the constraint was already implied or the system
        has no solutions, and requeueing handles both.
        """
        if options.coeff_reduce:
            p = self.coeff_reduce(p)
        if p.is_constant or p.leader != at_leader:
            self.enqueue(Relation(p, True))
            return False
        self.candidate[at_leader] = Relation(content_free(p), True)
        return True

    def insert_inequation(self, p: Poly, at_leader, options) -> bool:
        if options.coeff_reduce:
            p = self.coeff_reduce(p)
        if p.is_constant or p.leader != at_leader:
            self.enqueue(Relation(p, False))
            return False
        self.candidate[at_leader] = Relation(content_free(p), False)
        return True

    # hooks specialized by the algebraic and differential flavors

    def post_insert_equation(self, x, options):
        pass

    def on_queue_empty(self, options):
        return None

    def emit(self) -> "SimpleSystem":
        return SimpleSystem(relations=tuple(self.relations()),
                            ranking=self.ranking)

    def relations(self) -> List[Relation]:
        return sorted(self.candidate.values(), key=lambda r: r.sort_key())

    def __str__(self):
        parts = [str(r) for r in self.relations()]
        parts += [f"[{r}]" for r in self.queue]
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class ReductionCertificate:
    """Witness identity  m * input == sum(c_i * r_i) + w * output.

    The r_i are the equations (or prolongations) actually used; m and w
    are products of their initials, nonzero on the system's solutions.
    """

    input: Poly
    m: Poly
    terms: Tuple[Tuple[Poly, Poly], ...]
    w: Poly
    output: Poly

    def verify(self) -> bool:
        lhs = self.m * self.input
        rhs = self.w * self.output
        for c, r in self.terms:
            rhs = rhs + c * r
        return lhs == rhs


# -- splitting primitives ---------------------------------------------------


def split(system: TriangularSystem, p: Poly) -> TriangularSystem:
    """Case split on p: system keeps p != 0, the returned copy gets p = 0."""
    if p.is_constant:
        raise ContractViolation("split on a constant polynomial")
    branch = system.copy()
    system.enqueue(Relation(p, False))
    branch.enqueue(Relation(p, True))
    return branch


def init_split(system: TriangularSystem, q: Poly,
               is_eq: bool) -> Optional[TriangularSystem]:
    """Protect init(q); the branch gets init(q) = 0 plus q's reductum.

    A constant initial cannot vanish, so no split is needed then.
    """
    if q.leader is None:
        raise ContractViolation("init_split needs a nonconstant polynomial")
    ini = q.init
    if ini.is_constant:
        return None
    branch = split(system, ini)
    branch.enqueue(Relation(q.tail(), is_eq))
    return branch


def res_split(system: TriangularSystem, p: Poly, q: Poly):
    """Split on the first non-vanishing principal subresultant coefficient.

    Returns (i, chain, branch).  On the continuing system res(i) is
    recorded as nonzero, so the specialized gcd of (p, q) has degree
    exactly i on all of its solutions; the branch (None when res(i) is
    constant) explores res(i) = 0 and must requeue q.
    """
    x = p.leader
    chain = prs.chain_for_split(p, q, x)
    i = 0
    while True:
        r_i = chain.res(i)
        if not system.reduce(r_i).is_zero:
            break
        i += 1
    branch = None
    if not r_i.is_constant:
        branch = split(system, r_i)
    return i, chain, branch


def res_split_gcd(system: TriangularSystem, q: Poly):
    """Conditional gcd of the candidate equation at ld(q) with q.

    Caller must have checked that res(0) reduces to zero; the branch
    requeues q.  Returns (gcd_polynomial, branch).
    """
    x = q.leader
    slot = system.candidate[x].poly
    i, chain, branch = res_split(system, slot, q)
    if i == 0:
        raise ContractViolation("res_split_gcd called with nonvanishing resultant")
    if branch is not None:
        branch.enqueue(Relation(q, True))
    return chain.prs(i), branch


def res_split_squarefree(system: TriangularSystem, p: Poly, is_eq: bool):
    """Square-free cofactor of p on the continuing system's solutions.

    Splits on the subresultants of (p, dp/dx); the branch requeues p
    with its original relation kind.
    """
    x = p.leader
    i, chain, branch = res_split(system, p, p.derivative(x))
    if branch is not None:
        branch.enqueue(Relation(p, is_eq))
    r = p if i == 0 else pquo(p, chain.prs(i), x)
    return r, branch


def res_split_divide(system: TriangularSystem, p: Poly, q: Poly):
    """Quotient of p by its conditional gcd with q.

    Used to divide a relation at a leader by a known inequation (or to
    build the lcm of two inequations).  The branch requeues the second
    argument as an inequation.  Returns (quotient, branch).
    """
    x = p.leader
    reduced = q
    while reduced.degree_in(x) >= p.mdeg:
        reduced = prem(reduced, p, x)
    if reduced.is_zero:
        # q vanished modulo p: the conditional gcd is p itself
        return Poly.constant(1, p.ranking), None
    i, chain, branch = res_split(system, p, reduced)
    if branch is not None:
        # the branch must see the untouched inequation: prem mixes in
        # multiples of p, which changes where the polynomial vanishes
        branch.enqueue(Relation(q, False))
    r = p if i == 0 else pquo(p, chain.prs(i), x)
    return r, branch


# -- selection ----------------------------------------------------------------


def _initial_chain_key(p: Poly):
    out = []
    cur = p
    while cur.leader is not None:
        out.append((cur.leader_or_constant_key(), cur.mdeg))
        cur = cur.init
    out.append((cur.ranking.constant_key, 0))
    return tuple(out)


def select(system: TriangularSystem, strategy: str) -> int:
    """Pick the queue index to process next.

    Both strategies guarantee the selection axioms: an equation is only
    chosen when no queued equation has a smaller leader, an inequation
    only when no queued equation has a smaller or equal leader.
    """
    queue = system.queue
    if not queue:
        raise ContractViolation("select on an empty queue")

    def leader_key(rel):
        return rel.poly.leader_or_constant_key()

    eqs = [i for i, r in enumerate(queue) if r.is_eq]
    if strategy == "equations-first":
        pool = eqs if eqs else list(range(len(queue)))
        best_ld = min(leader_key(queue[i]) for i in pool)
        pool = [i for i in pool if leader_key(queue[i]) == best_ld]
    else:  # leader-first
        best_ld = min(leader_key(r) for r in queue)
        at = [i for i, r in enumerate(queue) if leader_key(r) == best_ld]
        at_eqs = [i for i in at if queue[i].is_eq]
        pool = at_eqs if at_eqs else at
    choice = min(pool, key=lambda i: (_initial_chain_key(queue[i].poly),
                                      queue[i].poly.key))
    chosen = queue[choice]
    for r in queue:
        if not r.is_eq:
            continue
        k = r.poly.leader_or_constant_key()
        if chosen.is_eq:
            if k < leader_key(chosen):
                raise ContractViolation("selection axiom violated for equations")
        elif k <= leader_key(chosen):
            raise ContractViolation("selection axiom violated for inequations")
    return choice


# -- results -----------------------------------------------------------------


@dataclass(frozen=True)
class SimpleSystem:
    """A finished system: triangular, square-free fibers, initials nonzero."""

    relations: Tuple[Relation, ...]
    ranking: object

    @property
    def equations(self):
        return tuple(r for r in self.relations if r.is_eq)

    @property
    def inequations(self):
        return tuple(r for r in self.relations if not r.is_eq)

    def leaders(self):
        return tuple(r.poly.leader for r in self.relations)

    def equation_leaders(self):
        return tuple(r.poly.leader for r in self.relations if r.is_eq)

    def sort_key(self):
        return tuple(r.sort_key() for r in self.relations)

    def __str__(self):
        return "{" + ", ".join(str(r) for r in self.relations) + "}"


@dataclass(frozen=True)
class Decomposition:
    input: Tuple[Relation, ...]
    systems: Tuple[SimpleSystem, ...]
    ranking: object
    options: DecomposeOptions
    stats: DecomposeStats

    def __len__(self):
        return len(self.systems)

    def __iter__(self):
        return iter(self.systems)

    def __str__(self):
        return "\n".join(f"System {i + 1}: {s}" for i, s in enumerate(self.systems))


# -- main loop -----------------------------------------------------------------


def _split_on_factors(system, q, is_eq, work):
    """Replace q by its irreducible factors; True when the system branched.

    An equation p*q = 0 becomes the disjoint cases p = 0 and p != 0, q = 0;
    an inequation p*q != 0 is simply both factors as inequations.
    """
    unit, factors = factor_with_unit(q)
    if len(factors) == 1 and factors[0][1] == 1:
        return False
    if is_eq:
        for j in range(len(factors)):
            branch = system.copy()
            for f, _ in factors[:j]:
                branch.enqueue(Relation(f, False))
            branch.enqueue(Relation(factors[j][0], True))
            work.append(branch)
        return True
    for f, _ in factors:
        system.enqueue(Relation(f, False))
    work.append(system)
    return True


def _run_decompose(initial: TriangularSystem,
                   options: DecomposeOptions) -> Tuple[List[SimpleSystem], DecomposeStats]:
    stats = DecomposeStats()
    prs_before = prs.cache_stats()
    work = [initial]
    result: List[SimpleSystem] = []

    def push_branch(branch):
        if branch is not None:
            stats.splits += 1
            work.append(branch)

    while work:
        system = work.pop()
        if system.inconsistent:
            stats.discarded += 1
            continue
        if options.step_budget and stats.steps >= options.step_budget:
            raise StepBudgetExceeded(
                f"step budget of {options.step_budget} exhausted")
        stats.steps += 1

        if not system.queue:
            followups = system.on_queue_empty(options)
            if followups is None:
                result.append(system.emit())
            else:
                work.extend(followups)
            if options.trace_hook:
                options.trace_hook(work, result)
            continue

        rel = system.dequeue(select(system, options.strategy))
        q = system.full_reduce(rel.poly, options.coeff_reduce)

        reduced = Relation(q, rel.is_eq)
        if reduced.is_trivially_true():
            work.append(system)
            continue
        if reduced.is_inconsistent_marker():
            stats.discarded += 1
            continue

        if options.factor and _split_on_factors(system, q, rel.is_eq, work):
            stats.factor_splits += 1
            if options.trace_hook:
                options.trace_hook(work, result)
            continue

        x = q.leader
        slot = system.candidate.get(x)

        if rel.is_eq:
            if slot is not None and slot.is_eq:
                r0 = prs.chain_for_split(slot.poly, q, x).res(0)
                if system.reduce(r0).is_zero:
                    g, branch = res_split_gcd(system, q)
                    push_branch(branch)
                    system.insert_equation(g, x, options)
                    system.post_insert_equation(x, options)
                else:
                    system.enqueue(Relation(q, True))
                    system.enqueue(Relation(r0, True))
            else:
                if slot is not None:
                    system.enqueue(slot)
                    del system.candidate[x]
                push_branch(init_split(system, q, True))
                if options.delay_squarefree and not system.phase2:
                    p2 = q
                else:
                    p2, branch = res_split_squarefree(system, q, True)
                    push_branch(branch)
                system.insert_equation(p2, x, options)
                system.post_insert_equation(x, options)
        else:
            if slot is not None and slot.is_eq:
                quot, branch = res_split_divide(system, slot.poly, q)
                push_branch(branch)
                system.insert_equation(quot, x, options)
                system.post_insert_equation(x, options)
            else:
                push_branch(init_split(system, q, False))
                if options.delay_squarefree and not system.phase2:
                    p2 = q
                else:
                    p2, branch = res_split_squarefree(system, q, False)
                    push_branch(branch)
                # shed the leader content before merging guards: the
                # pseudo-quotient above piles subresultant initials into
                # p2, and feeding those through another chain blows up
                cont = content_in(p2, x)
                if not cont.is_constant:
                    system.enqueue(Relation(cont, False))
                    p2 = divexact(p2, cont)
                p2 = canonical(p2)
                if slot is not None:
                    r, branch = res_split_divide(system, slot.poly, p2)
                    push_branch(branch)
                    del system.candidate[x]
                    system.insert_inequation(r * p2, x, options)
                else:
                    system.insert_inequation(p2, x, options)

        if system.inconsistent:
            stats.discarded += 1
        else:
            work.append(system)
        if options.trace_hook:
            options.trace_hook(work, result)

    result.sort(key=lambda s: s.sort_key())
    prs_after = prs.cache_stats()
    stats.prs_hits = prs_after["hits"] - prs_before["hits"]
    stats.prs_misses = prs_after["misses"] - prs_before["misses"]
    return result, stats


class AlgSystem(TriangularSystem):
    """Algebraic flavor: plain slot replacement and no prolongations."""

    def post_insert_equation(self, x, options: DecomposeOptions):
        if options.early_ineq_check:
            for rel in self.queue:
                if not rel.is_eq and self.reduce(rel.poly).is_zero:
                    self.inconsistent = True
                    return

    def on_queue_empty(self, options: DecomposeOptions):
        """None means finished; otherwise systems to push back on the list."""
        if options.delay_squarefree and not self.phase2 and self.candidate:
            self.phase2 = True
            for rel in self.candidate.values():
                self.enqueue(rel)
            self.candidate.clear()
            return [self]
        return None


def decompose(relations, ranking, options: Optional[DecomposeOptions] = None) -> Decomposition:
    """Thomas decomposition of an algebraic system.

    relations: iterable of Relation over the given ranking.  Returns the
    decomposition into simple systems, sorted canonically; an empty
    systems tuple means the input is inconsistent.
    """
    options = options or DecomposeOptions()
    relations = tuple(relations)
    for rel in relations:
        if rel.poly.ranking.fingerprint != ranking.fingerprint:
            raise ContractViolation("relation uses a different ranking")
    system = AlgSystem(ranking)
    for rel in relations:
        system.enqueue(rel)
    systems, stats = _run_decompose(system, options)
    return Decomposition(input=relations, systems=tuple(systems),
                         ranking=ranking, options=options, stats=stats)
