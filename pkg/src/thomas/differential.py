"""Differential Thomas decomposition via Janet division.

Differential polynomials live in jet variables u^(j)_i, where j names a
differential indeterminate and i is a multi-index counting derivations.
At any moment a system mentions only finitely many jet variables, so all
polynomial arithmetic is inherited from the algebraic core: a
DiffRanking hands out totally ordered tuple keys that embed the
differential ranking, and Poly never notices the difference.

What is genuinely differential lives here: the Janet assignment of
reductive derivations (which partitions the derivative cones of the
equation leaders), reduction by reductive prolongations, and the
insertion discipline that evicts every candidate member dominated by a
new equation and queues the non-reductive prolongations.  The main
decomposition loop is shared with the algebraic engine; both flavors
plug into the same hooks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import (Callable, Dict, FrozenSet, Iterable, List, Optional,
                    Sequence, Tuple)

from .algebraic import (DecomposeOptions, Decomposition, SimpleSystem,
                        TriangularSystem, _run_decompose)
from .gcdfactor import content_free
from .poly import ContractViolation, Poly, Relation


@dataclass(frozen=True)
class DiffVar:
    """A jet variable: indeterminate number plus derivation multi-index."""

    func: int
    idx: Tuple[int, ...]

    def derive(self, l: int) -> "DiffVar":
        idx = list(self.idx)
        idx[l] += 1
        return DiffVar(self.func, tuple(idx))

    @property
    def order(self) -> int:
        return sum(self.idx)

    def divides(self, other: "DiffVar") -> bool:
        """True when other lies in the full derivative cone of self."""
        return (self.func == other.func
                and all(a <= b for a, b in zip(self.idx, other.idx)))


class DiffRanking:
    """A differential ranking materialized as order-embedding tuple keys.

    Supported kinds:

    * ``orderly``: total derivation order first, ties by the reversed
      multi-index (so the last declared derivation weighs most), ties by
      indeterminate with the first declared one highest.
    * ``elimination``: indeterminate blocks compared first (blocks listed
      highest to lowest, default one block per indeterminate in
      declaration order), orderly inside each block.
    * ``custom``: a user key function (func_name, idx) -> tuple; the
      ranking axioms are spot-checked on random jets at construction.

    ``scan`` fixes the coordinate order used by the Janet assignment
    formula: None means declaration order of the derivations, "reversed"
    the opposite, or an explicit tuple of derivation names.
    """

    mode = "differential"

    def __init__(self, functions: Iterable[str], derivations: Iterable[str],
                 kind: str = "orderly",
                 blocks: Optional[Sequence[Sequence[str]]] = None,
                 scan=None,
                 custom_key: Optional[Callable] = None):
        functions = tuple(functions)
        derivations = tuple(derivations)
        if not functions or len(set(functions)) != len(functions):
            raise ContractViolation(f"bad indeterminate list: {functions}")
        if not derivations or len(set(derivations)) != len(derivations):
            raise ContractViolation(f"bad derivation list: {derivations}")
        self.functions = functions
        self.derivations = derivations
        self._func_index = {f: i for i, f in enumerate(functions)}
        self._deriv_index = {d: i for i, d in enumerate(derivations)}
        self.n = len(derivations)

        if kind not in ("orderly", "elimination", "custom"):
            raise ContractViolation(f"unknown ranking kind {kind!r}")
        self.kind = kind
        if kind == "elimination":
            blocks = tuple(tuple(b) for b in blocks) if blocks is not None \
                else tuple((f,) for f in functions)
            flat = [f for b in blocks for f in b]
            if sorted(flat) != sorted(functions):
                raise ContractViolation("blocks must partition the indeterminates")
            self.blocks = blocks
            self._block_rank = {}
            self._within_rank = {}
            for bi, block in enumerate(blocks):
                for fi, f in enumerate(block):
                    self._block_rank[self._func_index[f]] = len(blocks) - 1 - bi
                    self._within_rank[self._func_index[f]] = len(block) - 1 - fi
        elif blocks is not None:
            raise ContractViolation("blocks are only meaningful for elimination rankings")
        else:
            self.blocks = None

        if scan is None:
            order = tuple(range(self.n))
        elif scan == "reversed":
            order = tuple(reversed(range(self.n)))
        else:
            order = tuple(self._deriv_index[d] for d in scan)
            if sorted(order) != list(range(self.n)):
                raise ContractViolation(f"scan order {scan!r} is not a permutation")
        self.scan_order = order
        self.constant_key = (-1,)

        if kind == "custom":
            if custom_key is None:
                raise ContractViolation("custom ranking needs a key function")
            self._custom = custom_key
            self.fingerprint = ("diff", "custom", functions, derivations,
                                order, id(custom_key))
            self._spot_check_axioms()
        else:
            if custom_key is not None:
                raise ContractViolation("key function is only meaningful for custom rankings")
            self._custom = None
            self.fingerprint = ("diff", kind, functions, derivations, order,
                                self.blocks or ())

        self._registry: Dict[tuple, DiffVar] = {}

    # -- keys ------------------------------------------------------------

    def key_of(self, dv: DiffVar) -> tuple:
        if not (0 <= dv.func < len(self.functions)) or len(dv.idx) != self.n:
            raise ContractViolation(f"jet variable {dv} does not fit this ranking")
        if any(e < 0 for e in dv.idx):
            raise ContractViolation(f"negative derivation count in {dv}")
        if self.kind == "orderly":
            k = (dv.order, tuple(reversed(dv.idx)),
                 len(self.functions) - 1 - dv.func)
        elif self.kind == "elimination":
            k = (self._block_rank[dv.func], dv.order,
                 tuple(reversed(dv.idx)), self._within_rank[dv.func])
        else:
            k = tuple(self._custom(self.functions[dv.func], dv.idx))
        seen = self._registry.setdefault(k, dv)
        if seen != dv:
            raise ContractViolation(
                f"ranking key collision: {seen} and {dv} both map to {k}")
        return k

    def var_of_key(self, key) -> DiffVar:
        try:
            return self._registry[key]
        except KeyError:
            raise ContractViolation(f"unknown variable key {key!r}") from None

    def derive_key(self, key, l: int) -> tuple:
        return self.key_of(self.var_of_key(key).derive(l))

    def var_text(self, key) -> str:
        dv = self.var_of_key(key)
        return "%s[%s]" % (self.functions[dv.func],
                           ",".join(str(e) for e in dv.idx))

    def key(self, name: str):
        """Key for a jet written as text, e.g. "u[2,1]"; bare name is the 0-jet."""
        if "[" in name:
            base, _, rest = name.partition("[")
            if not rest.endswith("]"):
                raise ContractViolation(f"malformed jet variable {name!r}")
            idx = tuple(int(s) for s in rest[:-1].split(","))
        else:
            base, idx = name, (0,) * self.n
        if base not in self._func_index:
            raise ContractViolation(f"indeterminate {base!r} not declared")
        return self.key_of(DiffVar(self._func_index[base], idx))

    def __contains__(self, name: str) -> bool:
        base = name.partition("[")[0]
        return base in self._func_index

    def _spot_check_axioms(self):
        rng = random.Random(7)
        for _ in range(25):
            dv = DiffVar(rng.randrange(len(self.functions)),
                         tuple(rng.randrange(4) for _ in range(self.n)))
            k = tuple(self._custom(self.functions[dv.func], dv.idx))
            if not k > self.constant_key:
                raise ContractViolation("custom ranking puts a jet below the constants")
            for l in range(self.n):
                up = dv.derive(l)
                ku = tuple(self._custom(self.functions[up.func], up.idx))
                if not ku > k:
                    raise ContractViolation("custom ranking violates u < du")
            other = DiffVar(rng.randrange(len(self.functions)),
                            tuple(rng.randrange(4) for _ in range(self.n)))
            ko = tuple(self._custom(self.functions[other.func], other.idx))
            if ko == k and other != dv:
                raise ContractViolation("custom ranking key is not injective")
            for l in range(self.n):
                a = tuple(self._custom(self.functions[dv.func], dv.derive(l).idx))
                b = tuple(self._custom(self.functions[other.func], other.derive(l).idx))
                if (k < ko) != (a < b):
                    raise ContractViolation("custom ranking is not derivation monotone")

    def __repr__(self):
        return "DiffRanking(%s; %s; %s)" % (
            " ".join(self.functions), " ".join(self.derivations), self.kind)


def jet(name: str, idx: Sequence[int], ranking: DiffRanking) -> Poly:
    """The jet variable u^(name)_idx as a polynomial."""
    if len(idx) != ranking.n:
        raise ContractViolation(
            f"multi-index {idx} needs {ranking.n} entries for this ranking")
    if name not in ranking._func_index:
        raise ContractViolation(f"indeterminate {name!r} not declared")
    dv = DiffVar(ranking._func_index[name], tuple(idx))
    return Poly.from_var_key(ranking.key_of(dv), ranking)


def total_derivative(p: Poly, l: int) -> Poly:
    """Total derivative of p by the l-th derivation (chain rule over jets)."""
    rk = p.ranking
    out = Poly.zero(rk)
    for k in p.vars_present():
        dp = p.derivative(k)
        if dp.is_zero:
            continue
        out = out + dp * Poly.from_var_key(rk.derive_key(k, l), rk)
    return out


def separant(p: Poly) -> Poly:
    """Partial derivative of p by its leader; the initial of every
    proper prolongation of p."""
    if p.leader is None:
        raise ContractViolation("separant of a constant")
    return p.derivative(p.leader)


# -- Janet division combinatorics ---------------------------------------------


def janet_assign(variables: Iterable[DiffVar],
                 scan_order: Sequence[int]) -> Dict[DiffVar, FrozenSet[int]]:
    """Assign reductive derivations to each member of a finite jet set.

    Scanning the coordinates in scan_order, a derivation is reductive
    for w exactly when w maximizes that coordinate among the members of
    the same indeterminate that agree with w on all previously scanned
    coordinates.  The resulting cones are pairwise disjoint.
    """
    variables = list(variables)
    scan_order = tuple(scan_order)
    table: Dict[DiffVar, FrozenSet[int]] = {}
    for w in variables:
        if len(w.idx) != len(scan_order):
            raise ContractViolation(f"{w} does not match the scan order length")
        mates = [v for v in variables if v.func == w.func]
        red = set()
        for pos, l in enumerate(scan_order):
            earlier = scan_order[:pos]
            cls = [v for v in mates
                   if all(v.idx[k] == w.idx[k] for k in earlier)]
            if w.idx[l] == max(v.idx[l] for v in cls):
                red.add(l)
        table[w] = frozenset(red)
    return table


def in_cone(v: DiffVar, apex: DiffVar, reductive: FrozenSet[int]) -> bool:
    """True when v lies in the cone of apex spanned by the given derivations."""
    if v.func != apex.func:
        return False
    diff = [a - b for a, b in zip(v.idx, apex.idx)]
    if any(d < 0 for d in diff):
        return False
    return all(l in reductive for l, d in enumerate(diff) if d > 0)


def cone_union_contains(v: DiffVar,
                        table: Dict[DiffVar, FrozenSet[int]]) -> bool:
    return any(in_cone(v, w, red) for w, red in table.items())


def _default_candidate_key(v: DiffVar):
    return (v.order, tuple(reversed(v.idx)), v.func)


def janet_completion(variables: Iterable[DiffVar], scan_order: Sequence[int],
                     candidate_key=None) -> FrozenSet[DiffVar]:
    """Close a jet set until its Janet cones partition the full cone union.

    Repeatedly adds the smallest non-reductive prolongation of a member
    that the current cones do not cover; terminates with the completed
    set, whose cones are disjoint and cover every derivative of the input.
    """
    key = candidate_key or _default_candidate_key
    cur = set(variables)
    while True:
        table = janet_assign(cur, scan_order)
        missing = set()
        for w in cur:
            for l in range(len(scan_order)):
                if l in table[w]:
                    continue
                v = w.derive(l)
                if not cone_union_contains(v, table):
                    missing.add(v)
        if not missing:
            return frozenset(cur)
        cur.add(min(missing, key=key))


def nu_generators(variables: Iterable[DiffVar]) -> FrozenSet[DiffVar]:
    """The unique minimal subset generating the same full derivative cone.

    Componentwise-minimal multi-indices per indeterminate; every member
    of the input is a derivative of some generator.
    """
    vs = set(variables)
    return frozenset(v for v in vs
                     if not any(w != v and w.divides(v) for w in vs))


# -- the differential system flavor -------------------------------------------


def prolongation_criteria_skip(system: "DiffSystem", q: Poly, l: int) -> bool:
    """Hook for the classical involutive redundancy criteria.

    Always False here: every non-reductive prolongation is queued and
    reduced.  The criteria only prune provably redundant prolongations,
    so skipping them costs time but never correctness; an optimized
    engine can override this hook.
    """
    return False


class DiffSystem(TriangularSystem):
    """Differential flavor: Janet table, prolongation queueing, cone eviction.

    The candidate is keyed by exact leaders as in the algebraic case,
    but reduction searches the Janet cones of the equation leaders and
    reduces by reductive prolongations, and inserting an equation evicts
    every candidate member whose leader lies in the full derivative cone
    of the new leader.
    """

    def __init__(self, ranking: DiffRanking):
        if getattr(ranking, "mode", None) != "differential":
            raise ContractViolation("DiffSystem needs a differential ranking")
        super().__init__(ranking)
        self.janet: Dict[DiffVar, FrozenSet[int]] = {}
        self._prols_queued = set()
        self._prol_cache: Dict[tuple, Poly] = {}

    def copy(self) -> "DiffSystem":
        new = super().copy()
        new.janet = dict(self.janet)
        new._prols_queued = set(self._prols_queued)
        new._prol_cache = self._prol_cache  # pure memo, safely shared
        return new

    # -- prolongations ------------------------------------------------------

    def prolongation(self, q: Poly, steps: Sequence[int]) -> Poly:
        """The derivative of q by the multi-index steps, memoized."""
        steps = tuple(steps)
        key = (q.key, steps)
        hit = self._prol_cache.get(key)
        if hit is not None:
            return hit
        out = q
        for l, count in enumerate(steps):
            for _ in range(count):
                out = total_derivative(out, l)
        self._prol_cache[key] = out
        return out

    def _reassign(self):
        leaders = [self.ranking.var_of_key(w)
                   for w, rel in self.candidate.items() if rel.is_eq]
        self.janet = janet_assign(leaders, self.ranking.scan_order)

    def _cone_slot(self, dv: DiffVar):
        """The equation whose Janet cone contains dv, with the multi-index
        of the prolongation reaching it; cones are disjoint, so at most
        one equation qualifies."""
        for w, red in self.janet.items():
            if w.func != dv.func:
                continue
            diff = tuple(a - b for a, b in zip(dv.idx, w.idx))
            if any(d < 0 for d in diff):
                continue
            if any(d > 0 and l not in red for l, d in enumerate(diff)):
                continue
            return self.candidate[self.ranking.key_of(w)].poly, diff
        return None, None

    def find_reductor(self, p: Poly) -> Optional[Poly]:
        slot, diff = self._cone_slot(self.ranking.var_of_key(p.leader))
        if slot is None:
            return None
        if not any(diff):
            return slot if p.mdeg >= slot.mdeg else None
        return self.prolongation(slot, diff)

    def find_coeff_reductor(self, v, deg: int) -> Optional[Poly]:
        slot, diff = self._cone_slot(self.ranking.var_of_key(v))
        if slot is None:
            return None
        if not any(diff):
            return slot if deg >= slot.mdeg else None
        return self.prolongation(slot, diff)

    # -- insertion --------------------------------------------------------

    def insert_equation(self, p: Poly, at_leader, options) -> bool:
        if options.coeff_reduce:
            p = self.coeff_reduce(p)
        if p.is_constant or p.leader != at_leader:
            self.enqueue(Relation(p, True))
            return False
        x = self.ranking.var_of_key(at_leader)
        for key in list(self.candidate):
            if x.divides(self.ranking.var_of_key(key)):
                self.enqueue(self.candidate.pop(key))
        self.candidate[at_leader] = Relation(content_free(p), True)
        self._reassign()
        self._queue_prolongations(options)
        return True

    def _queue_prolongations(self, options):
        for w in sorted(self.janet, key=self.ranking.key_of):
            q = self.candidate[self.ranking.key_of(w)].poly
            for l in range(self.ranking.n):
                if l in self.janet[w]:
                    continue
                seen = (q.key, l)
                if seen in self._prols_queued:
                    continue
                self._prols_queued.add(seen)
                if prolongation_criteria_skip(self, q, l):
                    continue
                step = tuple(1 if k == l else 0 for k in range(self.ranking.n))
                self.enqueue(Relation(self.prolongation(q, step), True))

    def post_insert_equation(self, x, options: DecomposeOptions):
        if options.early_ineq_check:
            for rel in self.queue:
                if not rel.is_eq and self.reduce(rel.poly).is_zero:
                    self.inconsistent = True
                    return

    def on_queue_empty(self, options):
        """Defensive emission gate: involutivity and irreducible inequations.

        Queued prolongations normally guarantee both properties; anything
        found here is put back on the queue, bypassing the memo, and None
        is only returned for a system that genuinely satisfies them.
        """
        for rel in nonreductive_prolongations(self):
            if not self.reduce(rel.poly).is_zero:
                self.enqueue(rel)
        for key, rel in list(self.candidate.items()):
            if rel.is_eq:
                continue
            if self.find_reductor(rel.poly) is not None:
                del self.candidate[key]
                self.enqueue(rel)
        if self.queue:
            return [self]
        return None

    def emit(self) -> "DiffSimpleSystem":
        return DiffSimpleSystem(
            relations=tuple(self.relations()),
            ranking=self.ranking,
            janet=tuple(sorted(self.janet.items(),
                               key=lambda kv: self.ranking.key_of(kv[0]))),
            scan_order=self.ranking.scan_order)


def nonreductive_prolongations(system: DiffSystem) -> List[Relation]:
    """All prolongations of the candidate equations by their non-reductive
    derivations, as equations, sorted by (leader, derivation)."""
    out = []
    for w in sorted(system.janet, key=system.ranking.key_of):
        q = system.candidate[system.ranking.key_of(w)].poly
        for l in range(system.ranking.n):
            if l in system.janet[w]:
                continue
            step = tuple(1 if k == l else 0 for k in range(system.ranking.n))
            out.append(Relation(system.prolongation(q, step), True))
    return out


@dataclass(frozen=True)
class DiffSimpleSystem(SimpleSystem):
    """A finished differential system with its Janet table snapshot."""

    janet: Tuple[Tuple[DiffVar, FrozenSet[int]], ...] = ()
    scan_order: Tuple[int, ...] = ()

    def janet_table(self) -> Dict[DiffVar, FrozenSet[int]]:
        return dict(self.janet)

    def reductive(self, w: DiffVar) -> FrozenSet[int]:
        return self.janet_table()[w]


def _system_of(simple: DiffSimpleSystem) -> DiffSystem:
    sys = DiffSystem(simple.ranking)
    for rel in simple.relations:
        sys.candidate[rel.poly.leader] = rel
    sys._reassign()
    return sys


def involutivity_check(s) -> bool:
    """True when every non-reductive prolongation of the equations reduces
    to zero.  Accepts a DiffSystem with an empty queue or an emitted
    DiffSimpleSystem."""
    system = s if isinstance(s, DiffSystem) else _system_of(s)
    if system.queue:
        raise ContractViolation("involutivity check needs an empty queue")
    return all(system.reduce(rel.poly).is_zero
               for rel in nonreductive_prolongations(system))


def inequations_irreducible(s) -> bool:
    """True when no inequation is reducible modulo the equations."""
    system = s if isinstance(s, DiffSystem) else _system_of(s)
    return all(system.find_reductor(rel.poly) is None
               for rel in system.candidate.values() if not rel.is_eq)


def diff_decompose(relations, ranking: DiffRanking,
                   options: Optional[DecomposeOptions] = None) -> Decomposition:
    """Thomas decomposition of a differential system.

    Same contract as the algebraic decompose; the square-free split is
    never delayed here, because prolongations are only sound while the
    separants stay nonzero on the solution set.
    """
    options = options or DecomposeOptions()
    if options.delay_squarefree:
        options = replace(options, delay_squarefree=False)
    relations = tuple(relations)
    for rel in relations:
        if rel.poly.ranking.fingerprint != ranking.fingerprint:
            raise ContractViolation("relation uses a different ranking")
    system = DiffSystem(ranking)
    for rel in relations:
        system.enqueue(rel)
    systems, stats = _run_decompose(system, options)
    return Decomposition(input=relations, systems=tuple(systems),
                         ranking=ranking, options=options, stats=stats)
