"""Queue selection strategies and their shared axioms."""

from fractions import Fraction

import pytest
from thomas.algebraic import TriangularSystem, select
from thomas.poly import ContractViolation, Poly, Ranking, Relation

RK = Ranking(("a", "b", "x"))
A, B, X = (Poly.variable(n, RK) for n in ("a", "b", "x"))


def c(value):
    return Poly.constant(Fraction(value), RK)


def build(*rels):
    s = TriangularSystem(RK)
    for poly, is_eq in rels:
        s.enqueue(Relation(poly, is_eq))
    return s


def test_select_rejects_empty_queue():
    with pytest.raises(ContractViolation):
        select(build(), "equations-first")


def test_equations_first_prefers_any_equation():
    s = build((A + c(1), False), (X - B, True))
    assert select(s, "equations-first") == 1


def test_equations_first_smallest_leader_among_equations():
    s = build((X - B, True), (A - c(2), True), (B - c(1), True))
    assert select(s, "equations-first") == 1


def test_leader_first_prefers_smallest_leader():
    # the inequation at leader a outranks the equation at leader x
    s = build((X - B, True), (A + c(1), False))
    assert select(s, "leader-first") == 1


def test_leader_first_breaks_leader_ties_toward_equations():
    s = build((A + c(1), False), (A - c(2), True))
    assert select(s, "leader-first") == 1


def test_tie_break_prefers_simpler_initial_tower():
    # same leader and both equations: the one whose initial is constant
    # wins over the one whose initial involves lower variables
    s = build((A * X ** 2 + B, True), (X ** 2 + A, True))
    assert select(s, "equations-first") == 1
    assert select(s, "leader-first") == 1


def test_selection_is_deterministic():
    s = build((X - A, True), (X - B, True))
    i = select(s, "equations-first")
    for _ in range(5):
        assert select(s, "equations-first") == i


def test_both_strategies_agree_on_pure_equation_queue():
    s = build((B - c(1), True), (A - c(1), True))
    assert select(s, "equations-first") == select(s, "leader-first") == 1
