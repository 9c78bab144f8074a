"""End-to-end differential decomposition goldens and emitted-system invariants."""

from dataclasses import replace
from fractions import Fraction

from thomas.algebraic import DecomposeOptions, Relation
from thomas.differential import (
    DiffRanking,
    DiffVar,
    _system_of,
    diff_decompose,
    inequations_irreducible,
    involutivity_check,
    janet_completion,
    jet,
    nu_generators,
)

# heat/Burgers pair for two unknown functions eta, zeta of (t, x);
# jet index order follows the derivation declaration: u[i,j] = d_t^i d_x^j u
RK_ORDERLY = DiffRanking(("eta", "zeta"), ("t", "x"), kind="orderly")
RK_ELIM = DiffRanking(("eta", "zeta"), ("t", "x"), kind="elimination")


def heat_link_system(rk):
    def eta(i, j):
        return jet("eta", (i, j), rk)

    def zeta(i, j):
        return jet("zeta", (i, j), rk)

    heat = eta(1, 0) + eta(0, 2)
    burgers = zeta(1, 0) + zeta(0, 2) + 2 * zeta(0, 1) * zeta(0, 0)
    link = eta(0, 0) * zeta(0, 0) - eta(0, 1)
    return heat, burgers, link, eta, zeta


def rels(system):
    return [str(r) for r in system.relations]


def all_emitted(*decompositions):
    for dec in decompositions:
        for s in dec.systems:
            yield s


def test_heat_plus_transformation_orderly_golden():
    heat, burgers, link, eta, zeta = heat_link_system(RK_ORDERLY)
    dec = diff_decompose(
        [Relation(heat, True), Relation(link, True), Relation(eta(0, 0), False)],
        RK_ORDERLY,
    )
    assert len(dec.systems) == 1
    assert rels(dec.systems[0]) == [
        "eta[0,0] <> 0",
        "zeta[0,1]*eta[0,0] + eta[1,0] + eta[0,0]*zeta[0,0]^2 = 0",
        "eta[0,1] - eta[0,0]*zeta[0,0] = 0",
    ]


def test_transformed_solution_satisfies_burgers():
    # every relation of the output reduces Burgers' equation to zero, i.e.
    # the transformation maps nonzero heat solutions into Burgers solutions
    heat, burgers, link, eta, zeta = heat_link_system(RK_ORDERLY)
    dec = diff_decompose(
        [Relation(heat, True), Relation(link, True), Relation(eta(0, 0), False)],
        RK_ORDERLY,
    )
    sys0 = _system_of(dec.systems[0])
    assert sys0.full_reduce(burgers, True).is_zero


def test_heat_burgers_elimination_golden():
    heat, burgers, link, eta, zeta = heat_link_system(RK_ELIM)
    dec = diff_decompose(
        [
            Relation(heat, True),
            Relation(burgers, True),
            Relation(link, True),
            Relation(eta(0, 0), False),
        ],
        RK_ELIM,
    )
    assert len(dec.systems) == 1
    assert rels(dec.systems[0]) == [
        "zeta[0,2] + 2*zeta[0,1]*zeta[0,0] + zeta[1,0] = 0",
        "eta[0,0] <> 0",
        "eta[1,0] + eta[0,0]*zeta[0,1] + eta[0,0]*zeta[0,0]^2 = 0",
        "eta[0,1] - eta[0,0]*zeta[0,0] = 0",
    ]


def test_elimination_output_admits_vanishing_zeta():
    # eta = const != 0, zeta = 0 solves the input, so no output system may
    # globally assert zeta <> 0; the jet point must satisfy the one system
    heat, burgers, link, eta, zeta = heat_link_system(RK_ELIM)
    dec = diff_decompose(
        [
            Relation(heat, True),
            Relation(burgers, True),
            Relation(link, True),
            Relation(eta(0, 0), False),
        ],
        RK_ELIM,
    )
    (only,) = dec.systems
    assert "zeta[0,0] <> 0" not in rels(only)
    base = RK_ELIM.key("eta[0,0]")
    for rel in only.relations:
        point = {k: Fraction(0) for k in rel.poly.vars_present()}
        if base in point:
            point[base] = Fraction(5)
        value = rel.poly.evaluate(point)
        assert (value == 0) == rel.is_eq


def test_elimination_with_nonzero_zeta_input_golden():
    # adding zeta <> 0 to the input reproduces the output with the guard
    heat, burgers, link, eta, zeta = heat_link_system(RK_ELIM)
    dec = diff_decompose(
        [
            Relation(heat, True),
            Relation(burgers, True),
            Relation(link, True),
            Relation(eta(0, 0), False),
            Relation(zeta(0, 0), False),
        ],
        RK_ELIM,
    )
    assert len(dec.systems) == 1
    assert rels(dec.systems[0]) == [
        "zeta[0,0] <> 0",
        "zeta[0,2] + 2*zeta[0,1]*zeta[0,0] + zeta[1,0] = 0",
        "eta[0,0] <> 0",
        "eta[1,0] + eta[0,0]*zeta[0,1] + eta[0,0]*zeta[0,0]^2 = 0",
        "eta[0,1] - eta[0,0]*zeta[0,0] = 0",
    ]


RK_CONTROL = DiffRanking(("x2", "x1", "y", "u"), ("t",), kind="elimination")


def control_system():
    def f(name, i):
        return jet(name, (i,), RK_CONTROL)

    return [
        f("x1", 1) - f("u", 0) * f("x2", 0),
        f("x2", 1) - f("x1", 0) - f("u", 0) * f("x2", 0),
        f("y", 0) - f("x1", 0),
    ]


def test_control_example_golden():
    dec = diff_decompose([Relation(p, True) for p in control_system()], RK_CONTROL)
    assert [rels(s) for s in dec.systems] == [
        ["u[0] = 0", "y[1] = 0", "x1[0] - y[0] = 0", "x2[1] - y[0] = 0"],
        [
            "u[0] <> 0",
            "y[2]*u[0] - y[1]*u[1] - y[1]*u[0]^2 - y[0]*u[0]^2 = 0",
            "x1[0] - y[0] = 0",
            "x2[0]*u[0] - y[1] = 0",
        ],
    ]


def test_control_example_external_trajectories():
    # the x1/x2-free relations of each system describe the input-output
    # behavior: {u=0, y_t=0} and {u<>0, u*y_tt - y_t*u_t - y_t*u^2 - y*u^2}
    dec = diff_decompose([Relation(p, True) for p in control_system()], RK_CONTROL)
    state = {RK_CONTROL.functions.index("x1"), RK_CONTROL.functions.index("x2")}

    def external(system):
        keep = []
        for rel in system.relations:
            vs = {RK_CONTROL.var_of_key(k).func for k in rel.poly.vars_present()}
            if not (vs & state):
                keep.append(str(rel))
        return keep

    assert external(dec.systems[0]) == ["u[0] = 0", "y[1] = 0"]
    assert external(dec.systems[1]) == [
        "u[0] <> 0",
        "y[2]*u[0] - y[1]*u[1] - y[1]*u[0]^2 - y[0]*u[0]^2 = 0",
    ]


def test_single_ode_passthrough():
    rk = DiffRanking(("u",), ("t",), kind="orderly")
    p = jet("u", (1,), rk) - jet("u", (0,), rk)
    dec = diff_decompose([Relation(p, True)], rk)
    assert [rels(s) for s in dec.systems] == [["u[1] - u[0] = 0"]]


def _decompositions_under_test():
    heat, burgers, link, eta, zeta = heat_link_system(RK_ORDERLY)
    yield diff_decompose(
        [Relation(heat, True), Relation(link, True), Relation(eta(0, 0), False)],
        RK_ORDERLY,
    )
    heat, burgers, link, eta, zeta = heat_link_system(RK_ELIM)
    base = [
        Relation(heat, True),
        Relation(burgers, True),
        Relation(link, True),
        Relation(eta(0, 0), False),
    ]
    yield diff_decompose(base, RK_ELIM)
    yield diff_decompose(base + [Relation(zeta(0, 0), False)], RK_ELIM)
    yield diff_decompose([Relation(p, True) for p in control_system()], RK_CONTROL)


def test_emitted_systems_are_involutive_with_irreducible_inequations():
    for s in all_emitted(*_decompositions_under_test()):
        assert involutivity_check(s)
        assert inequations_irreducible(s)


def test_equation_leaders_are_janet_complete():
    # the leader set must be exactly the Janet completion of its minimal
    # generators, i.e. the cones already tile what they generate
    for s in all_emitted(*_decompositions_under_test()):
        leaders = {s.ranking.var_of_key(p.leader) for p in s.equations}
        done = janet_completion(nu_generators(leaders), s.scan_order)
        assert done == leaders


def test_emitted_janet_accessors():
    dec = diff_decompose([Relation(p, True) for p in control_system()], RK_CONTROL)
    generic = dec.systems[1]
    x2 = DiffVar(RK_CONTROL.functions.index("x2"), (0,))
    table = generic.janet_table()
    assert table[x2] == frozenset({0})
    assert generic.reductive(x2) == frozenset({0})
    assert set(table) == {
        s.ranking.var_of_key(p.leader)
        for s in [generic]
        for p in s.equations
    }


def test_delay_squarefree_is_forced_off():
    heat, burgers, link, eta, zeta = heat_link_system(RK_ELIM)
    base = [
        Relation(heat, True),
        Relation(burgers, True),
        Relation(link, True),
        Relation(eta(0, 0), False),
    ]
    plain = diff_decompose(base, RK_ELIM)
    delayed = diff_decompose(
        base, RK_ELIM, replace(DecomposeOptions(), delay_squarefree=True)
    )
    assert delayed.options.delay_squarefree is False
    assert [rels(s) for s in delayed.systems] == [rels(s) for s in plain.systems]
