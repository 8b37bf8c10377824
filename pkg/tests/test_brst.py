import random

import pytest

from brstkit.algebra import random_element
from brstkit.brst import (BRSTDifferential, OrderExceeded, OrderOutOfRange, brst_apply,
                          brst_differential, build_charge, expansion_term, s1_on_antighosts,
                          structure_identities)
from brstkit.differentials import koszul_tate, longitudinal
from brstkit.fixtures import FIXTURES, abelian, higher_rank, open_algebra, open_algebra_rank3, so3
from brstkit.symplectic import ConstraintSystem, NotFirstClass
from oracles import WordAlgebra, oracle_bracket

# Frozen from the construction and re-verified by the word oracle below.
CHARGES = {
    "abelian": ["p1*eta1 + p2*eta2"],
    "so3": ["x1*p2*eta3 - x1*p3*eta2 - x2*p1*eta3 + x2*p3*eta1 + x3*p1*eta2 - x3*p2*eta1",
            "-P1*eta2*eta3 + P2*eta1*eta3 - P3*eta1*eta2"],
    "open": ["p1*eta1 + p2*eta2 + x1*x2*p1*eta2", "x2*P1*eta1*eta2"],
    "higher_rank": ["p1*eta1 + p2*eta2 + p3*eta3",
                    "p1*P2*eta1*eta2 - p2*P1*eta1*eta2 + p2*P3*eta2*eta3 - p3*P2*eta2*eta3",
                    "p2*P1*P3*eta1*eta2*eta3"],
}
N = {"abelian": 2, "so3": 3, "open": 2, "higher_rank": 3}


@pytest.mark.parametrize("name", sorted(CHARGES))
def test_charge_terms_and_oracle_master_equation(name):
    cs = FIXTURES[name]()
    ch = build_charge(cs, 3, 4)
    assert ch.complete and ch.certified
    assert [str(t) for t in ch.terms if t] == CHARGES[name]
    assert ch.order == len(CHARGES[name]) - 1
    W = WordAlgebra.of(cs.table)
    om = W.from_super(ch.total)
    assert oracle_bracket(W, om, om, N[name], cs.size, +1) == {}
    assert not ch.master_defect()


def test_charge_term_gradings():
    ch = build_charge(higher_rank(), 3)
    for k, t in enumerate(ch.terms):
        if t:
            assert t.degree("pureGhost") == k + 1
            assert t.degree("antiGhost") == k
            assert t.degree("ghostNumber") == 1
            assert t.parity == 1


def test_order_exceeded():
    with pytest.raises(OrderExceeded) as info:
        build_charge(higher_rank(), 1, strict=True)
    assert info.value.charge.certified_order == 0
    partial = build_charge(so3(), 0)
    assert not partial.certified


def test_not_first_class():
    cs = so3()
    zero = [[[cs.table.zero()] * 3 for _ in range(3)] for _ in range(3)]
    bad = ConstraintSystem(cs.space, cs.constraints, zero, check=False)
    with pytest.raises(NotFirstClass):
        build_charge(bad)


def test_rank3_open_fixture_certifies():
    ch = build_charge(open_algebra_rank3(), 3, 4)
    assert ch.certified
    assert not ch.master_defect()


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_expansion_terms(name):
    cs = FIXTURES[name]()
    S = brst_differential(cs, 3, 4)
    assert S.expansion_term(-1).agrees_with(koszul_tate(cs))
    assert S.expansion_term(0).agrees_with(longitudinal(cs))
    for g in cs.table.generators:
        total = cs.table.zero()
        for k in range(-1, S.max_shift + 1):
            total = total + expansion_term(S, k).on(g.index)
        assert total == brst_apply(S, cs.table.gen(g))
    with pytest.raises(OrderOutOfRange):
        S.expansion_term(-2)
    with pytest.raises(OrderOutOfRange):
        S.expansion_term(S.max_shift + 1)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_nilpotency_and_identities(name):
    cs = FIXTURES[name]()
    S = brst_differential(cs, 3, 4)
    assert all(not v for v in S.nilpotency_certificate().values())
    rep = structure_identities(S)
    assert rep.passed(), rep.lines()
    assert S(cs.table.one()) == cs.table.zero()


def test_s1_on_ghosts_and_higher_rank_counterexample():
    for name in ("abelian", "so3", "open"):
        S = brst_differential(FIXTURES[name](), 3, 4)
        s1 = S.expansion_term(1)
        assert all(not s1.on(g.index) for g in S.table.ghosts)
    S = brst_differential(higher_rank(), 3)
    s1 = S.expansion_term(1)
    assert str(s1.on("eta1")) == "-p2*P3*eta1*eta2*eta3"
    assert str(s1.on("eta3")) == "p2*P1*eta1*eta2*eta3"


def test_open_s1_values():
    S = brst_differential(open_algebra(), 3, 4)
    s1 = S.expansion_term(1)
    assert {k: str(v) for k, v in s1.values().items() if v} == {"p2": "-P1*eta1*eta2"}
    d = S.expansion_term(0)
    assert d(d.on("p2")) != S.table.zero()


@pytest.mark.parametrize("name", ["abelian", "so3", "open"])
def test_s1_solver(name):
    cs = FIXTURES[name]()
    sol = s1_on_antighosts(cs, longitudinal(cs), 4)
    assert sol.passed
    assert all(not v for v in sol.on_antighosts().values())
    # same defining equation as the charge's s1
    S = brst_differential(cs, 3, 4)
    from brstkit.differentials import anticommutator
    comm = anticommutator(koszul_tate(cs), S.expansion_term(1))
    for g in cs.table.generators:
        assert comm.on(g.index) == -sol.d_squared[g.name]


@pytest.mark.parametrize("seed", range(5))
def test_ghost_number_shift(seed):
    cs = open_algebra()
    S = brst_differential(cs)
    e = random_element(cs.table, random.Random(seed), n_terms=1)
    out = S(e)
    if out and e:
        assert out.is_homogeneous("ghostNumber")
        assert out.degree("ghostNumber") == e.degree("ghostNumber") + 1


def test_abelian_charge_is_exact():
    ch = build_charge(abelian(2), 0)
    assert ch.complete and ch.order == 0
