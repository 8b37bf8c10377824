import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from brstkit.algebra import GeneratorTable, random_element
from brstkit.fixtures import abelian, open_algebra, so3, system_from_strings
from brstkit.symplectic import (ConstraintSystem, GhostInBracket, NotFirstClass, NotFound,
                                NotInIdeal, PhaseSpace, extended_bracket, hamiltonian_vector_field,
                                ideal_membership, poisson_bracket, solve_structure_functions,
                                verify_first_class)
from brstkit.textform import parse_polynomial
from oracles import WordAlgebra, oracle_bracket, sympy_poisson, sympy_symbols, to_sympy

T3 = GeneratorTable.standard(3, 3)
S3 = PhaseSpace(T3)


def P(s, t=T3):
    return parse_polynomial(s, t)


def coord(seed, table=T3):
    return random_element(table, random.Random(seed), n_terms=3, max_zdegree=3,
                          generators=table.coordinates, max_odd=0)


def test_poisson_examples():
    assert poisson_bracket(S3, P("x1"), P("p1")) == P("1")
    f = P("x1*p2 - 3*x3^2")
    assert poisson_bracket(S3, f, f) == T3.zero()
    G1, G2, G3 = P("x2*p3 - x3*p2"), P("x3*p1 - x1*p3"), P("x1*p2 - x2*p1")
    assert poisson_bracket(S3, G1, G2) == G3
    with pytest.raises(GhostInBracket):
        poisson_bracket(S3, P("eta1"), P("x1"))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_poisson_matches_sympy(a, b):
    f, g = coord(a), coord(b)
    xs, ps = sympy_symbols(3)
    assert to_sympy(poisson_bracket(S3, f, g), 3) == sympy_poisson(to_sympy(f, 3), to_sympy(g, 3), xs, ps)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_poisson_jacobi(a, b, c):
    f, g, h = coord(a), coord(b), coord(c)
    br = lambda u, v: poisson_bracket(S3, u, v)
    assert br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g) == T3.zero()


def test_extended_bracket_calibration():
    cs = so3()
    t = cs.table
    omega0 = t.zero()
    for a in range(3):
        omega0 = omega0 + t.gen(t.ghost(a + 1)) * cs.constraints[a]
    for a in range(3):
        assert extended_bracket(cs.space, t.gen(t.antighost(a + 1)), omega0) == -cs.constraints[a]
    assert extended_bracket(cs.space, t.gen("eta1"), t.gen("eta2")) == t.zero()
    assert extended_bracket(cs.space, t.gen("eta1"), t.gen("P1")) == t.const(-1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.sampled_from([-1, 1]))
def test_extended_bracket_matches_oracle(a, b, sign):
    rng = random.Random(a * 7 + b)
    f = random_element(T3, rng, n_terms=3, max_zdegree=2)
    g = random_element(T3, rng, n_terms=3, max_zdegree=2)
    W = WordAlgebra.of(T3)
    assert W.from_super(extended_bracket(S3, f, g, sign)) == \
        oracle_bracket(W, W.from_super(f), W.from_super(g), 3, 3, sign)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_graded_jacobi(seed):
    rng = random.Random(seed)
    es = [random_element(T3, rng, n_terms=2, max_zdegree=2, parity=rng.randint(0, 1)) for _ in range(3)]
    br = lambda u, v: extended_bracket(S3, u, v)
    f, g, h = es
    pf, pg, ph = f.parity, g.parity, h.parity
    total = (br(f, br(g, h)).scale((-1) ** (pf * ph)) + br(g, br(h, f)).scale((-1) ** (pg * pf))
             + br(h, br(f, g)).scale((-1) ** (ph * pg)))
    assert total == T3.zero()


def test_extended_restricts_to_poisson():
    f, g = coord(1), coord(2)
    assert extended_bracket(S3, f, g) == poisson_bracket(S3, f, g)


def test_hamiltonian_vector_fields():
    cs = abelian(2)
    X = hamiltonian_vector_field(cs, 0)
    assert {k: str(v) for k, v in X.components.items()} == {0: "1"}
    cs3 = so3()
    X3 = hamiltonian_vector_field(cs3, 2)
    assert {k: str(v) for k, v in X3.components.items()} == {0: "-x2", 1: "x1", 3: "-p2", 4: "p1"}
    for seed in range(10):
        f = coord(seed, cs3.table)
        for a in range(3):
            assert hamiltonian_vector_field(cs3, a)(f) == poisson_bracket(cs3.space, f, cs3.constraints[a])


def test_constant_constraint_gives_zero_field():
    cs = system_from_strings(1, ["3"], [[["0"]]])
    assert hamiltonian_vector_field(cs, 0).is_zero()


def test_first_class_reports():
    assert verify_first_class(abelian(2)).passed
    assert verify_first_class(so3()).passed
    cs = so3()
    zero = [[[cs.table.zero()] * 3 for _ in range(3)] for _ in range(3)]
    bad = ConstraintSystem(cs.space, cs.constraints, zero, check=False)
    rep = verify_first_class(bad)
    assert not rep.passed
    assert rep.defects[(0, 1)] == cs.constraints[2]
    with pytest.raises(NotFirstClass):
        ConstraintSystem(cs.space, cs.constraints, zero)


def test_structure_closure_decomposition():
    """``[X_a, X_b] = -C^c_{ab} X_c - G_c sigma d C^c_{ab}`` for ``X_a f = [f, G_a]``."""
    for cs in (so3(), open_algebra()):
        m = cs.size
        X = [hamiltonian_vector_field(cs, a) for a in range(m)]
        for a in range(m):
            for b in range(m):
                lhs = X[a].commutator(X[b])
                rhs = None
                for c in range(m):
                    C = cs.structure[a][b][c]
                    grad = hamiltonian_vector_field(
                        ConstraintSystem(cs.space, [C] + [cs.table.zero()] * (m - 1),
                                         [[[cs.table.zero()] * m for _ in range(m)] for _ in range(m)],
                                         check=False), 0)
                    term = X[c].times(-C) - grad.times(cs.constraints[c])
                    rhs = term if rhs is None else rhs + term
                assert lhs == rhs


def test_structure_solver():
    t2 = GeneratorTable.standard(2, 2)
    s2 = PhaseSpace(t2)
    C = solve_structure_functions(s2, [P("p1", t2), P("p2", t2)])
    assert all(not x for r in C for col in r for x in col)
    cs = so3()
    C = solve_structure_functions(cs.space, cs.constraints)
    assert [[[str(x) for x in col] for col in r] for r in C] == \
        [[["0", "0", "0"], ["0", "0", "1"], ["0", "-1", "0"]],
         [["0", "0", "-1"], ["0", "0", "0"], ["1", "0", "0"]],
         [["0", "1", "0"], ["-1", "0", "0"], ["0", "0", "0"]]]
    t1 = GeneratorTable.standard(1, 2)
    with pytest.raises(NotFound):
        solve_structure_functions(PhaseSpace(t1), [P("x1", t1), P("p1", t1)], 4)


def test_ideal_membership():
    G = [P("x1*p2 - x2*p1"), P("p3"), P("x1 + p1")]
    h = ideal_membership(G[0], G, 2)
    assert [str(x) for x in h] == ["1", "0", "0"]
    r = P("x2") * G[0] + G[1].scale(3)
    h = ideal_membership(r, G, 2)
    assert sum((a * b for a, b in zip(h, G)), T3.zero()) == r
    assert [str(x) for x in h] == ["x2", "3", "0"]
    with pytest.raises(NotInIdeal):
        ideal_membership(P("1"), [P("p1")], 3)
