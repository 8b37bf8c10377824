"""BRST charge by homological perturbation, and the expansion S = delta + d + s_1 + ...

Sign conventions.  The differential ``S`` is the left derivation whose value on
each generator ``g`` is ``extended_bracket(g, Omega)``.  It squares to zero
exactly when ``[Omega, Omega] = 0`` in the bracket whose ghost pairing is
``[eta^a, P_b] = +delta^a_b`` (``S = -[Omega, .]`` there), so the master
equation is certified in that bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .algebra import SuperElement, coordinate_monomials
from .differentials import Derivation, anticommutator, koszul_tate
from .linalg import solve_combination
from .symplectic import ConstraintSystem, extended_bracket, verify_first_class, NotFirstClass

MASTER_GHOST_SIGN = 1


class ObstructionNotInIdeal(ArithmeticError):
    pass


class OrderExceeded(ArithmeticError):
    def __init__(self, message, charge=None):
        super().__init__(message)
        self.charge = charge


class OrderOutOfRange(IndexError):
    pass


def ghost_monomials(table, pure_ghost: int, anti_ghost: int) -> list[tuple]:
    """Canonical monomials ``eta^B P^A`` with ``|B| = pure_ghost``, ``|A| = anti_ghost``."""
    etas = [g.index for g in table.ghosts]
    Ps = [g.index for g in table.antighosts]
    out = []
    for A in combinations(Ps, anti_ghost):
        for B in combinations(etas, pure_ghost):
            out.append(tuple((i, 1) for i in sorted(A + B)))
    return out


def solve_delta_preimage(delta: Derivation, target: SuperElement, pure_ghost: int,
                         anti_ghost: int, degree_bound: int | None = None,
                         G=None) -> SuperElement:
    """Find ``X`` of the given ghost bidegree with ``delta X = target``.

    The coordinate coefficients of ``X`` have degree at most ``degree_bound``;
    unknowns are ordered by (degree, graded-lex, ghost monomial) and the earliest
    supported solution is returned.  Raises :class:`ObstructionNotInIdeal`.
    """
    table = target.table
    if not target:
        return table.zero()
    if degree_bound is None:
        min_g = min((g.max_zdegree() for g in (G or []) if g), default=1)
        degree_bound = max(target.max_zdegree() - min_g + 2, 0)
    gmonos = ghost_monomials(table, pure_ghost, anti_ghost)
    dimages = [(m, delta(table.monomial(m))) for m in gmonos]
    dimages = [(m, im) for m, im in dimages if im]
    columns = []
    unknowns = []
    for zmono in coordinate_monomials(table, degree_bound):
        zm = table.monomial(zmono)
        for m, im in dimages:
            unknowns.append((zmono, m))
            columns.append((zm * im).terms)
    sol = solve_combination(columns, target.terms) if columns else None
    if sol is None:
        raise ObstructionNotInIdeal(
            f"no preimage of {target} under delta with coefficient degree <= {degree_bound}")
    out = table.zero()
    for (zmono, m), v in zip(unknowns, sol):
        if v:
            out = out + table.monomial(zmono) * table.monomial(m).scale(v)
    assert delta(out) == target
    return out


def master_bracket(cs: ConstraintSystem, a: SuperElement, b: SuperElement) -> SuperElement:
    return extended_bracket(cs.space, a, b, ghost_sign=MASTER_GHOST_SIGN)


@dataclass
class BRSTCharge:
    system: ConstraintSystem
    terms: list[SuperElement]
    certified_order: int
    complete: bool
    requested_order: int

    @property
    def total(self) -> SuperElement:
        out = self.system.table.zero()
        for t in self.terms:
            out = out + t
        return out

    @property
    def order(self) -> int:
        """Highest antighost number carrying a nonzero term."""
        nz = [k for k, t in enumerate(self.terms) if t]
        return max(nz, default=0)

    @property
    def certified(self) -> bool:
        """``[Omega, Omega] = 0`` exactly with terms up to the requested order."""
        return self.complete

    def master_defect(self) -> SuperElement:
        """``1/2 [Omega, Omega]`` recomputed from scratch in the master bracket."""
        om = self.total
        return master_bracket(self.system, om, om).scale(Fraction(1, 2))


def build_charge(cs: ConstraintSystem, max_order: int = 3,
                 z_degree_bound: int | None = None, strict: bool = False) -> BRSTCharge:
    """Construct ``Omega = sum_k Omega_k`` order by order in the antighost number.

    ``Omega_0 = eta^a G_a`` and ``Omega_1 = 1/2 C^a_{cb} eta^b eta^c P_a``; each
    later ``Omega_{k+1}`` solves ``delta Omega_{k+1} = R_k``, the antighost-``k``
    part of ``1/2 [Omega_{<=k}, Omega_{<=k}]``.
    """
    if not verify_first_class(cs).passed:
        raise NotFirstClass("constraints are not first class with the given structure functions")
    table = cs.table
    m = cs.size
    eta = [table.gen(g) for g in table.ghosts]
    P = [table.gen(g) for g in table.antighosts]
    omega0 = table.zero()
    for a in range(m):
        omega0 = omega0 + eta[a] * cs.constraints[a]
    half = Fraction(1, 2)
    omega1 = table.zero()
    for a in range(m):
        for c in range(m):
            for b in range(m):
                C = cs.structure[c][b][a]
                if C:
                    omega1 = omega1 + (C * eta[b] * eta[c] * P[a]).scale(half)
    terms = [omega0, omega1] if max_order >= 1 else [omega0]
    delta = koszul_tate(cs)

    def defect(ts):
        om = table.zero()
        for t in ts:
            om = om + t
        return master_bracket(cs, om, om).scale(half)

    certified_order = -1
    complete = False
    while True:
        full = defect(terms)
        if not full:
            complete = True
            break
        parts = full.grade("antiGhost")
        lowest = min(parts)
        certified_order = lowest - 1
        if lowest + 1 > max_order:
            break
        if lowest < len(terms) - 1:
            raise AssertionError(f"perturbation residue at antighost {lowest} was already solved")
        X = solve_delta_preimage(delta, parts[lowest], lowest + 2, lowest + 1,
                                 z_degree_bound, cs.constraints)
        terms.append(X)
    if complete:
        certified_order = max_order
    charge = BRSTCharge(cs, terms, certified_order, complete, max_order)
    if strict and not charge.certified:
        raise OrderExceeded(f"series did not truncate by order {max_order}; "
                            f"master equation holds through antighost {certified_order}", charge)
    return charge


class BRSTDifferential:
    """``S`` realized from a charge, with its antighost expansion."""

    def __init__(self, charge: BRSTCharge):
        self.charge = charge
        self.system = charge.system
        self.table = charge.system.table
        omega = charge.total
        space = self.system.space
        action = {g.index: extended_bracket(space, self.table.gen(g), omega)
                  for g in self.table.generators}
        self.derivation = Derivation(self.table, 1, action, name="S", check=False)
        self._terms: dict[int, Derivation] = {}

    @property
    def max_shift(self) -> int:
        return max(self.charge.order, 1)

    def __call__(self, e: SuperElement) -> SuperElement:
        return self.derivation(e)

    def expansion_term(self, k: int) -> Derivation:
        """The part of ``S`` raising antighost number by exactly ``k``."""
        if not -1 <= k <= self.max_shift:
            raise OrderOutOfRange(f"expansion term {k} outside [-1, {self.max_shift}]")
        if k not in self._terms:
            action = {}
            for g in self.table.generators:
                v = self.derivation.on(g.index).part("antiGhost", g.anti_ghost + k)
                if v:
                    action[g.index] = v
            name = {-1: "delta", 0: "d"}.get(k, f"s{k}")
            self._terms[k] = Derivation(self.table, 1, action, (k + 1, k), name=name)
        return self._terms[k]

    def nilpotency_certificate(self) -> dict[str, SuperElement]:
        S = self.derivation
        return {g.name: S(S.on(g.index)) for g in self.table.generators}


def brst_differential(cs: ConstraintSystem, max_order: int = 3,
                      z_degree_bound: int | None = None) -> BRSTDifferential:
    return BRSTDifferential(build_charge(cs, max_order, z_degree_bound))


def brst_apply(S: BRSTDifferential, e: SuperElement) -> SuperElement:
    return S(e)


def expansion_term(S: BRSTDifferential, k: int) -> Derivation:
    return S.expansion_term(k)


@dataclass
class IdentityReport:
    defects: dict[str, dict[str, SuperElement]] = field(default_factory=dict)

    def passed(self, name: str | None = None) -> bool:
        names = [name] if name else list(self.defects)
        return all(not v for n in names for v in self.defects[n].values())

    def lines(self) -> list[str]:
        out = []
        for name, table in self.defects.items():
            bad = {g: v for g, v in table.items() if v}
            status = "pass" if not bad else "FAIL"
            out.append(f"{name}: {status}")
            for g, v in bad.items():
                out.append(f"  on {g}: {v}")
        return out


def structure_identities(S: BRSTDifferential) -> IdentityReport:
    """``delta^2 = 0``, ``[delta, d] = 0`` and ``d^2 = -[delta, s_1]`` on generators."""
    delta = S.expansion_term(-1)
    d = S.expansion_term(0)
    s1 = S.expansion_term(1)
    gens = S.table.generators
    dd = anticommutator(delta, d)
    ds1 = anticommutator(delta, s1)
    report = IdentityReport()
    report.defects["delta^2 = 0"] = {g.name: delta(delta.on(g.index)) for g in gens}
    report.defects["[delta, d] = 0"] = {g.name: dd.on(g.index) for g in gens}
    report.defects["d^2 = -[delta, s1]"] = {
        g.name: d(d.on(g.index)) + ds1.on(g.index) for g in gens}
    return report


@dataclass
class S1Solution:
    s1: Derivation
    d_squared: dict[str, SuperElement]
    residuals: dict[str, SuperElement]

    def on_antighosts(self) -> dict[str, SuperElement]:
        return {P.name: self.s1.on(P.index) for P in self.s1.table.antighosts}

    @property
    def passed(self) -> bool:
        return all(not v for v in self.residuals.values())


def s1_on_antighosts(cs: ConstraintSystem, d: Derivation,
                     z_degree_bound: int | None = None) -> S1Solution:
    """Solve ``[delta, s_1] = -d^2`` generator by generator.

    On coordinates ``s_1 z = rho^c_{ab}(z) eta^a eta^b P_c`` is fixed by
    ``delta(s_1 z) = -d^2 z``; the ghosts get the minimal solution (zero when
    ``d^2 eta = 0``); then ``delta(s_1 P_a) = -d^2 P_a + s_1(G_a)``.  Each step
    is an exact bounded-degree solve in place of dividing by ``G_f``.
    """
    table = cs.table
    delta = koszul_tate(cs)
    G = cs.constraints
    d2 = {g.index: d(d.on(g.index)) for g in table.generators}
    action: dict[int, SuperElement] = {}
    for z in table.coordinates:
        action[z.index] = solve_delta_preimage(delta, -d2[z.index], 2, 1, z_degree_bound, G)
    for e in table.ghosts:
        action[e.index] = solve_delta_preimage(delta, -d2[e.index], 3, 1, z_degree_bound, G)
    s1_coords = Derivation(table, 1, dict(action), check=False)
    for a, Pa in enumerate(table.antighosts):
        rhs = -d2[Pa.index] + s1_coords(G[a])
        action[Pa.index] = solve_delta_preimage(delta, rhs, 2, 2, z_degree_bound, G)
    s1 = Derivation(table, 1, action, (2, 1), name="s1")
    comm = anticommutator(delta, s1)
    residuals = {g.name: comm.on(g.index) + d2[g.index] for g in table.generators}
    return S1Solution(s1, {g.name: d2[g.index] for g in table.generators}, residuals)
