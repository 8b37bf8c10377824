"""Graded derivations given on generators and extended by the left Leibniz rule.

``D(ab) = D(a) b + (-1)^{|D||a|} a D(b)``
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .algebra import GeneratorTable, SuperElement
from .symplectic import ConstraintSystem, hamiltonian_vector_field


class ParityMismatch(ValueError):
    pass


class GradingError(ValueError):
    pass


class Derivation:
    """A graded derivation stored by its values on generators.

    ``shift`` is ``(delta pureGhost, delta antiGhost)``; ``aux_shift`` is the
    change of auxiliary degree.  Generators missing from ``action`` are sent
    to zero.
    """

    def __init__(self, table: GeneratorTable, parity: int, action: Mapping,
                 shift: tuple[int, int] | None = None, aux_shift: int | None = None,
                 name: str = "D", check: bool = True):
        self.table = table
        self.parity = parity % 2
        self.shift = shift
        self.aux_shift = aux_shift
        self.name = name
        self.action: dict[int, SuperElement] = {}
        for g, v in action.items():
            idx = table._resolve(g)
            if v:
                self.action[idx] = v
        self._cache: dict = {}
        if check:
            self._check_gradings()

    def _check_gradings(self):
        mg = self.table.mono_grading
        for idx, v in self.action.items():
            gmono = ((idx, 1),)
            want_par = (self.table.parities[idx] + self.parity) % 2
            for mono in v.terms:
                if mg(mono, "parity") != want_par:
                    raise GradingError(f"{self.name} on {self.table.generators[idx].name}: wrong parity")
                if self.shift is not None:
                    dpg = mg(mono, "pureGhost") - mg(gmono, "pureGhost")
                    dag = mg(mono, "antiGhost") - mg(gmono, "antiGhost")
                    if (dpg, dag) != tuple(self.shift):
                        raise GradingError(
                            f"{self.name} on {self.table.generators[idx].name}: "
                            f"shift {(dpg, dag)} != {tuple(self.shift)}")
                if self.aux_shift is not None:
                    if mg(mono, "aux") - mg(gmono, "aux") != self.aux_shift:
                        raise GradingError(f"{self.name}: aux shift violated")

    def on(self, g) -> SuperElement:
        return self.action.get(self.table._resolve(g), self.table.zero())

    def _apply_monomial(self, mono) -> dict:
        cached = self._cache.get(mono)
        if cached is not None:
            return cached
        table = self.table
        par = table.parities
        out = table.zero()
        prefix_parity = 0
        for pos, (g, e) in enumerate(mono):
            dg = self.action.get(g)
            if dg is not None:
                if par[g]:
                    piece = dg
                else:
                    rest = ((g, e - 1),) if e > 1 else ()
                    piece = dg.scale(e) * table.monomial(rest) if rest else dg.scale(e)
                left = table.monomial(mono[:pos])
                right = table.monomial(mono[pos + 1:])
                term = left * piece * right
                if self.parity and prefix_parity:
                    term = -term
                out = out + term
            prefix_parity ^= (par[g] * e) % 2
        self._cache[mono] = out.terms
        return out.terms

    def __call__(self, e: SuperElement) -> SuperElement:
        out: dict = {}
        for mono, c in e.terms.items():
            for m, v in self._apply_monomial(mono).items():
                nv = out.get(m, 0) + c * v
                if nv:
                    out[m] = nv
                else:
                    out.pop(m, None)
        return SuperElement(self.table, out)

    def values(self) -> dict[str, SuperElement]:
        gens = self.table.generators
        return {g.name: self.action.get(g.index, self.table.zero()) for g in gens}

    def __add__(self, other: "Derivation") -> "Derivation":
        if other.parity != self.parity:
            raise ParityMismatch("cannot add derivations of different parity")
        action = dict(self.action)
        for g, v in other.action.items():
            action[g] = action[g] + v if g in action else v
        shift = self.shift if self.shift == other.shift else None
        return Derivation(self.table, self.parity, action, shift, None,
                          f"{self.name}+{other.name}", check=False)

    def agrees_with(self, other: "Derivation") -> bool:
        return all(self.on(g.index) == other.on(g.index) for g in self.table.generators)

    def __repr__(self):
        return f"Derivation({self.name}, parity={self.parity}, shift={self.shift})"


def apply_derivation(D: Derivation, e: SuperElement) -> SuperElement:
    return D(e)


def koszul_tate(cs: ConstraintSystem) -> Derivation:
    """``delta P_a = -G_a``; ``delta`` kills coordinates and ghosts."""
    action = {P.index: -G for P, G in zip(cs.table.antighosts, cs.constraints)}
    return Derivation(cs.table, 1, action, (0, -1), name="delta")


def longitudinal(cs: ConstraintSystem) -> Derivation:
    """The longitudinal differential ``d``.

    ``d z = (X_a z) eta^a``, ``d eta^a = -1/2 C^a_{cb} eta^b eta^c`` and
    ``d P_a = -eta^c C^b_{ca} P_b``.
    """
    table = cs.table
    m = cs.size
    eta = [table.gen(g) for g in table.ghosts]
    P = [table.gen(g) for g in table.antighosts]
    fields = [hamiltonian_vector_field(cs, a) for a in range(m)]
    action: dict[int, SuperElement] = {}
    for lam, z in enumerate(table.coordinates):
        acc = table.zero()
        for a in range(m):
            comp = fields[a].component(lam)
            if comp:
                acc = acc + comp * eta[a]
        action[z.index] = acc
    half = Fraction(1, 2)
    for a in range(m):
        acc = table.zero()
        for c in range(m):
            for b in range(m):
                C = cs.structure[c][b][a]
                if C:
                    acc = acc + (C * eta[b] * eta[c]).scale(-half)
        action[table.ghosts[a].index] = acc
    for a in range(m):
        acc = table.zero()
        for c in range(m):
            for b in range(m):
                C = cs.structure[c][a][b]
                if C:
                    acc = acc - eta[c] * C * P[b]
        action[table.antighosts[a].index] = acc
    return Derivation(table, 1, action, (1, 0), name="d")


def compose(D1: Derivation, D2: Derivation, g) -> SuperElement:
    return D1(D2.on(g))


def anticommutator(D1: Derivation, D2: Derivation, name: str | None = None) -> Derivation:
    """``[D1, D2] = D1 D2 + D2 D1`` for odd ``D1, D2``, as an even derivation."""
    if D1.parity != 1 or D2.parity != 1:
        raise ParityMismatch("anticommutator is defined for odd derivations only")
    table = D1.table
    action = {}
    for g in table.generators:
        v = D1(D2.on(g.index)) + D2(D1.on(g.index))
        if v:
            action[g.index] = v
    shift = None
    if D1.shift is not None and D2.shift is not None:
        shift = (D1.shift[0] + D2.shift[0], D1.shift[1] + D2.shift[1])
    return Derivation(table, 0, action, shift, None, name or f"[{D1.name},{D2.name}]",
                      check=False)


def nilpotency_defect(D: Derivation) -> dict[str, SuperElement]:
    """``g -> D(D(g))`` on every generator; all zero iff ``D^2 = 0``."""
    if D.parity != 1:
        raise ParityMismatch("nilpotency defect is defined for odd derivations")
    return {g.name: D(D.on(g.index)) for g in D.table.generators}


def is_nilpotent(D: Derivation) -> bool:
    return all(not v for v in nilpotency_defect(D).values())


def d_squared_formula(cs: ConstraintSystem, f: SuperElement) -> SuperElement:
    """``1/2 ([X_i, X_j] f - C^k_{ji} X_k f) eta^i eta^j`` for a coordinate function ``f``.

    ``C^k_{ji}`` (reversed indices) is the coefficient that ``d eta^k`` carries
    in front of ``eta^i eta^j``; with it the expression equals ``d(d f)``.
    """
    table = cs.table
    m = cs.size
    X = [hamiltonian_vector_field(cs, a) for a in range(m)]
    Xf = [x(f) for x in X]
    eta = [table.gen(g) for g in table.ghosts]
    out = table.zero()
    half = Fraction(1, 2)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            coeff = X[i](Xf[j]) - X[j](Xf[i])
            for k in range(m):
                C = cs.structure[j][i][k]
                if C and Xf[k]:
                    coeff = coeff - C * Xf[k]
            if coeff:
                out = out + (coeff * eta[i] * eta[j]).scale(half)
    return out
