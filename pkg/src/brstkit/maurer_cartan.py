"""Maurer-Cartan data of the BRST differential.

Multi-ghosts ``omega^I = eta^{b_1} ... eta^{b_{p+1}} P_{a_p} ... P_{a_1}`` are odd
and have ghost number one.  The differential then reads

    S f       = (rho_I f) omega^I
    S omega^K = -1/2 C^K_{IJ} omega^I omega^J

with ``C^K_{IJ} = -C^K_{JI}``.  On the order-0 block ``C^a_{(b)(c)}`` equals the
structure function ``C^a_{cb}`` (note the index order).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra import GeneratorTable, SuperElement, coordinate_monomials, mono_mul
from .brst import BRSTDifferential
from .linalg import solve_combination
from .symplectic import (ConstraintSystem, NotInIdeal, VectorField,
                         hamiltonian_vector_field, ideal_membership)


class NotInMultiGhostSpan(ArithmeticError):
    pass


class NotInProductSpan(ArithmeticError):
    pass


@dataclass(frozen=True, order=True)
class MultiGhostIndex:
    """Ghost labels ``b_1 < ... < b_{p+1}`` and antighost labels ``a_1 < ... < a_p``."""

    order: int
    ghosts: tuple[int, ...]
    antighosts: tuple[int, ...]

    def __post_init__(self):
        if len(self.ghosts) != len(self.antighosts) + 1 or self.order != len(self.antighosts):
            raise ValueError("a multi-ghost has one more ghost than antighosts")

    @classmethod
    def of(cls, ghosts: Sequence[int], antighosts: Sequence[int] = ()) -> "MultiGhostIndex":
        return cls(len(antighosts), tuple(sorted(ghosts)), tuple(sorted(antighosts)))

    def element(self, table: GeneratorTable) -> SuperElement:
        seq = [table.ghost(b) for b in self.ghosts] + \
              [table.antighost(a) for a in reversed(self.antighosts)]
        return table.normalize([(1, seq)])

    def __str__(self):
        b = ",".join(map(str, self.ghosts))
        a = ",".join(map(str, self.antighosts))
        return f"({b};{a})"


def enumerate_multi_ghosts(table: GeneratorTable | int, max_order: int) -> list[tuple[MultiGhostIndex, SuperElement]]:
    """All multi-ghosts of order at most ``max_order``; an integer means ``M`` bare ghost pairs."""
    if isinstance(table, int):
        table = GeneratorTable.standard(0, table)
    m = len(table.ghosts)
    out = []
    for p in range(max_order + 1):
        if p + 1 > m:
            break
        for A in combinations(range(1, m + 1), p):
            for B in combinations(range(1, m + 1), p + 1):
                idx = MultiGhostIndex(p, B, A)
                out.append((idx, idx.element(table)))
    return out


class _Basis:
    """Multi-ghosts with lookup from canonical monomial to (index, sign)."""

    def __init__(self, table: GeneratorTable, max_order: int):
        self.table = table
        self.items = enumerate_multi_ghosts(table, max_order)
        self.indices = [i for i, _ in self.items]
        self.elements = dict(self.items)
        self.lookup = {}
        for idx, el in self.items:
            (mono, c), = el.terms.items()
            self.lookup[mono] = (idx, int(c))
        self._products = None

    def products(self) -> dict:
        """``monomial -> [(I, J, sign)]`` with ``omega^I omega^J = sign * monomial``, ``I < J``."""
        if self._products is None:
            par = self.table.parities
            prods: dict = {}
            for i, I in enumerate(self.indices):
                (mi, ci), = self.elements[I].terms.items()
                for J in self.indices[i + 1:]:
                    (mj, cj), = self.elements[J].terms.items()
                    res = mono_mul(par, mi, mj)
                    if res is None:
                        continue
                    s, mono = res
                    prods.setdefault(mono, []).append((I, J, int(s * ci * cj)))
            self._products = prods
        return self._products


@dataclass
class MCData:
    table: GeneratorTable
    multi_ghosts: list[MultiGhostIndex]
    elements: dict[MultiGhostIndex, SuperElement]
    rho: dict[MultiGhostIndex, VectorField]
    structure: dict[tuple[MultiGhostIndex, MultiGhostIndex, MultiGhostIndex], SuperElement] = field(default_factory=dict)
    basis: _Basis | None = None

    def C(self, K, I, J) -> SuperElement:
        return self.structure.get((K, I, J), self.table.zero())

    def nonzero_structure(self):
        return {k: v for k, v in self.structure.items() if v}


def _default_order(S: BRSTDifferential) -> int:
    return max(len(S.table.ghosts) - 1, 0)


def rho_apply(S: BRSTDifferential, I: MultiGhostIndex, f: SuperElement,
              basis: _Basis | None = None) -> SuperElement:
    """``rho_I f`` read off directly as the ``omega^I`` coefficient of ``S f``."""
    basis = basis or _Basis(S.table, _default_order(S))
    target = basis.elements[I]
    (mono, sign), = target.terms.items()
    coeffs = S(f).by_ghost_monomial()
    c = coeffs.get(mono)
    return c.scale(sign) if c is not None else S.table.zero()


def extract_rho(S: BRSTDifferential, max_order: int | None = None) -> MCData:
    table = S.table
    basis = _Basis(table, _default_order(S) if max_order is None else max_order)
    comps: dict[MultiGhostIndex, dict[int, SuperElement]] = {I: {} for I in basis.indices}
    for lam, z in enumerate(table.coordinates):
        Sz = S(table.gen(z))
        for gmono, coeff in Sz.by_ghost_monomial().items():
            hit = basis.lookup.get(gmono)
            if hit is None:
                raise NotInMultiGhostSpan(f"S({z.name}) has a term outside the multi-ghost span")
            I, sign = hit
            comps[I][lam] = coeff.scale(sign)
    rho = {I: VectorField(table, comps[I]) for I in basis.indices}
    return MCData(table, basis.indices, basis.elements, rho, {}, basis)


def extract_structure(S: BRSTDifferential, max_order: int | None = None,
                      mc: MCData | None = None) -> MCData:
    """Fill in ``C^K_{IJ}`` from ``S omega^K``.

    A ghost monomial reachable by several products ``omega^I omega^J`` is
    charged to the first such pair in index order.
    """
    if mc is None:
        mc = extract_rho(S, max_order)
    basis = mc.basis
    prods = basis.products()
    structure = {}
    for K in basis.indices:
        SK = S(basis.elements[K])
        for gmono, coeff in SK.by_ghost_monomial().items():
            pairs = prods.get(gmono)
            if not pairs:
                raise NotInProductSpan(f"S omega^{K} leaves the span of multi-ghost products")
            I, J, sign = pairs[0]
            value = coeff.scale(-sign)
            prev = structure.get((K, I, J))
            value = prev + value if prev is not None else value
            structure[(K, I, J)] = value
            structure[(K, J, I)] = -value
    mc.structure = {k: v for k, v in structure.items() if v}
    return mc


def maurer_cartan(S: BRSTDifferential, max_order: int | None = None) -> MCData:
    return extract_structure(S, max_order)


def reconstruct(mc: MCData, target) -> SuperElement:
    """Rebuild ``S`` on a coordinate generator or on a multi-ghost from MC data."""
    table = mc.table
    if isinstance(target, MultiGhostIndex):
        out = table.zero()
        half = Fraction(-1, 2)
        for (K, I, J), c in mc.structure.items():
            if K == target:
                out = out + (c * mc.elements[I] * mc.elements[J]).scale(half)
        return out
    lam = [z.name for z in table.coordinates].index(target)
    out = table.zero()
    for I in mc.multi_ghosts:
        comp = mc.rho[I].component(lam)
        if comp:
            out = out + comp * mc.elements[I]
    return out


def round_trip_residuals(S: BRSTDifferential, mc: MCData) -> dict[str, SuperElement]:
    res = {}
    for z in S.table.coordinates:
        res[z.name] = S(S.table.gen(z)) - reconstruct(mc, z.name)
    for K in mc.multi_ghosts:
        res[f"omega{K}"] = S(mc.elements[K]) - reconstruct(mc, K)
    return res


@dataclass
class LemmaReport:
    entries: list[tuple[str, SuperElement, SuperElement]]

    @property
    def passed(self) -> bool:
        return all(not lhs and not res for _, lhs, res in self.entries)

    def lines(self) -> list[str]:
        return [f"f = {f}: S^2 f = {lhs}; residual = {res}" for f, lhs, res in self.entries]


def lemma_rhs(mc: MCData, f: SuperElement) -> SuperElement:
    """``1/2 ([rho_J, rho_I] f - C^K_{JI} rho_K f) omega^J omega^I``."""
    table = mc.table
    rf = {I: mc.rho[I](f) for I in mc.multi_ghosts}
    out = table.zero()
    half = Fraction(1, 2)
    for J in mc.multi_ghosts:
        for I in mc.multi_ghosts:
            prod = mc.elements[J] * mc.elements[I]
            if not prod:
                continue
            coeff = mc.rho[J](rf[I]) - mc.rho[I](rf[J])
            for K in mc.multi_ghosts:
                c = mc.structure.get((K, J, I))
                if c and rf[K]:
                    coeff = coeff - c * rf[K]
            if coeff:
                out = out + (coeff * prod).scale(half)
    return out


def lemma_check(S: BRSTDifferential, mc: MCData, functions: Sequence[SuperElement]) -> LemmaReport:
    entries = []
    for f in functions:
        lhs = S(S(f))
        entries.append((str(f), lhs, lhs - lemma_rhs(mc, f)))
    return LemmaReport(entries)


def jacobi_sum(mc: MCData, K: MultiGhostIndex) -> SuperElement:
    """``sum_{I,J,E} (rho_I C^K_{JE} + C^M_{JE} C^K_{IM}) omega^I omega^J omega^E``, cyclically summed.

    When ``S^2 f = 0`` for all ``f`` this equals ``-6 S^2 omega^K``.
    """
    table = mc.table
    by_first: dict = {}
    for (L, A, B), c in mc.structure.items():
        by_first.setdefault(L, []).append((A, B, c))
    out = table.zero()
    for J, E, cK in by_first.get(K, []):
        wJE = mc.elements[J] * mc.elements[E]
        if not wJE:
            continue
        for I in mc.multi_ghosts:
            t = mc.rho[I](cK)
            if t:
                out = out + (t * mc.elements[I] * wJE).scale(3)
    # C^M_{JE} C^K_{IM}
    for I, M, cKIM in by_first.get(K, []):
        for J, E, cM in by_first.get(M, []):
            prod = mc.elements[I] * mc.elements[J] * mc.elements[E]
            if prod:
                out = out + (cM * cKIM * prod).scale(3)
    return out


@dataclass
class ClosureEntry:
    I: MultiGhostIndex
    J: MultiGhostIndex
    closed: bool
    coefficients: dict[MultiGhostIndex, SuperElement]
    structure_valid: bool
    unique: bool


@dataclass
class ClosureReport:
    entries: list[ClosureEntry]

    @property
    def passed(self) -> bool:
        return all(e.closed for e in self.entries)

    def unique_consistent(self) -> bool:
        return all(e.structure_valid for e in self.entries if e.unique)

    def lines(self) -> list[str]:
        out = []
        for e in self.entries:
            if not e.closed:
                out.append(f"[rho{e.I}, rho{e.J}] not in the module span")
            elif e.unique and not e.structure_valid:
                out.append(f"[rho{e.I}, rho{e.J}] != C^K_IJ rho_K")
        return out


def _field_key_columns(field_: VectorField, zmono) -> dict:
    table = field_.table
    zm = table.monomial(zmono)
    out = {}
    for lam, comp in field_.components.items():
        for mono, c in (zm * comp).terms.items():
            out[(lam, mono)] = c
    return out


def express_in_span(target: VectorField, fields: dict, degree_bound: int):
    """Polynomials ``f^K`` (degree <= bound) with ``target = f^K fields[K]`` or ``None``."""
    table = target.table
    if target.is_zero():
        return {}
    columns, unknowns = [], []
    for zmono in coordinate_monomials(table, degree_bound):
        for K, fld in fields.items():
            if fld.is_zero():
                continue
            unknowns.append((K, zmono))
            columns.append(_field_key_columns(fld, zmono))
    rhs = {}
    for lam, comp in target.components.items():
        for mono, c in comp.terms.items():
            rhs[(lam, mono)] = c
    sol = solve_combination(columns, rhs) if columns else None
    if sol is None:
        return None
    coeffs: dict = {}
    for (K, zmono), v in zip(unknowns, sol):
        if v:
            coeffs[K] = coeffs.get(K, table.zero()) + table.monomial(zmono).scale(v)
    return coeffs


def lie_closure(mc: MCData, degree_bound: int = 2) -> ClosureReport:
    """Check that ``[rho_I, rho_J]`` lies in the module spanned by the ``rho_K``."""
    prods = mc.basis.products()
    shared = {}
    for mono, pairs in prods.items():
        for I, J, _ in pairs:
            shared[(I, J)] = len(pairs) == 1
    entries = []
    idx = mc.multi_ghosts
    for a, I in enumerate(idx):
        for J in idx[a + 1:]:
            comm = mc.rho[I].commutator(mc.rho[J])
            expected = VectorField(mc.table, {})
            for K in idx:
                c = mc.structure.get((K, I, J))
                if c:
                    expected = expected + mc.rho[K].times(c)
            valid = (comm - expected).is_zero()
            if valid:
                coeffs = {K: mc.structure[(K, I, J)] for K in idx if (K, I, J) in mc.structure}
                closed = True
            else:
                coeffs = express_in_span(comm, mc.rho, degree_bound)
                closed = coeffs is not None
            entries.append(ClosureEntry(I, J, closed, coeffs or {}, valid,
                                        shared.get((I, J), False)))
    return ClosureReport(entries)


@dataclass
class GaugeClosureReport:
    defects: dict[tuple[int, int], VectorField]
    second_order: dict[tuple[int, int, int], VectorField]
    agrees_with_rho: dict[tuple[int, int], bool]
    equal_to_rho: dict[tuple[int, int], bool]
    closure: ClosureReport

    @property
    def passed(self) -> bool:
        return all(self.agrees_with_rho.values()) and self.closure.passed

    def defect_free(self) -> bool:
        return all(v.is_zero() for v in self.defects.values())


def gauge_closure(cs: ConstraintSystem, mc: MCData, degree_bound: int | None = None,
                  closure_bound: int = 2) -> GaugeClosureReport:
    """Express ``[X_i, X_j] - C^k_{(i)(j)} X_k`` as ``G_c rho^c_{ij}`` (``i < j``).

    ``C^k_{(i)(j)} = C^k_{ji}`` is the order-0 Maurer-Cartan coefficient.  The
    ideal solution is compared with the order-1 fields ``rho_{(ij;c)}``.
    """
    table = cs.table
    m = cs.size
    X = [hamiltonian_vector_field(cs, a) for a in range(m)]
    G = cs.constraints
    defects, second, agrees, equal = {}, {}, {}, {}
    for i in range(m):
        for j in range(i + 1, m):
            D = X[i].commutator(X[j])
            for k in range(m):
                c = cs.structure[j][i][k]
                if c:
                    D = D - X[k].times(c)
            defects[(i, j)] = D
            comps: list[dict[int, SuperElement]] = [{} for _ in range(m)]
            for lam, comp in D.components.items():
                try:
                    h = ideal_membership(comp, G, degree_bound)
                except NotInIdeal as exc:
                    from .brst import ObstructionNotInIdeal
                    raise ObstructionNotInIdeal(str(exc)) from None
                for c in range(m):
                    if h[c]:
                        comps[c][lam] = h[c]
            for c in range(m):
                second[(i, j, c)] = VectorField(table, comps[c])
            # order-1 fields from the MC extraction
            rebuilt = VectorField(table, {})
            same = True
            for c in range(m):
                I = MultiGhostIndex.of((i + 1, j + 1), (c + 1,))
                r = mc.rho.get(I, VectorField(table, {}))
                rebuilt = rebuilt + r.times(G[c])
                same = same and r == second[(i, j, c)]
            agrees[(i, j)] = (rebuilt - D).is_zero()
            equal[(i, j)] = same
    return GaugeClosureReport(defects, second, agrees, equal, lie_closure(mc, closure_bound))
