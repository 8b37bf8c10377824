"""Truncated complexes and exact cohomology of a differential.

Everything is computed inside the finite window of monomials with a fixed
ghost number and z-degree at most ``D``.  Since ``S`` may raise or lower the
z-degree, boundaries are taken from a wider preimage window and only the
combinations landing back inside the window are kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .algebra import COORDINATE, GeneratorTable, SuperElement, coordinate_monomials
from .differentials import Derivation, nilpotency_defect
from .linalg import Echelon, _integer_row, nullspace
from .symplectic import VectorField


class JacobiFailure(ValueError):
    pass


class RepresentationError(ValueError):
    pass


def _table(S) -> GeneratorTable:
    return S.table


def _ghost_sector(table: GeneratorTable):
    gens = [g for g in table.generators if g.kind != COORDINATE]
    if any(not g.is_odd for g in gens):
        raise ValueError("truncations support odd ghost-sector generators only")
    return gens


def truncation_basis(table: GeneratorTable, ghost_number: int, D: int) -> list[tuple]:
    """Monomials of the given ghost number and z-degree at most ``D``.

    Ordered by z-degree, then graded-lex, then ghost monomial, so the basis for
    ``D`` is a prefix of the basis for ``D + 1``.
    """
    if D < 0:
        return []
    gens = _ghost_sector(table)
    gmonos = []
    for k in range(len(gens) + 1):
        for sub in combinations(gens, k):
            if sum(g.pure_ghost - g.anti_ghost for g in sub) == ghost_number:
                gmonos.append(tuple((g.index, 1) for g in sub))
    gmonos.sort(key=lambda m: (len(m), m))
    return [z + gm for z in coordinate_monomials(table, D) for gm in gmonos]


def zdegree_shift(S) -> tuple[int, int]:
    """``(max drop, max rise)`` of z-degree when ``S`` hits one generator."""
    table = _table(S)
    action = S.derivation if hasattr(S, "derivation") else S
    drop = rise = 0
    for g in table.generators:
        v = action.on(g.index)
        if not v:
            continue
        z0 = 1 if g.kind == COORDINATE else 0
        drop = max(drop, z0 - v.min_zdegree())
        rise = max(rise, v.max_zdegree() - z0)
    return drop, rise


@dataclass
class Truncation:
    ghost_number: int
    z_degree_bound: int
    domain_basis: list[tuple]
    codomain_basis: list[tuple]
    columns: list[dict[int, Fraction]]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.codomain_basis), len(self.domain_basis)

    @property
    def matrix(self) -> list[list[Fraction]]:
        rows, cols = self.shape
        out = [[Fraction(0)] * cols for _ in range(rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def image_of(self, j: int, table: GeneratorTable) -> SuperElement:
        return SuperElement(table, {self.codomain_basis[i]: v for i, v in self.columns[j].items()})


def assemble_matrix(S, g: int, D: int) -> Truncation:
    """Matrix of ``S`` from ghost number ``g`` (z-degree <= D) to ghost number ``g + 1``."""
    table = _table(S)
    domain = truncation_basis(table, g, D)
    images = [S(table.monomial(m)) for m in domain]
    mg = table.mono_grading
    codomain = sorted({m for im in images for m in im.terms},
                      key=lambda m: (mg(m, "zDegree"), m))
    pos = {m: i for i, m in enumerate(codomain)}
    columns = [{pos[m]: c for m, c in im.terms.items()} for im in images]
    return Truncation(g, D, domain, codomain, columns)


def _boundary_echelon(S, g: int, window: int, key: dict) -> Echelon:
    """Echelon of all boundaries ``S(b)`` with ghost number ``g`` and z-degree <= window."""
    table = _table(S)
    drop, _ = zdegree_shift(S)
    mg = table.mono_grading
    pre = truncation_basis(table, g - 1, window + drop)
    images = [S(table.monomial(m)).terms for m in pre]
    high = [{m: c for m, c in im.items() if mg(m, "zDegree") > window} for im in images]
    if any(high):
        combos = nullspace(high)
    else:
        combos = [[Fraction(int(i == j)) for i in range(len(images))] for j in range(len(images))]
    ech = Echelon()
    for vec in combos:
        acc: dict = {}
        for cj, im in zip(vec, images):
            if not cj:
                continue
            for m, c in im.items():
                acc[m] = acc.get(m, 0) + cj * c
        row = {key[m]: v for m, v in acc.items() if v}
        if row:
            ech.add(row)
    return ech


def _cycles(S, g: int, D: int) -> tuple[list[tuple], list[dict[int, Fraction]]]:
    table = _table(S)
    basis = truncation_basis(table, g, D)
    images = [S(table.monomial(m)).terms for m in basis]
    vecs = nullspace(images)
    return basis, [{j: v for j, v in enumerate(vec) if v} for vec in vecs]


def _count_independent(cycles, ech: Echelon, table, basis) -> tuple[int, list[SuperElement]]:
    reps = []
    for vec in cycles:
        red = ech.reduce(_integer_row(vec))
        if red:
            reps.append(SuperElement(table, {basis[k]: Fraction(v) for k, v in red.items()}))
            ech.pivots[min(red)] = red
    return len(reps), reps


@dataclass
class CohomologyResult:
    ghost_number: int
    z_degree_bound: int
    dimension: int
    representatives: list[SuperElement]
    kernel_dimension: int
    boundary_rank: int
    stable: bool
    next_dimension: int | None = None
    notes: list[str] = field(default_factory=list)


def filtered_dimension(S, g: int, D: int, window: int) -> int:
    """Number of classes of degree-<=D cycles that stay nontrivial modulo boundaries of degree <= window."""
    table = _table(S)
    big = truncation_basis(table, g, window)
    key = {m: i for i, m in enumerate(big)}
    basis, cycles = _cycles(S, g, D)
    ech = _boundary_echelon(S, g, window, key)
    n, _ = _count_independent(cycles, ech, table, big)
    return n


def cohomology_dim(S, g: int, D: int, check_stability: bool = True) -> CohomologyResult:
    """Exact ``dim H^g`` of the degree-``D`` truncation, with representatives.

    The result is flagged stable when no class found at ``D`` becomes exact once
    boundaries of z-degree ``D + 1`` are allowed.
    """
    table = _table(S)
    basis, cycles = _cycles(S, g, D)
    key = {m: i for i, m in enumerate(basis)}
    ech = _boundary_echelon(S, g, D, key)
    b_rank = ech.rank
    dim, reps = _count_independent(cycles, ech, table, basis)
    stable = True
    nxt = None
    if check_stability:
        nxt = filtered_dimension(S, g, D, D + 1)
        stable = nxt == dim
    return CohomologyResult(g, D, dim, reps, len(cycles), b_rank, stable, nxt)


def jacobi_defects(f: Sequence[Sequence[Sequence]]) -> dict[tuple[int, int, int, int], Fraction]:
    """``f^d_{ab} f^e_{dc} + cyclic(a, b, c)``; ``f[a][b][c] = f^c_{ab}``."""
    m = len(f)
    out = {}
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for e in range(m):
                    s = Fraction(0)
                    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                        for d in range(m):
                            s += Fraction(f[x][y][d]) * Fraction(f[d][z][e])
                    if s:
                        out[(a, b, c, e)] = s
    return out


def ce_complex(structure_constants: Sequence[Sequence[Sequence]],
               representation: Sequence | None = None, ghost_count: int | None = None,
               coordinate_names: Sequence[str] | None = None) -> Derivation:
    """Chevalley-Eilenberg differential on functions times ``C[eta]``.

    ``structure_constants[a][b][c] = f^c_{ab}``.  ``representation`` is either
    ``None`` (trivial action on the ground field), a list of
    :class:`VectorField` objects, or a list of square matrices ``M_a`` acting on
    linear coordinates ``v1..vN`` by ``rho_a(v_i) = sum_j M_a[i][j] v_j``.
    The sign conventions follow the longitudinal differential, so the action
    must satisfy ``[rho_b, rho_c] = f^a_{cb} rho_a`` for ``d^2 = 0``.
    """
    f = [[[Fraction(x) for x in row] for row in mat] for mat in structure_constants]
    m = len(f) if ghost_count is None else ghost_count
    if len(f) != m or any(len(r) != m or any(len(x) != m for x in r) for r in f):
        raise ValueError("structure constants must be an m x m x m array")
    for a in range(m):
        for b in range(m):
            for c in range(m):
                if f[a][b][c] != -f[b][a][c]:
                    raise ValueError("structure constants must be antisymmetric in a, b")
    bad = jacobi_defects(f)
    if bad:
        raise JacobiFailure(f"Jacobi identity fails at {min(bad)}")
    rep = list(representation) if representation else []
    if rep and isinstance(rep[0], VectorField):
        table = rep[0].table
        fields = rep
    else:
        n = len(rep[0]) if rep else 0
        names = list(coordinate_names) if coordinate_names else [f"v{i}" for i in range(1, n + 1)]
        table = GeneratorTable.standard(names, m, antighosts=False)
        fields = []
        for M in rep:
            comps = {}
            for i in range(n):
                acc = table.zero()
                for j in range(n):
                    if M[i][j]:
                        acc = acc + table.gen(names[j]).scale(M[i][j])
                comps[i] = acc
            fields.append(VectorField(table, comps))
    if fields and len(fields) != m:
        raise RepresentationError("one action per Lie algebra basis element is required")
    eta = [table.gen(g) for g in table.ghosts]
    action = {}
    for lam, z in enumerate(table.coordinates):
        acc = table.zero()
        for a, X in enumerate(fields):
            comp = X.component(lam)
            if comp:
                acc = acc + comp * eta[a]
        action[z.index] = acc
    half = Fraction(-1, 2)
    for a in range(m):
        acc = table.zero()
        for c in range(m):
            for b in range(m):
                if f[c][b][a]:
                    acc = acc + (eta[b] * eta[c]).scale(half * f[c][b][a])
        action[table.ghosts[a].index] = acc
    d = Derivation(table, 1, action, (1, 0), name="d_CE")
    if any(nilpotency_defect(d).values()):
        raise RepresentationError("d^2 != 0: the action is not compatible with the structure constants")
    return d


def su2_constants() -> list[list[list[int]]]:
    """``f^c_{ab} = eps_{abc}``."""
    f = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        f[a][b][c] = 1
        f[b][a][c] = -1
    return f
