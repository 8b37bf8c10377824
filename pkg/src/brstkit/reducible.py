"""Reducible constraint data, the auxiliary differential and generalized MC forms.

Reducibility functions are stored as ``Z[k][a_k][a_{k-1}] = Z^{a_{k-1}}_{a_k}``
for ``k = 1..L``; the level-``k`` relation (``k >= 2``) reads

    Z^{a_{k-1}}_{a_k} Z^{a_{k-2}}_{a_{k-1}} = (-1)^{eps_{a_{k-2}}} C^{a_{k-2}, a_0}_{a_k} G_{a_0}

with ``C[k][a_k][a_{k-2}][a_0]``.  At level one the relation is ``Z^{a_0}_{a_1} G_{a_0} = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .algebra import COORDINATE, GeneratorTable, SuperElement
from .brst import ObstructionNotInIdeal
from .differentials import Derivation, nilpotency_defect
from .symplectic import NotInIdeal, ideal_membership
from .textform import parse_polynomial


class NotInProductSpan(ArithmeticError):
    pass


class NotAComplex(ValueError):
    pass


@dataclass
class ReducibilityData:
    """Reducibility functions up to level ``L = len(Z)``.

    ``counts[k]`` is ``m_k``; ``parities[k][a]`` is ``eps_{a_k}`` (constraints
    are bosonic, so level 0 parities are 0).
    """

    counts: list[int]
    Z: list[list[list[SuperElement]]]
    C: dict[int, list[list[list[SuperElement]]]] = field(default_factory=dict)
    parities: list[list[int]] | None = None

    def __post_init__(self):
        if len(self.counts) != len(self.Z) + 1:
            raise ValueError("one count per level is required")
        for k, Zk in enumerate(self.Z, start=1):
            if len(Zk) != self.counts[k] or any(len(r) != self.counts[k - 1] for r in Zk):
                raise ValueError(f"Z at level {k} must be {self.counts[k]} x {self.counts[k - 1]}")
            if any(not z.is_coordinate_only() for r in Zk for z in r):
                raise ValueError("reducibility functions must be coordinate-only")
        if self.parities is None:
            self.parities = [[0] * m for m in self.counts]

    @property
    def levels(self) -> int:
        return len(self.Z)

    def eps(self, k: int, a: int) -> int:
        return self.parities[k][a]

    def z(self, k: int, a_k: int, a_prev: int) -> SuperElement:
        return self.Z[k - 1][a_k][a_prev]

    @classmethod
    def from_strings(cls, table: GeneratorTable, Z, C=None, parities=None) -> "ReducibilityData":
        """Parse ``Z[k-1][a_k][a_{k-1}]`` and ``C[k][a_k][a_{k-2}][a_0]`` (``k >= 2``) strings."""
        Zs = [[[parse_polynomial(str(x), table) for x in row] for row in level] for level in Z]
        if not Zs:
            raise ValueError("at least one level of reducibility functions is required")
        counts = [len(Zs[0][0]) if Zs[0] else 0] + [len(level) for level in Zs]
        Cs = {}
        for key, block in (C or {}).items():
            Cs[int(key)] = [[[parse_polynomial(str(x), table) for x in r0] for r0 in r1] for r1 in block]
        return cls(counts, Zs, Cs, parities)


def reducible_table(coordinates, rd: ReducibilityData, antighosts: bool = False) -> GeneratorTable:
    """Coordinates, the ghosts ``eta^{a_0}`` and the higher ghosts ``etaK_i`` (level K)."""
    return GeneratorTable.standard(coordinates, rd.counts[0], antighosts=antighosts,
                                   higher=rd.counts[1:], higher_parities=rd.parities[1:])


@dataclass
class RelationReport:
    relations: list[tuple[int, int, int, SuperElement]]

    @property
    def passed(self) -> bool:
        return all(not d for *_, d in self.relations)

    def lines(self) -> list[str]:
        out = []
        for k, a, b, d in self.relations:
            status = "pass" if not d else f"FAIL defect {d}"
            out.append(f"level {k} relation ({a + 1}, {b + 1}): {status}")
        return out


def verify_reducibility(G: Sequence[SuperElement], rd: ReducibilityData) -> RelationReport:
    """Check every level relation exactly; an irreducible system passes vacuously."""
    rel = []
    if rd.levels and len(G) != rd.counts[0]:
        raise ValueError("level-0 count must equal the number of constraints")
    for k in range(1, rd.levels + 1):
        for ak in range(rd.counts[k]):
            if k == 1:
                d = G[0].table.zero() if G else None
                for a0 in range(rd.counts[0]):
                    d = d + rd.z(1, ak, a0) * G[a0]
                rel.append((1, ak, 0, d))
                continue
            Ck = rd.C.get(k)
            for a2 in range(rd.counts[k - 2]):
                d = G[0].table.zero()
                for a1 in range(rd.counts[k - 1]):
                    d = d + rd.z(k, ak, a1) * rd.z(k - 1, a1, a2)
                if Ck is not None:
                    sign = -1 if rd.eps(k - 2, a2) % 2 else 1
                    for a0 in range(rd.counts[0]):
                        c = Ck[ak][a2][a0]
                        if c:
                            d = d - (c * G[a0]).scale(sign)
                rel.append((k, ak, a2, d))
    return RelationReport(rel)


def _level_ghosts(table: GeneratorTable, k: int):
    return table.ghosts if k == 0 else table.higher_ghosts(k)


def auxiliary_differential(rd: ReducibilityData, table: GeneratorTable) -> Derivation:
    """``Delta F = 0`` and ``Delta eta^{a_k} = eta^{a_{k+1}} Z^{a_k}_{a_{k+1}} (-1)^{eps_{a_k} + k + 1}``."""
    action = {}
    for k in range(rd.levels):
        here = _level_ghosts(table, k)
        nxt = _level_ghosts(table, k + 1)
        for a, g in enumerate(here):
            sign = -1 if (rd.eps(k, a) + k + 1) % 2 else 1
            acc = table.zero()
            for b, h in enumerate(nxt):
                z = rd.z(k + 1, b, a)
                if z:
                    acc = acc + (table.gen(h) * z).scale(sign)
            action[g.index] = acc
    return Derivation(table, 1, action, aux_shift=1, name="Delta")


@dataclass
class DeltaSquaredReport:
    entries: list[tuple[str, SuperElement, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for *_, ok in self.entries)

    def lines(self) -> list[str]:
        return [f"Delta^2 {name} = {v}: {'on shell' if ok else 'FAIL not in ideal'}"
                for name, v, ok in self.entries]


def delta_squared_on_shell(rd: ReducibilityData, Delta: Derivation, G: Sequence[SuperElement],
                           degree_bound: int | None = None, strict: bool = False) -> DeltaSquaredReport:
    """Check that each coefficient of ``Delta^2 eta^{a_k}`` lies in the ideal of ``G``."""
    table = Delta.table
    entries = []
    for k in range(rd.levels + 1):
        for g in _level_ghosts(table, k):
            v = Delta(Delta.on(g.index))
            ok = True
            for coeff in v.by_ghost_monomial().values():
                try:
                    ideal_membership(coeff, G, degree_bound)
                except NotInIdeal as exc:
                    if strict:
                        raise ObstructionNotInIdeal(f"Delta^2 {g.name}: {exc}") from None
                    ok = False
            entries.append((g.name, v, ok))
    return DeltaSquaredReport(entries)


def aux_additive(Delta: Derivation, elements: Sequence[SuperElement]) -> bool:
    """``aux(Delta e) = aux(e) + 1`` for homogeneous ``e`` with ``Delta e != 0``."""
    for e in elements:
        if not e.is_homogeneous("aux"):
            raise ValueError("aux additivity is checked on homogeneous elements")
        out = Delta(e)
        if out and (not out.is_homogeneous("aux") or out.degree("aux") != e.degree("aux") + 1):
            return False
    return True


def form_degree(table: GeneratorTable, mono) -> int:
    return sum(e for g, e in mono if table.generators[g].kind != COORDINATE)


@dataclass
class ReducibleComplex:
    """A base algebra with generators ``omega_n^i`` of degree ``n = 1..p``.

    ``generators[n - 1]`` lists the degree-``n`` generators; each must be a
    signed monomial in the ghost sector.
    """

    table: GeneratorTable
    generators: list[list[SuperElement]]

    def __post_init__(self):
        self._lookup = {}
        for n, gens in enumerate(self.generators, start=1):
            for i, w in enumerate(gens):
                if len(w.terms) != 1:
                    raise ValueError("generators must be signed monomials")
                (mono, c), = w.terms.items()
                if abs(c) != 1 or not w.is_homogeneous("parity"):
                    raise ValueError("generators must be signed monomials")
                self._lookup[mono] = (n, i, int(c))

    @property
    def level(self) -> int:
        return len(self.generators)

    def omega(self, n: int, i: int) -> SuperElement:
        return self.generators[n - 1][i]

    def products(self, m: int) -> dict:
        """``monomial -> [((j, k, n), sign)]`` for ``omega_{m-n+1}^j omega_n^k = sign * monomial``."""
        out: dict = {}
        for n in range(1, m + 1):
            left_deg = m - n + 1
            if left_deg > self.level or n > self.level:
                continue
            for j, wj in enumerate(self.generators[left_deg - 1]):
                for k, wk in enumerate(self.generators[n - 1]):
                    prod = wj * wk
                    if not prod:
                        continue
                    (mono, c), = prod.terms.items()
                    out.setdefault(mono, []).append(((j, k, n), int(c)))
        return out

    @classmethod
    def one_reducible(cls, table: GeneratorTable, generators: Sequence[SuperElement]) -> "ReducibleComplex":
        return cls(table, [list(generators)])


@dataclass
class GeneralizedMC:
    complex: ReducibleComplex
    rho: list[dict[int, SuperElement]]
    structure: dict[tuple[int, int, int, int, int], Fraction | SuperElement]

    def C(self, m: int, i: int, j: int, k: int, n: int):
        """``C^i_{jkn}`` for ``d omega_m^i`` (0-based labels)."""
        return self.structure.get((m, i, j, k, n), 0)


def generalized_mc_extract(d: Derivation, rc: ReducibleComplex) -> GeneralizedMC:
    """Read off ``d f = (rho_j f) omega_1^j`` and ``d omega_m^i = -1/2 sum_n C^i_{jkn} omega_{m-n+1}^j omega_n^k``.

    A monomial produced by several products is charged to the first triple
    ``(j, k, n)``, split evenly with its mirror ``(k, j, m - n + 1)``.
    """
    table = rc.table
    if any(nilpotency_defect(d).values()):
        raise NotAComplex("d does not square to zero on generators")
    rho: list[dict[int, SuperElement]] = [{} for _ in rc.generators[0]] if rc.generators else []
    for lam, z in enumerate(table.coordinates):
        for gmono, coeff in d.on(z.index).by_ghost_monomial().items():
            hit = rc._lookup.get(gmono)
            if hit is None or hit[0] != 1:
                raise NotInProductSpan(f"d({z.name}) leaves the span of degree-1 generators")
            _, j, sign = hit
            rho[j][lam] = coeff.scale(sign)
    structure: dict = {}
    for m in range(1, rc.level + 1):
        prods = rc.products(m)
        for i, w in enumerate(rc.generators[m - 1]):
            for gmono, coeff in d(w).by_ghost_monomial().items():
                triples = prods.get(gmono)
                if not triples:
                    raise NotInProductSpan(f"d omega_{m}^{i + 1} leaves the product span")
                (j, k, n), s = triples[0]
                mirror = (k, j, m - n + 1)
                s_mirror = dict(triples).get(mirror)
                if mirror == (j, k, n) or s_mirror is None:
                    parts = [((j, k, n), coeff.scale(Fraction(-2, s)))]
                else:
                    parts = [((j, k, n), coeff.scale(Fraction(-1, s))),
                             (mirror, coeff.scale(Fraction(-1, s_mirror)))]
                for (jj, kk, nn), v in parts:
                    key = (m, i, jj, kk, nn)
                    structure[key] = structure[key] + v if key in structure else v
    structure = {k: v for k, v in structure.items() if v}
    return GeneralizedMC(rc, rho, structure)


def generalized_reconstruct(mc: GeneralizedMC, target) -> SuperElement:
    """Rebuild ``d`` on a coordinate name or on ``(m, i)`` meaning ``omega_m^i``."""
    rc = mc.complex
    table = rc.table
    out = table.zero()
    if isinstance(target, tuple):
        m, i = target
        for (mm, ii, j, k, n), c in mc.structure.items():
            if (mm, ii) == (m, i):
                out = out + (c * rc.omega(m - n + 1, j) * rc.omega(n, k)).scale(Fraction(-1, 2))
        return out
    lam = [z.name for z in table.coordinates].index(target)
    for j, comps in enumerate(mc.rho):
        c = comps.get(lam)
        if c:
            out = out + c * rc.omega(1, j)
    return out


def generalized_round_trip(d: Derivation, mc: GeneralizedMC) -> dict[str, SuperElement]:
    rc = mc.complex
    table = rc.table
    res = {z.name: d.on(z.index) - generalized_reconstruct(mc, z.name) for z in table.coordinates}
    for m, gens in enumerate(rc.generators, start=1):
        for i, w in enumerate(gens):
            res[f"omega_{m}^{i + 1}"] = d(w) - generalized_reconstruct(mc, (m, i))
    return res


def generation_check(rc: ReducibleComplex, max_degree: int) -> dict[int, list[tuple]]:
    """Ghost monomials of form degree ``k <= max_degree`` that are not products of generators.

    Only odd ghost-sector generators are enumerated.  An empty result means
    generation holds at this truncation.
    """
    table = rc.table
    odd = [g for g in table.generators if g.kind != COORDINATE and g.is_odd]
    degree_of = {}
    for mono, (n, _, _) in rc._lookup.items():
        degree_of[mono] = n
    reachable = {(): 0}
    frontier = [()]
    omegas = list(rc._lookup)
    while frontier:
        nxt = []
        for mono in frontier:
            for w in omegas:
                res = (table.monomial(mono) * table.monomial(w)).terms
                if not res:
                    continue
                (pm, _), = res.items()
                deg = reachable[mono] + degree_of[w]
                if deg <= max_degree and pm not in reachable:
                    reachable[pm] = deg
                    nxt.append(pm)
        frontier = nxt
    missing: dict[int, list[tuple]] = {}
    for k in range(1, max_degree + 1):
        for sub in combinations(odd, k):
            mono = tuple((g.index, 1) for g in sub)
            if mono not in reachable:
                missing.setdefault(k, []).append(mono)
    return missing


# fixtures


def level1_fixture():
    """``G = (p1, p1)`` on ``R^2`` with ``Z = (1, -1)``."""
    table0 = GeneratorTable.standard(1, 2)
    G = [parse_polynomial("p1", table0)] * 2
    rd = ReducibilityData.from_strings(table0, [[["1", "-1"]]])
    return _retable(G, rd, 1)


def level2_fixture():
    """``G = (p1, p2, p1 + p2)`` on ``R^4``; level-1 rows ``(1, 1, -1)`` and
    ``(p2, -p1, 0)``, level-2 row ``(p1, 0)`` with ``C^{a, 1}_1 = (1, 1, -1)``."""
    table0 = GeneratorTable.standard(2, 3)
    G = [parse_polynomial(s, table0) for s in ("p1", "p2", "p1 + p2")]
    Z = [[["1", "1", "-1"], ["p2", "-p1", "0"]], [["p1", "0"]]]
    C = {2: [[["1", "0", "0"], ["1", "0", "0"], ["-1", "0", "0"]]]}
    rd = ReducibilityData.from_strings(table0, Z, C)
    return _retable(G, rd, 2)


def _retable(G, rd: ReducibilityData, n: int):
    """Move ``G`` and the data onto the table carrying the higher ghosts."""
    table = reducible_table(n, rd)
    move = lambda e: parse_polynomial(str(e), table)
    G2 = [move(g) for g in G]
    Z2 = [[[move(z) for z in row] for row in lvl] for lvl in rd.Z]
    C2 = {k: [[[move(c) for c in r0] for r0 in r1] for r1 in blk] for k, blk in rd.C.items()}
    rd2 = ReducibilityData(list(rd.counts), Z2, C2, [list(p) for p in rd.parities])
    return G2, rd2, table


def corrupt(rd: ReducibilityData, level: int, a: int, b: int, value: SuperElement) -> ReducibilityData:
    """Copy of ``rd`` with ``Z^{b}_{a}`` at ``level`` replaced."""
    Z = [[list(row) for row in lvl] for lvl in rd.Z]
    Z[level - 1][a][b] = value
    return ReducibilityData(list(rd.counts), Z, dict(rd.C), [list(p) for p in rd.parities])


def example1_fixture(n: int = 2):
    """Polynomials in ``x1..xn`` with odd ``dx1..dxn``: ``d f = (d_i f) dx^i``, ``d dx = 0``."""
    names = [f"x{i}" for i in range(1, n + 1)]
    table = GeneratorTable.standard(names, n, antighosts=False,
                                    ghost_names=[f"dx{i}" for i in range(1, n + 1)])
    action = {table[f"x{i}"].index: table.gen(f"dx{i}") for i in range(1, n + 1)}
    d = Derivation(table, 1, action, (1, 0), name="d")
    rc = ReducibleComplex.one_reducible(table, [table.gen(g) for g in table.ghosts])
    return d, rc
