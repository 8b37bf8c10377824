"""Phase-space geometry: brackets, Hamiltonian vector fields, constraint systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (COORDINATE, GeneratorTable, SuperElement,
                      coordinate_monomials)
from .linalg import solve_combination


class GhostInBracket(ValueError):
    pass


class NotInIdeal(ArithmeticError):
    pass


class NotFound(ArithmeticError):
    pass


class NotFirstClass(ValueError):
    pass


def _invert(matrix: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("symplectic matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        lead = aug[col][col]
        aug[col] = [v / lead for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class PhaseSpace:
    """Coordinates ``z`` with a constant symplectic form.

    The default is canonical in ``(x1..xn, p1..pn)``, so ``[x_i, p_j] = delta_ij``.
    """

    def __init__(self, table: GeneratorTable, omega: Sequence[Sequence] | None = None):
        self.table = table
        self.coordinates = table.coordinates
        dim = len(self.coordinates)
        if dim % 2:
            raise ValueError("phase space dimension must be even")
        n = dim // 2
        if omega is None:
            sigma = [[Fraction(0)] * dim for _ in range(dim)]
            for i in range(n):
                sigma[i][n + i] = Fraction(1)
                sigma[n + i][i] = Fraction(-1)
            self.sigma = sigma
            self.omega = _invert(sigma)
        else:
            self.omega = [[Fraction(v) for v in row] for row in omega]
            for i in range(dim):
                for j in range(dim):
                    if self.omega[i][j] != -self.omega[j][i]:
                        raise ValueError("symplectic matrix must be antisymmetric")
            self.sigma = _invert(self.omega)
        self._pairs = [(lam, mu, self.sigma[lam][mu])
                       for lam in range(dim) for mu in range(dim) if self.sigma[lam][mu]]

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def gradient(self, f: SuperElement) -> list[SuperElement]:
        return [f.left_derivative(z) for z in self.coordinates]

    def coordinate_bracket(self, f: SuperElement, g: SuperElement) -> SuperElement:
        """``sigma^{lm} (d_l f)(d_m g)``; ghosts in ``f``/``g`` ride along."""
        out = self.table.zero()
        if not f or not g:
            return out
        df = self.gradient(f)
        dg = self.gradient(g)
        for lam, mu, s in self._pairs:
            if df[lam] and dg[mu]:
                out = out + (df[lam] * dg[mu]).scale(s)
        return out


def poisson_bracket(space: PhaseSpace, f: SuperElement, g: SuperElement) -> SuperElement:
    if not (f.is_coordinate_only() and g.is_coordinate_only()):
        raise GhostInBracket("ghost generators present; use extended_bracket")
    return space.coordinate_bracket(f, g)


def extended_bracket(space: PhaseSpace, f: SuperElement, g: SuperElement,
                     ghost_sign: int = -1) -> SuperElement:
    """Graded Poisson bracket on the extended phase space.

    The ghost sector pairs ``eta^a`` with ``P_a``: ``[eta^a, P_b] = ghost_sign *
    delta^a_b``.  The default ``-1`` gives ``[P_a, eta^b G_b] = -G_a``.
    """
    table = space.table
    out = space.coordinate_bracket(f, g)
    for eta, anti in zip(table.ghosts, table.antighosts):
        t1 = f.right_derivative(eta)
        if t1:
            t2 = g.left_derivative(anti)
            if t2:
                out = out + (t1 * t2).scale(ghost_sign)
        t1 = f.right_derivative(anti)
        if t1:
            t2 = g.left_derivative(eta)
            if t2:
                out = out + (t1 * t2).scale(ghost_sign)
    return out


@dataclass
class VectorField:
    """A derivation of the coordinate polynomials, ``X = X^l d/dz^l``."""

    table: GeneratorTable
    components: dict[int, SuperElement] = field(default_factory=dict)

    def __post_init__(self):
        self.components = {k: v for k, v in self.components.items() if v}

    def component(self, lam: int) -> SuperElement:
        return self.components.get(lam, self.table.zero())

    def __call__(self, f: SuperElement) -> SuperElement:
        out = self.table.zero()
        coords = self.table.coordinates
        for lam, x in self.components.items():
            d = f.left_derivative(coords[lam])
            if d:
                out = out + x * d
        return out

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other: "VectorField") -> "VectorField":
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps[k] + v if k in comps else v
        return VectorField(self.table, comps)

    def __neg__(self):
        return VectorField(self.table, {k: -v for k, v in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def times(self, f: SuperElement) -> "VectorField":
        """The field ``f X`` for a coordinate function ``f``."""
        return VectorField(self.table, {k: f * v for k, v in self.components.items()})

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def commutator(self, other: "VectorField") -> "VectorField":
        """``[X, Y]^l = X(Y^l) - Y(X^l)``."""
        lams = set(self.components) | set(other.components)
        return VectorField(self.table, {lam: self(other.component(lam)) - other(self.component(lam))
                                        for lam in lams})

    def __str__(self):
        names = [g.name for g in self.table.coordinates]
        if not self.components:
            return "0"
        return " + ".join(f"({v})*d/d{names[k]}" for k, v in sorted(self.components.items()))


def commutator(x: VectorField, y: VectorField) -> VectorField:
    return x.commutator(y)


class ConstraintSystem:
    """Bosonic first-class constraints with user-supplied structure functions.

    ``structure[a][b][c]`` holds ``C^c_{ab}`` (0-based indices) with
    ``[G_a, G_b] = C^c_{ab} G_c``.  Pass ``structure=None`` to solve for it.
    """

    def __init__(self, space: PhaseSpace, constraints: Sequence[SuperElement],
                 structure=None, *, check: bool = True, degree_bound: int | None = None):
        self.space = space
        self.table = space.table
        self.constraints = list(constraints)
        m = len(self.constraints)
        if m != len(self.table.ghosts):
            raise ValueError("generator table must declare one ghost per constraint")
        for a, g in enumerate(self.constraints):
            if not g.is_coordinate_only():
                raise ValueError(f"constraint G{a + 1} contains ghost generators")
            if not g.is_homogeneous("parity") or g.parity:
                raise ValueError(f"constraint G{a + 1} is not Bosonic")
        if structure is None:
            structure = solve_structure_functions(space, self.constraints, degree_bound)
        zero = self.table.zero()
        self.structure = [[[structure[a][b][c] if structure[a][b][c] is not None else zero
                            for c in range(m)] for b in range(m)] for a in range(m)]
        for a in range(m):
            for b in range(m):
                for c in range(m):
                    if self.structure[a][b][c] != -self.structure[b][a][c]:
                        raise ValueError("structure functions must be antisymmetric in (a, b)")
        if check:
            report = verify_first_class(self)
            if not report.passed:
                raise NotFirstClass(report.summary())

    @property
    def size(self) -> int:
        return len(self.constraints)

    def C(self, c: int, a: int, b: int) -> SuperElement:
        """``C^c_{ab}`` with 1-based indices, as printed."""
        return self.structure[a - 1][b - 1][c - 1]

    def max_structure_degree(self) -> int:
        return max((x.max_zdegree() for row in self.structure for col in row for x in col),
                   default=0)

    def is_abelian(self) -> bool:
        return all(not x for row in self.structure for col in row for x in col)

    def has_constant_structure(self) -> bool:
        return all(x.max_zdegree() == 0 for row in self.structure for col in row for x in col)


def hamiltonian_vector_field(cs: ConstraintSystem, a: int) -> VectorField:
    """``X_a^l = sigma^{lm} d_m G_a`` (``a`` is 0-based)."""
    space = cs.space
    grad = space.gradient(cs.constraints[a])
    comps = {}
    dim = space.dimension
    for lam in range(dim):
        acc = cs.table.zero()
        for mu in range(dim):
            s = space.sigma[lam][mu]
            if s and grad[mu]:
                acc = acc + grad[mu].scale(s)
        comps[lam] = acc
    return VectorField(cs.table, comps)


@dataclass
class FirstClassReport:
    defects: dict[tuple[int, int], SuperElement]

    @property
    def passed(self) -> bool:
        return all(not d for d in self.defects.values())

    def summary(self) -> str:
        bad = [f"[G{a + 1},G{b + 1}] - C^c_ab G_c = {d}"
               for (a, b), d in self.defects.items() if d]
        return "first-class: pass" if not bad else "first-class: FAIL; " + "; ".join(bad)


def verify_first_class(cs: ConstraintSystem) -> FirstClassReport:
    G = cs.constraints
    defects = {}
    for a in range(cs.size):
        for b in range(cs.size):
            lhs = cs.space.coordinate_bracket(G[a], G[b])
            rhs = cs.table.zero()
            for c in range(cs.size):
                if cs.structure[a][b][c]:
                    rhs = rhs + cs.structure[a][b][c] * G[c]
            defects[(a, b)] = lhs - rhs
    return FirstClassReport(defects)


def default_degree_bound(r: SuperElement, G: Sequence[SuperElement]) -> int:
    min_deg = min((g.max_zdegree() for g in G if g), default=0)
    return max(r.max_zdegree() - min_deg + 2, 0)


def ideal_membership(r: SuperElement, G: Sequence[SuperElement],
                     degree_bound: int | None = None) -> list[SuperElement]:
    """Polynomials ``h`` with ``r = sum_c h^c G_c`` and ``deg h^c <= degree_bound``.

    The returned solution is the one supported on the earliest unknowns in
    (degree, graded-lex monomial, constraint) order.  Raises :class:`NotInIdeal`.
    """
    table = r.table
    if not r.is_coordinate_only() or not all(g.is_coordinate_only() for g in G):
        raise ValueError("ideal_membership expects coordinate-only input")
    if degree_bound is None:
        degree_bound = default_degree_bound(r, G)
    if not r:
        return [table.zero() for _ in G]
    monos = coordinate_monomials(table, degree_bound)
    unknowns = []
    columns = []
    for mono in monos:
        zm = table.monomial(mono)
        for c, g in enumerate(G):
            if g:
                unknowns.append((c, mono))
                columns.append((zm * g).terms)
    sol = solve_combination(columns, r.terms) if columns else None
    if sol is None:
        raise NotInIdeal(f"{r} is not in the ideal within degree {degree_bound}")
    h = [dict() for _ in G]
    for (c, mono), v in zip(unknowns, sol):
        if v:
            h[c][mono] = v
    result = [SuperElement(table, d) for d in h]
    check = table.zero()
    for hc, g in zip(result, G):
        check = check + hc * g
    assert check == r, "ideal membership back-substitution failed"
    return result


def solve_structure_functions(space: PhaseSpace, G: Sequence[SuperElement],
                              degree_bound: int | None = None):
    """Find antisymmetric ``C^c_{ab}`` with ``[G_a, G_b] = C^c_{ab} G_c``.

    Raises :class:`NotFound` if some bracket is not in the ideal within the bound.
    """
    m = len(G)
    table = space.table
    zero = table.zero()
    C = [[[zero] * m for _ in range(m)] for _ in range(m)]
    for a in range(m):
        for b in range(a + 1, m):
            br = space.coordinate_bracket(G[a], G[b])
            try:
                h = ideal_membership(br, G, degree_bound)
            except NotInIdeal as exc:
                raise NotFound(f"[G{a + 1},G{b + 1}] = {br}: {exc}") from None
            for c in range(m):
                C[a][b][c] = h[c]
                C[b][a][c] = -h[c]
    return C
