"""Exact arithmetic in the supercommutative polynomial algebra.

Elements live in ``Q[z] (x) Q[P] (x) Q[eta] (x) Q[higher ghosts]``.  A monomial is
a tuple of ``(generator index, exponent)`` pairs sorted by the global generator
order; odd generators always carry exponent 1.  Coefficients are
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

COORDINATE = "coordinate"
ANTIGHOST = "antighost"
GHOST = "ghost"
HIGHER = "higher"

_KIND_RANK = {COORDINATE: 0, ANTIGHOST: 1, GHOST: 2, HIGHER: 3}

GRADINGS = ("pureGhost", "antiGhost", "ghostNumber", "aux", "parity", "zDegree")


class UnknownGenerator(KeyError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    kind: str
    index: int
    label: int = 0
    parity: int = 0
    pure_ghost: int = 0
    anti_ghost: int = 0
    aux: int = 0
    level: int = 0

    @property
    def is_odd(self) -> bool:
        return self.parity == 1


class GeneratorTable:
    """The declared generators, in the global canonical order.

    The order is coordinates < antighosts < ghosts < higher ghosts; inside a
    block generators keep their declaration order.
    """

    def __init__(self, generators: Iterable[Generator]):
        gens = sorted(generators, key=lambda g: (_KIND_RANK[g.kind], g.level, g.index))
        self.generators: tuple[Generator, ...] = tuple(
            Generator(g.name, g.kind, i, g.label, g.parity, g.pure_ghost,
                      g.anti_ghost, g.aux, g.level)
            for i, g in enumerate(gens)
        )
        self._by_name = {g.name: g for g in self.generators}
        if len(self._by_name) != len(self.generators):
            raise ValueError("duplicate generator names")
        self.parities = tuple(g.parity for g in self.generators)

    @classmethod
    def standard(cls, coordinates, n_constraints: int = 0, *, antighosts: bool = True,
                 ghost_names: Sequence[str] | None = None,
                 higher: Sequence[int] = (),
                 higher_parities: Sequence[Sequence[int]] | None = None) -> "GeneratorTable":
        """Build the usual table.

        ``coordinates`` is either ``n`` (giving ``x1..xn, p1..pn``) or an explicit
        list of names.  ``higher[k-1]`` is the number of level-``k`` ghosts, whose
        parity is ``(eps + k + 1) mod 2`` with ``eps`` from ``higher_parities``.
        """
        if isinstance(coordinates, int):
            n = coordinates
            names = [f"x{i}" for i in range(1, n + 1)] + [f"p{i}" for i in range(1, n + 1)]
        else:
            names = list(coordinates)
        gens: list[Generator] = []
        pos = 0
        for name in names:
            gens.append(Generator(name, COORDINATE, pos))
            pos += 1
        m = n_constraints
        if antighosts:
            for a in range(1, m + 1):
                gens.append(Generator(f"P{a}", ANTIGHOST, pos, a, 1, 0, 1))
                pos += 1
        gnames = list(ghost_names) if ghost_names is not None else [f"eta{a}" for a in range(1, m + 1)]
        if len(gnames) != m:
            raise ValueError("ghost_names must have one entry per constraint")
        for a, gname in enumerate(gnames, start=1):
            gens.append(Generator(gname, GHOST, pos, a, 1, 1, 0))
            pos += 1
        for k, count in enumerate(higher, start=1):
            eps = higher_parities[k - 1] if higher_parities else [0] * count
            for a in range(1, count + 1):
                parity = (eps[a - 1] + k + 1) % 2
                gens.append(Generator(f"eta{k}_{a}", HIGHER, pos, a, parity, k + 1, 0, k, k))
                pos += 1
        return cls(gens)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, name: str) -> Generator:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def of_kind(self, kind: str, level: int | None = None) -> list[Generator]:
        return [g for g in self.generators
                if g.kind == kind and (level is None or g.level == level)]

    @property
    def coordinates(self) -> list[Generator]:
        return self.of_kind(COORDINATE)

    @property
    def ghosts(self) -> list[Generator]:
        return self.of_kind(GHOST)

    @property
    def antighosts(self) -> list[Generator]:
        return self.of_kind(ANTIGHOST)

    def higher_ghosts(self, level: int) -> list[Generator]:
        return self.of_kind(HIGHER, level)

    def ghost(self, a: int) -> Generator:
        return self.ghosts[a - 1]

    def antighost(self, a: int) -> Generator:
        return self.antighosts[a - 1]

    # element constructors

    def zero(self) -> "SuperElement":
        return SuperElement(self, {})

    def one(self) -> "SuperElement":
        return self.const(1)

    def const(self, c) -> "SuperElement":
        c = Fraction(c)
        return SuperElement(self, {(): c} if c else {})

    def gen(self, g) -> "SuperElement":
        if isinstance(g, str):
            g = self[g]
        return SuperElement(self, {((g.index, 1),): Fraction(1)})

    def monomial(self, mono) -> "SuperElement":
        return SuperElement(self, {mono: Fraction(1)})

    def normalize(self, raw_terms) -> "SuperElement":
        """Canonicalize ``[(coefficient, [generator, ...]), ...]``.

        Generators may be given by name, by :class:`Generator`, or by index.
        """
        out: dict = {}
        for coeff, seq in raw_terms:
            coeff = Fraction(coeff)
            if not coeff:
                continue
            idx = [self._resolve(g) for g in seq]
            res = self._canonical(idx)
            if res is None:
                continue
            sign, mono = res
            _accumulate(out, mono, sign * coeff)
        return SuperElement(self, out)

    def _resolve(self, g) -> int:
        if isinstance(g, Generator):
            if g.index >= len(self.generators) or self.generators[g.index].name != g.name:
                raise UnknownGenerator(g.name)
            return g.index
        if isinstance(g, int):
            if not 0 <= g < len(self.generators):
                raise UnknownGenerator(g)
            return g
        return self[g].index

    def _canonical(self, idx: list[int]):
        # insertion sort so we can count odd transpositions
        par = self.parities
        seq = list(idx)
        sign = 1
        for i in range(1, len(seq)):
            j = i
            while j > 0 and seq[j - 1] > seq[j]:
                if par[seq[j - 1]] and par[seq[j]]:
                    sign = -sign
                seq[j - 1], seq[j] = seq[j], seq[j - 1]
                j -= 1
        mono: list[list[int]] = []
        for g in seq:
            if mono and mono[-1][0] == g:
                if par[g]:
                    return None
                mono[-1][1] += 1
            else:
                mono.append([g, 1])
        return sign, tuple((g, e) for g, e in mono)

    # gradings of a single monomial

    def mono_grading(self, mono, which: str) -> int:
        gens = self.generators
        if which == "pureGhost":
            return sum(gens[g].pure_ghost * e for g, e in mono)
        if which == "antiGhost":
            return sum(gens[g].anti_ghost * e for g, e in mono)
        if which == "ghostNumber":
            return sum((gens[g].pure_ghost - gens[g].anti_ghost) * e for g, e in mono)
        if which == "aux":
            return sum(gens[g].aux * e for g, e in mono)
        if which == "parity":
            return sum(gens[g].parity * e for g, e in mono) % 2
        if which == "zDegree":
            return sum(e for g, e in mono if gens[g].kind == COORDINATE)
        raise ValueError(f"unknown grading {which!r}")

    def split_mono(self, mono):
        """Split a monomial into its coordinate part and its ghost part."""
        gens = self.generators
        z = tuple(p for p in mono if gens[p[0]].kind == COORDINATE)
        rest = tuple(p for p in mono if gens[p[0]].kind != COORDINATE)
        return z, rest


def _accumulate(d: dict, key, value) -> None:
    v = d.get(key, 0) + value
    if v:
        d[key] = v
    else:
        d.pop(key, None)


def mono_mul(parities, m1, m2):
    """Product of two canonical monomials: ``(sign, monomial)`` or ``None``."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    out = []
    sign = 1
    i = j = 0
    odd_left_remaining = sum(1 for g, _ in m1 if parities[g])
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        g1, e1 = m1[i]
        g2, e2 = m2[j]
        if g1 < g2:
            out.append(m1[i])
            if parities[g1]:
                odd_left_remaining -= 1
            i += 1
        elif g2 < g1:
            out.append(m2[j])
            if parities[g2] and odd_left_remaining % 2:
                sign = -sign
            j += 1
        else:
            if parities[g1]:
                return None
            out.append((g1, e1 + e2))
            i += 1
            j += 1
    if i < n1:
        out.extend(m1[i:])
    elif j < n2:
        for g2, e2 in m2[j:]:
            if parities[g2] and odd_left_remaining % 2:
                sign = -sign
            out.append((g2, e2))
    return sign, tuple(out)


class SuperElement:
    """An element of the graded algebra in canonical form.

    Treat instances as immutable; every operation returns a new element.
    """

    __slots__ = ("table", "terms")

    def __init__(self, table: GeneratorTable, terms: Mapping | None = None):
        self.table = table
        self.terms: dict = dict(terms) if terms else {}

    # basic protocol

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, SuperElement):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"SuperElement({self})"

    def __str__(self):
        from .textform import format_element
        return format_element(self)

    def _coerce(self, other) -> "SuperElement":
        if isinstance(other, SuperElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.table.const(other)
        raise TypeError(f"cannot combine SuperElement with {type(other).__name__}")

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            _accumulate(out, m, c)
        return SuperElement(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return SuperElement(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "SuperElement":
        c = Fraction(c)
        if not c:
            return SuperElement(self.table, {})
        return SuperElement(self.table, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        par = self.table.parities
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                res = mono_mul(par, m1, m2)
                if res is None:
                    continue
                s, m = res
                _accumulate(out, m, s * c1 * c2)
        return SuperElement(self.table, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self._coerce(other) * self

    def __pow__(self, n: int):
        result = self.table.one()
        for _ in range(n):
            result = result * self
        return result

    # gradings

    def grade(self, which: str) -> dict[int, "SuperElement"]:
        """Decompose into homogeneous parts of the requested grading."""
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.table.mono_grading(m, which), {})[m] = c
        return {k: SuperElement(self.table, v) for k, v in sorted(parts.items())}

    def part(self, which: str, degree: int) -> "SuperElement":
        mg = self.table.mono_grading
        return SuperElement(self.table, {m: c for m, c in self.terms.items()
                                         if mg(m, which) == degree})

    def degree(self, which: str) -> int:
        """The grading of a homogeneous element (``ValueError`` otherwise)."""
        degs = {self.table.mono_grading(m, which) for m in self.terms}
        if len(degs) != 1:
            raise ValueError(f"element is not homogeneous in {which}")
        return degs.pop()

    def is_homogeneous(self, which: str) -> bool:
        return len({self.table.mono_grading(m, which) for m in self.terms}) <= 1

    @property
    def parity(self) -> int:
        return self.degree("parity") if self.terms else 0

    def max_zdegree(self) -> int:
        mg = self.table.mono_grading
        return max((mg(m, "zDegree") for m in self.terms), default=0)

    def min_zdegree(self) -> int:
        mg = self.table.mono_grading
        return min((mg(m, "zDegree") for m in self.terms), default=0)

    def is_coordinate_only(self) -> bool:
        gens = self.table.generators
        return all(gens[g].kind == COORDINATE for m in self.terms for g, _ in m)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def by_ghost_monomial(self) -> dict:
        """Group as ``{ghost monomial: coordinate coefficient}``."""
        out: dict = {}
        split = self.table.split_mono
        for m, c in self.terms.items():
            z, g = split(m)
            out.setdefault(g, {})[z] = c
        return {g: SuperElement(self.table, d) for g, d in out.items()}

    # derivatives

    def left_derivative(self, g) -> "SuperElement":
        return _partial(self, g, left=True)

    def right_derivative(self, g) -> "SuperElement":
        return _partial(self, g, left=False)

    def substitute_sign(self, signs: Mapping[int, int]) -> "SuperElement":
        """Rescale generators by +-1 (``{index: -1}`` flips a generator)."""
        out = {}
        for m, c in self.terms.items():
            s = 1
            for g, e in m:
                if signs.get(g, 1) == -1 and e % 2:
                    s = -s
            out[m] = s * c
        return SuperElement(self.table, out)


def _partial(e: SuperElement, g, left: bool) -> SuperElement:
    table = e.table
    gi = table._resolve(g)
    par = table.parities
    out: dict = {}
    for m, c in e.terms.items():
        for pos, (h, k) in enumerate(m):
            if h != gi:
                continue
            if par[gi]:
                passed = m[:pos] if left else m[pos + 1:]
                n_odd = sum(1 for x, _ in passed if par[x])
                coeff = -c if n_odd % 2 else c
                new = m[:pos] + m[pos + 1:]
            else:
                coeff = c * k
                new = m[:pos] + (((h, k - 1),) if k > 1 else ()) + m[pos + 1:]
            _accumulate(out, new, coeff)
            break
    return SuperElement(table, out)


def mul(a: SuperElement, b: SuperElement) -> SuperElement:
    return a * b


def add(a: SuperElement, b: SuperElement) -> SuperElement:
    return a + b


def grade(e: SuperElement, which: str) -> dict[int, SuperElement]:
    return e.grade(which)


def left_derivative(e: SuperElement, g) -> SuperElement:
    return e.left_derivative(g)


def coordinate_monomials(table: GeneratorTable, max_degree: int, min_degree: int = 0,
                         variables: Sequence[Generator] | None = None) -> list[tuple]:
    """All coordinate monomials with ``min_degree <= degree <= max_degree``.

    Ordered by degree, then graded-lex on the variable order.
    """
    vars_ = [g.index for g in (variables if variables is not None else table.coordinates)]
    out: list[tuple] = []
    for deg in range(max(min_degree, 0), max_degree + 1):
        out.extend(_monos_of_degree(vars_, deg))
    return out


def _monos_of_degree(vars_: list[int], deg: int) -> list[tuple]:
    if deg == 0:
        return [()]
    if not vars_:
        return []
    res = []
    first, rest = vars_[0], vars_[1:]
    for e in range(deg, -1, -1):
        for tail in _monos_of_degree(rest, deg - e):
            res.append((((first, e),) if e else ()) + tail)
    return res


def random_element(table: GeneratorTable, rng: random.Random, *, n_terms: int = 3,
                   max_zdegree: int = 2, generators: Sequence[Generator] | None = None,
                   max_odd: int = 3, parity: int | None = None,
                   coeff_range: int = 5) -> SuperElement:
    """A random element; if ``parity`` is given the result is homogeneous in it."""
    gens = list(generators) if generators is not None else list(table.generators)
    evens = [g for g in gens if not g.is_odd]
    odds = [g for g in gens if g.is_odd]
    raw = []
    for _ in range(n_terms):
        seq = [rng.choice(evens) for _ in range(rng.randint(0, max_zdegree))] if evens else []
        k = rng.randint(0, min(max_odd, len(odds)))
        if parity is not None and k % 2 != parity:
            k = k + 1 if k < len(odds) else k - 1
            if k < 0 or k % 2 != parity:
                continue
        seq += rng.sample(odds, k)
        rng.shuffle(seq)
        c = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 3))
        raw.append((c, seq))
    return table.normalize(raw)
