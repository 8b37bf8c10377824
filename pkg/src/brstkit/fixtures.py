"""Ready-made constraint systems used by the tests, the docs and the CLI."""

from __future__ import annotations

from .algebra import GeneratorTable
from .symplectic import ConstraintSystem, PhaseSpace
from .textform import parse_polynomial


def system_from_strings(n: int, constraints: list[str], structure=None,
                        coordinate_names=None, degree_bound=None) -> ConstraintSystem:
    """Build a :class:`ConstraintSystem` from expression strings.

    ``structure[a][b][c]`` (strings) gives ``C^c_{ab}``; ``None`` solves for it.
    """
    coords = coordinate_names if coordinate_names is not None else n
    table = GeneratorTable.standard(coords, len(constraints))
    space = PhaseSpace(table)
    G = [parse_polynomial(s, table) for s in constraints]
    C = None
    if structure is not None:
        C = [[[parse_polynomial(str(x), table) for x in row] for row in mat] for mat in structure]
    return ConstraintSystem(space, G, C, degree_bound=degree_bound)


def abelian(n: int = 2, m: int | None = None) -> ConstraintSystem:
    """``G_a = p_a`` on ``R^{2n}`` for ``a = 1..m``."""
    m = n if m is None else m
    return system_from_strings(n, [f"p{a}" for a in range(1, m + 1)],
                               [[["0"] * m for _ in range(m)] for _ in range(m)])


def so3() -> ConstraintSystem:
    """Angular momentum ``G_a = eps_{abc} x^b p^c`` on ``R^6``."""
    G = ["x2*p3 - x3*p2", "x3*p1 - x1*p3", "x1*p2 - x2*p1"]
    C = [[["0"] * 3 for _ in range(3)] for _ in range(3)]
    for a, b, c, s in [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)]:
        C[a][b][c] = str(s)
        C[b][a][c] = str(-s)
    return system_from_strings(3, G, C)


def open_algebra() -> ConstraintSystem:
    """``G = (p1, p2 + x1*x2*p1)`` on ``R^4``: ``[G1, G2] = -x2 G1``.

    The structure function depends on the coordinates, so ``d^2 != 0`` off
    shell and the charge picks up coordinate-dependent ghost terms.
    """
    C = [[["0", "0"], ["-x2", "0"]], [["x2", "0"], ["0", "0"]]]
    return system_from_strings(2, ["p1", "p2 + x1*x2*p1"], C)


def open_algebra_rank3() -> ConstraintSystem:
    """Three constraints with coordinate-dependent structure functions.

    ``G = (p1, p2 + x1*p3, p3 + x1*x2*p1)`` on ``R^6``; structure functions are
    solved for.
    """
    return system_from_strings(3, ["p1", "p2 + x1*p3", "p3 + x1*x2*p1"])


def higher_rank() -> ConstraintSystem:
    """``G = (p1, p2, p3)`` with the non-minimal structure functions
    ``C_{12} = (p2, -p1, 0)`` and ``C_{23} = (0, p3, -p2)``.

    Both choices satisfy ``C^c_{ab} G_c = 0``; the charge needs an
    antighost-2 term, so ``s_1 eta != 0`` here.
    """
    C = [[["0"] * 3 for _ in range(3)] for _ in range(3)]
    C[0][1] = ["p2", "-p1", "0"]
    C[1][0] = ["-p2", "p1", "0"]
    C[1][2] = ["0", "p3", "-p2"]
    C[2][1] = ["0", "-p3", "p2"]
    return system_from_strings(3, ["p1", "p2", "p3"], C)


FIXTURES = {
    "abelian": lambda: abelian(2),
    "so3": so3,
    "open": open_algebra,
    "higher_rank": higher_rank,
}
