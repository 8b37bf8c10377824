"""Command line front end: read a JSON problem file, run one command, print a report.

The report is a human-readable text section followed by a fence line and a
JSON document.  The body is deterministic for a given input and seed; the
elapsed time goes to stderr.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error,
3 a solver bound was exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Any

from .algebra import GeneratorTable, UnknownGenerator, random_element
from .brst import (BRSTDifferential, ObstructionNotInIdeal, OrderExceeded, build_charge,
                   structure_identities)
from .cohomology import cohomology_dim
from .maurer_cartan import (NotInMultiGhostSpan, NotInProductSpan, gauge_closure,
                            jacobi_sum, lemma_check, lie_closure, maurer_cartan,
                            round_trip_residuals)
from .reducible import (ReducibilityData, aux_additive, auxiliary_differential,
                        delta_squared_on_shell, reducible_table, verify_reducibility)
from .symplectic import (ConstraintSystem, NotFirstClass, NotFound, NotInIdeal, PhaseSpace,
                         verify_first_class)
from .textform import ExpressionSyntaxError, parse_polynomial

FENCE = "=" * 24 + " JSON " + "=" * 24
COMMANDS = ("verify", "charge", "expand", "mc", "closure", "cohomology", "reducible")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BOUND = 0, 1, 2, 3


class ProblemError(ValueError):
    """Malformed or inconsistent problem file."""


class BoundExceeded(RuntimeError):
    pass


@dataclass
class Problem:
    n: int
    coordinate_names: list[str] | None
    constraints: list[str]
    structure: list | None
    reducibility: dict | None
    max_order: int = 3
    z_degree_bound: int | None = None
    ghost_numbers: list[int] = field(default_factory=lambda: [0])

    def coordinates(self):
        return self.coordinate_names if self.coordinate_names else self.n


def _expect(cond: bool, message: str):
    if not cond:
        raise ProblemError(message)


def load_problem(data: Any) -> Problem:
    _expect(isinstance(data, dict), "problem file must be a JSON object")
    ps = data.get("phaseSpace")
    _expect(isinstance(ps, dict), "missing phaseSpace object")
    n = ps.get("n")
    _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 0, "phaseSpace.n must be a natural number")
    names = ps.get("coordinateNames")
    if names is not None:
        _expect(isinstance(names, list) and all(isinstance(s, str) for s in names),
                "coordinateNames must be a list of strings")
        _expect(len(names) == 2 * n, "coordinateNames must list 2n names")
    G = data.get("constraints")
    _expect(isinstance(G, list) and all(isinstance(s, str) for s in G) and G,
            "constraints must be a nonempty list of strings")
    m = len(G)
    C = data.get("structureFunctions")
    if C is not None:
        _expect(isinstance(C, list) and len(C) == m
                and all(isinstance(r, list) and len(r) == m for r in C)
                and all(isinstance(x, list) and len(x) == m for r in C for x in r),
                f"structureFunctions must be a {m}x{m}x{m} array")
        _expect(all(isinstance(v, (str, int)) and not isinstance(v, bool)
                    for r in C for x in r for v in x), "structure function entries must be strings")
    red = data.get("reducibility")
    if red is not None:
        _expect(isinstance(red, dict) and isinstance(red.get("Z"), list), "reducibility needs a Z block")
    run = data.get("run", {})
    _expect(isinstance(run, dict), "run must be an object")
    max_order = run.get("maxOrder", 3)
    bound = run.get("zDegreeBound")
    ghs = run.get("ghostNumbers", [0])
    _expect(isinstance(max_order, int) and max_order >= 0, "run.maxOrder must be a natural number")
    _expect(bound is None or (isinstance(bound, int) and bound >= 0), "run.zDegreeBound must be a natural number")
    _expect(isinstance(ghs, list) and all(isinstance(g, int) for g in ghs), "run.ghostNumbers must be integers")
    return Problem(n, names, G, C, red, max_order, bound, list(ghs))


def build_system(p: Problem) -> ConstraintSystem:
    table = GeneratorTable.standard(p.coordinates(), len(p.constraints))
    space = PhaseSpace(table)
    G = [parse_polynomial(s, table) for s in p.constraints]
    C = None
    if p.structure is not None:
        C = [[[parse_polynomial(str(x), table) for x in row] for row in mat] for mat in p.structure]
    try:
        return ConstraintSystem(space, G, C, check=False, degree_bound=p.z_degree_bound)
    except NotFound as exc:
        raise BoundExceeded(f"structure functions not found: {exc}") from None


class Report:
    def __init__(self, command: str, source: str):
        self.command = command
        self.source = source
        self.text: list[str] = []
        self.checks: list[dict] = []
        self.results: dict[str, Any] = {}

    def line(self, s: str = ""):
        self.text.append(s)

    def check(self, name: str, passed: bool, detail: list[str] | None = None):
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail or []})
        self.line(f"[{'PASS' if passed else 'FAIL'}] {name}")
        for d in detail or []:
            self.line(f"    {d}")

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def payload(self, status: int) -> dict:
        return {"command": self.command, "input": self.source, "checks": self.checks,
                "results": self.results, "passed": self.passed, "exitCode": status}

    def render(self, status: int, json_only: bool) -> str:
        body = json.dumps(self.payload(status), indent=2, sort_keys=True)
        if json_only:
            return body + "\n"
        head = [f"command: {self.command}", f"input: {self.source}", ""]
        tail = ["", f"result: {'PASS' if self.passed else 'FAIL'}"]
        return "\n".join(head + self.text + tail + [FENCE, body]) + "\n"


def _nonzero(d: dict) -> list[str]:
    return [f"{k}: {v}" for k, v in d.items() if v]


def _charge(cs: ConstraintSystem, args, p: Problem):
    K = args.max_order if args.max_order is not None else p.max_order
    D = args.deg_bound if args.deg_bound is not None else p.z_degree_bound
    try:
        return build_charge(cs, K, D, strict=True)
    except OrderExceeded as exc:
        raise BoundExceeded(str(exc)) from None


def _first_class(cs: ConstraintSystem, rep: Report) -> bool:
    fc = verify_first_class(cs)
    rep.check("constraints are first class", fc.passed, [] if fc.passed else [fc.summary()])
    return fc.passed


def cmd_verify(cs, p, args, rep: Report):
    m = cs.size
    rep.line(f"{m} constraint(s) on a {len(cs.table.coordinates)}-dimensional phase space")
    for a, g in enumerate(cs.constraints, start=1):
        rep.line(f"G{a} = {g}")
    structure = {}
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(m):
                v = cs.structure[a][b][c]
                if v:
                    structure[f"C^{c + 1}_{a + 1}{b + 1}"] = str(v)
                    rep.line(f"C^{c + 1}_{{{a + 1}{b + 1}}} = {v}")
    rep.results["constraints"] = [str(g) for g in cs.constraints]
    rep.results["structureFunctions"] = structure
    rep.results["structureGiven"] = p.structure is not None
    _first_class(cs, rep)


def cmd_charge(cs, p, args, rep: Report):
    if not _first_class(cs, rep):
        return
    ch = _charge(cs, args, p)
    for k, t in enumerate(ch.terms):
        rep.line(f"Omega_{k} = {t}")
    rep.line(f"order: {ch.order}")
    S = BRSTDifferential(ch)
    cert = S.nilpotency_certificate()
    rep.check("master equation [Omega, Omega] = 0", not ch.master_defect(), _nonzero({"defect": ch.master_defect()}))
    rep.check("S^2 = 0 on generators", not any(cert.values()), _nonzero(cert))
    rep.results["terms"] = [str(t) for t in ch.terms]
    rep.results["order"] = ch.order
    rep.results["omega"] = str(ch.total)


def _random_functions(table, seed: int, count: int = 5):
    rng = random.Random(seed)
    return [random_element(table, rng, n_terms=3, max_zdegree=2, generators=table.coordinates,
                           max_odd=0) for _ in range(count)]


def cmd_expand(cs, p, args, rep: Report):
    if not _first_class(cs, rep):
        return
    S = BRSTDifferential(_charge(cs, args, p))
    table_out = {}
    for k in range(-1, S.max_shift + 1):
        term = S.expansion_term(k)
        vals = {name: str(v) for name, v in term.values().items() if v}
        table_out[term.name] = vals
        rep.line(f"{term.name}:")
        for name, v in vals.items():
            rep.line(f"  {term.name}({name}) = {v}")
    ids = structure_identities(S)
    for name, defects in ids.defects.items():
        rep.check(name, ids.passed(name), _nonzero(defects))
    fs = _random_functions(cs.table, args.seed)
    bad = [str(f) for f in fs if S(S(f))]
    rep.check(f"S^2 f = 0 on {len(fs)} seeded random functions", not bad, bad)
    rep.results["expansion"] = table_out


def cmd_mc(cs, p, args, rep: Report):
    if not _first_class(cs, rep):
        return
    S = BRSTDifferential(_charge(cs, args, p))
    mc = maurer_cartan(S)
    rho = {}
    for I in mc.multi_ghosts:
        if not mc.rho[I].is_zero():
            rho[str(I)] = str(mc.rho[I])
            rep.line(f"rho{I} = {mc.rho[I]}")
    structure = {}
    for (K, I, J), c in sorted(mc.structure.items()):
        if I < J:
            structure[f"C^{K}_{I}{J}"] = str(c)
            rep.line(f"C^{K}_{{{I}{J}}} = {c}")
    rt = round_trip_residuals(S, mc)
    rep.check("Maurer-Cartan round trip", not any(rt.values()), _nonzero(rt))
    fs = [cs.table.gen(z) for z in cs.table.coordinates] + _random_functions(cs.table, args.seed)
    lem = lemma_check(S, mc, fs)
    rep.check("S^2 f matches the rho/C expansion", lem.passed,
              [] if lem.passed else lem.lines())
    jac = {str(K): jacobi_sum(mc, K) for K in mc.multi_ghosts}
    rep.check("cyclic structure identity", not any(jac.values()), _nonzero(jac))
    rep.results["rho"] = rho
    rep.results["structure"] = structure


def cmd_closure(cs, p, args, rep: Report):
    if not _first_class(cs, rep):
        return
    S = BRSTDifferential(_charge(cs, args, p))
    mc = maurer_cartan(S)
    lc = lie_closure(mc)
    rep.check("[rho_I, rho_J] closes on the rho_K", lc.passed, lc.lines())
    rep.check("C^K_IJ valid where the product basis is unique", lc.unique_consistent(), lc.lines())
    D = args.deg_bound if args.deg_bound is not None else p.z_degree_bound
    try:
        gc = gauge_closure(cs, mc, D)
    except ObstructionNotInIdeal as exc:
        raise BoundExceeded(str(exc)) from None
    defects = {}
    for (i, j), v in gc.defects.items():
        defects[f"{i + 1}{j + 1}"] = str(v)
        rep.line(f"[X{i + 1}, X{j + 1}] - C X = {v}")
    rep.check("gauge defect equals G_c rho^c", all(gc.agrees_with_rho.values()),
              [f"pair {k}" for k, v in gc.agrees_with_rho.items() if not v])
    rep.results["defects"] = defects
    rep.results["closedOffShell"] = gc.defect_free()


def cmd_cohomology(cs, p, args, rep: Report):
    if not _first_class(cs, rep):
        return
    S = BRSTDifferential(_charge(cs, args, p))
    D = args.deg_bound if args.deg_bound is not None else (p.z_degree_bound if p.z_degree_bound is not None else 2)
    ghs = args.gh if args.gh else p.ghost_numbers
    out = {}
    for g in ghs:
        r = cohomology_dim(S, g, D)
        flag = "stable" if r.stable else "unstable"
        rep.line(f"H^{g} (z-degree <= {D}): dimension {r.dimension} ({flag})")
        reps = [str(x) for x in r.representatives]
        for x in reps:
            rep.line(f"  {x}")
        bad = [x for x, e in zip(reps, r.representatives) if S(e)]
        rep.check(f"representatives of H^{g} are cocycles", not bad, bad)
        out[str(g)] = {"dimension": r.dimension, "stable": r.stable, "zDegreeBound": D,
                       "kernel": r.kernel_dimension, "boundaries": r.boundary_rank,
                       "representatives": reps}
    rep.results["cohomology"] = out


def cmd_reducible(cs, p, args, rep: Report):
    if p.reducibility is None:
        raise ProblemError("the reducible command needs a reducibility block")
    base = GeneratorTable.standard(p.coordinates(), len(p.constraints))
    block = p.reducibility
    try:
        rd0 = ReducibilityData.from_strings(base, block["Z"], block.get("C"), block.get("parities"))
        table = reducible_table(p.coordinates(), rd0)
        rd = ReducibilityData.from_strings(table, block["Z"], block.get("C"), block.get("parities"))
    except (TypeError, KeyError, IndexError, AttributeError) as exc:
        raise ProblemError(f"malformed reducibility block: {exc}") from None
    G = [parse_polynomial(s, table) for s in p.constraints]
    rr = verify_reducibility(G, rd)
    rep.check("reducibility relations", rr.passed, rr.lines())
    Delta = auxiliary_differential(rd, table)
    for name, v in Delta.values().items():
        if v:
            rep.line(f"Delta {name} = {v}")
    D = args.deg_bound if args.deg_bound is not None else p.z_degree_bound
    ds = delta_squared_on_shell(rd, Delta, G, D)
    rep.check("Delta^2 vanishes on shell", ds.passed, [l for l in ds.lines() if "FAIL" in l])
    ghosts = [table.gen(g) for g in table.generators if g.kind != "coordinate"]
    rep.check("aux(Delta e) = aux(e) + 1", aux_additive(Delta, ghosts))
    rep.results["delta"] = {k: str(v) for k, v in Delta.values().items() if v}
    rep.results["levels"] = rd.levels


HANDLERS = {"verify": cmd_verify, "charge": cmd_charge, "expand": cmd_expand, "mc": cmd_mc,
            "closure": cmd_closure, "cohomology": cmd_cohomology, "reducible": cmd_reducible}

INPUT_ERRORS = (ProblemError, ExpressionSyntaxError, UnknownGenerator, json.JSONDecodeError,
                OSError, NotFirstClass)
BOUND_ERRORS = (BoundExceeded, ObstructionNotInIdeal, NotInIdeal, NotFound,
                NotInMultiGhostSpan, NotInProductSpan)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="brstkit", description="BRST charge and cohomology toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", required=True, metavar="FILE", help="JSON problem file")
    ap.add_argument("--max-order", type=int, default=None, metavar="K")
    ap.add_argument("--deg-bound", type=int, default=None, metavar="D")
    ap.add_argument("--gh", type=int, action="append", default=None, metavar="G",
                    help="ghost number for the cohomology command (repeatable)")
    ap.add_argument("--json-only", action="store_true")
    ap.add_argument("--seed", type=int, default=0, metavar="N",
                    help="seed for randomized property checks")
    return ap


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    start = time.perf_counter()
    rep = Report(args.command, args.input)
    status = EXIT_PASS
    try:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh)
        problem = load_problem(data)
        cs = build_system(problem) if args.command != "reducible" else None
        if cs is not None and problem.structure is None:
            rep.line("structure functions solved from the constraint brackets")
        HANDLERS[args.command](cs, problem, args, rep)
        status = EXIT_PASS if rep.passed else EXIT_FAIL
    except INPUT_ERRORS as exc:
        status = EXIT_INPUT
        rep.check("input", False, [f"{type(exc).__name__}: {exc}"])
    except BOUND_ERRORS as exc:
        status = EXIT_BOUND
        rep.check("solver bound", False, [f"{type(exc).__name__}: {exc}"])
    except ValueError as exc:
        status = EXIT_INPUT
        rep.check("input", False, [f"{type(exc).__name__}: {exc}"])
    stdout.write(rep.render(status, args.json_only))
    stderr.write(f"elapsed {time.perf_counter() - start:.3f}s\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
