"""Command-line front end.

Loads presentation files (JSON), orchestrates the other modules and emits
machine-readable output.  Exit codes: 0 success, 1 mathematical failure or
negative verdict, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from . import ideals
from .cauchon import (
    d_element_search,
    enumerate_hprimes,
    normal_element,
    theta,
)
from .cgl import PoissonPresentation, level_data, verify_cgl
from .errors import ParseError, PcglError, TriangularityError
from .grading import GradingData
from .ideals import Ideal, chain_report, h_core, poisson_closure
from .pbracket import BracketTable
from .qpoly import Polynomial, VarTable, parse
from .strata import extract_log_matrix, poisson_center_torus


class SchemaError(PcglError):
    """Presentation file violates the input schema."""


def fixture_path(name: str) -> str:
    """Path of a packaged fixture presentation, e.g. fixture_path('weyl')."""
    return str(resources.files("pcgl").joinpath(f"fixtures/{name}.json"))


def load_presentation_data(data: dict) -> tuple[PoissonPresentation, dict]:
    if data.get("field", "QQ") != "QQ":
        raise SchemaError("only field QQ is supported")
    try:
        names = tuple(data["vars"])
    except KeyError:
        raise SchemaError("missing 'vars'") from None
    laurent = tuple(bool(x) for x in data.get("laurent", [False] * len(names)))
    ctx = VarTable(names, laurent)
    n = len(ctx)
    entries = {}
    for key, text in data.get("brackets", {}).items():
        try:
            i_s, j_s = key.split(",")
            i, j = int(i_s), int(j_s)
        except ValueError:
            raise SchemaError(f"bad bracket key {key!r}; expected 'i,j'") from None
        if not (1 <= j < i <= n):
            raise SchemaError(f"bracket key {key!r} out of range (need i > j, 1-based)")
        entries[(i - 1, j - 1)] = parse(text, ctx)
    rows = data.get("grading", [])
    for row in rows:
        if len(row) != n:
            raise SchemaError("grading rows must have one entry per generator")
    weights = tuple(tuple(int(row[i]) for row in rows) for i in range(n))
    grading = GradingData(len(rows), weights)
    h = None
    if data.get("h") is not None:
        h = tuple(tuple(Fraction(str(x)) for x in vec) for vec in data["h"])
    bounds = dict(data.get("bounds", {}))
    try:
        pres = PoissonPresentation(
            ctx=ctx,
            table=BracketTable(ctx, entries),
            grading=grading,
            h=h,
            nilpotency_bound=int(bounds.get("nilpotency", 25)),
        )
    except TriangularityError:
        raise
    except PcglError as exc:
        raise SchemaError(str(exc)) from None
    if "groebner_steps" in bounds:
        ideals.set_default_step_budget(int(bounds["groebner_steps"]))
    return pres, bounds


def _check_level(pres: PoissonPresentation, level: int):
    if not 1 <= level <= pres.nvars:
        raise SchemaError(f"level {level} out of range 1..{pres.nvars}")


def load_presentation(path: str) -> tuple[PoissonPresentation, dict]:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("presentation file must be a JSON object")
    return load_presentation_data(data)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _parse_gens(texts, ctx) -> list[Polynomial]:
    return [parse(t, ctx) for t in texts]


def cmd_check(args) -> int:
    pres, _ = load_presentation(args.file)
    report = verify_cgl(pres)
    _emit(report.to_json_dict())
    return 0 if report.ok else 1


def cmd_theta(args) -> int:
    pres, _ = load_presentation(args.file)
    _check_level(pres, args.level)
    L = level_data(pres, args.level)
    a = parse(args.expr, L.pres_A.ctx)
    print(theta(L, a))
    return 0


def cmd_normal(args) -> int:
    pres, _ = load_presentation(args.file)
    _check_level(pres, args.level)
    L = level_data(pres, args.level)
    a = parse(args.expr, L.pres_A.ctx)
    result = normal_element(L, a)
    print(result.element)
    print("poisson-normal: verified")
    print(f"identity {{x, x_{args.level}}} = -eta*x*x_{args.level}: verified (eta = {result.eta})")
    return 0


def cmd_d(args) -> int:
    pres, _ = load_presentation(args.file)
    _check_level(pres, args.level)
    L = level_data(pres, args.level)
    modulo = None
    if args.modulo:
        modulo = Ideal(L.pres_A.ctx, _parse_gens(args.modulo.split(";"), L.pres_A.ctx))
    d = d_element_search(L, modulo=modulo, degree_bound=args.degree_bound)
    if d is None:
        print("no d-element found within the degree bound (inconclusive)", file=sys.stderr)
        return 1
    print(d)
    print("sigma(d) = lambda*d: verified")
    print("delta(d) = -lambda*d^2: verified")
    return 0


def cmd_hprimes(args) -> int:
    pres, bounds = load_presentation(args.file)
    report = verify_cgl(pres)
    if not report.ok:
        print("presentation fails the tower axioms; run 'check' for details", file=sys.stderr)
        return 1
    bound = args.degree_bound or int(bounds.get("degree", 4))
    tree = enumerate_hprimes(pres, degree_bound=bound)
    if args.format == "dot":
        sys.stdout.write(tree.to_dot())
    else:
        _emit(tree.to_json_dict())
    return 0


def cmd_closure(args) -> int:
    pres, _ = load_presentation(args.file)
    I = Ideal(pres.ctx, _parse_gens(args.gen, pres.ctx))
    result = poisson_closure(pres.table, I)
    _emit({"generators": result.generator_strings()})
    return 0


def cmd_hcore(args) -> int:
    pres, _ = load_presentation(args.file)
    I = Ideal(pres.ctx, _parse_gens(args.gen, pres.ctx))
    result = h_core(pres.grading, I)
    _emit({"generators": result.generator_strings()})
    return 0


def cmd_chain(args) -> int:
    pres, _ = load_presentation(args.file)
    chain = [
        Ideal(pres.ctx, _parse_gens(spec.split(";"), pres.ctx)) for spec in args.ideal
    ]
    report = chain_report(pres, chain)
    _emit(report.to_json_dict())
    return 0


def cmd_center(args) -> int:
    pres, _ = load_presentation(args.file)
    M = extract_log_matrix(pres)
    _emit(poisson_center_torus(M).to_json_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pcgl",
        description="Exact computations on Poisson polynomial algebras with torus actions.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="verify the tower axioms")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("theta", help="apply the Cauchon map at a level")
    sp.add_argument("file")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("expr")
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("normal", help="build a Poisson-normal element theta(a) x^s")
    sp.add_argument("file")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("expr")
    sp.set_defaults(func=cmd_normal)

    sp = sub.add_parser("d", help="search the d-element of the generic fiber")
    sp.add_argument("file")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--modulo", help="semicolon-separated generators of the base ideal")
    sp.add_argument("--degree-bound", type=int, default=4)
    sp.set_defaults(func=cmd_d)

    sp = sub.add_parser("hprimes", help="enumerate torus-stable Poisson primes")
    sp.add_argument("file")
    sp.add_argument("--format", choices=("json", "dot"), default="json")
    sp.add_argument("--degree-bound", type=int, default=None)
    sp.set_defaults(func=cmd_hprimes)

    sp = sub.add_parser("closure", help="smallest Poisson ideal containing the input")
    sp.add_argument("file")
    sp.add_argument("-g", dest="gen", action="append", required=True)
    sp.set_defaults(func=cmd_closure)

    sp = sub.add_parser("hcore", help="largest torus-stable ideal inside the input")
    sp.add_argument("file")
    sp.add_argument("-g", dest="gen", action="append", required=True)
    sp.set_defaults(func=cmd_hcore)

    sp = sub.add_parser("chain", help="analyze a chain of Poisson ideals")
    sp.add_argument("file")
    sp.add_argument(
        "--ideal",
        action="append",
        required=True,
        help="semicolon-separated generators; use '0' for the zero ideal",
    )
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("center", help="Poisson center of the associated torus")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_center)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ParseError, TriangularityError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PcglError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
