"""Command-line front end.

Exit codes: 0 success, 1 negative decision (Jacobi violations, a failed
grading check or NotDerivable), 2 usage or input errors.  All error text
goes to stderr; `--json` renders the same values as one JSON document
with numbers as strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bch, carnot, catalog, derivability, goodman, lie
from .derivability import GradingOperator
from .lie import LieAlgebra


class CliError(Exception):
    """Input or usage problem; maps to exit code 2."""


def _load_algebra(source: str) -> LieAlgebra:
    if source.startswith("catalog:"):
        name = source[len("catalog:") :]
        try:
            return catalog.get(name).algebra
        except catalog.UnknownEntryError as exc:
            raise CliError(str(exc)) from exc
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {source!r}: {exc}") from exc
    try:
        return lie.parse_algebra(text)
    except lie.AlgebraFormatError as exc:
        raise CliError(f"parse error in {source!r}: {exc}") from exc


def _frac(x: Fraction) -> str:
    return str(x)


def _vec(v) -> str:
    return ",".join(_frac(Fraction(c)) for c in v)


def _parse_vec(text: str, dim: int):
    try:
        coords = [Fraction(part.strip()) for part in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"malformed coordinate list {text!r}") from exc
    if len(coords) != dim:
        raise CliError(f"expected {dim} coordinates, got {len(coords)}")
    return coords


def _matrix_lines(m) -> list[str]:
    return [_vec(row) for row in m]


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _cmd_check(args) -> int:
    g = _load_algebra(args.source)
    violations = lie.check_jacobi(g)
    if violations:
        payload = {
            "command": "check",
            "jacobi": "violated",
            "violations": [
                {"triple": [i + 1, j + 1, k + 1], "value": _vec(v)} for i, j, k, v in violations
            ],
        }
        lines = ["Jacobi identity violated on triples:"] + [
            f"  ({i+1},{j+1},{k+1}): {_vec(v)}" for i, j, k, v in violations
        ]
        _emit(args, payload, lines)
        return 1
    f = lie.lower_central_series(g)
    tau = f.quotient_dims
    payload = {
        "command": "check",
        "jacobi": "ok",
        "dim": str(g.dim),
        "class": str(f.nilpotency_class),
        "tau": [str(t) for t in tau],
    }
    lines = [
        "Jacobi identity: ok",
        f"dim = {g.dim}",
        f"nilpotency class = {f.nilpotency_class}",
        "tau = (" + ",".join(str(t) for t in tau) + ")",
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_e(args) -> int:
    g = _load_algebra(args.source)
    result = derivability.e_invariant(g)
    grading = carnot.grading_from_operator(g, result.witness)
    layer_dims = ",".join(str(len(layer)) for layer in grading.layers)
    payload = {
        "command": "e",
        "e": _frac(result.e),
        "witness": _matrix_lines(result.witness.rows),
        "layer_dims": [str(len(layer)) for layer in grading.layers],
    }
    lines = [
        f"e = {_frac(result.e)}",
        f"witness layer dims = ({layer_dims})",
        "witness (rows):",
    ] + ["  " + row for row in _matrix_lines(result.witness.rows)]
    _emit(args, payload, lines)
    return 0


def _cmd_derivable(args) -> int:
    g = _load_algebra(args.source)
    try:
        conditions = derivability.parse_condition_set(args.cond)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    witness = derivability.is_A_derivable(g, conditions)
    if witness is None:
        _emit(
            args,
            {"command": "derivable", "conditions": args.cond, "result": "NotDerivable"},
            ["NotDerivable"],
        )
        return 1
    payload = {
        "command": "derivable",
        "conditions": args.cond,
        "result": "derivable",
        "witness": _matrix_lines(witness.rows),
    }
    lines = ["derivable; witness (rows):"] + ["  " + row for row in _matrix_lines(witness.rows)]
    _emit(args, payload, lines)
    return 0


def _auto_operator(g: LieAlgebra) -> GradingOperator:
    return derivability.e_invariant(g).witness


def _cmd_carnot(args) -> int:
    g = _load_algebra(args.source)
    if args.operator != "auto":
        raise CliError("only --operator auto is supported")
    d = _auto_operator(g)
    ca = carnot.carnot_algebra(g, d)
    text = carnot.serialize_carnot(ca)
    payload = {
        "command": "carnot",
        "degrees": [str(d_) for d_ in ca.degrees],
        "definition": text,
    }
    _emit(args, payload, [text.rstrip("\n")])
    return 0


def _cmd_bch(args) -> int:
    g = _load_algebra(args.source)
    if args.carnot:
        d = _auto_operator(g)
        _, ca = carnot.carnot_pair(g, d)
        x = _parse_vec(args.x, g.dim)
        y = _parse_vec(args.y, g.dim)
        product = bch.carnot_product(ca, x, y)
        note = "coordinates: grading eigenbasis; law: graded bracket"
    else:
        f = lie.lower_central_series(g)
        x = _parse_vec(args.x, g.dim)
        y = _parse_vec(args.y, g.dim)
        product = bch.bch_product(g, f, x, y)
        note = "coordinates: original basis"
    payload = {"command": "bch", "product": _vec(product), "note": note}
    _emit(args, payload, [_vec(product)])
    return 0


def _cmd_diff(args) -> int:
    g = _load_algebra(args.source)
    d = _auto_operator(g)
    g_eig, ca = carnot.carnot_pair(g, d)
    x = _parse_vec(args.x, g.dim)
    y = _parse_vec(args.y, g.dim)
    diff = bch.law_difference(g_eig, ca, x, y)
    payload = {
        "command": "diff",
        "difference": _vec(diff),
        "note": "coordinates: grading eigenbasis of the e-invariant witness",
    }
    _emit(args, payload, [_vec(diff)])
    return 0


def _cmd_goodman(args) -> int:
    g = _load_algebra(args.source)
    d = _auto_operator(g)
    ladder = [Fraction(2) ** k for k in range(args.tmax + 1)]
    report = goodman.goodman_check(g, d, args.samples, ladder, args.seed)
    payload = {"command": "goodman", "report": report.to_json_dict()}
    lines = [
        f"e_D = {report.e_d}",
        f"samples = {len(report.samples)} (pairs={args.samples}, ladder=2^0..2^{args.tmax})",
        f"identically_zero = {report.identically_zero}",
        f"fitted_slope = {report.fitted_slope:.12g}",
        f"constant_estimate = {report.constant_estimate:.12g}",
    ]
    _emit(args, payload, lines)
    return 0


def _cmd_grading(args) -> int:
    g = _load_algebra(args.source)
    try:
        degrees = [int(part) for part in args.degrees.split(",")]
    except ValueError as exc:
        raise CliError(f"malformed degree list {args.degrees!r}") from exc
    if len(degrees) != g.dim or any(d_ < 1 for d_ in degrees):
        raise CliError(f"need {g.dim} positive degrees")
    ok, violations = carnot.verify_grading(g, degrees)
    payload = {
        "command": "grading",
        "degrees": [str(d_) for d_ in degrees],
        "result": "grading" if ok else "not a grading",
        "violations": [[i + 1, j + 1] for i, j in violations],
    }
    if ok:
        _emit(args, payload, ["grading: yes"])
        return 0
    lines = ["grading: no; violating pairs:"] + [f"  ({i+1},{j+1})" for i, j in violations]
    _emit(args, payload, lines)
    return 1


def _cmd_catalog(args) -> int:
    if args.action == "list":
        payload = {"command": "catalog", "names": catalog.names()}
        _emit(args, payload, catalog.names())
        return 0
    if not args.name:
        raise CliError("catalog show needs a name")
    try:
        entry = catalog.get(args.name)
    except catalog.UnknownEntryError as exc:
        raise CliError(str(exc)) from exc
    payload = {
        "command": "catalog",
        "name": entry.name,
        "aliases": list(entry.aliases),
        "definition": entry.definition,
        "note": entry.note,
    }
    lines = [f"name: {entry.name}"]
    if entry.aliases:
        lines.append("aliases: " + ", ".join(entry.aliases))
    if entry.note:
        lines.append(f"note: {entry.note}")
    lines.append(entry.definition.rstrip("\n"))
    _emit(args, payload, lines)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilgrade",
        description=(
            "Exact computations on nilpotent Lie algebras: derivability "
            "conditions, the e-invariant, Carnot-graded companions, "
            "truncated BCH group laws and difference-law sampling."
        ),
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--json", action="store_true", help="emit one JSON document")
        p.set_defaults(fn=fn)
        return p

    p = add("check", _cmd_check, help="Jacobi check, nilpotency class and layer dims")
    p.add_argument("source", help="file path or catalog:<name>")

    p = add("e", _cmd_e, help="e-invariant with witness operator")
    p.add_argument("source")

    p = add("derivable", _cmd_derivable, help="decide A-derivability")
    p.add_argument("source")
    p.add_argument("--cond", required=True, help='condition set, e.g. "(1,1|3),(1,2|4)"')

    p = add("carnot", _cmd_carnot, help="emit the associated Carnot-graded algebra")
    p.add_argument("source")
    p.add_argument("--operator", default="auto", help="grading operator choice (auto)")

    p = add("bch", _cmd_bch, help="group product in exponential coordinates")
    p.add_argument("source")
    p.add_argument("--x", required=True, help="comma-separated rational coordinates")
    p.add_argument("--y", required=True)
    p.add_argument("--carnot", action="store_true", help="use the graded law")

    p = add("diff", _cmd_diff, help="difference of the two group laws")
    p.add_argument("source")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = add("goodman", _cmd_goodman, help="sample the difference-law inequality")
    p.add_argument("source")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--tmax", type=int, default=10, help="ladder 2^0..2^tmax")
    p.add_argument("--seed", type=int, default=0)

    p = add("grading", _cmd_grading, help="verify an explicit positive grading")
    p.add_argument("source")
    p.add_argument("--degrees", required=True, help="comma-separated positive integers")

    p = add("catalog", _cmd_catalog, help="list or show built-in algebras")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (lie.AlgebraFormatError, lie.NotNilpotentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
