"""Command-line front end.

One subcommand per mathematical domain: ``orbifold`` classifies critical
portraits, ``matrix`` analyzes a nonnegative rational matrix, ``slopes``
decides the torus-quotient obstruction question from a homology action,
``table`` analyzes declared pullback combinatorics, and ``canonical``
checks a candidate multicurve against the component criteria.

Exit codes: 0 completed analysis (whatever the mathematical verdict),
2 malformed input, 3 precondition violation, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path
from typing import Any, Optional

from . import documents as docs
from .documents import InputFormatError
from .orbifold import OrbifoldClass, classify_orbifold
from .slopes import (
    canonical_obstruction_2222,
    eigenvalue_classification,
    find_obstruction_by_search,
    normalize,
)
from .spectral import (
    NonnegMatrix,
    PreconditionError,
    imprimitive_block_decomposition,
    imprimitivity_index,
    is_irreducible,
    is_primitive,
    leading_eigenvalue_interval,
    power_positive_exponent,
    scc_partition,
    spectral_radius_class,
    exists_positive_subinvariant_vector,
)
from .tables import (
    analyze_table,
    check_canonical_candidate,
    is_completely_invariant,
    is_simple_obstruction,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_RESOURCE_CAP = 4

DEFAULT_WIDTH = "1/1000000"
DEFAULT_SUBSET_CAP = 12

THREADS_ENV = "THURSTON_OBSTRUCT_THREADS"


def _worker_cap() -> int:
    """Upper bound on worker count; the analyses here all run serially,
    which complies with any positive cap."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InputFormatError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if value < 1:
        raise InputFormatError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _load_json(text: str, origin: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(
            f"{origin}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _load_inline_matrix(text: str, origin: str) -> Any:
    # accept the shorthand [[1/2,0],[1,1]] by quoting bare fractions
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        rewritten = re.sub(r"(-?\d+)\s*/\s*(\d+)", r'"\1/\2"', text)
        try:
            return json.loads(rewritten)
        except json.JSONDecodeError:
            pass
        return _load_json(text, origin)  # re-raise with the original diagnostics


def _read_input(inline: Optional[str], path_or_json: Optional[str]) -> Any:
    if inline is not None and path_or_json is not None:
        raise InputFormatError("give either an input file or --matrix, not both")
    if inline is not None:
        return _load_inline_matrix(inline, "--matrix")
    if path_or_json is None:
        raise InputFormatError("missing input document")
    stripped = path_or_json.lstrip()
    if stripped.startswith("["):
        return _load_inline_matrix(path_or_json, "argument")
    if stripped.startswith("{"):
        return _load_json(path_or_json, "argument")
    path = Path(path_or_json)
    if not path.exists():
        raise InputFormatError(f"input file {path_or_json!r} does not exist")
    return _load_json(path.read_text(encoding="utf-8"), str(path))


# ---------------------------------------------------------------------------
# per-command analyses; each takes the echoed request and returns (result, code)


def _run_orbifold(input_doc: Any, options: dict) -> tuple[dict, int]:
    portrait = docs.portrait_from_doc(input_doc)
    sig = classify_orbifold(portrait)
    result = docs.signature_to_doc(sig)
    result["is_2222"] = sig.kind == OrbifoldClass.PARABOLIC and sig.weights == (2, 2, 2, 2)
    return result, EXIT_OK


def _run_matrix(input_doc: Any, options: dict) -> tuple[dict, int]:
    rows = docs.rational_rows_from_doc(input_doc["matrix"], "matrix")
    try:
        matrix = NonnegMatrix(rows)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    width = docs.parse_rational(options["width"], "options.width")
    if width <= 0:
        raise PreconditionError("width must be positive")
    spectral = spectral_radius_class(matrix)
    structure = scc_partition(matrix)
    irreducible = is_irreducible(matrix)
    result: dict[str, Any] = {
        "n": matrix.n,
        "spectral": docs.spectral_to_doc(spectral),
        "leading_interval": docs.interval_to_doc(leading_eigenvalue_interval(matrix, width)),
        "scc": docs.block_structure_to_doc(structure),
        "irreducible": irreducible,
        "imprimitivity_index": imprimitivity_index(matrix) if irreducible else None,
        "primitive": is_primitive(matrix) if irreducible else False,
        "power_positive_exponent": power_positive_exponent(matrix) if matrix.n else None,
        "imprimitive_decomposition": docs.imprimitive_to_doc(imprimitive_block_decomposition(matrix))
        if irreducible
        else None,
    }
    if options["check_simple"]:
        cert = exists_positive_subinvariant_vector(matrix)
        result["simple"] = {
            "exists": cert is not None,
            "certificate": [docs.format_rational(x) for x in cert] if cert is not None else None,
        }
    return result, EXIT_OK


def _run_slopes(input_doc: Any, options: dict) -> tuple[dict, int]:
    raw = docs.int_matrix2_from_doc(input_doc["matrix"], "matrix")
    tmap = normalize(raw)
    canonical = canonical_obstruction_2222(tmap)
    result: dict[str, Any] = {
        "action": docs.torus_map_to_doc(tmap),
        "degree": tmap.degree,
        "eigenvalues": docs.eigenvalue_class_to_doc(eigenvalue_classification(tmap)),
        "canonical_obstruction": docs.obstruction_slope_to_doc(canonical),
    }
    bound = options["bound"]
    if bound is not None:
        if bound < 1:
            raise PreconditionError("search bound must be at least 1")
        result["search"] = {
            "bound": bound,
            "found": docs.obstruction_slope_to_doc(find_obstruction_by_search(tmap, bound)),
        }
    else:
        result["search"] = None
    return result, EXIT_OK


def _run_table(input_doc: Any, options: dict) -> tuple[dict, int]:
    table, multicurve = docs.table_from_doc(input_doc)
    report = analyze_table(table, multicurve, subset_cap=options["subset_cap"])
    result = docs.table_report_to_doc(report)
    return result, EXIT_RESOURCE_CAP if report.minimal.truncated else EXIT_OK


def _run_canonical(input_doc: Any, options: dict) -> tuple[dict, int]:
    table, multicurve, decomposition = docs.canonical_from_doc(input_doc)
    report = check_canonical_candidate(
        table, multicurve, decomposition, subset_cap=options["subset_cap"]
    )
    result = docs.canonical_report_to_doc(report)
    cert = is_simple_obstruction(table, multicurve)
    result["candidate"] = {
        "curves": multicurve,
        "simple_certificate": [docs.format_rational(x) for x in cert]
        if cert is not None
        else None,
        "completely_invariant": is_completely_invariant(table, multicurve),
    }
    return result, EXIT_RESOURCE_CAP if report.truncated else EXIT_OK


_RUNNERS = {
    "orbifold": _run_orbifold,
    "matrix": _run_matrix,
    "slopes": _run_slopes,
    "table": _run_table,
    "canonical": _run_canonical,
}


def run_request(request: dict) -> tuple[dict, int]:
    """Execute an analysis request and assemble its report document.

    The request document is echoed into the report, so re-running the
    report's embedded request reproduces the report bit for bit.
    """
    command = request.get("command")
    if command not in _RUNNERS:
        raise InputFormatError(f"unknown command {command!r}")
    result, code = _RUNNERS[command](request["input"], request["options"])
    report = {
        "schema": docs.REPORT_SCHEMA,
        "request": request,
        "result": result,
    }
    return report, code


# ---------------------------------------------------------------------------
# text rendering


def _render_simple(doc: Optional[dict]) -> str:
    if doc is None:
        return "not requested"
    if doc["exists"]:
        return f"yes, certificate vector [{', '.join(doc['certificate'])}]"
    return "no (no positive subinvariant vector exists)"


def _render_obstruction_slope(doc: dict) -> str:
    if doc["empty"]:
        return "empty"
    p, q = doc["slope"]
    return f"nonempty, slope {p}/{q}, multiplier {doc['multiplier']}"


def _tristate_text(value) -> str:
    return {True: "yes", False: "no", None: "unknown"}[value]


def render_text(report: dict) -> str:
    request = report["request"]
    result = report["result"]
    command = request["command"]
    lines = [f"command: {command}"]
    if command == "orbifold":
        ram = ", ".join(f"{k} -> {v}" for k, v in result["ramification"].items())
        lines.append(f"ramification: {ram}")
        lines.append(f"weights: ({', '.join(str(w) for w in result['weights'])})")
        lines.append(f"euler characteristic: {result['chi']}")
        lines.append(f"orbifold class: {result['class']}")
        lines.append(f"(2,2,2,2)-map: {'yes' if result['is_2222'] else 'no'}")
    elif command == "matrix":
        lines.append(f"size: {result['n']}")
        spectral = result["spectral"]
        lines.append(
            f"spectral class: {spectral['class']} "
            f"(interval [{spectral['interval'][0]}, {spectral['interval'][1]}])"
        )
        li = result["leading_interval"]
        lines.append(f"leading eigenvalue interval: [{li[0]}, {li[1]}]")
        lines.append(f"irreducible: {'yes' if result['irreducible'] else 'no'}")
        if result["irreducible"]:
            lines.append(f"imprimitivity index: {result['imprimitivity_index']}")
            lines.append(f"primitive: {'yes' if result['primitive'] else 'no'}")
        scc = result["scc"]
        lines.append(
            f"scc blocks: sizes {scc['block_sizes']}, permutation {scc['permutation']}"
        )
        if "simple" in result:
            lines.append(f"simple obstruction: {_render_simple(result['simple'])}")
    elif command == "slopes":
        lines.append(f"action: {result['action']} (degree {result['degree']})")
        eig = result["eigenvalues"]
        if eig["kind"] == "two_distinct_integers":
            lines.append(f"eigenvalues: two distinct integers {eig['d1']}, {eig['d2']}")
        elif eig["kind"] == "equal_integers":
            lines.append(f"eigenvalues: equal integers {eig['d']}, {eig['d']}")
        else:
            lines.append("eigenvalues: non-integer or complex")
        lines.append(
            f"canonical obstruction: {_render_obstruction_slope(result['canonical_obstruction'])}"
        )
        if result["search"] is not None:
            lines.append(
                f"search (bound {result['search']['bound']}): "
                f"{_render_obstruction_slope(result['search']['found'])}"
            )
    elif command == "table":
        lines.append(f"curves: {result['curves']}")
        for row in result["matrix"]:
            lines.append(f"  [{', '.join(row)}]")
        spectral = result["spectral"]
        lines.append(
            f"spectral class: {spectral['class']} "
            f"(interval [{spectral['interval'][0]}, {spectral['interval'][1]}])"
        )
        lines.append(f"obstruction: {'yes' if result['is_obstruction'] else 'no'}")
        lines.append(f"invariant: {_tristate_text(result['invariant'])}")
        lines.append(f"completely invariant: {_tristate_text(result['completely_invariant'])}")
        lines.append(f"simple obstruction: {_render_simple(result['simple'])}")
        if result["simple_core"] is not None:
            lines.append(f"simple core: {result['simple_core']}")
        lines.append(f"levy cycles: {result['levy_cycles']}")
        minimal = result["minimal_obstructions"]
        lines.append(
            f"minimal obstructions: {minimal['multicurves']}"
            + (" (search truncated)" if minimal["truncated"] else "")
        )
    elif command == "canonical":
        lines.append(f"verdict: {'Accept' if result['accepted'] else 'Reject'}")
        for msg in result["preconditions"]:
            lines.append(f"  precondition failed: {msg}")
        for comp in result["components"]:
            status = "pass" if comp["passed"] else "fail"
            lines.append(f"component {comp['index']} ({comp['kind']}): {status}")
            for reason in comp["reasons"]:
                lines.append(f"    {reason}")
        lines.append(f"note: {result['note']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thurston-obstruct",
        description="Exact obstruction-theoretic analyses of branched sphere covers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, matrix_flag: bool):
        p.add_argument(
            "input",
            nargs="?",
            help="input document: a file path or inline JSON",
        )
        if matrix_flag:
            p.add_argument("--matrix", help="inline JSON matrix, e.g. '[[2,0],[0,3]]'")
        p.add_argument(
            "--format",
            choices=("json", "text"),
            default="text",
            help="report format (default: text)",
        )

    p_orb = sub.add_parser("orbifold", help="classify a critical portrait")
    add_common(p_orb, matrix_flag=False)

    p_mat = sub.add_parser("matrix", help="analyze a nonnegative rational matrix")
    add_common(p_mat, matrix_flag=True)
    p_mat.add_argument(
        "--width",
        default=DEFAULT_WIDTH,
        help=f"eigenvalue interval width as p/q (default {DEFAULT_WIDTH})",
    )
    p_mat.add_argument(
        "--check-simple",
        action="store_true",
        help="also search for a positive subinvariant vector",
    )

    p_slopes = sub.add_parser("slopes", help="torus-quotient obstruction decision")
    add_common(p_slopes, matrix_flag=True)
    p_slopes.add_argument(
        "--bound", type=int, default=None, help="also run the brute-force slope search"
    )

    p_table = sub.add_parser("table", help="analyze a curve table")
    add_common(p_table, matrix_flag=False)
    p_table.add_argument(
        "--subset-cap",
        type=int,
        default=DEFAULT_SUBSET_CAP,
        help=f"largest multicurve size searched (default {DEFAULT_SUBSET_CAP})",
    )

    p_canon = sub.add_parser("canonical", help="check a canonical-obstruction candidate")
    add_common(p_canon, matrix_flag=False)
    p_canon.add_argument(
        "--subset-cap",
        type=int,
        default=DEFAULT_SUBSET_CAP,
        help=f"largest multicurve size searched (default {DEFAULT_SUBSET_CAP})",
    )
    return parser


def _request_from_args(args: argparse.Namespace) -> dict:
    command = args.command
    inline = getattr(args, "matrix", None)
    raw = _read_input(inline, args.input)
    if command in ("matrix", "slopes"):
        input_doc = docs.matrix_doc_from_value(raw) if command == "matrix" else _slopes_doc(raw)
    elif command == "orbifold":
        input_doc = docs.portrait_to_doc(docs.portrait_from_doc(raw))
    elif command == "table":
        table, multicurve = docs.table_from_doc(raw)
        input_doc = docs.table_to_doc(table, multicurve)
    else:
        table, multicurve, decomposition = docs.canonical_from_doc(raw)
        input_doc = {
            "schema": docs.CANONICAL_SCHEMA,
            "table": {k: v for k, v in docs.table_to_doc(table).items() if k != "schema"},
            "multicurve": multicurve,
            "decomposition": docs.decomposition_to_doc(decomposition),
        }
    options: dict[str, Any] = {}
    if command == "matrix":
        options = {"width": args.width, "check_simple": bool(args.check_simple)}
    elif command == "slopes":
        options = {"bound": args.bound}
    elif command in ("table", "canonical"):
        options = {"subset_cap": args.subset_cap}
    return {"command": command, "input": input_doc, "options": options}


def _slopes_doc(raw: Any) -> dict:
    if isinstance(raw, dict):
        schema = raw.get("schema")
        if schema != docs.MATRIX_SCHEMA:
            raise InputFormatError(f"schema: expected {docs.MATRIX_SCHEMA!r}, got {schema!r}")
        value = raw.get("matrix")
    else:
        value = raw
    action = docs.int_matrix2_from_doc(value, "matrix")
    return {"schema": docs.MATRIX_SCHEMA, "matrix": [list(action[0]), list(action[1])]}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _worker_cap()
        request = _request_from_args(args)
        report, code = run_request(request)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.format == "json":
        sys.stdout.write(docs.dumps(report))
    else:
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
