"""Command-line interface.

Subcommands: check (validators only), homology (dims at one grade), betti
(sparse Betti table as CSV/JSON), morse (critical-cell census and reduced
complex), verify (support/bounds theorem checks), generate (random
fixture documents).  Exit codes: 0 ok, 1 a verified claim failed, 2 input
error.  Errors go to stderr with an "error: <category>:" prefix.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .critical import (
    SupportReport,
    verify_bifiltration_bounds,
    verify_support_theorem,
)
from .docio import (
    FiltrationDocument,
    GeneratorParams,
    ParseError,
    document_from_filtration,
    generate_random,
    parse_document,
    print_document,
)
from .filtration import parse_grade
from .koszul import betti_tables
from .morse import build_matching, morse_complex

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_INPUT_ERROR = 2


def _fail(category: str, message: str) -> int:
    print(f"error: {category}: {message}", file=sys.stderr)
    return EXIT_INPUT_ERROR


def _load(path: str) -> tuple[FiltrationDocument, int | None]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    seed = None
    for line in text.splitlines():
        if line.startswith("# seed "):
            try:
                seed = int(line.removeprefix("# seed ").strip())
            except ValueError:
                pass
            break
    return parse_document(text), seed


def _write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_text(header: list[str], rows: list[tuple]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_check(args) -> int:
    _load(args.file)
    print("ok")
    return EXIT_OK


def cmd_homology(args) -> int:
    doc, _ = _load(args.file)
    F = doc.filtration
    try:
        grade = parse_grade(args.grade, F.n)
    except ValueError as exc:
        return _fail("input", str(exc))
    from .koszul import ModuleSlice

    rows = []
    for q in range(max(F.complex.top_dim, 0) + 1):
        rows.append((q, ModuleSlice(F, q).dim(grade)))
    _write_text(None, _csv_text(["q", "dim"], rows))
    return EXIT_OK


def cmd_betti(args) -> int:
    doc, _ = _load(args.file)
    F = doc.filtration
    table = betti_tables(F, args.qmax)
    header = ["q"] + [f"u{i}" for i in range(1, F.n + 1)] + ["i", "xi"]
    text = _csv_text(header, table.rows())
    _write_text(args.csv, text)
    if args.json:
        _write_text(args.json, json.dumps(table.to_json_dict(doc.sha256()), indent=2) + "\n")
    return EXIT_OK


def cmd_morse(args) -> int:
    doc, _ = _load(args.file)
    F = doc.filtration
    V = build_matching(F)
    result = morse_complex(F, V)
    header = ["q"] + [f"u{i}" for i in range(1, F.n + 1)] + ["count"]
    rows = [(q, *grade, count) for (q, grade), count in result.census().items()]
    _write_text(args.csv, _csv_text(header, rows))
    if args.dump:
        _write_text(args.dump, print_document(document_from_filtration(result.filtration())))
    return EXIT_OK


def cmd_verify(args) -> int:
    doc, seed = _load(args.file)
    F = doc.filtration
    V = build_matching(F)
    reports: list[SupportReport] = []
    if args.theorem in ("support", "all"):
        reports.append(verify_support_theorem(F, V))
    if args.theorem in ("bounds", "all"):
        if F.n != 2:
            if args.theorem == "bounds":
                return _fail("input", f"bounds verification requires n=2, got n={F.n}")
        else:
            reports.append(verify_bifiltration_bounds(F, V=V))
    claims = [c for r in reports for c in r.claims]
    merged = {
        "claims": [c.to_json_dict() for c in claims],
        "supports": {k: v for r in reports for k, v in r.supports.items()},
        "grades": {k: v for r in reports for k, v in r.grade_sets.items()},
        "seed": seed,
        "modulus": F.field.p,
        "fixture_hash": doc.sha256(),
    }
    failures = [c for c in claims if c.failed]
    if failures:
        merged["counterexample"] = {
            "claims": [c.to_json_dict() for c in failures],
            "document": doc.text(),
            "matching": list(V.pairs),
        }
    _write_text(args.json, json.dumps(merged, indent=2) + "\n")
    return EXIT_CLAIM_FAILED if failures else EXIT_OK


def cmd_generate(args) -> int:
    try:
        params = GeneratorParams(
            n=args.n,
            vertices=args.vertices,
            top_dim=args.top_dim,
            fill_probs=tuple(float(x) for x in args.probs.split(",")) if args.probs else (0.5, 0.3),
            grade_range=tuple(int(x) for x in args.grade_range.split(",")) if args.grade_range else 4,
            seed=args.seed,
        )
        doc = generate_random(params, p=args.p)
    except ValueError as exc:
        return _fail("input", str(exc))
    _write_text(args.out, f"# seed {args.seed}\n" + print_document(doc))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morsebetti",
        description="Betti tables of one-critical multifiltrations via Koszul "
        "complexes, with discrete Morse reduction and support-theorem checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a filtration document")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("homology", help="homology dimensions at one grade")
    p.add_argument("file")
    p.add_argument("--grade", required=True, help="comma-separated grade, e.g. 1,1")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("betti", help="sparse Betti table")
    p.add_argument("file")
    p.add_argument("--qmax", type=int, default=None)
    p.add_argument("--csv", default=None, help="CSV output path (default stdout)")
    p.add_argument("--json", default=None, help="also write a JSON document")
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("morse", help="greedy matching census and reduced complex")
    p.add_argument("file")
    p.add_argument("--csv", default=None, help="census CSV path (default stdout)")
    p.add_argument("--dump", default=None, help="write the reduced complex as a document")
    p.set_defaults(func=cmd_morse)

    p = sub.add_parser("verify", help="check the support theorems on this input")
    p.add_argument("file")
    p.add_argument("--theorem", choices=["support", "bounds", "all"], default="all")
    p.add_argument("--json", default=None, help="report path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="emit a random fixture document")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--top-dim", type=int, default=2)
    p.add_argument("--probs", default=None, help="fill probabilities per dimension, e.g. 0.5,0.3")
    p.add_argument("--grade-range", default=None, help="grade values per coordinate, e.g. 4,4")
    p.add_argument("--p", type=int, default=2, help="field modulus")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        return _fail("parse", str(exc))
    except FileNotFoundError as exc:
        return _fail("input", str(exc))
    except ValueError as exc:
        return _fail("input", str(exc))


if __name__ == "__main__":
    sys.exit(main())
