"""Filtration documents: parsing, printing, lower-star input, generation.

The canonical text format is line oriented:

    # comment
    format v1
    params n=<n> p=<prime> kind=<simplicial|general>
    cell <id> dim=<q> grade=<g1,...,gn> [verts=<v1,...> | bdry=<id:coeff,...>]

Grades are comma-separated naturals.  Simplicial cells of dimension >= 1
carry a strictly increasing list of vertex ids and every face of a listed
simplex must be listed; incidence coefficients follow the alternating-sign
convention on the vertex list.  General cells list their facets with
explicit coefficients and may only reference ids declared on earlier
lines.  Parsing is strict: unknown keys, duplicate ids, malformed grades,
broken incidence axioms, and non-monotone grades are all hard errors
reported with their line number.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .algebra import PrimeField
from .complexes import CellComplex
from .filtration import (
    GradeVector,
    MAX_PARAMETERS,
    OneCriticalFiltration,
    format_grade,
    join_all,
)

FORMAT_VERSION = "v1"
_ID_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")


class ParseError(ValueError):
    """Syntax or semantic error in a filtration document."""

    def __init__(self, line: int, message: str, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class CellRecord:
    id: str
    dim: int
    grade: GradeVector
    verts: tuple[str, ...] | None = None
    bdry: tuple[tuple[str, int], ...] | None = None


class FiltrationDocument:
    """A parsed document together with the complex and filtration it defines."""

    def __init__(
        self,
        n: int,
        p: int,
        kind: str,
        records: Sequence[CellRecord],
        complex: CellComplex,
        filtration: OneCriticalFiltration,
    ):
        self.n = n
        self.p = p
        self.kind = kind
        self.records = tuple(sorted(records, key=lambda r: (r.dim, r.id)))
        self.complex = complex
        self.filtration = filtration

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiltrationDocument)
            and (self.n, self.p, self.kind) == (other.n, other.p, other.kind)
            and self.records == other.records
        )

    def text(self) -> str:
        return print_document(self)

    def sha256(self) -> str:
        return hashlib.sha256(self.text().encode()).hexdigest()


def _parse_kv(tokens: list[str], lineno: int, line: str) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(lineno, f"expected key=value, got {tok!r}", line.find(tok) + 1)
        key, value = tok.split("=", 1)
        if key in out:
            raise ParseError(lineno, f"duplicate key {key!r}")
        out[key] = value
    return out


def _parse_grade_field(text: str, n: int, lineno: int) -> GradeVector:
    parts = text.split(",") if text else []
    if len(parts) != n:
        raise ParseError(lineno, f"grade {text!r} has {len(parts)} coordinates, expected {n}")
    try:
        grade = tuple(int(c) for c in parts)
    except ValueError:
        raise ParseError(lineno, f"grade {text!r} is not a list of integers")
    if any(c < 0 for c in grade):
        raise ParseError(lineno, f"grade {text!r} has a negative coordinate")
    return grade


def parse_document(text: str) -> FiltrationDocument:
    lines = text.splitlines()
    header: dict[str, str] = {}
    saw_format = False
    records: list[CellRecord] = []
    line_of: dict[str, int] = {}
    declared: dict[str, int] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "format":
            if saw_format:
                raise ParseError(lineno, "repeated format line")
            if tokens[1:] != [FORMAT_VERSION]:
                raise ParseError(lineno, f"unsupported format {' '.join(tokens[1:])!r}")
            saw_format = True
        elif head == "params":
            if not saw_format:
                raise ParseError(lineno, "params before format line")
            if header:
                raise ParseError(lineno, "repeated params line")
            kv = _parse_kv(tokens[1:], lineno, line)
            unknown = set(kv) - {"n", "p", "kind"}
            if unknown:
                raise ParseError(lineno, f"unknown key {sorted(unknown)[0]!r}")
            missing = {"n", "p", "kind"} - set(kv)
            if missing:
                raise ParseError(lineno, f"missing key {sorted(missing)[0]!r}")
            try:
                header["n"] = str(int(kv["n"]))
                header["p"] = str(int(kv["p"]))
            except ValueError:
                raise ParseError(lineno, "n and p must be integers")
            if not 1 <= int(kv["n"]) <= MAX_PARAMETERS:
                raise ParseError(lineno, f"n must be in [1, {MAX_PARAMETERS}]")
            try:
                PrimeField(int(kv["p"]))
            except ValueError as exc:
                raise ParseError(lineno, str(exc))
            if kv["kind"] not in ("simplicial", "general"):
                raise ParseError(lineno, f"kind must be simplicial or general, got {kv['kind']!r}")
            header["kind"] = kv["kind"]
        elif head == "cell":
            if "kind" not in header:
                raise ParseError(lineno, "cell before params line")
            if len(tokens) < 2 or "=" in tokens[1]:
                raise ParseError(lineno, "cell line needs an id")
            cid = tokens[1]
            if not _ID_RE.match(cid):
                raise ParseError(lineno, f"bad cell id {cid!r}")
            if cid in line_of:
                raise ParseError(lineno, f"duplicate cell id {cid!r} (first at line {line_of[cid]})")
            kv = _parse_kv(tokens[2:], lineno, line)
            allowed = {"dim", "grade"} | (
                {"verts"} if header["kind"] == "simplicial" else {"bdry"}
            )
            unknown = set(kv) - allowed
            if unknown:
                raise ParseError(lineno, f"unknown key {sorted(unknown)[0]!r}")
            for req in ("dim", "grade"):
                if req not in kv:
                    raise ParseError(lineno, f"missing key {req!r}")
            try:
                dim = int(kv["dim"])
            except ValueError:
                raise ParseError(lineno, f"dim {kv['dim']!r} is not an integer")
            if dim < 0:
                raise ParseError(lineno, f"dim must be nonnegative, got {dim}")
            grade = _parse_grade_field(kv["grade"], int(header["n"]), lineno)
            verts = bdry = None
            if header["kind"] == "simplicial":
                verts = _parse_verts(kv.get("verts"), cid, dim, lineno)
            else:
                bdry = _parse_bdry(kv.get("bdry"), declared, dim, int(header["p"]), lineno)
            records.append(CellRecord(cid, dim, grade, verts=verts, bdry=bdry))
            line_of[cid] = lineno
            declared[cid] = dim
        else:
            raise ParseError(lineno, f"unknown directive {head!r}")
    if not saw_format:
        raise ParseError(len(lines) + 1, "missing format line")
    if "kind" not in header:
        raise ParseError(len(lines) + 1, "missing params line")
    return _assemble(
        int(header["n"]), int(header["p"]), header["kind"], records, line_of
    )


def _parse_verts(
    text: str | None, cid: str, dim: int, lineno: int
) -> tuple[str, ...]:
    if text is None:
        if dim == 0:
            return (cid,)
        raise ParseError(lineno, f"simplicial cell of dim {dim} needs verts")
    verts = tuple(text.split(",")) if text else ()
    for v in verts:
        if not _ID_RE.match(v):
            raise ParseError(lineno, f"bad vertex id {v!r}")
    if any(verts[i] >= verts[i + 1] for i in range(len(verts) - 1)):
        raise ParseError(lineno, f"verts {text!r} not strictly increasing")
    if len(verts) != dim + 1:
        raise ParseError(lineno, f"dim={dim} but verts lists {len(verts)} vertices")
    if dim == 0 and verts != (cid,):
        raise ParseError(lineno, f"vertex cell {cid!r} must have verts={cid}")
    return verts


def _parse_bdry(
    text: str | None, declared: dict[str, int], dim: int, p: int, lineno: int
) -> tuple[tuple[str, int], ...]:
    if text is None or text == "":
        return ()
    entries = []
    seen = set()
    for part in text.split(","):
        if ":" not in part:
            raise ParseError(lineno, f"expected id:coeff, got {part!r}")
        fid, coeff_text = part.rsplit(":", 1)
        if fid not in declared:
            raise ParseError(lineno, f"boundary references {fid!r}, not declared earlier")
        if fid in seen:
            raise ParseError(lineno, f"repeated boundary entry {fid!r}")
        seen.add(fid)
        if declared[fid] != dim - 1:
            raise ParseError(
                lineno,
                f"boundary cell {fid!r} has dim {declared[fid]}, expected {dim - 1}",
            )
        try:
            coeff = int(coeff_text)
        except ValueError:
            raise ParseError(lineno, f"coefficient {coeff_text!r} is not an integer")
        if coeff % p == 0:
            raise ParseError(lineno, f"coefficient of {fid!r} vanishes mod {p}")
        entries.append((fid, coeff % p))
    return tuple(entries)


def _assemble(
    n: int,
    p: int,
    kind: str,
    records: list[CellRecord],
    line_of: dict[str, int],
) -> FiltrationDocument:
    field = PrimeField(p)
    incidence: dict[tuple[str, str], int] = {}
    if kind == "simplicial":
        by_verts: dict[tuple[str, ...], str] = {}
        for rec in records:
            if rec.verts in by_verts:
                raise ParseError(
                    line_of[rec.id],
                    f"simplex {rec.verts} already declared as {by_verts[rec.verts]!r}",
                )
            by_verts[rec.verts] = rec.id
        for rec in records:
            if rec.dim == 0:
                continue
            for i in range(len(rec.verts)):
                face_verts = rec.verts[:i] + rec.verts[i + 1 :]
                fid = by_verts.get(face_verts)
                if fid is None:
                    raise ParseError(
                        line_of[rec.id],
                        f"face {'.'.join(face_verts)!r} of {rec.id!r} is not listed",
                    )
                incidence[(rec.id, fid)] = (-1) ** i
    else:
        for rec in records:
            for fid, coeff in rec.bdry:
                incidence[(rec.id, fid)] = coeff
    complex_ = CellComplex([(r.id, r.dim) for r in records], incidence, field)
    violations = complex_.validate()
    if violations:
        v = violations[0]
        lineno = max(line_of.get(c, 0) for c in v.members) if v.members else 0
        raise ParseError(lineno, f"incidence axiom violated: {v.message}")
    filtration = OneCriticalFiltration(complex_, {r.id: r.grade for r in records}, n)
    violations = filtration.validate()
    if violations:
        v = violations[0]
        lineno = max(line_of.get(c, 0) for c in v.members)
        raise ParseError(lineno, f"not one-critical: {v.message}")
    return FiltrationDocument(n, p, kind, records, complex_, filtration)


def print_document(doc: FiltrationDocument) -> str:
    lines = [
        f"format {FORMAT_VERSION}",
        f"params n={doc.n} p={doc.p} kind={doc.kind}",
    ]
    for rec in doc.records:
        parts = [f"cell {rec.id} dim={rec.dim} grade={format_grade(rec.grade)}"]
        if doc.kind == "simplicial" and rec.dim >= 1:
            parts.append("verts=" + ",".join(rec.verts))
        if doc.kind == "general" and rec.bdry:
            parts.append("bdry=" + ",".join(f"{fid}:{c}" for fid, c in sorted(rec.bdry)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def document_from_filtration(
    F: OneCriticalFiltration, kind: str = "general"
) -> FiltrationDocument:
    """Re-wrap a filtration (e.g. a Morse complex) as a general-kind document."""
    X = F.complex
    records = [
        CellRecord(
            cid,
            X.dim_of[cid],
            F.h[cid],
            bdry=tuple(sorted(X.faces[cid].items())),
        )
        for cid in X.cell_ids
    ]
    return FiltrationDocument(F.n, X.field.p, kind, records, X, F)


def lower_star(
    simplices: Iterable[Iterable[str]],
    vertex_grades: Mapping[str, GradeVector],
    n: int,
    p: int = 2,
) -> FiltrationDocument:
    """Simplicial filtration where each simplex enters at the join of its
    vertices' grades; order-preserving by construction."""
    closed: set[tuple[str, ...]] = set()
    for simplex in simplices:
        verts = tuple(sorted({str(v) for v in simplex}))
        if verts:
            for k in range(1, len(verts) + 1):
                closed.update(combinations(verts, k))
    for verts in closed:
        for v in verts:
            if not _ID_RE.match(v):
                raise ValueError(f"bad vertex id {v!r}")
            if v not in vertex_grades:
                raise ValueError(f"vertex {v!r} has no grade")
    records = []
    for verts in sorted(closed):
        grade = join_all(tuple(vertex_grades[v]) for v in verts)
        cid = ".".join(verts)
        records.append(CellRecord(cid, len(verts) - 1, grade, verts=verts))
    return _assemble(n, p, "simplicial", records, {rec.id: 0 for rec in records})


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for the random one-critical fixture generator."""

    n: int
    vertices: int
    top_dim: int = 2
    fill_probs: tuple[float, ...] = (0.5, 0.3)
    grade_range: tuple[int, ...] | int = 4
    seed: int = 0

    def ranges(self) -> tuple[int, ...]:
        r = self.grade_range
        out = (r,) * self.n if isinstance(r, int) else tuple(r)
        if len(out) != self.n:
            raise ValueError(f"grade_range needs {self.n} entries, got {len(out)}")
        if any(k < 1 for k in out):
            raise ValueError("grade range must be >= 1 in every coordinate")
        return out

    def probs(self) -> tuple[float, ...]:
        out = tuple(self.fill_probs)[: self.top_dim]
        out = out + (out[-1] if out else 0.0,) * (self.top_dim - len(out))
        if any(not 0.0 <= p <= 1.0 for p in out):
            raise ValueError("fill probabilities must lie in [0, 1]")
        return out


def generate_random(params: GeneratorParams, p: int = 2) -> FiltrationDocument:
    """Random simplicial lower-star filtration, deterministic per seed.

    Skeleton filling by dimension: a candidate simplex is eligible once all
    its facets are present, and is kept with the per-dimension probability.
    Vertex grades are uniform in the given ranges, and cells enter at the
    join of their vertex grades, so the result is always one-critical.
    """
    rng = random.Random(params.seed)
    width = max(2, len(str(max(params.vertices - 1, 0))))
    verts = [f"v{idx:0{width}d}" for idx in range(params.vertices)]
    present: set[tuple[str, ...]] = {(v,) for v in verts}
    probs = params.probs()
    for d in range(1, params.top_dim + 1):
        prob = probs[d - 1]
        for candidate in combinations(verts, d + 1):
            if all(
                candidate[:i] + candidate[i + 1 :] in present
                for i in range(len(candidate))
            ):
                if rng.random() < prob:
                    present.add(candidate)
    ranges = params.ranges()
    vertex_grades = {
        v: tuple(rng.randrange(k) for k in ranges) for v in sorted(verts)
    }
    return lower_star(sorted(present), vertex_grades, params.n, p)
