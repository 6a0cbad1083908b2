"""Grade vectors in N^n and one-critical multifiltrations.

A grade is a tuple of n integers ordered componentwise; meet and join are
componentwise min and max.  Grades with a negative coordinate are the
"outside N^n" marker: they compare as usual but their sublevel set is
empty.  A one-critical filtration assigns every cell a single entrance
grade through an order-preserving function h, and the sublevel set at u is
{cells with h(cell) <= u}.

n is capped at 8 because directions subsets are enumerated as bitmasks
(2^n Koszul summands per grade).
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Mapping

from .complexes import CellComplex, Violation

MAX_PARAMETERS = 8

GradeVector = tuple[int, ...]


def leq(u: GradeVector, v: GradeVector) -> bool:
    return all(a <= b for a, b in zip(u, v, strict=True))


def meet(u: GradeVector, v: GradeVector) -> GradeVector:
    return tuple(min(a, b) for a, b in zip(u, v, strict=True))


def join(u: GradeVector, v: GradeVector) -> GradeVector:
    return tuple(max(a, b) for a, b in zip(u, v, strict=True))


def join_all(grades: Iterable[GradeVector]) -> GradeVector:
    it = iter(grades)
    out = next(it)
    for g in it:
        out = join(out, g)
    return out


def meet_all(grades: Iterable[GradeVector]) -> GradeVector:
    it = iter(grades)
    out = next(it)
    for g in it:
        out = meet(out, g)
    return out


def in_orthant(u: GradeVector) -> bool:
    """Whether u lies in N^n (no negative coordinate)."""
    return all(c >= 0 for c in u)


def minus_dirs(u: GradeVector, dirs: Iterable[int]) -> GradeVector:
    """u - e_alpha for a set of 1-based directions; may leave N^n."""
    out = list(u)
    for j in dirs:
        out[j - 1] -= 1
    return tuple(out)


def box_grades(umax: GradeVector, margin: int = 0) -> list[GradeVector]:
    """All grades of [0, umax + margin] componentwise, lexicographic order."""
    return [tuple(g) for g in product(*(range(c + margin + 1) for c in umax))]


def format_grade(u: GradeVector) -> str:
    return ",".join(str(c) for c in u)


def parse_grade(text: str, n: int | None = None) -> GradeVector:
    try:
        u = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"bad grade {text!r}: expected comma-separated integers")
    if n is not None and len(u) != n:
        raise ValueError(f"bad grade {text!r}: expected {n} coordinates")
    return u


def lub_closure(grades: Iterable[GradeVector]) -> frozenset[GradeVector]:
    """Closure of a grade set under joins of nonempty subsets.

    Pairwise joins iterated to a fixpoint give the full subset closure,
    since join is associative, commutative and idempotent.
    """
    closed = set(grades)
    frontier = set(closed)
    while frontier:
        fresh = set()
        for g in frontier:
            for h in closed:
                j = join(g, h)
                if j not in closed:
                    fresh.add(j)
        closed |= fresh
        frontier = fresh
    return frozenset(closed)


class OneCriticalFiltration:
    """A cell complex filtered by an entrance-grade function h.

    Sublevel sets are cached per grade after clamping to the bounding box:
    every cell grade is <= umax componentwise, so X^u = X^(u meet umax).
    """

    def __init__(self, complex: CellComplex, grades: Mapping[str, GradeVector], n: int):
        if not 1 <= n <= MAX_PARAMETERS:
            raise ValueError(f"number of parameters must be in [1, {MAX_PARAMETERS}], got {n}")
        self.complex = complex
        self.n = n
        self.h: dict[str, GradeVector] = {}
        for cid in complex.dim_of:
            if cid not in grades:
                raise ValueError(f"cell {cid!r} has no entrance grade")
            g = tuple(int(c) for c in grades[cid])
            if len(g) != n:
                raise ValueError(f"cell {cid!r}: grade {g} has arity {len(g)}, expected {n}")
            if not in_orthant(g):
                raise ValueError(f"cell {cid!r}: entrance grade {g} not in N^n")
            self.h[cid] = g
        self._sublevels: dict[GradeVector, frozenset[str]] = {}

    @property
    def field(self):
        return self.complex.field

    @property
    def umax(self) -> GradeVector:
        if not self.h:
            return (0,) * self.n
        return join_all(self.h.values())

    def validate(self) -> list[Violation]:
        """h must be order-preserving on the covering face relation."""
        report = []
        for tau, tau_faces in self.complex.faces.items():
            for sigma in tau_faces:
                if not leq(self.h[sigma], self.h[tau]):
                    report.append(
                        Violation(
                            "one-criticality",
                            (sigma, tau),
                            f"face {sigma} enters at {self.h[sigma]} after "
                            f"its coface {tau} at {self.h[tau]}",
                        )
                    )
        return report

    def sublevel(self, u: GradeVector) -> frozenset[str]:
        """Cells with entrance grade <= u; empty when u is outside N^n."""
        if len(u) != self.n:
            raise ValueError(f"grade {u} has arity {len(u)}, expected {self.n}")
        if not in_orthant(u):
            return frozenset()
        key = meet(u, self.umax)
        cached = self._sublevels.get(key)
        if cached is None:
            cached = frozenset(cid for cid, g in self.h.items() if leq(g, key))
            self._sublevels[key] = cached
        return cached

    def entrance_grades(self, cells: Iterable[str]) -> frozenset[GradeVector]:
        out = set()
        for cid in cells:
            if cid not in self.h:
                raise ValueError(f"unknown cell id {cid!r}")
            out.add(self.h[cid])
        return frozenset(out)

    def grade_classes(self) -> dict[GradeVector, tuple[str, ...]]:
        """Cells grouped by entrance grade, each group sorted by (dim, id)."""
        groups: dict[GradeVector, list[str]] = {}
        for cid, g in self.h.items():
            groups.setdefault(g, []).append(cid)
        return {
            g: tuple(sorted(ids, key=lambda c: (self.complex.dim_of[c], c)))
            for g, ids in sorted(groups.items())
        }

def validate_one_critical(F: OneCriticalFiltration) -> list[Violation]:
    return F.validate()


def meet_intersection_check(
    F: OneCriticalFiltration, grades: Iterable[GradeVector]
) -> GradeVector | None:
    """Compare the sublevel intersection with the sublevel of the meet.

    Returns None when they agree (always, for a valid one-critical
    filtration) and the offending meet grade otherwise.
    """
    gs = list(grades)
    if not gs:
        return None
    inter = frozenset(F.complex.dim_of)
    for g in gs:
        inter &= F.sublevel(g)
    w = meet_all(gs)
    expect = F.sublevel(w) if in_orthant(w) else frozenset()
    return None if inter == expect else w
