"""Support theorems: entrance grades, homological critical grades, verdicts.

The checks here confirm, instance by instance, that

  * every nonzero Betti table entry of degree q sits inside the lub-closure
    of the entrance grades of critical q- or (q+1)-cells, with the sharper
    statements for the first and last table;
  * for bifiltrations, the supports are pinned down by homological critical
    grades (grades u where H_q(X^u, X^{u-e1} u X^{u-e2}) is nonzero), with
    a sandwich inequality bounding that relative homology dimension by
    Betti table values;
  * where a grade avoids the closures, the nearby inclusion-induced maps
    are surjective in degree q and injective in degree q-1.

A failed claim means a bug in this implementation, never new mathematics,
so reports carry enough context (grades, matching, modulus) to replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable

from .filtration import (
    GradeVector,
    OneCriticalFiltration,
    box_grades,
    format_grade,
    lub_closure,
    minus_dirs,
)
from .koszul import BettiTable, ModuleSlice, betti_tables
from .morse import DiscreteVectorField, MorseComplexResult, morse_complex


@dataclass
class Claim:
    """One verified statement; holds=None marks an explicit skip."""

    id: str
    q: int | None
    holds: bool | None
    counterexample: GradeVector | None = None
    detail: str = ""

    @property
    def failed(self) -> bool:
        return self.holds is False

    def to_json_dict(self) -> dict:
        out = {"id": self.id, "q": self.q, "holds": self.holds}
        if self.counterexample is not None:
            out["counterexample"] = format_grade(self.counterexample)
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class SupportReport:
    claims: list[Claim] = dc_field(default_factory=list)
    supports: dict = dc_field(default_factory=dict)
    grade_sets: dict = dc_field(default_factory=dict)
    modulus: int = 2
    seed: int | None = None
    fixture_hash: str | None = None

    @property
    def ok(self) -> bool:
        return not any(c.failed for c in self.claims)

    def failures(self) -> list[Claim]:
        return [c for c in self.claims if c.failed]

    def to_json_dict(self) -> dict:
        return {
            "claims": [c.to_json_dict() for c in self.claims],
            "supports": self.supports,
            "grades": self.grade_sets,
            "seed": self.seed,
            "modulus": self.modulus,
            "fixture_hash": self.fixture_hash,
        }


def _sorted_grades(grades: Iterable[GradeVector]) -> list[str]:
    return [format_grade(g) for g in sorted(grades)]


def _first_outside(
    subset: frozenset[GradeVector], ambient: frozenset[GradeVector]
) -> GradeVector | None:
    outside = subset - ambient
    return min(outside) if outside else None


class _RelativeDims:
    """dim H_q(X^v, union of sublevels), cached per quotient cell set."""

    def __init__(self, F: OneCriticalFiltration):
        self.F = F
        self._cache: dict[tuple[frozenset, int], int] = {}

    def quotient_cells(self, v: GradeVector, lower: list[GradeVector]) -> frozenset[str]:
        cells = set(self.F.sublevel(v))
        for w in lower:
            cells -= self.F.sublevel(w)
        return frozenset(cells)

    def dim(self, v: GradeVector, lower: list[GradeVector], q: int) -> int:
        cells = self.quotient_cells(v, lower)
        key = (cells, q)
        cached = self._cache.get(key)
        if cached is None:
            X = self.F.complex
            n_q = len(X.cells_of_dim(q, cells))
            if n_q == 0:
                cached = 0
            else:
                cached = (
                    n_q
                    - X.boundary_matrix(q, cells).rank()
                    - X.boundary_matrix(q + 1, cells).rank()
                )
            self._cache[key] = cached
        return cached


def homological_critical_grades(
    F: OneCriticalFiltration, q: int, rel: _RelativeDims | None = None
) -> frozenset[GradeVector]:
    """Grades u with H_q(X^u, X^{u-e1} union X^{u-e2}) nonzero (n = 2 only).

    Scans the bounding box plus a one-step margin; past the box the
    inclusion in the overflowing direction is an identity, so the relative
    complex is empty there and the margin contributes nothing.
    """
    if F.n != 2:
        raise ValueError(f"homological critical grades require n=2, got n={F.n}")
    rel = rel if rel is not None else _RelativeDims(F)
    out = set()
    for u in box_grades(F.umax, margin=1):
        lower = [minus_dirs(u, [1]), minus_dirs(u, [2])]
        if rel.dim(u, lower, q) != 0:
            out.add(u)
    return frozenset(out)


def critical_grade_sets(
    morse: MorseComplexResult, qmax: int
) -> dict[int, frozenset[GradeVector]]:
    """Entrance grades of critical cells per dimension, up to qmax + 1."""
    out: dict[int, frozenset[GradeVector]] = {}
    for q in range(qmax + 2):
        cells = [c for c, d in morse.morse.dim_of.items() if d == q]
        out[q] = frozenset(morse.grade_map[c] for c in cells)
    return out


def verify_support_theorem(
    F: OneCriticalFiltration,
    V: DiscreteVectorField,
    qmax: int | None = None,
    table: BettiTable | None = None,
    morse: MorseComplexResult | None = None,
) -> SupportReport:
    """Check the three support inclusions for every degree up to qmax.

    For each q: the union of supp xi_i^q over i lies in the closure of the
    critical q-grades joined with the closure of the critical (q+1)-grades;
    supp xi_0^q lies in the former; supp xi_n^q lies in the latter.
    """
    if qmax is None:
        qmax = max(F.complex.top_dim, 0)
    morse = morse if morse is not None else morse_complex(F, V)
    table = table if table is not None else betti_tables(F, qmax)
    entrance = critical_grade_sets(morse, qmax)
    closures = {q: lub_closure(g) if g else frozenset() for q, g in entrance.items()}
    report = SupportReport(modulus=F.field.p)
    for q in range(qmax + 1):
        both = closures[q] | closures[q + 1]
        cases = [
            ("support.union", table.union_support(q), both),
            ("support.xi0", table.support(q, 0), closures[q]),
            ("support.xitop", table.support(q, F.n), closures[q + 1]),
        ]
        for cid, supp, ambient in cases:
            bad = _first_outside(supp, ambient)
            report.claims.append(
                Claim(
                    cid,
                    q,
                    bad is None,
                    counterexample=bad,
                    detail="" if bad is None else "support grade escapes the closure",
                )
            )
    report.supports = {
        str(q): {str(i): _sorted_grades(table.support(q, i)) for i in range(F.n + 1)}
        for q in range(qmax + 1)
    }
    report.grade_sets = {
        "entrance": {str(q): _sorted_grades(entrance[q]) for q in entrance},
        "entrance_closure": {str(q): _sorted_grades(closures[q]) for q in closures},
    }
    return report


def verify_local_maps(
    F: OneCriticalFiltration,
    V: DiscreteVectorField,
    q: int,
    u: GradeVector,
    morse: MorseComplexResult | None = None,
    slices: dict[int, ModuleSlice] | None = None,
) -> SupportReport:
    """Local surjectivity/injectivity at a grade outside the critical closure.

    When u avoids the closure of the critical q-grades, some direction j
    has equal critical q-cell sets across every step w -> w - e_j with
    w = u - e_{alpha}, alpha avoiding j; along that direction the induced
    maps must be surjective in degree q and injective in degree q - 1.
    Inside the closure the check is skipped with an explicit verdict.
    """
    morse = morse if morse is not None else morse_complex(F, V)
    report = SupportReport(modulus=F.field.p)
    grades_q = frozenset(
        morse.grade_map[c] for c, d in morse.morse.dim_of.items() if d == q
    )
    closure = lub_closure(grades_q) if grades_q else frozenset()
    if u in closure:
        report.claims.append(
            Claim("local.hypothesis", q, None, counterexample=u, detail="u in closure: skipped")
        )
        return report
    MF = morse.filtration()
    n = F.n
    direction = None
    for j in range(1, n + 1):
        others = [d for d in range(1, n + 1) if d != j]
        ok = True
        for mask in range(1 << len(others)):
            alpha = [others[b] for b in range(len(others)) if mask >> b & 1]
            w = minus_dirs(u, alpha)
            up = {c for c in MF.sublevel(w) if MF.complex.dim_of[c] == q}
            down = {c for c in MF.sublevel(minus_dirs(w, [j])) if MF.complex.dim_of[c] == q}
            if up != down:
                ok = False
                break
        if ok:
            direction = j
            break
    if direction is None:
        report.claims.append(
            Claim(
                "local.direction",
                q,
                False,
                counterexample=u,
                detail="no direction with stable critical cells, contradicting u outside closure",
            )
        )
        return report
    if slices is None:
        slices = {}
    for deg in (q, q - 1):
        if deg >= 0 and deg not in slices:
            slices[deg] = ModuleSlice(F, deg)
    others = [d for d in range(1, n + 1) if d != direction]
    surj_ok, inj_ok = True, True
    witness = None
    for mask in range(1 << len(others)):
        alpha = [others[b] for b in range(len(others)) if mask >> b & 1]
        w = minus_dirs(u, alpha)
        w_lo = minus_dirs(w, [direction])
        m_q = slices[q].map(w_lo, w)
        if m_q.rank() != slices[q].dim(w):
            surj_ok, witness = False, w
        if q - 1 >= 0:
            m_q1 = slices[q - 1].map(w_lo, w)
            if m_q1.rank() != slices[q - 1].dim(w_lo):
                inj_ok, witness = False, w
    report.claims.append(
        Claim(
            "local.surjection",
            q,
            surj_ok,
            counterexample=None if surj_ok else witness,
            detail=f"direction {direction}",
        )
    )
    report.claims.append(
        Claim(
            "local.injection",
            q - 1,
            inj_ok,
            counterexample=None if inj_ok else witness,
            detail=f"direction {direction}",
        )
    )
    return report


def verify_bifiltration_bounds(
    F: OneCriticalFiltration,
    qmax: int | None = None,
    V: DiscreteVectorField | None = None,
    table: BettiTable | None = None,
    morse: MorseComplexResult | None = None,
) -> SupportReport:
    """Bifiltration support bounds through homological critical grades.

    Per degree q, with C_q the homological critical grades and CC_q its
    closure: supp xi_0^q, supp xi_1^{q-1} and supp xi_2^{q-1} lie in CC_q
    (the last one also asserted standalone); the union of all C_q sits
    inside the union of all Betti supports, which sits inside the union of
    all CC_q; at every box grade the relative homology dimension is
    sandwiched between xi_0^q + xi_1^{q-1} - xi_2^{q-1} and
    xi_0^q + xi_1^{q-1} + xi_2^{q-2}; and C_q is contained in the entrance
    grades of the critical q-cells of the supplied (or greedy) matching.
    """
    if F.n != 2:
        raise ValueError(f"bifiltration bounds require n=2, got n={F.n}")
    if qmax is None:
        qmax = max(F.complex.top_dim, 0)
    table = table if table is not None else betti_tables(F, qmax)
    if morse is None:
        from .morse import build_matching

        V = V if V is not None else build_matching(F)
        morse = morse_complex(F, V)
    rel = _RelativeDims(F)
    top = max(F.complex.top_dim, 0)
    crit: dict[int, frozenset[GradeVector]] = {}
    for q in range(top + 2):
        crit[q] = (
            homological_critical_grades(F, q, rel) if q <= top else frozenset()
        )
    crit_closure = {q: lub_closure(g) if g else frozenset() for q, g in crit.items()}
    entrance = critical_grade_sets(morse, max(qmax, top))
    report = SupportReport(modulus=F.field.p)

    def supp(q: int, i: int) -> frozenset[GradeVector]:
        return table.support(q, i) if q >= 0 else frozenset()

    scan_top = max(qmax, top) + 1
    for q in range(scan_top + 1):
        cc = crit_closure.get(q, frozenset())
        prop_supp = supp(q, 0) | supp(q - 1, 1) | supp(q - 1, 2)
        bad = _first_outside(prop_supp, cc)
        report.claims.append(Claim("bounds.prop", q, bad is None, counterexample=bad))
        bad = _first_outside(supp(q - 1, 2), cc)
        report.claims.append(Claim("bounds.xi2", q, bad is None, counterexample=bad))
        sandwich_bad = None
        for u in box_grades(F.umax, margin=1):
            lower = [minus_dirs(u, [1]), minus_dirs(u, [2])]
            mid = rel.dim(u, lower, q) if q <= top else 0
            lo = (
                table.xi_value(q, u, 0)
                + table.xi_value(q - 1, u, 1)
                - table.xi_value(q - 1, u, 2)
            )
            hi = (
                table.xi_value(q, u, 0)
                + table.xi_value(q - 1, u, 1)
                + table.xi_value(q - 2, u, 2)
            )
            if not lo <= mid <= hi:
                sandwich_bad = u
                break
        report.claims.append(
            Claim("bounds.sandwich", q, sandwich_bad is None, counterexample=sandwich_bad)
        )
        eg = entrance.get(q, frozenset())
        bad = _first_outside(crit.get(q, frozenset()), eg)
        report.claims.append(
            Claim(
                "bounds.critical_in_entrance",
                q,
                bad is None,
                counterexample=bad,
                detail="critical grade with no critical cell entering there",
            )
        )
    all_crit = frozenset().union(*crit.values()) if crit else frozenset()
    all_crit_closure = (
        frozenset().union(*crit_closure.values()) if crit_closure else frozenset()
    )
    all_supp = frozenset().union(
        *(table.union_support(q) for q in range(qmax + 1))
    ) if qmax >= 0 else frozenset()
    bad = _first_outside(all_crit, all_supp)
    report.claims.append(Claim("bounds.coro.lower", None, bad is None, counterexample=bad))
    bad = _first_outside(all_supp, all_crit_closure)
    report.claims.append(Claim("bounds.coro.upper", None, bad is None, counterexample=bad))
    report.grade_sets = {
        "critical": {str(q): _sorted_grades(crit[q]) for q in crit},
        "critical_closure": {str(q): _sorted_grades(crit_closure[q]) for q in crit_closure},
        "entrance": {str(q): _sorted_grades(entrance[q]) for q in entrance},
    }
    report.supports = {
        str(q): {str(i): _sorted_grades(table.support(q, i)) for i in range(F.n + 1)}
        for q in range(qmax + 1)
    }
    return report


def verify_ses_dims(F: OneCriticalFiltration, v: GradeVector, q: int) -> SupportReport:
    """Chain-level exactness bookkeeping for the bifiltration triple at v.

    For each choice of j != l in {1, 2}: the relative chain dimensions obey
    dim C_q(X^{v-el}, X^{v-e1-e2}) + dim C_q(X^v, X^{v-e1} u X^{v-e2})
    = dim C_q(X^v, X^{v-ej}); and when H_q(X^v, X^{v-e1} u X^{v-e2}) = 0
    but H_q(X^v, X^{v-ej}) != 0, the grade below must witness
    H_q(X^{v-el}, X^{v-e1-e2}) != 0.
    """
    if F.n != 2:
        raise ValueError(f"requires n=2, got n={F.n}")
    rel = _RelativeDims(F)
    X = F.complex
    report = SupportReport(modulus=F.field.p)
    for j, l in ((1, 2), (2, 1)):
        sub_v = F.sublevel(v)
        sub_j = F.sublevel(minus_dirs(v, [j]))
        sub_l = F.sublevel(minus_dirs(v, [l]))
        sub_jl = F.sublevel(minus_dirs(v, [1, 2]))
        count = lambda cells: len(X.cells_of_dim(q, frozenset(cells)))
        left = count(sub_l - sub_jl)
        middle = count(sub_v - (sub_j | sub_l))
        right = count(sub_v - sub_j)
        report.claims.append(
            Claim(
                "ses.dims",
                q,
                left + middle == right,
                counterexample=None if left + middle == right else v,
                detail=f"j={j}, l={l}: {left} + {middle} vs {right}",
            )
        )
        h_union = rel.dim(v, [minus_dirs(v, [1]), minus_dirs(v, [2])], q)
        h_j = rel.dim(v, [minus_dirs(v, [j])], q)
        h_l_low = rel.dim(minus_dirs(v, [l]), [minus_dirs(v, [1, 2])], q)
        les_ok = not (h_union == 0 and h_j != 0) or h_l_low != 0
        report.claims.append(
            Claim(
                "ses.les",
                q,
                les_ok,
                counterexample=None if les_ok else v,
                detail=f"j={j}, l={l}",
            )
        )
    return report
