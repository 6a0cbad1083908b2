"""Discrete vector fields, consistent acyclic matchings, Morse reduction.

A discrete vector field is a matching of covering cell pairs (sigma, tau)
with kappa(tau, sigma) != 0.  It is acyclic when the directed graph with
one node per pair and an arc (s_i, t_i) -> (s_k, t_k) whenever s_k is a
face of t_i other than s_i has no directed cycle; it is consistent with a
one-critical filtration when matched cells share their entrance grade.

Reduction cancels matched pairs one at a time.  Cancelling (sigma, tau)
removes both cells and updates the incidence of every remaining pair
(tau', sigma') by

    kappa'(tau', sigma') = kappa(tau', sigma')
        - kappa(tau', sigma) * kappa(tau, sigma') / kappa(tau, sigma).

Acyclicity guarantees kappa(tau, sigma) stays nonzero for every pair not
yet cancelled, so the division is always defined.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import CellComplex, Violation
from .filtration import GradeVector, OneCriticalFiltration, leq


@dataclass(frozen=True)
class DiscreteVectorField:
    """A matching, stored as ordered (face, coface) id pairs."""

    pairs: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.pairs)

    def matched_cells(self) -> frozenset[str]:
        return frozenset(c for pair in self.pairs for c in pair)

    def critical_cells(self, X: CellComplex) -> tuple[str, ...]:
        used = self.matched_cells()
        return tuple(c for c in X.cell_ids if c not in used)


EMPTY_FIELD = DiscreteVectorField(())


def _pair_arcs(X: CellComplex, pairs) -> list[list[int]]:
    """Adjacency of the V-path graph: arc i -> k iff sigma_k < tau_i, sigma_k != sigma_i."""
    node_of_sigma = {sigma: i for i, (sigma, _) in enumerate(pairs)}
    arcs: list[list[int]] = []
    for i, (sigma, tau) in enumerate(pairs):
        out = []
        for face in X.faces[tau]:
            k = node_of_sigma.get(face)
            if k is not None and k != i:
                out.append(k)
        arcs.append(sorted(out))
    return arcs


def _find_cycle(arcs: list[list[int]]) -> list[int] | None:
    """A directed cycle as a node list, or None when the graph is acyclic."""
    color = [0] * len(arcs)  # 0 unseen, 1 on stack, 2 done
    parent: dict[int, int] = {}
    for root in range(len(arcs)):
        if color[root]:
            continue
        stack = [(root, iter(arcs[root]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 0:
                    color[nxt] = 1
                    parent[nxt] = node
                    stack.append((nxt, iter(arcs[nxt])))
                    advanced = True
                    break
                if color[nxt] == 1:
                    cycle = [node]
                    cur = node
                    while cur != nxt:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return cycle
            if not advanced:
                color[node] = 2
                stack.pop()
        # loop continues with next root
    return None


def validate_dvf(X: CellComplex, V: DiscreteVectorField) -> list[Violation]:
    """Matching of covering pairs with only trivial closed V-paths."""
    report: list[Violation] = []
    seen: set[str] = set()
    for sigma, tau in V.pairs:
        for cid in (sigma, tau):
            if cid not in X.dim_of:
                report.append(Violation("unknown-cell", (cid,), f"unknown cell id {cid!r}"))
            elif cid in seen:
                report.append(Violation("repeated-cell", (cid,), f"cell {cid} matched twice"))
            seen.add(cid)
    if report:
        return report
    for sigma, tau in V.pairs:
        if X.kappa(tau, sigma) == 0:
            report.append(
                Violation(
                    "not-covering",
                    (sigma, tau),
                    f"({sigma}, {tau}) is not a covering pair: kappa({tau},{sigma}) = 0",
                )
            )
    if report:
        return report
    cycle = _find_cycle(_pair_arcs(X, V.pairs))
    if cycle is not None:
        path = []
        for i in cycle:
            path.extend(V.pairs[i])
        path.extend(V.pairs[cycle[0]][:1])
        report.append(
            Violation(
                "closed-v-path",
                tuple(path),
                "nontrivial closed V-path: " + " -> ".join(path),
            )
        )
    return report


def check_consistency(F: OneCriticalFiltration, V: DiscreteVectorField) -> list[Violation]:
    """Matched cells must share their entrance grade."""
    report = []
    for sigma, tau in V.pairs:
        if F.h[sigma] != F.h[tau]:
            report.append(
                Violation(
                    "inconsistent-pair",
                    (sigma, tau),
                    f"h({sigma}) = {F.h[sigma]} but h({tau}) = {F.h[tau]}",
                )
            )
    return report


def build_matching(F: OneCriticalFiltration) -> DiscreteVectorField:
    """Greedy consistent acyclic matching.

    Cells are partitioned by entrance grade; only same-grade covering pairs
    are eligible, so any closed V-path would stay inside a single grade
    class and per-class acyclicity suffices.  Within a class, candidate
    pairs are scanned in (dim sigma, sigma, tau) order and a pair is kept
    unless it closes a V-path among the pairs chosen so far.
    """
    X = F.complex
    chosen: list[tuple[str, str]] = []
    for grade, cells in F.grade_classes().items():
        cellset = set(cells)
        candidates = []
        for sigma in cells:
            for tau, _ in X.cofaces[sigma].items():
                if tau in cellset:
                    candidates.append((X.dim_of[sigma], sigma, tau))
        candidates.sort()
        used: set[str] = set()
        class_pairs: list[tuple[str, str]] = []
        for _, sigma, tau in candidates:
            if sigma in used or tau in used:
                continue
            trial = class_pairs + [(sigma, tau)]
            if _find_cycle(_pair_arcs(X, trial)) is None:
                class_pairs = trial
                used.add(sigma)
                used.add(tau)
        chosen.extend(class_pairs)
    return DiscreteVectorField(tuple(chosen))


@dataclass
class MorseComplexResult:
    """Reduced complex on the critical cells, with inherited entrance grades."""

    morse: CellComplex
    grade_map: dict[str, GradeVector]
    n: int

    def filtration(self) -> OneCriticalFiltration:
        return OneCriticalFiltration(self.morse, self.grade_map, self.n)

    def census(self) -> dict[tuple[int, GradeVector], int]:
        """Critical-cell counts keyed by (dimension, entrance grade)."""
        counts: dict[tuple[int, GradeVector], int] = {}
        for cid, dim in self.morse.dim_of.items():
            key = (dim, self.grade_map[cid])
            counts[key] = counts.get(key, 0) + 1
        return dict(sorted(counts.items()))


def _composition_defect(faces: dict[str, dict[str, int]], p: int) -> tuple[str, str] | None:
    for tau, tau_faces in faces.items():
        acc: dict[str, int] = {}
        for rho, a in tau_faces.items():
            for sigma, b in faces[rho].items():
                acc[sigma] = (acc.get(sigma, 0) + a * b) % p
        for sigma, total in acc.items():
            if total:
                return (tau, sigma)
    return None


def morse_complex(
    F: OneCriticalFiltration,
    V: DiscreteVectorField,
    check_every_step: bool = False,
) -> MorseComplexResult:
    """Cancel all matched pairs and return the filtered Morse complex.

    Pairs are processed in reverse topological order of the V-path graph.
    The result is validated: its incidence axioms hold and the inherited
    grade map is still order-preserving.
    """
    X = F.complex
    problems = validate_dvf(X, V) + check_consistency(F, V)
    if problems:
        raise ValueError(f"invalid vector field: {problems[0]}")
    field = X.field
    p = field.p
    faces = {tau: dict(fs) for tau, fs in X.faces.items()}
    cofaces = {sigma: dict(cs) for sigma, cs in X.cofaces.items()}

    order = _topological_order(_pair_arcs(X, V.pairs))
    for idx in reversed(order):
        sigma, tau = V.pairs[idx]
        c = faces[tau].get(sigma, 0)
        if c == 0:
            raise AssertionError(f"pair ({sigma}, {tau}) lost its incidence before cancellation")
        cinv = field.inv(c)
        upper = [(t2, a) for t2, a in cofaces[sigma].items() if t2 != tau]
        lower = [(s2, b) for s2, b in faces[tau].items() if s2 != sigma]
        for t2, a in upper:
            for s2, b in lower:
                new = (faces[t2].get(s2, 0) - a * b * cinv) % p
                if new:
                    faces[t2][s2] = new
                    cofaces[s2][t2] = new
                else:
                    faces[t2].pop(s2, None)
                    cofaces[s2].pop(t2, None)
        for cid in (sigma, tau):
            for other in faces.pop(cid):
                del cofaces[other][cid]
            for other in cofaces.pop(cid):
                del faces[other][cid]
        if check_every_step:
            defect = _composition_defect(faces, p)
            if defect:
                raise AssertionError(f"boundary square nonzero at {defect} after ({sigma},{tau})")

    incidence = {
        (tau, sigma): coeff for tau, fs in faces.items() for sigma, coeff in fs.items()
    }
    morse = CellComplex([(cid, X.dim_of[cid]) for cid in faces], incidence, field)
    grade_map = {cid: F.h[cid] for cid in faces}
    bad = morse.validate()
    if bad:
        raise AssertionError(f"reduced complex violates incidence axioms: {bad[0]}")
    result = MorseComplexResult(morse, grade_map, F.n)
    bad = result.filtration().validate()
    if bad:
        raise AssertionError(f"reduced complex breaks the filtration: {bad[0]}")
    return result


def _topological_order(arcs: list[list[int]]) -> list[int]:
    """Kahn's algorithm with sorted tie-breaking; input must be acyclic."""
    indeg = [0] * len(arcs)
    for out in arcs:
        for k in out:
            indeg[k] += 1
    ready = sorted(i for i, d in enumerate(indeg) if d == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        changed = False
        for k in arcs[node]:
            indeg[k] -= 1
            if indeg[k] == 0:
                ready.append(k)
                changed = True
        if changed:
            ready.sort()
    if len(order) != len(arcs):
        raise AssertionError("cyclic vector field slipped past validation")
    return order


def vpaths_grade_monotone(F: OneCriticalFiltration, V: DiscreteVectorField) -> bool:
    """Entrance grades never increase along any single V-path step."""
    X = F.complex
    for sigma, tau in V.pairs:
        for face in X.faces[tau]:
            if face != sigma and not leq(F.h[face], F.h[tau]):
                return False
    return True
