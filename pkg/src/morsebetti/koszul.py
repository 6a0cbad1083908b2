"""Koszul complexes of persistent homology modules, and Betti tables.

For a one-critical filtration and homological degree q, the persistent
homology module assigns H_q(X^u) to each grade u and the inclusion-induced
map to each comparable pair of grades.  Its Koszul complex at u over a
direction set J has degree-i space the direct sum of H_q(X^{u - e_gamma})
over subsets gamma of J with |gamma| = i, and signed induced maps as
differential blocks.  The homology dimensions of this complex are the
Betti table values xi_i^q(u).

The same complex arises as an iterated mapping cone, coning the chain map
induced by inclusion in one new direction at a time; building both ways
and comparing homology dimensions is the main internal cross-check.
Summands over grades outside N^n are zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .algebra import FpMatrix
from .complexes import (
    ChainComplexOfSpaces,
    HomologyBasis,
    homology_basis,
    induced_map,
)
from .filtration import (
    GradeVector,
    OneCriticalFiltration,
    box_grades,
    format_grade,
    in_orthant,
    leq,
    minus_dirs,
)


class ModuleSlice:
    """Persistent q-homology of a filtration: bases and induced maps.

    Everything is memoized per sublevel cell set, so neighboring grades that
    cut out the same subcomplex share one homology computation, and each
    comparable pair of subcomplexes gets its induced map solved once.  The
    caches fill lazily and are not locked; to share a slice across threads,
    prebuild the window with `build_module_slice` and treat it as read-only.
    """

    def __init__(self, F: OneCriticalFiltration, q: int):
        self.F = F
        self.q = q
        self._by_cells: dict[frozenset, tuple[tuple[str, ...], HomologyBasis]] = {}
        self._maps: dict[tuple[frozenset, frozenset], FpMatrix] = {}

    @property
    def field(self):
        return self.F.field

    def _resolve(self, u: GradeVector) -> tuple[tuple[str, ...], HomologyBasis]:
        cells = self.F.sublevel(u)
        cached = self._by_cells.get(cells)
        if cached is None:
            X = self.F.complex
            q = self.q
            q_cells = X.cells_of_dim(q, cells)
            d_q = X.boundary_matrix(q, cells)
            d_q1 = X.boundary_matrix(q + 1, cells)
            chain = ChainComplexOfSpaces(
                {q - 1: d_q.nrows, q: len(q_cells), q + 1: d_q1.ncols},
                {q: d_q, q + 1: d_q1},
                self.field,
            )
            cached = (q_cells, homology_basis(chain, q))
            self._by_cells[cells] = cached
        return cached

    def dim(self, u: GradeVector) -> int:
        if not in_orthant(u):
            return 0
        return self._resolve(u)[1].dim

    def basis(self, u: GradeVector) -> HomologyBasis:
        return self._resolve(u)[1]

    def map(self, u: GradeVector, v: GradeVector) -> FpMatrix:
        """Matrix of the inclusion-induced map H_q(X^u) -> H_q(X^v)."""
        if not leq(u, v):
            raise ValueError(f"induced map needs comparable grades, got {u} -> {v}")
        if not in_orthant(u):
            return FpMatrix.zeros(self.dim(v), 0, self.field)
        su = self.F.sublevel(u)
        sv = self.F.sublevel(v)
        key = (su, sv)
        cached = self._maps.get(key)
        if cached is None:
            cells_u, basis_u = self._resolve(u)
            cells_v, basis_v = self._resolve(v)
            if su == sv:
                cached = FpMatrix.identity(basis_u.dim, self.field)
            else:
                cached = induced_map(cells_u, cells_v, basis_u, basis_v, self.field)
            self._maps[key] = cached
        return cached

    def rank_of_map(self, u: GradeVector, v: GradeVector) -> int:
        return self.map(u, v).rank()


def build_module_slice(
    F: OneCriticalFiltration, q: int, window: GradeVector | None = None
) -> ModuleSlice:
    """A ModuleSlice with bases and covering maps precomputed on a window.

    The window is a componentwise upper bound, by default the join of all
    entrance grades; covering maps from one step below the window floor
    (grades outside N^n, contributing zero spaces) are included.
    """
    slice_ = ModuleSlice(F, q)
    top = window if window is not None else F.umax
    for u in box_grades(top):
        slice_.dim(u)
        for j in range(1, F.n + 1):
            slice_.map(minus_dirs(u, [j]), u)
    return slice_


def _dirs_sorted(J) -> tuple[int, ...]:
    out = tuple(sorted(set(int(j) for j in J)))
    if not out:
        raise ValueError("direction set must be nonempty")
    return out


def _subsets_by_size(J: tuple[int, ...]) -> dict[int, list[tuple[int, ...]]]:
    """Subsets of J grouped by size, each group in bitmask order."""
    by_size: dict[int, list[tuple[int, ...]]] = {i: [] for i in range(len(J) + 1)}
    masked = []
    for mask in range(1 << len(J)):
        subset = tuple(J[b] for b in range(len(J)) if mask >> b & 1)
        masked.append((sum(1 << (j - 1) for j in subset), subset))
    for key, subset in sorted(masked):
        by_size[len(subset)].append(subset)
    return by_size


@dataclass
class KoszulComplex:
    """A Koszul complex at one grade, with its summand layout.

    `layout[i]` lists the direction subsets indexing the degree-i summands,
    in the order used by the differential matrices.
    """

    u: GradeVector
    J: tuple[int, ...]
    layout: dict[int, tuple[tuple[int, ...], ...]]
    chain: ChainComplexOfSpaces

    def dim(self, i: int) -> int:
        return self.chain.dim(i)

    def homology_dims(self) -> tuple[int, ...]:
        return tuple(self.chain.homology_dim(i) for i in range(len(self.J) + 1))


def koszul_direct(slice_: ModuleSlice, u: GradeVector, J=None) -> KoszulComplex:
    """Assemble the Koszul complex at u from its explicit block formula.

    The block from the summand gamma = {j_1 < ... < j_i} to the summand
    dropping the (i-r)-th smallest element carries sign (-1)^r.
    """
    F = slice_.F
    dirs = _dirs_sorted(J if J is not None else range(1, F.n + 1))
    if dirs[-1] > F.n or dirs[0] < 1:
        raise ValueError(f"directions {dirs} out of range for n={F.n}")
    by_size = _subsets_by_size(dirs)
    grades = {g: minus_dirs(u, g) for size in by_size.values() for g in size}
    dims = {
        i: sum(slice_.dim(grades[g]) for g in by_size[i]) for i in range(len(dirs) + 1)
    }
    offsets: dict[int, dict[tuple[int, ...], int]] = {}
    for i, subsets in by_size.items():
        pos, table = 0, {}
        for g in subsets:
            table[g] = pos
            pos += slice_.dim(grades[g])
        offsets[i] = table
    field = slice_.field
    diff: dict[int, FpMatrix] = {}
    for i in range(1, len(dirs) + 1):
        a = np.zeros((dims[i - 1], dims[i]), dtype=np.int64)
        for gamma in by_size[i]:
            col = offsets[i][gamma]
            src_grade = grades[gamma]
            width = slice_.dim(src_grade)
            if width == 0:
                continue
            for r in range(i):
                dropped = gamma[i - 1 - r]
                target = tuple(j for j in gamma if j != dropped)
                block = slice_.map(src_grade, grades[target])
                sign = 1 if r % 2 == 0 else -1
                row = offsets[i - 1][target]
                a[row : row + block.nrows, col : col + width] = (
                    sign * block.data
                ) % field.p
        diff[i] = FpMatrix(a, field)
    chain = ChainComplexOfSpaces(dims, diff, field)
    bad = chain.validate()
    if bad:
        raise AssertionError(f"Koszul differential does not square to zero at degree {bad[0]}")
    layout = {i: tuple(by_size[i]) for i in range(len(dirs) + 1)}
    return KoszulComplex(u, dirs, layout, chain)


@dataclass
class ChainMap:
    """Degreewise linear maps between two chain complexes."""

    src: ChainComplexOfSpaces
    dst: ChainComplexOfSpaces
    components: dict[int, FpMatrix] = dc_field(default_factory=dict)

    def component(self, i: int) -> FpMatrix:
        m = self.components.get(i)
        if m is None:
            m = FpMatrix.zeros(self.dst.dim(i), self.src.dim(i), self.src.field)
        return m

    def first_defect(self) -> int | None:
        """Smallest degree i where dst_d . f_i != f_{i-1} . src_d, if any."""
        degrees = set(self.src.dims) | set(self.dst.dims) | set(self.components)
        for i in sorted(degrees):
            left = self.dst.differential(i) @ self.component(i)
            right = self.component(i - 1) @ self.src.differential(i)
            if not (left - right).is_zero():
                return i
        return None


def mapping_cone(f: ChainMap) -> ChainComplexOfSpaces:
    """Cone of a chain map: degree i is src_{i-1} (+) dst_i.

    The differential sends (b, c) to (-d_src(b), d_dst(c) + f(b)).
    """
    bad = f.first_defect()
    if bad is not None:
        raise ValueError(f"not a chain map: fails to commute at degree {bad}")
    src, dst = f.src, f.dst
    field = src.field
    degrees = set()
    for i in list(src.dims) + [i + 1 for i in src.dims] + list(dst.dims):
        degrees.add(i)
    dims = {i: src.dim(i - 1) + dst.dim(i) for i in degrees}
    diff = {}
    for i in sorted(degrees) + [max(degrees, default=0) + 1]:
        rows = src.dim(i - 2) + dst.dim(i - 1)
        cols = src.dim(i - 1) + dst.dim(i)
        a = np.zeros((rows, cols), dtype=np.int64)
        d_src = src.differential(i - 1)
        d_dst = dst.differential(i)
        f_low = f.component(i - 1)
        a[: d_src.nrows, : d_src.ncols] = (-d_src.data) % field.p
        a[d_src.nrows :, : f_low.ncols] = f_low.data
        a[d_src.nrows :, d_src.ncols :] = d_dst.data
        diff[i] = FpMatrix(a, field)
    cone = ChainComplexOfSpaces(dims, diff, field)
    defects = cone.validate()
    if defects:
        raise AssertionError(f"cone differential does not square to zero at {defects[0]}")
    return cone


def koszul_via_cones(
    slice_: ModuleSlice,
    u: GradeVector,
    ordering,
    check_acyclic_corollary: bool = True,
) -> KoszulComplex:
    """Build the Koszul complex at u by coning one direction at a time.

    The result is isomorphic to `koszul_direct` for the same direction set;
    homology dimensions agree, matrices need not.  When both cone inputs
    are acyclic the cone must be too; this is asserted along the way.
    """
    order = tuple(int(j) for j in ordering)
    if len(set(order)) != len(order) or not order:
        raise ValueError(f"ordering must be nonempty and duplicate-free, got {order}")
    if max(order) > slice_.F.n or min(order) < 1:
        raise ValueError(f"directions {order} out of range for n={slice_.F.n}")

    def build(prefix: tuple[int, ...], w: GradeVector):
        j = prefix[0]
        if len(prefix) == 1:
            d1 = slice_.map(minus_dirs(w, [j]), w)
            chain = ChainComplexOfSpaces(
                {0: d1.nrows, 1: d1.ncols}, {1: d1}, slice_.field
            )
            return chain, {0: ((),), 1: ((j,),)}
        k = prefix[-1]
        B, layB = build(prefix[:-1], minus_dirs(w, [k]))
        C, layC = build(prefix[:-1], w)
        components = {}
        for i, subsets in layC.items():
            blocks = [
                slice_.map(minus_dirs(w, list(g) + [k]), minus_dirs(w, g))
                for g in subsets
            ]
            total_rows = sum(b.nrows for b in blocks)
            total_cols = sum(b.ncols for b in blocks)
            a = np.zeros((total_rows, total_cols), dtype=np.int64)
            r = c = 0
            for b in blocks:
                a[r : r + b.nrows, c : c + b.ncols] = b.data
                r += b.nrows
                c += b.ncols
            components[i] = FpMatrix(a, slice_.field)
        cone = mapping_cone(ChainMap(B, C, components))
        if check_acyclic_corollary:
            zero_B = all(B.homology_dim(i) == 0 for i in range(len(prefix) + 1))
            zero_C = all(C.homology_dim(i) == 0 for i in range(len(prefix) + 1))
            if zero_B and zero_C:
                if any(cone.homology_dim(i) != 0 for i in range(len(prefix) + 1)):
                    raise AssertionError(
                        "cone of a chain map between acyclic complexes is not acyclic"
                    )
        layout = {}
        for i in range(len(prefix) + 1):
            shifted = tuple(tuple(sorted(g + (k,))) for g in layB.get(i - 1, ()))
            layout[i] = shifted + tuple(layC.get(i, ()))
        return cone, layout

    chain, layout = build(order, u)
    return KoszulComplex(u, tuple(sorted(order)), layout, chain)


class BettiTable:
    """Sparse table of xi_i^q(u); absent entries are zero."""

    def __init__(self, n: int, modulus: int, qmax: int, umax: GradeVector):
        self.n = n
        self.modulus = modulus
        self.qmax = qmax
        self.umax = umax
        self.data: dict[tuple[int, GradeVector], tuple[int, ...]] = {}

    def set(self, q: int, u: GradeVector, values: tuple[int, ...]):
        if any(values):
            self.data[(q, u)] = tuple(values)

    def xi(self, q: int, u: GradeVector) -> tuple[int, ...]:
        return self.data.get((q, u), (0,) * (self.n + 1))

    def xi_value(self, q: int, u: GradeVector, i: int) -> int:
        if q < 0 or i < 0 or i > self.n:
            return 0
        return self.xi(q, u)[i]

    def support(self, q: int, i: int) -> frozenset[GradeVector]:
        return frozenset(
            u for (qq, u), values in self.data.items() if qq == q and values[i]
        )

    def union_support(self, q: int) -> frozenset[GradeVector]:
        out: set[GradeVector] = set()
        for i in range(self.n + 1):
            out |= self.support(q, i)
        return frozenset(out)

    def rows(self) -> list[tuple]:
        """Nonzero entries as (q, *u, i, value), sorted."""
        out = []
        for (q, u), values in self.data.items():
            for i, v in enumerate(values):
                if v:
                    out.append((q, *u, i, v))
        return sorted(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, BettiTable) and self.data == other.data

    def to_json_dict(self, fixture_hash: str | None = None) -> dict:
        return {
            "format": "morsebetti-betti",
            "modulus": self.modulus,
            "n": self.n,
            "qmax": self.qmax,
            "umax": format_grade(self.umax),
            "fixture_hash": fixture_hash,
            "entries": [
                {"q": q, "grade": format_grade(u), "xi": list(values)}
                for (q, u), values in sorted(self.data.items())
            ],
        }


def betti_tables(
    F: OneCriticalFiltration,
    qmax: int | None = None,
    slices: dict[int, ModuleSlice] | None = None,
) -> BettiTable:
    """Betti tables of all persistent homology degrees up to qmax.

    qmax defaults to the top cell dimension; higher degrees vanish.  Values
    are computed grade by grade over the bounding box; everything outside
    is zero because the inclusions past the box are isomorphisms.
    """
    if qmax is None:
        qmax = max(F.complex.top_dim, 0)
    table = BettiTable(F.n, F.field.p, qmax, F.umax)
    dirs = tuple(range(1, F.n + 1))
    for q in range(qmax + 1):
        slice_ = slices[q] if slices is not None else ModuleSlice(F, q)
        for u in box_grades(F.umax):
            dims = koszul_direct(slice_, u, dirs).homology_dims()
            table.set(q, u, dims)
    return table


def barcode_1param(
    F: OneCriticalFiltration, qmax: int | None = None
) -> dict[int, list[tuple[int, int | None]]]:
    """Persistence barcode of a 1-parameter filtration, per degree.

    Standard column reduction of the grade-ordered boundary matrix; bars
    are [birth, death) with death None for essential classes, and
    zero-length bars are dropped.  Serves as the independent oracle for
    the n = 1 Betti tables: xi_0 counts births, xi_1 counts deaths.
    """
    if F.n != 1:
        raise ValueError(f"not a 1-filtration: n = {F.n}")
    X = F.complex
    p = F.field.p
    if qmax is None:
        qmax = max(X.top_dim, 0)
    cells = sorted(X.dim_of, key=lambda c: (F.h[c][0], X.dim_of[c], c))
    index = {cid: i for i, cid in enumerate(cells)}
    columns: list[dict[int, int]] = [
        {index[f]: coeff for f, coeff in X.faces[cid].items()} for cid in cells
    ]
    owner: dict[int, int] = {}
    lows: list[int | None] = []
    for j, col in enumerate(columns):
        while col:
            low = max(col)
            k = owner.get(low)
            if k is None:
                break
            factor = (col[low] * pow(columns[k][low], -1, p)) % p
            for row, coeff in columns[k].items():
                new = (col.get(row, 0) - factor * coeff) % p
                if new:
                    col[row] = new
                else:
                    col.pop(row, None)
        if col:
            low = max(col)
            owner[low] = j
            lows.append(low)
        else:
            lows.append(None)
    killed = {low: j for j, low in enumerate(lows) if low is not None}
    bars: dict[int, list[tuple[int, int | None]]] = {q: [] for q in range(qmax + 1)}
    for i, cid in enumerate(cells):
        if lows[i] is not None:
            continue  # this cell's column pairs it as a death, not a birth
        q = X.dim_of[cid]
        if q > qmax:
            continue
        birth = F.h[cid][0]
        j = killed.get(i)
        if j is None:
            bars[q].append((birth, None))
        else:
            death = F.h[cells[j]][0]
            if death != birth:
                bars[q].append((birth, death))
    return {q: sorted(b, key=lambda t: (t[0], t[1] is None, t[1])) for q, b in bars.items()}


def hilbert_check(
    F: OneCriticalFiltration,
    qmax: int | None = None,
    table: BettiTable | None = None,
    slices: dict[int, ModuleSlice] | None = None,
) -> tuple[int, GradeVector] | None:
    """Verify dim H_q(X^u) = sum over v <= u of the alternating xi sums.

    Returns None when the identity holds at every degree and box grade,
    otherwise the first failing (q, u).
    """
    if qmax is None:
        qmax = max(F.complex.top_dim, 0)
    if table is None:
        table = betti_tables(F, qmax, slices)
    for q in range(qmax + 1):
        slice_ = slices[q] if slices is not None else ModuleSlice(F, q)
        per_grade = {
            u: sum((-1) ** i * v for i, v in enumerate(values))
            for (qq, u), values in table.data.items()
            if qq == q
        }
        for u in box_grades(F.umax):
            expected = sum(val for v, val in per_grade.items() if leq(v, u))
            if slice_.dim(u) != expected:
                return (q, u)
    return None


def rank_invariant(
    F: OneCriticalFiltration,
    q: int,
    slice_: ModuleSlice | None = None,
    umax: GradeVector | None = None,
) -> dict[tuple[GradeVector, GradeVector], int]:
    """Ranks of all induced maps between comparable box grades.

    Pass `umax` to scan another filtration's bounding box, e.g. to compare
    a reduced complex against the original over the original's box.
    """
    slice_ = slice_ if slice_ is not None else ModuleSlice(F, q)
    grades = box_grades(umax if umax is not None else F.umax)
    out = {}
    for u in grades:
        for v in grades:
            if leq(u, v):
                out[(u, v)] = slice_.rank_of_map(u, v)
    return out
