"""Cell complexes with an incidence function, and their homology.

A cell complex here is a finite graded set of cells together with an
incidence function kappa taking values in a prime field, subject to two
axioms: kappa(tau, sigma) != 0 forces dim tau = dim sigma + 1, and the
composition sum_rho kappa(tau, rho) * kappa(rho, sigma) vanishes for every
pair (tau, sigma).  Equivalently the boundary matrices square to zero, so
the complex is the same thing as a based chain complex.

All matrices are laid out in one fixed total order (cells sorted by id
within each dimension) so repeated runs produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .algebra import FpMatrix, PrimeField, hstack


class Cell(NamedTuple):
    id: str
    dim: int


@dataclass(frozen=True)
class Violation:
    """One structural defect found by a validator."""

    kind: str
    members: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


class CellComplex:
    """Finite cell complex over a prime field.

    Attributes
    ----------
    field: PrimeField
        Coefficient field of the incidence function.
    dim_of: dict str -> int
        Dimension of each cell, keyed by cell id.
    faces: dict str -> dict str -> int
        faces[tau][sigma] = kappa(tau, sigma), nonzero entries only.
    cofaces: dict str -> dict str -> int
        Transpose adjacency of `faces`.
    """

    def __init__(
        self,
        cells: Iterable[tuple[str, int]],
        incidence: Mapping[tuple[str, str], int],
        field: PrimeField,
    ):
        self.field = field
        self.dim_of: dict[str, int] = {}
        for cid, dim in cells:
            cid = str(cid)
            if cid in self.dim_of:
                raise ValueError(f"duplicate cell id {cid!r}")
            if dim < 0:
                raise ValueError(f"cell {cid!r} has negative dimension {dim}")
            self.dim_of[cid] = int(dim)
        self.faces: dict[str, dict[str, int]] = {cid: {} for cid in self.dim_of}
        self.cofaces: dict[str, dict[str, int]] = {cid: {} for cid in self.dim_of}
        for (tau, sigma), coeff in incidence.items():
            if tau not in self.dim_of:
                raise ValueError(f"incidence references unknown cell {tau!r}")
            if sigma not in self.dim_of:
                raise ValueError(f"incidence references unknown cell {sigma!r}")
            c = field.normalize(int(coeff))
            if c == 0:
                continue
            self.faces[tau][sigma] = c
            self.cofaces[sigma][tau] = c
        self._by_dim: dict[int, tuple[str, ...]] = {}
        for cid, dim in self.dim_of.items():
            self._by_dim.setdefault(dim, ())
        for dim in self._by_dim:
            self._by_dim[dim] = tuple(
                sorted(cid for cid, d in self.dim_of.items() if d == dim)
            )

    # -- basic queries ------------------------------------------------------

    @property
    def cell_ids(self) -> tuple[str, ...]:
        return tuple(
            cid for dim in sorted(self._by_dim) for cid in self._by_dim[dim]
        )

    @property
    def cells(self) -> tuple[Cell, ...]:
        return tuple(Cell(cid, self.dim_of[cid]) for cid in self.cell_ids)

    @property
    def top_dim(self) -> int:
        return max(self._by_dim, default=-1)

    def cells_of_dim(self, q: int, within: frozenset | set | None = None) -> tuple[str, ...]:
        base = self._by_dim.get(q, ())
        if within is None:
            return base
        return tuple(cid for cid in base if cid in within)

    def kappa(self, tau: str, sigma: str) -> int:
        return self.faces.get(tau, {}).get(sigma, 0)

    def __len__(self) -> int:
        return len(self.dim_of)

    # -- validation ----------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Check both incidence axioms; an empty report means the complex is ok."""
        report: list[Violation] = []
        for tau, tau_faces in self.faces.items():
            for sigma in tau_faces:
                if self.dim_of[tau] != self.dim_of[sigma] + 1:
                    report.append(
                        Violation(
                            "dimension-axiom",
                            (tau, sigma),
                            f"kappa({tau},{sigma}) != 0 but dims are "
                            f"{self.dim_of[tau]} and {self.dim_of[sigma]}",
                        )
                    )
        if report:
            # composition products are not well-formed when dims are broken
            return report
        for q in sorted(self._by_dim):
            d_q = self.boundary_matrix(q)
            d_q1 = self.boundary_matrix(q + 1)
            comp = d_q @ d_q1
            if not comp.is_zero():
                rows = self.cells_of_dim(q - 1)
                cols = self.cells_of_dim(q + 1)
                for i, j in zip(*np.nonzero(comp.data)):
                    report.append(
                        Violation(
                            "composition-axiom",
                            (cols[j], rows[i]),
                            f"sum_rho kappa({cols[j]},rho)*kappa(rho,{rows[i]}) != 0",
                        )
                    )
        return report

    # -- chain-level data ------------------------------------------------------

    def boundary_matrix(self, q: int, within: frozenset | set | None = None) -> FpMatrix:
        """Matrix of the boundary operator from degree q to degree q-1.

        Rows are indexed by the sorted (q-1)-cells, columns by the sorted
        q-cells.  With `within`, both index sets are intersected with that
        cell subset; for a face-closed subset this is the subcomplex
        boundary, for an arbitrary complement it is the quotient boundary.
        """
        rows = self.cells_of_dim(q - 1, within)
        cols = self.cells_of_dim(q, within)
        row_index = {cid: i for i, cid in enumerate(rows)}
        a = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for j, tau in enumerate(cols):
            for sigma, coeff in self.faces[tau].items():
                i = row_index.get(sigma)
                if i is not None:
                    a[i, j] = coeff
        return FpMatrix(a, self.field)

    def closure_defects(self, cells: Iterable[str]) -> list[tuple[str, str]]:
        """Pairs (tau, sigma) with tau in `cells` but its face sigma missing."""
        subset = set(cells)
        missing = []
        for tau in subset:
            for sigma in self.faces[tau]:
                if sigma not in subset:
                    missing.append((tau, sigma))
        return sorted(missing)

    def restrict(self, cells: Iterable[str]) -> "CellComplex":
        """Subcomplex spanned by a face-closed cell subset."""
        subset = set(cells)
        defects = self.closure_defects(subset)
        if defects:
            tau, sigma = defects[0]
            raise ValueError(f"not face-closed: {tau} kept but its face {sigma} dropped")
        inc = {
            (tau, sigma): coeff
            for tau in subset
            for sigma, coeff in self.faces[tau].items()
        }
        return CellComplex(
            [(cid, self.dim_of[cid]) for cid in subset], inc, self.field
        )


def validate_complex(X: CellComplex) -> list[Violation]:
    return X.validate()


def simplicial_complex(
    simplices: Iterable[Iterable[str]],
    field: PrimeField,
) -> CellComplex:
    """Build a cell complex from simplices given as vertex id collections.

    Faces are added automatically, and the incidence function follows the
    alternating-sign convention on sorted vertex lists: the face dropping
    the i-th vertex receives coefficient (-1)^i.  Over F_2 all signs are 1.
    Cell ids are the dotted vertex lists, e.g. "a.b.c".
    """
    closed: set[tuple[str, ...]] = set()
    for simplex in simplices:
        verts = tuple(sorted({str(v) for v in simplex}))
        if not verts:
            continue
        for k in range(1, len(verts) + 1):
            closed.update(combinations(verts, k))
    cells = [(".".join(v), len(v) - 1) for v in sorted(closed)]
    incidence: dict[tuple[str, str], int] = {}
    for verts in closed:
        if len(verts) == 1:
            continue
        tau = ".".join(verts)
        for i in range(len(verts)):
            sigma = ".".join(verts[:i] + verts[i + 1 :])
            incidence[(tau, sigma)] = (-1) ** i
    return CellComplex(cells, incidence, field)


class ChainComplexOfSpaces:
    """Bounded chain complex of F_p vector spaces with explicit differentials.

    `dims` gives the dimension in each degree and `diff[q]` the matrix of the
    differential from degree q to degree q-1; degrees outside `dims` are zero.
    """

    def __init__(self, dims: Mapping[int, int], diff: Mapping[int, FpMatrix], field: PrimeField):
        self.field = field
        self.dims = {q: d for q, d in dims.items() if d}
        self.diff = {}
        for q, m in diff.items():
            expected = (self.dim(q - 1), self.dim(q))
            if m.shape != expected:
                raise ValueError(
                    f"differential at degree {q} has shape {m.shape}, expected {expected}"
                )
            self.diff[q] = m

    def dim(self, q: int) -> int:
        return self.dims.get(q, 0)

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def differential(self, q: int) -> FpMatrix:
        m = self.diff.get(q)
        if m is None:
            m = FpMatrix.zeros(self.dim(q - 1), self.dim(q), self.field)
        return m

    def validate(self) -> list[int]:
        """Degrees q where d_{q-1} . d_q != 0 (empty list: a valid complex)."""
        bad = []
        for q in self.degrees():
            if not (self.differential(q) @ self.differential(q + 1)).is_zero():
                bad.append(q + 1)
        return sorted(set(bad))

    def homology_dim(self, q: int) -> int:
        if self.dim(q) == 0:
            return 0
        return self.dim(q) - self.differential(q).rank() - self.differential(q + 1).rank()

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * d for q, d in self.dims.items())

    @classmethod
    def from_cell_complex(
        cls, X: CellComplex, within: frozenset | set | None = None
    ) -> "ChainComplexOfSpaces":
        dims = {}
        diff = {}
        top = X.top_dim
        for q in range(top + 1):
            dims[q] = len(X.cells_of_dim(q, within))
        for q in range(top + 2):
            diff[q] = X.boundary_matrix(q, within)
        return cls(dims, diff, X.field)


class HomologyBasis:
    """Chosen section of H_q: cycle representatives plus a boundary basis.

    Columns of `boundary_basis` span im d_{q+1}; columns of `cycle_reps` are
    cycles completing them to a basis of ker d_q, so dim H_q equals the
    number of cycle representatives.
    """

    def __init__(self, q: int, cycle_reps: FpMatrix, boundary_basis: FpMatrix):
        self.q = q
        self.cycle_reps = cycle_reps
        self.boundary_basis = boundary_basis
        self._frame = None

    @property
    def dim(self) -> int:
        return self.cycle_reps.ncols

    def kernel_frame(self) -> FpMatrix:
        """[boundary_basis | cycle_reps]; a basis of ker d_q."""
        if self._frame is None:
            self._frame = hstack(
                [self.boundary_basis, self.cycle_reps],
                self.boundary_basis.field,
                nrows=self.boundary_basis.nrows,
            )
        return self._frame

    def classes_of(self, cycles: FpMatrix) -> FpMatrix:
        """Homology coordinates of the given cycle columns."""
        frame = self.kernel_frame()
        sol = frame.solve_matrix(cycles)
        if sol is None:
            raise ValueError("input columns are not cycles of this complex")
        return FpMatrix(sol.data[self.boundary_basis.ncols :, :], frame.field)


def homology_basis(C: ChainComplexOfSpaces, q: int) -> HomologyBasis:
    """Homology basis of a chain complex in degree q.

    Deterministic: both the boundary basis and the completing cycle
    representatives come from first-nonzero pivoting, i.e. the
    lexicographically first usable column sets.
    """
    d_q = C.differential(q)
    d_q1 = C.differential(q + 1)
    kernel = d_q.nullspace_basis()
    boundaries, _ = d_q1.column_space_basis()
    field = C.field
    candidates = hstack([boundaries, kernel], field, nrows=C.dim(q))
    _, pivots = candidates.rref()
    chosen = [j - boundaries.ncols for j in pivots if j >= boundaries.ncols]
    return HomologyBasis(q, kernel.take_columns(chosen), boundaries)


def inclusion_matrix(
    source_cells: tuple[str, ...], target_cells: tuple[str, ...], field: PrimeField
) -> FpMatrix:
    index = {cid: i for i, cid in enumerate(target_cells)}
    a = np.zeros((len(target_cells), len(source_cells)), dtype=np.int64)
    for j, cid in enumerate(source_cells):
        a[index[cid], j] = 1
    return FpMatrix(a, field)


def induced_map(
    source_cells: tuple[str, ...],
    target_cells: tuple[str, ...],
    Bs: HomologyBasis,
    Bt: HomologyBasis,
    field: PrimeField,
) -> FpMatrix:
    """Matrix of the map H_q(source) -> H_q(target) induced by inclusion.

    `source_cells` and `target_cells` are the sorted q-cells of the two
    subcomplexes; the source must be contained in the target.  Each source
    representative is pushed into target coordinates and re-expressed in the
    target's chosen basis by an exact solve.
    """
    missing = [cid for cid in source_cells if cid not in set(target_cells)]
    if missing:
        raise ValueError(f"not a subcomplex: cell {missing[0]!r} missing from target")
    incl = inclusion_matrix(source_cells, target_cells, field)
    return Bt.classes_of(incl @ Bs.cycle_reps)


def relative_homology_dim(X: CellComplex, A: Iterable[str], q: int) -> int:
    """dim H_q of the quotient complex of X by a face-closed subset A."""
    subset = set(A)
    unknown = [cid for cid in subset if cid not in X.dim_of]
    if unknown:
        raise ValueError(f"unknown cell id {sorted(unknown)[0]!r}")
    defects = X.closure_defects(subset)
    if defects:
        tau, sigma = defects[0]
        raise ValueError(f"not face-closed: {tau} in subset but face {sigma} is not")
    rest = frozenset(X.dim_of) - frozenset(subset)
    n_q = len(X.cells_of_dim(q, rest))
    if n_q == 0:
        return 0
    d_q = X.boundary_matrix(q, rest)
    d_q1 = X.boundary_matrix(q + 1, rest)
    return n_q - d_q.rank() - d_q1.rank()
