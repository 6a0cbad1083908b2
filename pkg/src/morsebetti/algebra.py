"""Exact linear algebra over a prime field F_p.

Everything downstream (boundary operators, homology bases, induced maps,
Koszul differentials) reduces to rank / solve / nullspace over one fixed
prime field.  Matrices are dense numpy int64 arrays with entries normalized
to [0, p).  Elimination is plain Gaussian elimination with first-nonzero
pivoting, scanning columns left to right, so every output is deterministic:
the pivot columns are always the lexicographically first independent set.
"""

from __future__ import annotations

import numpy as np

MAX_MODULUS = 2**31


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class PrimeField:
    """Field context F_p; all matrix entries are residues mod its prime p."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"modulus must be prime, got {p!r}")
        if p >= MAX_MODULUS:
            raise ValueError(f"modulus too large: {p} >= {MAX_MODULUS}")
        self.p = p

    def normalize(self, x: int) -> int:
        return x % self.p

    def neg(self, x: int) -> int:
        return (-x) % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(x, -1, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


class FpMatrix:
    """Dense matrix over a prime field.

    Treated as immutable: no method mutates `data` in place, and the reduced
    echelon form is cached after the first elimination.
    """

    __slots__ = ("data", "field", "_rref")

    def __init__(self, data, field: PrimeField):
        a = np.array(data, dtype=np.int64, copy=True)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={a.ndim}")
        self.data = a % field.p
        self.field = field
        self._rref = None

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: PrimeField) -> "FpMatrix":
        return cls(np.zeros((nrows, ncols), dtype=np.int64), field)

    @classmethod
    def identity(cls, n: int, field: PrimeField) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), field)

    @classmethod
    def column(cls, entries, field: PrimeField) -> "FpMatrix":
        return cls(np.array(list(entries), dtype=np.int64).reshape(-1, 1), field)

    @property
    def nrows(self) -> int:
        return self.data.shape[0]

    @property
    def ncols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def is_zero(self) -> bool:
        return not self.data.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and bool((self.data == other.data).all())
        )

    def __hash__(self):
        return hash((self.field.p, self.shape, self.data.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix({self.data.tolist()}, p={self.field.p})"

    def __neg__(self) -> "FpMatrix":
        return FpMatrix(-self.data, self.field)

    def __add__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_field(other)
        return FpMatrix(self.data + other.data, self.field)

    def __sub__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_field(other)
        return FpMatrix(self.data - other.data, self.field)

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        self._check_field(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        p = self.field.p
        k = max(self.ncols, 1)
        # int64 is safe while the worst-case accumulated sum fits.
        if (p - 1) * (p - 1) * k < 2**62:
            prod = self.data @ other.data
        else:
            prod = self.data.astype(object) @ other.data.astype(object)
        return FpMatrix(np.asarray(prod % p, dtype=np.int64), self.field)

    def take_columns(self, indices) -> "FpMatrix":
        idx = list(indices)
        sub = self.data[:, idx] if idx else np.zeros((self.nrows, 0), dtype=np.int64)
        return FpMatrix(sub, self.field)

    def _check_field(self, other: "FpMatrix"):
        if self.field != other.field:
            raise ValueError("mixed field moduli")

    # -- elimination ------------------------------------------------------

    def rref(self) -> tuple["FpMatrix", tuple[int, ...]]:
        """Reduced row echelon form and its pivot columns."""
        if self._rref is None:
            self._rref = _row_reduce(self.data, self.field.p)
        R, pivots = self._rref
        return FpMatrix(R, self.field), pivots

    def rank(self) -> int:
        _, pivots = self.rref()
        return len(pivots)

    def nullspace_basis(self) -> "FpMatrix":
        """Columns form a basis of ker(self); count = ncols - rank."""
        R, pivots = self.rref()
        p = self.field.p
        n = self.ncols
        free = [j for j in range(n) if j not in set(pivots)]
        basis = np.zeros((n, len(free)), dtype=np.int64)
        for k, f in enumerate(free):
            basis[f, k] = 1
            for row, pc in enumerate(pivots):
                basis[pc, k] = (-R.data[row, f]) % p
        return FpMatrix(basis, self.field)

    def solve(self, b) -> np.ndarray | None:
        """One solution of self @ x = b, or None when inconsistent.

        Free variables are set to 0, so the result is deterministic.
        """
        B = b if isinstance(b, FpMatrix) else FpMatrix.column(b, self.field)
        X = self.solve_matrix(B)
        return None if X is None else X.data[:, 0]

    def solve_matrix(self, B: "FpMatrix") -> "FpMatrix | None":
        """Columnwise solve against a matrix right-hand side."""
        self._check_field(B)
        if B.nrows != self.nrows:
            raise ValueError(f"rhs has {B.nrows} rows, expected {self.nrows}")
        n = self.ncols
        stacked = np.hstack([self.data, B.data])
        R, pivots = _row_reduce(stacked, self.field.p)
        if any(pc >= n for pc in pivots):
            return None
        X = np.zeros((n, B.ncols), dtype=np.int64)
        for row, pc in enumerate(pivots):
            X[pc, :] = R[row, n:]
        return FpMatrix(X, self.field)

    def column_space_basis(self) -> tuple["FpMatrix", tuple[int, ...]]:
        """Lexicographically first independent subset of the columns."""
        _, pivots = self.rref()
        return self.take_columns(pivots), pivots


def _row_reduce(a: np.ndarray, p: int) -> tuple[np.ndarray, tuple[int, ...]]:
    R = (a % p).copy()
    nrows, ncols = R.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            R[[row, pr]] = R[[pr, row]]
        inv = pow(int(R[row, col]), -1, p)
        R[row] = (R[row] * inv) % p
        coeffs = R[:, col].copy()
        coeffs[row] = 0
        R = (R - np.outer(coeffs, R[row])) % p
        pivots.append(col)
        row += 1
    return R, tuple(pivots)


def hstack(blocks: list[FpMatrix], field: PrimeField, nrows: int | None = None) -> FpMatrix:
    if not blocks:
        return FpMatrix.zeros(nrows or 0, 0, field)
    return FpMatrix(np.hstack([m.data for m in blocks]), field)
