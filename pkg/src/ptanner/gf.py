"""Exact linear algebra over prime fields GF(p).

Everything here is integer arithmetic mod p; no floating point is used
anywhere.  Matrices carry their modulus and pick dense or sparse storage by
size.  Enumeration-style operations (minimum distance, coset weight) take an
explicit budget and refuse to start work that would exceed it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, InvalidField

__all__ = [
    "PrimeField",
    "FMatrix",
    "LinearCode",
    "DEFAULT_ENUMERATION_BUDGET",
    "DENSE_STORAGE_LIMIT",
    "as_vector",
    "weight",
    "rank",
    "kernel_basis",
    "row_reduce",
    "solve",
    "in_rowspace",
    "coset_min_weight",
    "min_distance",
    "iter_codewords",
]

# Enumerations larger than this raise BudgetExceeded unless overridden.
DEFAULT_ENUMERATION_BUDGET = 2**24
# Matrices with at least this many entries are stored as sparse row maps.
DENSE_STORAGE_LIMIT = 10**6

_ENUM_CHUNK = 1 << 14


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """A prime modulus with the handful of scalar ops we need."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise InvalidField(f"modulus {self.p!r} is not prime")
        if self.p > 2**16:
            raise InvalidField(f"modulus {self.p} exceeds the 2^16 limit")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def elements(self) -> range:
        return range(self.p)


def as_vector(p: int, data) -> np.ndarray:
    """Coerce a sequence to a 1-D int64 array reduced mod p."""
    v = np.asarray(data, dtype=np.int64) % p
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    return v


def weight(v: np.ndarray) -> int:
    return int(np.count_nonzero(v))


def _as_array(p: int, data) -> np.ndarray:
    a = np.asarray(data, dtype=np.int64) % p
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {a.shape}")
    return a


class FMatrix:
    """Matrix over GF(p) with size-dependent dense/sparse storage.

    Sparse storage is a list of {col: value} maps, one per row.  Both
    representations answer every query identically; `toarray()` is the
    common path into the elimination routines.
    """

    __slots__ = ("p", "shape", "_dense", "_rows")

    def __init__(self, p: int, shape: tuple[int, int], dense=None, rows=None):
        PrimeField(p)
        self.p = p
        self.shape = (int(shape[0]), int(shape[1]))
        self._dense = dense
        self._rows = rows

    # ---- constructors -------------------------------------------------

    @classmethod
    def from_dense(cls, p: int, data) -> "FMatrix":
        a = _as_array(p, data)
        if a.size >= DENSE_STORAGE_LIMIT:
            rows = [
                {int(c): int(a[r, c]) for c in np.nonzero(a[r])[0]}
                for r in range(a.shape[0])
            ]
            return cls(p, a.shape, rows=rows)
        return cls(p, a.shape, dense=a.copy())

    @classmethod
    def from_entries(cls, p: int, n_rows: int, n_cols: int, entries) -> "FMatrix":
        PrimeField(p)
        if n_rows * n_cols >= DENSE_STORAGE_LIMIT:
            rows: list[dict[int, int]] = [dict() for _ in range(n_rows)]
            for r, c, v in entries:
                if not (0 <= r < n_rows and 0 <= c < n_cols):
                    raise DimensionMismatch(f"entry ({r},{c}) outside {n_rows}x{n_cols}")
                v = int(v) % p
                if v:
                    rows[r][int(c)] = v
                else:
                    rows[r].pop(int(c), None)
            return cls(p, (n_rows, n_cols), rows=rows)
        a = np.zeros((n_rows, n_cols), dtype=np.int64)
        for r, c, v in entries:
            if not (0 <= r < n_rows and 0 <= c < n_cols):
                raise DimensionMismatch(f"entry ({r},{c}) outside {n_rows}x{n_cols}")
            a[r, c] = int(v) % p
        return cls(p, (n_rows, n_cols), dense=a)

    @classmethod
    def zeros(cls, p: int, n_rows: int, n_cols: int) -> "FMatrix":
        return cls.from_entries(p, n_rows, n_cols, [])

    @classmethod
    def identity(cls, p: int, n: int) -> "FMatrix":
        return cls.from_dense(p, np.eye(n, dtype=np.int64))

    # ---- storage ------------------------------------------------------

    @property
    def is_sparse(self) -> bool:
        return self._rows is not None

    def toarray(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        a = np.zeros(self.shape, dtype=np.int64)
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                a[r, c] = v
        return a

    def row(self, r: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[r].copy()
        out = np.zeros(self.shape[1], dtype=np.int64)
        for c, v in self._rows[r].items():
            out[c] = v
        return out

    def entries(self) -> list[tuple[int, int, int]]:
        """Nonzero entries as (row, col, value), row-major sorted."""
        out: list[tuple[int, int, int]] = []
        if self._dense is not None:
            for r, c in zip(*np.nonzero(self._dense)):
                out.append((int(r), int(c), int(self._dense[r, c])))
        else:
            for r, row in enumerate(self._rows):
                for c in sorted(row):
                    out.append((r, c, row[c]))
        out.sort()
        return out

    def nnz(self) -> int:
        if self._dense is not None:
            return int(np.count_nonzero(self._dense))
        return sum(len(r) for r in self._rows)

    # ---- queries ------------------------------------------------------

    def row_weights(self) -> list[int]:
        if self._dense is not None:
            return [int(w) for w in np.count_nonzero(self._dense, axis=1)]
        return [len(r) for r in self._rows]

    def col_weights(self) -> list[int]:
        if self._dense is not None:
            return [int(w) for w in np.count_nonzero(self._dense, axis=0)]
        counts = [0] * self.shape[1]
        for row in self._rows:
            for c in row:
                counts[c] += 1
        return counts

    def max_row_weight(self) -> int:
        return max(self.row_weights(), default=0)

    def max_col_weight(self) -> int:
        return max(self.col_weights(), default=0)

    @property
    def T(self) -> "FMatrix":
        return FMatrix.from_entries(
            self.p, self.shape[1], self.shape[0], [(c, r, v) for r, c, v in self.entries()]
        )

    def matmul(self, other: "FMatrix") -> "FMatrix":
        if self.p != other.p:
            raise DimensionMismatch("field mismatch in matmul")
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        prod = (self.toarray() @ other.toarray()) % self.p
        return FMatrix.from_dense(self.p, prod)

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        return self.matmul(other)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Matrix-vector product mod p."""
        v = as_vector(self.p, v)
        if v.shape[0] != self.shape[1]:
            raise DimensionMismatch(f"{self.shape} applied to length {v.shape[0]}")
        if self._dense is not None:
            return (self._dense @ v) % self.p
        out = np.zeros(self.shape[0], dtype=np.int64)
        for r, row in enumerate(self._rows):
            s = 0
            for c, val in row.items():
                s += val * int(v[c])
            out[r] = s % self.p
        return out

    def is_zero(self) -> bool:
        return self.nnz() == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, FMatrix):
            return NotImplemented
        return (
            self.p == other.p
            and self.shape == other.shape
            and self.entries() == other.entries()
        )

    def __hash__(self):
        return hash((self.p, self.shape, tuple(self.entries())))

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"FMatrix(p={self.p}, shape={self.shape}, {kind}, nnz={self.nnz()})"

    # ---- serialization ------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "p": self.p,
            "rows": self.shape[0],
            "cols": self.shape[1],
            "entries": [list(e) for e in self.entries()],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "FMatrix":
        doc = json.loads(text)
        return cls.from_entries(doc["p"], doc["rows"], doc["cols"], doc["entries"])

    def to_alist(self) -> str:
        """Sparse text export.

        Line 1: rows cols.  Line 2: max row / col weight.  Then one line per
        row listing 1-based column indices, and one line per column listing
        1-based row indices.  For p > 2 the entry values follow a ':' on
        each line.  Entry order is ascending, so export is canonical.
        """
        ent = self.entries()
        by_row: list[list[tuple[int, int]]] = [[] for _ in range(self.shape[0])]
        by_col: list[list[tuple[int, int]]] = [[] for _ in range(self.shape[1])]
        for r, c, v in ent:
            by_row[r].append((c, v))
            by_col[c].append((r, v))
        lines = [
            f"{self.shape[0]} {self.shape[1]}",
            f"{self.max_row_weight()} {self.max_col_weight()}",
        ]

        def fmt(items: list[tuple[int, int]]) -> str:
            idx = " ".join(str(i + 1) for i, _ in items)
            if self.p == 2:
                return idx
            vals = " ".join(str(v) for _, v in items)
            return f"{idx} : {vals}" if items else ":"

        lines.extend(fmt(row) for row in by_row)
        lines.extend(fmt(col) for col in by_col)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_alist(cls, text: str, p: int) -> "FMatrix":
        lines = text.splitlines()
        n_rows, n_cols = (int(t) for t in lines[0].split())
        entries = []
        for r in range(n_rows):
            line = lines[2 + r]
            if p == 2:
                cols = [int(t) - 1 for t in line.split()]
                vals = [1] * len(cols)
            else:
                idx_part, _, val_part = line.partition(":")
                cols = [int(t) - 1 for t in idx_part.split()]
                vals = [int(t) for t in val_part.split()]
            entries.extend((r, c, v) for c, v in zip(cols, vals))
        return cls.from_entries(p, n_rows, n_cols, entries)


# ---- elimination ------------------------------------------------------


def row_reduce(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p.

    Pivoting is deterministic: scan columns left to right and take the
    first row with a nonzero entry.  Returns (rref, pivot_columns).
    """
    a = _as_array(p, a).copy()
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    r = 0
    fld = PrimeField(p)
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = (a[r] * fld.inv(int(a[r, c]))) % p
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: FMatrix | np.ndarray, p: int | None = None) -> int:
    a, p = _coerce(m, p)
    if a.size == 0:
        return 0
    return len(row_reduce(a, p)[1])


def kernel_basis(m: FMatrix | np.ndarray, p: int | None = None) -> np.ndarray:
    """Basis of the right kernel {x : m x = 0}, one row per basis vector.

    Free variables are set to 1 one at a time, in ascending column order,
    so the result is deterministic.  Shape (dim_kernel, n_cols).
    """
    a, p = _coerce(m, p)
    n_cols = a.shape[1]
    rref, pivots = row_reduce(a, p)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = np.zeros((len(free), n_cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for j, c in enumerate(pivots):
            basis[i, c] = (-int(rref[j, f])) % p
    return basis


def solve(m: FMatrix | np.ndarray, b, p: int | None = None) -> np.ndarray | None:
    """One solution x of m x = b, or None when the system is inconsistent."""
    a, p = _coerce(m, p)
    b = as_vector(p, b)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"rhs length {b.shape[0]} vs {a.shape[0]} rows")
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    rref, pivots = row_reduce(aug, p)
    if a.shape[1] in pivots:
        return None
    x = np.zeros(a.shape[1], dtype=np.int64)
    for j, c in enumerate(pivots):
        x[c] = rref[j, a.shape[1]]
    return x


def in_rowspace(m: FMatrix | np.ndarray, v, p: int | None = None) -> bool:
    """Whether v is a linear combination of the rows of m (transposed solve)."""
    a, p = _coerce(m, p)
    return solve(a.T, v, p) is not None


def _coerce(m: FMatrix | np.ndarray, p: int | None) -> tuple[np.ndarray, int]:
    if isinstance(m, FMatrix):
        return m.toarray(), m.p
    if p is None:
        raise InvalidField("modulus required for raw arrays")
    return _as_array(p, m), p


# ---- codes ------------------------------------------------------------


class LinearCode:
    """A subspace of GF(p)^n given by a row basis in reduced echelon form."""

    __slots__ = ("p", "n", "basis")

    def __init__(self, p: int, n: int, rows=None):
        PrimeField(p)
        self.p = p
        self.n = int(n)
        if rows is None or (hasattr(rows, "__len__") and len(rows) == 0):
            self.basis = np.zeros((0, self.n), dtype=np.int64)
            return
        a = _as_array(p, rows)
        if a.shape[1] != self.n:
            raise DimensionMismatch(f"rows of length {a.shape[1]}, expected {self.n}")
        rref, pivots = row_reduce(a, p)
        self.basis = rref[: len(pivots)].copy()

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def contains(self, v) -> bool:
        v = as_vector(self.p, v)
        if self.dim == 0:
            return not v.any()
        return in_rowspace(self.basis, v, self.p)

    def dual(self) -> "LinearCode":
        return LinearCode(self.p, self.n, kernel_basis(self.basis, self.p))

    @classmethod
    def from_parity_checks(cls, p: int, checks) -> "LinearCode":
        a = _as_array(p, checks)
        return cls(p, a.shape[1], kernel_basis(a, p))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return (
            self.p == other.p
            and self.n == other.n
            and self.basis.shape == other.basis.shape
            and bool((self.basis == other.basis).all())
        )

    def __hash__(self):
        return hash((self.p, self.n, self.basis.tobytes()))

    def __repr__(self):
        return f"LinearCode(p={self.p}, n={self.n}, dim={self.dim})"

    def canonical_key(self) -> bytes:
        """Stable identifier: the RREF basis is unique per subspace."""
        return self.basis.tobytes()


def iter_codewords(
    code: LinearCode,
    budget: int | None = DEFAULT_ENUMERATION_BUDGET,
    chunk: int = _ENUM_CHUNK,
) -> Iterator[np.ndarray]:
    """Yield all p^dim codewords in blocks (rows of each yielded array).

    Order is fixed: coefficient vectors count up in base p with the last
    basis row as the fastest digit.
    """
    k, p = code.dim, code.p
    total = p**k
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} codewords exceeds budget {budget}")
    if k == 0:
        yield np.zeros((1, code.n), dtype=np.int64)
        return
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        coeffs = (idx[:, None] // powers) % p
        yield (coeffs @ code.basis) % p


def coset_min_weight(
    v,
    code: LinearCode,
    budget: int | None = DEFAULT_ENUMERATION_BUDGET,
) -> int:
    """min over codewords c of |v + c|, by enumeration."""
    v = as_vector(code.p, v)
    if v.shape[0] != code.n:
        raise DimensionMismatch(f"vector length {v.shape[0]} vs n={code.n}")
    best = None
    for block in iter_codewords(code, budget):
        w = np.count_nonzero((block + v) % code.p, axis=1)
        m = int(w.min())
        best = m if best is None else min(best, m)
        if best == 0:
            break
    return best


def min_distance(
    code: LinearCode,
    budget: int | None = DEFAULT_ENUMERATION_BUDGET,
) -> int | float:
    """Minimum nonzero codeword weight; +inf for the zero code."""
    if code.dim == 0:
        return math.inf
    best = None
    for block in iter_codewords(code, budget):
        w = np.count_nonzero(block, axis=1)
        w = w[w > 0]
        if w.size:
            m = int(w.min())
            best = m if best is None else min(best, m)
    return best
