"""Exact sparse integer linear algebra.

Everything here works over Z with Python integers, so there is no silent
wraparound.  The heavy lifting is a sparse elimination with unit pivots
chosen by a Markowitz-style rule; on boundary matrices of the Yang-Baxter
complexes almost every pivot is a unit, so the leftover block that needs a
genuine gcd-based reduction is tiny.

    >>> M = SparseIntMatrix.from_dense([[2, 4], [6, 8]])
    >>> smith_normal_form(M).invariant_factors
    (2, 4)
    >>> homology_from_boundaries(SparseIntMatrix.zeros(0, 2), M)
    AbelianGroup(free_rank=0, torsion=(2, 4))
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "AbelianGroup",
    "Budget",
    "BudgetExceeded",
    "CERTIFYING_PRIMES",
    "SmithForm",
    "SparseIntMatrix",
    "homology_from_boundaries",
    "kernel_basis",
    "rank",
    "read_sms",
    "smith_normal_form",
    "smith_with_transforms",
    "solve",
    "write_sms",
]

# Large primes used to certify ranks over Q.  Each is 1 mod 2520, so F_p holds
# the k-th roots of unity for every k <= 10 (needed by symmetry-split ranks).
CERTIFYING_PRIMES = (2147478481, 2147463361, 2147453281)

_INT64_SAFE = 1 << 62


class BudgetExceeded(RuntimeError):
    """A computation crossed one of the configured resource ceilings."""


@dataclass(frozen=True)
class Budget:
    """Resource ceilings for a single matrix computation.

    ``None`` disables a ceiling.  ``max_dense`` bounds the size of dense
    intermediate matrices (leftover blocks, transform matrices).
    """

    max_entries: int | None = 50_000_000
    max_bits: int | None = 4096
    max_seconds: float | None = None
    max_dense: int | None = 25_000_000

    def check_entries(self, count: int, what: str = "matrix") -> None:
        if self.max_entries is not None and count > self.max_entries:
            raise BudgetExceeded(
                f"{what} needs {count} stored entries, budget is {self.max_entries}"
            )

    def check_dense(self, rows: int, cols: int) -> None:
        if self.max_dense is not None and rows * cols > self.max_dense:
            raise BudgetExceeded(
                f"dense block {rows}x{cols} exceeds budget of {self.max_dense} cells"
            )

    def check_bits(self, value: int) -> None:
        if self.max_bits is not None and abs(value).bit_length() > self.max_bits:
            raise BudgetExceeded(
                f"integer of {abs(value).bit_length()} bits exceeds {self.max_bits}-bit budget"
            )

    def deadline(self) -> float | None:
        if self.max_seconds is None:
            return None
        return time.monotonic() + self.max_seconds


DEFAULT_BUDGET = Budget()


def _check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise BudgetExceeded("wall-clock ceiling reached")


class SparseIntMatrix:
    """Immutable sparse integer matrix in canonical column-major COO layout.

    Entries are sorted by (col, row), duplicates are summed, and zeros are
    never stored.  Values live in an int64 array when they fit comfortably,
    and in an object array of Python ints otherwise.
    """

    __slots__ = ("rows", "cols", "row_idx", "col_idx", "values")

    def __init__(self, rows: int, cols: int, row_idx, col_idx, values, *, _canonical=False):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        r = np.asarray(row_idx, dtype=np.int64).ravel()
        c = np.asarray(col_idx, dtype=np.int64).ravel()
        v = _as_value_array(values)
        if not (len(r) == len(c) == len(v)):
            raise ValueError("row, column and value arrays differ in length")
        if len(r) and (r.min() < 0 or r.max() >= rows or c.min() < 0 or c.max() >= cols):
            raise IndexError("entry index out of range")
        if not _canonical:
            r, c, v = _canonicalize(r, c, v, rows)
        for arr in (r, c, v):
            arr.setflags(write=False)
        self.rows, self.cols = int(rows), int(cols)
        self.row_idx, self.col_idx, self.values = r, c, v

    # construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseIntMatrix":
        e = np.zeros(0, dtype=np.int64)
        return cls(rows, cols, e, e, e, _canonical=True)

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        idx = np.arange(n, dtype=np.int64)
        return cls(n, n, idx, idx, np.ones(n, dtype=np.int64), _canonical=True)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "SparseIntMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        triples = [(i, j, int(x)) for i, row in enumerate(data) for j, x in enumerate(row) if x]
        if any(len(row) != cols for row in data):
            raise ValueError("ragged dense matrix")
        return cls.from_entries(rows, cols, triples)

    @classmethod
    def from_entries(cls, rows: int, cols: int, triples: Iterable[tuple[int, int, int]]) -> "SparseIntMatrix":
        triples = list(triples)
        if not triples:
            return cls.zeros(rows, cols)
        r, c, v = zip(*triples)
        return cls(rows, cols, r, c, list(v))

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[dict[int, int]]) -> "SparseIntMatrix":
        return cls.from_entries(
            rows, len(columns), ((i, j, x) for j, col in enumerate(columns) for i, x in col.items())
        )

    # views ----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        return {
            (int(i), int(j)): int(x)
            for i, j, x in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist())
        }

    def is_zero(self) -> bool:
        return self.nnz == 0

    def max_abs(self) -> int:
        if not self.nnz:
            return 0
        return max(abs(int(x)) for x in (self.values.min(), self.values.max()))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, j, x in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()):
            out[i][j] = int(x)
        return out

    def column_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.cols)]
        for i, j, x in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()):
            out[j][i] = int(x)
        return out

    def row_dicts(self) -> dict[int, dict[int, int]]:
        out: dict[int, dict[int, int]] = {}
        for i, j, x in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()):
            out.setdefault(i, {})[j] = int(x)
        return out

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.cols, self.rows, self.col_idx, self.row_idx, self.values)

    @property
    def T(self) -> "SparseIntMatrix":
        return self.transpose()

    def submatrix(self, row_keep: Sequence[int], col_keep: Sequence[int]) -> "SparseIntMatrix":
        """Restrict to the given rows and columns, renumbered in the order given."""
        rmap = np.full(self.rows, -1, dtype=np.int64)
        rmap[np.asarray(row_keep, dtype=np.int64)] = np.arange(len(row_keep))
        cmap = np.full(self.cols, -1, dtype=np.int64)
        cmap[np.asarray(col_keep, dtype=np.int64)] = np.arange(len(col_keep))
        r, c = rmap[self.row_idx], cmap[self.col_idx]
        keep = (r >= 0) & (c >= 0)
        return SparseIntMatrix(len(row_keep), len(col_keep), r[keep], c[keep], self.values[keep])

    def __matmul__(self, other):
        if isinstance(other, SparseIntMatrix):
            return self._matmul_matrix(other)
        vec = [int(x) for x in other]
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} against {self.cols} columns")
        out = [0] * self.rows
        for i, j, x in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()):
            out[i] += x * vec[j]
        return out

    def _matmul_matrix(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        bound = self.max_abs() * other.max_abs() * max(1, self.cols)
        if bound < _INT64_SAFE and self.values.dtype != object and other.values.dtype != object:
            import scipy.sparse as sp

            a = sp.csr_matrix((self.values, (self.row_idx, self.col_idx)), shape=self.shape)
            b = sp.csr_matrix((other.values, (other.row_idx, other.col_idx)), shape=other.shape)
            prod = (a @ b).tocoo()
            return SparseIntMatrix(self.rows, other.cols, prod.row, prod.col, prod.data.astype(np.int64))
        rows_of_other = other.row_dicts()
        acc: dict[tuple[int, int], int] = {}
        for i, k, x in zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()):
            for j, y in rows_of_other.get(k, {}).items():
                acc[i, j] = acc.get((i, j), 0) + int(x) * y
        return SparseIntMatrix.from_entries(self.rows, other.cols, ((i, j, v) for (i, j), v in acc.items()))

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and [int(x) for x in self.values] == [int(x) for x in other.values]
        )

    __hash__ = None

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def _as_value_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray) and values.dtype == np.int64:
        return values.ravel()
    vals = [int(x) for x in np.asarray(values, dtype=object).ravel()]
    if all(-_INT64_SAFE < x < _INT64_SAFE for x in vals):
        return np.array(vals, dtype=np.int64)
    return np.array(vals, dtype=object)


def _canonicalize(r, c, v, rows):
    if not len(r):
        return r, c, v
    key = c * rows + r
    order = np.argsort(key, kind="stable")
    key, r, c, v = key[order], r[order], c[order], v[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    if len(starts) != len(key):
        if v.dtype == object:
            v = np.array([sum(v[a:b].tolist()) for a, b in zip(starts, np.r_[starts[1:], len(v)])], dtype=object)
        else:
            v = np.add.reduceat(v, starts)
        r, c = r[starts], c[starts]
    keep = v != 0
    return r[keep], c[keep], v[keep]


# ---------------------------------------------------------------------------
# groups


def _normalize_factors(diagonal: Iterable[int]) -> tuple[int, ...]:
    """Turn any diagonal of positive integers into a divisibility chain.

    The multiset of prime-power parts is preserved, so the resulting group is
    isomorphic to the direct sum of the input cyclic groups.
    """
    d = [abs(int(x)) for x in diagonal if x]
    k = len(d)
    for i in range(k):
        for j in range(i + 1, k):
            g = math.gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] // g * d[j]
    return tuple(d)


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group Z^free_rank + Z/t_1 + ... + Z/t_k."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        canon = tuple(t for t in _normalize_factors(self.torsion) if t != 1)
        object.__setattr__(self, "torsion", canon)

    @classmethod
    def from_cyclic(cls, orders: Iterable[int]) -> "AbelianGroup":
        """Direct sum of cyclic groups; an order of 0 stands for Z."""
        orders = list(orders)
        return cls(sum(1 for o in orders if o == 0), tuple(o for o in orders if o != 0))

    @classmethod
    def parse(cls, text: str) -> "AbelianGroup":
        """Parse strings like ``"Z^9 + Z_3"``, ``"Z ⊕ Z_2"`` or ``"0"``."""
        text = text.replace("⊕", "+").replace(" ", "")
        if text in ("0", ""):
            return cls()
        free, torsion = 0, []
        for part in text.split("+"):
            if part == "Z":
                free += 1
            elif part.startswith("Z^"):
                free += int(part[2:])
            elif part.startswith("Z_"):
                torsion.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse group summand {part!r}")
        return cls(free, tuple(torsion))

    def __add__(self, other: "AbelianGroup") -> "AbelianGroup":
        return AbelianGroup(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def exponent(self) -> int:
        """Smallest positive integer annihilating the torsion subgroup."""
        return self.torsion[-1] if self.torsion else 1

    def free_part(self) -> "AbelianGroup":
        return AbelianGroup(self.free_rank)

    def torsion_part(self) -> "AbelianGroup":
        return AbelianGroup(0, self.torsion)

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z_{t}" for t in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors d_1 | d_2 | ... | d_r of an integer matrix."""

    invariant_factors: tuple[int, ...]
    shape: tuple[int, int] = (0, 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)

    def cokernel(self) -> AbelianGroup:
        return AbelianGroup(self.shape[0] - self.rank, self.torsion)


# ---------------------------------------------------------------------------
# sparse elimination core


def _eliminate(rows: dict[int, dict[int, int]], mod: int | None, budget: Budget, deadline):
    """Eliminate unit pivots in place.

    ``rows`` maps row index -> {col: value}.  Over Z (mod is None) only +-1
    entries are used as pivots, which keeps every invariant factor intact;
    over F_p every nonzero entry is a unit.  Pivots are taken from the
    column of smallest current count, and within it the shortest row wins
    (ties to the lowest row index).  Returns the number of pivots; the
    leftover rows stay in ``rows``.
    """
    cols: dict[int, set[int]] = {}
    for r, d in rows.items():
        for c in d:
            cols.setdefault(c, set()).add(r)
    heap = [(len(s), c) for c, s in cols.items()]
    heapq.heapify(heap)
    pivots = 0
    steps = 0
    while heap:
        count, c = heapq.heappop(heap)
        members = cols.get(c)
        if not members:
            continue
        if len(members) != count:
            heapq.heappush(heap, (len(members), c))
            continue
        best = None
        for r in members:
            v = rows[r][c]
            if mod is not None or v == 1 or v == -1:
                key = (len(rows[r]), r)
                if best is None or key < best:
                    best = key
        if best is None:
            continue
        r = best[1]
        prow = rows.pop(r)
        for cc in prow:
            cols[cc].discard(r)
        u = prow[c]
        inv = pow(u, -1, mod) if mod is not None else u
        for r2 in list(cols[c]):
            row2 = rows[r2]
            f = row2[c] * inv
            for cc, x in prow.items():
                y = row2.get(cc, 0) - f * x
                if mod is not None:
                    y %= mod
                if y:
                    if cc not in row2:
                        cols[cc].add(r2)
                    row2[cc] = y
                elif cc in row2:
                    del row2[cc]
                    cols[cc].discard(r2)
            if not row2:
                del rows[r2]
        del cols[c]
        for cc in prow:
            s = cols.get(cc)
            if s:
                heapq.heappush(heap, (len(s), cc))
        pivots += 1
        steps += 1
        if steps & 255 == 0:
            _check_deadline(deadline)
            budget.check_entries(sum(len(d) for d in rows.values()), "elimination fill")
    return pivots


def _dense_diagonal(block: list[list[int]], budget: Budget, deadline) -> list[int]:
    """Diagonalize a dense integer block by unimodular operations.

    Returns the nonzero diagonal entries (not yet a divisibility chain).
    """
    a = [row[:] for row in block if any(row)]
    diag = []
    while a:
        ncols = len(a[0])
        # pivot of least absolute value, lowest (row, col) on ties
        best = None
        for i, row in enumerate(a):
            for j, x in enumerate(row):
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        while True:
            p = a[pi][pj]
            dirty = False
            for i, row in enumerate(a):
                if i != pi and row[pj]:
                    q = row[pj] // p
                    prow = a[pi]
                    for j in range(ncols):
                        if prow[j]:
                            row[j] -= q * prow[j]
                    if row[pj]:
                        dirty = True
            prow = a[pi]
            for j in range(ncols):
                if j != pj and prow[j]:
                    q = prow[j] // p
                    for row in a:
                        if row[pj]:
                            row[j] -= q * row[pj]
                    if prow[j]:
                        dirty = True
            if not dirty:
                break
            # some remainder is smaller than the pivot; move the pivot there
            best = None
            for i, row in enumerate(a):
                if i == pi:
                    continue
                if row[pj] and (best is None or abs(row[pj]) < best[0]):
                    best = (abs(row[pj]), i, pj)
            for j, x in enumerate(a[pi]):
                if j != pj and x and (best is None or abs(x) < best[0]):
                    best = (abs(x), pi, j)
            _, pi, pj = best
            _check_deadline(deadline)
        p = a[pi][pj]
        budget.check_bits(p)
        diag.append(abs(p))
        del a[pi]
        for row in a:
            del row[pj]
        a = [row for row in a if any(row)]
        if a and not a[0]:
            break
    return diag


def smith_normal_form(M: SparseIntMatrix, budget: Budget = DEFAULT_BUDGET) -> SmithForm:
    """Invariant factors of ``M`` over Z.

    Unit pivots are eliminated sparsely first; whatever remains is
    diagonalized densely and the diagonal normalized to a divisibility chain.
    """
    budget.check_entries(M.nnz)
    deadline = budget.deadline()
    rows = M.row_dicts()
    pivots = _eliminate(rows, None, budget, deadline)
    diag = [1] * pivots
    if rows:
        used_cols = sorted({c for d in rows.values() for c in d})
        budget.check_dense(len(rows), len(used_cols))
        cidx = {c: k for k, c in enumerate(used_cols)}
        block = []
        for r in sorted(rows):
            dense = [0] * len(used_cols)
            for c, x in rows[r].items():
                dense[cidx[c]] = x
            block.append(dense)
        diag += _dense_diagonal(block, budget, deadline)
    return SmithForm(_normalize_factors(diag), M.shape)


def _rank_mod(M: SparseIntMatrix, p: int, budget: Budget, deadline) -> int:
    rows = {}
    for r, d in M.row_dicts().items():
        d = {c: x % p for c, x in d.items() if x % p}
        if d:
            rows[r] = d
    pivots = _eliminate(rows, p, budget, deadline)
    assert not rows
    return pivots


def rank(M: SparseIntMatrix, field: str | int = "Q", budget: Budget = DEFAULT_BUDGET) -> int:
    """Rank of ``M`` over Q (``field="Q"``) or over F_p (``field=p``).

    Over Q the rank is computed modulo each of ``CERTIFYING_PRIMES``; if the
    three agree that value is returned, otherwise the exact integer
    elimination decides.
    """
    budget.check_entries(M.nnz)
    deadline = budget.deadline()
    if field in ("Q", "q", 0, None):
        ranks = {_rank_mod(M, p, budget, deadline) for p in CERTIFYING_PRIMES}
        if len(ranks) == 1:
            return ranks.pop()
        return smith_normal_form(M, budget).rank
    p = int(field)
    if p < 2 or not _is_prime(p):
        raise ValueError(f"{p} is not a prime")
    return _rank_mod(M, p, budget, deadline)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# dense Smith form with transforms, for solving and kernels


@dataclass
class _Transforms:
    diag: list[int]
    left: list[list[int]] = field(repr=False)  # U, rows x rows
    right: list[list[int]] = field(repr=False)  # V, cols x cols


def smith_with_transforms(M: SparseIntMatrix, budget: Budget = DEFAULT_BUDGET) -> _Transforms:
    """Dense diagonalization U @ M @ V = D with U, V unimodular.

    ``diag`` holds D's diagonal (length min(rows, cols)); it is a diagonal
    form, not necessarily a divisibility chain.
    """
    m, n = M.shape
    budget.check_dense(max(m, 1), max(n, 1) + max(m, n))
    deadline = budget.deadline()
    a = M.to_dense()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in a:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            _check_deadline(deadline)
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
            rem = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            rem += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            if not rem:
                break
            _, i, j = min(rem)
            swap_rows(t, i)
            swap_cols(t, j)
        budget.check_bits(a[t][t])
        t += 1
    diag = [a[i][i] for i in range(min(m, n))]
    return _Transforms(diag, U, V)


def kernel_basis(M: SparseIntMatrix, budget: Budget = DEFAULT_BUDGET) -> list[list[int]]:
    """A Z-basis of the integer kernel {x : M x = 0}."""
    tr = smith_with_transforms(M, budget)
    n = M.cols
    r = sum(1 for d in tr.diag if d)
    # nonzero diagonal entries sit in the leading positions
    return [[tr.right[i][j] for i in range(n)] for j in range(r, n)]


def solve(M: SparseIntMatrix, b: Sequence[int], ring: str = "Z", budget: Budget = DEFAULT_BUDGET):
    """Some x with M x = b over ``ring`` ("Z" or "Q"), or None if insoluble."""
    b = [Fraction(x) if ring.upper() == "Q" else int(x) for x in b]
    if len(b) != M.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {M.rows} rows")
    if ring.upper() == "Q":
        return _solve_rational(M, b)
    if ring.upper() != "Z":
        raise ValueError(f"unknown ring {ring!r}")
    tr = smith_with_transforms(M, budget)
    c = [sum(u * x for u, x in zip(row, b)) for row in tr.left]
    y = [0] * M.cols
    for i, ci in enumerate(c):
        d = tr.diag[i] if i < len(tr.diag) else 0
        if d == 0:
            if ci != 0:
                return None
        else:
            q, rem = divmod(ci, d)
            if rem:
                return None
            y[i] = q
    return [sum(v * yy for v, yy in zip(row, y)) for row in tr.right]


def _solve_rational(M: SparseIntMatrix, b: list[Fraction]):
    m, n = M.shape
    a = [[Fraction(x) for x in row] + [b[i]] for i, row in enumerate(M.to_dense())]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if a[i][c]), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if any(a[i][n] for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = a[i][n]
    return x


# ---------------------------------------------------------------------------
# homology


def homology_from_boundaries(
    d_n: SparseIntMatrix, d_next: SparseIntMatrix, budget: Budget = DEFAULT_BUDGET
) -> AbelianGroup:
    """ker d_n / im d_next for composable boundary matrices."""
    if d_n.cols != d_next.rows:
        raise ValueError(f"boundaries do not compose: {d_n.shape} then {d_next.shape}")
    if not (d_n @ d_next).is_zero():
        raise AssertionError("boundary composite is nonzero")
    rank_n = rank(d_n, "Q", budget) if d_n.nnz else 0
    snf = smith_normal_form(d_next, budget)
    return AbelianGroup(d_n.cols - rank_n - snf.rank, snf.torsion)


# ---------------------------------------------------------------------------
# SMS text format


def write_sms(M: SparseIntMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_sms(M))


def format_sms(M: SparseIntMatrix) -> str:
    # SMS lists entries row-major
    order = np.lexsort((M.col_idx, M.row_idx))
    lines = [f"{M.rows} {M.cols} M"]
    r, c, v = M.row_idx[order].tolist(), M.col_idx[order].tolist(), M.values[order].tolist()
    lines += [f"{i + 1} {j + 1} {int(x)}" for i, j, x in zip(r, c, v)]
    lines.append("0 0 0")
    return "\n".join(lines) + "\n"


def read_sms(path) -> SparseIntMatrix:
    with open(path) as fh:
        return parse_sms(fh.read())


def parse_sms(text: str) -> SparseIntMatrix:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 3 or lines[0][2] != "M":
        raise ValueError("missing SMS header '<rows> <cols> M'")
    rows, cols = int(lines[0][0]), int(lines[0][1])
    triples = []
    for parts in lines[1:]:
        i, j, v = (int(x) for x in parts)
        if (i, j, v) == (0, 0, 0):
            break
        triples.append((i - 1, j - 1, v))
    else:
        raise ValueError("SMS data not terminated by '0 0 0'")
    return SparseIntMatrix.from_entries(rows, cols, triples)
