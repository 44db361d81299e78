"""Yang-Baxter chain complexes as sparse integer boundary matrices.

Generators of C_n are n-tuples over {0..m-1}, indexed by their mixed-radix
code sum_k x_k * m**(n-k) (first coordinate most significant).  Three
variants share the same boundary formula:

* ``YB``  -- all tuples;
* ``D``   -- degenerate tuples (some adjacent pair fixed by R), n >= 2;
* ``NYB`` -- the quotient YB / D, based on non-degenerate tuples.
"""

from __future__ import annotations

import contextlib
import contextvars
import enum
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .biquandle import AxiomError, YBMap, as_map, check_axioms, translation_symmetry
from .intlinalg import (
    CERTIFYING_PRIMES,
    DEFAULT_BUDGET,
    Budget,
    SparseIntMatrix,
    rank as matrix_rank,
    smith_normal_form,
)

__all__ = [
    "ChainBasis",
    "Variant",
    "boundary_matrix",
    "boundary_rank",
    "chain_basis",
    "character_blocks",
    "decode",
    "encode",
    "face_left",
    "face_right",
    "inject_face_fault",
    "is_degenerate",
]


class Variant(str, enum.Enum):
    YB = "YB"
    D = "D"
    NYB = "NYB"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, Variant):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unknown variant {value!r}; expected YB, D or NYB") from None


# ---------------------------------------------------------------------------
# tuples


def encode(t: Sequence[int], m: int) -> int:
    code = 0
    for x in t:
        code = code * m + x
    return code


def decode(code: int, m: int, n: int) -> tuple[int, ...]:
    if not 0 <= code < m**n:
        raise ValueError(f"code {code} out of range for m={m}, n={n}")
    out = [0] * n
    for k in range(n - 1, -1, -1):
        code, out[k] = divmod(code, m)
    return tuple(out)


def tuples_array(m: int, n: int) -> np.ndarray:
    """All n-tuples as rows of an (m**n, n) array, in code order."""
    codes = np.arange(m**n, dtype=np.int64)
    out = np.empty((m**n, n), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        out[:, k] = codes % m
        codes = codes // m
    return out


def encode_array(T: np.ndarray, m: int) -> np.ndarray:
    code = np.zeros(T.shape[0], dtype=np.int64)
    for k in range(T.shape[1]):
        code = code * m + T[:, k]
    return code


# ---------------------------------------------------------------------------
# face maps

_FAULT = contextvars.ContextVar("ybhom_face_fault", default=False)


@contextlib.contextmanager
def inject_face_fault():
    """Deliberately corrupt the right face maps (self-test of golden checks)."""
    token = _FAULT.set(True)
    try:
        yield
    finally:
        _FAULT.reset(token)


def _check_index(i: int, t) -> None:
    if not 1 <= i <= len(t):
        raise IndexError(f"face index {i} outside 1..{len(t)}")


def face_left(R, i: int, t: Sequence[int]) -> tuple[int, ...]:
    """d^l_i: thread x_i leftward through x_{i-1}, ..., x_1 and drop it."""
    R = as_map(R)
    _check_index(i, t)
    out = list(t[: i - 1]) + list(t[i:])
    c = t[i - 1]
    for j in range(i - 2, -1, -1):
        out[j] = R.r2[t[j]][c]
        c = R.r1[t[j]][c]
    return tuple(out)


def face_right(R, i: int, t: Sequence[int]) -> tuple[int, ...]:
    """d^r_i: thread x_i rightward through x_{i+1}, ..., x_{n+1} and drop it."""
    R = as_map(R)
    _check_index(i, t)
    out = list(t[: i - 1]) + list(t[i:])
    c = t[i - 1]
    for j in range(i, len(t)):
        out[j - 1] = R.r1[c][t[j]]
        c = R.r2[c][t[j]]
    return tuple(out)


def _faces_left(r1, r2, T: np.ndarray, i: int) -> np.ndarray:
    res = np.delete(T, i - 1, axis=1)
    c = T[:, i - 1]
    for j in range(i - 2, -1, -1):
        res[:, j] = r2[T[:, j], c]
        c = r1[T[:, j], c]
    return res


def _faces_right(r1, r2, T: np.ndarray, i: int, m: int) -> np.ndarray:
    res = np.delete(T, i - 1, axis=1)
    c = T[:, i - 1]
    for j in range(i, T.shape[1]):
        res[:, j - 1] = r1[c, T[:, j]]
        c = r2[c, T[:, j]]
    if _FAULT.get() and i == 1 and res.shape[1]:
        res[:, 0] = (res[:, 0] + 1) % m
    return res


# ---------------------------------------------------------------------------
# bases


def is_degenerate(R, t: Sequence[int]) -> bool:
    R = as_map(R)
    return any(R(a, b) == (a, b) for a, b in zip(t, t[1:]))


def _degenerate_mask(R: YBMap, m: int, n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(m**n, dtype=bool)
    T = tuples_array(m, n)
    r1, r2 = R.arrays
    fixed = (r1 == np.arange(m)[:, None]) & (r2 == np.arange(m)[None, :])
    mask = np.zeros(T.shape[0], dtype=bool)
    for k in range(n - 1):
        mask |= fixed[T[:, k], T[:, k + 1]]
    return mask


@dataclass(frozen=True)
class ChainBasis:
    """Ordered generators (by code) of one chain group of a variant."""

    m: int
    n: int
    variant: Variant
    generators: np.ndarray

    def __len__(self):
        return len(self.generators)

    def tuples(self) -> list[tuple[int, ...]]:
        return [decode(int(c), self.m, self.n) for c in self.generators]

    def position(self) -> np.ndarray:
        """Lookup from code to position in this basis (-1 if absent)."""
        pos = np.full(self.m**self.n, -1, dtype=np.int64)
        pos[self.generators] = np.arange(len(self.generators))
        return pos


def _require_biquandle(R: YBMap, variant: Variant) -> None:
    if variant is not Variant.YB:
        cert = check_axioms(R)
        if not cert.is_biquandle:
            raise AxiomError(cert)


def chain_basis(R, n: int, variant="YB") -> ChainBasis:
    R = as_map(R)
    variant = Variant.parse(variant)
    _require_biquandle(R, variant)
    m = R.m
    if n < 1:
        return ChainBasis(m, n, variant, np.zeros(0, dtype=np.int64))
    if variant is Variant.YB:
        gens = np.arange(m**n, dtype=np.int64)
    else:
        mask = _degenerate_mask(R, m, n)
        gens = np.flatnonzero(mask if variant is Variant.D else ~mask).astype(np.int64)
    gens.setflags(write=False)
    return ChainBasis(m, n, variant, gens)


# ---------------------------------------------------------------------------
# boundary matrices

_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _yb_boundary_triples(R: YBMap, n: int):
    m = R.m
    r1, r2 = R.arrays
    T = tuples_array(m, n)
    N = T.shape[0]
    cols = np.arange(N, dtype=np.int64)
    rows, vals = [], []
    for i in range(1, n + 1):
        sign = 1 if i % 2 else -1
        rows.append(encode_array(_faces_left(r1, r2, T, i), m))
        vals.append(np.full(N, sign, dtype=np.int64))
        rows.append(encode_array(_faces_right(r1, r2, T, i, m), m))
        vals.append(np.full(N, -sign, dtype=np.int64))
    return np.concatenate(rows), np.tile(cols, 2 * n), np.concatenate(vals)


def boundary_matrix(R, n: int, variant="YB", budget: Budget = DEFAULT_BUDGET) -> SparseIntMatrix:
    """Matrix of the boundary C_n -> C_{n-1} for the chosen variant.

    Columns follow the degree-n basis, rows the degree-(n-1) basis, both in
    ascending code order.  C_0 is the zero group, so n = 1 gives a 0 x |C_1|
    matrix.
    """
    R = as_map(R)
    variant = Variant.parse(variant)
    if n < 1:
        raise ValueError("degree must be at least 1")
    budget.check_entries(2 * n * R.m**n, f"boundary matrix of degree {n}")
    key = (R.fingerprint, n, variant, _FAULT.get())
    with _CACHE_LOCK:
        hit = _CACHE.get(key)
    if hit is not None:
        return hit
    src = chain_basis(R, n, variant)
    if n == 1:
        mat = SparseIntMatrix.zeros(0, len(src))
    else:
        m = R.m
        r, c, v = _yb_boundary_triples(R, n)
        full = SparseIntMatrix(m ** (n - 1), m**n, r, c, v)
        if variant is Variant.YB:
            mat = full
        else:
            tgt = chain_basis(R, n - 1, variant)
            if variant is Variant.D:
                _assert_degenerate_closure(R, full, src, n)
            mat = full.submatrix(tgt.generators, src.generators)
    with _CACHE_LOCK:
        _CACHE.setdefault(key, mat)
        return _CACHE[key]


def _assert_degenerate_closure(R: YBMap, full: SparseIntMatrix, src: ChainBasis, n: int) -> None:
    deg_rows = _degenerate_mask(R, R.m, n - 1)
    deg_cols = np.zeros(full.cols, dtype=bool)
    deg_cols[src.generators] = True
    leak = deg_cols[full.col_idx] & ~deg_rows[full.row_idx]
    if leak.any():
        k = int(np.flatnonzero(leak)[0])
        raise AssertionError(
            f"boundary of degenerate {decode(int(full.col_idx[k]), R.m, n)} "
            f"hits non-degenerate {decode(int(full.row_idx[k]), R.m, n - 1)}"
        )


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()


# ---------------------------------------------------------------------------
# ranks through the translation symmetry


def _orbit_data(m: int, n: int, perm: np.ndarray, k: int):
    """(representative code, shift) per tuple under the diagonal action.

    Every tuple t equals perm^shift applied to its representative.  The
    action is free, so every orbit has exactly k elements.
    """
    T = tuples_array(m, n)
    images = [encode_array(T, m)]
    P = T
    for _ in range(1, k):
        P = perm[P]
        images.append(encode_array(P, m))
    stack = np.stack(images)  # stack[a, code] = code of perm^a(t)
    amin = np.argmin(stack, axis=0)
    rep = stack[amin, np.arange(stack.shape[1])]
    shift = (k - amin) % k
    return rep, shift


def character_blocks(R, n: int, variant, perm: Sequence[int], p: int) -> list[SparseIntMatrix]:
    """Boundary matrix split into eigenblocks of a fixed-point-free automorphism.

    ``perm`` must be an automorphism of R all of whose cycles share one
    length k, and p a prime with k | p - 1.  Over F_p the boundary is then
    block diagonal in the eigenbasis of the diagonal action, one block per
    k-th root of unity; the returned blocks have entries reduced mod p and
    their ranks add up to the rank of the full boundary over F_p.
    """
    R = as_map(R)
    m = R.m
    perm = np.asarray(perm, dtype=np.int64)
    k = _cycle_length(perm)
    if k is None or (p - 1) % k:
        raise ValueError("permutation must be semiregular with order dividing p - 1")
    mat = boundary_matrix(R, n, variant)
    src = chain_basis(R, n, variant)
    tgt = chain_basis(R, n - 1, variant)
    src_rep, _ = _orbit_data(m, n, perm, k)
    tgt_rep, tgt_shift = _orbit_data(m, n - 1, perm, k) if n > 1 else (np.zeros(0, np.int64),) * 2

    src_codes = src.generators
    col_is_rep = src_rep[src_codes] == src_codes
    col_new = np.cumsum(col_is_rep) - 1
    tgt_codes = tgt.generators
    row_rep_codes = np.unique(tgt_rep[tgt_codes]) if len(tgt_codes) else np.zeros(0, np.int64)
    row_pos = np.full(m ** max(n - 1, 0), -1, dtype=np.int64)
    row_pos[row_rep_codes] = np.arange(len(row_rep_codes))

    keep = col_is_rep[mat.col_idx]
    cols = col_new[mat.col_idx[keep]]
    tcodes = tgt_codes[mat.row_idx[keep]]
    rows = row_pos[tgt_rep[tcodes]] if len(tcodes) else np.zeros(0, np.int64)
    shifts = tgt_shift[tcodes] if len(tcodes) else np.zeros(0, np.int64)
    vals = np.array([int(x) % p for x in mat.values[keep]], dtype=np.int64)

    g = _primitive_root(p)
    omega = pow(g, (p - 1) // k, p)
    nrows, ncols = len(row_rep_codes), int(col_is_rep.sum())
    blocks = []
    for j in range(k):
        powers = np.array([pow(omega, j * a, p) for a in range(k)], dtype=object)
        bv = [int(v) * int(w) % p for v, w in zip(vals.tolist(), powers[shifts].tolist())]
        blocks.append(SparseIntMatrix(nrows, ncols, rows, cols, bv))
    return blocks


def _cycle_length(perm: np.ndarray) -> int | None:
    m = len(perm)
    if sorted(perm.tolist()) != list(range(m)):
        return None
    lengths = set()
    for x in range(m):
        y, k = perm[x], 1
        while y != x:
            y, k = perm[y], k + 1
        lengths.add(k)
    if len(lengths) != 1:
        return None
    k = lengths.pop()
    return k if k > 1 else None


def _primitive_root(p: int) -> int:
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise ValueError(f"no primitive root modulo {p}")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _rank_mod_p(R: YBMap, n: int, variant: Variant, p: int, budget: Budget) -> int:
    mat = boundary_matrix(R, n, variant, budget)
    if mat.is_zero():
        return 0
    perm = translation_symmetry(R)
    if perm is not None and (p - 1) % R.m == 0:
        return sum(matrix_rank(b, p, budget) for b in character_blocks(R, n, variant, perm, p) if b.nnz)
    return matrix_rank(mat, p, budget)


def boundary_rank(R, n: int, variant="YB", field="Q", budget: Budget = DEFAULT_BUDGET) -> int:
    """Rank of the degree-n boundary over Q or F_p.

    When x -> x+1 is an automorphism of R the matrix is split into
    eigenblocks first.  Over Q the rank is certified by agreement modulo
    three large primes, falling back to exact integer elimination.
    """
    R = as_map(R)
    variant = Variant.parse(variant)
    if n < 1:
        return 0
    if field in ("Q", "q", None, 0):
        ranks = {_rank_mod_p(R, n, variant, p, budget) for p in CERTIFYING_PRIMES}
        if len(ranks) == 1:
            return ranks.pop()
        return smith_normal_form(boundary_matrix(R, n, variant, budget), budget).rank
    return _rank_mod_p(R, n, variant, int(field), budget)


def expected_degenerate_rank(m: int, n: int) -> int:
    """Number of degenerate n-tuples for the cyclic biquandle of order m."""
    return 0 if n < 2 else m**n - m * (m - 1) ** (n - 1)


def chain_rank(m: int, n: int) -> int:
    return m**n if n >= 1 else 0

