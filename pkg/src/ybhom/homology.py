"""(Co)homology groups of Yang-Baxter complexes and cochain-level tools.

Homology over Z comes from Smith forms of the boundary matrices; over a
field only ranks are needed.  Cochains are functions on n-tuples stored
sparsely by tuple code; the coboundary of an n-cochain f is f composed with
the degree-(n+1) boundary, i.e. the transpose of that matrix applied to f.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .biquandle import BiquandleError, YBMap, as_map, check_property_I
from .chain_complex import (
    Variant,
    boundary_matrix,
    boundary_rank,
    chain_basis,
    decode,
    encode,
    face_left,
    face_right,
)
from .intlinalg import (
    DEFAULT_BUDGET,
    AbelianGroup,
    Budget,
    SmithForm,
    SparseIntMatrix,
    kernel_basis,
    smith_normal_form,
    solve,
)

__all__ = [
    "Cochain",
    "HomologyReport",
    "VerificationReport",
    "act_on_cochain",
    "averaging_projector",
    "coboundary",
    "cocycle_basis",
    "compute_cohomology",
    "compute_homology",
    "delta_y",
    "integral_cocycle_basis",
    "is_coboundary",
    "orbit_cocycle",
    "restrict_last",
    "verify_averaging_lemma",
    "verify_betti",
    "verify_cocycle_basis",
    "verify_conjecture",
    "verify_equivariance",
    "verify_proof_identities",
    "verify_splitting",
    "verify_torsion_bound",
]


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# coefficients


def parse_coefficients(coeff) -> str:
    """Normalize to ``"Z"``, ``"Q"`` or ``"Zp:<p>"``."""
    if isinstance(coeff, int):
        return f"Zp:{coeff}"
    text = str(coeff).strip()
    low = text.lower()
    if low == "z":
        return "Z"
    if low == "q":
        return "Q"
    for prefix in ("zp:", "z_", "z/"):
        if low.startswith(prefix):
            p = int(low[len(prefix):])
            from .intlinalg import _is_prime

            if not _is_prime(p):
                raise ValueError(f"{p} is not a prime")
            return f"Zp:{p}"
    raise ValueError(f"unknown coefficients {coeff!r}; expected Z, Q or Zp:<p>")


def _field_of(coeff: str):
    return "Q" if coeff == "Q" else int(coeff.split(":")[1])


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class HomologyReport:
    m: int
    n: int
    variant: str
    coeff: str
    free_rank: int
    torsion: tuple[int, ...] = ()
    elapsed_ms: float = 0.0
    matrix_dims: tuple[tuple[int, int], ...] = ()
    kind: str = "homology"

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup(self.free_rank, self.torsion)

    @property
    def dimension(self) -> int:
        return self.free_rank

    def describe(self) -> str:
        if self.coeff == "Z":
            return str(self.group)
        return f"dim {self.free_rank}"

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "variant": self.variant,
            "coeff": self.coeff,
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "elapsed_ms": round(self.elapsed_ms, 3),
            "matrix_dims": [list(d) for d in self.matrix_dims],
        }


_SNF_CACHE: dict = {}
_SNF_LOCK = threading.Lock()


def _smith(R: YBMap, n: int, variant: Variant, budget: Budget, transpose: bool = False) -> SmithForm:
    from .chain_complex import _FAULT

    key = (R.fingerprint, n, variant, transpose, _FAULT.get())
    with _SNF_LOCK:
        hit = _SNF_CACHE.get(key)
    if hit is not None:
        return hit
    mat = boundary_matrix(R, n, variant, budget)
    snf = smith_normal_form(mat.T if transpose else mat, budget)
    with _SNF_LOCK:
        return _SNF_CACHE.setdefault(key, snf)


def _check_composite(R: YBMap, n: int, variant: Variant, budget: Budget) -> None:
    d_n = boundary_matrix(R, n, variant, budget)
    d_next = boundary_matrix(R, n + 1, variant, budget)
    if not (d_n @ d_next).is_zero():
        raise AssertionError(f"boundary composite nonzero in degree {n} ({variant.value})")


def compute_homology(B, n: int, variant="YB", coeff="Z", budget: Budget = DEFAULT_BUDGET) -> HomologyReport:
    """H_n of the chosen complex with coefficients Z, Q or F_p."""
    R = as_map(B)
    variant = Variant.parse(variant)
    coeff = parse_coefficients(coeff)
    if n < 1:
        raise ValueError("degree must be at least 1")
    start = time.perf_counter()
    d_n = boundary_matrix(R, n, variant, budget)
    d_next = boundary_matrix(R, n + 1, variant, budget)
    _check_composite(R, n, variant, budget)
    dim = d_n.cols
    if coeff == "Z":
        rank_n = _smith(R, n, variant, budget).rank if n > 1 else 0
        snf = _smith(R, n + 1, variant, budget)
        free, torsion = dim - rank_n - snf.rank, snf.torsion
    else:
        field_ = _field_of(coeff)
        free = dim - boundary_rank(R, n, variant, field_, budget) - boundary_rank(R, n + 1, variant, field_, budget)
        torsion = ()
    elapsed = (time.perf_counter() - start) * 1000
    return HomologyReport(R.m, n, variant.value, coeff, free, tuple(torsion), elapsed, (d_n.shape, d_next.shape))


def compute_cohomology(B, n: int, variant="YB", coeff="Z", budget: Budget = DEFAULT_BUDGET) -> HomologyReport:
    """H^n from the transposed boundaries.

    Over Z the result is checked against Free(H_n) + Tor(H_{n-1}); a
    mismatch means an engine bug and raises AssertionError.
    """
    R = as_map(B)
    variant = Variant.parse(variant)
    coeff = parse_coefficients(coeff)
    if n < 1:
        raise ValueError("degree must be at least 1")
    start = time.perf_counter()
    d_n = boundary_matrix(R, n, variant, budget)
    d_next = boundary_matrix(R, n + 1, variant, budget)
    _check_composite(R, n, variant, budget)
    dim = d_n.cols
    if coeff == "Z":
        # delta^{n-1} = d_n^T, delta^n = d_{n+1}^T
        before = _smith(R, n, variant, budget, transpose=True) if n > 1 else SmithForm((), (dim, 0))
        after = _smith(R, n + 1, variant, budget, transpose=True)
        free, torsion = dim - before.rank - after.rank, before.torsion
        h_n = compute_homology(R, n, variant, "Z", budget).group
        h_prev = compute_homology(R, n - 1, variant, "Z", budget).group if n > 1 else AbelianGroup()
        uct = h_n.free_part() + h_prev.torsion_part()
        if uct != AbelianGroup(free, torsion):
            raise AssertionError(
                f"universal coefficient check failed in degree {n}: {AbelianGroup(free, torsion)} vs {uct}"
            )
    else:
        field_ = _field_of(coeff)
        free = dim - boundary_rank(R, n, variant, field_, budget) - boundary_rank(R, n + 1, variant, field_, budget)
        torsion = ()
    elapsed = (time.perf_counter() - start) * 1000
    return HomologyReport(
        R.m, n, variant.value, coeff, free, tuple(torsion), elapsed,
        (d_n.T.shape, d_next.T.shape), kind="cohomology",
    )


# ---------------------------------------------------------------------------
# cochains


@dataclass(frozen=True)
class Cochain:
    """Function on n-tuples over {0..m-1}; absent codes are zero."""

    m: int
    n: int
    values: dict = field(default_factory=dict)
    ring: str = "Z"

    def __post_init__(self):
        if self.ring not in ("Z", "Q"):
            raise ValueError(f"ring must be Z or Q, not {self.ring!r}")
        size = self.m**self.n
        cast = int if self.ring == "Z" else Fraction
        clean = {}
        for code, v in self.values.items():
            code = int(code)
            if not 0 <= code < size:
                raise ValueError(f"code {code} outside [0, {size})")
            if self.ring == "Z" and Fraction(v).denominator != 1:
                raise ValueError(f"non-integral value {v} in a Z-cochain")
            if v:
                clean[code] = cast(v)
        object.__setattr__(self, "values", clean)

    @classmethod
    def zero(cls, m: int, n: int, ring: str = "Z") -> "Cochain":
        return cls(m, n, {}, ring)

    @classmethod
    def indicator(cls, m: int, t: Sequence[int], ring: str = "Z") -> "Cochain":
        """The dual basis element e_t."""
        return cls(m, len(t), {encode(t, m): 1}, ring)

    @classmethod
    def from_function(cls, m: int, n: int, fn: Callable, ring: str = "Z") -> "Cochain":
        return cls(m, n, {code: fn(decode(code, m, n)) for code in range(m**n)}, ring)

    @classmethod
    def from_vector(cls, m: int, n: int, vec: Iterable, ring: str = "Z") -> "Cochain":
        return cls(m, n, dict(enumerate(vec)), ring)

    def __call__(self, t: Sequence[int]):
        return self.values.get(encode(t, self.m), 0)

    def vector(self) -> list:
        out = [0] * (self.m**self.n)
        for code, v in self.values.items():
            out[code] = v
        return out

    def to_rational(self) -> "Cochain":
        return Cochain(self.m, self.n, self.values, "Q")

    def is_zero(self) -> bool:
        return not self.values

    def _check(self, other: "Cochain"):
        if (self.m, self.n) != (other.m, other.n):
            raise ValueError("cochains of different shape")
        return "Q" if "Q" in (self.ring, other.ring) else "Z"

    def __add__(self, other: "Cochain") -> "Cochain":
        ring = self._check(other)
        vals = dict(self.values)
        for k, v in other.values.items():
            vals[k] = vals.get(k, 0) + v
        return Cochain(self.m, self.n, vals, ring)

    def __neg__(self) -> "Cochain":
        return Cochain(self.m, self.n, {k: -v for k, v in self.values.items()}, self.ring)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def scale(self, c) -> "Cochain":
        ring = self.ring if isinstance(c, int) else "Q"
        return Cochain(self.m, self.n, {k: v * c for k, v in self.values.items()}, ring)

    def __rmul__(self, c) -> "Cochain":
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.m, self.n) == (other.m, other.n) and self.values == other.values

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "ring": self.ring,
            "values": {str(k): (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(self.values.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "Cochain":
        ring = data.get("ring", "Z")
        cast = int if ring == "Z" else Fraction
        return cls(data["m"], data["n"], {int(k): cast(v) for k, v in data["values"].items()}, ring)


def coboundary(B, f: Cochain, budget: Budget = DEFAULT_BUDGET) -> Cochain:
    """delta f, an (n+1)-cochain on the full YB complex."""
    R = as_map(B)
    if f.m != R.m:
        raise ValueError("cochain and operator live on different sets")
    d = boundary_matrix(R, f.n + 1, "YB", budget)
    out = d.T @ f.vector() if f.ring == "Z" else _apply_transpose_rational(d, f.vector())
    return Cochain.from_vector(R.m, f.n + 1, out, f.ring)


def _apply_transpose_rational(d: SparseIntMatrix, vec: list) -> list:
    out = [Fraction(0)] * d.cols
    for i, j, x in zip(d.row_idx.tolist(), d.col_idx.tolist(), d.values.tolist()):
        out[j] += x * vec[i]
    return out


def act_on_cochain(B, f: Cochain, y: int) -> Cochain:
    """(f . y)(t) = f(last left face of (t, y))."""
    R = as_map(B)
    if f.m != R.m:
        raise ValueError("cochain and operator live on different sets")
    if f.is_zero():
        return Cochain.zero(f.m, f.n, f.ring)
    vals = {}
    for code in range(f.m**f.n):
        t = decode(code, f.m, f.n)
        v = f(face_left(R, f.n + 1, t + (y,)))
        if v:
            vals[code] = v
    return Cochain(f.m, f.n, vals, f.ring)


def _shift(t, i, m):
    return tuple((x - i) % m for x in t)


def averaging_projector(m: int, f: Cochain) -> Cochain:
    """(f P)(x) = (1/m) sum_i f(x_1 - i, ..., x_n - i), over Q."""
    if f.ring != "Q":
        raise ValueError("the averaging projector divides by m; use a Q-cochain")
    if f.m != m:
        raise ValueError("cochain lives on a different set")
    vals = {}
    for code in range(m**f.n):
        t = decode(code, m, f.n)
        total = sum((f(_shift(t, i, m)) for i in range(m)), Fraction(0))
        if total:
            vals[code] = total / m
    return Cochain(m, f.n, vals, "Q")


def orbit_cocycle(m: int, n: int, rep: Sequence[int]) -> Cochain:
    """Indicator of the diagonal orbit {(x_1 - i, ..., x_n - i)} of ``rep``."""
    if len(rep) != n:
        raise ValueError(f"representative has length {len(rep)}, expected {n}")
    return Cochain(m, n, {encode(_shift(rep, i, m), m): 1 for i in range(m)})


def cocycle_basis(m: int, n: int) -> list[Cochain]:
    """One orbit indicator per diagonal orbit; representatives end in 0."""
    return [orbit_cocycle(m, n, decode(code, m, n - 1) + (0,)) for code in range(m ** (n - 1))]


def orbit_representative(t: Sequence[int], m: int) -> tuple[int, ...]:
    return _shift(t, t[-1], m)


def is_coboundary(B, n: int, h: Cochain, ring: str = "Q", budget: Budget = DEFAULT_BUDGET):
    """An (n-1)-cochain g with delta g = h, or None.

    ``h`` must be a cocycle.  In degree 1 the only coboundary is 0 since
    C^0 = 0.
    """
    R = as_map(B)
    if h.n != n:
        raise ValueError(f"cochain has degree {h.n}, expected {n}")
    if not coboundary(R, h, budget).is_zero():
        raise PreconditionError("input is not a cocycle")
    ring = ring.upper()
    if n == 1:
        return Cochain.zero(R.m, 0, ring) if h.is_zero() else None
    d = boundary_matrix(R, n, "YB", budget)
    x = solve(d.T, h.vector(), ring, budget)
    if x is None:
        return None
    return Cochain.from_vector(R.m, n - 1, x, ring)


def restrict_last(f: Cochain, y: int) -> Cochain:
    """f_y(x_1, ..., x_{n-1}) = f(x_1, ..., x_{n-1}, y)."""
    m = f.m
    return Cochain(m, f.n - 1, {code: f.values.get(code * m + y, 0) for code in range(m ** (f.n - 1))}, f.ring)


def delta_y(B, f: Cochain, y: int) -> Cochain:
    """sum_i (-1)^i (f_y - f_{y+1}) composed with the right face d^r_i, in degree n."""
    R = as_map(B)
    m, n = f.m, f.n
    if n < 2 or f.is_zero():
        return Cochain.zero(m, n, f.ring)
    diff = restrict_last(f, y) - restrict_last(f, (y + 1) % m)
    vals = {}
    for code in range(m**n):
        t = decode(code, m, n)
        total = 0
        for i in range(1, n + 1):
            total += (-1) ** i * diff(face_right(R, i, t))
        if total:
            vals[code] = total
    return Cochain(m, n, vals, f.ring)


def integral_cocycle_basis(B, n: int, budget: Budget = DEFAULT_BUDGET) -> list[Cochain]:
    """A Z-basis of the n-cocycles of the YB complex."""
    R = as_map(B)
    d = boundary_matrix(R, n + 1, "YB", budget)
    return [Cochain.from_vector(R.m, n, v) for v in kernel_basis(d.T, budget)]


# ---------------------------------------------------------------------------
# verifiers


@dataclass(frozen=True)
class VerificationReport:
    check: str
    m: int
    n: int
    passed: bool
    expected: object = None
    computed: object = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "m": self.m,
            "n": self.n,
            "passed": self.passed,
            "expected": _jsonable(self.expected),
            "computed": _jsonable(self.computed),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(x):
    if isinstance(x, AbelianGroup):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _cyclic(m: int):
    from .biquandle import make_cyclic

    return make_cyclic(m)


def verify_betti(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """Rational ranks of H_n for YB, D and NYB against the closed forms."""
    B = _cyclic(m)
    expected = {"YB": m ** (n - 1), "D": m ** (n - 1) - (m - 1) ** (n - 1), "NYB": (m - 1) ** (n - 1)}
    computed = {v: compute_homology(B, n, v, "Q", budget).free_rank for v in expected}
    return VerificationReport("betti", m, n, computed == expected, expected, computed)


def verify_torsion_bound(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """Every torsion coefficient divides m (m odd) or 2m (m even), all variants."""
    B = _cyclic(m)
    bound = m if m % 2 else 2 * m
    factors = {v: list(compute_homology(B, n, v, "Z", budget).torsion) for v in ("YB", "D", "NYB")}
    ok = all(bound % d == 0 for fs in factors.values() for d in fs)
    return VerificationReport("torsion", m, n, ok, bound, factors)


def conjectured_normalized(m: int, n: int) -> AbelianGroup:
    return AbelianGroup((m - 1) ** (n - 1), (m,) if n % 2 else ())


def verify_conjecture(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """Compare the computed normalized homology with the conjectured group."""
    expected = conjectured_normalized(m, n)
    computed = compute_homology(_cyclic(m), n, "NYB", "Z", budget).group
    return VerificationReport("conjecture", m, n, computed == expected, expected, computed)


def verify_splitting(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """H^YB_n is isomorphic to H^D_n + H^NYB_n."""
    B = _cyclic(m)
    groups = {v: compute_homology(B, n, v, "Z", budget).group for v in ("YB", "D", "NYB")}
    total = groups["D"] + groups["NYB"]
    return VerificationReport("splitting", m, n, groups["YB"] == total, total, groups["YB"], {"parts": groups})


def _action_matrix(R: YBMap, n: int, y: int) -> sp.csr_matrix:
    """Matrix A with (f . y) = A f on coefficient vectors of n-cochains."""
    m = R.m
    size = m**n
    targets = np.array([encode(face_left(R, n + 1, decode(c, m, n) + (y,)), m) for c in range(size)])
    return sp.csr_matrix((np.ones(size, dtype=np.int64), (np.arange(size), targets)), shape=(size, size))


def verify_equivariance(B, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """delta(f . y) = (delta f) . y on every dual basis element and every y."""
    R = as_map(B)
    if not check_property_I(R):
        raise PreconditionError("operator does not satisfy property (I)")
    d = boundary_matrix(R, n + 1, "YB", budget)
    delta = sp.csr_matrix((d.values.astype(np.int64), (d.col_idx, d.row_idx)), shape=(d.cols, d.rows))
    bad = []
    for y in range(R.m):
        lhs = delta @ _action_matrix(R, n, y)
        rhs = _action_matrix(R, n + 1, y) @ delta
        if (lhs != rhs).nnz:
            bad.append(y)
    return VerificationReport("equivariance", R.m, n, not bad, [], bad)


def verify_cocycle_basis(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """Orbit indicators are integral cocycles independent modulo rational coboundaries."""
    B = _cyclic(m)
    basis = cocycle_basis(m, n)
    cocycles = all(coboundary(B, F, budget).is_zero() for F in basis)
    d = boundary_matrix(B, n, "YB", budget)  # columns of d.T span the coboundaries
    image = d.T
    augmented = SparseIntMatrix.from_entries(
        m**n,
        image.cols + len(basis),
        list(zip(image.row_idx.tolist(), image.col_idx.tolist(), image.values.tolist()))
        + [(code, image.cols + k, v) for k, F in enumerate(basis) for code, v in F.values.items()],
    )
    base_rank = boundary_rank(B, n, "YB", "Q", budget) if n > 1 else 0
    from .intlinalg import rank as matrix_rank

    gain = matrix_rank(augmented, "Q", budget) - base_rank
    ok = cocycles and len(basis) == m ** (n - 1) and gain == len(basis)
    return VerificationReport(
        "cocycle_basis", m, n, ok, m ** (n - 1), gain, {"count": len(basis), "all_cocycles": cocycles}
    )


def verify_proof_identities(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """For a Z-basis of n-cocycles f and every y, check two integral coboundaries:

    delta_y(f) - (-1)^n (f.y - f) and m (f.y - f).
    """
    B = _cyclic(m)
    failures = []
    witnesses = 0
    for f in integral_cocycle_basis(B, n, budget):
        for y in range(m):
            moved = act_on_cochain(B, f, y) - f
            first = delta_y(B, f, y) - moved.scale((-1) ** n)
            second = moved.scale(m)
            for label, h in (("delta_y", first), ("m_action", second)):
                g = is_coboundary(B, n, h, "Z", budget)
                if g is None or coboundary(B, g, budget) != h:
                    failures.append((label, y))
                else:
                    witnesses += 1
    return VerificationReport("proof_identities", m, n, not failures, 0, len(failures), {"witnesses": witnesses})


def verify_averaging_lemma(m: int, n: int, budget: Budget = DEFAULT_BUDGET) -> VerificationReport:
    """(1/m) sum_y f.y - f is a rational coboundary for every integral cocycle f."""
    B = _cyclic(m)
    failures = 0
    for f in integral_cocycle_basis(B, n, budget):
        avg = Cochain.zero(m, n, "Q")
        for y in range(m):
            avg = avg + act_on_cochain(B, f, y).to_rational()
        h = avg.scale(Fraction(1, m)) - f.to_rational()
        if is_coboundary(B, n, h, "Q", budget) is None:
            failures += 1
    return VerificationReport("averaging_lemma", m, n, failures == 0, 0, failures)


def require_biquandle_input(B):
    from .biquandle import Biquandle

    if not isinstance(B, Biquandle):
        raise BiquandleError("this check needs a certified biquandle")
    return B
