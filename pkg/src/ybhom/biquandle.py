"""Finite set-theoretic Yang-Baxter operators and biquandles.

A map is stored as two m x m tables, ``r1[a][b]`` and ``r2[a][b]``, so that
R(a, b) = (r1[a][b], r2[a][b]) on X = {0, ..., m-1}.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .intlinalg import AbelianGroup, SparseIntMatrix, smith_normal_form

__all__ = [
    "AxiomError",
    "Biquandle",
    "BiquandleError",
    "Certification",
    "CompatibilityError",
    "Presentation",
    "TableShapeError",
    "UnitConditionError",
    "YBMap",
    "abelianization",
    "certify",
    "check_axioms",
    "check_property_I",
    "check_property_I_bounded",
    "check_yang_baxter",
    "find_yang_baxter_violation",
    "from_tables",
    "load_map",
    "make_alexander",
    "make_cyclic",
    "parse_spec",
    "property_I_classes",
    "search_yb_operators",
    "structure_group_presentation",
    "translation_symmetry",
]


class BiquandleError(ValueError):
    """Invalid operator data or failed construction."""


class UnitConditionError(BiquandleError):
    pass


class CompatibilityError(BiquandleError):
    pass


class TableShapeError(BiquandleError):
    pass


class AxiomError(BiquandleError):
    """Raised by :func:`certify`; carries the full axiom record."""

    def __init__(self, certification: "Certification"):
        self.certification = certification
        name, witness = certification.first_failure()
        super().__init__(f"axiom {name!r} fails at {witness}")


@dataclass(frozen=True)
class YBMap:
    """A map R on X x X given by its two component tables."""

    m: int
    r1: tuple[tuple[int, ...], ...]
    r2: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.m < 1:
            raise TableShapeError("set size must be positive")
        for name, table in (("R1", self.r1), ("R2", self.r2)):
            if len(table) != self.m or any(len(row) != self.m for row in table):
                raise TableShapeError(f"{name} must be {self.m}x{self.m}")
            for a, row in enumerate(table):
                for b, x in enumerate(row):
                    if not 0 <= x < self.m:
                        raise TableShapeError(f"{name}[{a}][{b}] = {x} is outside 0..{self.m - 1}")

    def __call__(self, a: int, b: int) -> tuple[int, int]:
        return self.r1[a][b], self.r2[a][b]

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """The tables as read-only int64 arrays, for vectorized lookups."""
        a1 = np.array(self.r1, dtype=np.int64).reshape(self.m, self.m)
        a2 = np.array(self.r2, dtype=np.int64).reshape(self.m, self.m)
        a1.setflags(write=False)
        a2.setflags(write=False)
        return a1, a2

    @cached_property
    def fingerprint(self) -> str:
        payload = json.dumps([self.m, self.r1, self.r2]).encode()
        return hashlib.sha256(payload).hexdigest()[:16]

    @cached_property
    def fixed_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((a, b) for a in range(self.m) for b in range(self.m) if self(a, b) == (a, b))

    def to_json(self) -> dict:
        return {"m": self.m, "R1": [list(r) for r in self.r1], "R2": [list(r) for r in self.r2]}


def from_tables(m: int, r1, r2) -> YBMap:
    """Build a :class:`YBMap` from nested sequences, checking dimensions."""
    try:
        t1 = tuple(tuple(int(x) for x in row) for row in r1)
        t2 = tuple(tuple(int(x) for x in row) for row in r2)
    except TypeError as exc:
        raise TableShapeError(f"tables must be nested integer lists: {exc}") from None
    return YBMap(int(m), t1, t2)


# ---------------------------------------------------------------------------
# axioms


def _apply_left(R: YBMap, t):
    a, b, c = t
    a, b = R(a, b)
    return a, b, c


def _apply_right(R: YBMap, t):
    a, b, c = t
    b, c = R(b, c)
    return a, b, c


def find_yang_baxter_violation(R: YBMap):
    """First triple on which the two sides of the braid relation differ."""
    for t in itertools.product(range(R.m), repeat=3):
        lhs = _apply_left(R, _apply_right(R, _apply_left(R, t)))
        rhs = _apply_right(R, _apply_left(R, _apply_right(R, t)))
        if lhs != rhs:
            return t
    return None


def check_yang_baxter(R: YBMap) -> bool:
    return find_yang_baxter_violation(R) is None


@dataclass(frozen=True)
class Certification:
    """Verdict for each axiom, with a witness for every failure."""

    yang_baxter: bool
    invertible: bool
    left_invertible: bool
    right_invertible: bool
    diagonal: bool
    witnesses: dict = field(default_factory=dict, compare=False)

    ORDER = ("yang_baxter", "invertible", "left_invertible", "right_invertible", "diagonal")

    @property
    def is_yb_operator(self) -> bool:
        return self.yang_baxter and self.invertible

    @property
    def is_birack(self) -> bool:
        return self.is_yb_operator and self.left_invertible and self.right_invertible

    @property
    def is_biquandle(self) -> bool:
        return self.is_birack and self.diagonal

    def first_failure(self):
        for name in self.ORDER:
            if not getattr(self, name):
                return name, self.witnesses.get(name)
        return None, None

    def as_dict(self) -> dict:
        out = {name: getattr(self, name) for name in self.ORDER}
        out["witnesses"] = {k: list(v) if isinstance(v, tuple) else v for k, v in self.witnesses.items()}
        return out


def check_axioms(R: YBMap) -> Certification:
    m = R.m
    witnesses = {}

    ybe = find_yang_baxter_violation(R)
    if ybe is not None:
        witnesses["yang_baxter"] = ybe

    seen = {}
    invertible = True
    for a in range(m):
        for b in range(m):
            img = R(a, b)
            if img in seen:
                invertible = False
                witnesses["invertible"] = (seen[img], (a, b))
                break
            seen[img] = (a, b)
        if not invertible:
            break

    left = True
    for a in range(m):
        if len({R.r1[a][b] for b in range(m)}) != m:
            left = False
            witnesses["left_invertible"] = (a,)
            break

    right = True
    for b in range(m):
        if len({R.r2[a][b] for a in range(m)}) != m:
            right = False
            witnesses["right_invertible"] = (b,)
            break

    diagonal = True
    for a in range(m):
        fixed = [b for b in range(m) if R(a, b) == (a, b)]
        if len(fixed) != 1:
            diagonal = False
            witnesses["diagonal"] = (a, tuple(fixed))
            break

    return Certification(ybe is None, invertible, left, right, diagonal, witnesses)


@dataclass(frozen=True)
class Biquandle:
    """A :class:`YBMap` that passed every biquandle axiom."""

    map: YBMap
    certified: Certification

    @property
    def m(self) -> int:
        return self.map.m

    def __call__(self, a, b):
        return self.map(a, b)

    def fixed_partner(self, a: int) -> int:
        """The unique b with R(a, b) = (a, b)."""
        return next(b for b in range(self.m) if self.map(a, b) == (a, b))


def certify(R: YBMap) -> Biquandle:
    cert = check_axioms(R)
    if not cert.is_biquandle:
        raise AxiomError(cert)
    return Biquandle(R, cert)


# ---------------------------------------------------------------------------
# families


def make_cyclic(m: int) -> Biquandle:
    """The cyclic biquandle on Z/m: R(a, b) = (b + 1, a - 1)."""
    if m < 1:
        raise BiquandleError("m must be positive")
    r1 = [[(b + 1) % m for b in range(m)] for a in range(m)]
    r2 = [[(a - 1) % m for b in range(m)] for a in range(m)]
    return certify(from_tables(m, r1, r2))


def make_alexander(m: int, s: int, t: int) -> Biquandle:
    """Alexander biquandle on Z/m: R(x, y) = ((1-s)x + sy, tx + (1-t)y)."""
    if m < 1:
        raise BiquandleError("m must be positive")
    s, t = s % m, t % m
    for name, u in (("s", s), ("t", t)):
        if math.gcd(u, m) != 1:
            raise UnitConditionError(f"{name}={u} is not a unit modulo {m}")
    if (1 - s) * (1 - t) % m:
        raise CompatibilityError(f"(1-s)(1-t) = {(1 - s) * (1 - t)} is not 0 modulo {m}")
    r1 = [[((1 - s) * x + s * y) % m for y in range(m)] for x in range(m)]
    r2 = [[(t * x + (1 - t) * y) % m for y in range(m)] for x in range(m)]
    return certify(from_tables(m, r1, r2))


def alexander_parameters(m: int):
    """All (s, t) in [0, m) giving a valid Alexander biquandle."""
    return [
        (s, t)
        for s in range(m)
        for t in range(m)
        if math.gcd(s, m) == 1 and math.gcd(t, m) == 1 and (1 - s) * (1 - t) % m == 0
    ]


def parse_spec(spec: str):
    """Resolve ``cyclic:<m>``, ``alexander:<m>:<s>:<t>`` or a JSON file path.

    Builtins come back as a :class:`Biquandle`; files come back as a
    :class:`YBMap` so that non-biquandle operators can still be studied.
    """
    kind, _, rest = spec.partition(":")
    if kind == "cyclic" and rest:
        try:
            return make_cyclic(int(rest))
        except ValueError as exc:
            raise BiquandleError(f"bad cyclic spec {spec!r}: {exc}") from None
    if kind == "alexander" and rest:
        parts = rest.split(":")
        if len(parts) != 3:
            raise BiquandleError(f"expected alexander:<m>:<s>:<t>, got {spec!r}")
        try:
            m, s, t = (int(x) for x in parts)
        except ValueError:
            raise BiquandleError(f"non-integer parameter in {spec!r}") from None
        return make_alexander(m, s, t)
    path = Path(spec)
    if not path.exists():
        raise BiquandleError(f"unknown biquandle spec {spec!r} (not a builtin, no such file)")
    return load_map(path)


def load_map(path) -> YBMap:
    try:
        data = json.loads(Path(path).read_text())
        return from_tables(data["m"], data["R1"], data["R2"])
    except (KeyError, json.JSONDecodeError) as exc:
        raise BiquandleError(f"{path}: not a biquandle file ({exc})") from None


def as_map(obj) -> YBMap:
    return obj.map if isinstance(obj, Biquandle) else obj


# ---------------------------------------------------------------------------
# property (I)


def property_I_classes(R: YBMap) -> list[int]:
    """Coarsest partition of X with y ~ y' => R2(x,y) = R2(x,y') and R1(x,y) ~ R1(x,y').

    Two elements are in the same class exactly when they act identically on
    cochains of every degree.  Returns a class label per element.
    """
    m = R.m
    sig = [tuple(R.r2[x][y] for x in range(m)) for y in range(m)]
    labels = _relabel(sig)
    while True:
        sig = [(labels[y],) + tuple(labels[R.r1[x][y]] for x in range(m)) for y in range(m)]
        new = _relabel(sig)
        if len(set(new)) == len(set(labels)):
            return new
        labels = new


def _relabel(signatures) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(s, len(ids)) for s in signatures]


def check_property_I(R: YBMap) -> bool:
    R = as_map(R)
    cls = property_I_classes(R)
    return all(cls[y] == cls[R.r1[a][y]] for a in range(R.m) for y in range(R.m))


def _action_tuple(R: YBMap, t, y):
    """Tuple part of the last left face applied to (t, y)."""
    out = list(t)
    c = y
    for j in range(len(t) - 1, -1, -1):
        out[j] = R.r2[t[j]][c]
        c = R.r1[t[j]][c]
    return tuple(out)


def check_property_I_bounded(R: YBMap, max_degree: int = 4) -> bool:
    """Compare the actions of y and R1(a, y) tuple by tuple for degrees <= max_degree."""
    R = as_map(R)
    m = R.m
    for n in range(1, max_degree + 1):
        tuples = list(itertools.product(range(m), repeat=n))
        phi = {y: [_action_tuple(R, t, y) for t in tuples] for y in range(m)}
        for a in range(m):
            for y in range(m):
                if phi[y] != phi[R.r1[a][y]]:
                    return False
    return True


# ---------------------------------------------------------------------------
# structure group


@dataclass(frozen=True)
class Presentation:
    """Group presentation; relations are pairs of words over generator indices."""

    generator_count: int
    relations: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def trivial(self) -> tuple[bool, ...]:
        return tuple(lhs == rhs for lhs, rhs in self.relations)

    def nontrivial_relations(self):
        return [rel for rel, triv in zip(self.relations, self.trivial) if not triv]

    def relation_matrix(self) -> SparseIntMatrix:
        """Exponent-difference matrix, one row per relation (trivial rows kept)."""
        triples = []
        for i, (lhs, rhs) in enumerate(self.relations):
            for g in lhs:
                triples.append((i, g, 1))
            for g in rhs:
                triples.append((i, g, -1))
        return SparseIntMatrix.from_entries(len(self.relations), self.generator_count, triples)


def structure_group_presentation(B) -> Presentation:
    R = as_map(B)
    rels = tuple(((a, b), R(a, b)) for a in range(R.m) for b in range(R.m))
    return Presentation(R.m, rels)


def abelianization(P: Presentation) -> AbelianGroup:
    snf = smith_normal_form(P.relation_matrix())
    return AbelianGroup(P.generator_count - snf.rank, snf.torsion)


# ---------------------------------------------------------------------------
# symmetry and search


def is_automorphism(R: YBMap, perm) -> bool:
    m = R.m
    return all(
        R(perm[a], perm[b]) == (perm[R.r1[a][b]], perm[R.r2[a][b]]) for a in range(m) for b in range(m)
    )


def translation_symmetry(R) -> tuple[int, ...] | None:
    """x -> x+1 (mod m) if it is an automorphism of R and m > 1."""
    R = as_map(R)
    if R.m < 2:
        return None
    perm = tuple((x + 1) % R.m for x in range(R.m))
    return perm if is_automorphism(R, perm) else None


def _random_candidate(rng: random.Random, m: int) -> YBMap:
    kind = rng.randrange(4)
    perm = lambda: rng.sample(range(m), m)  # noqa: E731
    if kind == 0:
        # R(x, y) = (f(y), g(x))
        f, g = perm(), perm()
        r1 = [[f[y] for y in range(m)] for x in range(m)]
        r2 = [[g[x] for y in range(m)] for x in range(m)]
    elif kind == 1:
        # R(x, y) = (y, s_y(x)) with random right translations
        s = [perm() for _ in range(m)]
        r1 = [[y for y in range(m)] for x in range(m)]
        r2 = [[s[y][x] for y in range(m)] for x in range(m)]
    elif kind == 2:
        # R(x, y) = (s_x(y), x)
        s = [perm() for _ in range(m)]
        r1 = [[s[x][y] for y in range(m)] for x in range(m)]
        r2 = [[x for y in range(m)] for x in range(m)]
    else:
        r1 = [[rng.randrange(m) for _ in range(m)] for _ in range(m)]
        r2 = [[rng.randrange(m) for _ in range(m)] for _ in range(m)]
    return from_tables(m, r1, r2)


def search_yb_operators(count: int, max_size: int = 3, seed: int = 0, max_tries: int = 200_000) -> list[YBMap]:
    """Randomly search for distinct invertible YB operators on sets of size <= max_size."""
    rng = random.Random(seed)
    found: dict[str, YBMap] = {}
    for _ in range(max_tries):
        if len(found) >= count:
            break
        R = _random_candidate(rng, rng.randint(2, max_size))
        if R.fingerprint in found:
            continue
        if check_axioms(R).is_yb_operator:
            found[R.fingerprint] = R
    if len(found) < count:
        raise BiquandleError(f"found only {len(found)} operators after {max_tries} tries")
    return list(found.values())
