"""Reference homology groups of the cyclic biquandles C_2 .. C_5 in degrees 1 .. 5."""

from __future__ import annotations

from dataclasses import dataclass

from .intlinalg import AbelianGroup

VARIANTS = ("YB", "D", "NYB")
SIZES = (2, 3, 4, 5)
DEGREES = (1, 2, 3, 4, 5)

_ROWS = {
    (2, "YB"): ("Z + Z_2", "Z^2", "Z^4 + Z_2", "Z^8", "Z^16 + Z_2"),
    (2, "D"): ("0", "Z", "Z^3", "Z^7", "Z^15"),
    (2, "NYB"): ("Z + Z_2", "Z", "Z + Z_2", "Z", "Z + Z_2"),
    (3, "YB"): ("Z + Z_3", "Z^3", "Z^9 + Z_3", "Z^27", "Z^81 + Z_3"),
    (3, "D"): ("0", "Z", "Z^5", "Z^19", "Z^65"),
    (3, "NYB"): ("Z + Z_3", "Z^2", "Z^4 + Z_3", "Z^8", "Z^16 + Z_3"),
    (4, "YB"): ("Z + Z_4", "Z^4", "Z^16 + Z_4", "Z^64", "Z^256 + Z_4"),
    (4, "D"): ("0", "Z", "Z^7", "Z^37", "Z^175"),
    (4, "NYB"): ("Z + Z_4", "Z^3", "Z^9 + Z_4", "Z^27", "Z^81 + Z_4"),
    (5, "YB"): ("Z + Z_5", "Z^5", "Z^25 + Z_5", "Z^125", "Z^625 + Z_5"),
    (5, "D"): ("0", "Z", "Z^9", "Z^61", "Z^369"),
    (5, "NYB"): ("Z + Z_5", "Z^4", "Z^16 + Z_5", "Z^64", "Z^256 + Z_5"),
}

EXPECTED: dict[tuple[int, int, str], AbelianGroup] = {
    (m, n, v): AbelianGroup.parse(row[n - 1]) for (m, v), row in _ROWS.items() for n in DEGREES
}


def cell_key(cell: tuple[int, int, str]):
    m, n, v = cell
    return (m, n, VARIANTS.index(v))


def cells(subset: str | None = None) -> list[tuple[int, int, str]]:
    """All (m, n, variant) cells in canonical order, optionally one row block like ``C_3``."""
    sizes = SIZES
    if subset:
        text = subset.strip().upper().replace("C_", "").replace("C", "")
        try:
            size = int(text)
        except ValueError:
            raise ValueError(f"bad subset {subset!r}; expected C_<m>") from None
        if size not in SIZES:
            raise ValueError(f"subset {subset!r} is not in the table (C_2 .. C_5)")
        sizes = (size,)
    return sorted(((m, n, v) for m in sizes for n in DEGREES for v in VARIANTS), key=cell_key)


@dataclass(frozen=True)
class CellResult:
    m: int
    n: int
    variant: str
    expected: AbelianGroup
    computed: AbelianGroup

    @property
    def match(self) -> bool:
        return self.expected == self.computed
