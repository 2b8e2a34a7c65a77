"""
Degrees in Z_2^n, the scalar-product sign rule, and realization of
arbitrary symmetric sign tables as Z_2^n-gradings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidSignTable, ParseError


class Ordering(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


@dataclass(frozen=True, order=True)
class DegreeVector:
    """An element of Z_2^n, stored as a tuple of bits.

    The dataclass ordering is the lexicographic order on the bits.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"degree bits must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def zero(cls, n: int) -> DegreeVector:
        return cls((0,) * n)

    @classmethod
    def of(cls, *bits: int) -> DegreeVector:
        return cls(tuple(bits))

    @property
    def n(self) -> int:
        return len(self.bits)

    def is_zero(self) -> bool:
        return not any(self.bits)

    def __add__(self, other: DegreeVector) -> DegreeVector:
        _check_length(self, other)
        return DegreeVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    __sub__ = __add__

    def __neg__(self) -> DegreeVector:
        return self

    def __iter__(self):
        return iter(self.bits)

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "(" + ",".join(map(str, self.bits)) + ")"


def _check_length(d1: DegreeVector, d2: DegreeVector) -> None:
    if len(d1.bits) != len(d2.bits):
        raise ValueError(f"degree length mismatch: {d1} vs {d2}")


def scalar_product(d1: DegreeVector, d2: DegreeVector) -> int:
    _check_length(d1, d2)
    return sum(a & b for a, b in zip(d1.bits, d2.bits)) & 1


def parity(d: DegreeVector) -> int:
    return sum(d.bits) & 1


def commutation_sign(d1: DegreeVector, d2: DegreeVector) -> int:
    """Sign picked up when swapping homogeneous elements of degrees d1 and d2."""
    return -1 if scalar_product(d1, d2) else 1


def lex_order(d1: DegreeVector, d2: DegreeVector) -> Ordering:
    _check_length(d1, d2)
    if d1.bits < d2.bits:
        return Ordering.LT
    if d1.bits > d2.bits:
        return Ordering.GT
    return Ordering.EQ


def nonzero_degrees(n: int) -> list[DegreeVector]:
    """All nonzero elements of Z_2^n in lexicographic order."""
    out = []
    for k in range(1, 2**n):
        out.append(DegreeVector(tuple((k >> (n - 1 - t)) & 1 for t in range(n))))
    return out


def compare_conventions(bideg1: tuple[int, int], bideg2: tuple[int, int]) -> tuple[int, int, int]:
    """Signs for swapping two bidegree-(m, n) and (k, l) coordinates.

    Returns the usual rule (-1)^(mk), the reversed-parity rule
    (-1)^((m+n)(k+l)) and Deligne's rule (-1)^(mk+nl), in that order.
    """
    (m, n), (k, l) = bideg1, bideg2

    def sign(e):
        return -1 if e % 2 else 1

    return sign(m * k), sign((m + n) * (k + l)), sign(m * k + n * l)


class SignTable:
    """A finite table of signs indexed by 1..m.

    Construction does not validate; use :func:`validate_commutation_factor`.
    """

    def __init__(self, entries: Sequence[Sequence[int]]):
        self.entries = tuple(tuple(row) for row in entries)

    @property
    def size(self) -> int:
        return len(self.entries)

    def __call__(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]

    @classmethod
    def from_function(cls, m: int, func) -> SignTable:
        return cls([[func(i, j) for j in range(1, m + 1)] for i in range(1, m + 1)])

    @classmethod
    def from_upper(cls, m: int, upper: dict[tuple[int, int], int]) -> SignTable:
        rows = [[0] * m for _ in range(m)]
        for (i, j), s in upper.items():
            rows[i - 1][j - 1] = s
            rows[j - 1][i - 1] = s
        return cls(rows)

    def __eq__(self, other):
        return isinstance(other, SignTable) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"SignTable({[list(r) for r in self.entries]})"


def validate_commutation_factor(table: SignTable) -> bool:
    m = table.size
    if m == 0:
        return False
    for row in table.entries:
        if len(row) != m:
            return False
    for i in range(m):
        for j in range(m):
            if table.entries[i][j] not in (1, -1):
                return False
            if table.entries[i][j] != table.entries[j][i]:
                return False
    return True


@dataclass(frozen=True)
class DegreeAssignment:
    n: int
    degrees: tuple[DegreeVector, ...]

    def realizes(self, table: SignTable) -> bool:
        m = len(self.degrees)
        if table.size != m:
            return False
        return all(
            commutation_sign(self.degrees[i], self.degrees[j]) == table(i + 1, j + 1)
            for i in range(m)
            for j in range(m)
        )


def _slot(k: int) -> int:
    # position of index k in the linearization (1, -1, 2, -2, ..., m, -m)
    return 2 * (abs(k) - 1) + (0 if k > 0 else 1)


def realize_sign_rule(table: SignTable) -> DegreeAssignment:
    """Find degrees in Z_2^(2m) whose scalar-product signs reproduce ``table``.

    Follows the inductive construction: generator r+1 receives a 1 in its own
    positive slot, its negative slot fixes its self-pairing, and the positive
    slot r+1 of every later generator fixes that generator's pairing with r+1.
    """
    if not validate_commutation_factor(table):
        raise InvalidSignTable("sign table must be square, symmetric and valued in {+1, -1}")
    m = table.size
    n = 2 * m

    def p(i, j):
        return 0 if table(i, j) == 1 else 1

    sigma = [[0] * n for _ in range(m)]  # sigma[j-1][slot]
    for r in range(m):
        g = r + 1
        row = sigma[r]
        lower = sum(row[_slot(k)] + row[_slot(-k)] for k in range(1, g))
        row[_slot(g)] = 1
        row[_slot(-g)] = (1 + lower + p(g, g)) % 2
        for j in range(g + 1, m + 1):
            other = sigma[j - 1]
            acc = sum(
                other[_slot(k)] * row[_slot(k)] + other[_slot(-k)] * row[_slot(-k)]
                for k in range(1, g)
            )
            other[_slot(-g)] = 0
            other[_slot(g)] = (acc + p(j, g)) % 2
    return DegreeAssignment(n, tuple(DegreeVector(tuple(row)) for row in sigma))


def parse_sign_table(text: str, source=None) -> SignTable:
    """Read ``m`` followed by upper-triangle lines ``i j s``."""
    lines = [
        (no, ln.split("#", 1)[0].strip()) for no, ln in enumerate(text.splitlines(), 1)
    ]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines:
        raise ParseError("empty sign table", 1, 1, source)
    no, first = lines[0]
    try:
        m = int(first)
    except ValueError:
        raise ParseError(f"expected table size, got {first!r}", no, 1, source) from None
    if m <= 0:
        raise ParseError("table size must be positive", no, 1, source)
    upper: dict[tuple[int, int], int] = {}
    for no, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'i j s', got {ln!r}", no, 1, source)
        try:
            i, j, s = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"non-integer field in {ln!r}", no, 1, source) from None
        if not (1 <= i <= j <= m):
            raise ParseError(f"index pair ({i}, {j}) outside the upper triangle of 1..{m}", no, 1, source)
        if s not in (1, -1):
            raise ParseError(f"sign must be +1 or -1, got {parts[2]}", no, 1, source)
        if (i, j) in upper:
            raise ParseError(f"duplicate entry ({i}, {j})", no, 1, source)
        upper[(i, j)] = s
    expected = m * (m + 1) // 2
    if len(upper) != expected:
        raise ParseError(f"expected {expected} entries, got {len(upper)}", lines[-1][0], 1, source)
    return SignTable.from_upper(m, upper)


def format_sign_table(table: SignTable) -> str:
    m = table.size
    out = [str(m)]
    for i in range(1, m + 1):
        for j in range(i, m + 1):
            out.append(f"{i} {j} {table(i, j):+d}")
    return "\n".join(out) + "\n"


def degrees_from_rows(rows: Iterable[Iterable[int]]) -> tuple[DegreeVector, ...]:
    return tuple(DegreeVector(tuple(r)) for r in rows)
