"""Phaseless n-qubit Pauli operators stored as a pair of X/Z bit masks.

Bit ``k`` of each mask refers to qubit ``k``, which is the ``k``-th letter
of the printed string (position 0 is the leftmost letter).  Masks are plain
Python integers, so there is no cap on the number of qubits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

LETTERS = "IXZY"  # index = x_bit | (z_bit << 1)


class PauliParseError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError(f"qubit count must be positive, got {self.n}")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise DimensionError(f"bit masks exceed {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        """Single-qubit operator ``letter`` on ``qubit`` of an n-qubit register."""
        code = LETTERS.index(letter)
        bit = 1 << (qubit % n)
        return cls(n, bit if code & 1 else 0, bit if code & 2 else 0)

    def __str__(self) -> str:
        return "".join(self.letter(k) for k in range(self.n))

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def letter(self, k: int) -> str:
        return LETTERS[((self.x >> k) & 1) | (((self.z >> k) & 1) << 1)]

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def is_identity(self) -> bool:
        return not (self.x or self.z)


def parse_pauli(text: str) -> PauliOperator:
    """Parse a string of ``I``, ``X``, ``Y``, ``Z`` letters.

    >>> parse_pauli("ZXXZI")
    PauliOperator('ZXXZI')
    """
    if not text:
        raise PauliParseError("empty Pauli string")
    x = z = 0
    for k, ch in enumerate(text):
        code = LETTERS.find(ch)
        if code < 0:
            raise PauliParseError(f"invalid Pauli letter {ch!r} at position {k}")
        if code & 1:
            x |= 1 << k
        if code & 2:
            z |= 1 << k
    return PauliOperator(len(text), x, z)


def _check_dims(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise DimensionError(f"qubit count mismatch: {a.n} vs {b.n}")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check_dims(a, b)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z)


def product(ops: Iterable[PauliOperator], n: int) -> PauliOperator:
    x = z = 0
    for op in ops:
        if op.n != n:
            raise DimensionError(f"qubit count mismatch: {op.n} vs {n}")
        x ^= op.x
        z ^= op.z
    return PauliOperator(n, x, z)


def _parity(v: int) -> int:
    return v.bit_count() & 1


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    _check_dims(a, b)
    return _parity(a.x & b.z) == _parity(a.z & b.x)


def weight(a: PauliOperator) -> int:
    return a.support.bit_count()


def support_span(a: PauliOperator) -> int:
    """Length of the contiguous window from the first to the last non-identity letter."""
    s = a.support
    if not s:
        return 0
    first = (s & -s).bit_length() - 1
    return s.bit_length() - first


def ring_span(a: PauliOperator) -> int:
    """Smallest contiguous window on the ring (wrapping allowed) covering the support."""
    if a.is_identity:
        return 0
    return min(support_span(rotate(a, k)) for k in range(a.n))


def _rotate_mask(v: int, k: int, n: int) -> int:
    full = (1 << n) - 1
    return ((v << k) | (v >> (n - k))) & full


def rotate(a: PauliOperator, k: int) -> PauliOperator:
    """Cyclic shift: the letter at position p moves to position (p + k) mod n."""
    k %= a.n
    if k == 0:
        return a
    return PauliOperator(a.n, _rotate_mask(a.x, k, a.n), _rotate_mask(a.z, k, a.n))


def symplectic_row(a: PauliOperator) -> int:
    """The 2n-bit row ``x_bits || z_bits`` packed into one integer."""
    return a.x | (a.z << a.n)


def gf2_rank(rows: Sequence[PauliOperator]) -> int:
    if not rows:
        return 0
    n = rows[0].n
    for r in rows:
        if r.n != n:
            raise DimensionError(f"qubit count mismatch: {r.n} vs {n}")
    # xor basis keyed by leading bit
    basis: dict[int, int] = {}
    for r in rows:
        v = symplectic_row(r)
        while v:
            lead = v.bit_length() - 1
            if lead not in basis:
                basis[lead] = v
                break
            v ^= basis[lead]
    return len(basis)
