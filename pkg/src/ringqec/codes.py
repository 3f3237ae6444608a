"""Ring stabilizer codes: the linear-scalable family and the cyclic XZZX family."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .pauli import (
    DimensionError,
    PauliOperator,
    commutes,
    gf2_rank,
    parse_pauli,
    rotate,
)

LINEAR_BASES = {
    3: "ZXXZI",
    5: "ZIXXIZ" + "I" * 7,
    7: "ZIIXXXXIIZ" + "I" * 11,
    9: "ZXXIIXIIXIIXXZ" + "I" * 15,
    11: "ZXXXIIIXIIXIIIXXXZ" + "I" * 19,
}

FAMILIES = ("linear", "cyclic")


class CodeConstructionError(ValueError):
    pass


class CodeConsistencyError(RuntimeError):
    pass


class EnumerationBudgetError(RuntimeError):
    def __init__(self, required: int, budget: int, message: str = ""):
        self.required = required
        self.budget = budget
        super().__init__(
            message or f"enumeration needs {required} errors, budget is {budget}"
        )


class LogicalCoset(IntEnum):
    """Logical class of a normalizer element; XOR of values is composition."""

    I = 0
    X = 1
    Z = 2
    Y = 3

    def compose(self, other: "LogicalCoset") -> "LogicalCoset":
        return LogicalCoset(self ^ other)


@dataclass(frozen=True)
class StabilizerCode:
    family: str
    distance: int
    n: int
    base: PauliOperator
    generators: tuple[PauliOperator, ...] = field(repr=False)
    logical_x: PauliOperator = field(repr=False)
    logical_y: PauliOperator = field(repr=False)
    logical_z: PauliOperator = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.family}-d{self.distance}"

    def invariant_report(self) -> list[tuple[str, bool]]:
        """Every construction invariant as ``(description, holds)``."""
        gens = self.generators
        pairs_ok = all(commutes(a, b) for a, b in itertools.combinations(gens, 2))
        rank = gf2_rank(list(gens))
        logicals = (self.logical_x, self.logical_y, self.logical_z)
        checks = [
            (f"{len(gens)} generators are cyclic shifts of g0",
             len(gens) == self.n
             and all(g == rotate(self.base, i) for i, g in enumerate(gens))),
            ("all generator pairs commute", pairs_ok),
            (f"gf2_rank(generators) == n-1 == {self.n - 1} (got {rank})", rank == self.n - 1),
            ("logical X/Y/Z commute with every generator",
             all(commutes(L, g) for L in logicals for g in gens)),
            ("logical X and logical Z anticommute",
             not commutes(self.logical_x, self.logical_z)),
        ]
        if self.family == "linear":
            checks.append(("base equals the tabulated string",
                           str(self.base) == LINEAR_BASES.get(self.distance)))
        else:
            checks.append((f"n == (d^2+1)/2 == {(self.distance ** 2 + 1) // 2}",
                           self.n == (self.distance ** 2 + 1) // 2))
        return checks


def _make_code(family: str, d: int, base: PauliOperator) -> StabilizerCode:
    n = base.n
    full = (1 << n) - 1
    code = StabilizerCode(
        family=family,
        distance=d,
        n=n,
        base=base,
        generators=tuple(rotate(base, i) for i in range(n)),
        logical_x=PauliOperator(n, full, 0),
        logical_y=PauliOperator(n, full, full),
        logical_z=PauliOperator(n, 0, full),
    )
    failed = [desc for desc, ok in code.invariant_report() if not ok]
    if failed:
        raise CodeConsistencyError(f"{code.name}: " + "; ".join(failed))
    return code


def build_linear_code(d: int) -> StabilizerCode:
    if d not in LINEAR_BASES:
        raise CodeConstructionError(
            f"linear codes exist for d in {sorted(LINEAR_BASES)}, got {d}"
        )
    return _make_code("linear", d, parse_pauli(LINEAR_BASES[d]))


def cyclic_base_string(d: int) -> str:
    t = (d - 1) // 2
    n = (d * d + 1) // 2
    return "Z" + "I" * (t - 1) + "XX" + "I" * (t - 1) + "Z" + "I" * (n - 2 * t - 2)


def build_cyclic_code(d: int, max_n: int = 4096) -> StabilizerCode:
    if d < 3 or d % 2 == 0:
        raise CodeConstructionError(f"cyclic codes need odd d >= 3, got {d}")
    n = (d * d + 1) // 2
    if n > max_n:
        raise CodeConstructionError(f"n={n} exceeds max_n={max_n}")
    return _make_code("cyclic", d, parse_pauli(cyclic_base_string(d)))


def build_code(family: str, d: int) -> StabilizerCode:
    if family == "linear":
        return build_linear_code(d)
    if family == "cyclic":
        return build_cyclic_code(d)
    raise CodeConstructionError(f"unknown code family {family!r}")


def syndrome_mask(code: StabilizerCode, e: PauliOperator) -> int:
    """Syndrome as an integer: bit i set iff ``e`` anticommutes with generator i."""
    if e.n != code.n:
        raise DimensionError(f"error acts on {e.n} qubits, code has {code.n}")
    s = 0
    for i, g in enumerate(code.generators):
        if not commutes(g, e):
            s |= 1 << i
    return s


def syndrome_of(code: StabilizerCode, e: PauliOperator) -> tuple[int, ...]:
    s = syndrome_mask(code, e)
    return tuple((s >> i) & 1 for i in range(code.n))


def logical_signature(code: StabilizerCode, p: PauliOperator) -> LogicalCoset:
    """Commutation pattern of ``p`` with the fixed logical representatives.

    Defined for any Pauli and additive under multiplication; it equals the
    logical coset whenever ``p`` has zero syndrome.
    """
    xpart = not commutes(p, code.logical_z)
    zpart = not commutes(p, code.logical_x)
    return LogicalCoset(int(xpart) | (int(zpart) << 1))


def coset_of(code: StabilizerCode, p: PauliOperator) -> LogicalCoset:
    if syndrome_mask(code, p):
        raise ValueError(f"{p} has nonzero syndrome; it is not in the normalizer")
    return logical_signature(code, p)


# Vectorised error enumeration, shared by the distance check and the decoder table.

def single_qubit_syndromes(code: StabilizerCode) -> np.ndarray:
    """``out[k, c]`` = syndrome mask of letter code ``c`` (0=I, 1=X, 2=Z, 3=Y) on qubit k."""
    if code.n > 64:
        raise DimensionError("vectorised syndromes support n <= 64")
    out = np.zeros((code.n, 4), dtype=np.uint64)
    for k in range(code.n):
        for c, letter in enumerate("IXZY"):
            out[k, c] = syndrome_mask(code, PauliOperator.single(code.n, k, letter))
    return out


# letter codes in X < Y < Z order
ORDERED_LETTERS = np.array([1, 3, 2], dtype=np.uint8)


def enumeration_count(n: int, max_weight: int) -> int:
    return sum(math.comb(n, w) * 3 ** w for w in range(max_weight + 1))


def enumerate_weight(code: StabilizerCode, w: int, block: int = 4096):
    """Yield blocks of all weight-``w`` errors in lexicographic order.

    Order: qubit combinations lexicographically, then letters per qubit in
    X < Y < Z order.  Each block is ``(syndromes, signatures, qubits, letters)``
    where ``qubits``/``letters`` have shape ``(count, w)``.
    """
    table = single_qubit_syndromes(code)
    if w == 0:
        yield (np.zeros(1, np.uint64), np.zeros(1, np.uint8),
               np.zeros((1, 0), np.int64), np.zeros((1, 0), np.uint8))
        return
    letters = ORDERED_LETTERS[np.array(list(itertools.product(range(3), repeat=w)),
                                       dtype=np.int64)]  # (3^w, w)
    combos = itertools.combinations(range(code.n), w)
    while True:
        chunk = np.array(list(itertools.islice(combos, block)), dtype=np.int64)
        if chunk.size == 0:
            return
        chunk = chunk.reshape(-1, w)
        q = np.repeat(chunk, len(letters), axis=0)          # (K*3^w, w)
        lt = np.tile(letters, (len(chunk), 1))                # (K*3^w, w)
        syn = np.bitwise_xor.reduce(table[q, lt], axis=1)
        xpar = np.bitwise_xor.reduce(lt & 1, axis=1)
        zpar = np.bitwise_xor.reduce(lt >> 1, axis=1)
        sig = (xpar | (zpar << 1)).astype(np.uint8)
        yield syn, sig, q, lt


@dataclass
class DistanceReport:
    code: str
    max_weight: int
    enumerated: int
    weight1_syndromes_distinct: bool
    correctable_pairs_ok: bool
    violations: int
    min_logical_weight_found: int | None
    certified_distance_at_least: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _pauli_from_arrays(n: int, qubits: np.ndarray, letters: np.ndarray) -> PauliOperator:
    x = z = 0
    for q, c in zip(qubits.tolist(), letters.tolist()):
        if c & 1:
            x |= 1 << q
        if c & 2:
            z |= 1 << q
    return PauliOperator(n, x, z)


def verify_distance(code: StabilizerCode, max_weight: int,
                    budget: int = 20_000_000) -> DistanceReport:
    """Exhaustively check correctability of all errors up to ``max_weight``.

    Errors are bucketed by syndrome.  Two errors in one bucket whose combined
    weight is below d must share a logical signature (their product is a
    stabilizer).  Any bucket holding two signatures yields a nontrivial
    logical operator; the lightest one seen is reported.
    """
    required = enumeration_count(code.n, max_weight)
    if required > budget:
        raise EnumerationBudgetError(required, budget)
    d = code.distance

    syn_parts, sig_parts, w_parts, q_parts, l_parts = [], [], [], [], []
    for w in range(max_weight + 1):
        for syn, sig, q, lt in enumerate_weight(code, w):
            syn_parts.append(syn)
            sig_parts.append(sig)
            w_parts.append(np.full(len(syn), w, np.int64))
            pad = max_weight - w
            q_parts.append(np.pad(q, ((0, 0), (0, pad)), constant_values=-1))
            l_parts.append(np.pad(lt, ((0, 0), (0, pad))))
    syn = np.concatenate(syn_parts)
    sig = np.concatenate(sig_parts)
    wt = np.concatenate(w_parts)
    qs = np.concatenate(q_parts) if max_weight else np.zeros((len(syn), 0), np.int64)
    ls = np.concatenate(l_parts) if max_weight else np.zeros((len(syn), 0), np.uint8)

    w1 = wt == 1
    weight1_distinct = len(np.unique(syn[w1])) == int(w1.sum()) and not np.any(syn[w1] == 0)

    # lightest member per (syndrome, signature)
    order = np.lexsort((wt, sig, syn))
    syn_s, sig_s, wt_s = syn[order], sig[order], wt[order]
    head = np.ones(len(order), bool)
    head[1:] = (syn_s[1:] != syn_s[:-1]) | (sig_s[1:] != sig_s[:-1])
    g_syn, g_wt, g_idx = syn_s[head], wt_s[head], order[head]

    violations = 0
    min_logical = None
    multi = np.zeros(len(g_syn), bool)
    if len(g_syn) > 1:
        same = g_syn[1:] == g_syn[:-1]
        multi[1:] |= same
        multi[:-1] |= same
    groups: dict[int, list[int]] = {}
    for j in np.flatnonzero(multi):
        groups.setdefault(int(g_syn[j]), []).append(j)
    for members in groups.values():
        for a, b in itertools.combinations(members, 2):
            if g_wt[a] + g_wt[b] < d:
                violations += 1
            pa = _pauli_from_arrays(code.n, qs[g_idx[a]][: g_wt[a]], ls[g_idx[a]][: g_wt[a]])
            pb = _pauli_from_arrays(code.n, qs[g_idx[b]][: g_wt[b]], ls[g_idx[b]][: g_wt[b]])
            lw = (pa * pb).support.bit_count()
            min_logical = lw if min_logical is None else min(min_logical, lw)

    bound = 2 * max_weight + 1
    certified = bound if min_logical is None else min(bound, min_logical)
    return DistanceReport(
        code=code.name,
        max_weight=max_weight,
        enumerated=len(syn),
        weight1_syndromes_distinct=bool(weight1_distinct),
        correctable_pairs_ok=violations == 0,
        violations=violations,
        min_logical_weight_found=min_logical,
        certified_distance_at_least=certified,
    )
