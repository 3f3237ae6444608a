"""Lookup-table decoder with syndrome differencing and consecutive-round merging.

The table maps a syndrome to the logical signature of the lightest error
producing it.  Corrections are tracked as signatures only; the syndrome
rows actually looked up are tracked alongside so callers can tell whether
the correction returned the state to the codespace.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codes import (
    FAMILIES,
    EnumerationBudgetError,
    LogicalCoset,
    StabilizerCode,
    enumerate_weight,
    enumeration_count,
)

log = logging.getLogger(__name__)

DEFAULT_TABLE_BUDGET = 20_000_000
_BYTES_PER_ENUMERATED = 48  # peak working memory per enumerated error, rough
_MAGIC = b"RQLT"
_HEADER = struct.Struct("<4sBBHHHQ")


@dataclass
class DecodeTable:
    family: str
    distance: int
    n: int
    w_max: int
    keys: np.ndarray      # sorted uint64 syndromes
    cosets: np.ndarray    # uint8 logical signature of the stored error
    weights: np.ndarray   # uint8

    def __len__(self) -> int:
        return len(self.keys)

    def matches(self, code: StabilizerCode) -> bool:
        return (self.family, self.distance, self.n) == (code.family, code.distance, code.n)

    def lookup(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised lookup: returns ``(hit, coset)``; misses get coset I."""
        s = np.asarray(syndromes, dtype=np.uint64)
        idx = np.searchsorted(self.keys, s)
        idx = np.minimum(idx, len(self.keys) - 1)
        hit = self.keys[idx] == s
        coset = np.where(hit, self.cosets[idx], 0).astype(np.uint8)
        return hit, coset

    def entry(self, syndrome: int) -> tuple[LogicalCoset, int] | None:
        i = int(np.searchsorted(self.keys, np.uint64(syndrome)))
        if i < len(self.keys) and int(self.keys[i]) == syndrome:
            return LogicalCoset(int(self.cosets[i])), int(self.weights[i])
        return None


def default_w_max(code: StabilizerCode) -> int:
    return (code.distance - 1) // 2


def build_table(code: StabilizerCode, w_max: int | None = None,
                budget: int = DEFAULT_TABLE_BUDGET, allow_large: bool = False) -> DecodeTable:
    """Breadth-first by weight; the first error seen for a syndrome wins.

    Within a weight, errors are visited in lexicographic qubit order and
    X < Y < Z letter order, which fixes the table contents exactly.
    """
    if w_max is None:
        w_max = default_w_max(code)
    if w_max < 0:
        raise ValueError("w_max must be non-negative")
    required = enumeration_count(code.n, w_max)
    if required > budget and not allow_large:
        fit = max(w for w in range(w_max + 1) if enumeration_count(code.n, w) <= budget)
        est_gb = required * _BYTES_PER_ENUMERATED / 1e9
        raise EnumerationBudgetError(
            required, budget,
            f"table for {code.name} with w_max={w_max} enumerates {required} errors "
            f"(budget {budget}, ~{est_gb:.1f} GB working memory); use w_max<={fit} "
            "or allow large tables explicitly",
        )
    seen = np.zeros(0, np.uint64)
    keys, cosets, weights = [], [], []
    for w in range(w_max + 1):
        for syn, sig, _, _ in enumerate_weight(code, w):
            uniq, first = np.unique(syn, return_index=True)
            fresh = ~np.isin(uniq, seen, assume_unique=True)
            if not fresh.any():
                continue
            new_keys = uniq[fresh]
            keys.append(new_keys)
            cosets.append(sig[first[fresh]])
            weights.append(np.full(len(new_keys), w, np.uint8))
            seen = np.union1d(seen, new_keys)
    k = np.concatenate(keys)
    order = np.argsort(k)
    return DecodeTable(code.family, code.distance, code.n, w_max,
                       k[order], np.concatenate(cosets)[order], np.concatenate(weights)[order])


# ---- bit-matrix forms (rows = cycles, columns = ancillas) ------------------

def difference(record: np.ndarray, reference: np.ndarray | None = None) -> np.ndarray:
    """Syndrome changes between consecutive rounds.

    Without a reference the first row is zero by definition.  With one, the
    first row is its change relative to ``reference`` (a known prior round).
    """
    r = np.asarray(record, dtype=np.uint8) & 1
    s = np.zeros_like(r)
    s[1:] = r[1:] ^ r[:-1]
    if reference is not None:
        s[0] = r[0] ^ (np.asarray(reference, dtype=np.uint8) & 1)
    return s


def merge_rounds(s: np.ndarray) -> np.ndarray:
    """Single left-to-right pass: a nonzero round followed by a nonzero round
    is folded into the later one."""
    out = np.array(s, dtype=np.uint8, copy=True)
    for j in range(len(out) - 1):
        if out[j].any() and out[j + 1].any():
            out[j + 1] ^= out[j]
            out[j] = 0
    return out


# ---- packed forms: rows are uint64 masks, shape (m, T) ---------------------

def pack_rows(bits: np.ndarray) -> np.ndarray:
    """(..., n) bit array -> (...) uint64 masks, bit i = column i."""
    bits = np.asarray(bits, dtype=np.uint64)
    n = bits.shape[-1]
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    return (bits * weights).sum(axis=-1, dtype=np.uint64)


def unpack_rows(masks: np.ndarray, n: int) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.uint64)
    shifts = np.arange(n, dtype=np.uint64)
    return ((masks[..., None] >> shifts) & np.uint64(1)).astype(np.uint8)


def difference_packed(records: np.ndarray, reference_zero: bool = True) -> np.ndarray:
    s = np.empty_like(records)
    s[1:] = records[1:] ^ records[:-1]
    s[0] = records[0] if reference_zero else 0
    return s


def _merge_packed(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge in place on a copy; also return each row's value just before its own step."""
    s = s.copy()
    before = np.empty_like(s)
    zero = np.uint64(0)
    for j in range(len(s) - 1):
        before[j] = s[j]
        both = (s[j] != zero) & (s[j + 1] != zero)
        s[j + 1] = np.where(both, s[j] ^ s[j + 1], s[j + 1])
        s[j] = np.where(both, zero, s[j])
    before[-1] = s[-1]
    return s, before


def merge_packed(s: np.ndarray) -> np.ndarray:
    return _merge_packed(s)[0]


@dataclass
class PackedDecode:
    """Cumulative decoder output per cycle, all shaped ``(m, T)``."""

    cosets: np.ndarray    # uint8 composed correction signature
    applied: np.ndarray   # uint64 XOR of syndrome rows that were corrected
    misses: np.ndarray    # int64 per-trial miss count (shape (T,))


def _step(table: DecodeTable, carry: np.ndarray, row: np.ndarray):
    """Look up one round per trial, prefixed by any carried unresolved change.

    A round that misses the table is corrected as identity and carried into
    the next nonzero round, so pairs of invalid rows can resolve each other.
    Returns (coset, applied, missed, carry).
    """
    zero = np.uint64(0)
    active = row != zero
    key = row ^ carry
    hit, coset = table.lookup(key)
    ok = active & hit
    return (np.where(ok, coset, np.uint8(0)).astype(np.uint8),
            np.where(ok, key, zero),
            active & ~hit,
            np.where(active, np.where(hit, zero, key), carry))


def decode_packed(table: DecodeTable, records: np.ndarray,
                  reference_zero: bool = True) -> PackedDecode:
    merged = merge_packed(difference_packed(records, reference_zero))
    m, T = merged.shape
    cosets = np.zeros((m, T), np.uint8)
    applied = np.zeros((m, T), np.uint64)
    misses = np.zeros(T, np.int64)
    carry = np.zeros(T, np.uint64)
    cos_acc = np.zeros(T, np.uint8)
    app_acc = np.zeros(T, np.uint64)
    for j in range(m):
        c, a, miss, carry = _step(table, carry, merged[j])
        cos_acc ^= c
        app_acc ^= a
        misses += miss
        cosets[j], applied[j] = cos_acc, app_acc
    return PackedDecode(cosets=cosets, applied=applied, misses=misses)


def decode_memory_packed(table: DecodeTable, records: np.ndarray,
                         final_syndromes: np.ndarray) -> PackedDecode:
    """Decode every prefix ``1..j`` closed by a noiseless syndrome round.

    Result at cycle j equals ``decode_packed`` applied to the first j raw
    rows followed by ``final_syndromes[j]``, taking its last entry.  The
    merge pass and the lookups over rows ``< j`` are shared between all
    prefixes, so the whole sweep costs one pass.
    """
    zero = np.uint64(0)
    merged, before = _merge_packed(difference_packed(records, reference_zero=True))
    m, T = merged.shape
    cosets = np.zeros((m, T), np.uint8)
    applied = np.zeros((m, T), np.uint64)
    carry = np.zeros(T, np.uint64)
    pre_cos = np.zeros(T, np.uint8)
    pre_app = np.zeros(T, np.uint64)
    pre_miss = np.zeros(T, np.int64)
    for j in range(m):
        # closing tail: row j as it stood before its own merge step, then the noiseless round
        u = before[j]
        p = final_syndromes[j] ^ records[j]
        both = (u != zero) & (p != zero)
        c1, a1, m1, k1 = _step(table, carry, np.where(both, u ^ p, u))
        c2, a2, m2, _ = _step(table, k1, np.where(both, zero, p))
        cosets[j] = pre_cos ^ c1 ^ c2
        applied[j] = pre_app ^ a1 ^ a2
        if j == m - 1:
            misses = pre_miss + m1 + m2
            break
        c, a, miss, carry = _step(table, carry, merged[j])
        pre_cos ^= c
        pre_app ^= a
        pre_miss += miss
    return PackedDecode(cosets=cosets, applied=applied, misses=misses)


@dataclass
class DecodeResult:
    corrections: list[LogicalCoset]   # cumulative, one per cycle
    applied: list[int]                # cumulative corrected syndrome masks
    misses: int


def decode(table: DecodeTable, record: np.ndarray, initial_reference: bool = True) -> DecodeResult:
    """Decode one ``(m, n)`` measurement record.

    ``initial_reference`` compares round 1 against the all-zero syndrome of
    the freshly encoded state; with ``False`` round 1 contributes nothing.
    """
    record = np.asarray(record)
    if record.ndim != 2 or record.shape[1] != table.n:
        raise ValueError(f"record shape {record.shape} does not match n={table.n}")
    out = decode_packed(table, pack_rows(record)[:, None], reference_zero=initial_reference)
    return DecodeResult(
        corrections=[LogicalCoset(int(c)) for c in out.cosets[:, 0]],
        applied=[int(a) for a in out.applied[:, 0]],
        misses=int(out.misses[0]),
    )


# ---- table files ------------------------------------------------------------

def save_table(table: DecodeTable, path: str | Path) -> None:
    nbytes = math.ceil(table.n / 8)
    entries = np.zeros(len(table), dtype=[("syn", np.uint8, (nbytes,)),
                                          ("coset", np.uint8), ("weight", np.uint8)])
    entries["syn"] = table.keys.astype("<u8").view(np.uint8).reshape(-1, 8)[:, :nbytes]
    entries["coset"] = table.cosets
    entries["weight"] = table.weights
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, 1, FAMILIES.index(table.family), table.distance,
                              table.n, table.w_max, len(table)))
        fh.write(entries.tobytes())


def load_table(path: str | Path) -> DecodeTable:
    data = Path(path).read_bytes()
    magic, version, fam, d, n, w_max, count = _HEADER.unpack_from(data)
    if magic != _MAGIC or version != 1:
        raise ValueError(f"{path}: not a decode table file")
    nbytes = math.ceil(n / 8)
    dtype = np.dtype([("syn", np.uint8, (nbytes,)), ("coset", np.uint8), ("weight", np.uint8)])
    entries = np.frombuffer(data, dtype=dtype, count=count, offset=_HEADER.size)
    raw = np.zeros((count, 8), np.uint8)
    raw[:, :nbytes] = entries["syn"]
    keys = raw.view("<u8").reshape(-1).astype(np.uint64)
    return DecodeTable(FAMILIES[fam], d, n, w_max, keys,
                       entries["coset"].copy(), entries["weight"].copy())


def format_table(table: DecodeTable) -> str:
    """Human-readable dump: syndrome bits (ancilla 0 first), coset letter, weight."""
    lines = [f"# {table.family} d={table.distance} n={table.n} "
             f"w_max={table.w_max} entries={len(table)}"]
    for k, c, w in zip(table.keys.tolist(), table.cosets.tolist(), table.weights.tolist()):
        bits = "".join(str((k >> i) & 1) for i in range(table.n))
        lines.append(f"{bits} {LogicalCoset(c).name} {w}")
    return "\n".join(lines) + "\n"
