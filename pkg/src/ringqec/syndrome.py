"""Measurement records from error tracks.

Cycle j (0-based here) is evaluated after its gate phase: the true error
contains every during-phase letter up to j and every between-phase letter
before j.  Each ancilla whose interaction window touched a qubit hit during
the current cycle has its readout flipped with probability 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import StabilizerCode, logical_signature, single_qubit_syndromes, syndrome_mask
from .noise import ErrorTrack
from .pauli import DimensionError, PauliOperator, multiply
from .schedule import CycleSchedule

_ALL64 = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class TrialTrace:
    record: np.ndarray                      # (m, n) uint8 raw outcomes
    cumulative_error: tuple[PauliOperator, ...]

    @property
    def cycles(self) -> int:
        return self.record.shape[0]


def _flip_bits(rng: np.random.Generator, size: int, n: int, shared_coin: bool) -> np.ndarray:
    raw = rng.bit_generator.random_raw(size).astype(np.uint64)
    if shared_coin:
        return np.where(raw & np.uint64(1), _ALL64, np.uint64(0))
    return raw & np.uint64((1 << n) - 1)


def simulate_trial(code: StabilizerCode, schedule: CycleSchedule, track: ErrorTrack,
                   seed: int | np.random.Generator, shared_coin: bool = False) -> TrialTrace:
    """Reference single-trial simulator working on ``PauliOperator`` values."""
    if track.n != code.n or schedule.n != code.n:
        raise DimensionError(f"track has {track.n} qubits, code has {code.n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    triggers = schedule.trigger_masks()
    n, m = code.n, track.cycles
    record = np.zeros((m, n), dtype=np.uint8)
    err = PauliOperator.identity(n)
    cumulative = []
    for j in range(m):
        hit = track.pauli("during", j)
        err = multiply(err, hit)
        cumulative.append(err)
        trig = 0
        for q in range(n):
            if (hit.support >> q) & 1:
                trig |= triggers[q]
        flips = int(_flip_bits(rng, 1, n, shared_coin)[0]) & trig
        outcome = syndrome_mask(code, err) ^ flips
        record[j] = [(outcome >> i) & 1 for i in range(n)]
        err = multiply(err, track.pauli("between", j))
    return TrialTrace(record=record, cumulative_error=tuple(cumulative))


def format_trace(trace: TrialTrace) -> str:
    """Debug dump: one hex-encoded outcome row per cycle (bit i = ancilla i)."""
    n = trace.record.shape[1]
    width = (n + 3) // 4
    lines = []
    for j, row in enumerate(trace.record):
        mask = sum(int(b) << i for i, b in enumerate(row))
        lines.append(f"{j + 1} {mask:0{width}x} {trace.cumulative_error[j]}")
    return "\n".join(lines) + "\n"


@dataclass
class BatchTrace:
    """Per-cycle packed data for a block of trials, all shaped ``(m, T)``."""

    records: np.ndarray      # uint64 raw outcome masks
    syndromes: np.ndarray    # uint64 true syndrome of cumulative error
    signatures: np.ndarray   # uint8 logical signature of cumulative error


class BatchSimulator:
    """Bit-packed simulator for many trials at once (requires n <= 64)."""

    def __init__(self, code: StabilizerCode, schedule: CycleSchedule, shared_coin: bool = False):
        if code.n > 64:
            raise DimensionError("bit-packed simulation supports n <= 64")
        self.code = code
        self.n = code.n
        self.shared_coin = shared_coin
        self.letter_syn = single_qubit_syndromes(code)                    # (n, 4)
        self.trigger = np.array(schedule.trigger_masks(), dtype=np.uint64)  # (n,)
        self.mask = np.uint64((1 << code.n) - 1)

    def _apply(self, letters: np.ndarray, syn: np.ndarray, sig: np.ndarray,
               trig: np.ndarray | None = None) -> None:
        rows, cols = np.nonzero(letters)
        if rows.size == 0:
            return
        c = letters[rows, cols]
        np.bitwise_xor.at(syn, rows, self.letter_syn[cols, c])
        np.bitwise_xor.at(sig, rows, c)
        if trig is not None:
            np.bitwise_or.at(trig, rows, self.trigger[cols])

    def run(self, during: np.ndarray, between: np.ndarray,
            rng: np.random.Generator) -> BatchTrace:
        m, T, n = during.shape
        if n != self.n:
            raise DimensionError(f"track has {n} qubits, code has {self.n}")
        syn = np.zeros(T, np.uint64)
        sig = np.zeros(T, np.uint8)
        records = np.empty((m, T), np.uint64)
        syndromes = np.empty((m, T), np.uint64)
        signatures = np.empty((m, T), np.uint8)
        for j in range(m):
            trig = np.zeros(T, np.uint64)
            self._apply(during[j], syn, sig, trig)
            syndromes[j] = syn
            signatures[j] = sig
            records[j] = syn ^ (_flip_bits(rng, T, n, self.shared_coin) & trig & self.mask)
            self._apply(between[j], syn, sig)
        return BatchTrace(records=records, syndromes=syndromes, signatures=signatures)


def trace_to_batch(code: StabilizerCode, trace: TrialTrace) -> BatchTrace:
    """Pack a single reference trace in the batch layout (T = 1)."""
    m, n = trace.record.shape
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    rec = (trace.record.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)
    syn = np.array([syndrome_mask(code, e) for e in trace.cumulative_error], np.uint64)
    sig = np.array([int(logical_signature(code, e)) for e in trace.cumulative_error], np.uint8)
    return BatchTrace(records=rec[:, None], syndromes=syn[:, None], signatures=sig[:, None])
