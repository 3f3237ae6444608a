"""Aggregate timing and interaction structure of one correction cycle on the ring."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .codes import StabilizerCode
from .pauli import support_span

DEFAULT_NQ1 = 2


@dataclass(frozen=True)
class TimingParams:
    t_g1: float = 14.0   # ns, Hadamard
    t_g2: float = 26.0   # ns, iSWAP / SWAP
    t_m: float = 880.0   # ns, measurement + initialization

    def __post_init__(self):
        for name in ("t_g1", "t_g2", "t_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class CycleSchedule:
    n: int
    span: int
    windows: tuple[frozenset[int], ...]
    n_q1: int
    n_q2: int
    timing: TimingParams
    cycle_gate_time: float
    full_cycle_time: float

    @property
    def pd_ratio(self) -> float:
        return pd_ratio(self)

    def window_mask(self, ancilla: int) -> int:
        m = 0
        for q in self.windows[ancilla]:
            m |= 1 << q
        return m

    def trigger_masks(self) -> list[int]:
        """``out[q]``: ancillas whose window contains data qubit q."""
        out = [0] * self.n
        for i, w in enumerate(self.windows):
            for q in w:
                out[q] |= 1 << i
        return out

    def summary(self) -> dict:
        return {
            "n": self.n,
            "n_q1": self.n_q1,
            "n_q2": self.n_q2,
            "window_size": self.span,
            "timing_ns": asdict(self.timing),
            "cycle_gate_time_ns": self.cycle_gate_time,
            "full_cycle_time_ns": self.full_cycle_time,
            "pd_ratio": self.pd_ratio,
        }


def build_schedule(code: StabilizerCode, timing: TimingParams | None = None,
                   n_q1: int = DEFAULT_NQ1) -> CycleSchedule:
    """Ancilla i slides across the data qubits spanned by generator g_i.

    The number of two-qubit gate series equals the span of g0, and the
    ancilla's window covers every data qubit in that span, including the
    identity positions it only swaps past.
    """
    timing = timing or TimingParams()
    if n_q1 < 0:
        raise ValueError("n_q1 must be non-negative")
    n = code.n
    span = support_span(code.base)
    windows = tuple(frozenset((i + k) % n for k in range(span)) for i in range(n))
    gate_time = n_q1 * timing.t_g1 + span * timing.t_g2
    return CycleSchedule(
        n=n,
        span=span,
        windows=windows,
        n_q1=n_q1,
        n_q2=span,
        timing=timing,
        cycle_gate_time=gate_time,
        full_cycle_time=gate_time + timing.t_m,
    )


def pd_ratio(schedule: CycleSchedule) -> float:
    """p_d / p_b; the factor 2 counts the 2n qubits exposed during the gates."""
    return 2.0 * schedule.cycle_gate_time / schedule.timing.t_m
