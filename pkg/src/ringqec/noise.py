"""iid single-qubit Pauli noise on data qubits, during and between correction cycles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliOperator

# letter codes: bit 0 = X component, bit 1 = Z component
I, X, Z, Y = 0, 1, 2, 3


@dataclass(frozen=True)
class NoiseParams:
    p_b: float
    p_d: float
    split: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)  # (f_x, f_y, f_z)

    def __post_init__(self):
        for name in ("p_b", "p_d"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if any(f < 0 for f in self.split) or abs(sum(self.split) - 1.0) > 1e-12:
            raise ValueError(f"split {self.split} must be non-negative and sum to 1")

    @classmethod
    def from_ratio(cls, p_b: float, ratio: float,
                   split: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)) -> "NoiseParams":
        return cls(p_b=p_b, p_d=p_b * ratio, split=split)


@dataclass(frozen=True)
class ErrorTrack:
    """Letter codes of shape ``(m, n)`` for the during- and between-phase of each cycle."""

    during: np.ndarray
    between: np.ndarray

    @property
    def cycles(self) -> int:
        return self.during.shape[0]

    @property
    def n(self) -> int:
        return self.during.shape[1]

    def pauli(self, phase: str, cycle: int) -> PauliOperator:
        """Phase letters of one (0-based) cycle as an operator."""
        row = getattr(self, phase)[cycle]
        x = z = 0
        for k, c in enumerate(row.tolist()):
            if c & 1:
                x |= 1 << k
            if c & 2:
                z |= 1 << k
        return PauliOperator(self.n, x, z)


def make_rng(seed: int, *spawn_key: int) -> np.random.Generator:
    """Counter-style generator: the stream depends only on (seed, spawn_key)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(spawn_key)))
    )


def draw_letters(rng: np.random.Generator, p: float, split, shape) -> np.ndarray:
    """One iid letter per site: I w.p. 1-p, else X/Y/Z by ``split``."""
    u = rng.random(shape)
    fx, fy, _ = split
    out = np.zeros(shape, dtype=np.uint8)
    out[u < p] = Z
    out[u < p * (fx + fy)] = Y
    out[u < p * fx] = X
    return out


def sample_tracks(params: NoiseParams, n: int, m: int, trials: int,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Batched tracks; returns ``(during, between)`` each of shape ``(m, trials, n)``."""
    if m < 1 or n < 1:
        raise ValueError("need m >= 1 and n >= 1")
    during = np.empty((m, trials, n), dtype=np.uint8)
    between = np.empty((m, trials, n), dtype=np.uint8)
    for j in range(m):
        during[j] = draw_letters(rng, params.p_d, params.split, (trials, n))
        between[j] = draw_letters(rng, params.p_b, params.split, (trials, n))
    return during, between


def sample_track(params: NoiseParams, n: int, m: int, seed: int) -> ErrorTrack:
    during, between = sample_tracks(params, n, m, 1, make_rng(seed))
    return ErrorTrack(during=during[:, 0, :].copy(), between=between[:, 0, :].copy())
