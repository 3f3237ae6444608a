"""Pauli-frame memory experiments for ring-topology stabilizer codes."""

__version__ = "0.1.0"

from .codes import LogicalCoset, StabilizerCode, build_code, build_cyclic_code, build_linear_code
from .decoder import DecodeTable, build_table, decode
from .experiment import fit_fidelity, fit_slope, run_memory_experiment, sweep_and_fit_slope
from .noise import NoiseParams, sample_track
from .pauli import PauliOperator, commutes, gf2_rank, multiply, parse_pauli, rotate
from .schedule import CycleSchedule, TimingParams, build_schedule, pd_ratio
from .syndrome import simulate_trial

__all__ = [
    "CycleSchedule", "DecodeTable", "LogicalCoset", "NoiseParams", "PauliOperator",
    "StabilizerCode", "TimingParams", "build_code", "build_cyclic_code", "build_linear_code",
    "build_schedule", "build_table", "commutes", "decode", "fit_fidelity", "fit_slope",
    "gf2_rank", "multiply", "parse_pauli", "pd_ratio", "rotate", "run_memory_experiment",
    "sample_track", "simulate_trial", "sweep_and_fit_slope",
]
