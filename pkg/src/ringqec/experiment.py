"""Memory experiment: Monte Carlo fidelity curves, decay fits and slope fits."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .codes import LogicalCoset, StabilizerCode, logical_signature, syndrome_mask
from .decoder import DecodeTable, decode_memory_packed
from .noise import NoiseParams, make_rng, sample_tracks
from .schedule import CycleSchedule
from .syndrome import BatchSimulator, TrialTrace

log = logging.getLogger(__name__)

CHUNK_TRIALS = 4096
DEFAULT_FLOOR_MARGIN = 0.02
SWEEP_CSV_COLUMNS = ("family", "d", "n", "p_b", "p_d", "epsilon_L", "epsilon_L_stderr",
                     "t0", "trials", "cycles", "misses", "seed")

# 6-state average in units of 1/6: identity keeps all six cardinal states,
# a nontrivial logical Pauli keeps only the two eigenstates of its own axis.
_SIXTHS_IDENTITY = 6
_SIXTHS_NONTRIVIAL = 2


class FitError(ValueError):
    pass


@dataclass
class FidelityCurve:
    times_us: np.ndarray
    fidelity: np.ndarray
    trials: int
    misses: int

    def as_dict(self) -> dict:
        return {"times_us": self.times_us.tolist(), "fidelity": self.fidelity.tolist(),
                "trials": self.trials, "misses": self.misses}

    @classmethod
    def from_dict(cls, d: dict) -> "FidelityCurve":
        return cls(np.asarray(d["times_us"], float), np.asarray(d["fidelity"], float),
                   int(d["trials"]), int(d["misses"]))


@dataclass
class FitResult:
    epsilon_L: float
    t0: float
    epsilon_L_stderr: float
    t0_stderr: float
    points_used: int


@dataclass
class SlopeResult:
    code: str
    points: list[tuple[float, float]]
    slope: float
    intercept: float
    slope_stderr: float
    excluded: list[float] = field(default_factory=list)


def cardinal_fidelity(residual_coset: int, residual_syndrome: int) -> float:
    """Average fidelity over the six cardinal states for one residual."""
    if residual_syndrome:
        return 0.0
    return 1.0 if residual_coset == LogicalCoset.I else 1.0 / 3.0


def trial_fidelity(code: StabilizerCode, trace: TrialTrace, corrections,
                   applied=None) -> np.ndarray:
    """Per-cycle 6-state fidelity of one trial.

    ``corrections[j]`` is the cumulative correction coset at cycle j and
    ``applied[j]`` the XOR of syndrome rows it corrected (defaults to the
    true syndrome, i.e. a complete correction).
    """
    if len(corrections) != trace.cycles:
        raise ValueError("corrections and trace lengths differ")
    out = np.empty(trace.cycles)
    for j, err in enumerate(trace.cumulative_error):
        syn = syndrome_mask(code, err)
        residual_syn = syn ^ (syn if applied is None else int(applied[j]))
        residual = int(logical_signature(code, err)) ^ int(corrections[j])
        out[j] = cardinal_fidelity(residual, residual_syn)
    return out


def _sixths(residual_coset: np.ndarray, residual_syn: np.ndarray) -> np.ndarray:
    val = np.where(residual_coset == 0, _SIXTHS_IDENTITY, _SIXTHS_NONTRIVIAL)
    return np.where(residual_syn == 0, val, 0).astype(np.int64)


@dataclass(frozen=True)
class ChunkJob:
    code: StabilizerCode
    schedule: CycleSchedule
    noise: NoiseParams
    table: DecodeTable
    cycles: int
    trials: int
    seed: int
    chunk: int
    shared_coin: bool = False


def run_chunk(job: ChunkJob) -> tuple[np.ndarray, int]:
    """Simulate one block of trials; returns per-cycle fidelity sums (in sixths) and misses."""
    noise_rng = make_rng(job.seed, job.chunk, 0)
    flip_rng = make_rng(job.seed, job.chunk, 1)
    during, between = sample_tracks(job.noise, job.code.n, job.cycles, job.trials, noise_rng)
    batch = BatchSimulator(job.code, job.schedule, job.shared_coin).run(during, between, flip_rng)
    dec = decode_memory_packed(job.table, batch.records, batch.syndromes)
    residual_coset = batch.signatures ^ dec.cosets
    residual_syn = batch.syndromes ^ dec.applied
    return _sixths(residual_coset, residual_syn).sum(axis=1), int(dec.misses.sum())


def _chunk_jobs(code, schedule, noise, table, cycles, trials, seed, shared_coin):
    jobs = []
    for c, start in enumerate(range(0, trials, CHUNK_TRIALS)):
        size = min(CHUNK_TRIALS, trials - start)
        jobs.append(ChunkJob(code, schedule, noise, table, cycles, size, seed, c, shared_coin))
    return jobs


def run_memory_experiment(code: StabilizerCode, schedule: CycleSchedule, noise: NoiseParams,
                          cycles: int, trials: int, master_seed: int,
                          table: DecodeTable | None = None, workers: int = 1,
                          shared_coin: bool = False) -> FidelityCurve:
    """Average 6-state fidelity after each cycle.

    Trials are split into fixed-size chunks seeded by (master_seed, chunk
    index) and summed as integers, so the result does not depend on
    ``workers``.
    """
    if cycles < 2 or trials < 1:
        raise ValueError("need cycles >= 2 and trials >= 1")
    if table is None or not table.matches(code):
        raise ValueError(f"a decode table for {code.name} is required")
    jobs = _chunk_jobs(code, schedule, noise, table, cycles, trials, master_seed, shared_coin)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, jobs))
    else:
        results = [run_chunk(j) for j in jobs]
    total = np.zeros(cycles, np.int64)
    misses = 0
    for sums, miss in results:
        total += sums
        misses += miss
    times = np.arange(1, cycles + 1) * schedule.full_cycle_time / 1000.0
    return FidelityCurve(times_us=times, fidelity=total / (6.0 * trials),
                         trials=trials, misses=misses)


def _ols(x: np.ndarray, y: np.ndarray):
    """Slope, intercept and their standard errors and covariance."""
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0:
        raise FitError("abscissae are all equal")
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    s2 = float((resid ** 2).sum()) / (n - 2) if n > 2 else 0.0
    var_slope = s2 / sxx
    var_int = s2 * (1.0 / n + xm ** 2 / sxx)
    cov = -xm * s2 / sxx
    return slope, float(intercept), math.sqrt(var_slope), math.sqrt(var_int), cov


def fit_fidelity(curve: FidelityCurve, floor_margin: float = DEFAULT_FLOOR_MARGIN) -> FitResult:
    """Fit F(t) = 1/2 + 1/2 (1 - 2 eps)^(t - t0) by least squares on ln(2F - 1)."""
    t = np.asarray(curve.times_us, float)
    f = np.asarray(curve.fidelity, float)
    keep = f > 0.5 + floor_margin
    if keep.sum() < 3:
        raise FitError(f"only {int(keep.sum())} points above the floor; "
                       "lower p_b or the number of cycles")
    t, y = t[keep], np.log(2.0 * f[keep] - 1.0)
    b, a, sb, sa, cov = _ols(t, y)
    lam = math.exp(b)
    eps = (1.0 - lam) / 2.0
    eps_se = lam * sb / 2.0
    if b == 0.0:
        t0, t0_se = 0.0, float("inf") if sb else 0.0
    else:
        t0 = -a / b
        var = sa ** 2 / b ** 2 + a ** 2 * sb ** 2 / b ** 4 - 2 * a * cov / b ** 3
        t0_se = math.sqrt(max(var, 0.0))
    return FitResult(epsilon_L=eps, t0=t0, epsilon_L_stderr=eps_se,
                     t0_stderr=t0_se, points_used=int(keep.sum()))


def fit_slope(code_name: str, points, min_decades: float = 0.5) -> SlopeResult:
    """Ordinary least squares of ln(eps_L) on ln(p_b)."""
    usable, excluded = [], []
    for p, eps in points:
        if eps > 0 and p > 0:
            usable.append((p, eps))
        else:
            log.warning("%s: dropping p_b=%g with epsilon_L=%g", code_name, p, eps)
            excluded.append(p)
    if len(usable) < 3:
        raise FitError(f"{code_name}: {len(usable)} usable sweep points, need 3")
    ps = np.array([p for p, _ in usable])
    if math.log10(ps.max() / ps.min()) < min_decades:
        raise FitError(f"{code_name}: p_b values span less than {min_decades} decade")
    x = np.log(ps)
    y = np.log([e for _, e in usable])
    b, a, sb, _, _ = _ols(x, y)
    return SlopeResult(code=code_name, points=usable, slope=b, intercept=a,
                       slope_stderr=sb, excluded=excluded)


@dataclass
class SweepRow:
    family: str
    d: int
    n: int
    p_b: float
    p_d: float
    epsilon_L: float
    epsilon_L_stderr: float
    t0: float
    trials: int
    cycles: int
    misses: int
    seed: int


@dataclass
class SweepResult:
    rows: list[SweepRow]
    curves: list[FidelityCurve]
    slope: SlopeResult | None
    wall_clock_s: float


def sweep_and_fit_slope(code: StabilizerCode, schedule: CycleSchedule, table: DecodeTable,
                        p_b_values, cycles: int, trials: int, master_seed: int,
                        workers: int = 1, floor_margin: float = DEFAULT_FLOOR_MARGIN,
                        split=(1 / 3, 1 / 3, 1 / 3), shared_coin: bool = False,
                        progress=None) -> SweepResult:
    start = time.perf_counter()
    rows, curves = [], []
    for p_b in p_b_values:
        noise = NoiseParams.from_ratio(float(p_b), schedule.pd_ratio, split)
        curve = run_memory_experiment(code, schedule, noise, cycles, trials, master_seed,
                                      table, workers, shared_coin)
        try:
            fit = fit_fidelity(curve, floor_margin)
            eps, eps_se, t0 = fit.epsilon_L, fit.epsilon_L_stderr, fit.t0
        except FitError as exc:
            log.warning("%s p_b=%g: %s", code.name, p_b, exc)
            eps = eps_se = t0 = float("nan")
        rows.append(SweepRow(code.family, code.distance, code.n, float(p_b), noise.p_d,
                             eps, eps_se, t0, trials, cycles, curve.misses, master_seed))
        curves.append(curve)
        if progress:
            progress(rows[-1])
    points = [(r.p_b, r.epsilon_L) for r in rows if not math.isnan(r.epsilon_L)]
    slope = fit_slope(code.name, points)
    return SweepResult(rows, curves, slope, time.perf_counter() - start)


def sweep_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in asdict(r).values()])
    return buf.getvalue()


def read_sweep_csv(text: str) -> list[SweepRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(SweepRow(
            family=rec["family"], d=int(rec["d"]), n=int(rec["n"]),
            p_b=float(rec["p_b"]), p_d=float(rec["p_d"]),
            epsilon_L=float(rec["epsilon_L"]), epsilon_L_stderr=float(rec["epsilon_L_stderr"]),
            t0=float(rec["t0"]), trials=int(rec["trials"]), cycles=int(rec["cycles"]),
            misses=int(rec["misses"]), seed=int(rec["seed"])))
    return rows


def plot_data(slope: SlopeResult) -> str:
    """Two columns (ln p_b, ln eps_L) with the fitted line in the header."""
    lines = [f"# code {slope.code}",
             f"# slope {slope.slope!r} stderr {slope.slope_stderr!r} intercept {slope.intercept!r}",
             "# ln_p_b ln_epsilon_L"]
    for p, e in slope.points:
        lines.append(f"{math.log(p)!r} {math.log(e)!r}")
    return "\n".join(lines) + "\n"
