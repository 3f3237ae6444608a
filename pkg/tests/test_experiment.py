import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringqec.codes import LogicalCoset
from ringqec.experiment import (
    CHUNK_TRIALS,
    SWEEP_CSV_COLUMNS,
    FidelityCurve,
    FitError,
    cardinal_fidelity,
    fit_fidelity,
    fit_slope,
    plot_data,
    read_sweep_csv,
    run_memory_experiment,
    sweep_and_fit_slope,
    sweep_csv,
    trial_fidelity,
)
from ringqec.noise import X, Z, ErrorTrack, NoiseParams
from ringqec.syndrome import simulate_trial


def exact_curve(eps, t0, times):
    f = 0.5 + 0.5 * (1.0 - 2.0 * eps) ** (times - t0)
    return FidelityCurve(times, f, trials=1, misses=0)


def test_cardinal_fidelity_values():
    assert cardinal_fidelity(LogicalCoset.I, 0) == 1.0
    for c in (LogicalCoset.X, LogicalCoset.Y, LogicalCoset.Z):
        assert cardinal_fidelity(c, 0) == pytest.approx(1 / 3)
    assert cardinal_fidelity(LogicalCoset.I, 0b101) == 0.0


def test_trial_fidelity(d3):
    code, sched, _ = d3
    track = ErrorTrack(np.zeros((3, 5), np.uint8), np.zeros((3, 5), np.uint8))
    for k in range(5):
        track.between[0, k] = Z          # Z on every qubit is the logical Z
    trace = simulate_trial(code, sched, track, seed=0)
    assert trial_fidelity(code, trace, [0, 0, 0]).tolist() == pytest.approx([1, 1 / 3, 1 / 3])
    assert trial_fidelity(code, trace, [0, 2, 2]).tolist() == [1.0, 1.0, 1.0]
    # an uncorrected syndrome leaves the state outside the code space
    track.between[1, 0] = X
    trace = simulate_trial(code, sched, track, seed=0)
    assert trial_fidelity(code, trace, [0, 2, 2], applied=[0, 0, 0])[2] == 0.0
    with pytest.raises(ValueError):
        trial_fidelity(code, trace, [0, 0])


def test_fit_fidelity_hand_example():
    # eps = 0.005, t0 = 0: one microsecond later F = 1/2 + 0.99/2
    times = np.arange(1, 11, dtype=float)
    curve = exact_curve(0.005, 0.0, times)
    assert curve.fidelity[0] == pytest.approx(0.995)
    fit = fit_fidelity(curve)
    assert fit.epsilon_L == pytest.approx(0.005, abs=1e-12)
    assert fit.t0 == pytest.approx(0.0, abs=1e-9)
    assert fit.points_used == 10


@settings(max_examples=50)
@given(st.floats(1e-4, 0.05), st.floats(-2.0, 2.0))
def test_fit_fidelity_roundtrip(eps, t0):
    times = np.arange(1, 51) * 0.906
    fit = fit_fidelity(exact_curve(eps, t0, times), floor_margin=0.0)
    assert abs(fit.epsilon_L - eps) < 1e-9
    assert abs(fit.t0 - t0) < 1e-9 * max(1.0, 1.0 / (eps * 50))
    assert fit.epsilon_L_stderr < 1e-9


def test_fit_fidelity_flat_curve():
    curve = FidelityCurve(np.arange(1, 6, dtype=float), np.ones(5), 1, 0)
    fit = fit_fidelity(curve)
    assert fit.epsilon_L == 0.0 and fit.epsilon_L_stderr == 0.0


def test_fit_fidelity_floor_exclusion():
    times = np.arange(1, 51, dtype=float)
    curve = exact_curve(0.05, 0.0, times)
    fit = fit_fidelity(curve, floor_margin=0.02)
    assert fit.points_used == int((curve.fidelity > 0.52).sum()) < 50
    assert fit.epsilon_L == pytest.approx(0.05, abs=1e-9)
    with pytest.raises(FitError, match="above the floor"):
        fit_fidelity(exact_curve(0.45, 0.0, times))


def test_fit_slope_power_law():
    ps = np.geomspace(3e-3, 3e-2, 5)
    res = fit_slope("linear-d5", [(p, 7.0 * p ** 3) for p in ps])
    assert abs(res.slope - 3.0) < 1e-9
    assert res.intercept == pytest.approx(math.log(7.0))


def test_fit_slope_rejections(caplog):
    with pytest.raises(FitError, match="need 3"):
        fit_slope("c", [(1e-3, 1e-6), (1e-2, 1e-3)])
    with pytest.raises(FitError, match="decade"):
        fit_slope("c", [(1e-2, 1e-4), (1.2e-2, 2e-4), (1.4e-2, 3e-4)])
    res = fit_slope("c", [(1e-3, 0.0), (1e-3, 1e-6), (1e-2, 1e-4), (1e-1, 1e-2)])
    assert res.excluded == [1e-3] and res.slope == pytest.approx(2.0)
    assert "dropping" in caplog.text


def test_noiseless_run_stays_at_one(d5):
    code, sched, table = d5
    curve = run_memory_experiment(code, sched, NoiseParams(0.0, 0.0), 10, 200, 1, table)
    assert curve.fidelity.tolist() == [1.0] * 10 and curve.misses == 0
    assert curve.times_us[0] == pytest.approx(sched.full_cycle_time / 1000)


def test_run_rejects_wrong_table(d3, d5):
    code, sched, _ = d3
    with pytest.raises(ValueError, match="table"):
        run_memory_experiment(code, sched, NoiseParams(0.01, 0.0), 5, 10, 1, d5[2])


def test_worker_count_does_not_change_results(d3):
    code, sched, table = d3
    noise = NoiseParams(0.02, 0.01)
    trials = 2 * CHUNK_TRIALS + 100
    a = run_memory_experiment(code, sched, noise, 8, trials, 77, table, workers=1)
    b = run_memory_experiment(code, sched, noise, 8, trials, 77, table, workers=3)
    assert np.array_equal(a.fidelity, b.fidelity) and a.misses == b.misses
    c = run_memory_experiment(code, sched, noise, 8, trials, 78, table)
    assert not np.array_equal(a.fidelity, c.fidelity)


def test_more_distance_decays_slower_at_low_noise(d3, d5):
    # under the default noise ratio the two codes cross near p_b = 3e-3
    eps = []
    for code, sched, table in (d3, d5):
        noise = NoiseParams.from_ratio(1.5e-3, sched.pd_ratio)
        curve = run_memory_experiment(code, sched, noise, 50, 20000, 5, table)
        eps.append(fit_fidelity(curve).epsilon_L)
    assert eps[1] < eps[0]


def test_sweep_csv_roundtrip_and_plot(d3):
    code, sched, table = d3
    res = sweep_and_fit_slope(code, sched, table, [0.01, 0.02, 0.04], 20, 3000, 11)
    text = sweep_csv(res.rows)
    assert text.splitlines()[0] == ",".join(SWEEP_CSV_COLUMNS)
    back = read_sweep_csv(text)
    assert back == res.rows
    assert sweep_csv(back) == text
    assert res.slope.slope > 1.0
    lines = plot_data(res.slope).splitlines()
    assert lines[0] == "# code linear-d3"
    assert len(lines) == 3 + 3
    x, y = map(float, lines[3].split())
    assert x == pytest.approx(math.log(0.01))
    assert y == pytest.approx(math.log(res.rows[0].epsilon_L))


def test_curve_dict_roundtrip():
    c = exact_curve(0.01, 0.1, np.arange(1, 4, dtype=float))
    back = FidelityCurve.from_dict(c.as_dict())
    assert np.array_equal(back.fidelity, c.fidelity) and back.trials == 1
