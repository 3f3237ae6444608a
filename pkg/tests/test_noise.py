import numpy as np
import pytest

from ringqec.noise import I, X, Y, Z, NoiseParams, make_rng, sample_track, sample_tracks


def test_zero_noise_is_identity():
    t = sample_track(NoiseParams(0.0, 0.0), 13, 50, seed=1)
    assert not t.during.any() and not t.between.any()
    assert t.pauli("during", 3).is_identity


def test_degenerate_all_x():
    t = sample_track(NoiseParams(1.0, 0.0, (1.0, 0.0, 0.0)), 5, 7, seed=2)
    assert (t.between == X).all()
    assert (t.during == I).all()


def test_reproducible():
    p = NoiseParams(0.05, 0.02)
    a, b = sample_track(p, 13, 20, seed=9), sample_track(p, 13, 20, seed=9)
    assert np.array_equal(a.during, b.during) and np.array_equal(a.between, b.between)
    c = sample_track(p, 13, 20, seed=10)
    assert not np.array_equal(a.between, c.between)


def test_counter_streams_independent_of_order():
    x = make_rng(5, 3).random(4)
    make_rng(5, 1).random(100)
    assert np.array_equal(make_rng(5, 3).random(4), x)


def test_between_rate_binomial():
    # 10^5 tracks of 13 qubits x 50 cycles; rate within 4 standard errors
    p, n, m, tracks = 0.01, 13, 50, 100_000
    rng = make_rng(123)
    hits = total = 0
    for _ in range(tracks // 5000):
        _, between = sample_tracks(NoiseParams(p, 0.0), n, m, 5000, rng)
        hits += int(np.count_nonzero(between))
        total += between.size
    se = np.sqrt(p * (1 - p) / total)
    assert abs(hits / total - p) < 4 * se


def test_letter_frequencies_chi_square():
    from scipy.stats import chisquare

    split = (0.5, 0.2, 0.3)
    p = 0.3
    _, between = sample_tracks(NoiseParams(p, 0.0, split), 20, 50, 1000, make_rng(7))
    counts = np.bincount(between.ravel(), minlength=4)[[I, X, Y, Z]]
    total = between.size
    expected = np.array([1 - p, p * split[0], p * split[1], p * split[2]]) * total
    assert chisquare(counts, expected).pvalue > 1e-3


@pytest.mark.parametrize("kwargs", [dict(p_b=-0.1, p_d=0), dict(p_b=0.1, p_d=1.5),
                                    dict(p_b=0.1, p_d=0, split=(0.5, 0.5, 0.5))])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        NoiseParams(**kwargs)


def test_from_ratio():
    assert NoiseParams.from_ratio(0.01, 0.5).p_d == pytest.approx(0.005)
