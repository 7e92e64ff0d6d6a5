import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from urnctrw.errors import HorizonExceededError, InvalidParameterError, PathTooShortError
from urnctrw.heavy_tails import (
    RenewalSample,
    SubordinatorPath,
    WaitingLaw,
    WaitingTimeModel,
    check_beta,
    inverse_subordinator,
    renewal_count,
    sample_inverse_subordinator,
    sample_positive_stable,
    sample_renewal_until,
    sample_stable_subordinator_increment,
    sample_waiting_times,
    simulate_subordinator,
)
from urnctrw.mittag_leffler import mittag_leffler


def _within_3se(samples, target):
    se = samples.std(ddof=1) / math.sqrt(samples.size)
    return abs(samples.mean() - target) < 3 * se


def test_check_beta():
    assert check_beta(0.5) == 0.5
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(InvalidParameterError):
            check_beta(bad)


def test_laplace_transform_at_one():
    s = sample_stable_subordinator_increment(0.5, 1.0, np.random.default_rng(1), size=10**6)
    assert _within_3se(np.exp(-s), math.exp(-1.0))


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7, 0.9])
def test_laplace_transform_grid(beta):
    s = sample_positive_stable(beta, 10**5, np.random.default_rng(int(beta * 100)))
    for lam in (0.5, 1.0, 2.0):
        assert _within_3se(np.exp(-lam * s), math.exp(-lam ** beta))


def test_positive_stable_matches_closed_form_half():
    """beta = 1/2 stable law is Levy with scale 1/2: P(S <= x) = erfc(1/(2 sqrt x))."""
    s = sample_positive_stable(0.5, 10**5, np.random.default_rng(3))
    res = stats.kstest(s, lambda x: special.erfc(1 / (2 * np.sqrt(x))))
    assert res.pvalue > 0.01


def test_self_similarity():
    rng = np.random.default_rng(5)
    beta = 0.6
    four = sample_stable_subordinator_increment(beta, 4.0, rng, size=10**5)
    one = sample_stable_subordinator_increment(beta, 1.0, rng, size=10**5)
    assert stats.ks_2samp(four, 4 ** (1 / beta) * one).pvalue > 0.01


def test_outputs_positive_and_scalar_form():
    rng = np.random.default_rng(0)
    assert np.all(sample_positive_stable(0.3, 10**5, rng) > 0)
    assert isinstance(sample_stable_subordinator_increment(0.7, 0.5, rng), float)
    with pytest.raises(InvalidParameterError):
        sample_stable_subordinator_increment(0.7, 0.0, rng)


def test_subordinator_path_strictly_increasing():
    p = simulate_subordinator(0.7, 1e-3, 2.0, np.random.default_rng(9))
    assert p.values[0] == 0.0
    assert np.diff(p.values).min() > 0
    assert p.values[-1] > 2.0


def test_inverse_subordinator_examples():
    p = simulate_subordinator(0.5, 1e-3, 3.0, np.random.default_rng(2))
    assert 0 <= inverse_subordinator(p, 0.0) <= 1e-3
    ts = np.linspace(0, 3, 50)
    vals = [inverse_subordinator(p, t) for t in ts]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    # bracketing: D at x* exceeds t, D one step earlier does not
    x = inverse_subordinator(p, 1.7)
    k = round(x / 1e-3)
    assert p.values[k] > 1.7 >= p.values[k - 1]


def test_inverse_subordinator_too_short():
    p = SubordinatorPath(0.1, [0.0, 0.5, 1.0])
    with pytest.raises(PathTooShortError) as exc:
        inverse_subordinator(p, 1.25)
    assert exc.value.deficit == pytest.approx(0.25)


def test_vectorized_inverse_equals_single_path_definition():
    # one row in one block draws the same increments as simulate_subordinator
    h, beta = 1e-2, 0.6
    a = sample_inverse_subordinator(beta, 1.0, h, 1, np.random.default_rng(4), block=4096)
    path = simulate_subordinator(beta, h, 1.0, np.random.default_rng(4), block=4096)
    assert a[0] == pytest.approx(inverse_subordinator(path, 1.0), abs=1e-12)


def test_inverse_subordinator_mean_half():
    e = sample_inverse_subordinator(0.5, 1.0, 1e-3, 10**5, np.random.default_rng(12))
    # moment identity E[E_1] = 1/Gamma(1.5); grid inversion adds a bias of at most h
    target = 1 / math.gamma(1.5)
    assert target == pytest.approx(1.128379, abs=1e-6)
    assert _within_3se(e, target) or _within_3se(e - 1e-3, target)


def test_inverse_subordinator_law_is_mittag_leffler():
    """P(E_1 <= x) = P(D_x >= 1); the Laplace transform of E_1 is E_beta(-s)."""
    beta = 0.7
    e = sample_inverse_subordinator(beta, 1.0, 1e-3, 20000, np.random.default_rng(8))
    for s in (0.5, 2.0):
        assert _within_3se(np.exp(-s * (e - 5e-4)), mittag_leffler(beta, -s))


def test_pareto_tail():
    m = WaitingTimeModel(0.6, law="pareto")
    g = m.sample(10**6, np.random.default_rng(1))
    assert g.min() >= m.pareto_t0
    assert _within_3se((g > 10 * m.pareto_t0).astype(float), 10 ** -0.6)


def test_pareto_calibration_constant():
    beta = 0.7
    assert WaitingTimeModel(beta).pareto_t0 == pytest.approx(math.gamma(0.3) ** (-1 / beta))


def test_stable_sums_are_stable():
    beta, n = 0.7, 1000
    m = WaitingTimeModel(beta, law=WaitingLaw.POSITIVE_STABLE)
    rng = np.random.default_rng(6)
    sums = np.array([sample_waiting_times(m, n, rng).horizon for _ in range(2000)]) * n ** (-1 / beta)
    ref = sample_positive_stable(beta, 10**5, rng)
    assert stats.ks_2samp(sums, ref).pvalue > 0.01


@pytest.mark.parametrize("beta", [0.5, 0.7, 0.8])
def test_pareto_sums_carry_predicted_drift_bias(beta):
    """n^(-1/beta) T_n has Laplace exponent s^beta - c s n^(1 - 1/beta), c = t0 beta / (1 - beta)."""
    n = 2000
    m = WaitingTimeModel(beta)
    sums = m.sample((20000, n), np.random.default_rng(10)).sum(axis=1) * n ** (-1 / beta)
    c = m.pareto_t0 * beta / (1 - beta)
    for s in (0.5, 1.0, 2.0):
        assert _within_3se(np.exp(-s * sums), math.exp(-s ** beta + c * s * n ** (1 - 1 / beta)))


@pytest.mark.parametrize("beta", [0.5, 0.7])
def test_rescaled_pareto_renewal_inverse_matches_inverse_subordinator(beta):
    n = 10**4
    m = WaitingTimeModel(beta)
    rng = np.random.default_rng(1)
    horizon = n ** (1 / beta)
    counts = np.array([renewal_count(sample_renewal_until(m, horizon, rng), horizon)
                       for _ in range(10**4)]) / n
    e = sample_inverse_subordinator(beta, 1.0, 1e-3, 10**4, np.random.default_rng(2))
    assert stats.ks_2samp(counts, e).statistic < 0.05


def test_rescaled_stable_renewal_inverse_matches_inverse_subordinator():
    beta, n = 0.9, 10**4
    m = WaitingTimeModel(beta, law="stable")
    rng = np.random.default_rng(21)
    horizon = n ** (1 / beta)
    counts = np.array([renewal_count(sample_renewal_until(m, horizon, rng), horizon)
                       for _ in range(3000)]) / n
    e = sample_inverse_subordinator(beta, 1.0, 1e-3, 10**4, np.random.default_rng(22))
    assert stats.ks_2samp(counts, e).statistic < 0.05


def test_waiting_times_examples():
    m = WaitingTimeModel(0.5)
    s = sample_waiting_times(m, 1, np.random.default_rng(0))
    assert s.partial_sums.shape == (2,)
    assert s.partial_sums[1] > 0
    with pytest.raises(InvalidParameterError):
        sample_waiting_times(m, 0, np.random.default_rng(0))


def test_deterministic_law():
    m = WaitingTimeModel(1.0, law="deterministic")
    s = sample_waiting_times(m, 5, np.random.default_rng(0))
    assert s.partial_sums.tolist() == [0, 1, 2, 3, 4, 5]
    with pytest.raises(InvalidParameterError):
        WaitingTimeModel(0.5, law="deterministic")
    with pytest.raises(InvalidParameterError):
        WaitingTimeModel(1.0)


def test_renewal_count_examples():
    s = RenewalSample([0.0, 1.0, 2.0, 3.0, 4.0])
    assert renewal_count(s, 0.5) == 0
    assert renewal_count(s, 2.0) == 2
    assert renewal_count(s, 2.5) == 2
    assert renewal_count(s, 4.0) == 4
    with pytest.raises(HorizonExceededError):
        renewal_count(s, 4.01)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31), beta=st.floats(0.2, 0.95), horizon=st.floats(0, 1e4))
def test_renewal_until_covers_horizon(seed, beta, horizon):
    s = sample_renewal_until(WaitingTimeModel(beta), horizon, np.random.default_rng(seed))
    assert s.horizon > horizon
    assert np.all(np.diff(s.partial_sums) >= 0)
    r = renewal_count(s, horizon)
    assert s.partial_sums[r] <= horizon < s.partial_sums[r + 1]


def test_csv_exports():
    assert SubordinatorPath(0.5, [0.0, 1.0]).to_csv().splitlines() == \
        ["grid_time,value", "0.0,0.0", "0.5,1.0"]
    assert RenewalSample([0.0, 2.0]).to_csv().splitlines() == \
        ["index,partial_sum", "0,0.0", "1,2.0"]
