import math

import numpy as np
import pandas as pd
import pytest

from ensemble import DisorderDistribution, HoppingKernel, OperatorEnsemble
from lattice import Region, box_region, norm_inf
from moments import (
    BLOCK_MEANS,
    PLAIN_MEAN,
    MomentEstimationError,
    MomentEstimate,
    apriori_check,
    conditional_wegner_check,
    decay_fit,
    decoupled_resolvent_check,
    depleted_resolvent_check,
    fractional_moment,
    full_resolvent_check,
    moment_profile,
    shell_pool,
    summarize,
    variance_ratio,
)
from regularity import user_supplied_constants
from resolvent import SpectralParameter


def _no_hopping(lam=1.0, seed=0):
    return OperatorEnsemble(HoppingKernel(dim=1, kind='none'), DisorderDistribution(), lam, None, seed)


def test_summarize_plain_mean():
    values = np.array([1.0, 2.0, 3.0, 4.0])
    mean, stderr, estimator, blocks = summarize(values, 0.25, 1.0)
    assert mean == 2.5
    assert stderr == pytest.approx(np.std(values, ddof=1) / 2.0)
    assert estimator == PLAIN_MEAN
    assert blocks is None


def test_summarize_heavy_tail_uses_blocks():
    values = np.arange(100, dtype=float)
    mean, stderr, estimator, blocks = summarize(values, 0.5, 1.0)
    assert estimator == BLOCK_MEANS
    assert blocks == 10
    assert mean == pytest.approx(49.5)
    assert stderr > 0


def test_summarize_heavy_tail_outlier_keeps_mean_with_block_error():
    values = np.ones(100)
    values[0] = 1e6
    mean, stderr, estimator, blocks = summarize(values, 0.5, 1.0)
    assert estimator == BLOCK_MEANS
    assert blocks == 10
    # la estimación es la media muestral, no la mediana de las medias de bloque
    assert mean == pytest.approx(10000.99)
    block_means = np.array([100000.9] + [1.0] * 9)
    assert stderr == pytest.approx(np.std(block_means, ddof=1) / math.sqrt(10))
    assert abs(mean - 1.0) <= 3 * stderr


def test_variance_ratio():
    assert variance_ratio([1.0, 1.0, 1.0, 1.0]) == 1.0
    with pytest.raises(ValueError):
        variance_ratio([1.0, 2.0])


def test_closed_form_moment_oracle():
    estimate = fractional_moment(_no_hopping(), Region([(0,)]), (0,), (0,), 0.0, 0.5, 100000)
    assert estimate.estimator == BLOCK_MEANS
    assert estimate.blocks == 317
    assert abs(estimate.mean - 2.0) <= 4 * estimate.stderr
    assert estimate.stderr < 0.02 * estimate.mean


def test_closed_form_moment_finite_variance():
    estimate = fractional_moment(_no_hopping(), Region([(0,)]), (0,), (0,), 0.0, 0.25, 20000)
    assert estimate.estimator == PLAIN_MEAN
    assert abs(estimate.mean - 4.0 / 3.0) <= 4 * estimate.stderr


def test_off_diagonal_moment_vanishes_without_hopping():
    estimate = fractional_moment(_no_hopping(), box_region((0,), 2), (0,), (2,), SpectralParameter(0.0, 0.1), 0.5, 50)
    assert estimate.mean == 0.0


def test_estimate_is_deterministic(uniform_1d):
    region = box_region((0,), 4)
    a = fractional_moment(uniform_1d, region, (0,), (3,), SpectralParameter(0.2, 0.01), 0.3, 200, threads=1)
    b = fractional_moment(uniform_1d, region, (0,), (3,), SpectralParameter(0.2, 0.01), 0.3, 200, threads=4)
    assert a.mean == b.mean
    assert a.stderr == b.stderr


def test_sparse_and_dense_paths_agree():
    ensemble = OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution(), 10.0, None, 1)
    region = box_region((0,), 2)
    sparse_est = fractional_moment(ensemble, region, (-2,), (2,), 0.0, 0.5, 100)
    dense_est = fractional_moment(ensemble, region, (-2,), (2,), 0.0, 0.5, 100, solver='dense')
    assert dense_est.mean == pytest.approx(sparse_est.mean, rel=1e-10)


def test_profile_matches_independent_estimates(uniform_1d):
    region = box_region((0,), 5)
    targets = [(1,), (3,), (-5,)]
    z = SpectralParameter(0.1, 0.0)
    profile = moment_profile(uniform_1d, region, (0,), targets, z, 0.3, 150, threads=1)
    for estimate, y in zip(profile.estimates, targets):
        single = fractional_moment(uniform_1d, region, (0,), y, z, 0.3, 150, threads=1)
        assert estimate.mean == single.mean
        assert estimate.stderr == single.stderr


def test_profile_frames(uniform_2d):
    region = box_region((0, 0), 2)
    targets = sorted(region, key=lambda y: (norm_inf(y), y))
    profile = moment_profile(uniform_2d.with_lambda(8.0), region, (0, 0), targets, 0.0, 0.25, 60)
    frame = profile.to_frame()
    assert list(frame.columns) == ['site', 'distance', 'mean', 'stderr', 'n']
    assert len(frame) == 25
    pooled = shell_pool(profile)
    assert pooled['distance'].tolist() == [0, 1, 2]
    sup = profile.shell_sup()
    assert sup[1] >= pooled.loc[pooled['distance'] == 1, 'mean'].iloc[0]


@pytest.mark.parametrize("s,n", [(0.0, 10), (1.0, 10), (0.5, 1)])
def test_invalid_moment_arguments(uniform_1d, s, n):
    with pytest.raises(ValueError):
        fractional_moment(uniform_1d, box_region((0,), 2), (0,), (1,), 0.1j, s, n)


def test_sites_outside_region(uniform_1d):
    with pytest.raises(ValueError):
        fractional_moment(uniform_1d, box_region((0,), 2), (0,), (9,), 0.1j, 0.3, 10)


def test_failed_samples_abort_estimation(uniform_1d, monkeypatch):
    monkeypatch.setenv('FMLOC_CONDITION_LIMIT', '1e-3')
    with pytest.raises(MomentEstimationError) as info:
        fractional_moment(uniform_1d, box_region((0,), 2), (0,), (1,), 0.1j, 0.3, 10)
    assert info.value.failed_count == 10
    assert info.value.failed_indices == list(range(10))


def test_decay_fit_exact_exponential():
    d = np.arange(8)
    frame = pd.DataFrame({'distance': d, 'mean': 3.0 * np.exp(-0.7 * d), 'stderr': 0.01 * np.exp(-0.7 * d)})
    fit = decay_fit(frame)
    assert fit.mu == pytest.approx(0.7)
    assert fit.A == pytest.approx(3.0)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.window == (0.0, 7.0)


def test_decay_fit_with_multiplicative_noise():
    rng = np.random.default_rng(11)
    d = np.arange(10)
    hits = 0
    for _ in range(100):
        mean = 2.0 * np.exp(-0.5 * d) * (1 + 0.05 * rng.standard_normal(d.size))
        fit = decay_fit(pd.DataFrame({'distance': d, 'mean': mean}))
        hits += abs(fit.mu - 0.5) <= 0.05
    assert hits >= 95


def test_decay_fit_window_and_errors():
    d = np.arange(10)
    frame = pd.DataFrame({'distance': d, 'mean': np.exp(-d.astype(float))})
    fit = decay_fit(frame, (2, 6))
    assert fit.points == 5
    with pytest.raises(ValueError):
        decay_fit(frame, (0, 1))
    frame.loc[4, 'mean'] = 0.0
    with pytest.raises(ValueError):
        decay_fit(frame)
    with pytest.raises(ValueError):
        decay_fit(pd.DataFrame({'distance': d}))


def test_apriori_check_on_synthetic_estimates():
    constants = user_supplied_constants(1.0, 0.5, 1.0, 2.0)
    z = SpectralParameter(0.0)
    good = MomentEstimate(0.5, 0.01, 100, PLAIN_MEAN, 0.5, z, (0,), (1,), 'r')
    bad = MomentEstimate(1.5, 0.01, 100, PLAIN_MEAN, 0.5, z, (0,), (0,), 'r')
    assert apriori_check([good], constants, 4.0).passed
    check = apriori_check([good, bad], constants, 4.0)
    assert not check.passed
    assert check.lhs == 1.5
    assert check.margin < 0


def test_conditional_wegner(uniform_1d):
    constants = user_supplied_constants(1.0, 0.5, 1.0, 4.0)
    check = conditional_wegner_check(uniform_1d.with_lambda(5.0), 8, 0.5, 300, 3, constants)
    assert check.passed
    assert check.details['environments'] == 3
    with pytest.raises(ValueError):
        conditional_wegner_check(uniform_1d, 1, 0.5, 10, 1, constants)


def test_depleted_resolvent_inequality(uniform_1d):
    constants = user_supplied_constants(1.0, 0.5, 1.0, 4.0)
    omega = box_region((0,), 5)
    W = Region([(-5,), (-4,), (-3,)])
    check = depleted_resolvent_check(uniform_1d.with_lambda(5.0), omega, W, 0.5, 800, 0.0, constants)
    assert check.passed
    assert check.details['y'] == [5]


def test_decoupled_and_full_resolvent_inequalities(uniform_1d):
    constants = user_supplied_constants(1.0, 0.2, 1.0, 3.0, 3.0)
    ensemble = uniform_1d.with_lambda(5.0)
    omega = box_region((0,), 5)
    W = Region([(-5,), (-4,), (-3,)])
    assert decoupled_resolvent_check(ensemble, omega, W, 0.2, 800, 0.0, constants).passed
    assert full_resolvent_check(ensemble, omega, W, 0.2, 800, 0.0, constants).passed


def test_decoupling_checks_need_finite_constant(uniform_1d):
    constants = user_supplied_constants(1.0, 0.5, 1.0, 2.0, None)
    omega = box_region((0,), 5)
    W = Region([(-5,), (-4,)])
    with pytest.raises(RuntimeError):
        full_resolvent_check(uniform_1d, omega, W, 0.5, 10, 0.0, constants)
