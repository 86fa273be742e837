"""Configuraciones de extremo a extremo con muestras grandes (marcadas como slow)."""

import math

import numpy as np
import pytest

from criteria import evaluate_criterion, single_site_b, thm1_b, thm2_lhs
from dynamical import EnergyWindow, SpectralDecomposition, dyn_profile, spectral_tv
from ensemble import DisorderDistribution, HoppingKernel, OperatorEnsemble, assemble, sample_potential
from lattice import box_region, enlarge, site_distance
from moments import decay_fit, moment_profile
from propagate import TemperedKernel, combes_thomas_bound, envelope_from_criterion
from regularity import estimate_constants
from resolvent import SpectralParameter, dense_green_matrix
from sweep_cli import verify_suite

pytestmark = pytest.mark.slow

UNIFORM = DisorderDistribution()


def _ensemble(d, lam, seed=0, flux=None):
    return OperatorEnsemble(HoppingKernel(dim=d, peierls_flux=flux), UNIFORM, lam, None, seed)


@pytest.fixture(scope='module')
def half_constants():
    return estimate_constants(UNIFORM, 0.5, 8, 0)


@pytest.fixture(scope='module')
def decoupled_constants():
    return estimate_constants(UNIFORM, 0.2, 8, 0)


def test_fast_verification_suite_passes():
    report = verify_suite('fast', seed=0)
    assert report.failures == []
    assert report.exit_code == 0
    assert verify_suite('fast', seed=0).to_json() == report.to_json()


def test_verification_negative_control():
    report = verify_suite('fast', {'identity': 1e-20}, seed=0)
    assert report.exit_code == 1
    assert 'identity_residuals' in report.failures


def test_single_site_criterion_high_disorder(half_constants):
    at_40 = single_site_b(UNIFORM, 40.0, 0.0, 0.5, 2, half_constants)
    assert at_40.lhs == pytest.approx(24 * half_constants.C_s / 40.0, rel=1e-6)
    assert single_site_b(UNIFORM, 400.0, 0.0, 0.5, 2, half_constants).passed


def test_two_dimensional_profile_decays():
    ensemble = _ensemble(2, 40.0, seed=1)
    box = box_region((0, 0), 8, 2)
    profile = moment_profile(ensemble, box, (0, 0), list(box), 0.0, 0.5, 2000, pool_shells=True)
    fit = decay_fit(profile)
    assert fit.r_squared > 0.98
    assert fit.mu > 0.3


def test_profile_respects_criterion_envelope(half_constants):
    ensemble = _ensemble(1, 30.0, seed=2)
    Lambda = box_region((0,), 2, 1)
    report = thm1_b(ensemble, Lambda, 0.0, 0.5, 2000, None, half_constants)
    assert report.passed
    lambda_plus = enlarge(Lambda)
    kernel = TemperedKernel.from_cut_set(lambda_plus)
    envelope = envelope_from_criterion(report.lhs, Lambda, half_constants.a_priori_bound(30.0), kernel,
                                       L=report.details['scale_L'])
    box = box_region((0,), 20, 1)
    profile = moment_profile(ensemble, box, (0,), [(k,) for k in range(13)], 0.0, 0.5, 2000)
    for estimate in profile.estimates:
        bound = envelope.pointwise(estimate.distance)
        assert estimate.mean - 3 * estimate.stderr <= bound


def test_linear_criterion_passes_at_some_scale(decoupled_constants):
    ensemble = _ensemble(1, 1e4, seed=3)
    passed = [thm2_lhs(ensemble, box_region((0,), L, 1), 0.0, 0.2, 500, decoupled_constants).passed
              for L in range(1, 7)]
    assert any(passed)


def test_combes_thomas_bound_on_samples():
    rng = np.random.default_rng(8)
    for k in range(40):
        d = 1 if k % 2 == 0 else 2
        ensemble = _ensemble(d, float(rng.uniform(0.5, 5.0)), seed=k, flux=0.3 if k % 4 == 1 else None)
        region = box_region([0] * d, 6 if d == 1 else 3, d)
        eta = float(rng.uniform(0.5, 4.0))
        z = SpectralParameter(float(rng.uniform(-3.0, 3.0)), eta)
        G = dense_green_matrix(assemble(ensemble, sample_potential(ensemble, region, k)), z)
        origin = tuple([0] * d)
        i = region.index(origin)
        for y in region:
            bound = combes_thomas_bound(ensemble.hopping, eta, site_distance(origin, y))
            assert abs(G[i, region.index(y)]) <= bound * (1 + 1e-12)


def test_dynamical_profile_decays():
    ensemble = _ensemble(1, 5.0, seed=4)
    box = box_region((0,), 20, 1)
    targets = [(k,) for k in range(21)]
    profile = dyn_profile(ensemble, box, (0,), targets, None, np.linspace(0.0, 20.0, 41), 200)
    assert np.all(profile.gridmax <= profile.tv * (1 + 1e-9) + 1e-12)
    fit = decay_fit(profile.tv_frame(), (3, 12))
    assert fit.r_squared > 0.95
    assert fit.mu > 0

    dec = SpectralDecomposition.from_hamiltonian(assemble(ensemble, sample_potential(ensemble, box, 0)))
    for x in [(-20,), (0,), (7,)]:
        assert spectral_tv(dec, x, x, EnergyWindow.real_line()) == pytest.approx(1.0, abs=1e-10)


def test_reports_identical_across_threads(half_constants):
    ensemble = _ensemble(2, 20.0, seed=5)
    params = {'L': 2, 'n': 300, 's': 0.5, 'energy': 0.3}
    single = evaluate_criterion('thm1', ensemble, dict(params, threads=1), half_constants)
    pooled = evaluate_criterion('thm1', ensemble, dict(params, threads=8), half_constants)
    assert single.to_json() == pooled.to_json()
    assert math.isfinite(single.lhs)
