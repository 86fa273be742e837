import math

import numpy as np
import pytest

from criteria import (
    FAIL,
    FINITE_VOLUME,
    INCONCLUSIVE,
    INFINITE_VOLUME,
    PASS,
    CriterionReport,
    assemble_gate,
    binomial_estimate,
    bottom_tail_prob,
    default_family,
    evaluate_criterion,
    general_b,
    mobility_edge_diagnostic,
    multiscale_event_prob,
    power_gate,
    shell_supremum,
    single_site_b,
    spectrum_distance_prob,
    split_cut_weight,
    tails_moment_bound,
    thm1_b,
    thm2_lhs,
    verdict,
)
from criteria import probabilities
from ensemble import DisorderDistribution, HoppingKernel, OperatorEnsemble, xi_s
from lattice import Region, box_region
from moments import SampleTable, fractional_moment, moment_profile
from regularity import phi_s, user_supplied_constants
from resolvent import SpectralParameter

HALF = user_supplied_constants(1.0, 0.5, 1.0, 2.0, math.inf)
DECOUPLED = user_supplied_constants(1.0, 0.2, 1.0, 3.0, 3.0)


def _ensemble(d=1, lam=1.0, kind='nearest_neighbor', seed=2):
    return OperatorEnsemble(HoppingKernel(dim=d, kind=kind), DisorderDistribution(), lam, None, seed)


@pytest.mark.parametrize("lhs,unc,expected", [
    (0.5, 0.1, PASS),
    (0.9, 0.1, INCONCLUSIVE),
    (1.5, 0.1, FAIL),
    (1.0, 0.0, FAIL),
    (float('nan'), 0.0, INCONCLUSIVE),
])
def test_verdict_band(lhs, unc, expected):
    assert verdict(lhs, unc, 1.0, 3.0) == expected


def test_report_labels():
    report = CriterionReport('thm2', 0.2, 0.01, 1.0, PASS, certification='certified')
    assert report.label == 'certified pass'
    assert CriterionReport('thm2', 0.2, 0.01, 1.0, PASS).label == 'heuristic pass'
    assert CriterionReport('thm2', 2.0, 0.01, 1.0, FAIL).label == 'fail'
    with pytest.raises(ValueError):
        CriterionReport('unknown', 0.2, 0.0, 1.0, PASS)


def test_single_site_formula():
    report = single_site_b(DisorderDistribution(), 100.0, 0.0, 0.5, 2, HALF)
    assert report.lhs == pytest.approx(12 * (2.0 / 10.0) * (0.1 * 2.0), rel=1e-6)
    assert report.label == 'certified pass'
    weaker = single_site_b(DisorderDistribution(), 10.0, 0.0, 0.5, 2, HALF)
    assert weaker.lhs > report.lhs
    with pytest.raises(ValueError):
        single_site_b(DisorderDistribution(), 10.0, 0.0, 0.5, 4, HALF)


def test_thm2_single_site_matches_quadrature():
    ensemble = _ensemble(lam=10.0)
    report = thm2_lhs(ensemble, Region([(0,)]), 0.0, 0.2, 4000, DECOUPLED)
    K = DECOUPLED.C_tilde_s / 10.0 ** 0.2
    expected = (1 + 2 * K) ** 2 * 2 * 10.0 ** (-0.2) * phi_s(DisorderDistribution(), 0.0, 0.2)
    assert report.details['prefactor'] == pytest.approx((1 + 2 * K) ** 2)
    assert abs(report.lhs - expected) <= 4 * report.uncertainty
    assert report.verdict == FAIL


def test_thm2_evaluates_conjugate_energy():
    report = thm2_lhs(_ensemble(lam=30.0), box_region((0,), 1), SpectralParameter(0.1, 0.05), 0.2, 100, DECOUPLED)
    assert len(report.details['per_energy']) == 2
    assert report.lhs == max(report.details['per_energy'])


def test_thm2_infinite_decoupling_constant():
    report = thm2_lhs(_ensemble(lam=5.0), box_region((0,), 1), 0.0, 0.5, 50, HALF)
    assert math.isinf(report.lhs)
    assert report.verdict == FAIL
    assert 'reason' in report.details
    with pytest.raises(RuntimeError):
        thm2_lhs(_ensemble(), box_region((0,), 1), 0.0, 0.5, 50, user_supplied_constants(1.0, 0.5, 1.0, 2.0))


def test_default_family_is_nested():
    family = default_family(box_region((0,), 2))
    assert [len(W) for W in family] == [1, 3, 5]
    with pytest.raises(ValueError):
        default_family(box_region((5,), 1))


def test_thm1_matches_independent_moments():
    ensemble = _ensemble(lam=1000.0)
    Lambda = box_region((0,), 2)
    report = thm1_b(ensemble, Lambda, 0.0, 0.2, 300, constants=DECOUPLED, threads=1)
    factor = 2.0 * DECOUPLED.a_priori_bound(1000.0)
    direct = sum(fractional_moment(ensemble, Lambda, (0,), (u,), 0.0, 0.2, 300, threads=1).mean for u in (-2, 2))
    assert report.lhs == pytest.approx(factor * direct, rel=1e-12)
    assert report.details['family_size'] == 3
    assert report.details['per_subset'][:2] == [0.0, 0.0]
    assert report.passed
    assert report.details['mu'] > 0


def test_thm1_rejects_bad_family():
    Lambda = box_region((0,), 2)
    with pytest.raises(ValueError):
        thm1_b(_ensemble(), Lambda, 0.0, 0.2, 10, [Region([(1,)])], DECOUPLED)
    with pytest.raises(ValueError):
        thm1_b(_ensemble(), Lambda, 0.0, 0.2, 10)


def test_general_b_prefactor():
    ensemble = _ensemble(lam=40.0)
    report = general_b(ensemble, box_region((0,), 2), 0.0, 0.2, 100, constants=DECOUPLED)
    K = DECOUPLED.C_tilde_s / 40.0 ** 0.2
    assert report.kind == 'general'
    assert report.details['prefactor'] == pytest.approx(1 + 2 * K)


def test_power_gate_arithmetic():
    sup = math.exp(-10.0)
    assembly = assemble_gate(sup, 2, 20, FINITE_VOLUME, DECOUPLED, 40.0)
    assert assembly.gate == pytest.approx(20 ** 3 * sup)
    assert assembly.gate == pytest.approx(0.3632, rel=1e-3)
    assert assemble_gate(0.3, 1, 6, FINITE_VOLUME, DECOUPLED, 40.0).gate == pytest.approx(0.3)


def test_power_gate_is_monotone():
    values = [power_gate({3: sup, 4: sup / 2}, 1, 4, FINITE_VOLUME, DECOUPLED, 40.0).lhs
              for sup in (0.01, 0.1, 0.5)]
    assert values == sorted(values)


def test_gate_thresholds():
    finite = assemble_gate(0.01, 2, 6, FINITE_VOLUME, DECOUPLED, 40.0)
    infinite = assemble_gate(0.01, 2, 6, INFINITE_VOLUME, DECOUPLED, 40.0)
    assert infinite.shell_threshold < finite.shell_threshold
    assert finite.equivalent_B == pytest.approx(6 ** 3 * finite.shell_threshold)
    with pytest.raises(ValueError):
        assemble_gate(0.01, 2, 6, 'other', DECOUPLED, 40.0)


def test_split_cut_weight_nearest_neighbor():
    split = split_cut_weight(HoppingKernel(dim=2), 4, 0.5)
    assert split.far == 0.0
    assert split.total == pytest.approx(xi_s(HoppingKernel(dim=2), box_region((0, 0), 4), 0.5))


def test_shell_supremum_requires_shell():
    assert shell_supremum({2: 0.1, 3: 0.3, 9: 5.0}, 4) == (0.3, 0.0, 2)
    with pytest.raises(ValueError):
        shell_supremum({0: 1.0, 1: 0.5}, 6)


def test_mobility_edge_diagnostic_is_consistent():
    ensemble = _ensemble(lam=20.0)
    region = box_region((0,), 6)
    profile = moment_profile(ensemble, region, (0,), list(region), 0.0, 0.2, 200)
    report = mobility_edge_diagnostic(profile, 1, 6, DECOUPLED, lam=20.0)
    assert report.consistent
    assert report.fit is not None and report.fit.mu > 0


def test_binomial_estimate():
    estimate = binomial_estimate(np.array([True, False, False, False]), reference=0.5)
    assert estimate.probability == 0.25
    assert estimate.ci_low < 0.25 < estimate.ci_high
    assert estimate.below_reference is False
    with pytest.raises(ValueError):
        binomial_estimate(np.array([], dtype=bool))


def test_spectrum_distance_closed_forms():
    ensemble = _ensemble(kind='none')
    far = spectrum_distance_prob(ensemble, 0, 2.0, 0.5, 500)
    assert far.probability == 0.0
    estimate = spectrum_distance_prob(ensemble, 0, 0.0, 0.3, 4000)
    assert abs(estimate.probability - 0.3) <= 3 * math.sqrt(0.3 * 0.7 / 4000)
    wider = spectrum_distance_prob(ensemble, 0, 0.0, 0.4, 4000)
    assert wider.successes >= estimate.successes


def test_spectrum_distance_reference():
    estimate = spectrum_distance_prob(_ensemble(kind='none'), 1, 0.0, 0.01, 200, C2=2.0, xi=1.0)
    assert estimate.reference == pytest.approx(2.0)
    with pytest.raises(ValueError):
        spectrum_distance_prob(_ensemble(kind='none'), 1, 0.0, -0.1, 10)


def test_multiscale_closed_forms():
    estimate = multiscale_event_prob(_ensemble(lam=4.0, kind='none'), 1, 1.0, 0.5, 0.0, 4000)
    assert abs(estimate.probability - 0.25) <= 3 * math.sqrt(0.25 * 0.75 / 4000)
    assert multiscale_event_prob(_ensemble(lam=1.0, kind='none'), 1, 1.0, 0.5, 0.0, 300).probability == 1.0
    assert multiscale_event_prob(_ensemble(lam=4.0, kind='none'), 1, 1e9, 0.5, 0.0, 300).probability == 0.0


def test_multiscale_counts_failed_samples_as_events(monkeypatch):
    def fake_sample_moments(ensemble, region, pairs, z, s, n, threads=None):
        values = np.zeros((n - 1, len(pairs)))
        return SampleTable(list(pairs), values, np.arange(n - 1), failed=[n - 1])

    monkeypatch.setattr(probabilities, 'sample_moments', fake_sample_moments)
    estimate = multiscale_event_prob(_ensemble(lam=4.0, kind='none'), 1, 1.0, 0.5, 0.0, 4)
    assert estimate.successes == 1
    assert estimate.n == 4
    assert estimate.probability == pytest.approx(0.25)


def test_bottom_tail_probability():
    ensemble = _ensemble()
    assert bottom_tail_prob(ensemble, 2, 10.0, 50).probability == 1.0
    assert bottom_tail_prob(ensemble, 2, 0.0, 50).probability == 0.0
    with pytest.raises(ValueError):
        bottom_tail_prob(OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution(kind='cauchy')), 2, 0.1, 10)


def test_tails_moment_bound():
    value = tails_moment_bound(1.0, 8.0, 0.25, 0.5, 2.0, 16.0, 0.01)
    expected = 4 ** 0.25 * math.exp(-0.25 * 8.0 / 4) + 2.0 ** 0.5 * 16.0 ** -0.25 * 0.01 ** 0.5
    assert value == pytest.approx(expected)
    with pytest.raises(ValueError):
        tails_moment_bound(1.0, 8.0, 0.5, 0.25, 2.0, 16.0, 0.01)


def test_dispatch_single_site_matches_direct():
    ensemble = _ensemble(d=2, lam=100.0)
    report = evaluate_criterion('single_site', ensemble, {'energy': 0.0}, HALF)
    assert report.lhs == single_site_b(ensemble.disorder, 100.0, 0.0, 0.5, 2, HALF).lhs


def test_dispatch_probability_thresholds():
    ensemble = _ensemble(kind='none')
    report = evaluate_criterion('spectrum_prob', ensemble, {'energy': 3.0, 'delta': 0.1, 'L': 1, 'n': 100})
    assert report.threshold == 0.05
    assert report.passed
    report = evaluate_criterion('spectrum_prob', ensemble,
                                {'energy': 3.0, 'delta': 0.1, 'L': 2, 'n': 50, 'C2': 1.0, 'xi': 1.0})
    assert report.threshold == pytest.approx(0.5)


def test_dispatch_rejects_unknown_kind():
    with pytest.raises(ValueError):
        evaluate_criterion('thm7', _ensemble(), {})
