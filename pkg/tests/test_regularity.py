import json
import math

import numpy as np
import pytest

from ensemble import DisorderDistribution
from regularity import (
    ConstantsCache,
    RegularityConstants,
    RegularityError,
    constant_Cs,
    constant_Ds,
    decoupling_ratio,
    fracmom_bound,
    gamma_s,
    interpolate_exponent,
    kappa_tau,
    phi_s,
    psi_s,
    singular_integral,
    two_by_two_average,
    user_supplied_constants,
)

UNIFORM = DisorderDistribution()


def test_phi_s_uniform_at_center():
    assert phi_s(UNIFORM, 0.0, 0.5) == pytest.approx(2.0, rel=1e-6)


def test_phi_s_outside_support():
    assert phi_s(UNIFORM, 2.0, 0.5) == pytest.approx(math.sqrt(3.0) - 1.0, rel=1e-6)


def test_phi_s_off_axis_is_smaller():
    assert phi_s(UNIFORM, 0.5j, 0.5) < phi_s(UNIFORM, 0.0, 0.5)


def test_psi_and_gamma_reduce_to_phi():
    assert psi_s(UNIFORM, 0.3 + 0.2j, 0.3 + 0.2j, 0.4) == pytest.approx(1.0, rel=1e-6)
    assert gamma_s(UNIFORM, 0.7j, 0.7j, 0.1, 0.4) == pytest.approx(phi_s(UNIFORM, 0.1, 0.4), rel=1e-6)
    assert decoupling_ratio(UNIFORM, 0.5j, 0.5j, 0.5j, 0.3) == pytest.approx(1.0, rel=1e-5)


def test_singular_integral_divergent_exponent():
    assert singular_integral(lambda x: 1.0, -1.0, 1.0, [(0.0, -1.0)]) == math.inf
    assert singular_integral(lambda x: 1.0, 0.0, 1.0, [(0.0, -0.5)]) == pytest.approx(2.0, rel=1e-8)


def test_kappa_tau_uniform_closed_form():
    assert kappa_tau(UNIFORM, 1.0) == 1.0
    assert kappa_tau(DisorderDistribution(low=-2.0, high=2.0), 1.0) == pytest.approx(0.5)
    assert kappa_tau(DisorderDistribution(low=0.0, high=4.0), 0.5) == pytest.approx(math.sqrt(0.5))


def test_kappa_tau_cauchy_density_bound():
    cauchy = DisorderDistribution(kind='cauchy', scale=1.0)
    assert kappa_tau(cauchy, 1.0) == pytest.approx(2.0 / math.pi, rel=2e-3)


def test_fracmom_bound_readings():
    bound = fracmom_bound(0.5, 1.0, 1.0, 4.0)
    assert bound.prefactor == pytest.approx(2.0)
    assert bound.grouped == pytest.approx(math.sqrt(2.0))
    assert bound.split == pytest.approx(1.0)
    assert bound.value == pytest.approx(2.0 * math.sqrt(2.0))
    with pytest.raises(ValueError):
        fracmom_bound(1.0, 1.0, 1.0, 4.0)


def test_interpolate_exponent():
    A, mu = interpolate_exponent(4.0, 1.0, 0.5, 0.25, 1.0, 1.0, 10.0)
    assert A == pytest.approx(2.0)
    assert mu == pytest.approx(0.5)
    A_up, mu_up = interpolate_exponent(0.1, 1.0, 0.25, 0.5, 1.0, 1.0, 10.0)
    assert 0 < mu_up < 1.0
    assert A_up > 0
    with pytest.raises(ValueError):
        interpolate_exponent(1.0, 1.0, 0.25, 1.5, 1.0, 1.0, 10.0)


def test_two_by_two_average_diagonal_matrix():
    assert two_by_two_average(UNIFORM, np.zeros(3), 0.5) == pytest.approx(2.0, rel=1e-5)


def test_constants_require_s_below_tau():
    with pytest.raises(ValueError):
        RegularityConstants(1.0, 1.0, 1.0, 2.0, None)


def test_user_supplied_constants_are_certified():
    constants = user_supplied_constants(1.0, 0.2, 1.0, 3.0, 2.0)
    assert constants.certified
    assert not constants.lower_bound
    assert constants.C_tilde_s == pytest.approx(12.0)
    assert constants.decoupling_band
    assert constants.a_priori_bound(32.0) == pytest.approx(3.0 / 2.0)


def test_missing_decoupling_constant():
    constants = user_supplied_constants(1.0, 0.5, 1.0, 2.0, math.inf)
    assert not constants.decoupling_available
    with pytest.raises(RuntimeError):
        constants.require_decoupling()


def test_constants_dict_round_trip():
    constants = RegularityConstants(1.0, 0.25, 1.0, 1.5, 1.2, {'kind': 'estimated', 'seed': 3})
    restored = RegularityConstants.from_dict(json.loads(json.dumps(constants.to_dict())))
    assert restored == constants
    assert restored.fingerprint() == constants.fingerprint()
    assert restored.lower_bound


def test_decoupling_requires_bounded_support():
    with pytest.raises(RegularityError):
        constant_Ds(DisorderDistribution(kind='cauchy'), 0.2, effort=1)


@pytest.mark.slow
def test_constant_cs_is_monotone_in_effort():
    small = constant_Cs(UNIFORM, 0.25, effort=2, seed=1)
    large = constant_Cs(UNIFORM, 0.25, effort=8, seed=1)
    assert small >= 4.0 / 3.0 * (1 - 1e-6)
    assert large >= small


def test_cache_persists_entries(tmp_path):
    path = tmp_path / 'constants.json'
    cache = ConstantsCache(path)
    supplied = cache.put_user_supplied(UNIFORM, 4, RegularityConstants(1.0, 0.5, 1.0, 2.5, None,
                                                                      {'kind': 'estimated'}))
    assert supplied.certified
    reloaded = ConstantsCache(path)
    assert len(reloaded) == 1
    assert reloaded.get(UNIFORM, 0.5, 4) == supplied
    assert reloaded.get(UNIFORM, 0.5, 8) is None
    assert reloaded.get_or_compute(UNIFORM, 0.5, 4).C_s == 2.5


def test_unreadable_cache_raises(tmp_path):
    path = tmp_path / 'constants.json'
    path.write_text('{not json', encoding='utf-8')
    with pytest.raises(RuntimeError):
        ConstantsCache(path)
