import math

import numpy as np
import pytest

from ensemble import HoppingKernel
from lattice import Region, box_region
from propagate import (
    DIST_OMEGA,
    L_INFTY,
    DecayEnvelope,
    TemperedKernel,
    combes_thomas_bound,
    combes_thomas_m,
    envelope_from_criterion,
    envelope_from_thm2,
    kernel_norm_mu,
    l1_budget,
    rate_from_b,
    strip_bound,
)
from propagate.combes_thomas import STRIP_LABEL

NN1 = TemperedKernel.nearest_neighbor(1)


@pytest.mark.parametrize("mu", [0.0, 0.3, 1.0, 2.5])
def test_nearest_neighbor_norm_is_cosh(mu):
    assert kernel_norm_mu(NN1, mu) == pytest.approx(math.cosh(mu), rel=1e-12)


def test_nearest_neighbor_weights_in_two_dimensions():
    p = TemperedKernel.nearest_neighbor(2)
    assert len(p.support) == 4
    assert p.total_weight == pytest.approx(1.0)
    assert p.max_range == 1


def test_kernel_rejects_bad_weights():
    with pytest.raises(ValueError):
        TemperedKernel((((1,), 0.7), ((-1,), 0.7)))
    with pytest.raises(ValueError):
        TemperedKernel((((1,), -0.1),))
    with pytest.raises(ValueError):
        TemperedKernel(())


def test_negative_mu_rejected():
    with pytest.raises(ValueError):
        kernel_norm_mu(NN1, -0.1)


def test_rate_from_b_closed_form():
    rate = rate_from_b(NN1, 0.5, 0.99)
    assert rate.mu == pytest.approx(math.acosh(1.98), abs=1e-6)
    assert rate.b * rate.norm < 1
    assert not rate.unbounded


@pytest.mark.parametrize("b", [0.0, 1.0, 1.2, -0.5])
def test_rate_from_b_rejects_b_outside_unit_interval(b):
    with pytest.raises(ValueError):
        rate_from_b(NN1, b, 0.99)


def test_rate_from_b_above_safety_targets_midpoint():
    rate = rate_from_b(NN1, 0.995, 0.99)
    assert rate.b * rate.norm == pytest.approx(0.9975, abs=1e-6)
    assert rate.mu > 0


def test_identity_kernel_gives_unbounded_rate():
    rate = rate_from_b(TemperedKernel.identity(2), 0.5, 0.99)
    assert rate.unbounded
    assert rate.mu > 0


def test_from_cut_set_weights():
    p = TemperedKernel.from_cut_set(box_region((0,), 1, 1))
    assert dict(p.support) == {(-2,): 0.5, (2,): 0.5}
    assert p.max_range == 2

    square = TemperedKernel.from_cut_set(box_region((0, 0), 1, 2))
    assert square.total_weight == pytest.approx(1.0)
    # 12 enlaces de corte con extremos exteriores distintos
    assert all(w == pytest.approx(1 / 12) for _, w in square.support)


def test_combes_thomas_closed_form():
    assert combes_thomas_m(HoppingKernel(dim=1), 4.0) == pytest.approx(math.log(2.0), abs=1e-9)


def test_combes_thomas_bound_values():
    T = HoppingKernel(dim=1)
    assert combes_thomas_bound(T, 4.0, 0) == pytest.approx(0.5)
    assert combes_thomas_bound(T, 4.0, 3) == pytest.approx(0.5 / 8, rel=1e-8)
    with pytest.raises(ValueError):
        combes_thomas_m(T, 0.0)


def test_combes_thomas_without_hopping():
    T = HoppingKernel(dim=1, kind='none')
    assert math.isinf(combes_thomas_m(T, 1.0))
    assert combes_thomas_bound(T, 1.0, 2) == 0.0


def test_envelope_step_closed_form():
    envelope = envelope_from_criterion(0.5, box_region((0,), 3, 1), 2.0, NN1, L=3)
    k = np.arange(6)
    assert np.allclose(envelope.step(3 * k), 2.0 * 0.5 ** k, rtol=0, atol=1e-12)
    assert envelope.mu == pytest.approx(math.log(2) / 3)
    assert envelope.prefactor == pytest.approx(4.0)
    assert envelope.metric == L_INFTY


def test_envelope_scale_defaults_to_kernel_range():
    envelope = envelope_from_criterion(0.5, Region([(0,)], 1), 1.0, TemperedKernel.from_cut_set(box_region((0,), 1, 1)))
    assert envelope.L == 2
    assert envelope.mu == pytest.approx(math.log(2) / 2)


@pytest.mark.parametrize("b", [0.2, 0.5, 0.9])
def test_subharmonic_profile_is_dominated(b):
    # g(x) = g∞·r^{|x|} resuelve g(x) = b·(g(x−1) + g(x+1))/2 fuera del origen
    g_inf = 1.5
    r = (1 - math.sqrt(1 - b * b)) / b
    envelope = envelope_from_criterion(b, Region([(0,)], 1), g_inf, NN1)
    dist = np.arange(0, 40)
    g = g_inf * r ** dist
    assert np.all(g <= envelope.pointwise(dist) * (1 + 1e-12))
    assert np.all(g <= envelope.step(dist) * (1 + 1e-12))
    for x in (1, 5, 17):
        left = b * 0.5 * (g_inf * r ** (x - 1) + g_inf * r ** (x + 1))
        assert g_inf * r ** x == pytest.approx(left, rel=1e-12)


def test_l1_budget_uses_safety_margin():
    rate, budget = l1_budget(NN1, 0.5, 3, 2.0, 0.99)
    assert budget == pytest.approx(2.0 * 3 / (1 - 0.99), rel=1e-6)
    assert rate.mu == pytest.approx(math.acosh(1.98), abs=1e-6)


def test_envelope_rejects_invalid_inputs():
    with pytest.raises(ValueError):
        envelope_from_criterion(1.0, Region([(0,)], 1), 1.0, NN1)
    with pytest.raises(ValueError):
        envelope_from_criterion(0.5, Region([(0,)], 1), 0.0, NN1)
    with pytest.raises(ValueError):
        DecayEnvelope(0.0, 1.0, L_INFTY, 0.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        DecayEnvelope(1.0, 1.0, 'euclidean', 0.5, 1.0, 1.0)


def test_two_sided_envelope_uses_boundary_distance():
    omega = box_region((0,), 5, 1)
    envelope = envelope_from_thm2(0.5, omega, 1.0, NN1, omega=omega, L=1)
    assert envelope.metric == DIST_OMEGA
    assert envelope.prefactor == pytest.approx(4.0)
    # dist_Ω((−4),(4)) = 2 porque ambos están a distancia 1 de la frontera
    assert envelope.evaluate((-4,), (4,)) == pytest.approx(1.0)
    assert envelope.evaluate((0,), (1,)) == pytest.approx(2.0)


def test_pointwise_omega_requires_region():
    envelope = envelope_from_thm2(0.5, box_region((0,), 2, 1), 1.0, NN1, L=1)
    assert envelope.metric == L_INFTY
    with pytest.raises(ValueError):
        envelope.pointwise_omega((0,), (1,))


def test_strip_bound_combes_thomas_branch():
    bound = strip_bound(1.0, 0.5, 1.0, 4.0, 3, 1.0)
    assert bound.branch == 'combes_thomas'
    assert bound.value == pytest.approx(0.5 / 8, rel=1e-8)


def test_strip_bound_poisson_branch():
    bound = strip_bound(1.0, 0.5, 1.0, 0.1, 3, 1.0)
    assert bound.branch == 'poisson'
    assert bound.label == STRIP_LABEL
    assert bound.real_axis_term == pytest.approx(math.exp(-1.5))
    assert bound.interior_term > 0
    assert bound.value == pytest.approx(bound.real_axis_term + bound.interior_term)

    bare = strip_bound(1.0, 0.5, 1.0, 0.1, 3, 1.0, poisson_constant=0.0)
    assert bare.value == pytest.approx(math.exp(-1.5))


def test_strip_bound_rejects_bad_parameters():
    with pytest.raises(ValueError):
        strip_bound(1.0, 0.5, 1.0, 0.1, 3, 0.0)
    with pytest.raises(ValueError):
        strip_bound(1.0, 0.5, 0.0, 0.1, 3, 1.0)
