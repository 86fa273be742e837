import json

import numpy as np
import pytest

from ensemble import (
    DisorderDistribution,
    HoppingKernel,
    OperatorEnsemble,
    assemble,
    boundary_weights,
    default_ensemble,
    ensemble_from_dict,
    ensemble_to_dict,
    load_ensemble,
    sample_block,
    sample_potential,
    xi_s,
)
from lattice import BondSet, box_region, cut_set


def test_sampling_is_reproducible(uniform_1d):
    region = box_region((0,), 6)
    a = sample_potential(uniform_1d, region, 3)
    b = sample_potential(uniform_1d, region, 3)
    c = sample_potential(uniform_1d, region, 4)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert np.all(np.abs(a.values) <= 1.0)


def test_sample_block_rows_match_single_samples(uniform_2d):
    region = box_region((0, 0), 2)
    block = sample_block(uniform_2d, region, [0, 5, 11])
    for row, index in zip(block, [0, 5, 11]):
        assert np.array_equal(row, sample_potential(uniform_2d, region, index).values)


def test_common_random_numbers_across_regions(uniform_1d):
    big = box_region((0,), 8)
    small = box_region((2,), 2)
    full = sample_potential(uniform_1d, big, 9)
    sub = sample_potential(uniform_1d, small, 9)
    assert np.array_equal(full.restrict(small).values, sub.values)


def test_streams_and_seeds_are_independent(uniform_1d):
    region = box_region((0,), 4)
    base = sample_potential(uniform_1d, region, 0).values
    assert not np.array_equal(base, sample_potential(uniform_1d, region, 0, stream=1).values)
    assert not np.array_equal(base, sample_potential(uniform_1d.with_seed(8), region, 0).values)
    with pytest.raises(ValueError):
        sample_block(uniform_1d, region, [-1])


def test_uniform_samples_have_expected_moments(uniform_1d):
    values = sample_block(uniform_1d, box_region((0,), 0), range(20000))[:, 0]
    assert abs(values.mean()) < 0.03
    assert abs(values.var() - 1.0 / 3.0) < 0.02


def test_hamiltonian_is_hermitian_with_peierls_flux():
    ensemble = OperatorEnsemble(HoppingKernel(dim=2, peierls_flux=0.37), DisorderDistribution(), 2.0)
    H = assemble(ensemble, sample_potential(ensemble, box_region((0, 0), 3), 0))
    dense = H.dense()
    assert np.allclose(dense, dense.conj().T, atol=0.0)
    assert np.iscomplexobj(dense)


def test_peierls_plaquette_phase_equals_flux():
    hopping = HoppingKernel(dim=2, peierls_flux=0.37)
    loop = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]
    total = sum(hopping.phase(a, b) for a, b in zip(loop, loop[1:]))
    assert total == pytest.approx(0.37)
    assert hopping.phase((0, 0), (1, 1)) == -hopping.phase((1, 1), (0, 0))


def test_peierls_flux_requires_two_dimensions():
    with pytest.raises(ValueError):
        HoppingKernel(dim=1, peierls_flux=0.5)


def test_assemble_diagonal_and_hopping(uniform_1d):
    ensemble = uniform_1d.with_lambda(3.0)
    region = box_region((0,), 3)
    sample = sample_potential(ensemble, region, 1)
    dense = assemble(ensemble, sample).dense()
    assert np.allclose(np.diag(dense), 3.0 * sample.values)
    assert dense[region.index((0,)), region.index((1,))] == 1.0
    assert dense[region.index((0,)), region.index((2,))] == 0.0


def test_depletion_removes_both_orientations(uniform_1d):
    region = box_region((0,), 4)
    W = box_region((0,), 1)
    H = assemble(uniform_1d, sample_potential(uniform_1d, region, 0))
    bonds = H.cut_set(W)
    depleted = H.deplete(bonds).dense()
    via_assemble = assemble(uniform_1d, sample_potential(uniform_1d, region, 0), bonds).dense()
    assert np.array_equal(depleted, via_assemble)
    for u, v in bonds:
        assert depleted[region.index(u), region.index(v)] == 0
        assert depleted[region.index(v), region.index(u)] == 0


def test_depletion_outside_region_is_rejected(uniform_1d):
    region = box_region((0,), 2)
    with pytest.raises(ValueError):
        assemble(uniform_1d, sample_potential(uniform_1d, region, 0), BondSet([((10,), (11,))]))


def test_tempered_kernel_truncation():
    hopping = HoppingKernel(dim=1, kind='tempered', t0=1.0, m=2.0)
    assert hopping.range >= 1
    assert hopping.truncation_error < 1e-12
    assert hopping.tau((1,)) == pytest.approx(np.exp(-2.0))
    with pytest.raises(ValueError):
        hopping.weighted_sum(0.5, 1.0)


def test_xi_s_nearest_neighbor_counts_cut_bonds():
    hopping = HoppingKernel(dim=2)
    box = box_region((0, 0), 2)
    assert xi_s(hopping, box, 0.5) == pytest.approx(len(cut_set(box)))
    weights = boundary_weights(hopping, box, 0.5)
    assert weights[(2, 2)] == 2.0
    assert (0, 0) not in weights


def test_spectrum_bottom():
    ensemble = OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution(), 2.0)
    assert ensemble.spectrum_bottom() == pytest.approx(-4.0)


@pytest.mark.parametrize("kwargs", [
    {'kind': 'gaussian'},
    {'tau': 0.0},
    {'low': 1.0, 'high': 1.0},
    {'kind': 'cauchy', 'scale': -1.0},
    {'kind': 'piecewise_linear', 'knots': ((0.0, 1.0),)},
])
def test_invalid_disorder(kwargs):
    with pytest.raises(ValueError):
        DisorderDistribution(**kwargs)


def test_piecewise_linear_law_is_normalized():
    dist = DisorderDistribution(kind='piecewise_linear', knots=((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)))
    assert dist.cdf(1.0) == pytest.approx(1.0)
    assert dist.cdf(0.0) == pytest.approx(0.5)
    assert dist.ppf(0.5) == pytest.approx(0.0, abs=1e-8)


def test_ensemble_dict_round_trip():
    ensemble = OperatorEnsemble(HoppingKernel(dim=2, peierls_flux=0.1),
                                DisorderDistribution(low=-2.0, high=2.0), 4.0, None, 99)
    data = json.loads(json.dumps(ensemble_to_dict(ensemble)))
    assert ensemble_from_dict(data) == ensemble


def test_schema_version_is_required():
    data = ensemble_to_dict(OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution()))
    del data['schema_version']
    with pytest.raises(ValueError):
        ensemble_from_dict(data)
    data['schema_version'] = 2
    with pytest.raises(ValueError):
        ensemble_from_dict(data)


def test_load_ensemble_from_toml(tmp_path):
    path = tmp_path / 'ensemble.toml'
    path.write_text(
        "[ensemble]\n"
        "schema_version = 1\n"
        "lambda = 2.5\n"
        "master_seed = 11\n"
        "[ensemble.hopping]\n"
        "dim = 2\n"
        "kind = 'nearest_neighbor'\n"
        "[ensemble.disorder]\n"
        "kind = 'uniform'\n"
        "low = -1.0\n"
        "high = 1.0\n",
        encoding='utf-8',
    )
    ensemble = load_ensemble(path)
    assert ensemble.dim == 2
    assert ensemble.lam == 2.5
    assert ensemble.master_seed == 11


def test_load_ensemble_rejects_unknown_extension(tmp_path):
    path = tmp_path / 'ensemble.yaml'
    path.write_text('x: 1', encoding='utf-8')
    with pytest.raises(ValueError):
        load_ensemble(path)


def test_default_ensemble_reads_environment(monkeypatch):
    monkeypatch.setenv('FMLOC_DIMENSION', '2')
    monkeypatch.setenv('FMLOC_LAMBDA', '6.5')
    ensemble = default_ensemble()
    assert ensemble.dim == 2
    assert ensemble.lam == 6.5
