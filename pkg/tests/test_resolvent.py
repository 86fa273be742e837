import numpy as np
import pytest
from scipy import sparse

from ensemble import DisorderDistribution, Hamiltonian, HoppingKernel, OperatorEnsemble, assemble, sample_potential
from lattice import Region, box_region
from resolvent import (
    GreenSolver,
    SolverError,
    SpectralParameter,
    conjugation_residual,
    dense_green_matrix,
    depletion_consistency,
    first_order_residual,
    all_bonds,
    green,
    identity_residuals,
    krein_2x2,
)


def _hamiltonian(d=1, L=4, lam=2.0, index=0, flux=None):
    ensemble = OperatorEnsemble(HoppingKernel(dim=d, peierls_flux=flux), DisorderDistribution(), lam, None, 3)
    region = box_region([0] * d, L, d)
    return ensemble, assemble(ensemble, sample_potential(ensemble, region, index))


def test_spectral_parameter():
    z = SpectralParameter(0.5, 0.1, -1)
    assert z.z == complex(0.5, -0.1)
    assert z.conjugate().z == complex(0.5, 0.1)
    assert SpectralParameter.coerce(0.2 - 0.3j) == SpectralParameter(0.2, 0.3, -1)
    with pytest.raises(ValueError):
        SpectralParameter(0.0, -1.0)


@pytest.mark.parametrize("d,L,flux", [(1, 6, None), (2, 3, None), (2, 3, 0.6)])
def test_green_matches_dense_oracle(d, L, flux):
    _, H = _hamiltonian(d, L, flux=flux)
    z = SpectralParameter(0.3, 0.05)
    dense = dense_green_matrix(H, z)
    solver = GreenSolver(H, z)
    for x in list(H.region)[:5]:
        for y in list(H.region)[-5:]:
            expected = dense[H.region.index(x), H.region.index(y)]
            assert abs(solver.entry(x, y) - expected) <= 1e-12 * np.max(np.abs(dense))


def test_rows_and_columns_agree():
    _, H = _hamiltonian(2, 2, flux=0.4)
    solver = GreenSolver(H, SpectralParameter(-0.2, 0.1))
    x, y = (0, 0), (1, -2)
    assert solver.row(x)[H.region.index(y)] == pytest.approx(solver.column(y)[H.region.index(x)], abs=1e-12)


def test_conjugation_symmetry():
    _, H = _hamiltonian(2, 2, flux=0.9)
    assert conjugation_residual(H, SpectralParameter(0.1, 0.2)) < 1e-12


def test_no_hopping_off_diagonal_is_zero():
    ensemble = OperatorEnsemble(HoppingKernel(dim=1, kind='none'), DisorderDistribution(), 1.0)
    H = assemble(ensemble, sample_potential(ensemble, box_region((0,), 3), 0))
    assert green(H, SpectralParameter(0.0, 0.1), (0,), (2,)) == 0
    v = sample_potential(ensemble, box_region((0,), 3), 0).value((1,))
    assert green(H, 0.0, (1,), (1,)) == pytest.approx(1.0 / v)


def test_singular_system_raises_solver_error():
    H = Hamiltonian(Region([(0,)]), sparse.csr_matrix(np.array([[0.5]])))
    with pytest.raises(SolverError):
        green(H, 0.5, (0,), (0,))
    with pytest.raises(SolverError):
        dense_green_matrix(H, 0.5)


def test_sites_outside_region_are_rejected():
    _, H = _hamiltonian(1, 2)
    with pytest.raises(ValueError):
        green(H, SpectralParameter(0.0, 0.1), (0,), (7,))


def test_condition_estimate_is_finite():
    _, H = _hamiltonian(1, 6)
    assert np.isfinite(GreenSolver(H, SpectralParameter(0.0, 0.1)).condition_estimate())


@pytest.mark.parametrize("eta", [0.0, 0.2])
def test_identity_residuals(eta):
    _, H = _hamiltonian(2, 3, lam=3.0, flux=0.37)
    W = box_region((0, 0), 1)
    report = identity_residuals(H, W, SpectralParameter(0.4, eta))
    assert report.max_residual < 1e-9
    assert report.vanishing_terms < 1e-9
    assert report.pairs > 0


def test_first_order_identity_with_all_bonds():
    _, H = _hamiltonian(1, 5)
    assert first_order_residual(H, all_bonds(H), SpectralParameter(0.1, 0.1)) < 1e-9


def test_depleted_operator_decouples_blocks():
    ensemble, H = _hamiltonian(1, 5)
    W = box_region((0,), 1)
    assert depletion_consistency(H, W, SpectralParameter(0.2, 0.1)) < 1e-12


def test_identity_residuals_require_subregion():
    _, H = _hamiltonian(1, 2)
    with pytest.raises(ValueError):
        identity_residuals(H, box_region((0,), 4), 0.1j)


@pytest.mark.parametrize("x,y", [((1,), (5,)), ((2,), (2,))])
def test_krein_formula(x, y):
    ensemble = OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution(), 1.5, None, 5)
    region = Region([(i,) for i in range(8)])
    sample = sample_potential(ensemble, region, 2)
    z = SpectralParameter(0.3, 0.1)
    full = assemble(ensemble, sample)
    hat = assemble(ensemble, sample.with_values({x: 0.0, y: 0.0}))
    expected = dense_green_matrix(full, z)[region.index(x), region.index(y)]
    value = krein_2x2(hat, x, y, z, sample.value(x), sample.value(y), ensemble.lam)
    assert abs(value - expected) <= 1e-10 * abs(expected)
