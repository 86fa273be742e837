import pytest

from lattice import (
    BondSet,
    Region,
    box_region,
    boundary,
    cut_set,
    dist_omega,
    enlarge,
    make_site,
    nearest_neighbor_offsets,
    norm_inf,
    region_from_spec,
)


def test_make_site_checks_dimension():
    assert make_site([1, -2]) == (1, -2)
    with pytest.raises(ValueError):
        make_site([1, 2], d=3)
    with pytest.raises(ValueError):
        make_site([2 ** 63])


def test_region_rejects_duplicates_and_mixed_dimensions():
    with pytest.raises(ValueError):
        Region([(0,), (0,)])
    with pytest.raises(ValueError):
        Region([(0,), (0, 1)])
    with pytest.raises(ValueError):
        Region([(0, 0, 0, 0)])
    with pytest.raises(ValueError):
        Region([])


def test_region_enumeration_is_lexicographic():
    region = Region([(1, 0), (0, 1), (0, 0)])
    assert region.sites == ((0, 0), (0, 1), (1, 0))
    assert region.index((1, 0)) == 2
    with pytest.raises(ValueError):
        region.index((5, 5))
    assert (0, 1) in region
    assert (3, 3) not in region


@pytest.mark.parametrize("d,L", [(1, 0), (1, 3), (2, 2), (3, 1)])
def test_box_region_size(d, L):
    box = box_region([0] * d, L, d)
    assert len(box) == (2 * L + 1) ** d
    assert all(norm_inf(x) <= L for x in box)


def test_region_from_spec():
    assert region_from_spec({'L': 2}, 2) == box_region((0, 0), 2)
    assert len(region_from_spec({'sites': [[0], [3]]}, 1)) == 2
    with pytest.raises(ValueError):
        region_from_spec({'radius': 2}, 1)


def test_nearest_neighbor_offsets():
    assert nearest_neighbor_offsets(1) == [(-1,), (1,)]
    assert len(nearest_neighbor_offsets(3)) == 6


def test_cut_set_orientation_and_size():
    W = box_region((0, 0), 2)
    bonds = cut_set(W)
    assert len(bonds) == 4 * 5
    for u, v in bonds:
        assert u in W and v not in W
    assert set(bonds.tails()) <= set(W)
    assert not set(bonds.heads()) & set(W)


def test_enlarge_and_boundary_1d():
    W = box_region((0,), 1)
    assert enlarge(W) == box_region((0,), 2)
    assert boundary(box_region((0,), 2)) == [(-2,), (2,)]


def test_bond_set_rejects_degenerate_bonds():
    with pytest.raises(ValueError):
        BondSet([((0,), (0,))])
    bonds = BondSet([((0,), (1,))])
    assert bonds.touches((1,), (0,))
    assert ((1,), (0,)) not in bonds


def test_dist_omega_collapses_boundary():
    omega = box_region((0,), 5)
    assert dist_omega(omega, (-4,), (4,)) == 2
    assert dist_omega(omega, (0,), (1,)) == 1
    with pytest.raises(ValueError):
        dist_omega(omega, (0,), (9,))
