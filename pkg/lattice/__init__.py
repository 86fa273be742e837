"""
Módulo de Geometría de Red para fmloc
=====================================

Regiones finitas de Z^d (d ∈ {1,2,3}), enlaces, conjuntos de corte Γ(W),
ampliaciones W^+ y la métrica dist_Ω.

Uso básico:
    from lattice import box_region, cut_set

    caja = box_region((0, 0), 2)
    gamma = cut_set(caja)
    print(len(caja), len(gamma))   # 25 20
"""

from .region import (
    Bond,
    BondSet,
    Region,
    SitePoint,
    box_region,
    boundary,
    cut_set,
    dist_omega,
    enlarge,
    make_site,
    nearest_neighbor_offsets,
    norm_inf,
    region_from_spec,
    site_distance,
)

__all__ = [
    'Bond',
    'BondSet',
    'Region',
    'SitePoint',
    'box_region',
    'boundary',
    'cut_set',
    'dist_omega',
    'enlarge',
    'make_site',
    'nearest_neighbor_offsets',
    'norm_inf',
    'region_from_spec',
    'site_distance',
]

__version__ = '1.0.0'
