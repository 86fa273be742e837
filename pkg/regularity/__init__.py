"""
Módulo Regularity para fmloc
============================

Estimación numérica de las constantes que consumen los criterios: κ_τ,
C_s, D_s(ρ) y C̃_s = C_s·D_s², la cota a priori de momentos fraccionarios
y la interpolación entre exponentes.

Uso básico:
    from ensemble import DisorderDistribution
    from regularity import ConstantsCache, estimate_constants

    constantes = estimate_constants(DisorderDistribution(), s=0.25, effort=16)
    print(constantes.C_s, constantes.D_s, constantes.C_tilde_s)
"""

from .cache import ConstantsCache, cache_key, write_json_atomic
from .config_regularity import load_config
from .constants import (
    FracmomBound,
    RegularityConstants,
    constant_Cs,
    constant_Ds,
    decoupling_ratio,
    estimate_constants,
    fracmom_bound,
    interpolate_exponent,
    kappa_tau,
    two_by_two_average,
    user_supplied_constants,
)
from .quadrature import (
    RegularityError,
    density_function,
    gamma_s,
    phi_s,
    power_product_integral,
    psi_s,
    singular_integral,
)

__all__ = [
    'ConstantsCache',
    'FracmomBound',
    'RegularityConstants',
    'RegularityError',
    'cache_key',
    'constant_Cs',
    'constant_Ds',
    'decoupling_ratio',
    'density_function',
    'estimate_constants',
    'fracmom_bound',
    'gamma_s',
    'interpolate_exponent',
    'kappa_tau',
    'load_config',
    'phi_s',
    'power_product_integral',
    'psi_s',
    'singular_integral',
    'two_by_two_average',
    'user_supplied_constants',
    'write_json_atomic',
]

__version__ = '1.0.0'
