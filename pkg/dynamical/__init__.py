"""
Módulo Dynamical para fmloc
===========================

Medidas espectrales μ^{x,y} de operadores en volumen finito por
diagonalización densa, su variación total en ventanas de energía y los
núcleos de evolución temporal.

Uso básico:
    from dynamical import EnergyWindow, spectral_tv, evolution_kernel, dyn_profile

    F = EnergyWindow.real_line()
    print(spectral_tv(H, (0,), (3,), F), evolution_kernel(H, (0,), (3,), F, 1.0))
    perfil = dyn_profile(ens, caja, (0,), [(d,) for d in range(10)], F, [0, 1, 2], n=100)
"""

from .bounds import FiniteVolumeBound, finite_volume_bound_constants, weight_integral
from .config_dynamical import load_config
from .profile import COLUMNS, DynamicalProfile, dyn_profile, sample_sandwich
from .spectral import (
    EnergyWindow,
    SpectralDecomposition,
    SpectralError,
    evolution_kernel,
    l2_normalized,
    spectral_tv,
    windows_disjoint,
)

__all__ = [
    'COLUMNS',
    'DynamicalProfile',
    'EnergyWindow',
    'FiniteVolumeBound',
    'SpectralDecomposition',
    'SpectralError',
    'dyn_profile',
    'evolution_kernel',
    'finite_volume_bound_constants',
    'l2_normalized',
    'load_config',
    'sample_sandwich',
    'spectral_tv',
    'weight_integral',
    'windows_disjoint',
]

__version__ = '1.0.0'
