"""
Módulo Resolvent para fmloc
===========================

Funciones de Green en volumen finito, resolventes agotados, la reducción
2×2 de Krein y la verificación a precisión de máquina de las identidades
del resolvente.

Uso básico:
    from resolvent import SpectralParameter, green, identity_residuals

    z = SpectralParameter(0.3, 0.01)
    g = green(H, z, (0,), (2,))
    informe = identity_residuals(H, W, z)
    print(informe.max_residual)
"""

from .config_resolvent import load_config
from .green import (
    GreenSolver,
    GreenValue,
    SolverError,
    SpectralParameter,
    dense_green_matrix,
    green,
    green_value,
)
from .identities import (
    ResidualReport,
    all_bonds,
    conjugation_residual,
    depletion_consistency,
    first_order_residual,
    identity_residuals,
)
from .krein import krein_2x2

__all__ = [
    'GreenSolver',
    'GreenValue',
    'ResidualReport',
    'SolverError',
    'SpectralParameter',
    'all_bonds',
    'conjugation_residual',
    'dense_green_matrix',
    'depletion_consistency',
    'first_order_residual',
    'green',
    'green_value',
    'identity_residuals',
    'krein_2x2',
    'load_config',
]

__version__ = '1.0.0'
