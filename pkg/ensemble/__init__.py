"""
Módulo Ensemble para fmloc
==========================

Especificación y muestreo del operador aleatorio H_ω = T + U_per + λV_ω
sobre regiones finitas, incluidas las variantes agotadas H^(Γ).

Uso básico:
    from lattice import box_region
    from ensemble import HoppingKernel, DisorderDistribution, OperatorEnsemble
    from ensemble import sample_potential, assemble

    ens = OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution(), lam=5.0, master_seed=7)
    caja = box_region((0,), 5)
    H = assemble(ens, sample_potential(ens, caja, 0))
"""

from .config_ensemble import default_ensemble, load_config, load_ensemble, read_structured_file
from .disorder import DisorderDistribution, PiecewiseLinearLaw
from .hopping import HoppingKernel
from .operator_ensemble import (
    SCHEMA_VERSION,
    DisorderSample,
    Hamiltonian,
    OperatorEnsemble,
    PeriodicPotential,
    assemble,
    boundary_weights,
    diagonal,
    ensemble_from_dict,
    ensemble_to_dict,
    hopping_matrix,
    sample_block,
    sample_potential,
    site_list,
    xi_s,
)

__all__ = [
    'SCHEMA_VERSION',
    'DisorderDistribution',
    'DisorderSample',
    'Hamiltonian',
    'HoppingKernel',
    'OperatorEnsemble',
    'PeriodicPotential',
    'PiecewiseLinearLaw',
    'assemble',
    'boundary_weights',
    'default_ensemble',
    'diagonal',
    'ensemble_from_dict',
    'ensemble_to_dict',
    'hopping_matrix',
    'load_config',
    'load_ensemble',
    'read_structured_file',
    'sample_block',
    'sample_potential',
    'site_list',
    'xi_s',
]

__version__ = '1.0.0'
