"""
Módulo Propagate para fmloc
===========================

Maquinaria determinista de cotas: iteración subarmónica con núcleos
templados, envolventes de decaimiento certificadas, tasas de
Combes–Thomas y la extensión fuera del eje real.

Uso básico:
    from propagate import TemperedKernel, rate_from_b, envelope_from_criterion

    p = TemperedKernel.nearest_neighbor(1)
    tasa = rate_from_b(p, b=0.5)
    envolvente = envelope_from_criterion(0.5, caja, g_inf=2.0, p=p)
    print(tasa.mu, envolvente.pointwise(10))
"""

from .combes_thomas import StripBound, combes_thomas_bound, combes_thomas_m, strip_bound
from .config_propagate import load_config
from .envelope import DIST_OMEGA, L_INFTY, DecayEnvelope, envelope_from_criterion, envelope_from_thm2, l1_budget
from .kernels import RateResult, TemperedKernel, kernel_norm_mu, rate_from_b

__all__ = [
    'DIST_OMEGA',
    'L_INFTY',
    'DecayEnvelope',
    'RateResult',
    'StripBound',
    'TemperedKernel',
    'combes_thomas_bound',
    'combes_thomas_m',
    'envelope_from_criterion',
    'envelope_from_thm2',
    'kernel_norm_mu',
    'l1_budget',
    'load_config',
    'rate_from_b',
    'strip_bound',
]

__version__ = '1.0.0'
