"""
Módulo Moments para fmloc
=========================

Estimación Monte Carlo de momentos fraccionarios E(|G(x,y;z)|^s) con su
incertidumbre, perfiles por distancia, ajustes de decaimiento exponencial
y comprobaciones estadísticas de las desigualdades entre resolventes.

Uso básico:
    from moments import fractional_moment, moment_profile, decay_fit

    estimacion = fractional_moment(ens, caja, (0,), (3,), 0.1j, s=0.25, n=2000)
    perfil = moment_profile(ens, caja, (0,), [(d,) for d in range(6)], 0.1j, s=0.25, n=2000)
    ajuste = decay_fit(perfil, window=(1, 5))
    print(estimacion.mean, ajuste.mu)
"""

from .config_moments import load_config
from .decay_fit import DecayFit, decay_fit
from .estimator import (
    BLOCK_MEANS,
    PLAIN_MEAN,
    MomentEstimate,
    MomentEstimationError,
    MomentProfile,
    SampleTable,
    estimate_from_table,
    fractional_moment,
    moment_profile,
    sample_moments,
    shell_pool,
    summarize,
    variance_ratio,
)
from .inequalities import (
    InequalityCheck,
    apriori_check,
    conditional_wegner_check,
    decoupled_resolvent_check,
    depleted_resolvent_check,
    full_resolvent_check,
)

__all__ = [
    'BLOCK_MEANS',
    'PLAIN_MEAN',
    'DecayFit',
    'InequalityCheck',
    'MomentEstimate',
    'MomentEstimationError',
    'MomentProfile',
    'SampleTable',
    'apriori_check',
    'conditional_wegner_check',
    'decay_fit',
    'decoupled_resolvent_check',
    'depleted_resolvent_check',
    'estimate_from_table',
    'fractional_moment',
    'full_resolvent_check',
    'load_config',
    'moment_profile',
    'sample_moments',
    'shell_pool',
    'summarize',
    'variance_ratio',
]

__version__ = '1.0.0'
