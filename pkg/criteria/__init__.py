"""
Módulo Criteria para fmloc
==========================

Criterios de localización de volumen finito con veredicto de banda 3σ y
la procedencia de las constantes usadas: sitio único, condición con
supremo sobre subconjuntos, condición lineal, forma generalizada,
compuerta de ley de potencias y probabilidades de eventos espectrales.

Uso básico:
    from criteria import evaluate_criterion

    informe = evaluate_criterion('thm2', ens, {'L': 2, 'energy': 0.0, 'eta': 0.01, 'n': 2000}, constantes)
    print(informe.label, informe.lhs)
"""

from .config_criteria import load_config
from .dispatch import evaluate_criterion
from .finite_volume import (
    default_family,
    general_b,
    single_site_b,
    thm1_b,
    thm2_lhs,
    weighted_boundary_moment,
)
from .power_gate import (
    FINITE_VOLUME,
    INFINITE_VOLUME,
    CutSplit,
    GateAssembly,
    MobilityEdgeReport,
    assemble_gate,
    mobility_edge_diagnostic,
    power_gate,
    shell_supremum,
    split_cut_weight,
)
from .probabilities import (
    ProbabilityEstimate,
    binomial_estimate,
    bottom_tail_prob,
    multiscale_event_prob,
    spectrum_distance_prob,
    tails_moment_bound,
)
from .report import FAIL, INCONCLUSIVE, KINDS, PASS, CriterionReport, make_report, verdict

__all__ = [
    'FAIL',
    'FINITE_VOLUME',
    'INCONCLUSIVE',
    'INFINITE_VOLUME',
    'KINDS',
    'PASS',
    'CriterionReport',
    'CutSplit',
    'GateAssembly',
    'MobilityEdgeReport',
    'ProbabilityEstimate',
    'assemble_gate',
    'binomial_estimate',
    'bottom_tail_prob',
    'default_family',
    'evaluate_criterion',
    'general_b',
    'load_config',
    'make_report',
    'mobility_edge_diagnostic',
    'multiscale_event_prob',
    'power_gate',
    'shell_supremum',
    'single_site_b',
    'spectrum_distance_prob',
    'split_cut_weight',
    'tails_moment_bound',
    'thm1_b',
    'thm2_lhs',
    'verdict',
    'weighted_boundary_moment',
]

__version__ = '1.0.0'
