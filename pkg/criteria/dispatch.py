"""
Despacho de criterios
=====================

Punto de entrada único para la CLI y las celdas de barrido.
"""

import logging
from typing import Any, Dict, Mapping, Optional

from ensemble import OperatorEnsemble
from lattice import box_region, norm_inf, region_from_spec
from moments import moment_profile
from regularity import RegularityConstants
from resolvent import SpectralParameter

from .finite_volume import general_b, single_site_b, thm1_b, thm2_lhs
from .power_gate import FINITE_VOLUME, power_gate
from .probabilities import multiscale_event_prob, spectrum_distance_prob
from .report import KINDS, CriterionReport, make_report

logger = logging.getLogger(__name__)

DEFAULT_PROBABILITY_THRESHOLD = 0.05


def _region(ensemble: OperatorEnsemble, params: Mapping[str, Any]):
    if 'region' in params:
        return region_from_spec(params['region'], ensemble.dim)
    return box_region([0] * ensemble.dim, int(params.get('L', 2)), ensemble.dim)


def _probability_report(kind: str, estimate, params: Mapping[str, Any],
                        constants: Optional[RegularityConstants]) -> CriterionReport:
    threshold = params.get('threshold')
    if threshold is None:
        threshold = estimate.reference if estimate.reference is not None else DEFAULT_PROBABILITY_THRESHOLD
    return make_report(kind, estimate.probability, estimate.stderr, float(threshold), constants,
                       dict(estimate.to_dict(), L=int(params.get('L', 2))))


def evaluate_criterion(kind: str, ensemble: OperatorEnsemble, params: Mapping[str, Any],
                       constants: Optional[RegularityConstants] = None) -> CriterionReport:
    """
    Evalúa un criterio por nombre.

    Args:
        kind: Uno de single_site, thm1, thm2, general, power_gate, spectrum_prob, multiscale_prob
        ensemble: Ensemble (λ incluido)
        params: energy, eta, s, L, n y parámetros propios de cada criterio
        constants: Constantes de regularidad (no se usan en las probabilidades)

    Returns:
        CriterionReport
    """
    if kind not in KINDS:
        raise ValueError(f"Tipo de criterio desconocido: {kind} (válidos: {', '.join(KINDS)})")
    energy = float(params.get('energy', 0.0))
    eta = float(params.get('eta', 0.0))
    z = SpectralParameter(energy, eta)
    s = float(params['s']) if 's' in params else (constants.s if constants is not None else ensemble.disorder.tau / 2)
    n = int(params.get('n', 1000))
    threads = params.get('threads')
    logger.info(f"Evaluando criterio {kind} con λ={ensemble.lam}, E={energy}, s={s}")

    if kind == 'single_site':
        return single_site_b(ensemble.disorder, ensemble.lam, energy, s, ensemble.dim, constants)
    if kind == 'thm1':
        return thm1_b(ensemble, _region(ensemble, params), z, s, n, None, constants, threads)
    if kind == 'thm2':
        return thm2_lhs(ensemble, _region(ensemble, params), z, s, n, constants, threads)
    if kind == 'general':
        return general_b(ensemble, _region(ensemble, params), z, s, n, None, constants, threads)
    if kind == 'power_gate':
        L = int(params.get('L', 4))
        box = box_region([0] * ensemble.dim, L, ensemble.dim)
        shell = [u for u in box if L / 2 <= norm_inf(u) <= L]
        profile = moment_profile(ensemble, box, [0] * ensemble.dim, shell, z, s, n, threads=threads)
        return power_gate(profile, ensemble.dim, L, params.get('variant', FINITE_VOLUME), constants,
                          ensemble.lam, ensemble.hopping)
    if kind == 'spectrum_prob':
        estimate = spectrum_distance_prob(ensemble, int(params.get('L', 2)), energy, float(params.get('delta', 0.1)),
                                          n, params.get('C2'), params.get('xi'), threads)
        return _probability_report(kind, estimate, params, constants)
    estimate = multiscale_event_prob(ensemble, int(params.get('L', 2)), float(params.get('A', 1.0)),
                                     float(params.get('mu', 0.0)), z, n, threads)
    return _probability_report(kind, estimate, params, constants)
