"""
Suite de verificación
=====================

Identidades del resolvente, fórmula de Krein, oráculo en forma cerrada de
momentos, cotas de tipo Wegner, desigualdades estadísticas entre
resolventes y formas cerradas de núcleos, envolventes y Combes–Thomas.
El nivel 'fast' usa tamaños de muestra reducidos; 'full' los de la
configuración de aceptación. El informe no incluye tiempos, de modo que
dos ejecuciones con la misma semilla producen el mismo JSON.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np

from ensemble import DisorderDistribution, DisorderSample, HoppingKernel, OperatorEnsemble, assemble, sample_potential
from lattice import Region, box_region
from moments import (
    apriori_check,
    conditional_wegner_check,
    decoupled_resolvent_check,
    depleted_resolvent_check,
    fractional_moment,
    full_resolvent_check,
    moment_profile,
)
from propagate import TemperedKernel, combes_thomas_m, envelope_from_criterion, kernel_norm_mu, rate_from_b
from regularity import estimate_constants
from resolvent import SpectralParameter, dense_green_matrix, identity_residuals, krein_2x2

logger = logging.getLogger(__name__)

LEVELS = ('fast', 'full')

DEFAULT_TOLERANCES: Dict[str, float] = {
    'identity': 1e-9,
    'krein': 1e-10,
    'kernel': 1e-12,
    'rate': 1e-6,
    'combes_thomas': 1e-9,
    'envelope': 1e-12,
    'sigmas': 3.0,
}

BUDGETS = {
    'fast': {'identity_instances': 12, 'krein_instances': 30, 'oracle_samples': 20000,
             'inequality_samples': 1500, 'wegner_samples': 800, 'environments': 4, 'resamples': 400,
             'effort': 8},
    'full': {'identity_instances': 50, 'krein_instances': 100, 'oracle_samples': 100000,
             'inequality_samples': 5000, 'wegner_samples': 4000, 'environments': 10, 'resamples': 2000,
             'effort': 32},
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'passed': self.passed, 'value': self.value,
                'tolerance': self.tolerance, 'details': dict(self.details)}


@dataclass
class VerificationReport:
    level: str
    seed: int
    tolerances: Dict[str, float]
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'level': self.level,
            'seed': self.seed,
            'tolerances': dict(self.tolerances),
            'passed': self.passed,
            'failures': self.failures,
            'checks': [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


def _uniform_ensemble(d: int, lam: float, seed: int, flux: Optional[float] = None,
                      kind: str = 'nearest_neighbor') -> OperatorEnsemble:
    return OperatorEnsemble(HoppingKernel(dim=d, kind=kind, peierls_flux=flux),
                            DisorderDistribution(), lam, None, seed)


def _identity_check(budget: Mapping[str, Any], tol: Mapping[str, float], seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 1])
    worst = 0.0
    configs = [(1, None), (2, None), (2, 0.37)]
    for k in range(budget['identity_instances']):
        d, flux = configs[k % len(configs)]
        L = int(rng.integers(3, 7)) if d == 1 else int(rng.integers(2, 5))
        ensemble = _uniform_ensemble(d, float(rng.uniform(0.5, 5.0)), seed, flux)
        omega = box_region([0] * d, L, d)
        W = box_region([0] * d, max(0, L - 2), d)
        H = assemble(ensemble, sample_potential(ensemble, omega, k))
        eta = 0.0 if k % 2 == 0 else float(rng.uniform(0.01, 0.5))
        z = SpectralParameter(float(rng.uniform(-2.0, 2.0)), eta)
        worst = max(worst, identity_residuals(H, W, z).max_residual)
    return CheckResult('identity_residuals', worst <= tol['identity'], worst, tol['identity'],
                       {'instances': budget['identity_instances']})


def _krein_check(budget: Mapping[str, Any], tol: Mapping[str, float], seed: int) -> CheckResult:
    rng = np.random.default_rng([seed, 2])
    worst = 0.0
    ensemble = _uniform_ensemble(1, 1.0, seed)
    region = Region([(i,) for i in range(8)], 1)
    for k in range(budget['krein_instances']):
        lam = float(rng.uniform(0.5, 5.0))
        sample = sample_potential(ensemble, region, k)
        x, y = (int(rng.integers(0, 4)),), (int(rng.integers(4, 8)),)
        z = SpectralParameter(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(0.01, 0.5)))
        full = assemble(ensemble.with_lambda(lam), sample)
        hat = assemble(ensemble.with_lambda(lam), sample.with_values({x: 0.0, y: 0.0}))
        reference = dense_green_matrix(full, z)[region.index(x), region.index(y)]
        value = krein_2x2(hat, x, y, z, sample.value(x), sample.value(y), lam)
        worst = max(worst, abs(value - reference) / max(abs(reference), 1e-300))
    return CheckResult('krein', worst <= tol['krein'], worst, tol['krein'],
                       {'instances': budget['krein_instances']})


def _oracle_check(budget: Mapping[str, Any], tol: Mapping[str, float], seed: int) -> CheckResult:
    ensemble = _uniform_ensemble(1, 1.0, seed, kind='none')
    region = Region([(0,)], 1)
    estimate = fractional_moment(ensemble, region, (0,), (0,), 0.0, 0.5, budget['oracle_samples'])
    deviation = abs(estimate.mean - 2.0) / estimate.stderr
    return CheckResult('moment_oracle', deviation <= tol['sigmas'], deviation, tol['sigmas'],
                       {'mean': estimate.mean, 'stderr': estimate.stderr, 'expected': 2.0})


def _wegner_checks(budget: Mapping[str, Any], tol: Mapping[str, float], seed: int,
                   constants) -> List[CheckResult]:
    results = []
    region = box_region((0,), 4, 1)
    for lam in (1.0, 5.0):
        ensemble = _uniform_ensemble(1, lam, seed)
        profile = moment_profile(ensemble, region, (0,), list(region), 0.0, 0.5, budget['wegner_samples'])
        check = apriori_check(profile.estimates, constants, lam, tol['sigmas'])
        results.append(CheckResult(f'wegner_a_priori_lambda_{lam:g}', check.passed, check.margin, 0.0,
                                   check.to_dict()))
        conditional = conditional_wegner_check(ensemble, 8, 0.5, budget['resamples'], budget['environments'],
                                               constants, sigmas=tol['sigmas'])
        results.append(CheckResult(f'wegner_conditional_lambda_{lam:g}', conditional.passed, conditional.margin,
                                   0.0, conditional.to_dict()))
    return results


def _inequality_checks(budget: Mapping[str, Any], tol: Mapping[str, float], seed: int,
                       constants_half, constants_decoupled) -> List[CheckResult]:
    ensemble = _uniform_ensemble(1, 5.0, seed)
    omega = box_region((0,), 5, 1)
    W = Region([(-5,), (-4,), (-3,)], 1)
    n = budget['inequality_samples']
    z = SpectralParameter(0.0, 0.0)
    checks = [
        depleted_resolvent_check(ensemble, omega, W, 0.5, n, z, constants_half, sigmas=tol['sigmas']),
        decoupled_resolvent_check(ensemble, omega, W, constants_decoupled.s, n, z, constants_decoupled,
                                  sigmas=tol['sigmas']),
        full_resolvent_check(ensemble, omega, W, constants_decoupled.s, n, z, constants_decoupled,
                             sigmas=tol['sigmas']),
    ]
    return [CheckResult(c.name, c.passed, c.margin, 0.0, c.to_dict()) for c in checks]


def _closed_form_checks(tol: Mapping[str, float]) -> List[CheckResult]:
    p = TemperedKernel.nearest_neighbor(1)
    kernel_error = max(abs(kernel_norm_mu(p, mu) - math.cosh(mu)) for mu in (0.0, 0.3, 1.0, 2.5))
    rate = rate_from_b(p, 0.5, 0.99)
    rate_error = abs(rate.mu - math.acosh(1.98))
    ct_error = abs(combes_thomas_m(HoppingKernel(dim=1), 4.0) - math.log(2.0))
    envelope = envelope_from_criterion(0.5, box_region((0,), 3, 1), 2.0, p, L=3)
    k = np.arange(6)
    step_error = float(np.max(np.abs(envelope.step(3 * k) - 2.0 * 0.5 ** k)))
    return [
        CheckResult('kernel_norm_cosh', kernel_error <= tol['kernel'], kernel_error, tol['kernel']),
        CheckResult('rate_from_b', rate_error <= tol['rate'], rate_error, tol['rate'], {'mu': rate.mu}),
        CheckResult('combes_thomas_m', ct_error <= tol['combes_thomas'], ct_error, tol['combes_thomas']),
        CheckResult('envelope_step', step_error <= tol['envelope'], step_error, tol['envelope']),
    ]


def _guarded(name: str, func: Callable[[], Any]) -> List[CheckResult]:
    try:
        result = func()
    except Exception as e:
        logger.error(f"Comprobación {name} abortada: {e}")
        return [CheckResult(name, False, math.nan, math.nan, {'error': str(e)})]
    return result if isinstance(result, list) else [result]


def verify_suite(level: str = 'fast', tolerances: Optional[Mapping[str, float]] = None,
                 seed: int = 0) -> VerificationReport:
    """
    Ejecuta la suite de verificación.

    Args:
        level: 'fast' o 'full'
        tolerances: Sustituciones de DEFAULT_TOLERANCES (p. ej. {'identity': 1e-20} como control negativo)
        seed: Semilla maestra de todas las instancias

    Returns:
        VerificationReport; exit_code 0 si todo pasa, 1 en otro caso
    """
    if level not in LEVELS:
        raise ValueError(f"Nivel desconocido: {level} (válidos: {', '.join(LEVELS)})")
    unknown = set(tolerances or {}) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ValueError(f"Tolerancias desconocidas: {sorted(unknown)}")
    tol = dict(DEFAULT_TOLERANCES, **(tolerances or {}))
    budget = BUDGETS[level]
    logger.info(f"Suite de verificación nivel {level}, semilla {seed}")

    uniform = DisorderDistribution()
    constants_half = estimate_constants(uniform, 0.5, budget['effort'], seed)
    constants_decoupled = estimate_constants(uniform, 0.2, budget['effort'], seed)

    checks: List[CheckResult] = []
    checks += _guarded('identity_residuals', lambda: _identity_check(budget, tol, seed))
    checks += _guarded('krein', lambda: _krein_check(budget, tol, seed))
    checks += _guarded('moment_oracle', lambda: _oracle_check(budget, tol, seed))
    checks += _guarded('wegner', lambda: _wegner_checks(budget, tol, seed, constants_half))
    checks += _guarded('inequalities',
                       lambda: _inequality_checks(budget, tol, seed, constants_half, constants_decoupled))
    checks += _guarded('closed_forms', lambda: _closed_form_checks(tol))
    report = VerificationReport(level, seed, tol, checks)
    if report.passed:
        logger.info(f"Suite {level}: {len(checks)} comprobaciones superadas")
    else:
        logger.error(f"Suite {level}: fallos en {', '.join(report.failures)}")
    return report
