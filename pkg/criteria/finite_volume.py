"""
Criterios de volumen finito
===========================

Condiciones suficientes de localización evaluadas sobre una caja finita:
sitio único, la condición con supremo sobre subconjuntos, la condición
lineal con factor (1 + C̃_s/λ^s·Ξ_s(Λ))² y su forma generalizada.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ensemble import DisorderDistribution, OperatorEnsemble, boundary_weights, xi_s
from lattice import Region, SitePoint, box_region, enlarge, make_site, norm_inf
from moments import sample_moments, summarize
from regularity import RegularityConstants, phi_s
from resolvent import SpectralParameter

from .report import CriterionReport, make_report

logger = logging.getLogger(__name__)

ZParam = Union[SpectralParameter, complex, float]


def single_site_b(dist: DisorderDistribution, lam: float, E: float, s: float, d: int,
                  constants: RegularityConstants) -> CriterionReport:
    """
    Criterio de sitio único: 2d(2d−1)·(C_s/λ^s)·∫|λV − E|^{−s}ρ(dV) < 1.

    La integral vale λ^{−s}·φ_s(E/λ) y se evalúa por cuadratura.
    """
    if d not in (1, 2, 3):
        raise ValueError(f"Dimensión no soportada: {d}")
    if not lam > 0:
        raise ValueError(f"λ debe ser positivo, se recibió {lam}")
    integral = lam ** (-s) * phi_s(dist, complex(E / lam), s)
    coordination = 2 * d * (2 * d - 1)
    lhs = coordination * constants.a_priori_bound(lam) * integral
    return make_report('single_site', lhs, 0.0, 1.0, constants,
                       {'lambda': lam, 'energy': E, 's': s, 'd': d, 'integral': integral})


def _origin(Lambda: Region) -> SitePoint:
    origin = make_site([0] * Lambda.dim, Lambda.dim)
    if origin not in Lambda:
        raise ValueError("La región Λ debe contener el origen")
    return origin


def _energies(z: ZParam) -> List[SpectralParameter]:
    zp = SpectralParameter.coerce(z)
    return [zp] if zp.eta == 0 else [zp, zp.conjugate()]


def weighted_boundary_moment(ensemble: OperatorEnsemble, W: Region, weights: Dict[SitePoint, float],
                             z: SpectralParameter, s: float, n: int,
                             threads: Optional[int] = None) -> Tuple[float, float]:
    """
    Σ_u w(u)·E|G_W(0,u)|^s para u ∈ W (G_W(0,u) = 0 si u ∉ W).

    Returns:
        (media, error estándar) del sumando ponderado por muestra
    """
    origin = _origin(W)
    targets = [u for u in weights if u in W]
    if not targets:
        return 0.0, 0.0
    table = sample_moments(ensemble, W, [(origin, u) for u in targets], z, s, n, threads=threads)
    per_sample = table.values @ np.array([weights[u] for u in targets])
    mean, stderr, _, _ = summarize(per_sample, s, ensemble.disorder.tau)
    return mean, stderr


def default_family(Lambda: Region) -> List[Region]:
    """Cajas centradas anidadas contenidas en Λ, más Λ."""
    origin = _origin(Lambda)
    family = []
    r = 0
    while True:
        box = box_region(origin, r, Lambda.dim)
        if not box.is_subset(Lambda) or box == Lambda:
            break
        family.append(box)
        r += 1
    family.append(Lambda)
    return family


def _check_family(Lambda: Region, family: Sequence[Region]) -> None:
    if not family:
        raise ValueError("La familia de subconjuntos está vacía")
    origin = _origin(Lambda)
    for W in family:
        if origin not in W:
            raise ValueError(f"El subconjunto {W!r} no contiene el origen")
        if not W.is_subset(Lambda):
            raise ValueError(f"El subconjunto {W!r} no está contenido en Λ")


def _family_sums(ensemble: OperatorEnsemble, Lambda: Region, family: Sequence[Region],
                 z: SpectralParameter, s: float, n: int,
                 threads: Optional[int]) -> List[Tuple[float, float]]:
    weights = boundary_weights(ensemble.hopping, Lambda, s)
    return [weighted_boundary_moment(ensemble, W, weights, z, s, n, threads) for W in family]


def thm1_b(ensemble: OperatorEnsemble, Lambda: Region, z: ZParam, s: float, n: int,
           subset_family: Optional[Sequence[Region]] = None,
           constants: Optional[RegularityConstants] = None,
           threads: Optional[int] = None) -> CriterionReport:
    """
    b(Λ,z) = Ξ_s(Λ^+)·(C_s/λ^s)·max_W Σ_{<u,u'>∈Γ(Λ)} τ^s E|G_W(0,u)|^s.

    El máximo recorre solo la familia dada, por lo que el valor es una cota
    inferior del supremo sobre todos los W ⊂ Λ.
    """
    if constants is None:
        raise ValueError("Se requieren constantes de regularidad")
    family = list(subset_family) if subset_family is not None else default_family(Lambda)
    _check_family(Lambda, family)
    offsets = ensemble.hopping.support_offsets()
    lambda_plus = enlarge(Lambda, offsets)
    K1 = xi_s(ensemble.hopping, lambda_plus, s)
    factor = K1 * constants.a_priori_bound(ensemble.lam)
    zp = SpectralParameter.coerce(z)
    sums = _family_sums(ensemble, Lambda, family, zp, s, n, threads)
    values = [(factor * m, factor * e) for m, e in sums]
    k = int(np.argmax([v for v, _ in values]))
    lhs, uncertainty = values[k]
    scale = max((norm_inf(u) for u in lambda_plus), default=0)
    details = {
        'family_size': len(family),
        'family_lower_bound': True,
        'argmax_size': len(family[k]),
        'per_subset': [v for v, _ in values],
        'xi_lambda_plus': K1,
        'scale_L': scale,
        'mu': abs(math.log(lhs)) / scale if 0 < lhs < 1 and scale > 0 else None,
        'z': zp.to_dict(),
        'n': n,
    }
    return make_report('thm1', lhs, uncertainty, 1.0, constants, details)


def _decoupling_factor(constants: RegularityConstants, lam: float, s: float) -> float:
    if constants.D_s is None:
        raise RuntimeError("Constantes de desacoplamiento no disponibles para esta ley (soporte no acotado)")
    if not math.isfinite(constants.D_s):
        return math.inf
    return constants.C_tilde_s / lam ** s


def _amplified(prefactor: float, mean: float, stderr: float) -> Tuple[float, float]:
    if math.isinf(prefactor):
        return (0.0, 0.0) if mean == 0 and stderr == 0 else (math.inf, 0.0)
    return prefactor * mean, prefactor * stderr


def thm2_lhs(ensemble: OperatorEnsemble, Lambda: Region, z: ZParam, s: float, n: int,
             constants: RegularityConstants, threads: Optional[int] = None) -> CriterionReport:
    """
    (1 + (C̃_s/λ^s)·Ξ_s(Λ))²·Σ_{u∈Λ} w(u)·E|G_Λ(0,u)|^s, con
    w(u) = Σ_{u'∉Λ} τ(u−u')^s. Se evalúan z y z̄ y se informa el máximo.
    """
    K = _decoupling_factor(constants, ensemble.lam, s)
    xi = xi_s(ensemble.hopping, Lambda, s)
    weights = boundary_weights(ensemble.hopping, Lambda, s)
    prefactor = (1.0 + K * xi) ** 2 if xi > 0 else 1.0
    results = []
    for zp in _energies(z):
        mean, stderr = weighted_boundary_moment(ensemble, Lambda, weights, zp, s, n, threads)
        results.append(_amplified(prefactor, mean, stderr))
    lhs, uncertainty = max(results)
    details = {
        'xi_s': xi,
        'boundary_sites': len(weights),
        'prefactor': prefactor,
        'per_energy': [v for v, _ in results],
        'decoupling_band': constants.decoupling_band,
        'n': n,
    }
    if math.isinf(K):
        details['reason'] = 'D_s infinita: la condición lineal no es evaluable con este s'
    return make_report('thm2', lhs, uncertainty, 1.0, constants, details)


def general_b(ensemble: OperatorEnsemble, Lambda: Region, z: ZParam, s: float, n: int,
              subset_family: Optional[Sequence[Region]] = None,
              constants: Optional[RegularityConstants] = None,
              threads: Optional[int] = None) -> CriterionReport:
    """
    (1 + (C̃_s/λ^s)·Ξ_s(Λ))·max_W Σ_{u∈W, u'∉Λ} τ^s E|G_W(0,u)|^s,
    máximo sobre z y z̄.
    """
    if constants is None:
        raise ValueError("Se requieren constantes de regularidad")
    family = list(subset_family) if subset_family is not None else default_family(Lambda)
    _check_family(Lambda, family)
    K = _decoupling_factor(constants, ensemble.lam, s)
    xi = xi_s(ensemble.hopping, Lambda, s)
    prefactor = 1.0 + K * xi if xi > 0 else 1.0
    results = []
    for zp in _energies(z):
        sums = _family_sums(ensemble, Lambda, family, zp, s, n, threads)
        results.append(max(_amplified(prefactor, m, e) for m, e in sums))
    lhs, uncertainty = max(results)
    return make_report('general', lhs, uncertainty, 1.0, constants,
                       {'xi_s': xi, 'prefactor': prefactor, 'family_size': len(family),
                        'family_lower_bound': True, 'n': n})
