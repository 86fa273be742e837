"""
Cuadraturas con singularidades algebraicas
==========================================

Integrales ∫ ρ(V)·Π_j |V − c_j|^{e_j} dV sobre el soporte de la ley. Los
centros reales con exponente no entero se convierten en extremos de
subintervalos y se absorben con el peso algebraico de QUADPACK (QAWS).
"""

import logging
import math
import warnings
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from ensemble import DisorderDistribution

logger = logging.getLogger(__name__)

_MERGE_TOLERANCE = 1e-13
_REAL_AXIS_TOLERANCE = 1e-12
_QUAD_LIMIT = 200


class RegularityError(RuntimeError):
    """Fallo de una estimación de regularidad, con el testigo que la provoca."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}


def density_function(dist: DisorderDistribution) -> Callable[[float], float]:
    """Densidad escalar rápida para los integrandos de quad."""
    if dist.kind == 'uniform':
        lo, hi, height = dist.low, dist.high, 1.0 / (dist.high - dist.low)
        return lambda v: height if lo <= v <= hi else 0.0
    if dist.kind == 'cauchy':
        gamma = dist.scale
        return lambda v: gamma / (math.pi * (v * v + gamma * gamma))
    law = dist.law
    xs, ps = law._xs, law._ps
    return lambda v: float(np.interp(v, xs, ps, left=0.0, right=0.0))


def _merge(points: Iterable[Tuple[float, float]], scale: float) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for p, e in sorted(points):
        if merged and abs(p - merged[-1][0]) <= _MERGE_TOLERANCE * scale:
            merged[-1] = (merged[-1][0], merged[-1][1] + e)
        else:
            merged.append((p, e))
    return [(p, e) for p, e in merged if e != 0.0]


def _quad(func, a, b, wvar, tol) -> Tuple[float, float]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', integrate.IntegrationWarning)
        if wvar == (0.0, 0.0):
            value, error = integrate.quad(func, a, b, epsabs=1e-13, epsrel=tol, limit=_QUAD_LIMIT)
        else:
            value, error = integrate.quad(func, a, b, weight='alg', wvar=wvar,
                                          epsabs=1e-13, epsrel=tol, limit=_QUAD_LIMIT)
    if caught and error > 100 * tol * abs(value) + 1e-10:
        raise RegularityError(
            f"La cuadratura no convergió en [{a:.6g}, {b:.6g}] (error {error:.3e}, valor {value:.3e})",
            witness={'a': a, 'b': b, 'wvar': list(wvar), 'error': error, 'value': value})
    return value, error


def singular_integral(func: Callable[[float], float], lo: float, hi: float,
                      singular: Sequence[Tuple[float, float]] = (),
                      breakpoints: Sequence[float] = (), tol: float = 1e-6) -> float:
    """
    ∫_lo^hi func(x)·Π_j |x − p_j|^{e_j} dx con p_j reales.

    Args:
        func: Parte suave del integrando
        lo, hi: Intervalo finito
        singular: Pares (p_j, e_j); los puntos fuera de [lo, hi] se tratan como factores suaves
        breakpoints: Puntos de no suavidad de func
        tol: Tolerancia relativa

    Returns:
        Valor de la integral (math.inf si algún exponente acumulado es ≤ −1 dentro del intervalo)
    """
    scale = max(hi - lo, 1.0)
    points = _merge(singular, scale)
    inside = [(p, e) for p, e in points if lo - _MERGE_TOLERANCE * scale <= p <= hi + _MERGE_TOLERANCE * scale]
    outside = [(p, e) for p, e in points if (p, e) not in inside]
    nodes = sorted({lo, hi} | {b for b in breakpoints if lo < b < hi} | {min(max(p, lo), hi) for p, _ in inside})
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        if b - a <= 0:
            continue
        e_left = sum(e for p, e in inside if abs(p - a) <= _MERGE_TOLERANCE * scale)
        e_right = sum(e for p, e in inside if abs(p - b) <= _MERGE_TOLERANCE * scale)
        if e_left <= -1.0 or e_right <= -1.0:
            return math.inf
        smooth = [(p, e) for p, e in inside
                  if abs(p - a) > _MERGE_TOLERANCE * scale and abs(p - b) > _MERGE_TOLERANCE * scale]
        smooth += outside

        def integrand(x, smooth=smooth):
            value = func(x)
            for p, e in smooth:
                value *= abs(x - p) ** e
            return value

        value, _ = _quad(integrand, a, b, (float(e_left), float(e_right)), tol)
        total += value
    return total


def power_product_integral(dist: DisorderDistribution, factors: Sequence[Tuple[complex, float]],
                           tol: float = 1e-6, smooth: Optional[Callable[[float], float]] = None) -> float:
    """
    E[Π_j |V − c_j|^{e_j}] para centros complejos c_j.

    Los centros casi reales se tratan como singularidades exactas; los
    demás se integran como factores suaves con un punto de corte en Re c_j.
    """
    lo, hi = dist.integration_support()
    width = hi - lo
    density = density_function(dist)
    real_points: List[Tuple[float, float]] = []
    complex_points: List[Tuple[complex, float]] = []
    for c, e in factors:
        c = complex(c)
        if abs(c.imag) <= _REAL_AXIS_TOLERANCE * width:
            real_points.append((c.real, e))
        else:
            complex_points.append((c, e))
    peaks = [c.real for c, _ in complex_points if lo < c.real < hi]

    def func(x):
        value = density(x)
        for c, e in complex_points:
            value *= abs(x - c) ** e
        if smooth is not None:
            value *= smooth(x)
        return value

    return singular_integral(func, lo, hi, real_points, list(dist.breakpoints()) + peaks, tol)


def phi_s(dist: DisorderDistribution, zeta: complex, s: float, tol: float = 1e-6) -> float:
    """φ_s(ζ) = ∫ |V − ζ|^{−s} ρ(dV)."""
    return power_product_integral(dist, [(zeta, -s)], tol)


def psi_s(dist: DisorderDistribution, z: complex, w: complex, s: float, tol: float = 1e-6) -> float:
    """ψ_s(z,w) = ∫ |V − z|^s / |V − w|^s ρ(dV)."""
    return power_product_integral(dist, [(z, s), (w, -s)], tol)


def gamma_s(dist: DisorderDistribution, z: complex, w: complex, zeta: complex, s: float,
            tol: float = 1e-6) -> float:
    """γ_s(z,w,ζ) = ∫ |V − z|^s / (|V − w|^s |V − ζ|^s) ρ(dV)."""
    return power_product_integral(dist, [(z, s), (w, -s), (zeta, -s)], tol)
