"""
Probabilidades de eventos espectrales
=====================================

Fracción de muestras con espectro cercano a E, con eventos de la
condición multiescala o con autovalores bajo el fondo E₀ + ΔE, todas con
intervalo de Wilson para la proporción binomial.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
from scipy import linalg, stats

from ensemble import DisorderSample, OperatorEnsemble, assemble, sample_block
from lattice import Region, box_region, norm_inf
from moments import load_config as load_moments_config
from moments import sample_moments
from resolvent import SpectralParameter

from .config_criteria import load_config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbabilityEstimate:
    """Proporción k/n con intervalo de confianza de Wilson."""

    probability: float
    successes: int
    n: int
    ci_low: float
    ci_high: float
    confidence: float = 0.95
    reference: Optional[float] = None

    @property
    def stderr(self) -> float:
        p = self.probability
        return math.sqrt(p * (1 - p) / self.n)

    @property
    def below_reference(self) -> Optional[bool]:
        if self.reference is None:
            return None
        return self.ci_high <= self.reference

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def binomial_estimate(events: np.ndarray, confidence: float = 0.95,
                      reference: Optional[float] = None) -> ProbabilityEstimate:
    events = np.asarray(events, dtype=bool)
    n = int(events.size)
    if n == 0:
        raise ValueError("No hay muestras")
    k = int(events.sum())
    ci = stats.binomtest(k, n).proportion_ci(confidence_level=confidence, method='wilson')
    return ProbabilityEstimate(k / n, k, n, float(ci.low), float(ci.high), confidence, reference)


def _box(ensemble: OperatorEnsemble, L: int) -> Region:
    region = box_region([0] * ensemble.dim, L, ensemble.dim)
    limit = load_config()['eigen_limit']
    if len(region) > limit:
        raise ValueError(f"La caja tiene {len(region)} sitios, más que el límite de diagonalización {limit}")
    return region


def _per_sample(ensemble: OperatorEnsemble, region: Region, n: int,
                func: Callable[[np.ndarray], Any], threads: Optional[int] = None) -> List[Any]:
    """Aplica func al espectro de cada muestra 0..n−1, en orden de índice."""
    values = sample_block(ensemble, region, range(n))

    def run(index: int):
        H = assemble(ensemble, DisorderSample(region, values[index], index))
        try:
            return func(linalg.eigh(H.dense(), eigvals_only=True))
        except linalg.LinAlgError as e:
            logger.error(f"Fallo del diagonalizador en la muestra {index}: {e}")
            raise RuntimeError(f"Fallo del diagonalizador en la muestra {index}: {e}")

    workers = threads if threads is not None else load_moments_config()['threads']
    if workers <= 1:
        return [run(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(n)))


def spectrum_distance_prob(ensemble: OperatorEnsemble, L: int, E: float, delta: float, n: int,
                           C2: Optional[float] = None, xi: Optional[float] = None,
                           threads: Optional[int] = None) -> ProbabilityEstimate:
    """
    P(dist(σ(H_{Λ_L}), E) ≤ δ).

    Si se dan (C₂, ξ) la referencia C₂·L^{−ξ} queda en el resultado.
    """
    if delta < 0:
        raise ValueError(f"δ debe ser no negativo, se recibió {delta}")
    region = _box(ensemble, L)
    distances = _per_sample(ensemble, region, n, lambda ev: float(np.min(np.abs(ev - E))), threads)
    reference = C2 * max(L, 1) ** (-xi) if C2 is not None and xi is not None else None
    return binomial_estimate(np.asarray(distances) <= delta, reference=reference)


def bottom_tail_prob(ensemble: OperatorEnsemble, L: int, delta_E: float, n: int,
                     threads: Optional[int] = None) -> ProbabilityEstimate:
    """P(inf σ(H_{Λ_L}) ≤ E₀ + ΔE) con E₀ el fondo del espectro casi seguro."""
    if not ensemble.disorder.bounded_support:
        raise ValueError("El fondo del espectro no es finito para desorden sin soporte acotado")
    region = _box(ensemble, L)
    bottom = ensemble.spectrum_bottom()
    minima = _per_sample(ensemble, region, n, lambda ev: float(ev[0]), threads)
    return binomial_estimate(np.asarray(minima) <= bottom + delta_E)


def multiscale_event_prob(ensemble: OperatorEnsemble, L: int, A: float, mu: float,
                          z: Union[SpectralParameter, complex, float], n: int,
                          threads: Optional[int] = None) -> ProbabilityEstimate:
    """P(∃x ∈ Λ_L: |G_{Λ_L}(0,x;z)| > A·e^{−μ‖x‖})."""
    region = _box(ensemble, L)
    origin = tuple([0] * ensemble.dim)
    pairs = [(origin, x) for x in region]
    table = sample_moments(ensemble, region, pairs, z, 1.0, n, threads=threads)
    envelope = A * np.exp(-mu * np.array([norm_inf(x) for x in region], dtype=float))
    events = np.any(table.values > envelope[None, :], axis=1)
    # las muestras con resolvente singular son resonancias y cuentan como evento
    events = np.concatenate([events, np.ones(len(table.failed), dtype=bool)])
    return binomial_estimate(events)


def tails_moment_bound(delta: float, distance: float, s: float, t: float, C_t: float,
                       lam: float, p_bad: float) -> float:
    """
    Cota de momento por conjuntos bueno/malo:
    4^s δ^{−s} e^{−s·dist·δ/4} + C_t^{s/t} λ^{−s} p^{1−s/t}.
    """
    if not 0 < s < t:
        raise ValueError(f"Se requiere 0 < s < t, se recibió s={s}, t={t}")
    if delta <= 0:
        raise ValueError(f"δ debe ser positivo, se recibió {delta}")
    if not 0 <= p_bad <= 1:
        raise ValueError(f"Probabilidad fuera de [0,1]: {p_bad}")
    good = 4 ** s * delta ** (-s) * math.exp(-s * distance * delta / 4)
    bad = C_t ** (s / t) * lam ** (-s) * p_bad ** (1 - s / t)
    return good + bad
