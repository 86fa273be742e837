"""
Núcleos templados
=================

Núcleos subprobabilísticos invariantes por traslación p(x,u) = w(u − x)
y la tasa μ que hace b·‖P‖_{1,μ} < 1.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

from scipy import optimize

from lattice import BondSet, Region, SitePoint, cut_set, make_site, nearest_neighbor_offsets, norm_inf

from .config_propagate import load_config

logger = logging.getLogger(__name__)

_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TemperedKernel:
    """Soporte finito de pares (desplazamiento, peso) con Σ pesos ≤ 1."""

    support: Tuple[Tuple[SitePoint, float], ...]

    def __post_init__(self):
        if not self.support:
            raise ValueError("El núcleo necesita al menos un desplazamiento")
        dims = {len(v) for v, _ in self.support}
        if len(dims) != 1:
            raise ValueError("Desplazamientos de dimensiones distintas")
        if any(w < 0 for _, w in self.support):
            raise ValueError("Los pesos del núcleo deben ser no negativos")
        if self.total_weight > 1 + _SUM_TOLERANCE:
            raise ValueError(f"Σ pesos = {self.total_weight} > 1: el núcleo no es subprobabilístico")

    @property
    def dim(self) -> int:
        return len(self.support[0][0])

    @property
    def total_weight(self) -> float:
        return sum(w for _, w in self.support)

    @property
    def max_range(self) -> int:
        return max(norm_inf(v) for v, w in self.support if w > 0) if self.total_weight > 0 else 0

    @classmethod
    def nearest_neighbor(cls, d: int) -> 'TemperedKernel':
        offsets = nearest_neighbor_offsets(d)
        return cls(tuple((v, 1.0 / len(offsets)) for v in offsets))

    @classmethod
    def identity(cls, d: int) -> 'TemperedKernel':
        return cls(((make_site([0] * d), 1.0),))

    @classmethod
    def from_cut_set(cls, lambda_plus: Region, bonds: Optional[BondSet] = None) -> 'TemperedKernel':
        """
        p(0,u') = (nº de enlaces de Γ(Λ^+) con extremo exterior u') / |Γ(Λ^+)|.
        """
        bonds = bonds if bonds is not None else cut_set(lambda_plus)
        if len(bonds) == 0:
            raise ValueError("Conjunto de corte vacío")
        weights: Dict[SitePoint, float] = {}
        for _, head in bonds:
            weights[head] = weights.get(head, 0.0) + 1.0 / len(bonds)
        return cls(tuple(sorted(weights.items())))

    def to_dict(self) -> Dict[str, Any]:
        return {'support': [[list(v), w] for v, w in self.support]}


def kernel_norm_mu(p: TemperedKernel, mu: float) -> float:
    """‖P‖_{1,μ} = Σ_v w(v)·e^{μ‖v‖∞} para núcleos invariantes por traslación."""
    if mu < 0:
        raise ValueError(f"μ debe ser no negativo, se recibió {mu}")
    return math.fsum(w * math.exp(mu * norm_inf(v)) for v, w in p.support)


@dataclass(frozen=True)
class RateResult:
    mu: float
    b: float
    safety: float
    norm: float
    unbounded: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def rate_from_b(p: TemperedKernel, b: float, safety: Optional[float] = None,
                config: Optional[Dict[str, Any]] = None) -> RateResult:
    """
    μ con b·‖P‖_{1,μ} = safety, por bisección.

    Raises:
        ValueError: Si b·‖P‖_{1,0} ≥ 1 o b ∉ (0,1)
    """
    config = config or load_config()
    safety = config['safety'] if safety is None else safety
    if not 0 < b < 1:
        raise ValueError(f"b debe estar en (0,1), se recibió {b}")
    if not 0 < safety < 1:
        raise ValueError(f"El factor de seguridad debe estar en (0,1), se recibió {safety}")
    base = b * kernel_norm_mu(p, 0.0)
    if base >= 1:
        raise ValueError(f"b·‖P‖ = {base:.6g} ≥ 1: el criterio no controla la iteración")
    mu_max = config['mu_max']
    if p.max_range == 0:
        logger.info(f"Núcleo sin alcance: μ no acotado, se devuelve μ_max={mu_max}")
        return RateResult(mu_max, b, safety, kernel_norm_mu(p, mu_max), True)
    target = safety
    if base >= safety:
        target = 0.5 * (base + 1.0)
        logger.warning(f"b·‖P‖_0 = {base:.6g} supera el factor de seguridad; objetivo {target:.6g}")

    def excess(mu: float) -> float:
        return b * kernel_norm_mu(p, mu) - target

    upper = 1.0
    while excess(upper) < 0:
        upper *= 2
        if upper > mu_max:
            return RateResult(mu_max, b, safety, kernel_norm_mu(p, mu_max), True)
    mu = optimize.bisect(excess, 0.0, upper, xtol=config['bisection_tolerance'])
    norm = kernel_norm_mu(p, mu)
    if not b * norm < 1:
        raise RuntimeError(f"La tasa obtenida no verifica b·‖P‖ < 1 (valor {b * norm})")
    return RateResult(float(mu), b, safety, norm)
