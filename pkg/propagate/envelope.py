"""
Envolventes de decaimiento
==========================

Convierte un criterio superado (valor b < 1 a escala L) en cotas
certificadas: la envolvente escalonada g_∞·b^{⌊d/L⌋}, su forma puntual
exponencial y el presupuesto en ℓ¹ con peso e^{μd}.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from lattice import Region, SitePoint, dist_omega, make_site, site_distance

from .kernels import RateResult, TemperedKernel, kernel_norm_mu, rate_from_b

logger = logging.getLogger(__name__)

L_INFTY = 'l_infty'
DIST_OMEGA = 'dist_omega'


@dataclass(frozen=True)
class DecayEnvelope:
    """
    prefactor·e^{−μ·dist} en la métrica indicada, con la envolvente
    escalonada y el presupuesto ℓ¹ de los que procede.
    """

    mu: float
    prefactor: float
    metric: str
    b: float
    L: float
    g_inf: float
    rate: Optional[RateResult] = None
    l1_budget: Optional[float] = None
    omega: Optional[Region] = None
    offsets: Tuple[SitePoint, ...] = ()
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in (L_INFTY, DIST_OMEGA):
            raise ValueError(f"Métrica desconocida: {self.metric}")
        if not self.mu > 0 or not self.prefactor > 0:
            raise ValueError("μ y el prefactor deben ser positivos")

    def step(self, dist) -> np.ndarray:
        """g_∞·b^{⌊dist/L⌋}."""
        k = np.floor(np.asarray(dist, dtype=float) / self.L)
        return self.g_inf * self.b ** k

    def pointwise(self, dist) -> np.ndarray:
        return self.prefactor * np.exp(-self.mu * np.asarray(dist, dtype=float))

    def pointwise_omega(self, x: Sequence[int], y: Sequence[int]) -> float:
        """Envolvente evaluada en dist_Ω(x,y)."""
        if self.omega is None:
            raise ValueError("La envolvente no tiene región Ω asociada")
        d = dist_omega(self.omega, x, y, list(self.offsets) or None)
        return float(self.pointwise(d))

    def evaluate(self, x: Sequence[int], y: Sequence[int]) -> float:
        if self.metric == DIST_OMEGA:
            return self.pointwise_omega(x, y)
        return float(self.pointwise(site_distance(make_site(x), make_site(y))))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mu': self.mu,
            'prefactor': self.prefactor,
            'metric': self.metric,
            'b': self.b,
            'L': self.L,
            'g_inf': self.g_inf,
            'rate': self.rate.to_dict() if self.rate is not None else None,
            'l1_budget': self.l1_budget,
            'provenance': dict(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


def _check(b: float, g_inf: float) -> None:
    if not 0 < b < 1:
        raise ValueError(f"b debe estar en (0,1), se recibió {b}")
    if not g_inf > 0:
        raise ValueError(f"g_∞ debe ser positivo, se recibió {g_inf}")


def l1_budget(p: TemperedKernel, b: float, size: int, g_inf: float,
              safety: Optional[float] = None) -> Tuple[RateResult, float]:
    """‖g‖_{1,μ} ≤ g_∞·|Λ|/(1 − b·‖P‖_{1,μ}) en la tasa de rate_from_b."""
    rate = rate_from_b(p, b, safety)
    return rate, g_inf * size / (1.0 - b * kernel_norm_mu(p, rate.mu))


def envelope_from_criterion(b: float, Lambda: Region, g_inf: float, p: TemperedKernel,
                            L: Optional[float] = None, safety: Optional[float] = None,
                            provenance: Optional[Dict[str, Any]] = None) -> DecayEnvelope:
    """
    Envolvente certificada a partir de un criterio superado.

    Args:
        b: Valor del criterio, 0 < b < 1
        Lambda: Región del criterio
        g_inf: Cota a priori (C_s/λ^s)
        p: Núcleo templado de la iteración
        L: Escala (por defecto, alcance máximo del núcleo)

    Returns:
        DecayEnvelope con μ = |ln b|/L, prefactor g_∞/b y el presupuesto ℓ¹
    """
    _check(b, g_inf)
    scale = float(L) if L is not None else float(p.max_range)
    if not scale > 0:
        raise ValueError("La escala L debe ser positiva")
    rate, budget = l1_budget(p, b, len(Lambda), g_inf, safety)
    mu = abs(math.log(b)) / scale
    logger.info(f"Envolvente: μ={mu:.6g}, prefactor={g_inf / b:.6g}, presupuesto ℓ¹={budget:.6g}")
    return DecayEnvelope(mu, g_inf / b, L_INFTY, b, scale, g_inf, rate, budget,
                         provenance=dict(provenance or {}))


def envelope_from_thm2(b: float, Lambda: Region, g_inf: float, p: TemperedKernel,
                       omega: Optional[Region] = None, L: Optional[float] = None,
                       offsets: Sequence[Sequence[int]] = (),
                       provenance: Optional[Dict[str, Any]] = None) -> DecayEnvelope:
    """
    Envolvente bilateral (g_∞/b²)·e^{−(|ln b|/L)·dist_Ω(x,y)}.

    La iteración por la izquierda y por la derecha reparte la distancia
    dist_Ω en dos bolas; cada lado aporta un factor 1/b.
    """
    _check(b, g_inf)
    scale = float(L) if L is not None else float(p.max_range)
    if not scale > 0:
        raise ValueError("La escala L debe ser positiva")
    rate, budget = l1_budget(p, b, len(Lambda), g_inf)
    mu = abs(math.log(b)) / scale
    offs = tuple(make_site(v) for v in offsets)
    return DecayEnvelope(mu, g_inf / b ** 2, DIST_OMEGA if omega is not None else L_INFTY, b, scale, g_inf,
                         rate, budget, omega, offs, dict(provenance or {}))
