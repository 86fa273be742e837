"""
Constantes de la cota de medidas espectrales
============================================

E|μ^{x,y}|(F) ≤ C·[sup_{E∈F} E|G(x,y;E)|^s]^r en volumen finito, con el
peso g(E)^{2p} = 1 + E² y los exponentes de Hölder fijados por (s, δ, p).
Sólo aritmética: no certifica la cota.
"""

import logging
import math
from typing import NamedTuple

from scipy import special

logger = logging.getLogger(__name__)


class FiniteVolumeBound(NamedTuple):
    C: float
    r: float
    alpha: float
    q: float
    q_prime: float
    p_prime: float
    weight_integral: float


def weight_integral(exponent: float) -> float:
    """∫_R (1+E²)^{−a} dE = √π·Γ(a−½)/Γ(a), finito para a > ½."""
    if not exponent > 0.5:
        raise ValueError(f"La integral del peso diverge para a = {exponent} ≤ 1/2")
    return math.sqrt(math.pi) * math.exp(special.gammaln(exponent - 0.5) - special.gammaln(exponent))


def finite_volume_bound_constants(s: float, delta: float, kappa: float, p: float,
                                  v_delta_moment: float, hopping_norm: float) -> FiniteVolumeBound:
    """
    Exponentes y constantes de la cota.

    α/s + α/δ = 1, q = pδ, q' = p/(p − 1/δ), p' = p/(p − 1). El primer
    factor usa <x|(1+H²)|x> ≤ B + V(x)² con B = 1 + ‖T‖²; el segundo, la
    integral en cerrado del peso (1+E²)^{−q'/(2p)}.

    Args:
        s: Exponente del momento, 0 < s < 1
        delta: Momento finito del potencial, 0 < δ ≤ 2
        kappa: Cota uniforme de la densidad condicional
        p: Exponente de Hölder, 1/δ < p < 1 + 1/δ
        v_delta_moment: E|V(x)|^δ (del potencial ya escalado por λ)
        hopping_norm: ‖T‖

    Returns:
        FiniteVolumeBound(C, r, α, q, q', p', integral del peso)
    """
    if not 0 < s < 1:
        raise ValueError(f"s debe estar en (0,1), se recibió {s}")
    if not 0 < delta <= 2:
        raise ValueError(f"δ debe estar en (0,2], se recibió {delta}")
    if not p > 1 / delta or not p > 1:
        raise ValueError(f"Se requiere p > max(1, 1/δ), se recibió p={p}, δ={delta}")
    if kappa <= 0 or v_delta_moment < 0 or hopping_norm < 0:
        raise ValueError("κ, E|V|^δ y ‖T‖ deben ser positivos")
    alpha = s * delta / (s + delta)
    q = p * delta
    q_prime = p / (p - 1 / delta)
    p_prime = p / (p - 1)
    weight = weight_integral(q_prime / (2 * p))
    B = 1.0 + hopping_norm ** 2
    first = (B ** (delta / 2) + v_delta_moment) ** (1 / q)
    second = ((2 * v_delta_moment) ** (alpha / delta) * (kappa * weight) ** (alpha / s)) ** (1 / q_prime)
    r = alpha / (s * q_prime)
    logger.debug(f"Cota espectral: α={alpha:.4g}, q={q:.4g}, q'={q_prime:.4g}, r={r:.4g}")
    return FiniteVolumeBound(first * second, r, alpha, q, q_prime, p_prime, weight)
