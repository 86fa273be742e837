"""
Cotas de Combes–Thomas y extensión a la banda
=============================================
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from scipy import integrate, optimize

from ensemble import HoppingKernel
from lattice import norm_inf

from .config_propagate import load_config

logger = logging.getLogger(__name__)

STRIP_LABEL = 'cota con forma correcta salvo la constante de comparación de Poisson'


def combes_thomas_m(hopping: HoppingKernel, eta: float, tolerance: Optional[float] = None) -> float:
    """
    Mayor m con Σ_v τ(v)(e^{m‖v‖∞} − 1) ≤ η/2, de modo que
    |G(x,y;E+iη)| ≤ (2/η)·e^{−m‖x−y‖∞}.

    Returns:
        m ≥ 0 (math.inf si T = 0)
    """
    if not eta > 0:
        raise ValueError(f"η debe ser positivo, se recibió {eta}")
    offsets = hopping.offsets()
    if not offsets:
        return math.inf
    tol = tolerance if tolerance is not None else load_config()['ct_tolerance']

    def excess(m: float) -> float:
        return math.fsum(t * math.expm1(m * norm_inf(v)) for v, t in offsets) - eta / 2

    upper = 1.0
    while excess(upper) < 0:
        upper *= 2
    return float(optimize.bisect(excess, 0.0, upper, xtol=tol))


def combes_thomas_bound(hopping: HoppingKernel, eta: float, distance: float) -> float:
    """(2/η)·e^{−m·dist}."""
    m = combes_thomas_m(hopping, abs(eta))
    if math.isinf(m):
        return 2.0 / abs(eta) if distance == 0 else 0.0
    return 2.0 / abs(eta) * math.exp(-m * distance)


@dataclass(frozen=True)
class StripBound:
    value: float
    branch: str
    theta: float
    exponent: float
    poisson_constant: float
    real_axis_term: float
    interior_term: float
    label: str = STRIP_LABEL

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def strip_bound(A: float, mu: float, delta_E: float, eta: float, x_y_dist: float, alpha: float,
                hopping: Optional[HoppingKernel] = None, poisson_constant: Optional[float] = None) -> StripBound:
    """
    Extiende una cota A·e^{−μ·dist} del eje real a E + iη.

    Con θ = 2π/(α+1) y p = 2π/θ: si |η| ≥ ΔE·π/α se usa Combes–Thomas
    directamente; si no, A·e^{−μ·dist} + C·∫₀^{ΔE·θ} (2/η')e^{−m(η')·dist} d(η'^p)/ΔE^p.

    Raises:
        ValueError: Si α ≤ 0
    """
    if not alpha > 0:
        raise ValueError(f"α debe ser positivo, se recibió {alpha}")
    if not delta_E > 0:
        raise ValueError(f"ΔE debe ser positivo, se recibió {delta_E}")
    hopping = hopping or HoppingKernel(dim=1)
    C = load_config()['poisson_constant'] if poisson_constant is None else poisson_constant
    theta = 2 * math.pi / (alpha + 1)
    p = 2 * math.pi / theta
    if abs(eta) >= delta_E * math.pi / alpha:
        value = combes_thomas_bound(hopping, abs(eta), x_y_dist)
        return StripBound(value, 'combes_thomas', theta, p, C, 0.0, value)

    def integrand(t: float) -> float:
        if t == 0.0:
            return 0.0
        m = combes_thomas_m(hopping, t)
        decay = 0.0 if math.isinf(m) else math.exp(-m * x_y_dist)
        # (2/η')·d(η'^p) = 2p·η'^{p−2} dη'
        return 2 * p * t ** (p - 2) * decay

    interior, _ = integrate.quad(integrand, 0.0, delta_E * theta, limit=200)
    interior = C * interior / delta_E ** p
    real_axis = A * math.exp(-mu * x_y_dist)
    logger.debug(f"Cota en banda: eje real {real_axis:.4g}, interior {interior:.4g}")
    return StripBound(real_axis + interior, 'poisson', theta, p, C, real_axis, interior)
