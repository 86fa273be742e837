"""
Compuerta de ley de potencias
=============================

Decaimiento potencial suficientemente rápido en una capa L/2 ≤ ‖x−y‖ ≤ L
implica decaimiento exponencial. En lugar de constantes B₁, B₂ opacas se
ensambla la cadena explícita: los enlaces del corte con ‖u−u'‖ ≥ L/2 se
acotan con C̃_s/λ^s y los restantes con el supremo de la capa.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import pandas as pd

from ensemble import HoppingKernel
from lattice import box_region, norm_inf
from moments import DecayFit, MomentProfile, decay_fit
from regularity import RegularityConstants

from .report import CriterionReport, make_report

logger = logging.getLogger(__name__)

FINITE_VOLUME = 'finite_volume'
INFINITE_VOLUME = 'infinite_volume'

ShellInput = Union[MomentProfile, pd.DataFrame, Mapping[int, float]]


@dataclass(frozen=True)
class CutSplit:
    """Ξ_s(Λ_L) separado según ‖u−u'‖∞ ≥ L/2 (lejano) o < L/2 (cercano)."""

    far: float
    near: float

    @property
    def total(self) -> float:
        return self.far + self.near


def split_cut_weight(hopping: HoppingKernel, L: int, s: float) -> CutSplit:
    box = box_region([0] * hopping.dim, L, hopping.dim)
    far = near = 0.0
    offsets = hopping.offsets()
    for u in box:
        for v, amplitude in offsets:
            if tuple(a + b for a, b in zip(u, v)) in box:
                continue
            if norm_inf(v) >= L / 2:
                far += amplitude ** s
            else:
                near += amplitude ** s
    return CutSplit(far, near)


def shell_supremum(profile: ShellInput, L: int) -> Tuple[float, float, int]:
    """
    sup_{L/2 ≤ d ≤ L} de la media por capa.

    Returns:
        (supremo, error estándar de la entrada que lo alcanza, número de capas)

    Raises:
        ValueError: Si la capa está vacía
    """
    if isinstance(profile, MomentProfile):
        rows = [(e.distance, e.mean, e.stderr) for e in profile.estimates]
    elif isinstance(profile, pd.DataFrame):
        stderr = profile['stderr'] if 'stderr' in profile else [0.0] * len(profile)
        rows = list(zip(profile['distance'], profile['mean'], stderr))
    else:
        rows = [(d, v, 0.0) for d, v in profile.items()]
    shell = [(float(m), float(e)) for d, m, e in rows if L / 2 <= d <= L]
    if not shell:
        raise ValueError(f"Capa vacía: no hay distancias en [{L / 2:g}, {L}]")
    best = max(shell)
    return best[0], best[1], len(shell)


@dataclass(frozen=True)
class GateAssembly:
    """Condición ensamblada y umbrales equivalentes."""

    gate: float
    lhs: float
    shell_threshold: float
    equivalent_B: float
    prefactor: float
    split_far: float
    split_near: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def assemble_gate(shell_sup: float, d: int, L: int, variant: str, constants: RegularityConstants,
                  lam: float, hopping: Optional[HoppingKernel] = None) -> GateAssembly:
    """
    Ensambla (1 + K·Ξ)²·[K·Ξ_lejano + sup_fv·Ξ_cercano] con K = C̃_s/λ^s.

    En la variante de volumen infinito el supremo de volumen finito se
    acota por sup·(1 + K·Ξ_cercano) + K²·Ξ_lejano.
    """
    if variant not in (FINITE_VOLUME, INFINITE_VOLUME):
        raise ValueError(f"Variante desconocida: {variant}")
    if L < 1:
        raise ValueError(f"L debe ser ≥ 1, se recibió {L}")
    hopping = hopping or HoppingKernel(dim=d)
    s = constants.s
    K = constants.require_decoupling() / lam ** s
    split = split_cut_weight(hopping, L, s)
    prefactor = (1.0 + K * split.total) ** 2
    power = 3 * (d - 1) if variant == FINITE_VOLUME else 4 * (d - 1)
    gate = L ** power * shell_sup
    if variant == FINITE_VOLUME:
        finite_sup = shell_sup
    else:
        finite_sup = shell_sup * (1.0 + K * split.near) + K ** 2 * split.far
    lhs = prefactor * (K * split.far + finite_sup * split.near)
    # umbral sobre el supremo de volumen finito
    room = 1.0 / prefactor - K * split.far
    if split.near > 0:
        finite_threshold = room / split.near
    else:
        finite_threshold = math.inf if room > 0 else -math.inf
    if variant == FINITE_VOLUME:
        threshold = finite_threshold
    else:
        threshold = (finite_threshold - K ** 2 * split.far) / (1.0 + K * split.near)
    return GateAssembly(gate, lhs, threshold, L ** power * threshold, prefactor, split.far, split.near)


def power_gate(profile_shell_sup: ShellInput, d: int, L: int, variant: str,
               constants: RegularityConstants, lam: float,
               hopping: Optional[HoppingKernel] = None) -> CriterionReport:
    """
    Evalúa la compuerta L^{3(d−1)}·sup (o L^{4(d−1)}) y la condición ensamblada < 1.

    Args:
        profile_shell_sup: Perfil o tabla (distance, mean, stderr) o mapa distancia → supremo
        d: Dimensión
        L: Escala de la caja Λ_L
        variant: 'finite_volume' o 'infinite_volume'
        constants: Constantes de regularidad (con D_s finita)
        lam: Intensidad del desorden
        hopping: Núcleo de hopping (por defecto vecinos próximos)
    """
    shell_sup, shell_err, shells = shell_supremum(profile_shell_sup, L)
    assembly = assemble_gate(shell_sup, d, L, variant, constants, lam, hopping)
    slope = assembly.prefactor * assembly.split_near
    if variant == INFINITE_VOLUME:
        slope *= 1.0 + constants.require_decoupling() / lam ** constants.s * assembly.split_near
    details = dict(assembly.to_dict(), variant=variant, shell_sup=shell_sup, shells=shells, L=L, d=d)
    return make_report('power_gate', assembly.lhs, slope * shell_err, 1.0, constants, details)


@dataclass(frozen=True)
class MobilityEdgeReport:
    shell_sup: float
    shell_threshold: float
    equivalent_B: float
    below_threshold: bool
    fit: Optional[DecayFit]
    implication_applies: bool
    consistent: bool

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['fit'] = self.fit.to_dict() if self.fit is not None else None
        return data


def mobility_edge_diagnostic(profile: MomentProfile, d: int, L: int, constants: RegularityConstants,
                             hopping: Optional[HoppingKernel] = None, lam: float = 1.0,
                             variant: str = FINITE_VOLUME,
                             window: Optional[Tuple[float, float]] = None) -> MobilityEdgeReport:
    """
    Dirección comprobable de las cotas inferiores en bordes de movilidad:
    si el supremo de la capa está bajo el umbral ensamblado, el ajuste de
    decaimiento debe dar μ > 0.
    """
    shell_sup, _, _ = shell_supremum(profile, L)
    assembly = assemble_gate(shell_sup, d, L, variant, constants, lam, hopping)
    below = shell_sup < assembly.shell_threshold
    fit: Optional[DecayFit] = None
    try:
        fit = decay_fit(profile, window)
    except ValueError as e:
        logger.warning(f"Ajuste de decaimiento no disponible: {e}")
    consistent = (not below) or (fit is not None and fit.mu > 0)
    if not consistent:
        logger.warning("Supremo bajo el umbral pero sin decaimiento exponencial ajustado")
    return MobilityEdgeReport(shell_sup, assembly.shell_threshold, assembly.equivalent_B,
                              below, fit, below, consistent)
