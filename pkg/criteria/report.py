"""
Informes de criterios
=====================
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from regularity import RegularityConstants

from .config_criteria import load_config

logger = logging.getLogger(__name__)

KINDS = ('single_site', 'thm1', 'thm2', 'general', 'power_gate', 'spectrum_prob', 'multiscale_prob')

PASS = 'pass'
FAIL = 'fail'
INCONCLUSIVE = 'inconclusive'


def verdict(lhs: float, uncertainty: float, threshold: float, sigmas: Optional[float] = None) -> str:
    """
    Veredicto con banda de sigmas: pass si lhs + kσ < umbral, fail si
    lhs − kσ ≥ umbral, inconclusive si la banda contiene el umbral.
    """
    k = load_config()['sigma_band'] if sigmas is None else sigmas
    if math.isnan(lhs):
        return INCONCLUSIVE
    if lhs + k * uncertainty < threshold:
        return PASS
    if lhs - k * uncertainty >= threshold:
        return FAIL
    return INCONCLUSIVE


def certification(constants: Optional[RegularityConstants]) -> str:
    if constants is not None and constants.certified:
        return 'certified'
    return 'heuristic'


@dataclass(frozen=True)
class CriterionReport:
    """Resultado de un criterio de volumen finito con la procedencia de las constantes."""

    kind: str
    lhs: float
    uncertainty: float
    threshold: float
    verdict: str
    constants_used: Dict[str, Any] = field(default_factory=dict)
    certification: str = 'heuristic'
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Tipo de criterio desconocido: {self.kind}")
        if self.verdict not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"Veredicto desconocido: {self.verdict}")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def label(self) -> str:
        """'certified pass', 'heuristic pass', 'fail' o 'inconclusive'."""
        return f"{self.certification} pass" if self.passed else self.verdict

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'lhs': self.lhs,
            'uncertainty': self.uncertainty,
            'threshold': self.threshold,
            'verdict': self.verdict,
            'label': self.label,
            'certification': self.certification,
            'constants_used': dict(self.constants_used),
            'details': dict(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str)


def make_report(kind: str, lhs: float, uncertainty: float, threshold: float,
                constants: Optional[RegularityConstants], details: Optional[Dict[str, Any]] = None) -> CriterionReport:
    result = CriterionReport(
        kind=kind,
        lhs=float(lhs),
        uncertainty=float(uncertainty),
        threshold=float(threshold),
        verdict=verdict(lhs, uncertainty, threshold),
        constants_used=constants.to_dict() if constants is not None else {},
        certification=certification(constants),
        details=details or {},
    )
    logger.info(f"Criterio {kind}: lhs={lhs:.6g} ± {uncertainty:.2g} frente a {threshold:.6g} -> {result.label}")
    if result.passed and result.certification == 'heuristic':
        logger.warning(f"Criterio {kind} superado con constantes heurísticas (cotas inferiores)")
    return result
