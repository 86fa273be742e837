"""
Distribuciones del desorden
===========================

Ley común ρ de los potenciales V_ω(x): uniforme, densidad lineal a trozos o
Cauchy, con los datos de regularidad declarados (τ de R1(τ)).
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

# Configurar logging
logger = logging.getLogger(__name__)

DISORDER_KINDS = ('uniform', 'piecewise_linear', 'cauchy')

# Masa de cola descartada al integrar leyes de soporte no acotado
_CAUCHY_TAIL = 1e-10


class PiecewiseLinearLaw(stats.rv_continuous):
    """Ley continua con densidad lineal entre nodos (x_i, p_i), nula fuera."""

    def __init__(self, xs: Sequence[float], ps: Sequence[float]):
        xs_arr = np.asarray(xs, dtype=float)
        ps_arr = np.asarray(ps, dtype=float)
        widths = np.diff(xs_arr)
        masses = 0.5 * (ps_arr[:-1] + ps_arr[1:]) * widths
        total = masses.sum()
        self._xs = xs_arr
        self._ps = ps_arr / total
        self._slopes = np.diff(self._ps) / widths
        self._cum = np.concatenate(([0.0], np.cumsum(masses / total)))
        super().__init__(a=float(xs_arr[0]), b=float(xs_arr[-1]), name='piecewise_linear')

    def _segment(self, x):
        return np.clip(np.searchsorted(self._xs, x, side='right') - 1, 0, len(self._xs) - 2)

    def _pdf(self, x):
        return np.interp(x, self._xs, self._ps)

    def _cdf(self, x):
        i = self._segment(x)
        dx = x - self._xs[i]
        return self._cum[i] + self._ps[i] * dx + 0.5 * self._slopes[i] * dx * dx

    def _ppf(self, q):
        i = np.clip(np.searchsorted(self._cum, q, side='right') - 1, 0, len(self._xs) - 2)
        r = q - self._cum[i]
        p = self._ps[i]
        disc = np.sqrt(np.maximum(p * p + 2.0 * self._slopes[i] * r, 0.0))
        with np.errstate(divide='ignore', invalid='ignore'):
            dx = np.where(p + disc > 0, 2.0 * r / (p + disc), 0.0)
        return self._xs[i] + dx


@dataclass(frozen=True)
class DisorderDistribution:
    """
    Ley del desorden con densidad acotada.

    Attributes:
        kind: 'uniform', 'piecewise_linear' o 'cauchy'
        low, high: Soporte de la ley uniforme
        knots: Nodos (x, densidad) de la ley lineal a trozos
        scale: Escala de la ley de Cauchy
        tau: Exponente declarado de R1(τ)
    """

    kind: str = 'uniform'
    low: float = -1.0
    high: float = 1.0
    knots: Tuple[Tuple[float, float], ...] = ()
    scale: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if self.kind not in DISORDER_KINDS:
            raise ValueError(f"Tipo de desorden desconocido: {self.kind}")
        if not 0 < self.tau <= 1:
            raise ValueError(f"τ debe estar en (0,1], se recibió {self.tau}")
        if self.kind == 'uniform' and not self.high > self.low:
            raise ValueError(f"Soporte uniforme vacío: [{self.low}, {self.high}]")
        if self.kind == 'cauchy' and self.scale <= 0:
            raise ValueError(f"La escala de Cauchy debe ser positiva, se recibió {self.scale}")
        if self.kind == 'piecewise_linear':
            knots = tuple((float(x), float(p)) for x, p in self.knots)
            xs = [k[0] for k in knots]
            if len(knots) < 2 or any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("Los nodos deben ser al menos dos, con abscisas estrictamente crecientes")
            if any(k[1] < 0 for k in knots) or all(k[1] == 0 for k in knots):
                raise ValueError("Las densidades en los nodos deben ser no negativas y no todas nulas")
            object.__setattr__(self, 'knots', knots)

    @cached_property
    def law(self):
        """Ley congelada de scipy.stats (o PiecewiseLinearLaw)."""
        if self.kind == 'uniform':
            return stats.uniform(loc=self.low, scale=self.high - self.low)
        if self.kind == 'cauchy':
            return stats.cauchy(loc=0.0, scale=self.scale)
        return PiecewiseLinearLaw([k[0] for k in self.knots], [k[1] for k in self.knots])

    def pdf(self, v):
        return self.law.pdf(v)

    def cdf(self, v):
        return self.law.cdf(v)

    def ppf(self, u):
        """CDF inversa; exacta para la uniforme y la de Cauchy."""
        return self.law.ppf(u)

    @property
    def bounded_support(self) -> bool:
        return self.kind != 'cauchy'

    def support(self) -> Tuple[float, float]:
        if self.kind == 'uniform':
            return self.low, self.high
        if self.kind == 'piecewise_linear':
            return self.knots[0][0], self.knots[-1][0]
        return -np.inf, np.inf

    def integration_support(self) -> Tuple[float, float]:
        """Intervalo finito de integración (cuantiles extremos para Cauchy)."""
        if self.bounded_support:
            return self.support()
        lo, hi = self.law.ppf([_CAUCHY_TAIL, 1.0 - _CAUCHY_TAIL])
        return float(lo), float(hi)

    def breakpoints(self) -> List[float]:
        """Puntos donde la densidad no es suave."""
        if self.kind == 'uniform':
            return [self.low, self.high]
        if self.kind == 'piecewise_linear':
            return [k[0] for k in self.knots]
        return [0.0]

    @property
    def density_bound(self) -> float:
        if self.kind == 'uniform':
            return 1.0 / (self.high - self.low)
        if self.kind == 'cauchy':
            return 1.0 / (np.pi * self.scale)
        return float(np.max(self.law._ps))

    def interval_mass(self, a, eps):
        """ρ(a−ε, a+ε)."""
        return self.cdf(np.asarray(a) + eps) - self.cdf(np.asarray(a) - eps)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'kind': self.kind, 'tau': self.tau}
        if self.kind == 'uniform':
            data.update({'low': self.low, 'high': self.high})
        elif self.kind == 'cauchy':
            data['scale'] = self.scale
        else:
            data['knots'] = [list(k) for k in self.knots]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DisorderDistribution':
        return cls(
            kind=data.get('kind', 'uniform'),
            low=float(data.get('low', -1.0)),
            high=float(data.get('high', 1.0)),
            knots=tuple(tuple(k) for k in data.get('knots', ())),
            scale=float(data.get('scale', 1.0)),
            tau=float(data.get('tau', 1.0)),
        )

    def fingerprint(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha1(payload.encode('utf-8')).hexdigest()[:16]


