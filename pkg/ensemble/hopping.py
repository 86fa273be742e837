"""
Núcleos de hopping
==================

Hopping determinista T: vecinos próximos (Laplaciano discreto), núcleos
templados τ(v) = t0·e^{−m‖v‖∞} truncados en rango R, o T = 0. En d=2 admite
fases de Peierls de flujo uniforme en gauge de Landau simétrico.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from lattice import SitePoint, nearest_neighbor_offsets, norm_inf

# Configurar logging
logger = logging.getLogger(__name__)

HOPPING_KINDS = ('none', 'nearest_neighbor', 'tempered')

# Cola descartada relativa admitida al truncar núcleos templados
TRUNCATION_TOLERANCE = 1e-12
_MAX_RANGE = 64


def _shell_size(r: int, d: int) -> int:
    if r == 0:
        return 1
    return (2 * r + 1) ** d - (2 * r - 1) ** d


@dataclass(frozen=True)
class HoppingKernel:
    """
    Núcleo de hopping traslacionalmente invariante sobre Z^d.

    Attributes:
        dim: Dimensión de la red
        kind: 'none', 'nearest_neighbor' o 'tempered'
        t0: Amplitud del núcleo templado
        m: Tasa de decaimiento del núcleo templado
        range: Rango de truncamiento R (None → automático)
        peierls_flux: Flujo por plaqueta en radianes (solo d=2)
        s_reference: Exponente s usado por la regla de truncamiento
    """

    dim: int
    kind: str = 'nearest_neighbor'
    t0: float = 1.0
    m: float = 1.0
    range: Optional[int] = None
    peierls_flux: Optional[float] = None
    s_reference: float = 0.5
    truncation_error: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"Dimensión {self.dim} no soportada")
        if self.kind not in HOPPING_KINDS:
            raise ValueError(f"Tipo de hopping desconocido: {self.kind}")
        if self.peierls_flux is not None and self.dim != 2:
            raise ValueError("Las fases de Peierls solo están definidas en d=2")
        if self.kind == 'tempered':
            if self.t0 <= 0 or self.m <= 0:
                raise ValueError(f"Núcleo templado inválido: t0={self.t0}, m={self.m} (ambos > 0)")
            if not 0 < self.s_reference < 1:
                raise ValueError(f"s_reference debe estar en (0,1), se recibió {self.s_reference}")
            resolved, error = self._resolve_range()
            object.__setattr__(self, 'range', resolved)
            object.__setattr__(self, 'truncation_error', error)
            logger.debug(f"Núcleo templado truncado en R={resolved}, error relativo {error:.3e}")

    def _tail(self, start: int, s: float, weight: float = 0.0) -> float:
        """Σ_{r ≥ start} n_r·(t0 e^{−m r})^s·e^{weight·r} sumada hasta agotar la serie."""
        total = 0.0
        r = start
        while True:
            term = _shell_size(r, self.dim) * (self.t0 ** s) * math.exp((weight - s * self.m) * r)
            total += term
            if r > start + 10 and term < 1e-30 * max(total, 1e-300):
                return total
            r += 1

    def _resolve_range(self) -> Tuple[int, float]:
        s = self.s_reference
        if self.range is not None:
            if self.range < 1:
                raise ValueError(f"El rango R debe ser ≥ 1, se recibió {self.range}")
            retained = self._tail(1, s) - self._tail(self.range + 1, s)
            return self.range, self._tail(self.range + 1, s) / retained
        for R in range(1, _MAX_RANGE + 1):
            tail = self._tail(R + 1, s)
            retained = self._tail(1, s) - tail
            if tail < TRUNCATION_TOLERANCE * retained:
                return R, tail / retained
        raise ValueError(f"No se encontró rango de truncamiento ≤ {_MAX_RANGE} para m={self.m}")

    def weighted_sum(self, s: float, m_prime: float) -> float:
        """
        Σ_v τ(v)^s e^{m'‖v‖∞} del núcleo sin truncar.

        Raises:
            ValueError: Si m' ≥ s·m (la serie diverge)
        """
        if self.kind != 'tempered':
            return sum((amp ** s) * math.exp(m_prime * norm_inf(v)) for v, amp in self.offsets())
        if m_prime >= s * self.m:
            raise ValueError(f"La serie templada diverge: m'={m_prime} ≥ s·m={s * self.m}")
        return self._tail(1, s, m_prime)

    def offsets(self) -> List[Tuple[SitePoint, float]]:
        """Pares (desplazamiento, amplitud |T|) del soporte, orden determinista."""
        if self.kind == 'none':
            return []
        if self.kind == 'nearest_neighbor':
            return [(v, 1.0) for v in nearest_neighbor_offsets(self.dim)]
        R = int(self.range)
        support = []
        for v in itertools.product(range(-R, R + 1), repeat=self.dim):
            n = norm_inf(v)
            if n == 0:
                continue
            support.append((tuple(v), self.t0 * math.exp(-self.m * n)))
        return support

    def support_offsets(self) -> List[SitePoint]:
        return [v for v, _ in self.offsets()]

    def tau(self, v: Sequence[int]) -> float:
        """Amplitud τ(v) = |T_{0,v}| (cero fuera del soporte)."""
        n = norm_inf(v)
        if self.kind == 'none' or n == 0:
            return 0.0
        if self.kind == 'nearest_neighbor':
            return 1.0 if sum(abs(c) for c in v) == 1 else 0.0
        return self.t0 * math.exp(-self.m * n) if n <= int(self.range) else 0.0

    def total_amplitude(self) -> float:
        """Σ_v τ(v), cota de ‖T‖."""
        return sum(amp for _, amp in self.offsets())

    def phase(self, x: Sequence[int], y: Sequence[int]) -> float:
        """
        Fase de Peierls A_{x,y} (antisimétrica). Integral de línea recta del
        potencial vector A = (0, φ·x₁): A_{x,y} = φ·(y₂−x₂)·(x₁+y₁)/2.
        """
        if self.peierls_flux is None:
            return 0.0
        return self.peierls_flux * (y[1] - x[1]) * (x[0] + y[0]) / 2.0

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'dim': self.dim, 'kind': self.kind}
        if self.kind == 'tempered':
            data.update({'t0': self.t0, 'm': self.m, 'range': self.range, 's_reference': self.s_reference})
        if self.peierls_flux is not None:
            data['peierls_flux'] = self.peierls_flux
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HoppingKernel':
        return cls(
            dim=int(data['dim']),
            kind=data.get('kind', 'nearest_neighbor'),
            t0=float(data.get('t0', 1.0)),
            m=float(data.get('m', 1.0)),
            range=None if data.get('range') is None else int(data['range']),
            peierls_flux=None if data.get('peierls_flux') is None else float(data['peierls_flux']),
            s_reference=float(data.get('s_reference', 0.5)),
        )
