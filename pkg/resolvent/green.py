"""
Funciones de Green en volumen finito
====================================

G_Ω(x,y;z) = <x|(H_Ω − z)^{-1}|y> por factorización LU dispersa (SuperLU),
con caché de columnas, guarda de condicionamiento y oráculo denso.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from ensemble import Hamiltonian
from lattice import Region, SitePoint, make_site

from .config_resolvent import load_config

# Configurar logging
logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Sistema (H − z) singular o mal condicionado."""

    def __init__(self, message: str, condition: float = math.inf, residual: float = math.nan):
        super().__init__(message)
        self.condition = condition
        self.residual = residual


@dataclass(frozen=True)
class SpectralParameter:
    """z = E ± iη con η ≥ 0."""

    e: float
    eta: float = 0.0
    sign: int = 1

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"η debe ser no negativo, se recibió {self.eta}")
        if self.sign not in (1, -1):
            raise ValueError(f"El signo debe ser +1 o −1, se recibió {self.sign}")

    @property
    def z(self) -> complex:
        return complex(self.e, self.sign * self.eta)

    def conjugate(self) -> 'SpectralParameter':
        return SpectralParameter(self.e, self.eta, -self.sign)

    def to_dict(self) -> Dict[str, Any]:
        return {'e': self.e, 'eta': self.eta, 'sign': self.sign}

    @classmethod
    def coerce(cls, value: Union['SpectralParameter', complex, float]) -> 'SpectralParameter':
        if isinstance(value, SpectralParameter):
            return value
        z = complex(value)
        return cls(z.real, abs(z.imag), -1 if z.imag < 0 else 1)


@dataclass(frozen=True)
class GreenValue:
    value: complex
    region: Region
    x: SitePoint
    y: SitePoint
    z: SpectralParameter


class GreenSolver:
    """
    Factorización única de (H − z) reutilizada para todas las columnas y filas.

    Las columnas se guardan en caché por índice de sitio; las filas se
    obtienen resolviendo el sistema traspuesto con la misma factorización.
    """

    def __init__(self, hamiltonian: Hamiltonian, z: Union[SpectralParameter, complex, float],
                 config: Optional[Dict[str, Any]] = None, verify: bool = False):
        self.config = config or load_config()
        self.hamiltonian = hamiltonian
        self.z = SpectralParameter.coerce(z)
        self.verify = verify
        n = hamiltonian.size
        A = hamiltonian.matrix.astype(complex) - self.z.z * sparse.identity(n, dtype=complex, format='csr')
        self._A = sparse.csc_matrix(A)
        self._norm1 = float(abs(self._A).sum(axis=0).max()) if n else 0.0
        try:
            self._lu = splinalg.splu(self._A)
        except RuntimeError as e:
            logger.error(f"Factorización singular de H − z (z={self.z.z}): {e}")
            raise SolverError(f"Factorización singular de H − z: {e}") from e
        self._columns: Dict[int, np.ndarray] = {}
        self._rows: Dict[int, np.ndarray] = {}

    @property
    def region(self) -> Region:
        return self.hamiltonian.region

    def _solve(self, index: int, trans: str) -> np.ndarray:
        n = self.hamiltonian.size
        rhs = np.zeros(n, dtype=complex)
        rhs[index] = 1.0
        operator = self._A if trans == 'N' else self._A.T
        g = self._lu.solve(rhs, trans=trans)
        residual = float(np.linalg.norm(operator @ g - rhs))
        tolerance = self.config['residual_tolerance']
        if residual > tolerance and np.all(np.isfinite(g)):
            # un paso de refinamiento iterativo
            g = g - self._lu.solve(operator @ g - rhs, trans=trans)
            residual = float(np.linalg.norm(operator @ g - rhs))
        if not np.all(np.isfinite(g)):
            raise SolverError("La solución contiene valores no finitos", residual=residual)
        condition = self._norm1 * float(np.abs(g).sum())
        if condition > self.config['condition_limit']:
            raise SolverError(
                f"Sistema mal condicionado: estimación {condition:.3e} > {self.config['condition_limit']:.1e}",
                condition=condition, residual=residual)
        if residual > tolerance:
            raise SolverError(f"Residuo relativo {residual:.3e} supera {tolerance:.1e}",
                              condition=condition, residual=residual)
        if self.verify and n <= self.config['dense_oracle_limit']:
            dense = np.linalg.solve(operator.toarray(), rhs)
            gap = float(np.max(np.abs(dense - g)) / max(np.max(np.abs(dense)), 1e-300))
            if gap > 1e-8:
                raise SolverError(f"Discrepancia con el oráculo denso: {gap:.3e}", condition=condition)
        return g

    def column(self, y: Sequence[int]) -> np.ndarray:
        """Vector G(·, y)."""
        j = self.region.index(y)
        if j not in self._columns:
            self._columns[j] = self._solve(j, 'N')
        return self._columns[j]

    def row(self, x: Sequence[int]) -> np.ndarray:
        """Vector G(x, ·), por la factorización traspuesta."""
        i = self.region.index(x)
        if i not in self._rows:
            self._rows[i] = self._solve(i, 'T')
        return self._rows[i]

    def entry(self, x: Sequence[int], y: Sequence[int]) -> complex:
        return complex(self.column(y)[self.region.index(x)])

    def condition_estimate(self) -> float:
        """‖A‖₁·‖A^{-1}‖₁ con el estimador de Higham (onenormest)."""
        n = self.hamiltonian.size
        inverse = splinalg.LinearOperator(
            (n, n), dtype=complex,
            matvec=lambda b: self._lu.solve(np.asarray(b, dtype=complex).ravel()),
            rmatvec=lambda b: self._lu.solve(np.asarray(b, dtype=complex).ravel(), trans='H'),
        )
        if n <= 4:
            return self._norm1 * float(np.abs(np.linalg.inv(self._A.toarray())).sum(axis=0).max())
        return self._norm1 * float(splinalg.onenormest(inverse))


def green(H: Hamiltonian, z: Union[SpectralParameter, complex, float],
          x: Sequence[int], y: Sequence[int], verify: bool = False) -> complex:
    """
    G(x,y;z) para la matriz H.

    Args:
        H: Hamiltoniano restringido a una región
        z: Parámetro espectral
        x, y: Sitios de la región
        verify: Contrastar con el oráculo denso si |región| ≤ límite

    Returns:
        Valor complejo finito

    Raises:
        SolverError: Sistema singular o mal condicionado
        ValueError: Sitios fuera de la región
    """
    return GreenSolver(H, z, verify=verify).entry(make_site(x), make_site(y))


def green_value(H: Hamiltonian, z: Union[SpectralParameter, complex, float],
                x: Sequence[int], y: Sequence[int]) -> GreenValue:
    zp = SpectralParameter.coerce(z)
    return GreenValue(green(H, zp, x, y), H.region, make_site(x), make_site(y), zp)


def dense_green_matrix(H: Hamiltonian, z: Union[SpectralParameter, complex, float]) -> np.ndarray:
    """Oráculo: inversa densa de (H − z)."""
    zc = SpectralParameter.coerce(z).z
    A = H.dense().astype(complex) - zc * np.eye(H.size)
    try:
        return np.linalg.inv(A)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"Inversa densa singular: {e}") from e
