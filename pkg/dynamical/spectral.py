"""
Medidas espectrales en volumen finito
=====================================

μ^{x,y}(dE) = Σ_k <x|P_k|y> δ(E − E_k) por diagonalización densa, con los
autovalores agrupados en bloques degenerados. La variación total en una
ventana F y el núcleo de evolución <x|P_F e^{itH}|y> se leen de los pesos
por grupo.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from ensemble import Hamiltonian
from lattice import Region, make_site

from .config_dynamical import load_config

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-9
ORTHONORMALITY_TOLERANCE = 1e-10
NORMALIZATION_FLOOR = 1e-14

Site = Union[int, Sequence[int]]


class SpectralError(RuntimeError):
    """Fallo o resultado inválido del diagonalizador denso."""

    def __init__(self, message: str, residual: float = math.nan, orthonormality: float = math.nan):
        super().__init__(message)
        self.residual = residual
        self.orthonormality = orthonormality


@dataclass(frozen=True)
class EnergyWindow:
    """Unión finita de intervalos cerrados, ordenados y disjuntos (extremos infinitos permitidos)."""

    intervals: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("La ventana de energías está vacía")
        cleaned: List[List[float]] = []
        for lo, hi in sorted((float(a), float(b)) for a, b in self.intervals):
            if math.isnan(lo) or math.isnan(hi) or lo > hi:
                raise ValueError(f"Intervalo inválido [{lo}, {hi}]")
            if cleaned and lo <= cleaned[-1][1]:
                cleaned[-1][1] = max(cleaned[-1][1], hi)
            else:
                cleaned.append([lo, hi])
        object.__setattr__(self, 'intervals', tuple((lo, hi) for lo, hi in cleaned))

    @classmethod
    def real_line(cls) -> 'EnergyWindow':
        return cls(((-math.inf, math.inf),))

    @classmethod
    def from_spec(cls, spec: Any) -> 'EnergyWindow':
        """Acepta None (eje real), un par [a, b] o una lista de pares; 'inf' y '-inf' valen como extremos."""
        if spec is None:
            return cls.real_line()
        pairs = spec
        if len(spec) == 2 and not isinstance(spec[0], (list, tuple)):
            pairs = [spec]
        return cls(tuple((float(lo), float(hi)) for lo, hi in pairs))

    def contains(self, energies) -> np.ndarray:
        E = np.asarray(energies, dtype=float)
        inside = np.zeros(E.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (E >= lo) & (E <= hi)
        return inside

    @property
    def is_real_line(self) -> bool:
        return self.intervals == ((-math.inf, math.inf),)

    def to_dict(self) -> Dict[str, Any]:
        return {'intervals': [[lo, hi] for lo, hi in self.intervals]}


@dataclass(frozen=True)
class SpectralDecomposition:
    """
    Autovalores ordenados, autovectores ortonormales (columnas) y grupos
    degenerados como rangos contiguos [inicio, fin).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    starts: np.ndarray
    region: Optional[Region] = None
    residual: float = 0.0

    @property
    def size(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def group_count(self) -> int:
        return int(self.starts.size)

    def group_energies(self) -> np.ndarray:
        """Energía media de cada grupo."""
        counts = np.diff(np.append(self.starts, self.size))
        return np.add.reduceat(self.eigenvalues, self.starts) / counts

    def index(self, site: Site) -> int:
        if isinstance(site, (int, np.integer)):
            if not 0 <= int(site) < self.size:
                raise ValueError(f"Índice {site} fuera de rango")
            return int(site)
        if self.region is None:
            raise ValueError("La descomposición no tiene región: use índices enteros")
        return self.region.index(make_site(site, self.region.dim))

    def group_weights(self, x: Site, y: Site) -> np.ndarray:
        """<x|P_k|y> por grupo."""
        i, j = self.index(x), self.index(y)
        products = self.eigenvectors[i, :] * np.conj(self.eigenvectors[j, :])
        return np.add.reduceat(products, self.starts)

    def weight_table(self, x: Site, targets: Sequence[Site]) -> np.ndarray:
        """Matriz (destinos × grupos) con <x|P_k|y>."""
        i = self.index(x)
        rows = np.array([self.index(y) for y in targets], dtype=int)
        products = self.eigenvectors[i, :][None, :] * np.conj(self.eigenvectors[rows, :])
        return np.add.reduceat(products, self.starts, axis=1)

    @classmethod
    def from_hamiltonian(cls, H: Union[Hamiltonian, np.ndarray], tolerance: Optional[float] = None,
                         config: Optional[Dict[str, Any]] = None) -> 'SpectralDecomposition':
        """
        Diagonaliza H con scipy.linalg.eigh y agrupa autovalores cuya
        separación no supera la tolerancia de degeneración.

        Raises:
            ValueError: Si la región supera el límite de diagonalización
            SpectralError: Si eigh falla o los autovectores no pasan los controles
        """
        config = config or load_config()
        tol = config['degeneracy_tolerance'] if tolerance is None else tolerance
        region = H.region if isinstance(H, Hamiltonian) else None
        matrix = H.dense() if isinstance(H, Hamiltonian) else np.asarray(H)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Se esperaba una matriz cuadrada, se recibió forma {matrix.shape}")
        if matrix.shape[0] > config['eigen_limit']:
            raise ValueError(f"Región de {matrix.shape[0]} sitios, más que el límite {config['eigen_limit']}")
        try:
            values, vectors = linalg.eigh(matrix)
        except linalg.LinAlgError as e:
            logger.error(f"Fallo del diagonalizador: {e}")
            raise SpectralError(f"Fallo del diagonalizador: {e}")
        scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
        residual = float(np.max(np.linalg.norm(matrix @ vectors - vectors * values[None, :], axis=0))) \
            if values.size else 0.0
        if residual > RESIDUAL_TOLERANCE * scale:
            raise SpectralError(f"Residuo de autovectores {residual:.3g} > {RESIDUAL_TOLERANCE:g}·‖H‖",
                                residual=residual)
        gram = vectors.conj().T @ vectors - np.eye(values.size)
        ortho = float(np.max(np.abs(gram))) if values.size else 0.0
        if ortho > ORTHONORMALITY_TOLERANCE:
            raise SpectralError(f"Autovectores no ortonormales: desviación {ortho:.3g}", residual, ortho)
        gaps = np.diff(values)
        starts = np.concatenate(([0], np.flatnonzero(gaps > tol * scale) + 1)).astype(int)
        if starts.size < values.size:
            logger.debug(f"{values.size - starts.size} autovalores agrupados como degenerados")
        return cls(values, vectors, starts, region, residual)


def _decompose(H: Union[Hamiltonian, np.ndarray, SpectralDecomposition]) -> SpectralDecomposition:
    if isinstance(H, SpectralDecomposition):
        return H
    return SpectralDecomposition.from_hamiltonian(H)


def _window(F: Optional[EnergyWindow]) -> EnergyWindow:
    return F if F is not None else EnergyWindow.real_line()


def spectral_tv(H: Union[Hamiltonian, np.ndarray, SpectralDecomposition], x: Site, y: Site,
                F: Optional[EnergyWindow] = None) -> float:
    """
    |μ^{x,y}|(F) = Σ_{grupos con E_k ∈ F} |<x|P_k|y>|.

    Args:
        H: Hamiltoniano, matriz densa o descomposición ya calculada
        x, y: Sitios (o índices enteros para matrices)
        F: Ventana de energías (por defecto, todo R)
    """
    dec = _decompose(H)
    mask = _window(F).contains(dec.group_energies())
    return float(np.sum(np.abs(dec.group_weights(x, y)[mask])))


def evolution_kernel(H: Union[Hamiltonian, np.ndarray, SpectralDecomposition], x: Site, y: Site,
                     F: Optional[EnergyWindow], t) -> Union[complex, np.ndarray]:
    """<x|P_F e^{itH}|y> para un tiempo o un arreglo de tiempos."""
    dec = _decompose(H)
    mask = _window(F).contains(dec.group_energies())
    weights = dec.group_weights(x, y)[mask]
    energies = dec.group_energies()[mask]
    times = np.asarray(t, dtype=float)
    values = np.exp(1j * np.multiply.outer(times, energies)) @ weights
    return complex(values) if times.ndim == 0 else values


def l2_normalized(decomposition: Union[Hamiltonian, np.ndarray, SpectralDecomposition], x: Site, y: Site,
                  F: Optional[EnergyWindow] = None) -> float:
    """Σ_k |<x|P_k|y>|²/<x|P_k|x> sobre los grupos de F con denominador no nulo; nunca supera 1."""
    dec = _decompose(decomposition)
    mask = _window(F).contains(dec.group_energies())
    wxy = dec.group_weights(x, y)[mask]
    wxx = dec.group_weights(x, x)[mask].real
    keep = wxx > NORMALIZATION_FLOOR
    return float(np.sum(np.abs(wxy[keep]) ** 2 / wxx[keep]))


def windows_disjoint(windows: Iterable[EnergyWindow]) -> bool:
    """Comprueba que ninguna pareja de ventanas se solape."""
    intervals = sorted(iv for w in windows for iv in w.intervals)
    return all(a[1] < b[0] for a, b in zip(intervals, intervals[1:]))
