"""
Perfiles dinámicos
==================

Promedios por destino de max_t |<x0|P_F e^{itH}|y>| sobre una malla de
tiempos y de |μ^{x0,y}|(F). La malla da una cota inferior del supremo y la
variación total una superior.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ensemble import DisorderSample, OperatorEnsemble, assemble, sample_block, site_list
from lattice import Region, SitePoint, make_site, site_distance
from moments import load_config as load_moments_config

from .spectral import EnergyWindow, SpectralDecomposition

logger = logging.getLogger(__name__)

SANDWICH_RELATIVE = 1e-12
SANDWICH_ABSOLUTE = 1e-15

COLUMNS = ['distance', 'mean_gridmax', 'stderr_gridmax', 'mean_tv', 'stderr_tv', 'n']


def _mean_stderr(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = values.shape[0]
    mean = values.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean)
    return mean, values.std(axis=0, ddof=1) / np.sqrt(n)


@dataclass
class DynamicalProfile:
    """Muestras (n × destinos) de max_t |núcleo| y de la variación total."""

    x0: SitePoint
    targets: Tuple[SitePoint, ...]
    window: EnergyWindow
    t_grid: np.ndarray
    gridmax: np.ndarray
    tv: np.ndarray

    @property
    def n(self) -> int:
        return int(self.tv.shape[0])

    def distances(self) -> np.ndarray:
        return np.array([site_distance(self.x0, y) for y in self.targets], dtype=int)

    def to_frame(self) -> pd.DataFrame:
        mean_g, err_g = _mean_stderr(self.gridmax)
        mean_t, err_t = _mean_stderr(self.tv)
        frame = pd.DataFrame({
            'distance': self.distances(),
            'mean_gridmax': mean_g,
            'stderr_gridmax': err_g,
            'mean_tv': mean_t,
            'stderr_tv': err_t,
            'n': self.n,
        }, columns=COLUMNS)
        frame.insert(0, 'site', [' '.join(str(c) for c in y) for y in self.targets])
        return frame

    def tv_frame(self) -> pd.DataFrame:
        """Columnas distance, mean, stderr, n de E(tv), listas para decay_fit."""
        frame = self.to_frame()
        return frame.rename(columns={'mean_tv': 'mean', 'stderr_tv': 'stderr'})[['distance', 'mean', 'stderr', 'n']]

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)
        logger.info(f"Perfil dinámico escrito en {path}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x0': list(self.x0),
            'window': self.window.to_dict(),
            't_grid': self.t_grid.tolist(),
            'rows': self.to_frame().to_dict(orient='records'),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def sample_sandwich(decomposition: SpectralDecomposition, x0: SitePoint, targets: Sequence[SitePoint],
                    window: EnergyWindow, t_grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(max_t |núcleo|, tv) por destino para una muestra."""
    mask = window.contains(decomposition.group_energies())
    weights = decomposition.weight_table(x0, targets)[:, mask]
    energies = decomposition.group_energies()[mask]
    tv = np.abs(weights).sum(axis=1)
    phases = np.exp(1j * np.multiply.outer(energies, t_grid))
    gridmax = np.abs(weights @ phases).max(axis=1) if t_grid.size else np.zeros_like(tv)
    return gridmax, tv


def dyn_profile(ensemble: OperatorEnsemble, region: Region, x0: Sequence[int], targets: Sequence[Sequence[int]],
                F: Optional[EnergyWindow], t_grid: Sequence[float], n: int,
                threads: Optional[int] = None) -> DynamicalProfile:
    """
    E(max_{t∈malla} |<x0|P_F e^{itH}|y>|) y E(|μ^{x0,y}|(F)) por destino.

    Raises:
        ValueError: Malla de tiempos no finita o parámetros inválidos
        RuntimeError: Si alguna muestra viola max_t ≤ tv
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or not np.all(np.isfinite(grid)):
        raise ValueError("La malla de tiempos debe ser un vector finito")
    if n < 1:
        raise ValueError(f"n debe ser ≥ 1, se recibió {n}")
    window = F if F is not None else EnergyWindow.real_line()
    origin = make_site(x0, region.dim)
    sites = site_list(region, targets)
    if not sites:
        raise ValueError("La lista de destinos está vacía")
    site_list(region, [origin])
    config = load_moments_config()
    chunk_size = max(1, int(config['chunk_size']))
    chunks = [list(range(start, min(start + chunk_size, n))) for start in range(0, n, chunk_size)]
    logger.info(f"Perfil dinámico: {len(sites)} destinos, n={n}, {grid.size} tiempos")

    def run(chunk: List[int]) -> Tuple[np.ndarray, np.ndarray]:
        values = sample_block(ensemble, region, chunk)
        gm = np.empty((len(chunk), len(sites)))
        tv = np.empty((len(chunk), len(sites)))
        for r, index in enumerate(chunk):
            H = assemble(ensemble, DisorderSample(region, values[r], index))
            dec = SpectralDecomposition.from_hamiltonian(H)
            gm[r], tv[r] = sample_sandwich(dec, origin, sites, window, grid)
            if np.any(gm[r] > tv[r] * (1 + SANDWICH_RELATIVE) + SANDWICH_ABSOLUTE):
                k = int(np.argmax(gm[r] - tv[r]))
                logger.error(f"Muestra {index}: max_t {gm[r, k]!r} > tv {tv[r, k]!r} en {sites[k]}")
                raise RuntimeError(f"Desigualdad max_t ≤ tv violada en la muestra {index}, destino {sites[k]}")
        return gm, tv

    workers = threads if threads is not None else config['threads']
    if workers <= 1 or len(chunks) == 1:
        results = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    return DynamicalProfile(origin, sites, window, grid,
                            np.vstack([r[0] for r in results]), np.vstack([r[1] for r in results]))
