"""
Estimador de momentos fraccionarios
===================================

E(|G(x,y;z)|^s) por Monte Carlo con una factorización y una resolución
por muestra. Las muestras se agrupan en bloques evaluados en paralelo y se
reensamblan por índice, de modo que el resultado no depende del número de
hilos.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ensemble import DisorderSample, OperatorEnsemble, assemble, diagonal, sample_block, site_list
from lattice import BondSet, Region, SitePoint, make_site, site_distance
from resolvent import GreenSolver, SolverError, SpectralParameter, dense_green_matrix
from resolvent import load_config as load_solver_config

from .config_moments import load_config

# Configurar logging
logger = logging.getLogger(__name__)

PLAIN_MEAN = 'plain_mean'
BLOCK_MEANS = 'block_means'

Pair = Tuple[SitePoint, SitePoint]


class MomentEstimationError(RuntimeError):
    """Demasiadas muestras con resolvente singular."""

    def __init__(self, message: str, failed_indices: Sequence[int] = (), n: int = 0):
        super().__init__(message)
        self.failed_indices = list(failed_indices)
        self.failed_count = len(self.failed_indices)
        self.n = n


@dataclass(frozen=True)
class MomentEstimate:
    """Estimación de E(|G(x,y;z)|^s) con su error estándar."""

    mean: float
    stderr: float
    n: int
    estimator: str
    s: float
    z: SpectralParameter
    x: SitePoint
    y: SitePoint
    region: str
    blocks: Optional[int] = None
    failed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n debe ser ≥ 1, se recibió {self.n}")
        if self.mean < 0 or self.stderr < 0:
            raise ValueError("La media y el error estándar deben ser no negativos")

    @property
    def distance(self) -> int:
        return site_distance(self.x, self.y)

    def upper(self, sigmas: float = 3.0) -> float:
        return self.mean + sigmas * self.stderr

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mean': self.mean,
            'stderr': self.stderr,
            'n': self.n,
            'estimator': self.estimator,
            'blocks': self.blocks,
            's': self.s,
            'z': self.z.to_dict(),
            'x': list(self.x),
            'y': list(self.y),
            'region': self.region,
            'failed': self.failed,
        }


def summarize(values: np.ndarray, s: float, tau: float) -> Tuple[float, float, str, Optional[int]]:
    """
    Media y error estándar de una columna de |G|^s.

    La estimación es siempre el promedio muestral. Si 2s < τ el error
    estándar sale de la varianza muestral; en caso contrario la varianza
    puede ser infinita y el error se toma de la dispersión de las medias de
    k = ⌈√n⌉ bloques consecutivos (medias por lotes).

    Returns:
        (media, error estándar, estimador, bloques)
    """
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("No hay muestras que resumir")
    mean = float(np.mean(values))
    if 2 * s < tau:
        stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return mean, stderr, PLAIN_MEAN, None
    k = max(1, math.ceil(math.sqrt(n)))
    block_means = np.array([np.mean(b) for b in np.array_split(values, k) if b.size])
    stderr = float(np.std(block_means, ddof=1) / math.sqrt(block_means.size)) if block_means.size > 1 else 0.0
    return mean, stderr, BLOCK_MEANS, k


def variance_ratio(values: Sequence[float]) -> float:
    """Var(primera mitad) / Var(muestra completa) de |G|^s."""
    values = np.asarray(values, dtype=float)
    if values.size < 4:
        raise ValueError("Se necesitan al menos 4 muestras para comparar varianzas")
    half = values[: values.size // 2]
    full = float(np.var(values, ddof=1))
    if full == 0:
        return 1.0
    return float(np.var(half, ddof=1)) / full


@dataclass
class SampleTable:
    """|G(x,y;z)|^s por muestra (filas) y par (columnas); muestras fallidas excluidas."""

    pairs: List[Pair]
    values: np.ndarray
    indices: np.ndarray
    failed: List[int] = field(default_factory=list)

    def column(self, pair: Pair) -> np.ndarray:
        return self.values[:, self.pairs.index(pair)]


def _diagonal_rows(ensemble: OperatorEnsemble, region: Region, values: np.ndarray,
                   pairs: Sequence[Pair], z: complex, s: float) -> np.ndarray:
    """Camino rápido para T = 0: G es diagonal con G(x,x) = 1/(U(x) + λV(x) − z)."""
    out = np.zeros((values.shape[0], len(pairs)))
    periodic = diagonal(ensemble, region, np.zeros(len(region)))
    for k, (x, y) in enumerate(pairs):
        if x != y:
            continue
        i = region.index(x)
        diag = periodic[i] + ensemble.lam * values[:, i]
        with np.errstate(divide='ignore'):
            out[:, k] = np.abs(diag - z) ** (-s)
    out[~np.isfinite(out)] = np.nan
    return out


def sample_moments(ensemble: OperatorEnsemble, region: Region, pairs: Sequence[Tuple[Sequence[int], Sequence[int]]],
                   z: Union[SpectralParameter, complex, float], s: float, n: int,
                   depletion: Optional[BondSet] = None, solver: str = 'sparse',
                   threads: Optional[int] = None, stream: int = 0,
                   config: Optional[Dict[str, Any]] = None) -> SampleTable:
    """
    Evalúa |G(x,y;z)|^s para las muestras 0..n−1 y varios pares a la vez.

    Los pares con el mismo x comparten una resolución por muestra (fila
    G(x,·) por la factorización traspuesta).

    Raises:
        MomentEstimationError: Si la fracción de muestras fallidas supera el umbral
    """
    config = config or load_config()
    if n < 1:
        raise ValueError(f"n debe ser ≥ 1, se recibió {n}")
    if solver not in ('sparse', 'dense'):
        raise ValueError(f"Solucionador desconocido: {solver}")
    pairs = [(make_site(x, region.dim), make_site(y, region.dim)) for x, y in pairs]
    site_list(region, [p for pair in pairs for p in pair])
    zp = SpectralParameter.coerce(z)
    sources = sorted({x for x, _ in pairs})
    target_index = [region.index(y) for _, y in pairs]
    fast = ensemble.hopping.kind == 'none' and depletion is None
    solver_config = load_solver_config()
    chunk_size = max(1, int(config['chunk_size']))
    chunks = [list(range(start, min(start + chunk_size, n))) for start in range(0, n, chunk_size)]

    def run(chunk: List[int]) -> Tuple[np.ndarray, List[int]]:
        values = sample_block(ensemble, region, chunk, stream)
        if fast:
            out = _diagonal_rows(ensemble, region, values, pairs, zp.z, s)
            return out, [chunk[r] for r in range(len(chunk)) if np.isnan(out[r]).any()]
        out = np.full((len(chunk), len(pairs)), np.nan)
        failed = []
        for r, index in enumerate(chunk):
            H = assemble(ensemble, DisorderSample(region, values[r], index), depletion)
            try:
                if solver == 'dense':
                    G = dense_green_matrix(H, zp)
                    rows = {x: G[region.index(x)] for x in sources}
                else:
                    green = GreenSolver(H, zp, config=solver_config)
                    rows = {x: green.row(x) for x in sources}
            except SolverError as e:
                logger.debug(f"Muestra {index} fallida: {e}")
                failed.append(index)
                continue
            for k, (x, _) in enumerate(pairs):
                out[r, k] = abs(rows[x][target_index[k]]) ** s
        return out, failed

    workers = threads if threads is not None else config['threads']
    if workers <= 1 or len(chunks) == 1:
        results = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    values = np.vstack([r[0] for r in results])
    failed = sorted(i for r in results for i in r[1])
    if len(failed) > config['failure_fraction'] * n:
        logger.error(f"{len(failed)} de {n} muestras fallidas (índices {failed[:10]})")
        raise MomentEstimationError(
            f"Demasiadas muestras fallidas: {len(failed)} de {n} supera el {100 * config['failure_fraction']:.2g}%",
            failed_indices=failed, n=n)
    if failed:
        logger.warning(f"{len(failed)} muestras fallidas excluidas del promedio")
    keep = ~np.isnan(values).any(axis=1)
    return SampleTable(pairs, values[keep], np.arange(n)[keep], failed)


def estimate_from_table(table: SampleTable, pair: Pair, s: float, tau: float,
                        z: SpectralParameter, region: Region) -> MomentEstimate:
    mean, stderr, estimator, blocks = summarize(table.column(pair), s, tau)
    return MomentEstimate(mean, stderr, len(table.indices), estimator, s, z, pair[0], pair[1],
                          region.fingerprint(), blocks, len(table.failed))


def _check_exponent(s: float, n: int) -> None:
    if not 0 < s < 1:
        raise ValueError(f"s debe estar en (0,1), se recibió {s}")
    if n < 2:
        raise ValueError(f"Se necesitan al menos 2 muestras, se recibió n={n}")


def fractional_moment(ensemble: OperatorEnsemble, region: Region, x: Sequence[int], y: Sequence[int],
                      z: Union[SpectralParameter, complex, float], s: float, n: int,
                      solver: str = 'sparse', threads: Optional[int] = None,
                      depletion: Optional[BondSet] = None) -> MomentEstimate:
    """
    Estima E(|G_Λ(x,y;z)|^s) con las muestras 0..n−1.

    Args:
        ensemble: Ensemble de operadores
        region: Región finita Λ
        x, y: Sitios de Λ
        z: Parámetro espectral
        s: Exponente en (0,1)
        n: Número de muestras (≥ 2)
        solver: 'sparse' (LU) o 'dense' (oráculo de inversa densa)
        threads: Hilos de trabajo (por defecto, configuración)
        depletion: Enlaces anulados (H^(Γ))

    Returns:
        MomentEstimate determinista dado (master_seed, n)
    """
    _check_exponent(s, n)
    zp = SpectralParameter.coerce(z)
    pair = (make_site(x, region.dim), make_site(y, region.dim))
    table = sample_moments(ensemble, region, [pair], zp, s, n, depletion, solver, threads)
    return estimate_from_table(table, pair, s, ensemble.disorder.tau, zp, region)


@dataclass
class MomentProfile:
    """Perfil E|G(x0, y)|^s sobre una lista de destinos, con las muestras por destino."""

    x0: SitePoint
    z: SpectralParameter
    s: float
    tau: float
    estimates: List[MomentEstimate]
    samples: np.ndarray
    pool_shells: bool = False

    def distances(self) -> np.ndarray:
        return np.array([e.distance for e in self.estimates], dtype=int)

    def to_frame(self, pooled: Optional[bool] = None) -> pd.DataFrame:
        """Tabla con columnas distance, mean, stderr, n (más site si no se agrupa)."""
        if self.pool_shells if pooled is None else pooled:
            return shell_pool(self)
        return pd.DataFrame({
            'site': [' '.join(str(c) for c in e.y) for e in self.estimates],
            'distance': [e.distance for e in self.estimates],
            'mean': [e.mean for e in self.estimates],
            'stderr': [e.stderr for e in self.estimates],
            'n': [e.n for e in self.estimates],
        })

    def shell_sup(self) -> Dict[int, float]:
        """max_{|y−x0|=d} E|G(x0,y)|^s por capa."""
        result: Dict[int, float] = {}
        for e in self.estimates:
            result[e.distance] = max(result.get(e.distance, 0.0), e.mean)
        return result

    def to_csv(self, path, pooled: Optional[bool] = None) -> None:
        self.to_frame(pooled).to_csv(path, index=False)
        logger.info(f"Perfil de momentos escrito en {path}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x0': list(self.x0),
            'z': self.z.to_dict(),
            's': self.s,
            'pool_shells': self.pool_shells,
            'estimates': [e.to_dict() for e in self.estimates],
        }


def shell_pool(profile: MomentProfile) -> pd.DataFrame:
    """
    Agrupa los destinos a igual distancia ℓ∞: por muestra se promedia
    |G|^s sobre la capa y luego se estima como una sola columna.
    """
    distances = profile.distances()
    rows = []
    for d in sorted(set(distances.tolist())):
        cols = np.flatnonzero(distances == d)
        pooled = profile.samples[:, cols].mean(axis=1)
        mean, stderr, _, _ = summarize(pooled, profile.s, profile.tau)
        rows.append({'distance': int(d), 'mean': mean, 'stderr': stderr, 'n': int(pooled.size)})
    return pd.DataFrame(rows, columns=['distance', 'mean', 'stderr', 'n'])


def moment_profile(ensemble: OperatorEnsemble, region: Region, x0: Sequence[int],
                   targets: Sequence[Sequence[int]], z: Union[SpectralParameter, complex, float],
                   s: float, n: int, pool_shells: bool = False, solver: str = 'sparse',
                   threads: Optional[int] = None) -> MomentProfile:
    """
    Perfil de momentos desde x0 con una factorización y una resolución por muestra.

    Las entradas coinciden exactamente con llamadas independientes a
    fractional_moment con la misma semilla.
    """
    _check_exponent(s, n)
    zp = SpectralParameter.coerce(z)
    origin = make_site(x0, region.dim)
    pairs = [(origin, make_site(t, region.dim)) for t in targets]
    if not pairs:
        raise ValueError("La lista de destinos está vacía")
    logger.info(f"Perfil de momentos: {len(pairs)} destinos, n={n}, s={s}")
    table = sample_moments(ensemble, region, pairs, zp, s, n, None, solver, threads)
    estimates = [estimate_from_table(table, p, s, ensemble.disorder.tau, zp, region) for p in pairs]
    return MomentProfile(origin, zp, s, ensemble.disorder.tau, estimates, table.values, pool_shells)
