"""
Barridos (λ, E)
===============

Una celda por punto de la malla, evaluada con evaluate_criterion y
persistida en su propio JSON (escritura atómica). El resumen CSV se
reconstruye siempre a partir de los archivos de celda, por lo que no
depende del orden de ejecución ni de la reanudación.
"""

import hashlib
import json
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import pandas as pd

from criteria import KINDS, evaluate_criterion
from ensemble import OperatorEnsemble, ensemble_from_dict, ensemble_to_dict, read_structured_file
from regularity import ConstantsCache, RegularityConstants, user_supplied_constants, write_json_atomic

from .config_sweep import load_config

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
PROBABILITY_KINDS = ('spectrum_prob', 'multiscale_prob')
SUMMARY_COLUMNS = ['i', 'j', 'lambda', 'energy', 'kind', 'lhs', 'uncertainty', 'threshold', 'verdict',
                   'label', 'certification', 'master_seed', 'constants_fingerprint']


class ConfigError(ValueError):
    """Contenido de configuración inválido."""


def _float_list(data: Mapping[str, Any], key: str) -> Tuple[float, ...]:
    values = data.get(key)
    if values is None:
        raise ConfigError(f"Falta la clave '{key}' en la malla")
    if isinstance(values, (int, float)):
        values = [values]
    try:
        return tuple(float(v) for v in values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Valores no numéricos en '{key}': {e}") from e


@dataclass(frozen=True)
class SweepConfig:
    """Malla de (λ, E), criterio y parámetros de un barrido."""

    ensemble: OperatorEnsemble
    lambdas: Tuple[float, ...]
    energies: Tuple[float, ...]
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = 'sweep_output'
    master_seed: int = 0
    resume: bool = True
    constants: Optional[Dict[str, Any]] = None
    effort: Optional[int] = None

    def __post_init__(self):
        if not self.lambdas or not self.energies:
            raise ConfigError("La malla (λ, E) está vacía")
        bad = [lam for lam in self.lambdas if not lam > 0]
        if bad:
            raise ConfigError(f"λ debe ser positivo, se recibió {bad[0]}")
        if any(not math.isfinite(E) for E in self.energies):
            raise ConfigError("Las energías de la malla deben ser finitas")
        if self.kind not in KINDS:
            raise ConfigError(f"Tipo de criterio desconocido: {self.kind} (válidos: {', '.join(KINDS)})")

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.lambdas), len(self.energies)

    def cells(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(len(self.lambdas)) for j in range(len(self.energies))]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], output_dir: Optional[str] = None) -> 'SweepConfig':
        """
        Construye la configuración desde un diccionario versionado.

        Raises:
            ConfigError: Versión de esquema desconocida, claves ausentes o valores inválidos
        """
        version = data.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ConfigError(f"Versión de esquema no soportada: {version!r} (se espera {SCHEMA_VERSION})")
        if 'ensemble' not in data or 'grid' not in data or 'criterion' not in data:
            raise ConfigError("La configuración necesita las secciones ensemble, grid y criterion")
        criterion = dict(data['criterion'])
        if 'kind' not in criterion:
            raise ConfigError("Falta criterion.kind")
        kind = criterion.pop('kind')
        defaults = load_config()
        try:
            ensemble_data = dict(data['ensemble'])
            ensemble_data.setdefault('schema_version', SCHEMA_VERSION)
            ensemble = ensemble_from_dict(ensemble_data)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Ensemble inválido: {e}") from e
        return cls(
            ensemble=ensemble,
            lambdas=_float_list(data['grid'], 'lambda'),
            energies=_float_list(data['grid'], 'energy'),
            kind=kind,
            params=criterion,
            output_dir=output_dir or str(data.get('output_dir', defaults['output_dir'])),
            master_seed=int(data.get('master_seed', ensemble.master_seed)),
            resume=bool(data.get('resume', defaults['resume'])),
            constants=dict(data['constants']) if data.get('constants') else None,
            effort=int(data['effort']) if data.get('effort') is not None else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            'schema_version': SCHEMA_VERSION,
            'ensemble': ensemble_to_dict(self.ensemble),
            'grid': {'lambda': list(self.lambdas), 'energy': list(self.energies)},
            'criterion': dict(self.params, kind=self.kind),
            'output_dir': self.output_dir,
            'master_seed': self.master_seed,
            'resume': self.resume,
        }
        if self.constants is not None:
            data['constants'] = dict(self.constants)
        if self.effort is not None:
            data['effort'] = self.effort
        return data

    def fingerprint(self) -> str:
        """Huella de todo lo que determina los resultados (excluye salida, reanudación e hilos)."""
        data = self.to_dict()
        for key in ('output_dir', 'resume'):
            data.pop(key)
        data['criterion'].pop('threads', None)
        payload = json.dumps(data, sort_keys=True, default=str)
        return hashlib.sha1(payload.encode('utf-8')).hexdigest()[:16]

    @classmethod
    def load(cls, path: Union[str, Path], output_dir: Optional[str] = None) -> 'SweepConfig':
        try:
            data = read_structured_file(path)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return cls.from_dict(data, output_dir)


@dataclass(frozen=True)
class CellResult:
    """Resultado de una celda (λ_i, E_j) con su traza de semillas."""

    i: int
    j: int
    lam: float
    energy: float
    report: Dict[str, Any]
    wall_time: float
    seed_trace: Dict[str, Any]
    constants_fingerprint: Optional[str]
    config_fingerprint: str
    complete: bool = True

    def summary_row(self) -> Dict[str, Any]:
        return {
            'i': self.i,
            'j': self.j,
            'lambda': self.lam,
            'energy': self.energy,
            'kind': self.report['kind'],
            'lhs': self.report['lhs'],
            'uncertainty': self.report['uncertainty'],
            'threshold': self.report['threshold'],
            'verdict': self.report['verdict'],
            'label': self.report['label'],
            'certification': self.report['certification'],
            'master_seed': self.seed_trace['master_seed'],
            'constants_fingerprint': self.constants_fingerprint or '',
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'i': self.i,
            'j': self.j,
            'lambda': self.lam,
            'energy': self.energy,
            'report': self.report,
            'wall_time': self.wall_time,
            'seed_trace': self.seed_trace,
            'constants_fingerprint': self.constants_fingerprint,
            'config_fingerprint': self.config_fingerprint,
            'complete': self.complete,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'CellResult':
        return cls(int(data['i']), int(data['j']), float(data['lambda']), float(data['energy']),
                   dict(data['report']), float(data['wall_time']), dict(data['seed_trace']),
                   data.get('constants_fingerprint'), str(data['config_fingerprint']),
                   bool(data.get('complete', False)))


@dataclass
class SweepOutcome:
    directory: Path
    summary: pd.DataFrame
    computed: int
    skipped: int

    @property
    def summary_path(self) -> Path:
        return self.directory / 'summary.csv'


def cell_path(directory: Union[str, Path], i: int, j: int) -> Path:
    return Path(directory) / 'cells' / f'cell_{i:03d}_{j:03d}.json'


def resolve_constants(config: SweepConfig, cache_path: Optional[Union[str, Path]] = None) -> Optional[RegularityConstants]:
    """Constantes del barrido: del usuario, de la caché o estimadas; ninguna para probabilidades."""
    if config.kind in PROBABILITY_KINDS:
        return None
    dist = config.ensemble.disorder
    if config.constants is not None:
        c = config.constants
        return user_supplied_constants(float(c.get('tau', dist.tau)), float(c['s']), float(c['kappa_tau']),
                                       float(c['C_s']), None if c.get('D_s') is None else float(c['D_s']))
    s = float(config.params['s']) if 's' in config.params else None
    return ConstantsCache(cache_path).get_or_compute(dist, s, config.effort, config.master_seed)


def _load_complete(path: Path, fingerprint: str) -> Optional[CellResult]:
    if not path.exists():
        return None
    try:
        cell = CellResult.from_dict(json.loads(path.read_text(encoding='utf-8')))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        logger.warning(f"Celda ilegible {path.name}, se recalcula: {e}")
        return None
    if not cell.complete or cell.config_fingerprint != fingerprint:
        logger.warning(f"Celda {path.name} incompleta o de otra configuración, se recalcula")
        return None
    return cell


def run_cell(config: SweepConfig, i: int, j: int, constants: Optional[RegularityConstants],
             threads: Optional[int] = None) -> CellResult:
    """Evalúa el criterio en (λ_i, E_j); independiente del orden y de la concurrencia."""
    lam, energy = config.lambdas[i], config.energies[j]
    ensemble = config.ensemble.with_lambda(lam).with_seed(config.master_seed)
    params = dict(config.params, energy=energy)
    if threads is not None:
        params['threads'] = threads
    logger.info(f"Celda ({i},{j}): λ={lam}, E={energy}")
    start = time.perf_counter()
    try:
        report = evaluate_criterion(config.kind, ensemble, params, constants)
    except Exception as e:
        logger.error(f"Celda ({i},{j}) fallida: {e}")
        raise RuntimeError(f"Celda ({i},{j}) fallida: {e}")
    seed_trace = {'master_seed': config.master_seed, 'samples': int(params.get('n', 1000)), 'stream': 0}
    return CellResult(i, j, lam, energy, report.to_dict(), time.perf_counter() - start, seed_trace,
                      constants.fingerprint() if constants is not None else None, config.fingerprint())


def collect_summary(directory: Union[str, Path], config: SweepConfig) -> pd.DataFrame:
    """Tabla por celda, ordenada por (i, j), reconstruida de los archivos de celda."""
    rows = []
    for i, j in config.cells():
        cell = _load_complete(cell_path(directory, i, j), config.fingerprint())
        if cell is None:
            raise RuntimeError(f"Falta la celda ({i},{j}) en {directory}")
        rows.append(cell.summary_row())
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS).sort_values(['i', 'j']).reset_index(drop=True)


def run_sweep(config: SweepConfig, threads: Optional[int] = None,
              cache_path: Optional[Union[str, Path]] = None) -> SweepOutcome:
    """
    Ejecuta el barrido completo y escribe cells/*.json y summary.csv.

    Args:
        config: Configuración validada
        threads: Celdas en paralelo (por defecto, configuración)
        cache_path: Caché de constantes de regularidad

    Returns:
        SweepOutcome con el resumen y el recuento de celdas calculadas y omitidas

    Raises:
        RuntimeError: Si alguna celda falla o el directorio no es escribible
    """
    directory = Path(config.output_dir)
    try:
        (directory / 'cells').mkdir(parents=True, exist_ok=True)
        write_json_atomic(directory / 'config.json', config.to_dict())
    except OSError as e:
        logger.error(f"No se puede escribir en {directory}: {e}")
        raise RuntimeError(f"No se puede escribir en {directory}: {e}")
    fingerprint = config.fingerprint()
    pending = []
    for i, j in config.cells():
        if config.resume and _load_complete(cell_path(directory, i, j), fingerprint) is not None:
            continue
        pending.append((i, j))
    skipped = len(config.cells()) - len(pending)
    if skipped:
        logger.warning(f"Reanudación: {skipped} celdas completas omitidas")
    logger.info(f"Barrido {config.shape[0]}×{config.shape[1]} ({config.kind}): {len(pending)} celdas pendientes")

    constants = resolve_constants(config, cache_path) if pending else None

    completed: List[Tuple[int, int]] = []
    lock = threading.Lock()

    def run(cell: Tuple[int, int]) -> None:
        result = run_cell(config, cell[0], cell[1], constants)
        write_json_atomic(cell_path(directory, *cell), result.to_dict())
        with lock:
            completed.append(cell)

    workers = threads if threads is not None else load_config()['threads']
    try:
        if workers <= 1 or len(pending) <= 1:
            for cell in pending:
                run(cell)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run, pending))
    except Exception as e:
        # el pool espera a las celdas en curso antes de salir; las ya escritas se reanudan
        done = len(completed)
        logger.error(f"Barrido interrumpido: {done}/{len(pending)} celdas completadas, "
                     f"{len(pending) - done} pendientes en {directory}: {e}")
        raise RuntimeError(f"Barrido interrumpido tras {done}/{len(pending)} celdas completadas: {e}") from e

    summary = collect_summary(directory, config)
    outcome = SweepOutcome(directory, summary, len(pending), skipped)
    summary.to_csv(outcome.summary_path, index=False, float_format='%.17g')
    logger.info(f"Resumen escrito en {outcome.summary_path}")
    return outcome
