"""
Caché de constantes de regularidad
==================================

Archivo JSON con entradas indexadas por (huella de la ley, s, effort).
Las entradas aportadas por el usuario prevalecen sobre las estimadas.
"""

import json
import logging
import os
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

from ensemble import DisorderDistribution

from .config_regularity import load_config
from .constants import RegularityConstants, estimate_constants

logger = logging.getLogger(__name__)


def cache_key(dist: DisorderDistribution, s: float, effort: int) -> str:
    return f"{dist.fingerprint()}|s={s!r}|effort={int(effort)}"


def write_json_atomic(path: Union[str, Path], data: Any) -> None:
    """Escribe JSON en un temporal y lo reemplaza de forma atómica."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True), encoding='utf-8')
    tmp.replace(path)


class ConstantsCache:
    """
    Caché persistente de RegularityConstants.

    Uso:
        cache = ConstantsCache('constants_cache.json')
        constantes = cache.get_or_compute(dist, s=0.25)
    """

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path or load_config()['cache_path'])
        self._lock = threading.Lock()
        self._entries: Dict[str, Dict[str, Any]] = {}
        if self.path.exists():
            try:
                data = json.loads(self.path.read_text(encoding='utf-8'))
                self._entries = dict(data.get('entries', {}))
                logger.info(f"Caché de constantes cargada: {len(self._entries)} entradas desde {self.path}")
            except (json.JSONDecodeError, OSError) as e:
                logger.error(f"Caché de constantes ilegible en {self.path}: {e}")
                raise RuntimeError(f"Caché de constantes ilegible: {e}")

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, dist: DisorderDistribution, s: float, effort: int) -> Optional[RegularityConstants]:
        entry = self._entries.get(cache_key(dist, s, effort))
        if entry is None:
            return None
        return RegularityConstants.from_dict(entry['constants'])

    def put(self, dist: DisorderDistribution, s: float, effort: int,
            constants: RegularityConstants) -> None:
        key = cache_key(dist, s, effort)
        now = datetime.now().isoformat()
        with self._lock:
            previous = self._entries.get(key, {})
            self._entries[key] = {
                'distribution': dist.to_dict(),
                's': s,
                'effort': int(effort),
                'constants': constants.to_dict(),
                'created': previous.get('created', now),
                'updated': now,
            }
            self.save()

    def put_user_supplied(self, dist: DisorderDistribution, effort: int,
                          constants: RegularityConstants) -> RegularityConstants:
        """Registra constantes rigurosas; la procedencia pasa a user_supplied."""
        upgraded = RegularityConstants(constants.tau, constants.s, constants.kappa_tau,
                                       constants.C_s, constants.D_s, {'kind': 'user_supplied'})
        self.put(dist, constants.s, effort, upgraded)
        return upgraded

    def get_or_compute(self, dist: DisorderDistribution, s: Optional[float] = None,
                       effort: Optional[int] = None, seed: Optional[int] = None) -> RegularityConstants:
        """
        Devuelve las constantes en caché o las estima y guarda.

        Args:
            dist: Ley del desorden
            s: Exponente (por defecto τ/2)
            effort: Esfuerzo de búsqueda
            seed: Semilla de la búsqueda

        Returns:
            RegularityConstants
        """
        config = load_config()
        s = dist.tau / 2 if s is None else s
        effort = config['effort'] if effort is None else effort
        cached = self.get(dist, s, effort)
        if cached is not None:
            logger.info(f"Constantes recuperadas de la caché (s={s}, effort={effort})")
            return cached
        constants = estimate_constants(dist, s, effort, seed, config)
        self.put(dist, s, effort, constants)
        return constants

    def save(self) -> None:
        write_json_atomic(self.path, {'schema_version': 1, 'entries': self._entries})
        logger.debug(f"Caché de constantes guardada en {self.path}")
