
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from config_utils import get_ensemble_config

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .disorder import DisorderDistribution
from .hopping import HoppingKernel
from .operator_ensemble import OperatorEnsemble, ensemble_from_dict

logger = logging.getLogger(__name__)


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración del ensemble desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con la configuración por defecto del ensemble
    """
    return get_ensemble_config()


def read_structured_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Lee un archivo TOML o JSON según su extensión.

    Raises:
        ValueError: Extensión no soportada o contenido inválido
    """
    path = Path(path)
    suffix = path.suffix.lower()
    try:
        if suffix == '.toml':
            with path.open('rb') as fh:
                return tomllib.load(fh)
        if suffix == '.json':
            return json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ValueError(f"No se pudo leer {path}: {e}") from e
    raise ValueError(f"Extensión de configuración no soportada: {suffix} (use .toml o .json)")


def default_ensemble(config: Optional[Dict[str, Any]] = None) -> OperatorEnsemble:
    """Ensemble construido a partir de las variables de entorno."""
    if config is None:
        config = load_config()
    hopping = HoppingKernel(
        dim=config['dimension'],
        kind=config['hopping'],
        t0=config['t0'],
        m=config['m'],
        range=config['range'],
        peierls_flux=config['peierls_flux'],
    )
    disorder = DisorderDistribution(
        kind=config['disorder'],
        low=config['low'],
        high=config['high'],
        scale=config['scale'],
        tau=config['tau'],
    )
    return OperatorEnsemble(hopping, disorder, config['lambda'], None, config['master_seed'])


def load_ensemble(path: Union[str, Path]) -> OperatorEnsemble:
    """Carga un ensemble desde un archivo TOML/JSON versionado."""
    data = read_structured_file(path)
    ensemble = ensemble_from_dict(data.get('ensemble', data))
    logger.info(f"Ensemble cargado desde {path}: d={ensemble.dim}, λ={ensemble.lam}")
    return ensemble
