
from typing import Dict, Any

from config_utils import get_solver_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración del solucionador desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con límites de condicionamiento, residuo y oráculo denso
    """
    return get_solver_config()
