from typing import Dict, Any

from config_utils import get_criteria_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración de los criterios desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con la banda de sigmas y el límite de diagonalización densa
    """
    return get_criteria_config()
