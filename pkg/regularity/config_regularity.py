from typing import Dict, Any

from config_utils import get_regularity_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración de regularidad desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con esfuerzo de búsqueda, semilla, tolerancias y ruta de caché
    """
    return get_regularity_config()
