from typing import Dict, Any

from config_utils import get_propagate_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración de propagación desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con factor de seguridad, μ máximo y tolerancias de bisección
    """
    return get_propagate_config()
