from typing import Dict, Any

from config_utils import get_moments_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración del estimador de momentos desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con hilos, fracción de fallos tolerada y tamaño de bloque
    """
    return get_moments_config()
