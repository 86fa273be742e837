from typing import Dict, Any

from config_utils import get_dynamical_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración de medidas espectrales desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con la tolerancia de degeneración y el límite de diagonalización
    """
    return get_dynamical_config()
