from typing import Dict, Any

from config_utils import get_sweep_config


def load_config() -> Dict[str, Any]:
    """
    Carga la configuración de barridos desde el sistema centralizado.
    Alias para compatibilidad con código existente.

    Returns:
        Diccionario con el directorio de salida, los hilos y el modo de reanudación
    """
    return get_sweep_config()
