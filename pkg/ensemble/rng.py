"""
Generador basado en contador
============================

Cada valor uniforme es una función pura de (master_seed, stream,
sample_index, coordenadas del sitio): el muestreo no depende del orden de
evaluación ni del número de hilos.
"""

import numpy as np

__all__ = ['master_key', 'sample_keys', 'site_uniforms']

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_MASK64 = (1 << 64) - 1


def _mix(x: np.ndarray) -> np.ndarray:
    """Finalizador splitmix64 sobre arreglos uint64 (aritmética modular)."""
    x = np.asarray(x, dtype=np.uint64)
    x = (x ^ (x >> _S30)) * _M1
    x = (x ^ (x >> _S27)) * _M2
    return x ^ (x >> _S31)


def master_key(master_seed: int, stream: int = 0) -> np.uint64:
    """Clave de 64 bits derivada de la semilla maestra con SeedSequence."""
    seq = np.random.SeedSequence([master_seed & _MASK64, stream & _MASK64])
    return seq.generate_state(1, dtype=np.uint64)[0]


def sample_keys(master_seed: int, indices, stream: int = 0) -> np.ndarray:
    """Claves por muestra para los índices dados."""
    idx = np.asarray(indices, dtype=np.int64).astype(np.uint64)
    counter = (idx + np.uint64(1)) * _GOLDEN
    return _mix(np.full(idx.shape, master_key(master_seed, stream), dtype=np.uint64) ^ _mix(counter))


def site_uniforms(keys: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """
    Uniformes en (0,1) para cada (muestra, sitio).

    Args:
        keys: Claves por muestra, forma (n,)
        coords: Coordenadas int64 de los sitios, forma (N, d)

    Returns:
        Arreglo float64 de forma (n, N)
    """
    keys = np.asarray(keys, dtype=np.uint64)
    coords = np.asarray(coords, dtype=np.int64)
    h = np.broadcast_to(keys[:, None], (keys.shape[0], coords.shape[0])).copy()
    for j in range(coords.shape[1]):
        offset = np.uint64(((j + 1) * int(_GOLDEN)) & _MASK64)
        component = coords[:, j].astype(np.uint64) + offset
        h = _mix(h ^ _mix(component)[None, :])
    return ((h >> _S11).astype(np.float64) + 0.5) * (2.0 ** -53)
