"""
Fórmula de Krein
================

Reducción 2×2 del resolvente: G(x,y) = <1|([A]^{-1} + λ·diag(v_x,v_y))^{-1}|2>,
con [A] el bloque {x,y} del resolvente de Ĥ (H con V(x), V(y) anulados).
"""

import logging
from typing import Sequence, Union

import numpy as np

from ensemble import Hamiltonian
from lattice import make_site

from .config_resolvent import load_config
from .green import GreenSolver, SolverError, SpectralParameter

logger = logging.getLogger(__name__)


def krein_2x2(H_hat: Hamiltonian, x: Sequence[int], y: Sequence[int],
              z: Union[SpectralParameter, complex, float],
              v_x: float, v_y: float, lam: float) -> complex:
    """
    Entrada G(x,y;z) del operador con potenciales restaurados.

    Args:
        H_hat: Hamiltoniano con V(x) = V(y) = 0
        x, y: Sitios (x = y se reduce al caso 1×1)
        z: Parámetro espectral
        v_x, v_y: Valores del desorden en x e y
        lam: Intensidad del desorden

    Raises:
        SolverError: Si [A] es numéricamente singular
    """
    xs, ys = make_site(x), make_site(y)
    solver = GreenSolver(H_hat, z)
    limit = load_config()['condition_limit']
    if xs == ys:
        a = solver.entry(xs, xs)
        if a == 0:
            raise SolverError("Elemento diagonal [A]_11 nulo en la reducción 1×1")
        return complex(1.0 / (1.0 / a + lam * v_x))
    col_x = solver.column(xs)
    col_y = solver.column(ys)
    i, j = H_hat.region.index(xs), H_hat.region.index(ys)
    block = np.array([[col_x[i], col_y[i]],
                      [col_x[j], col_y[j]]], dtype=complex)
    condition = float(np.linalg.cond(block))
    if not np.isfinite(condition) or condition > limit:
        raise SolverError(f"Bloque [A] singular (condición {condition:.3e})", condition=condition)
    reduced = np.linalg.inv(block) + lam * np.diag([v_x, v_y])
    return complex(np.linalg.inv(reduced)[0, 1])
