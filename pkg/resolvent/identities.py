"""
Identidades del resolvente
==========================

Evalúa con matrices densas ambos lados de la identidad de primer orden
G = G^Γ − G^Γ T^Γ G (y su adjunta), la de segundo orden con Γ = Γ(W),
Γ̃ = Γ(W^+), y la forma de tres factores para x ∈ W, y ∉ W^+.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from ensemble import Hamiltonian
from lattice import BondSet, Region

from .green import SpectralParameter, dense_green_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualReport:
    """Residuos relativos máximos (respecto de max|G|) de cada identidad."""

    first_order: float
    first_order_adjoint: float
    second_order: float
    diagrammatic: float
    vanishing_terms: float
    pairs: int

    @property
    def max_residual(self) -> float:
        return max(self.first_order, self.first_order_adjoint, self.second_order, self.diagrammatic)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['max_residual'] = self.max_residual
        return data


def _relative(diff: np.ndarray, scale: float) -> float:
    if diff.size == 0:
        return 0.0
    return float(np.max(np.abs(diff)) / max(scale, 1e-300))


def _bond_part(H: Hamiltonian, bonds: BondSet) -> np.ndarray:
    """T^(Γ): hopping de H sobre los enlaces de Γ (ambas orientaciones)."""
    return H.dense() - H.deplete(bonds).dense()


def first_order_residual(H: Hamiltonian, bonds: BondSet,
                         z: Union[SpectralParameter, complex, float]) -> float:
    """Residuo de G = G^Γ − G^Γ T^Γ G para un conjunto de enlaces arbitrario."""
    G = dense_green_matrix(H, z)
    G_dep = dense_green_matrix(H.deplete(bonds), z)
    T = _bond_part(H, bonds)
    return _relative(G - (G_dep - G_dep @ T @ G), np.max(np.abs(G)))


def all_bonds(H: Hamiltonian) -> BondSet:
    """Todos los enlaces con hopping no nulo dentro de la región."""
    coo = H.hopping_part().tocoo()
    sites = H.region.sites
    return BondSet((sites[i], sites[j]) for i, j in zip(coo.row, coo.col) if i < j)


def identity_residuals(H: Hamiltonian, W: Region,
                       z: Union[SpectralParameter, complex, float]) -> ResidualReport:
    """
    Residuos de las identidades de primer y segundo orden y de la forma diagramática.

    Args:
        H: Hamiltoniano sobre Ω
        W: Subregión W ⊂ Ω
        z: Parámetro espectral

    Returns:
        ResidualReport con residuos relativos máximos

    Raises:
        ValueError: Si W no está contenida en la región de H
        SolverError: Si alguna inversa es singular
    """
    if not W.is_subset(H.region):
        raise ValueError("W debe estar contenida en la región del Hamiltoniano")
    region = H.region
    gamma = H.cut_set(W)
    w_plus = H.enlarge(W)
    gamma_plus = H.cut_set(w_plus)

    G = dense_green_matrix(H, z)
    G1 = dense_green_matrix(H.deplete(gamma), z)
    G2 = dense_green_matrix(H.deplete(gamma_plus), z)
    T1 = _bond_part(H, gamma)
    T2 = _bond_part(H, gamma_plus)
    scale = float(np.max(np.abs(G)))

    first = _relative(G - (G1 - G1 @ T1 @ G), scale)
    adjoint = _relative(G - (G1 - G @ T1 @ G1), scale)
    second = _relative(G - (G1 - G1 @ T1 @ G2 + G1 @ T1 @ G @ T2 @ G2), scale)

    x_idx = [region.index(s) for s in W]
    y_idx = [i for i, s in enumerate(region.sites) if s not in w_plus]
    diagrammatic = 0.0
    vanishing = 0.0
    if y_idx and len(gamma) and len(gamma_plus):
        u = [region.index(b[0]) for b in gamma]
        u_prime = [region.index(b[1]) for b in gamma]
        v = [region.index(b[0]) for b in gamma_plus]
        v_prime = [region.index(b[1]) for b in gamma_plus]
        H_dense = H.dense()
        t1 = H_dense[u, u_prime]
        t2 = H_dense[v, v_prime]
        left = G1[np.ix_(x_idx, u)] * t1[None, :]
        middle = G[np.ix_(u_prime, v)]
        right = t2[:, None] * G2[np.ix_(v_prime, y_idx)]
        rhs = left @ middle @ right
        diagrammatic = _relative(G[np.ix_(x_idx, y_idx)] - rhs, scale)
        term_one = G1[np.ix_(x_idx, y_idx)]
        term_two = (G1 @ T1 @ G2)[np.ix_(x_idx, y_idx)]
        vanishing = float(max(np.max(np.abs(term_one)), np.max(np.abs(term_two))))
    pairs = len(x_idx) * len(y_idx)
    logger.debug(f"Residuos: primer orden {first:.2e}, segundo orden {second:.2e}, diagramático {diagrammatic:.2e}")
    return ResidualReport(first, adjoint, second, diagrammatic, vanishing, pairs)


def conjugation_residual(H: Hamiltonian, z: Union[SpectralParameter, complex, float]) -> float:
    """max |G(x,y;z̄) − conj(G(y,x;z))| relativo a max|G|."""
    zp = SpectralParameter.coerce(z)
    G = dense_green_matrix(H, zp)
    G_bar = dense_green_matrix(H, zp.conjugate())
    return _relative(G_bar - G.conj().T, float(np.max(np.abs(G))))


def depletion_consistency(H: Hamiltonian, W: Region,
                          z: Union[SpectralParameter, complex, float],
                          direct: Optional[Hamiltonian] = None) -> float:
    """
    Desacoplamiento por bloques: G de H^(Γ(W)) sobre Ω∖W frente a G del
    operador ensamblado directamente sobre Ω∖W.
    """
    rest = H.region.difference(W)
    depleted = dense_green_matrix(H.deplete(H.cut_set(W)), z)
    reference = dense_green_matrix(direct if direct is not None else H.restrict(rest), z)
    idx = [H.region.index(s) for s in rest]
    block = depleted[np.ix_(idx, idx)]
    return _relative(block - reference, float(np.max(np.abs(reference))))
