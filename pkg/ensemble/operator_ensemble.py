"""
Ensemble de operadores aleatorios
=================================

H_ω = T + U_per + λV_ω restringido a regiones finitas, muestreo del
desorden y ensamblado de variantes agotadas H^(Γ).
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from lattice import BondSet, Region, SitePoint, cut_set, enlarge, make_site

from .disorder import DisorderDistribution
from .hopping import HoppingKernel
from .rng import sample_keys, site_uniforms

# Configurar logging
logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PeriodicPotential:
    """Potencial periódico U_per con celda `period` y valores en orden C."""

    period: Tuple[int, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        if any(p < 1 for p in self.period):
            raise ValueError(f"Periodo inválido: {self.period}")
        if len(self.values) != int(np.prod(self.period)):
            raise ValueError(f"Se esperaban {int(np.prod(self.period))} valores para el periodo {self.period}")

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        table = np.asarray(self.values, dtype=float).reshape(self.period)
        reduced = np.mod(coords, np.asarray(self.period, dtype=np.int64))
        return table[tuple(reduced.T)]

    @property
    def minimum(self) -> float:
        return float(min(self.values))


@dataclass(frozen=True)
class OperatorEnsemble:
    """
    Distribución de H_ω.

    Attributes:
        hopping: Núcleo de hopping
        disorder: Ley del desorden
        lam: Intensidad del desorden λ > 0
        u_per: Potencial periódico opcional
        master_seed: Semilla maestra de 64 bits
    """

    hopping: HoppingKernel
    disorder: DisorderDistribution
    lam: float = 1.0
    u_per: Optional[PeriodicPotential] = None
    master_seed: int = 0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"λ debe ser positivo, se recibió {self.lam}")
        if self.u_per is not None and len(self.u_per.period) != self.hopping.dim:
            raise ValueError("La dimensión del potencial periódico no coincide con la de la red")
        if not self.disorder.bounded_support:
            logger.warning("Desorden de Cauchy: constantes de desacoplamiento no disponibles")

    @property
    def dim(self) -> int:
        return self.hopping.dim

    def with_lambda(self, lam: float) -> 'OperatorEnsemble':
        return OperatorEnsemble(self.hopping, self.disorder, lam, self.u_per, self.master_seed)

    def with_seed(self, master_seed: int) -> 'OperatorEnsemble':
        return OperatorEnsemble(self.hopping, self.disorder, self.lam, self.u_per, master_seed)

    def spectrum_bottom(self) -> float:
        """E₀ = −Σ_v τ(v) + λ·inf supp ρ + min U_per."""
        lo, _ = self.disorder.support()
        base = self.u_per.minimum if self.u_per is not None else 0.0
        return -self.hopping.total_amplitude() + self.lam * lo + base


@dataclass(frozen=True, eq=False)
class DisorderSample:
    """Realización del desorden sobre una región (valores alineados con su índice)."""

    region: Region
    values: np.ndarray
    sample_index: int

    def value(self, site: Sequence[int]) -> float:
        return float(self.values[self.region.index(site)])

    def with_values(self, updates: Mapping[SitePoint, float]) -> 'DisorderSample':
        """Copia con algunos potenciales reemplazados (p. ej. V(x) = 0 para Ĥ)."""
        values = self.values.copy()
        for site, v in updates.items():
            values[self.region.index(site)] = v
        return DisorderSample(self.region, values, self.sample_index)

    def restrict(self, sub: Region) -> 'DisorderSample':
        idx = [self.region.index(s) for s in sub]
        return DisorderSample(sub, self.values[idx], self.sample_index)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Matriz hermítica de H restringida a una región, con el soporte del hopping."""

    region: Region
    matrix: sparse.csr_matrix
    offsets: Tuple[SitePoint, ...] = field(default=())

    @property
    def size(self) -> int:
        return len(self.region)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def is_hermitian(self) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return diff.count_nonzero() == 0

    def cut_set(self, W: Region) -> BondSet:
        """Γ(W) restringido a enlaces con ambos extremos en la región."""
        bonds = cut_set(W, self.offsets)
        return BondSet(b for b in bonds if b[1] in self.region)

    def enlarge(self, W: Region) -> Region:
        """W^+ ∩ región."""
        return Region([s for s in enlarge(W, self.offsets) if s in self.region], W.dim)

    def deplete(self, bonds: BondSet) -> 'Hamiltonian':
        """H^(Γ): anula el hopping en los enlaces de Γ (ambas orientaciones)."""
        matrix = self.matrix.tolil(copy=True)
        for u, v in bonds:
            if u in self.region and v in self.region:
                i, j = self.region.index(u), self.region.index(v)
                matrix[i, j] = 0
                matrix[j, i] = 0
        result = matrix.tocsr()
        result.eliminate_zeros()
        return Hamiltonian(self.region, result, self.offsets)

    def restrict(self, sub: Region) -> 'Hamiltonian':
        idx = [self.region.index(s) for s in sub]
        return Hamiltonian(sub, self.matrix[idx][:, idx].tocsr(), self.offsets)

    def hopping_part(self) -> sparse.csr_matrix:
        off = self.matrix - sparse.diags(self.matrix.diagonal())
        off = sparse.csr_matrix(off)
        off.eliminate_zeros()
        return off


def sample_block(ensemble: OperatorEnsemble, region: Region, indices: Iterable[int],
                 stream: int = 0) -> np.ndarray:
    """
    Potenciales V_ω para varios índices de muestra a la vez.

    Returns:
        Arreglo (len(indices), |región|); la fila i coincide con
        sample_potential(ensemble, region, indices[i]).values
    """
    idx = np.asarray(list(indices), dtype=np.int64)
    if np.any(idx < 0):
        raise ValueError("Los índices de muestra deben ser no negativos")
    keys = sample_keys(ensemble.master_seed, idx, stream)
    uniforms = site_uniforms(keys, region.coords())
    return np.asarray(ensemble.disorder.ppf(uniforms), dtype=float)


def sample_potential(ensemble: OperatorEnsemble, region: Region, index: int,
                     stream: int = 0) -> DisorderSample:
    """
    Muestra determinista de {V_ω(x)} sobre la región.

    Args:
        ensemble: Ensemble de operadores
        region: Región finita
        index: Índice de la muestra (≥ 0)
        stream: Flujo independiente de números aleatorios

    Returns:
        DisorderSample reproducible a partir de (master_seed, index)
    """
    values = sample_block(ensemble, region, [index], stream)[0]
    return DisorderSample(region, values, int(index))


@lru_cache(maxsize=64)
def hopping_matrix(hopping: HoppingKernel, region: Region,
                   depletion: Optional[BondSet] = None) -> sparse.csr_matrix:
    """Parte de hopping T_Λ^(Γ) como matriz dispersa (compartida entre muestras)."""
    rows, cols, vals = [], [], []
    offsets = hopping.offsets()
    for i, x in enumerate(region):
        for v, amplitude in offsets:
            y = tuple(a + b for a, b in zip(x, v))
            j = region.index_map.get(y)
            if j is None:
                continue
            if depletion is not None and depletion.touches(x, y):
                continue
            rows.append(i)
            cols.append(j)
            vals.append(amplitude * np.exp(1j * hopping.phase(x, y)))
    n = len(region)
    dtype = complex if hopping.peierls_flux is not None else float
    data = np.asarray(vals, dtype=complex)
    if dtype is float:
        data = data.real
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=(n, n), dtype=dtype)
    matrix.sum_duplicates()
    return matrix


def diagonal(ensemble: OperatorEnsemble, region: Region, values: np.ndarray) -> np.ndarray:
    """U_per(x) + λ·V(x) a partir de los valores del desorden."""
    diag = ensemble.lam * np.asarray(values, dtype=float)
    if ensemble.u_per is not None:
        diag = diag + ensemble.u_per.evaluate(region.coords())
    return diag


def _check_depletion(region: Region, depletion: Optional[BondSet]) -> None:
    if depletion is None:
        return
    for u, v in depletion:
        if u not in region and v not in region:
            raise ValueError(f"El enlace <{u},{v}> no tiene extremos en la región")


def assemble(ensemble: OperatorEnsemble, sample: DisorderSample,
             depletion: Optional[BondSet] = None) -> Hamiltonian:
    """
    Matriz de H restringida a la región de la muestra.

    Args:
        ensemble: Ensemble de operadores
        sample: Realización del desorden
        depletion: Enlaces cuyo hopping se anula (ambas orientaciones)

    Returns:
        Hamiltonian hermítico con diagonal U_per + λV

    Raises:
        ValueError: Si algún enlace de depletion no toca la región
    """
    region = sample.region
    _check_depletion(region, depletion)
    if depletion is not None and len(depletion) == 0:
        depletion = None
    T = hopping_matrix(ensemble.hopping, region, depletion)
    D = sparse.diags(diagonal(ensemble, region, sample.values), format='csr')
    matrix = (T + D).tocsr()
    return Hamiltonian(region, matrix, tuple(ensemble.hopping.support_offsets()))


def xi_s(hopping: HoppingKernel, region: Region, s: float) -> float:
    """Ξ_s(Λ) = Σ_{u∈Λ, u'∉Λ} τ(u−u')^s."""
    total = 0.0
    offsets = hopping.offsets()
    for u in region:
        for v, amplitude in offsets:
            w = tuple(a + b for a, b in zip(u, v))
            if w not in region:
                total += amplitude ** s
    return total


def boundary_weights(hopping: HoppingKernel, region: Region, s: float) -> Dict[SitePoint, float]:
    """w(u) = Σ_{u'∉Λ} τ(u−u')^s para los sitios u ∈ Λ con peso no nulo."""
    weights: Dict[SitePoint, float] = {}
    offsets = hopping.offsets()
    for u in region:
        w = 0.0
        for v, amplitude in offsets:
            if tuple(a + b for a, b in zip(u, v)) not in region:
                w += amplitude ** s
        if w > 0:
            weights[u] = w
    return weights


def ensemble_to_dict(ensemble: OperatorEnsemble) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'schema_version': SCHEMA_VERSION,
        'hopping': ensemble.hopping.to_dict(),
        'disorder': ensemble.disorder.to_dict(),
        'lambda': ensemble.lam,
        'master_seed': ensemble.master_seed,
    }
    if ensemble.u_per is not None:
        data['u_per'] = {'period': list(ensemble.u_per.period), 'values': list(ensemble.u_per.values)}
    return data


def ensemble_from_dict(data: Mapping[str, Any]) -> OperatorEnsemble:
    """
    Construye un ensemble desde un diccionario versionado.

    Raises:
        ValueError: Si falta schema_version o la versión no es soportada
    """
    version = data.get('schema_version')
    if version is None:
        raise ValueError("Falta el campo obligatorio schema_version")
    if int(version) != SCHEMA_VERSION:
        raise ValueError(f"schema_version {version} no soportada (se espera {SCHEMA_VERSION})")
    u_per = None
    if data.get('u_per'):
        u_per = PeriodicPotential(tuple(int(p) for p in data['u_per']['period']),
                                  tuple(float(v) for v in data['u_per']['values']))
    return OperatorEnsemble(
        hopping=HoppingKernel.from_dict(data['hopping']),
        disorder=DisorderDistribution.from_dict(data['disorder']),
        lam=float(data.get('lambda', 1.0)),
        u_per=u_per,
        master_seed=int(data.get('master_seed', 0)),
    )


def site_list(region: Region, sites: Iterable[Sequence[int]]) -> Tuple[SitePoint, ...]:
    """Valida que todos los sitios pertenezcan a la región."""
    result = tuple(make_site(s, region.dim) for s in sites)
    for s in result:
        if s not in region:
            raise ValueError(f"El sitio {s} no pertenece a la región")
    return result
