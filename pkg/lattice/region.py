"""
Regiones finitas de Z^d
=======================

Sitios, regiones con mapa sitio <-> índice, enlaces, conjuntos de corte
Γ(W), ampliaciones W^+ y la métrica dist_Ω que colapsa la frontera.
"""

import hashlib
import itertools
import logging
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

# Configurar logging
logger = logging.getLogger(__name__)

SitePoint = Tuple[int, ...]
Bond = Tuple[SitePoint, SitePoint]

_INT64_MIN = -(2 ** 63)
_INT64_MAX = 2 ** 63 - 1


def make_site(coords: Iterable[int], d: Optional[int] = None) -> SitePoint:
    """
    Normaliza unas coordenadas a un SitePoint.

    Args:
        coords: Coordenadas enteras
        d: Dimensión esperada (opcional)

    Returns:
        Tupla de enteros

    Raises:
        ValueError: Si la dimensión no coincide o una coordenada no cabe en int64
    """
    site = tuple(int(c) for c in coords)
    if d is not None and len(site) != d:
        raise ValueError(f"El sitio {site} tiene dimensión {len(site)}, se esperaba {d}")
    for c in site:
        if c < _INT64_MIN or c > _INT64_MAX:
            raise ValueError(f"La coordenada {c} no cabe en un entero de 64 bits")
    return site


def norm_inf(v: Sequence[int]) -> int:
    """Norma ℓ∞ de un vector entero."""
    return max((abs(c) for c in v), default=0)


def site_distance(x: SitePoint, y: SitePoint) -> int:
    return max(abs(a - b) for a, b in zip(x, y))


def nearest_neighbor_offsets(d: int) -> List[SitePoint]:
    """Desplazamientos ±e_j de la red Z^d."""
    offsets = []
    for j in range(d):
        for sign in (-1, 1):
            v = [0] * d
            v[j] = sign
            offsets.append(tuple(v))
    return sorted(offsets)


class Region:
    """
    Subconjunto finito de Z^d con enumeración lexicográfica determinista.

    Inmutable tras la construcción; puede compartirse entre hilos.
    """

    __slots__ = ('_sites', '_index', '_dim', '_hash')

    def __init__(self, sites: Iterable[Iterable[int]], d: Optional[int] = None):
        normalized = [make_site(s, d) for s in sites]
        if not normalized:
            raise ValueError("Una región debe contener al menos un sitio")
        dims = {len(s) for s in normalized}
        if len(dims) != 1:
            raise ValueError(f"Sitios con dimensiones mezcladas: {sorted(dims)}")
        dim = dims.pop()
        if dim not in (1, 2, 3):
            raise ValueError(f"Dimensión {dim} no soportada (solo d ∈ {{1,2,3}})")
        unique = sorted(set(normalized))
        if len(unique) != len(normalized):
            raise ValueError("La región contiene sitios duplicados")
        self._sites: Tuple[SitePoint, ...] = tuple(unique)
        self._index: Dict[SitePoint, int] = {s: i for i, s in enumerate(self._sites)}
        self._dim = dim
        self._hash = hash(self._sites)

    @property
    def sites(self) -> Tuple[SitePoint, ...]:
        return self._sites

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def index_map(self) -> Mapping[SitePoint, int]:
        return self._index

    def index(self, site: Sequence[int]) -> int:
        """Índice de fila de un sitio; ValueError si no pertenece a la región."""
        key = tuple(int(c) for c in site)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"El sitio {key} no pertenece a la región") from None

    def coords(self) -> np.ndarray:
        """Coordenadas como matriz int64 de forma (|región|, d)."""
        return np.asarray(self._sites, dtype=np.int64).reshape(len(self._sites), self._dim)

    def fingerprint(self) -> str:
        digest = hashlib.sha1(repr(self._sites).encode('utf-8')).hexdigest()
        return digest[:16]

    def difference(self, other: 'Region') -> 'Region':
        return Region([s for s in self._sites if s not in other], self._dim)

    def union(self, other: 'Region') -> 'Region':
        return Region(set(self._sites) | set(other.sites), self._dim)

    def is_subset(self, other: 'Region') -> bool:
        return all(s in other for s in self._sites)

    def __contains__(self, site: Any) -> bool:
        try:
            return tuple(site) in self._index
        except TypeError:
            return False

    def __len__(self) -> int:
        return len(self._sites)

    def __iter__(self) -> Iterator[SitePoint]:
        return iter(self._sites)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Region) and self._sites == other._sites

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Region(d={self._dim}, sites={len(self._sites)})"


class BondSet:
    """Conjunto finito de enlaces orientados <u,u'> con orden determinista."""

    __slots__ = ('_bonds', '_set', '_hash')

    def __init__(self, bonds: Iterable[Tuple[Sequence[int], Sequence[int]]] = ()):
        normalized = set()
        for u, v in bonds:
            bond = (make_site(u), make_site(v))
            if bond[0] == bond[1]:
                raise ValueError(f"Enlace degenerado {bond}: los extremos coinciden")
            normalized.add(bond)
        self._bonds: Tuple[Bond, ...] = tuple(sorted(normalized))
        self._set = frozenset(self._bonds)
        self._hash = hash(self._bonds)

    @property
    def bonds(self) -> Tuple[Bond, ...]:
        return self._bonds

    def heads(self) -> List[SitePoint]:
        return sorted({b[1] for b in self._bonds})

    def tails(self) -> List[SitePoint]:
        return sorted({b[0] for b in self._bonds})

    def touches(self, u: SitePoint, v: SitePoint) -> bool:
        """Verdadero si <u,v> o <v,u> pertenece al conjunto."""
        return (u, v) in self._set or (v, u) in self._set

    def union(self, other: 'BondSet') -> 'BondSet':
        return BondSet(self._set | other._set)

    def __contains__(self, bond: Any) -> bool:
        return bond in self._set

    def __len__(self) -> int:
        return len(self._bonds)

    def __iter__(self) -> Iterator[Bond]:
        return iter(self._bonds)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BondSet) and self._bonds == other._bonds

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"BondSet({len(self._bonds)} enlaces)"


def box_region(center: Sequence[int], L: int, d: Optional[int] = None) -> Region:
    """
    Caja {center + y : ‖y‖∞ ≤ L}.

    Args:
        center: Centro de la caja
        L: Semilado (L ≥ 0)
        d: Dimensión configurada (opcional, se valida contra el centro)

    Returns:
        Región con (2L+1)^d sitios
    """
    if L < 0:
        raise ValueError(f"El semilado L debe ser no negativo, se recibió {L}")
    c = make_site(center, d)
    ranges = [range(ci - L, ci + L + 1) for ci in c]
    return Region(itertools.product(*ranges), len(c))


def region_from_spec(spec: Mapping[str, Any], d: int) -> Region:
    """
    Construye una región desde un literal de configuración.

    Acepta {'center': [...], 'L': n} o {'sites': [[...], ...]}.
    """
    if 'sites' in spec:
        return Region(spec['sites'], d)
    if 'L' in spec:
        center = spec.get('center', [0] * d)
        return box_region(center, int(spec['L']), d)
    raise ValueError(f"Especificación de región no reconocida: {dict(spec)}")


def cut_set(W: Region, offsets: Optional[Sequence[Sequence[int]]] = None) -> BondSet:
    """
    Conjunto de corte Γ(W): enlaces <u,u'> con u ∈ W, u' ∉ W y T_{u,u'} ≠ 0.

    Args:
        W: Región finita
        offsets: Soporte del hopping (por defecto vecinos próximos)

    Returns:
        BondSet con todos los enlaces orientados de W hacia su complemento
    """
    offs = nearest_neighbor_offsets(W.dim) if offsets is None else [make_site(v, W.dim) for v in offsets]
    bonds = []
    for u in W:
        for v in offs:
            w = tuple(a + b for a, b in zip(u, v))
            if w not in W:
                bonds.append((u, w))
    return BondSet(bonds)


def enlarge(W: Region, offsets: Optional[Sequence[Sequence[int]]] = None) -> Region:
    """W^+ = W ∪ {u' : T_{u,u'} ≠ 0, u ∈ W}."""
    bonds = cut_set(W, offsets)
    return Region(set(W.sites) | set(bonds.heads()), W.dim)


def boundary(omega: Region, offsets: Optional[Sequence[Sequence[int]]] = None) -> List[SitePoint]:
    """Sitios de Ω con algún vecino (según el soporte del hopping) fuera de Ω."""
    return cut_set(omega, offsets).tails()


def dist_omega(omega: Region, x: Sequence[int], y: Sequence[int],
               offsets: Optional[Sequence[Sequence[int]]] = None) -> int:
    """
    Distancia en la que toda la frontera de Ω cuenta como un único punto.

    Returns:
        min{‖x−y‖∞, dist(x,∂Ω) + dist(y,∂Ω)}

    Raises:
        ValueError: Si x o y no pertenecen a Ω
    """
    xs = make_site(x, omega.dim)
    ys = make_site(y, omega.dim)
    for p in (xs, ys):
        if p not in omega:
            raise ValueError(f"El sitio {p} no pertenece a Ω")
    direct = site_distance(xs, ys)
    edge = boundary(omega, offsets)
    if not edge:
        return direct
    bx = min(site_distance(xs, b) for b in edge)
    by = min(site_distance(ys, b) for b in edge)
    return min(direct, bx + by)
