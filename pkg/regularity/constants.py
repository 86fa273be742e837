"""
Constantes de regularidad
=========================

Estimaciones numéricas de κ_τ, C_s, D_s(ρ) y C̃_s = C_s·D_s², la cota a
priori de momentos fraccionarios y la interpolación de exponentes.

Las constantes de tipo supremo se obtienen por búsqueda multiarranque con
refinamiento por coordenadas y se informan como cotas inferiores.
"""

import hashlib
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ensemble import DisorderDistribution

from .config_regularity import load_config
from .quadrature import RegularityError, density_function, gamma_s, phi_s, psi_s, singular_integral

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegularityConstants:
    """
    Constantes consumidas por los criterios.

    C_s y D_s son cotas inferiores estocásticas salvo que provengan del
    usuario (provenance['kind'] == 'user_supplied').
    """

    tau: float
    s: float
    kappa_tau: float
    C_s: float
    D_s: Optional[float]
    provenance: Dict[str, Any] = field(default_factory=lambda: {'kind': 'user_supplied'})

    def __post_init__(self):
        if not 0 < self.s < self.tau:
            raise ValueError(f"Se requiere 0 < s < τ, se recibió s={self.s}, τ={self.tau}")

    @property
    def C_tilde_s(self) -> Optional[float]:
        if self.D_s is None:
            return None
        return self.C_s * self.D_s ** 2

    @property
    def certified(self) -> bool:
        return self.provenance.get('kind') == 'user_supplied'

    @property
    def lower_bound(self) -> bool:
        return not self.certified

    @property
    def decoupling_available(self) -> bool:
        return self.D_s is not None and math.isfinite(self.D_s)

    @property
    def decoupling_band(self) -> bool:
        """s < τ/4: zona donde la condición suficiente de desacoplamiento está demostrada."""
        return self.s < self.tau / 4

    def a_priori_bound(self, lam: float) -> float:
        """Cota E|G|^s ≤ C_s/λ^s."""
        return self.C_s / lam ** self.s

    def require_decoupling(self) -> float:
        if not self.decoupling_available:
            raise RuntimeError("Constantes de desacoplamiento no disponibles (D_s indefinida o infinita)")
        return float(self.C_tilde_s)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tau': self.tau,
            's': self.s,
            'kappa_tau': self.kappa_tau,
            'C_s': self.C_s,
            'D_s': self.D_s,
            'C_tilde_s': self.C_tilde_s,
            'provenance': dict(self.provenance),
            'certified': self.certified,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RegularityConstants':
        return cls(
            tau=float(data['tau']),
            s=float(data['s']),
            kappa_tau=float(data['kappa_tau']),
            C_s=float(data['C_s']),
            D_s=None if data.get('D_s') is None else float(data['D_s']),
            provenance=dict(data.get('provenance', {'kind': 'user_supplied'})),
        )

    def fingerprint(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha1(payload.encode('utf-8')).hexdigest()[:16]


@dataclass(frozen=True)
class FracmomBound:
    """Cota a priori (τ/(τ−s))·K bajo las dos lecturas del agrupamiento de exponentes."""

    prefactor: float
    grouped: float
    split: float

    @property
    def value(self) -> float:
        return self.prefactor * max(self.grouped, self.split)


def fracmom_bound(s: float, tau: float, kappa_tau: float, lam: float,
                  diagonal: bool = False) -> FracmomBound:
    """
    Cota de E(|G(x,y)|^s) a partir de R1(τ).

    Lecturas: ((4κ_τ)/λ^s)^{s/τ} y (4κ_τ)^{s/τ}/λ^s; se usa la mayor.
    Para x = y el factor 4 se reduce a 1.
    """
    if not 0 < s < tau:
        raise ValueError(f"Se requiere 0 < s < τ, se recibió s={s}, τ={tau}")
    factor = (1.0 if diagonal else 4.0) * kappa_tau
    grouped = (factor / lam ** s) ** (s / tau)
    split = factor ** (s / tau) / lam ** s
    return FracmomBound(tau / (tau - s), grouped, split)


def interpolate_exponent(A_s: float, mu_s: float, s: float, r: float, tau: float,
                         kappa_tau: float, lam: float) -> Tuple[float, float]:
    """
    Traslada una cota A_s e^{−μ_s|x−y|} del exponente s al exponente r.

    Returns:
        (A_r, μ_r)

    Raises:
        ValueError: Si r no está en (0, τ)
    """
    if not 0 < r < tau:
        raise ValueError(f"Se requiere 0 < r < τ, se recibió r={r}, τ={tau}")
    if r <= s:
        return A_s ** (r / s), mu_s * r / s
    t = 0.5 * (r + tau)
    moment_t = fracmom_bound(t, tau, kappa_tau, lam).value
    weight = (t - r) / (t - s)
    A_r = A_s ** weight * moment_t ** ((r - s) / (t - s))
    return A_r, mu_s * weight


def kappa_tau(dist: DisorderDistribution, tau: float, tolerance: Optional[float] = None) -> float:
    """
    sup_{a,ε} ρ(a−ε, a+ε)/ε^τ.

    Forma cerrada (2/(b−a))^τ para la uniforme; rejilla refinada hasta
    estabilidad relativa para las demás leyes.

    Raises:
        RegularityError: Si el supremo diverge al refinar (la ley no cumple R1(τ))
    """
    if not 0 < tau <= 1:
        raise ValueError(f"τ debe estar en (0,1], se recibió {tau}")
    if dist.kind == 'uniform':
        return (2.0 / (dist.high - dist.low)) ** tau
    tol = tolerance if tolerance is not None else load_config()['kappa_tolerance']
    lo, hi = dist.integration_support()
    width = float(dist.law.ppf(0.99) - dist.law.ppf(0.01))
    n_a, eps_min = 201, 1e-3 * width
    previous, growth_rounds = None, 0
    for round_ in range(6):
        quantiles = dist.law.ppf(np.linspace(1e-3, 1 - 1e-3, n_a))
        centers = np.unique(np.concatenate([quantiles, dist.breakpoints(), [lo, hi]]))
        centers = centers[np.isfinite(centers)]
        eps = np.geomspace(eps_min, 2 * width, 200)
        ratio = dist.interval_mass(centers[:, None], eps[None, :]) / eps[None, :] ** tau
        k = np.unravel_index(np.argmax(ratio), ratio.shape)
        value = float(ratio[k])
        at_floor = k[1] == 0
        logger.debug(f"κ_τ ronda {round_}: {value:.6g} en a={centers[k[0]]:.4g}, ε={eps[k[1]]:.3g}")
        if previous is not None:
            change = (value - previous) / previous
            if at_floor and change > 0.1:
                growth_rounds += 1
                if growth_rounds >= 2:
                    raise RegularityError(
                        f"κ_τ diverge al refinar: la ley no cumple R1({tau})",
                        witness={'a': float(centers[k[0]]), 'eps': float(eps[k[1]])})
            elif abs(change) < tol:
                return max(value, previous)
        previous = value
        n_a, eps_min = 2 * n_a - 1, eps_min / 100
    return previous


def _candidate_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _coordinate_search(objective: Callable[[np.ndarray], float], start: np.ndarray, step: float,
                       steps: int, project: Callable[[np.ndarray], np.ndarray] = lambda p: p) -> float:
    """Búsqueda por coordenadas con reducción del paso a la mitad."""
    point = project(np.asarray(start, dtype=float))
    best = objective(point)
    for _ in range(steps):
        improved = False
        for i in range(point.size):
            for direction in (1.0, -1.0):
                trial = point.copy()
                trial[i] += direction * step
                trial = project(trial)
                value = objective(trial)
                if value > best:
                    best, point, improved = value, trial, True
                    break
        if not improved:
            step *= 0.5
    return best


def _evaluate_all(objective: Callable[[np.ndarray], float], points: Sequence[np.ndarray],
                  threads: int) -> List[float]:
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(objective, points))


def two_by_two_average(dist: DisorderDistribution, params: np.ndarray, s: float,
                       tol: float = 1e-6) -> float:
    """
    max_{ij} ∫∫ |[(A + diag(u,v))^{-1}]_{ij}|^s ρ(du)ρ(dv) para A = [[a, c], [c, b]].

    Con det = (b+v)(u − u₀), u₀ = c²/(b+v) − a, las entradas son
    1/(u−u₀), −c/((b+v)(u−u₀)) y (a+u)/((b+v)(u−u₀)).
    """
    a, b, c = (float(p) for p in params)
    lo, hi = dist.integration_support()
    density = density_function(dist)
    breaks = list(dist.breakpoints())

    def pole(v: float) -> Optional[float]:
        beta = b + v
        if c == 0.0:
            return -a
        if beta == 0.0:
            return None
        return c * c / beta - a

    def inner(v: float, extra: Sequence[Tuple[float, float]]) -> float:
        u0 = pole(v)
        if u0 is None:
            return 0.0
        return singular_integral(density, lo, hi, [(u0, -s)] + list(extra), breaks, tol)

    # valores de v donde el polo u₀(v) cruza un punto de ruptura de la densidad
    crossings = [] if c == 0.0 else [c * c / (p + a) - b for p in breaks if p + a != 0.0]
    outer_breaks = breaks + [v for v in crossings if lo < v < hi]

    def outer(func, weight_exponent: float) -> float:
        singular = [(-b, weight_exponent)] if weight_exponent else []
        return singular_integral(lambda v: density(v) * func(v), lo, hi, singular, outer_breaks, tol)

    e11 = outer(lambda v: inner(v, ()), 0.0)
    e22 = outer(lambda v: inner(v, [(-a, s)]), -s)
    e12 = 0.0 if c == 0.0 else abs(c) ** s * outer(lambda v: inner(v, ()), -s)
    return max(e11, e12, e22)


def constant_Cs(dist: DisorderDistribution, s: float, effort: Optional[int] = None,
                seed: Optional[int] = None, config: Optional[Dict[str, Any]] = None) -> float:
    """
    Estimación (cota inferior) de C_s.

    Args:
        dist: Ley del desorden
        s: Exponente, 0 < s < τ
        effort: Número de candidatos aleatorios
        seed: Semilla de la búsqueda

    Returns:
        Máximo encontrado; no decrece al aumentar effort
    """
    config = config or load_config()
    effort = effort if effort is not None else config['effort']
    seed = seed if seed is not None else config['search_seed']
    if not 0 < s < dist.tau:
        raise ValueError(f"Se requiere 0 < s < τ={dist.tau}, se recibió {s}")
    tol = config['quad_tolerance']
    lo, hi = dist.integration_support()
    width = hi - lo if dist.bounded_support else float(dist.law.ppf(0.75) - dist.law.ppf(0.25))

    def objective(p: np.ndarray) -> float:
        return two_by_two_average(dist, p, s, tol)

    candidates = [np.zeros(3)]
    for k in range(1, max(1, effort)):
        rng = _candidate_rng(seed, k)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        candidates.append(direction * width * 10 ** rng.uniform(-2.0, 1.0))
    logger.info(f"Estimando C_s (s={s}) con {len(candidates)} candidatos")
    values = _evaluate_all(objective, candidates, config['threads'])
    best = max(values)
    n_refine = max(1, effort // 8)
    for k in range(min(n_refine, len(candidates))):
        step = 0.25 * max(float(np.linalg.norm(candidates[k])), 0.1 * width)
        best = max(best, _coordinate_search(objective, candidates[k], step, config['refinement_steps']))
    logger.info(f"C_s estimada: {best:.6g} (cota inferior)")
    return float(best)


def _mobius(xi: complex, center: float, radius: float) -> complex:
    """Disco unidad → semiplano superior cerrado, escalado al soporte."""
    return center + radius * 1j * (1 + xi) / (1 - xi)


def _project_disk(p: np.ndarray) -> np.ndarray:
    q = p.copy()
    for i in range(0, q.size, 2):
        r = math.hypot(q[i], q[i + 1])
        if r > 1 - 1e-9:
            q[i:i + 2] *= (1 - 1e-9) / r
    return q


def decoupling_ratio(dist: DisorderDistribution, z: complex, w: complex, zeta: complex,
                     s: float, tol: float = 1e-6) -> float:
    """γ_s(z,w,ζ)/(φ_s(ζ)·ψ_s(z,w))."""
    numerator = gamma_s(dist, z, w, zeta, s, tol)
    if math.isinf(numerator):
        return math.inf
    return numerator / (phi_s(dist, zeta, s, tol) * psi_s(dist, z, w, s, tol))


def constant_Ds(dist: DisorderDistribution, s: float, effort: Optional[int] = None,
                seed: Optional[int] = None, config: Optional[Dict[str, Any]] = None) -> float:
    """
    Estimación (cota inferior) de la constante de desacoplamiento D_s(ρ).

    Raises:
        RegularityError: Si la ley no tiene soporte acotado
    """
    if not dist.bounded_support:
        raise RegularityError("D_s requiere soporte acotado: la condición suficiente de desacoplamiento "
                              "no se aplica a leyes de cola pesada como Cauchy",
                              witness={'kind': dist.kind})
    if s <= 0:
        raise ValueError(f"s debe ser positivo, se recibió {s}")
    config = config or load_config()
    effort = effort if effort is not None else config['effort']
    seed = seed if seed is not None else config['search_seed']
    tol = config['quad_tolerance']
    lo, hi = dist.support()
    center, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)

    def unpack(p: np.ndarray) -> Tuple[complex, complex, complex]:
        return tuple(_mobius(complex(p[i], p[i + 1]), center, radius) for i in (0, 2, 4))

    def objective(p: np.ndarray) -> float:
        return decoupling_ratio(dist, *unpack(p), s, tol)

    # Arranques estructurados: z = w = ζ (cociente 1) y w = ζ reales con z lejano
    structured = [(center + 1j * radius,) * 3]
    far = center + 1e3j * radius
    for t in np.linspace(lo, hi, 5):
        structured.append((far, complex(t), complex(t)))
    values = [decoupling_ratio(dist, z, w, zeta, s, tol) for z, w, zeta in structured]
    candidates = []
    for k in range(max(1, effort)):
        rng = _candidate_rng(seed, k)
        radii = np.sqrt(rng.uniform(0.0, 1.0, size=3)) * (1 - 1e-6)
        angles = rng.uniform(0.0, 2 * math.pi, size=3)
        candidates.append(np.ravel(np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])))
    logger.info(f"Estimando D_s (s={s}) con {len(structured) + len(candidates)} candidatos")
    values += _evaluate_all(objective, candidates, config['threads'])
    best = max(values)
    if math.isinf(best):
        logger.warning(f"D_s infinita para s={s}: γ_s diverge con w = ζ real (2s ≥ τ)")
        return math.inf
    for k in range(min(max(1, effort // 8), len(candidates))):
        best = max(best, _coordinate_search(objective, candidates[k], 0.1, config['refinement_steps'],
                                            _project_disk))
    logger.info(f"D_s estimada: {best:.6g} (cota inferior)")
    return float(best)


def estimate_constants(dist: DisorderDistribution, s: Optional[float] = None,
                       effort: Optional[int] = None, seed: Optional[int] = None,
                       config: Optional[Dict[str, Any]] = None) -> RegularityConstants:
    """
    Calcula κ_τ, C_s y D_s para la ley dada.

    Args:
        dist: Ley del desorden
        s: Exponente (por defecto τ/2)

    Returns:
        RegularityConstants con procedencia 'estimated'
    """
    config = config or load_config()
    s = dist.tau / 2 if s is None else s
    effort = effort if effort is not None else config['effort']
    seed = seed if seed is not None else config['search_seed']
    kappa = kappa_tau(dist, dist.tau, config['kappa_tolerance'])
    C_s = constant_Cs(dist, s, effort, seed, config)
    D_s: Optional[float] = None
    if dist.bounded_support:
        D_s = constant_Ds(dist, s, effort, seed, config)
    else:
        logger.warning("Ley sin soporte acotado: constantes de desacoplamiento no disponibles")
    provenance = {'kind': 'estimated', 'seed': seed, 'effort': effort, 'distribution': dist.fingerprint()}
    return RegularityConstants(dist.tau, s, kappa, C_s, D_s, provenance)


def user_supplied_constants(tau: float, s: float, kappa: float, C_s: float,
                            D_s: Optional[float] = None) -> RegularityConstants:
    """Constantes rigurosas aportadas por el usuario (etiqueta 'certified')."""
    return RegularityConstants(tau, s, kappa, C_s, D_s, {'kind': 'user_supplied'})
