"""
Desigualdades estadísticas entre momentos
=========================================

Comprobaciones empíricas de las cotas de resolvente agotado, desacoplado y
completo, de la cota condicional de tipo Wegner y de la cota a priori.
Ambos lados se evalúan sobre las mismas muestras (números aleatorios
comunes) y el error de la diferencia se obtiene por el método delta.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ensemble import OperatorEnsemble, assemble, sample_block, sample_potential
from lattice import Bond, Region, SitePoint, cut_set, enlarge, make_site, site_distance
from regularity import RegularityConstants
from resolvent import GreenSolver, SpectralParameter

from .estimator import MomentEstimate, SampleTable, sample_moments

logger = logging.getLogger(__name__)

ZParam = Union[SpectralParameter, complex, float]


@dataclass(frozen=True)
class InequalityCheck:
    """lhs ≤ rhs + sigmas·stderr, con stderr el error combinado de rhs − lhs."""

    name: str
    lhs: float
    rhs: float
    stderr: float
    passed: bool
    sigmas: float = 3.0
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs + self.sigmas * self.stderr - self.lhs

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'stderr': self.stderr,
            'sigmas': self.sigmas,
            'passed': self.passed,
            'margin': self.margin,
            'details': dict(self.details),
        }


def _delta_stderr(columns: np.ndarray, func: Callable[[np.ndarray], float]) -> float:
    """Error estándar de func(medias) por el método delta con gradiente numérico."""
    n = columns.shape[0]
    if n < 2:
        return 0.0
    means = columns.mean(axis=0)
    cov = np.atleast_2d(np.cov(columns, rowvar=False))
    grad = np.zeros_like(means)
    for j in range(means.size):
        h = 1e-6 * max(abs(means[j]), 1e-12)
        up, down = means.copy(), means.copy()
        up[j] += h
        down[j] -= h
        grad[j] = (func(up) - func(down)) / (2 * h)
    return float(math.sqrt(max(grad @ cov @ grad, 0.0) / n))


def _align(*tables: SampleTable) -> Tuple[np.ndarray, ...]:
    """Restringe las tablas a los índices de muestra presentes en todas."""
    common = tables[0].indices
    for t in tables[1:]:
        common = np.intersect1d(common, t.indices)
    if common.size < 2:
        raise ValueError("Menos de 2 muestras comunes entre las tablas")
    return tuple(t.values[np.isin(t.indices, common)] for t in tables)


def _bonds_in(omega: Region, W: Region, offsets) -> List[Bond]:
    return [b for b in cut_set(W, offsets) if b[1] in omega]


def _weights(ensemble: OperatorEnsemble, bonds: Sequence[Bond], s: float) -> np.ndarray:
    return np.array([ensemble.hopping.tau(tuple(b - a for a, b in zip(u, v))) ** s for u, v in bonds])


def _farthest(region: Region, origin: SitePoint) -> SitePoint:
    return max(region, key=lambda p: (site_distance(p, origin), p))


def _finish(name: str, columns: np.ndarray, lhs_index: int, rhs: Callable[[np.ndarray], float],
            sigmas: float, details: Dict[str, Any]) -> InequalityCheck:
    means = columns.mean(axis=0)
    lhs = float(means[lhs_index])
    rhs_value = float(rhs(means))
    stderr = _delta_stderr(columns, lambda m: rhs(m) - m[lhs_index])
    passed = lhs <= rhs_value + sigmas * stderr
    details = dict(details, n=int(columns.shape[0]))
    logger.info(f"{name}: lhs={lhs:.4g}, rhs={rhs_value:.4g}, stderr={stderr:.2g} -> "
                f"{'cumple' if passed else 'NO cumple'}")
    return InequalityCheck(name, lhs, rhs_value, stderr, bool(passed), sigmas, details)


def depleted_resolvent_check(ensemble: OperatorEnsemble, omega: Region, W: Region, s: float, n: int,
                             z: ZParam, constants: RegularityConstants,
                             x: Optional[Sequence[int]] = None, y: Optional[Sequence[int]] = None,
                             sigmas: float = 3.0, threads: Optional[int] = None) -> InequalityCheck:
    """
    E|G_Ω(x,y)|^s ≤ γ(W)·Σ_{<v,v'>∈Γ(W^+)} |T|^s E|G_{Ω∖W^+}(v',y)|^s,
    γ(W) = (C_s/λ^s)·Σ_{<u,u'>∈Γ(W)} |T|^s E|G_W(x,u)|^s, para x ∈ W, y ∈ Ω∖W^+.
    """
    offsets = ensemble.hopping.support_offsets()
    gamma = _bonds_in(omega, W, offsets)
    w_plus = Region([p for p in enlarge(W, offsets) if p in omega], omega.dim)
    gamma_plus = _bonds_in(omega, w_plus, offsets)
    outer = omega.difference(w_plus)
    if len(outer) == 0:
        raise ValueError("Ω∖W^+ está vacío")
    x = make_site(x, omega.dim) if x is not None else W.sites[len(W) // 2]
    y = make_site(y, omega.dim) if y is not None else _farthest(outer, x)
    if x not in W or y not in outer:
        raise ValueError(f"Se requiere x ∈ W e y ∈ Ω∖W^+, se recibió x={x}, y={y}")
    zp = SpectralParameter.coerce(z)
    full = sample_moments(ensemble, omega, [(x, y)], zp, s, n, threads=threads)
    inner = sample_moments(ensemble, W, [(x, u) for u, _ in gamma], zp, s, n, threads=threads)
    far = sample_moments(ensemble, outer, [(v2, y) for _, v2 in gamma_plus], zp, s, n, threads=threads)
    lhs_col, inner_vals, far_vals = _align(full, inner, far)
    a = inner_vals @ _weights(ensemble, gamma, s)
    b = far_vals @ _weights(ensemble, gamma_plus, s)
    columns = np.column_stack([lhs_col[:, 0], a, b])
    factor = constants.C_s / ensemble.lam ** s
    return _finish('depleted_resolvent', columns, 0, lambda m: factor * m[1] * m[2], sigmas,
                   {'x': list(x), 'y': list(y), 'cut_set': len(gamma), 'cut_set_plus': len(gamma_plus)})


def decoupled_resolvent_check(ensemble: OperatorEnsemble, omega: Region, W: Region, s: float, n: int,
                              z: ZParam, constants: RegularityConstants,
                              x: Optional[Sequence[int]] = None, y: Optional[Sequence[int]] = None,
                              sigmas: float = 3.0, threads: Optional[int] = None) -> InequalityCheck:
    """
    E|G_Ω(x,y)|^s ≤ Σ_{<v,v'>∈Γ(W)} γ_x(v)·|T|^s·E|G_{Ω∖W}(v',y)|^s con
    γ_x(v) = E|G_W(x,v)|^s + (C̃_s/λ^s)·Σ_{<u,u'>∈Γ} |T|^s E|G_W(x,u)|^s.

    Raises:
        RuntimeError: Si las constantes de desacoplamiento no están disponibles
    """
    K = constants.require_decoupling() / ensemble.lam ** s
    offsets = ensemble.hopping.support_offsets()
    gamma = _bonds_in(omega, W, offsets)
    outer = omega.difference(W)
    x = make_site(x, omega.dim) if x is not None else W.sites[len(W) // 2]
    y = make_site(y, omega.dim) if y is not None else _farthest(outer, x)
    if x not in W or y not in outer:
        raise ValueError(f"Se requiere x ∈ W e y ∈ Ω∖W, se recibió x={x}, y={y}")
    zp = SpectralParameter.coerce(z)
    tails = sorted({u for u, _ in gamma})
    heads = sorted({v for _, v in gamma})
    full = sample_moments(ensemble, omega, [(x, y)], zp, s, n, threads=threads)
    inner = sample_moments(ensemble, W, [(x, u) for u in tails], zp, s, n, threads=threads)
    far = sample_moments(ensemble, outer, [(v, y) for v in heads], zp, s, n, threads=threads)
    lhs_col, inner_vals, far_vals = _align(full, inner, far)
    weights = _weights(ensemble, gamma, s)
    tail_pos = {u: k for k, u in enumerate(tails)}
    head_pos = {v: k for k, v in enumerate(heads)}
    a = sum(weights[k] * inner_vals[:, tail_pos[u]] for k, (u, _) in enumerate(gamma))
    columns = np.column_stack([lhs_col[:, 0], a, inner_vals, far_vals])
    off_inner, off_far = 2, 2 + len(tails)

    def rhs(m: np.ndarray) -> float:
        total = 0.0
        for k, (u, v) in enumerate(gamma):
            gamma_x = m[off_inner + tail_pos[u]] + K * m[1]
            total += weights[k] * gamma_x * m[off_far + head_pos[v]]
        return total

    return _finish('decoupled_resolvent', columns, 0, rhs, sigmas,
                   {'x': list(x), 'y': list(y), 'cut_set': len(gamma), 'C_tilde_s': constants.C_tilde_s})


def full_resolvent_check(ensemble: OperatorEnsemble, omega: Region, W: Region, s: float, n: int,
                         z: ZParam, constants: RegularityConstants,
                         u: Optional[Sequence[int]] = None, y: Optional[Sequence[int]] = None,
                         sigmas: float = 3.0, threads: Optional[int] = None) -> InequalityCheck:
    """
    E|G_{Ω∖W}(u,y)|^s ≤ E|G_Ω(u,y)|^s + (C̃_s/λ^s)·Σ_{<v,v'>∈Γ(W)} |T|^s E|G_Ω(v,y)|^s
    para u, y ∈ Ω∖W.
    """
    K = constants.require_decoupling() / ensemble.lam ** s
    offsets = ensemble.hopping.support_offsets()
    gamma = _bonds_in(omega, W, offsets)
    outer = omega.difference(W)
    if len(gamma) == 0:
        raise ValueError("Γ(W) vacío dentro de Ω")
    u = make_site(u, omega.dim) if u is not None else gamma[0][1]
    y = make_site(y, omega.dim) if y is not None else _farthest(outer, u)
    if u not in outer or y not in outer:
        raise ValueError(f"Se requiere u, y ∈ Ω∖W, se recibió u={u}, y={y}")
    zp = SpectralParameter.coerce(z)
    tails = sorted({v for v, _ in gamma})
    depleted = sample_moments(ensemble, outer, [(u, y)], zp, s, n, threads=threads)
    full = sample_moments(ensemble, omega, [(u, y)] + [(v, y) for v in tails], zp, s, n, threads=threads)
    lhs_col, full_vals = _align(depleted, full)
    weights = _weights(ensemble, gamma, s)
    tail_pos = {v: k for k, v in enumerate(tails)}
    boundary_sum = sum(weights[k] * full_vals[:, 1 + tail_pos[v]] for k, (v, _) in enumerate(gamma))
    columns = np.column_stack([lhs_col[:, 0], full_vals[:, 0], boundary_sum])
    return _finish('full_resolvent', columns, 0, lambda m: m[1] + K * m[2], sigmas,
                   {'u': list(u), 'y': list(y), 'cut_set': len(gamma), 'C_tilde_s': constants.C_tilde_s})


def conditional_wegner_check(ensemble: OperatorEnsemble, N: int, s: float, n_resamples: int, n_envs: int,
                             constants: RegularityConstants, z: ZParam = 0.0,
                             u: Optional[Sequence[int]] = None, v: Optional[Sequence[int]] = None,
                             sigmas: float = 3.0) -> InequalityCheck:
    """
    Cota condicional E(|G(u,v;z)|^s | resto) ≤ C_s/λ^s.

    Para cada entorno congelado (muestra e del flujo 0) se remuestrean
    solo V(u) y V(v) desde el flujo 1 y se usa la reducción 2×2 de Krein
    sobre Ĥ (H con V(u) = V(v) = 0).

    Returns:
        InequalityCheck del entorno más desfavorable; passed exige todos los entornos
    """
    if N < 2:
        raise ValueError(f"La cadena necesita al menos 2 sitios, se recibió N={N}")
    d = ensemble.dim
    chain = Region([(i,) + (0,) * (d - 1) for i in range(N)], d)
    u = make_site(u, d) if u is not None else chain.sites[N // 2 - 1]
    v = make_site(v, d) if v is not None else chain.sites[min(N - 1, N // 2 + 1)]
    if u == v:
        raise ValueError("Los sitios u y v deben ser distintos")
    pair_region = Region([u, v], d)
    zp = SpectralParameter.coerce(z)
    rhs = constants.a_priori_bound(ensemble.lam)
    i_u, i_v = chain.index(u), chain.index(v)
    worst: Optional[Tuple[float, float, int]] = None
    failures = 0
    for env in range(n_envs):
        hat = sample_potential(ensemble, chain, env).with_values({u: 0.0, v: 0.0})
        solver = GreenSolver(assemble(ensemble, hat), zp)
        col_u, col_v = solver.column(u), solver.column(v)
        block = np.array([[col_u[i_u], col_v[i_u]], [col_u[i_v], col_v[i_v]]], dtype=complex)
        inv = np.linalg.inv(block)
        draws = sample_block(ensemble, pair_region, range(env * n_resamples, (env + 1) * n_resamples), stream=1)
        vals_u = draws[:, pair_region.index(u)]
        vals_v = draws[:, pair_region.index(v)]
        m11 = inv[0, 0] + ensemble.lam * vals_u
        m22 = inv[1, 1] + ensemble.lam * vals_v
        det = m11 * m22 - inv[0, 1] * inv[1, 0]
        g = np.abs(-inv[0, 1] / det) ** s
        mean = float(np.mean(g))
        stderr = float(np.std(g, ddof=1) / math.sqrt(g.size))
        if mean > rhs + sigmas * stderr:
            failures += 1
        if worst is None or mean - sigmas * stderr > worst[0] - sigmas * worst[1]:
            worst = (mean, stderr, env)
        logger.debug(f"Entorno {env}: media condicional {mean:.4g} ± {stderr:.2g}")
    mean, stderr, env = worst
    passed = failures == 0
    logger.info(f"Cota condicional: peor entorno {env} con {mean:.4g} ± {stderr:.2g} frente a {rhs:.4g}")
    return InequalityCheck('conditional_wegner', mean, rhs, stderr, passed, sigmas,
                           {'worst_environment': env, 'failures': failures, 'environments': n_envs,
                            'resamples': n_resamples, 'u': list(u), 'v': list(v)})


def apriori_check(estimates: Sequence[MomentEstimate], constants: RegularityConstants, lam: float,
                  sigmas: float = 3.0) -> InequalityCheck:
    """Cada media estimada ≤ C_s/λ^s + sigmas·stderr."""
    if not estimates:
        raise ValueError("No hay estimaciones que comprobar")
    rhs = constants.a_priori_bound(lam)
    worst = max(estimates, key=lambda e: e.mean - sigmas * e.stderr)
    passed = all(e.mean <= rhs + sigmas * e.stderr for e in estimates)
    return InequalityCheck('a_priori', worst.mean, rhs, worst.stderr, passed, sigmas,
                           {'checked': len(estimates), 'x': list(worst.x), 'y': list(worst.y)})
