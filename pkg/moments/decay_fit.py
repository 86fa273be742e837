"""
Ajuste de decaimiento exponencial
=================================

Mínimos cuadrados ponderados de ln(media) frente a la distancia ℓ∞.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .estimator import MomentProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecayFit:
    """mean ≈ A·e^{−μ·d} sobre la ventana de distancias."""

    A: float
    mu: float
    r_squared: float
    window: Tuple[float, float]
    points: int

    def predict(self, distance) -> np.ndarray:
        return self.A * np.exp(-self.mu * np.asarray(distance, dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['window'] = list(self.window)
        return data


def _as_frame(profile: Union[MomentProfile, pd.DataFrame]) -> pd.DataFrame:
    if isinstance(profile, MomentProfile):
        return profile.to_frame()
    missing = {'distance', 'mean'} - set(profile.columns)
    if missing:
        raise ValueError(f"Faltan columnas en el perfil: {sorted(missing)}")
    return profile


def decay_fit(profile: Union[MomentProfile, pd.DataFrame],
              window: Optional[Tuple[float, float]] = None) -> DecayFit:
    """
    Ajusta ln(mean) = ln A − μ·d con pesos (stderr/mean)^{−2}.

    Args:
        profile: MomentProfile o tabla con columnas distance, mean y opcionalmente stderr
        window: Rango de distancias (inclusivo); None usa todas

    Returns:
        DecayFit con r² en escala logarítmica

    Raises:
        ValueError: Menos de 3 distancias distintas o media no positiva en la ventana
    """
    frame = _as_frame(profile)
    if window is not None:
        frame = frame[(frame['distance'] >= window[0]) & (frame['distance'] <= window[1])]
    distances = frame['distance'].to_numpy(dtype=float)
    means = frame['mean'].to_numpy(dtype=float)
    if np.unique(distances).size < 3:
        raise ValueError(f"Se necesitan al menos 3 distancias distintas en la ventana {window}")
    bad = np.flatnonzero(means <= 0)
    if bad.size:
        k = bad[0]
        raise ValueError(f"Media no positiva {means[k]} en la distancia {distances[k]:g}")
    y = np.log(means)
    stderr = frame['stderr'].to_numpy(dtype=float) if 'stderr' in frame else np.zeros_like(means)
    # np.polyfit minimiza Σ (w·r)², así que w = 1/σ_log = mean/stderr
    weights = np.ones_like(y) if np.any(stderr <= 0) else means / stderr
    slope, intercept = np.polyfit(distances, y, 1, w=weights)
    w2 = weights ** 2
    fitted = intercept + slope * distances
    y_bar = np.sum(w2 * y) / np.sum(w2)
    ss_tot = float(np.sum(w2 * (y - y_bar) ** 2))
    ss_res = float(np.sum(w2 * (y - fitted) ** 2))
    r_squared = 1.0 if ss_tot <= 1e-28 * max(1.0, float(np.sum(w2))) else 1.0 - ss_res / ss_tot
    r_squared = float(min(1.0, max(0.0, r_squared)))
    span = (float(distances.min()), float(distances.max())) if window is None else (float(window[0]), float(window[1]))
    fit = DecayFit(float(np.exp(intercept)), float(-slope), r_squared, span, int(distances.size))
    logger.debug(f"Ajuste de decaimiento: A={fit.A:.4g}, μ={fit.mu:.4g}, r²={fit.r_squared:.4f}")
    return fit
