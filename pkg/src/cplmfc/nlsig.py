"""n-logistic sigmoid: a staircase of ``n`` logistic segments between two bounds.

``nlsig(x, x_max, x_min, y_max, y_min, n, lam, xi)`` rises from ``y_min`` to
``y_max`` over ``[x_min, x_max]`` when ``xi == 0`` and falls between the same
bounds when ``xi == 1``. Outside the interval it saturates asymptotically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

DEFAULT_LAMBDA = 6.0
# exp() argument bound; the logistic is saturated to machine precision past it
_EXP_CLAMP = 50.0


@dataclass(frozen=True)
class NlsigParams:
    x_max: float
    x_min: float
    y_max: float
    y_min: float
    n: int = 1
    lam: float = DEFAULT_LAMBDA
    xi: int = 0

    def __post_init__(self):
        vals = (self.x_max, self.x_min, self.y_max, self.y_min, self.lam)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError(f"non-finite nlsig parameter in {self}")
        if not self.x_max > self.x_min:
            raise ParameterError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"segment count n must be a positive integer, got {self.n}")
        if not self.lam > 0:
            raise ParameterError(f"steepness lambda must be positive, got {self.lam}")
        if self.xi not in (0, 1):
            raise ParameterError(f"xi must be 0 (increasing) or 1 (decreasing), got {self.xi}")

    @property
    def knots_x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, int(self.n) + 1)

    @property
    def knots_y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, int(self.n) + 1)

    @property
    def centers(self) -> np.ndarray:
        kx = self.knots_x
        return 0.5 * (kx[1:] + kx[:-1])

    @property
    def slope(self) -> float:
        """Logistic rate ``2*lam / dx`` shared by all segments."""
        return 2.0 * self.lam * self.n / (self.x_max - self.x_min)


def nlsig_eval(x, p: NlsigParams):
    """Evaluate the sigmoid for scalar or array ``x``."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ParameterError("nlsig input must be finite")
    ky = p.knots_y
    dy = np.diff(ky)
    sign = 1.0 if p.xi == 1 else -1.0
    arg = sign * p.slope * (xa[..., None] - p.centers)
    np.clip(arg, -_EXP_CLAMP, _EXP_CLAMP, out=arg)
    y = ky[0] + np.sum(dy / (1.0 + np.exp(arg)), axis=-1)
    if np.ndim(x) == 0:
        return float(y)
    return y


def nlsig(x, x_max, x_min, y_max, y_min, n=1, lam=DEFAULT_LAMBDA, xi=0):
    """Positional-argument form matching the usual ``nlsig(x; ...)`` call order."""
    return nlsig_eval(x, NlsigParams(x_max, x_min, y_max, y_min, n, lam, xi))
