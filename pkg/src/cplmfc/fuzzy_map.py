"""Normalized peak and settling times of the CPLM as functions of (b, c).

Times are expressed for a unit natural frequency. Three routes are offered:

* ``lookup_times_fsm`` -- nearest-corner table lookup,
* ``lookup_times_fis`` -- a product t-norm TSK system of fuzzy basis functions
  with closed n-logistic membership functions,
* ``derive_normalized_times`` -- direct analysis of the closed-form response,
  used both to fill the interior rules of the FIS and to regenerate the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .nlsig import nlsig
from .ref_model import DEFAULT_ZETA

# (b, c) -> (x_pk, x_s)
CORNER_TIMES = {
    (0, 0): (4.43, 9.98),
    (1, 0): (2.20, 7.74),
    (0, 1): (5.5, 11.07),
    (1, 1): (5.5, 11.07),
}

# membership widths for the peak-time and settling-time universes; kept for reference, the default grid derives its own
TABLE_WIDTH_PEAK = 0.01
TABLE_WIDTH_SETTLING = 2.22


@dataclass(frozen=True)
class NormalizedTimes:
    x_pk: float
    x_s: float


def _check_weight(name, v):
    if not (math.isfinite(v) and 0.0 <= v <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {v}")


def lookup_times_fsm(b: float, c: float) -> NormalizedTimes:
    """Corner value of the nearest table entry; ties go to ``b=1, c=0``."""
    _check_weight("b", b)
    _check_weight("c", c)
    bc = 1 if b >= 0.5 else 0
    cc = 1 if c > 0.5 else 0
    return NormalizedTimes(*CORNER_TIMES[(bc, cc)])


def _response_coeffs(b, c, zeta):
    """Coefficients of ``y_m - 1 = exp(-zeta t) (p cos(wd t) + q sin(wd t))`` for wn = 1."""
    wd = math.sqrt(1.0 - zeta * zeta)
    p = c - 1.0
    q = (2.0 * b - c - 1.0) * zeta / wd
    return p, q, wd


def derive_normalized_times(b: float, c: float, zeta: float = DEFAULT_ZETA) -> NormalizedTimes:
    """Peak and settling instants of the unit-frequency step response.

    The deviation ``y_m - 1`` is a decaying sinusoid, so it alternates between
    lobes of constant sign, each ``pi / wd`` long. ``x_pk`` is the maximum of the
    first lobe above the setpoint. ``x_s`` is the mid-point of the undershoot
    lobe that follows it.

    At ``b = c = 1`` the model is the identity and has no lobes. The value there
    is taken as the limit ``b -> 1-`` along the ``c = 1`` edge.
    """
    _check_weight("b", b)
    _check_weight("c", c)
    if not 0 < zeta < 1:
        raise DomainError(f"zeta must lie in (0, 1), got {zeta}")
    p, q, wd = _response_coeffs(b, c, zeta)
    if math.hypot(p, q) < 1e-12:
        p, q, wd = _response_coeffs(1.0 - 1e-6, c, zeta)

    def dev(t):
        return math.exp(-zeta * t) * (p * math.cos(wd * t) + q * math.sin(wd * t))

    def slope(t):
        # d/dt of dev
        return math.exp(-zeta * t) * (
            (q * wd - zeta * p) * math.cos(wd * t) - (p * wd + zeta * q) * math.sin(wd * t)
        )

    half = math.pi / wd
    # zero crossings of dev, located on a grid then polished
    grid = np.linspace(0.0, 6.0 * half, 4001)
    vals = np.array([dev(t) for t in grid])
    crossings = []
    for i in range(1, grid.size):
        if vals[i - 1] == 0.0:
            continue
        if vals[i - 1] * vals[i] < 0:
            crossings.append(brentq(dev, grid[i - 1], grid[i], xtol=1e-13))
    if grid[0] == 0.0 and vals[0] == 0.0:
        crossings.insert(0, 0.0)
    starts = [0.0] + crossings
    # first lobe where the response is above the setpoint
    for k in range(len(starts) - 2):
        lo, hi = starts[k], starts[k + 1]
        if dev(0.5 * (lo + hi)) > 0:
            break
    else:  # pragma: no cover - a decaying sinusoid always has such a lobe
        raise DomainError("no overshoot lobe found")
    x_pk = brentq(slope, lo + 1e-12, hi - 1e-12, xtol=1e-13)
    u_lo, u_hi = starts[k + 1], starts[k + 2]
    return NormalizedTimes(x_pk, 0.5 * (u_lo + u_hi))


@dataclass(frozen=True)
class FisConfig:
    """Rule grid and consequents of the TSK system.

    ``width`` is the membership transition width on both input universes.
    Consequents are arrays indexed ``[i_b, i_c]``.
    """

    centers: tuple
    width: float
    pk_consequents: np.ndarray = field(repr=False)
    s_consequents: np.ndarray = field(repr=False)
    output_modes: tuple = ("singleton", "non-singleton")
    pk_universe: tuple = (2.0, 6.0)
    s_universe: tuple = (0.0, 20.0)

    def __post_init__(self):
        m = len(self.centers)
        if self.pk_consequents.shape != (m, m) or self.s_consequents.shape != (m, m):
            raise DomainError("consequent arrays must match the rule grid")
        if not all(0.0 <= v <= 1.0 for v in self.centers):
            raise DomainError("membership centers must lie in [0, 1]")
        for arr, (lo, hi) in ((self.pk_consequents, self.pk_universe), (self.s_consequents, self.s_universe)):
            if np.any(arr < lo) or np.any(arr > hi):
                raise DomainError("consequent outside its output universe")
        if not self.width >= 0:
            raise DomainError("membership width must be non-negative")

    @property
    def rule_count(self) -> int:
        return len(self.centers) ** 2


@lru_cache(maxsize=4)
def default_fis_config(resolution: int = 11, zeta: float = DEFAULT_ZETA) -> FisConfig:
    """Uniform ``resolution x resolution`` grid; corners from the table, interior from the oracle.

    Interior consequents are clipped to the corner range so the interpolant never
    leaves the envelope of the tabulated values.
    """
    centers = tuple(np.linspace(0.0, 1.0, resolution))
    pk = np.empty((resolution, resolution))
    s = np.empty((resolution, resolution))
    corner_pk = [v[0] for v in CORNER_TIMES.values()]
    corner_s = [v[1] for v in CORNER_TIMES.values()]
    last = resolution - 1
    for i, b in enumerate(centers):
        for j, c in enumerate(centers):
            if i in (0, last) and j in (0, last):
                pk[i, j], s[i, j] = CORNER_TIMES[(i // last, j // last)]
                continue
            t = derive_normalized_times(b, c, zeta)
            pk[i, j] = min(max(t.x_pk, min(corner_pk)), max(corner_pk))
            s[i, j] = min(max(t.x_s, min(corner_s)), max(corner_s))
    width = 0.5 * (centers[1] - centers[0])
    return FisConfig(centers, width, pk, s)


def membership(x: float, center: float, width: float) -> float:
    """Closed logistic bump: rising on ``[center-width, center]``, falling on ``[center, center+width]``."""
    if width == 0.0:
        return 1.0 if x == center else 0.0
    if x < center:
        return nlsig(x, center, center - width, 1.0, 0.0, 1, 6.0, 0)
    return nlsig(x, center + width, center, 1.0, 0.0, 1, 6.0, 1)


def lookup_times_fis(b: float, c: float, cfg: FisConfig | None = None) -> NormalizedTimes:
    """Fuzzy-basis-function expansion ``sum_l y_l * phi_l(b, c)`` with product t-norm."""
    _check_weight("b", b)
    _check_weight("c", c)
    if cfg is None:
        cfg = default_fis_config()
    mu_b = np.array([membership(b, cc, cfg.width) for cc in cfg.centers])
    mu_c = np.array([membership(c, cc, cfg.width) for cc in cfg.centers])
    firing = np.outer(mu_b, mu_c)
    total = firing.sum()
    assert total > 0.0, "degenerate membership: no rule fires"
    phi = firing / total
    return NormalizedTimes(float(np.sum(phi * cfg.pk_consequents)), float(np.sum(phi * cfg.s_consequents)))
