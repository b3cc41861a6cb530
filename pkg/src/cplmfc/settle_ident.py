"""Closed-loop settling-time identification.

The plant is closed with the probe law ``u = (u_max/y_max) e - k_s dy/dt``
around the reference ``k y_max``. The run stops once a trailing-window
steady-state detector fires. If the logged response is oscillatory the probe
is repeated once with output-rate damping (``k_s = 1``). The dead samples
and the settling sample are then read off the trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IdentificationError, ParameterError, SafetyAbort


@dataclass(frozen=True)
class IdentConfig:
    tau: float
    u_max: float
    y_max: float
    k: float = 1.0
    k_s: int = 0
    max_samples: int = 10_000
    t_window: float = 0.0
    band: float = 0.01
    # fraction of k*y_max that counts as the plant leaving rest
    response_threshold: float = 1e-4
    tau_c: float = 0.0
    tau_y: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ParameterError("sampling time must be positive")
        if not (self.u_max > 0 and self.y_max > 0):
            raise ParameterError("u_max and y_max must be positive")
        if not 0.5 <= self.k <= 1.0:
            raise ParameterError(f"excitation fraction k must lie in [0.5, 1], got {self.k}")
        if self.k_s not in (0, 1):
            raise ParameterError("k_s is a 0/1 flag")
        if self.max_samples < 2:
            raise ParameterError("max_samples must be at least 2")

    @property
    def probe_gain(self) -> float:
        """Inverse steady-state constant ``u_max / y_max``."""
        return self.u_max / self.y_max

    @property
    def window(self) -> int:
        return max(20, int(round(self.t_window / self.tau)))


@dataclass(frozen=True)
class IdentResult:
    N_ts: int
    N_tau_l: int
    t_s: float
    tau_l: float
    oscillatory: bool
    trace: tuple = field(repr=False)
    inputs: tuple = field(repr=False, default=())
    tau: float = 0.0


def compute_times(N_ts: int, N_tau_l: int, tau: float, tau_c: float = 0.0, tau_y: float = 0.0):
    """Settling time and total delay from sample counts."""
    if not N_ts > N_tau_l:
        raise DomainError(f"settling sample ({N_ts}) must follow the delay horizon ({N_tau_l})")
    if N_tau_l < 0:
        raise DomainError("delay horizon must be non-negative")
    return tau * (N_ts - N_tau_l), tau * N_tau_l + tau_c + tau_y


def steady(window: np.ndarray, tau: float) -> bool:
    """Trailing-window steady-state test: range under 1% and drift under 0.1% of the mean."""
    mean = float(np.mean(window))
    scale = abs(mean)
    if scale == 0.0:
        return False
    if np.ptp(window) >= 0.01 * scale:
        return False
    n = window.size
    t = np.arange(n) * tau
    slope = np.polyfit(t, window, 1)[0]
    return abs(slope) * n * tau < 0.001 * scale


def is_oscillatory(y: np.ndarray, band: float = 0.01) -> bool:
    """More than three output-rate reversals after the first peak, counting only
    reversals whose extremum lies outside the final-value band."""
    if y.size < 3:
        return False
    final = float(np.mean(y[-max(5, y.size // 20):]))
    tol = band * max(abs(final), 1e-12)
    dy = np.diff(y)
    s = np.sign(dy)
    nz = np.nonzero(s)[0]
    if nz.size < 2:
        return False
    # extrema: indices where the (nonzero) rate changes sign
    extrema = [nz[j + 1] for j in range(nz.size - 1) if s[nz[j]] != s[nz[j + 1]]]
    if not extrema:
        return False
    after_peak = extrema[1:]
    big = [i for i in after_peak if abs(y[i] - final) > tol]
    return len(big) > 3


def _probe(plant, cfg: IdentConfig, k_s: int):
    plant.reset()
    ref = cfg.k * cfg.y_max
    g = cfg.probe_gain
    W = cfg.window
    ys = []
    us = []
    y_prev = plant.output
    for n in range(cfg.max_samples):
        y = plant.output
        if abs(y) > 2.0 * cfg.y_max:
            raise SafetyAbort(f"output {y:g} exceeded 2*y_max at sample {n}", trace=tuple(ys))
        ydot = (y - y_prev) / cfg.tau if n else 0.0
        u = g * (ref - y) - k_s * ydot
        u = min(max(u, -cfg.u_max), cfg.u_max)
        ys.append(y)
        us.append(u)
        if len(ys) >= 2 * W and steady(np.asarray(ys[-W:]), cfg.tau):
            return np.asarray(ys), np.asarray(us), True
        plant.step(u)
        y_prev = y
    return np.asarray(ys), np.asarray(us), False


def _settling_sample(y: np.ndarray, band: float) -> int:
    final = float(np.mean(y[-20:]))
    tol = band * abs(final)
    outside = np.nonzero(np.abs(y - final) > tol)[0]
    return int(outside[-1] + 1) if outside.size else 0


def _delay_horizon(y: np.ndarray, threshold: float) -> int:
    moved = np.nonzero(np.abs(y - y[0]) > threshold)[0]
    if moved.size == 0:
        raise IdentificationError("plant never left rest", trace=tuple(y))
    return int(moved[0]) - 1


def run_identification(plant, cfg: IdentConfig) -> IdentResult:
    """Run the probe and extract ``(N_ts, N_tau_l, t_s, tau_l)``.

    ``plant`` must expose ``reset()``, ``output`` and ``step(u)`` at sampling
    period ``cfg.tau``.
    """
    if abs(getattr(plant, "dt", cfg.tau) - cfg.tau) > 1e-12 * cfg.tau:
        raise ParameterError("plant sampling period differs from the identification sampling time")
    k_s = cfg.k_s
    y, u, settled = _probe(plant, cfg, k_s)
    oscillatory = False
    if settled and k_s == 0 and is_oscillatory(y, cfg.band):
        oscillatory = True
        k_s = 1
        y, u, settled = _probe(plant, cfg, k_s)
    if not settled:
        raise IdentificationError(f"no steady state within {cfg.max_samples} samples", trace=tuple(y))
    n_tl = _delay_horizon(y, cfg.response_threshold * cfg.k * cfg.y_max)
    n_ts = _settling_sample(y, cfg.band)
    if n_ts <= n_tl:
        n_ts = n_tl + 1
    t_s, tau_l = compute_times(n_ts, n_tl, cfg.tau, cfg.tau_c, cfg.tau_y)
    return IdentResult(n_ts, n_tl, t_s, tau_l, oscillatory, tuple(float(v) for v in y),
                       tuple(float(v) for v in u), cfg.tau)
