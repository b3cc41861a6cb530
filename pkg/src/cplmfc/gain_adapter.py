"""Proportional-gain initialization, bounding and adaptation.

Per sample, in order: the delay-dependent scale ``kappa_g``, the upper limit
``k_plim``, the sigmoid-bounded seed ``kp_init``, and, once the elapsed time
exceeds the loop delay, the adaptive rule ``dKp = alpha*gamma*e*min(u_max, |e_t|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError, ParameterError, SimulationFault
from .nlsig import nlsig

# rational fit of the stabilizing limit against normalized delay
KAPPA_P = (0.05132, 0.2041, 0.1214)
KAPPA_Q = (1.538, 0.5864)
KAPPA_SHIFT = 5.936
KAPPA_SCALE = 8.771

KP_START = 0.01
SEED_LAMBDA = 0.1


def kappa_g(tau_l: float) -> float:
    """Curve-fitted stabilizing gain scale at total loop delay ``tau_l``."""
    if not (math.isfinite(tau_l) and tau_l >= 0):
        raise DomainError(f"tau_l must be finite and non-negative, got {tau_l}")
    t = (tau_l - KAPPA_SHIFT) / KAPPA_SCALE
    p1, p2, p3 = KAPPA_P
    q1, q2 = KAPPA_Q
    den = t * t + q1 * t + q2
    if abs(den) < 1e-12:
        raise SimulationFault(f"kappa_g denominator vanishes at tau_l={tau_l}")
    return (p1 * t * t + p2 * t + p3) / den


@dataclass(frozen=True)
class AdapterConfig:
    alpha: float
    t_s: float
    u_max: float
    tau_l: float = 0.0
    gamma: float = 0.001
    n: int = 1
    # literal per-sample update (no dt factor)
    per_sample: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not self.t_s > 0:
            raise ParameterError(f"t_s must be positive, got {self.t_s}")
        if not self.tau_l >= 0:
            raise ParameterError(f"tau_l must be non-negative, got {self.tau_l}")
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if not self.u_max > 0:
            raise ParameterError(f"u_max must be positive, got {self.u_max}")


def k_plim(cfg: AdapterConfig) -> float:
    return cfg.alpha * kappa_g(cfg.tau_l) * (cfg.tau_l + cfg.t_s) / cfg.t_s


def kp_init(e: float, u: float, lim: float, n: int = 1) -> float:
    """Sigmoid seed for Kp from the current error and input, bounded to ``(0, lim)``."""
    if not lim > 0:
        raise ParameterError(f"gain limit must be positive, got {lim}")

    def bipolar(v):
        span = lim + abs(v)
        return nlsig(v, span, -span, lim, -lim, 1, SEED_LAMBDA, 0)

    kp0 = bipolar(e) + bipolar(u)
    # the penalizing sigmoid needs x_max > x_min = 0
    top = max(lim + kp0, lim * 1e-9)
    return nlsig(kp0, top, 0.0, lim, 0.0, n, SEED_LAMBDA, 0)


@dataclass(frozen=True)
class AdapterState:
    kp: float
    k_plim: float
    adaptation_enabled: bool = False


def _clamp(kp, lim):
    return min(max(kp, lim * 1e-9), lim)


def kp_update(state: AdapterState, e: float, e_t: float, cfg: AdapterConfig, dt: float, elapsed: float) -> AdapterState:
    """Apply one adaptive step; a no-op until ``elapsed`` exceeds the loop delay."""
    if not math.isfinite(e_t) or not math.isfinite(e):
        raise SimulationFault(f"non-finite adaptation signal: e={e}, e_t={e_t}")
    if elapsed <= cfg.tau_l:
        return state
    rate = cfg.alpha * cfg.gamma * e * min(cfg.u_max, abs(e_t))
    step = rate if cfg.per_sample else rate * dt
    return AdapterState(_clamp(state.kp + step, state.k_plim), state.k_plim, True)


class GainAdapter:
    """Sequences seeding and adaptation for one loop.

    Kp starts at 0.01 and is re-seeded from ``kp_init`` at every sample up to the
    loop delay, after which the last seed is carried forward by ``kp_update``.
    """

    def __init__(self, cfg: AdapterConfig):
        self.cfg = cfg
        lim = k_plim(cfg)
        self.state = AdapterState(KP_START, lim, False)

    @property
    def kp(self) -> float:
        return self.state.kp

    @property
    def limit(self) -> float:
        return self.state.k_plim

    def update(self, e: float, u: float, e_t: float, dt: float, elapsed: float) -> float:
        if elapsed <= self.cfg.tau_l:
            seed = kp_init(e, u, self.state.k_plim, self.cfg.n)
            self.state = replace(self.state, kp=_clamp(seed, self.state.k_plim))
        else:
            self.state = kp_update(self.state, e, e_t, self.cfg, dt, elapsed)
        return self.state.kp
