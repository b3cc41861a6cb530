"""Critic-weighted 2-DOF PID in discrete time.

    u = lp*Kp*(b r - y) + li*Ki*int(r - y) + ld*Kd*d/dt(c r - y)

The derivative channel differentiates ``r`` and ``y`` separately by backward
difference and passes each through the same one-pole low-pass, which keeps
the kernel and the compact ``B r + A e - D y`` form numerically identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError, SimulationFault


@dataclass(frozen=True)
class CriticWeights:
    lambda_p: float = 1.0
    lambda_i: float = 1.0
    lambda_d: float = 1.0

    def __post_init__(self):
        for name in ("lambda_p", "lambda_i", "lambda_d"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ParameterError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float
    b: float = 1.0
    c: float = 0.0

    def scaled(self, k: float) -> "PidGains":
        return replace(self, kp=k * self.kp, ki=k * self.ki, kd=k * self.kd)


@dataclass(frozen=True)
class PidState:
    """Discrete controller memory.

    ``integral`` is the error integral (error x seconds). ``dr``/``dy`` are the
    filtered setpoint and output rates.
    """

    integral: float = 0.0
    r_prev: float = 0.0
    y_prev: float = 0.0
    dr: float = 0.0
    dy: float = 0.0
    u_prev: float = 0.0
    started: bool = False

    @property
    def de(self) -> float:
        """Filtered error rate."""
        return self.dr - self.dy


def _filter_coeff(dt, tau_f):
    if tau_f <= 0:
        return 0.0
    return tau_f / (tau_f + dt)


def _rates(state: PidState, r, y, dt, tau_f):
    if not state.started:
        return 0.0, 0.0
    a = _filter_coeff(dt, tau_f)
    dr = a * state.dr + (1.0 - a) * (r - state.r_prev) / dt
    dy = a * state.dy + (1.0 - a) * (y - state.y_prev) / dt
    return dr, dy


def pid_step(
    state: PidState,
    r: float,
    y: float,
    gains: PidGains,
    w: CriticWeights,
    dt: float,
    u_max: float,
    tau_f: float = 0.0,
) -> tuple[float, PidState]:
    """One controller update; returns the saturated input and the next state.

    ``tau_f`` is the derivative low-pass time constant (0 disables filtering).
    The integral follows conditional integration: it is frozen whenever the
    unclamped output is saturated and the error pushes further into the limit.
    It is also bounded so ``li*Ki*integral`` alone never exceeds ``u_max``.
    """
    if not dt > 0:
        raise ParameterError("dt must be positive")
    if not u_max > 0:
        raise ParameterError("u_max must be positive")
    if not all(math.isfinite(v) for v in (r, y, gains.kp, gains.ki, gains.kd)):
        raise SimulationFault(f"non-finite controller input: r={r}, y={y}, gains={gains}")

    e = r - y
    dr, dy = _rates(state, r, y, dt, tau_f)
    up = w.lambda_p * gains.kp * (gains.b * r - y)
    ud = w.lambda_d * gains.kd * (gains.c * dr - dy)
    ki_eff = w.lambda_i * gains.ki

    integral = state.integral + e * dt
    if ki_eff > 0 and math.isfinite(u_max):
        bound = u_max / ki_eff
        integral = min(max(integral, -bound), bound)
    v = up + ki_eff * integral + ud
    if abs(v) > u_max and v * e > 0:
        integral = state.integral
        v = up + ki_eff * integral + ud
    u = min(max(v, -u_max), u_max)
    if not math.isfinite(u):
        raise SimulationFault("controller produced a non-finite output")
    new = PidState(integral, r, y, dr, dy, u, True)
    return u, new


def composite_error(state: PidState, e: float, w: CriticWeights, Ti: float, Td: float, dt: float) -> float:
    """Critic-weighted error ``lp*e + li*int(e)/Ti + ld*Td*de/dt`` seen by the gain adapter.

    Uses the controller's (clamped) integral advanced by the current sample and
    its latest filtered error rate.
    """
    integral = state.integral + e * dt
    return w.lambda_p * e + w.lambda_i * integral / Ti + w.lambda_d * Td * state.de


def compact_reconstruct(r, e, y, gains: PidGains, dt: float, tau_f: float = 0.0) -> np.ndarray:
    """Unsaturated control sequence from the ``u = B r + A e - D y`` partition.

    ``B = Kp*b + Kd*c*s``, ``A = Ki/s`` and ``D = Kp + Kd*s``, discretized with the
    same backward-Euler integral and filtered backward difference as
    :func:`pid_step`. Critic weights are taken as unity.
    """
    r = np.asarray(r, dtype=float)
    e = np.asarray(e, dtype=float)
    y = np.asarray(y, dtype=float)
    a = _filter_coeff(dt, tau_f)
    out = np.empty_like(r)
    integral = 0.0
    dr = dy = 0.0
    for k in range(r.size):
        if k > 0:
            dr = a * dr + (1.0 - a) * (r[k] - r[k - 1]) / dt
            dy = a * dy + (1.0 - a) * (y[k] - y[k - 1]) / dt
        integral += e[k] * dt
        feedforward = gains.kp * gains.b * r[k] + gains.kd * gains.c * dr
        feedback = gains.kp * y[k] + gains.kd * dy
        out[k] = feedforward + gains.ki * integral - feedback
    return out
