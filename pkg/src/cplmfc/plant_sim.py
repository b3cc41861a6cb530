"""Benchmark plants: SISO transfer functions and the permanent-magnet linear motor.

Both plants hold the control input constant over a sampling interval, integrate
with fixed-step RK4 on a sub-grid (``substeps`` per sample), and realize input
delay as an integer buffer on that sub-grid.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .errors import ParameterError, SimulationFault

DEFAULT_SUBSTEPS = 10


class _DelayLine:
    def __init__(self, n: int):
        if n < 0:
            raise ParameterError("delay length must be non-negative")
        self.n = n
        self._buf = deque([0.0] * n, maxlen=n) if n else None

    def push(self, u: float) -> float:
        if not self.n:
            return u
        out = self._buf[0]
        self._buf.append(u)
        return out

    def reset(self):
        if self.n:
            self._buf = deque([0.0] * self.n, maxlen=self.n)


def _delay_slots(tau_l, h):
    # delays are rounded to the nearest integration sub-step
    return int(round(tau_l / h))


class _PlantBase:
    """Shared input path: disturbance, clamp, delay."""

    def __init__(self, u_max, tau_l, dt, substeps):
        if not dt > 0:
            raise ParameterError("sampling period must be positive")
        if substeps < 1:
            raise ParameterError("substeps must be >= 1")
        if not u_max > 0:
            raise ParameterError("u_max must be positive")
        if not tau_l >= 0:
            raise ParameterError("tau_l must be non-negative")
        self.u_max = float(u_max)
        self.tau_l = float(tau_l)
        self.dt = float(dt)
        self.substeps = int(substeps)
        self.h = self.dt / self.substeps
        self.disturbance = 0.0
        self._delay = _DelayLine(_delay_slots(self.tau_l, self.h))

    @property
    def delay_slots(self) -> int:
        return self._delay.n

    def add_disturbance(self, d: float):
        """Set the input-side load ``d``; subsequent steps apply ``u + d``."""
        self.disturbance = float(d)
        return self

    def _input(self, u):
        v = u + self.disturbance
        return min(max(v, -self.u_max), self.u_max)


class LtiPlant(_PlantBase):
    """``P(s) = num(s)/den(s)`` in controllable canonical form.

    Coefficients are in descending powers of ``s``.
    """

    def __init__(self, num, den, u_max=math.inf, tau_l=0.0, dt=0.1, substeps=DEFAULT_SUBSTEPS):
        super().__init__(u_max, tau_l, dt, substeps)
        num = np.atleast_1d(np.asarray(num, dtype=float))
        den = np.atleast_1d(np.asarray(den, dtype=float))
        den = np.trim_zeros(den, "f")
        if den.size == 0 or den[0] == 0:
            raise ParameterError("denominator leading coefficient must be nonzero")
        num = np.trim_zeros(num, "f") if np.any(num) else np.zeros(1)
        if num.size > den.size:
            raise ParameterError("transfer function must be proper")
        self.num = num
        self.den = den
        a = den / den[0]
        bn = np.concatenate([np.zeros(den.size - num.size), num / den[0]])
        n = den.size - 1
        self.order = n
        # y = d0 u + C x ;  controllable canonical realization
        self.D = bn[0]
        if n == 0:
            self.A = np.zeros((0, 0))
            self.B = np.zeros(0)
            self.C = np.zeros(0)
        else:
            A = np.zeros((n, n))
            A[:-1, 1:] = np.eye(n - 1)
            A[-1, :] = -a[:0:-1]
            self.A = A
            self.B = np.zeros(n)
            self.B[-1] = 1.0
            self.C = (bn[:0:-1] - a[:0:-1] * bn[0])
        self.x = np.zeros(n)
        self._u_last = 0.0

    def reset(self):
        self.x = np.zeros(self.order)
        self._u_last = 0.0
        self._delay.reset()
        self.disturbance = 0.0

    @property
    def output(self) -> float:
        return float(self.C @ self.x + self.D * self._u_last) if self.order else float(self.D * self._u_last)

    @property
    def dc_gain(self) -> float:
        return float(np.polyval(self.num, 0.0) / np.polyval(self.den, 0.0))

    def step(self, u: float, dt: float | None = None) -> float:
        """Hold ``u`` for one sampling period and return the output at its end."""
        if dt is not None and abs(dt - self.dt) > 1e-12 * self.dt:
            raise ParameterError(f"plant configured for dt={self.dt}, got {dt}")
        if not math.isfinite(u):
            raise SimulationFault(f"non-finite plant input {u}")
        v = self._input(u)
        A, B, h = self.A, self.B, self.h
        x = self.x
        for _ in range(self.substeps):
            ud = self._delay.push(v)
            if self.order:
                bu = B * ud
                k1 = A @ x + bu
                k2 = A @ (x + 0.5 * h * k1) + bu
                k3 = A @ (x + 0.5 * h * k2) + bu
                k4 = A @ (x + h * k3) + bu
                x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            self._u_last = ud
        if not np.all(np.isfinite(x)):
            raise SimulationFault("plant state became non-finite")
        self.x = x
        return self.output


class PmlmPlant(_PlantBase):
    """Permanent-magnet linear motor: ``m y'' + b_damp y' = 8.1 u(t - tau_l) - f_F - f_R``.

    Ripple ``f_R = A_r sin(2 pi y / pitch)``; friction
    ``f_F = (F_c + F_v |y'|) sgn(y')`` with ``sgn`` smoothed as ``tanh(y'/eps)``.
    """

    def __init__(
        self,
        m=5.4,
        b_damp=35.1,
        tau_l=0.0,
        u_max=math.inf,
        dt=0.001,
        substeps=DEFAULT_SUBSTEPS,
        input_gain=8.1,
        ripple_amp=3.0,
        ripple_pitch=0.0712,
        coulomb=3.0,
        viscous=10.0,
        eps=1e-4,
    ):
        super().__init__(u_max, tau_l, dt, substeps)
        if not m > 0:
            raise ParameterError("mass must be positive")
        self.m = float(m)
        self.b_damp = float(b_damp)
        self.input_gain = float(input_gain)
        self.ripple_amp = float(ripple_amp)
        self.ripple_pitch = float(ripple_pitch)
        self.coulomb = float(coulomb)
        self.viscous = float(viscous)
        self.eps = float(eps)
        self.y = 0.0
        self.v = 0.0

    def reset(self):
        self.y = 0.0
        self.v = 0.0
        self._delay.reset()
        self.disturbance = 0.0

    @property
    def output(self) -> float:
        return self.y

    def ripple(self, y: float) -> float:
        return self.ripple_amp * math.sin(2.0 * math.pi * y / self.ripple_pitch)

    def friction(self, v: float) -> float:
        if self.eps <= 0:
            sgn = (v > 0) - (v < 0)
        else:
            sgn = math.tanh(v / self.eps)
        return (self.coulomb + self.viscous * abs(v)) * sgn

    def _accel(self, y, v, ud):
        force = self.input_gain * ud - self.friction(v) - self.ripple(y)
        return (force - self.b_damp * v) / self.m

    def step(self, u: float, dt: float | None = None) -> float:
        if dt is not None and abs(dt - self.dt) > 1e-12 * self.dt:
            raise ParameterError(f"plant configured for dt={self.dt}, got {dt}")
        if not math.isfinite(u):
            raise SimulationFault(f"non-finite plant input {u}")
        vin = self._input(u)
        y, v, h = self.y, self.v, self.h
        acc = self._accel
        for _ in range(self.substeps):
            ud = self._delay.push(vin)
            a1 = acc(y, v, ud)
            y2, v2 = y + 0.5 * h * v, v + 0.5 * h * a1
            a2 = acc(y2, v2, ud)
            y3, v3 = y + 0.5 * h * v2, v + 0.5 * h * a2
            a3 = acc(y3, v3, ud)
            y4, v4 = y + h * v3, v + h * a3
            a4 = acc(y4, v4, ud)
            y += (h / 6.0) * (v + 2 * v2 + 2 * v3 + v4)
            v += (h / 6.0) * (a1 + 2 * a2 + 2 * a3 + a4)
        if not (math.isfinite(y) and math.isfinite(v)):
            raise SimulationFault("PMLM state became non-finite")
        self.y, self.v = y, v
        return y
