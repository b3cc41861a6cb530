"""Closed PID-loop model (CPLM): a second-order reference with setpoint zeros.

    y_m / r = (c s^2 + 2 b zeta wn s + wn^2) / (s^2 + 2 zeta wn s + wn^2)

The model fixes the integral and derivative time constants of the PID
(``Ti = 2 zeta / wn``, ``Td = 1 / (2 zeta wn)``) once the natural frequency
is matched to an identified closed-loop settling time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

DEFAULT_ZETA = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class CplmSpec:
    omega_n: float
    zeta: float = DEFAULT_ZETA
    b: float = 1.0
    c: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.omega_n) and self.omega_n > 0):
            raise DomainError(f"omega_n must be positive, got {self.omega_n}")
        if not 0 < self.zeta < 1:
            raise DomainError(f"zeta must lie in (0, 1), got {self.zeta}")

    @property
    def Ti(self) -> float:
        return 2.0 * self.zeta / self.omega_n

    @property
    def Td(self) -> float:
        return 1.0 / (2.0 * self.zeta * self.omega_n)

    @property
    def omega_d(self) -> float:
        return self.omega_n * math.sqrt(1.0 - self.zeta**2)

    @property
    def poles(self) -> tuple[complex, complex]:
        re = -self.zeta * self.omega_n
        return complex(re, self.omega_d), complex(re, -self.omega_d)

    def matrices(self):
        """Observable-canonical ``(A_m, B_m, C_m, D_m)``."""
        wn, z, b, c = self.omega_n, self.zeta, self.b, self.c
        A = np.array([[0.0, -wn * wn], [1.0, -2.0 * z * wn]])
        B = np.array([wn * wn * (1.0 - c), 2.0 * z * wn * (b - c)])
        C = np.array([0.0, 1.0])
        D = c
        return A, B, C, D

    @classmethod
    def from_settling(cls, t_s, x_s, zeta=DEFAULT_ZETA, b=1.0, c=0.0):
        return cls(design_omega_n(zeta, x_s, t_s), zeta, b, c)


def design_omega_n(zeta: float, x_s: float, t_s: float) -> float:
    """Natural frequency placing the model's normalized settling point at ``t_s``."""
    if not t_s > 0:
        raise DomainError(f"settling time must be positive, got {t_s}")
    if not (zeta > 0 and x_s > 0):
        raise DomainError("zeta and x_s must be positive")
    return x_s / (zeta * t_s)


def gains_from_model(kp: float, spec: CplmSpec) -> tuple[float, float]:
    """Integral and derivative gains ``(kp/Ti, kp*Td)`` for a given proportional gain."""
    return kp / spec.Ti, kp * spec.Td


def cplm_analytic_response(t, spec: CplmSpec):
    """Closed-form unit-step response of the model; accepts scalar or array ``t``."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise DomainError("time must be non-negative")
    wn, z, b, c = spec.omega_n, spec.zeta, spec.b, spec.c
    wd = spec.omega_d
    y = 1.0 + np.exp(-z * wn * ta) * (
        (c - 1.0) * np.cos(wd * ta) + (2.0 * b - c - 1.0) * z * (wn / wd) * np.sin(wd * ta)
    )
    if np.ndim(t) == 0:
        return float(y)
    return y


@dataclass
class CplmState:
    spec: CplmSpec
    x_m: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def output(self, r: float) -> float:
        _, _, C, D = self.spec.matrices()
        return float(C @ self.x_m + D * r)


def cplm_step(state: CplmState, r: float, dt: float, substeps: int = 1) -> tuple[CplmState, float]:
    """Advance the model by ``dt`` with RK4 (input held) and return the new state and output."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    A, B, C, D = state.spec.matrices()
    h = dt / substeps
    if h * state.spec.omega_n >= 0.1:
        raise DomainError(f"integration step {h:g}s too coarse for omega_n={state.spec.omega_n:g}")
    x = state.x_m.copy()
    u = B * r
    for _ in range(substeps):
        k1 = A @ x + u
        k2 = A @ (x + 0.5 * h * k1) + u
        k3 = A @ (x + 0.5 * h * k2) + u
        k4 = A @ (x + h * k3) + u
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    new = CplmState(state.spec, x)
    return new, float(C @ x + D * r)
