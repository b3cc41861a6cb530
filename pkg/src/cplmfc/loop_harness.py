"""Closed-loop runs: CPLMFC tuning around the critic PID, metrics and diagnostics."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .critic_pid import CriticWeights, PidGains, PidState, composite_error, pid_step
from .errors import ConfigError, InstabilityError, ParameterError
from .fuzzy_map import lookup_times_fis, lookup_times_fsm
from .gain_adapter import AdapterConfig, GainAdapter
from .plant_sim import LtiPlant, PmlmPlant
from .ref_model import DEFAULT_ZETA, CplmSpec, CplmState, cplm_step, design_omega_n, gains_from_model
from .settle_ident import IdentConfig, IdentResult, run_identification

TRACE_COLUMNS = ("t", "r", "y", "y_m", "u", "e", "kp", "ki", "kd")
DIVERGENCE_FACTOR = 100.0


@dataclass(frozen=True)
class PlantSpec:
    kind: str = "lti"
    num: tuple = (1.0,)
    den: tuple = (1.0, 3.0, 3.0, 1.0)
    tau_l: float = 0.0
    m: float = 5.4
    b_damp: float = 35.1
    substeps: int = 10

    def __post_init__(self):
        if self.kind not in ("lti", "pmlm"):
            raise ParameterError(f"unknown plant kind {self.kind!r}")

    def build(self, tau: float, u_max: float):
        if self.kind == "lti":
            return LtiPlant(self.num, self.den, u_max=u_max, tau_l=self.tau_l, dt=tau, substeps=self.substeps)
        return PmlmPlant(m=self.m, b_damp=self.b_damp, tau_l=self.tau_l, u_max=u_max, dt=tau, substeps=self.substeps)


@dataclass(frozen=True)
class Setpoint:
    """``step``: ``amplitude`` from ``t0`` on. ``sine``: ``amplitude*sin(2 pi freq k/N)`` over the run."""

    kind: str = "step"
    amplitude: float = 1.0
    t0: float = 0.0
    freq: float = 0.0

    def __post_init__(self):
        if self.kind not in ("step", "sine"):
            raise ParameterError(f"unknown setpoint kind {self.kind!r}")

    def value(self, k: int, tau: float, n_total: int) -> float:
        if self.kind == "sine":
            return self.amplitude * math.sin(2.0 * math.pi * self.freq * k / n_total)
        return self.amplitude if k * tau >= self.t0 - 1e-12 else 0.0


@dataclass(frozen=True)
class Disturbance:
    amplitude: float = 0.0
    t0: float = 0.0

    def value(self, t: float) -> float:
        return self.amplitude if t >= self.t0 - 1e-12 else 0.0


@dataclass(frozen=True)
class Scenario:
    plant: PlantSpec = field(default_factory=PlantSpec)
    setpoint: Setpoint = field(default_factory=Setpoint)
    disturbance: Disturbance = field(default_factory=Disturbance)
    tau: float = 0.1
    u_max: float = 10.0
    duration: float = 40.0
    alpha: float = 16.0
    zeta: float = DEFAULT_ZETA
    b: float = 1.0
    c: float = 0.0
    lambda_i_tiers: tuple = (0.25, 0.6)
    lambda_d_tiers: tuple = (0.1, 0.25)
    t_s: float | None = 10.0
    # loop delay used by the tuner; None takes the plant's input delay
    tau_l: float | None = None
    ident: IdentConfig | None = None
    times: str = "fis"
    per_sample: bool = False
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.tau > 0:
            raise ParameterError("tau must be positive")
        if not self.u_max > 0:
            raise ParameterError("u_max must be positive")
        if not self.duration >= self.tau:
            raise ParameterError("duration must cover at least one sample")
        if self.times not in ("fis", "fsm"):
            raise ParameterError(f"times must be 'fis' or 'fsm', got {self.times!r}")
        if self.t_s is None and self.ident is None:
            raise ParameterError("either t_s or an identification block is required")
        if self.t_s is not None:
            self.check_horizon(self.t_s)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.tau))

    @property
    def loop_delay(self) -> float:
        return self.plant.tau_l if self.tau_l is None else self.tau_l

    def check_horizon(self, t_s):
        if not t_s > 0:
            raise ParameterError("t_s must be positive")
        # a sinusoid is judged over its own period, not the settling horizon
        if self.setpoint.kind == "step" and self.duration < 3.0 * t_s - 1e-9:
            raise ParameterError(f"duration {self.duration} s is shorter than 3*t_s = {3 * t_s} s")


@dataclass
class RunTrace:
    t: np.ndarray
    r: np.ndarray
    y: np.ndarray
    y_m: np.ndarray
    u: np.ndarray
    e: np.ndarray
    kp: np.ndarray
    ki: np.ndarray
    kd: np.ndarray
    gains: PidGains | None = None
    k_plim: float = math.nan
    spec: CplmSpec | None = None
    weights: CriticWeights | None = None
    ident: IdentResult | None = None

    def __len__(self):
        return self.t.size

    @property
    def tau(self) -> float:
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else math.nan

    def to_csv(self, fh=None) -> str:
        """Write ``t,r,y,y_m,u,e,kp,ki,kd`` rows at full precision; returns the text when ``fh`` is None."""
        buf = io.StringIO() if fh is None else fh
        buf.write(",".join(TRACE_COLUMNS) + "\n")
        cols = [getattr(self, c) for c in TRACE_COLUMNS]
        for row in zip(*cols):
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue() if fh is None else ""


@dataclass(frozen=True)
class Metrics:
    J_iae: float
    J_ise: float
    overshoot: float
    t_settle: float
    y_peak: float

    def summary(self) -> str:
        return "\n".join(f"{k}={v!r}" for k, v in self.__dict__.items())


def critic_defaults(tau_l: float, tau: float, tiers) -> CriticWeights:
    """Pick the lower (delayed loop) or upper critic tier.

    ``tiers`` is ``((li_lo, li_hi), (ld_lo, ld_hi))``.
    """
    (li1, li2), (ld1, ld2) = tiers
    if not 0 < li1 <= li2 <= 1:
        raise ConfigError(f"integral critic tiers must satisfy 0 < lo <= hi <= 1, got {li1}, {li2}")
    if not 0 <= ld1 <= ld2 <= 1:
        raise ConfigError(f"derivative critic tiers must satisfy 0 <= lo <= hi <= 1, got {ld1}, {ld2}")
    delayed = tau_l > tau
    return CriticWeights(1.0, li1 if delayed else li2, ld1 if delayed else ld2)


def _normalized_times(scn: Scenario):
    return (lookup_times_fis if scn.times == "fis" else lookup_times_fsm)(scn.b, scn.c)


def resolve_settling(scn: Scenario):
    """``(t_s, tau_l, ident_result)``; identification overrides the configured values."""
    if scn.ident is None:
        return scn.t_s, scn.loop_delay, None
    plant = scn.plant.build(scn.tau, scn.u_max)
    res = run_identification(plant, scn.ident)
    scn.check_horizon(res.t_s)
    return res.t_s, res.tau_l, res


def _divergence_scale(scn: Scenario) -> float:
    return max(abs(scn.setpoint.amplitude), abs(scn.disturbance.amplitude)) or 1.0


def _finish(buf, k, **extra) -> RunTrace:
    arrs = {c: np.asarray(buf[c][:k], dtype=float) for c in TRACE_COLUMNS}
    return RunTrace(**arrs, **extra)


def _run(scn: Scenario, fixed: PidGains | None, weights: CriticWeights | None):
    t_s, tau_l, ident = resolve_settling(scn)
    x = _normalized_times(scn)
    spec = CplmSpec(design_omega_n(scn.zeta, x.x_s, t_s), scn.zeta, scn.b, scn.c)
    w = weights or critic_defaults(tau_l, scn.tau, (scn.lambda_i_tiers, scn.lambda_d_tiers))
    adapter = None
    if fixed is None:
        adapter = GainAdapter(AdapterConfig(scn.alpha, t_s, scn.u_max, tau_l, per_sample=scn.per_sample))
    plant = scn.plant.build(scn.tau, scn.u_max)
    model = CplmState(spec)
    rng = np.random.default_rng(scn.seed) if scn.noise_std > 0 else None
    tau = scn.tau
    n = scn.n_samples
    tau_f = spec.Td / 10.0
    limit = DIVERGENCE_FACTOR * _divergence_scale(scn)
    buf = {c: np.empty(n) for c in TRACE_COLUMNS}
    state = PidState()
    u = 0.0
    gains = fixed or PidGains(0.01, 0.0, 0.0, scn.b, scn.c)
    extra = dict(spec=spec, weights=w, ident=ident, k_plim=adapter.limit if adapter else math.nan)

    for k in range(n):
        t = k * tau
        r = scn.setpoint.value(k, tau, n)
        y = plant.output
        if rng is not None:
            y += rng.normal(0.0, scn.noise_std)
        e = r - y
        y_m = model.output(r)
        model, _ = cplm_step(model, r, tau, substeps=10)
        if adapter is not None:
            e_t = composite_error(state, e, w, spec.Ti, spec.Td, tau)
            kp = adapter.update(e, u, e_t, tau, t)
            ki, kd = gains_from_model(kp, spec)
            gains = PidGains(kp, ki, kd, scn.b, scn.c)
        u, state = pid_step(state, r, y, gains, w, tau, scn.u_max, tau_f)
        for c, v in zip(TRACE_COLUMNS, (t, r, y, y_m, u, e, gains.kp, gains.ki, gains.kd)):
            buf[c][k] = v
        plant.add_disturbance(scn.disturbance.value(t))
        plant.step(u)
        if abs(plant.output) > limit:
            trace = _finish(buf, k + 1, gains=gains, **extra)
            raise InstabilityError(f"|y| exceeded {limit:g} after sample {k}", trace=trace, sample=k)
    return _finish(buf, n, gains=gains, **extra)


def run_cplmfc(scn: Scenario):
    """Adaptive CPLMFC run; returns ``(RunTrace, Metrics)``."""
    trace = _run(scn, None, None)
    return trace, compute_metrics(trace)


def run_fixed(scn: Scenario, gains: PidGains, weights: CriticWeights | None = None):
    """Playback of a fixed-gain 2-DOF PID on the same loop (unit critic weights by default)."""
    trace = _run(scn, gains, weights or CriticWeights())
    return trace, compute_metrics(trace)


def compute_metrics(trace: RunTrace, band: float = 0.01) -> Metrics:
    if len(trace) == 0:
        raise ParameterError("empty trace")
    tau = trace.tau if len(trace) > 1 else 1.0
    e = trace.e
    j_iae = float(np.sum(np.abs(e)) * tau)
    j_ise = float(np.sum(e * e) * tau)
    r_final = float(trace.r[-1])
    r_span = float(np.max(np.abs(trace.r)))
    # a final setpoint that is negligible against the excursion is treated as zero
    if abs(r_final) > band * r_span:
        scale = abs(r_final)
        overshoot = max(0.0, (float(np.max(trace.y)) - r_final) / r_final) if r_final > 0 else max(
            0.0, (r_final - float(np.min(trace.y))) / scale
        )
    else:
        scale = r_span or 1.0
        overshoot = 0.0
    outside = np.nonzero(np.abs(trace.y - r_final) > band * scale)[0]
    t_settle = float(trace.t[outside[-1] + 1]) if outside.size and outside[-1] + 1 < len(trace) else (
        math.inf if outside.size else 0.0
    )
    return Metrics(j_iae, j_ise, overshoot, t_settle, float(np.max(np.abs(trace.y))))


@dataclass(frozen=True)
class DominanceReport:
    min_loop_gain: float
    condition_met: bool
    roots: tuple
    dominant: complex | None
    target: complex
    relative_distance: float
    stable: bool
    dominant_in_lhp: bool


def dominance_diagnostics(plant: LtiPlant, gains: PidGains, spec: CplmSpec,
                          weights: CriticWeights | None = None, n_grid: int = 400) -> DominanceReport:
    """Low-frequency loop-gain margin and closed-loop pole placement for an LTI plant.

    The loop gain is ``(lp Kp + li Ki/s + ld Kd s) N_p/D_p`` on ``[wn/1000, wn/10]``.
    Input delay only rotates the phase and so does not enter the magnitude test;
    it is ignored for the pole computation.
    """
    w = weights or CriticWeights()
    kp, ki, kd = w.lambda_p * gains.kp, w.lambda_i * gains.ki, w.lambda_d * gains.kd
    wn = spec.omega_n
    omega = np.logspace(math.log10(wn / 1000.0), math.log10(wn / 10.0), n_grid)
    s = 1j * omega
    loop = (kp + ki / s + kd * s) * np.polyval(plant.num, s) / np.polyval(plant.den, s)
    mags = np.abs(loop)
    min_gain = float(np.min(mags)) if np.all(np.isfinite(mags)) else 0.0

    char = np.polyadd(np.polymul([1.0, 0.0], plant.den), np.polymul([kd, kp, ki], plant.num))
    char = np.trim_zeros(char, "f")
    target = complex(spec.poles[0])
    if target.imag < 0:
        target = target.conjugate()
    try:
        roots = np.roots(char) if char.size > 1 else np.array([])
    except np.linalg.LinAlgError:
        roots = None
    if roots is None or roots.size == 0:
        return DominanceReport(min_gain, min_gain > 1.0, (), None, target, math.nan, False, False)
    dom = complex(roots[np.argmax(roots.real)])
    if dom.imag < 0:
        dom = dom.conjugate()
    return DominanceReport(
        min_gain,
        min_gain > 1.0,
        tuple(complex(r) for r in roots),
        dom,
        target,
        abs(dom - target) / abs(target),
        bool(np.all(roots.real < 0)),
        dom.real < 0,
    )
