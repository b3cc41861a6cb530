"""Adaptive 2-DOF PID tuning by following a closed PID-loop reference model."""

from .critic_pid import CriticWeights, PidGains, PidState, compact_reconstruct, composite_error, pid_step
from .errors import (
    ConfigError,
    CplmfcError,
    DomainError,
    IdentificationError,
    InstabilityError,
    ParameterError,
    SafetyAbort,
    SimulationFault,
)
from .fuzzy_map import derive_normalized_times, lookup_times_fis, lookup_times_fsm
from .gain_adapter import AdapterConfig, GainAdapter, k_plim, kappa_g, kp_init, kp_update
from .loop_harness import (
    Disturbance,
    Metrics,
    PlantSpec,
    RunTrace,
    Scenario,
    Setpoint,
    compute_metrics,
    critic_defaults,
    dominance_diagnostics,
    run_cplmfc,
    run_fixed,
)
from .nlsig import NlsigParams, nlsig, nlsig_eval
from .plant_sim import LtiPlant, PmlmPlant
from .ref_model import CplmSpec, cplm_analytic_response, cplm_step, design_omega_n, gains_from_model
from .scenario import dump_scenario, load_scenario, parse_scenario
from .settle_ident import IdentConfig, IdentResult, compute_times, run_identification

__version__ = "0.1.0"
