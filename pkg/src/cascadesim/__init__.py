"""Simulation and diagnostics for coupled mean-field default cascades."""

from .cascade import (CascadeOutcome, CouplingMatrix, cascade_oracle,
                      drift_level, physical_jump_size, resolve_cascade)
from .diagnostics import (AuditReport, discontinuity_criterion, normal_cdf,
                          oscillation_tail_bound, physicality_audit,
                          tightness_check)
from .engine import (DriftPath, JumpEvent, ParticleState, SimulationConfig,
                     SimulationResult, advance_step, check_representation,
                     detect_hits, run, snapshot_density)
from .errors import (AuditUnavailable, CascadesimError, ConfigurationError,
                     InvariantViolation, RuntimeFault)
from .laws import (InitialLaw, QuantileTableLaw, UniformPiece, law_mean,
                   load_quantile_table, sample_initial)
from .paths import (CadlagPath, OscillationReport, m1_distance, u_oscillation,
                    v_oscillation, w_oscillation)

__all__ = [
    "AuditReport", "AuditUnavailable", "CadlagPath", "CascadeOutcome",
    "CascadesimError", "ConfigurationError", "CouplingMatrix", "DriftPath",
    "InitialLaw", "InvariantViolation", "JumpEvent", "OscillationReport",
    "ParticleState", "QuantileTableLaw", "RuntimeFault", "SimulationConfig",
    "SimulationResult", "UniformPiece", "advance_step", "cascade_oracle",
    "check_representation", "detect_hits", "discontinuity_criterion",
    "drift_level", "law_mean", "load_quantile_table", "m1_distance",
    "normal_cdf", "oscillation_tail_bound", "physical_jump_size",
    "physicality_audit", "resolve_cascade", "run", "sample_initial",
    "snapshot_density", "tightness_check", "u_oscillation", "v_oscillation",
    "w_oscillation",
]
