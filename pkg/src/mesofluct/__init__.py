"""Mesoscopic entanglement of two dissipative bosonic chains in a common bath."""

from .entanglement import (
    EntanglementCurve,
    EntanglementReport,
    asymptotic_E,
    critical_temperature,
    critical_temperature_closed_form,
    entanglement_curve,
    invariants,
    log_negativity,
    peak_E,
    phase_boundary,
    script_E_reference,
    separability,
    sudden_times,
)
from .exceptions import MesofluctError
from .gaussian_states import (
    MesoGaussianState,
    TwoModeCovariance,
    closed_form_reduced,
    evolved_reduced,
    reduce_two_modes,
    squeeze,
    thermal_meso_state,
)
from .meso_dynamics import (
    MESO_FORM,
    WeylElement,
    apply_heisenberg,
    cp_certificate,
    evolve_covariance,
    generator,
    propagate,
    thermal_covariance,
)
from .micro_chain import (
    BathParams,
    QuadraticObservable,
    basis_observables,
    derive_meso_generator,
    fluctuation_kinematics,
    kossakowski,
    lindblad_action,
)

__version__ = "0.1.0"

__all__ = [
    "BathParams",
    "EntanglementCurve",
    "EntanglementReport",
    "MESO_FORM",
    "MesoGaussianState",
    "MesofluctError",
    "QuadraticObservable",
    "TwoModeCovariance",
    "WeylElement",
    "apply_heisenberg",
    "asymptotic_E",
    "basis_observables",
    "closed_form_reduced",
    "cp_certificate",
    "critical_temperature",
    "critical_temperature_closed_form",
    "derive_meso_generator",
    "entanglement_curve",
    "evolve_covariance",
    "evolved_reduced",
    "fluctuation_kinematics",
    "generator",
    "invariants",
    "kossakowski",
    "lindblad_action",
    "log_negativity",
    "peak_E",
    "phase_boundary",
    "propagate",
    "reduce_two_modes",
    "script_E_reference",
    "separability",
    "squeeze",
    "sudden_times",
    "thermal_covariance",
    "thermal_meso_state",
]
