"""Numerical tolerances shared by every module.

All values are in natural units (hbar = k_B = 1).
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-10
    ode_endpoint: float = 1e-8
    symmetry: float = 1e-12
    hermitian_build: float = 1e-14
    bona_fide: float = 1e-10
    sqrt_clamp: float = 1e-12
    sqrt_error: float = 1e-9
    kossakowski_psd: float = 1e-12
    span_residual: float = 1e-10
    tail_mass: float = 1e-8
    time_root: float = 1e-4
    temperature_root: float = 1e-3
    plateau: float = 1e-8


TOL = Tolerances()
