"""Quasi-free semigroup acting on the six mesoscopic fluctuation modes.

Convention: the generator matrix ``L`` acts on observables, ``L[r.F] = r.L.F``, so a
Weyl parameter is transported with the transpose, ``r_t = M_t^T r`` where
``M_t = exp(t L)``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._config import TOL
from .exceptions import ConsistencyError, ValidityError
from .micro_chain import BathParams, derive_meso_generator
from .symplectic_core import check_bona_fide, expm, min_eig_hermitian, symplectic_form

MESO_FORM = symplectic_form(3)

_COUPLING = np.kron(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0]]), np.eye(2))


class MesoGenerator(NamedTuple):
    matrix: np.ndarray
    provenance: str  # "closed-form" or "micro-derived"


class PropagatorBundle(NamedTuple):
    t: float
    M: np.ndarray
    K: np.ndarray


@dataclass(frozen=True)
class WeylElement:
    """``exp(log_prefactor) * W(r)``."""

    r: np.ndarray
    log_prefactor: float = 0.0

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(-1)
        if r.shape != (6,):
            raise ValidityError("Weyl parameter must be a 6-vector")
        if self.log_prefactor > TOL.algebraic:
            raise ValidityError("Weyl prefactor must not exceed 1")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "log_prefactor", float(self.log_prefactor))

    @property
    def prefactor(self):
        return float(np.exp(self.log_prefactor))


def thermal_covariance(bath: BathParams) -> np.ndarray:
    eta = bath.eta
    return (eta**2 + 1.0) / (4.0 * eta) * np.eye(6)


def generator(bath: BathParams, provenance="closed-form") -> MesoGenerator:
    """Generator matrix ``(gamma-1) 1 + 2 omega sigma + (gamma-1) lam / sqrt(2) * coupling``."""
    bath.require_cp()
    if provenance == "micro-derived":
        return MesoGenerator(derive_meso_generator(bath).matrix, provenance)
    if provenance != "closed-form":
        raise ValueError(f"unknown provenance {provenance!r}")
    g1 = bath.gamma - 1.0
    matrix = g1 * np.eye(6) + 2.0 * bath.omega * MESO_FORM + g1 * bath.lam / np.sqrt(2.0) * _COUPLING
    return MesoGenerator(matrix, provenance)


def propagate(gen, sigma_beta, t) -> PropagatorBundle:
    """``M_t = exp(t L)`` and ``K_t = S - M_t S M_t^T``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    matrix = gen.matrix if isinstance(gen, MesoGenerator) else np.asarray(gen)
    m = expm(matrix, t)
    k = sigma_beta - m @ sigma_beta @ m.T
    return PropagatorBundle(float(t), m, 0.5 * (k + k.T))


def apply_heisenberg(bundle: PropagatorBundle, w: WeylElement) -> WeylElement:
    """``Phi_t[W(r)] = exp(-1/2 r.K_t.r) W(M_t^T r)``.

    The damping exponent contracts ``K_t`` with the incoming parameter, which is
    what keeps the thermal state invariant.
    """
    r_t = bundle.M.T @ w.r
    return WeylElement(r_t, w.log_prefactor - 0.5 * float(w.r @ bundle.K @ w.r))


def evolve_covariance(gen, sigma_beta, sigma0, t) -> np.ndarray:
    """Covariance of the evolved Gaussian state, ``S + M_t (S0 - S) M_t^T``."""
    b = propagate(gen, sigma_beta, t)
    out = b.K + b.M @ sigma0 @ b.M.T
    out = 0.5 * (out + out.T)
    ok, margin = check_bona_fide(out, MESO_FORM)
    if not ok:
        raise ConsistencyError(f"evolved covariance not bona fide at t={t} (margin {margin:.3e})")
    return out


def cp_certificate(bundle: PropagatorBundle, sigma_beta, form=MESO_FORM) -> float:
    """Smallest eigenvalue of ``(S + i/2 s) - M_t (S + i/2 s) M_t^T``; CP needs it >= 0."""
    g = sigma_beta + 0.5j * form
    return min_eig_hermitian(g - bundle.M @ g @ bundle.M.T)
