"""Zero-mean Gaussian states of the three mesoscopic modes and their two-chain reduction."""

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidityError
from .meso_dynamics import MESO_FORM, evolve_covariance, generator, thermal_covariance
from .micro_chain import BathParams
from .symplectic_core import check_bona_fide, symplectic_form

TWO_MODE_FORM = symplectic_form(2)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MesoGaussianState:
    sigma: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float)
        if s.shape != (6, 6):
            raise ValidityError(f"mesoscopic covariance must be 6x6, got {s.shape}")
        ok, margin = check_bona_fide(s, MESO_FORM)
        if not ok:
            raise ValidityError(f"covariance violates the uncertainty principle (margin {margin:.3e})")
        object.__setattr__(self, "sigma", _frozen(0.5 * (s + s.T)))


@dataclass(frozen=True)
class TwoModeCovariance:
    """Reduced covariance of the two chain modes, ``[[S1, Sc], [Sc^T, S2]]``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValidityError(f"two-mode covariance must be 4x4, got {m.shape}")
        object.__setattr__(self, "matrix", _frozen(0.5 * (m + m.T)))

    @property
    def sigma1(self):
        return self.matrix[:2, :2]

    @property
    def sigma2(self):
        return self.matrix[2:, 2:]

    @property
    def sigma_c(self):
        return self.matrix[:2, 2:]

    def bona_fide(self):
        return check_bona_fide(self.matrix, TWO_MODE_FORM)

    @classmethod
    def from_blocks(cls, sigma1, sigma2, sigma_c):
        sigma_c = np.asarray(sigma_c)
        return cls(np.block([[sigma1, sigma_c], [sigma_c.T, sigma2]]))


def thermal_meso_state(bath: BathParams) -> MesoGaussianState:
    return MesoGaussianState(thermal_covariance(bath))


def squeeze_matrix(k):
    e = np.exp(2.0 * k)
    return np.diag([e, 1.0 / e, e, 1.0 / e, 1.0, 1.0])


def squeeze(state: MesoGaussianState, k: float) -> MesoGaussianState:
    """Identical single-mode squeezing of the two chain modes; mode 3 is untouched.

    Quadrature variances scale as ``exp(+-4k)``.
    """
    if not np.isfinite(k):
        raise ValidityError("squeezing parameter must be finite")
    s = squeeze_matrix(k)
    return MesoGaussianState(s @ state.sigma @ s.T)


def reduce_two_modes(state) -> TwoModeCovariance:
    """Drop the mixed third mode (rows and columns 5, 6)."""
    sigma = state.sigma if isinstance(state, MesoGaussianState) else np.asarray(state)
    return TwoModeCovariance(sigma[:4, :4])


def evolved_reduced(bath: BathParams, k: float, t: float) -> TwoModeCovariance:
    """Squeeze the thermal state, evolve all three modes, then reduce."""
    sigma_beta = thermal_covariance(bath)
    sigma0 = squeeze(MesoGaussianState(sigma_beta), k).sigma
    return reduce_two_modes(evolve_covariance(generator(bath), sigma_beta, sigma0, t))


def rotation(omega, t):
    c, s = np.cos(2.0 * omega * t), np.sin(2.0 * omega * t)
    return np.array([[c, s], [-s, c]])


def closed_form_reduced(bath: BathParams, k: float, t: float) -> TwoModeCovariance:
    """Analytic reduced covariance: the Hamiltonian rotation wrapped around the damped blocks."""
    if t < 0:
        raise ValueError("t must be non-negative")
    eta, lam = bath.eta, bath.lam
    d = (1.0 + eta**2) / (4.0 * eta)
    x = 4.0 * t * eta / (1.0 + eta)
    # exp(-x) cosh(lam x) expanded so that large t neither overflows nor gives inf * 0
    damped_cosh = 0.5 * (np.exp((abs(lam) - 1.0) * x) + np.exp(-(abs(lam) + 1.0) * x))
    excess = np.diag([np.expm1(4.0 * k), np.expm1(-4.0 * k)])
    a = d * (0.25 * (3.0 * np.exp(-x) + damped_cosh) * excess + np.eye(2))
    b = d * (0.25 * (damped_cosh - np.exp(-x)) * excess)
    h = np.kron(np.eye(2), rotation(bath.omega, t))
    return TwoModeCovariance(h @ np.block([[a, b], [b, a]]) @ h.T)
