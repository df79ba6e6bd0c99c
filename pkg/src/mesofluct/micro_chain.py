"""Single-site algebra of the two-chain oscillator model.

Canonical variables are ordered ``(x1, p1, x2, p2)`` with ``[x_a, p_b] = i delta_ab``.
Quadratic observables are stored as a real symmetric 4x4 matrix ``A`` plus a scalar,
meaning ``sum_ij A_ij (R_i R_j + R_j R_i) / 2 + c``. Because ``A`` is symmetric this is
also equal to the ordered sum ``sum_ij A_ij R_i R_j + c``, which is what the moment
code relies on.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from ._config import TOL
from .exceptions import CompletePositivityError, ConsistencyError, SpanClosureError, ValidityError
from .symplectic_core import min_eig_hermitian, symplectic_form

SITE_FORM = symplectic_form(2)
SYMBOLS = ("x1", "p1", "x2", "p2")


@dataclass(frozen=True)
class BathParams:
    """Bath temperature, oscillator frequency and inter-chain coupling lambda.

    A bath with ``lambda**2 > 1`` can be built (negative tests need it) but is
    flagged through :attr:`completely_positive`; operations that need a valid
    generator refuse it.
    """

    temperature: float
    omega: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.temperature) and self.temperature > 0):
            raise ValidityError(f"temperature must be positive, got {self.temperature}")
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ValidityError(f"omega must be positive, got {self.omega}")
        if not np.isfinite(self.lam):
            raise ValidityError("lambda must be finite")

    @classmethod
    def from_beta(cls, beta, omega=1.0, lam=0.0):
        return cls(1.0 / beta, omega, lam)

    @property
    def beta(self):
        return 1.0 / self.temperature

    @property
    def gamma(self):
        return float(np.exp(-self.omega / self.temperature))

    @property
    def eta(self):
        return float(np.tanh(0.5 * self.omega / self.temperature))

    @property
    def completely_positive(self):
        return self.lam**2 <= 1.0

    def require_cp(self):
        if not self.completely_positive:
            raise CompletePositivityError(
                f"lambda = {self.lam} violates complete positivity (lambda^2 <= 1)"
            )
        return self


@dataclass(frozen=True)
class QuadraticObservable:
    A: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        if a.shape != (4, 4):
            raise ValidityError(f"coefficient matrix must be 4x4, got {a.shape}")
        if np.max(np.abs(a - a.T)) > TOL.hermitian_build * max(1.0, np.max(np.abs(a))):
            raise ValidityError("coefficient matrix must be symmetric")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "c", float(self.c))

    def __add__(self, other):
        return QuadraticObservable(self.A + other.A, self.c + other.c)

    def __mul__(self, scalar):
        return QuadraticObservable(scalar * self.A, scalar * self.c)

    __rmul__ = __mul__

    @classmethod
    def identity(cls):
        return cls(np.zeros((4, 4)), 1.0)


class SiteCovariance(NamedTuple):
    matrix: np.ndarray
    form: np.ndarray


class FluctuationKinematics(NamedTuple):
    sigma_beta: np.ndarray
    form: np.ndarray


class MesoDerivation(NamedTuple):
    matrix: np.ndarray
    residual: float
    scalars: np.ndarray


def thermal_site_covariance(bath: BathParams) -> SiteCovariance:
    """Isotropic covariance ``identity / (2 eta)`` of the single-site Gibbs state."""
    return SiteCovariance(np.eye(4) / (2.0 * bath.eta), SITE_FORM)


def _sym_pair(i, j, value):
    a = np.zeros((4, 4))
    a[i, j] += value
    a[j, i] += value
    return a


def basis_observables(bath: BathParams):
    """The six hermitian quadratics whose fluctuations close under the dynamics."""
    eta = bath.eta
    h = np.sqrt(eta) / 2.0
    g = np.sqrt(eta / 2.0) / 2.0
    x1, p1, x2, p2 = range(4)
    mats = [
        h * np.diag([1.0, -1.0, 0.0, 0.0]),
        _sym_pair(x1, p1, h),
        h * np.diag([0.0, 0.0, 1.0, -1.0]),
        _sym_pair(x2, p2, h),
        _sym_pair(x1, x2, g) - _sym_pair(p1, p2, g),
        _sym_pair(x1, p2, g) + _sym_pair(p1, x2, g),
    ]
    return tuple(QuadraticObservable(m) for m in mats)


def two_point(cov: SiteCovariance) -> np.ndarray:
    """Ordered two-point function ``<R_i R_j> = Sigma_ij + (i/2) J_ij``."""
    return np.asarray(cov.matrix) + 0.5j * np.asarray(cov.form)


def _index(symbol):
    if isinstance(symbol, (int, np.integer)) and 0 <= symbol < 4:
        return int(symbol)
    try:
        return SYMBOLS.index(symbol)
    except ValueError:
        raise ValidityError(f"unknown canonical variable {symbol!r}") from None


def _isserlis(g, idx):
    if not idx:
        return 1.0 + 0j
    first, rest = idx[0], idx[1:]
    total = 0j
    for pos, other in enumerate(rest):
        total += g[first, other] * _isserlis(g, rest[:pos] + rest[pos + 1 :])
    return total


def ordered_moment(cov: SiteCovariance, indices: Sequence) -> complex:
    """Expectation of an ordered product of canonical variables in a zero-mean Gaussian state.

    Sum over all pairings, each pair keeping the order in which its factors appear.
    """
    idx = tuple(_index(s) for s in indices)
    if len(idx) % 2:
        return 0j
    return complex(_isserlis(two_point(cov), idx))


@lru_cache(maxsize=64)
def _fourth_moments_cached(key):
    matrix = np.frombuffer(key[0]).reshape(4, 4)
    form = np.frombuffer(key[1]).reshape(4, 4)
    cov = SiteCovariance(matrix, form)
    t = np.empty((4, 4, 4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                for l in range(4):
                    t[i, j, k, l] = ordered_moment(cov, (i, j, k, l))
    t.setflags(write=False)
    return t


def _fourth_moments(cov):
    key = (
        np.ascontiguousarray(cov.matrix, dtype=float).tobytes(),
        np.ascontiguousarray(cov.form, dtype=float).tobytes(),
    )
    return _fourth_moments_cached(key)


def expectation(x: QuadraticObservable, cov: SiteCovariance) -> float:
    return float(np.real(np.sum(x.A * two_point(cov)))) + x.c


def product_expectation(x: QuadraticObservable, y: QuadraticObservable, cov: SiteCovariance) -> complex:
    """``<X Y>`` for two quadratic observables (operator order kept)."""
    quartic = np.einsum("ij,kl,ijkl->", x.A, y.A, _fourth_moments(cov))
    gx = np.sum(x.A * two_point(cov))
    gy = np.sum(y.A * two_point(cov))
    return complex(quartic + x.c * gy + y.c * gx + x.c * y.c)


def fluctuation_kinematics(bath: BathParams) -> FluctuationKinematics:
    """Covariance and symplectic matrix of the six fluctuations, computed by Wick's theorem.

    The result is compared against the closed forms ``(eta^2 + 1)/(4 eta) * 1`` and
    the block-diagonal symplectic unit; a mismatch raises :class:`ConsistencyError`.
    """
    cov = thermal_site_covariance(bath)
    basis = basis_observables(bath)
    corr = np.empty((6, 6), dtype=complex)
    means = np.array([expectation(x, cov) for x in basis])
    for mu, xm in enumerate(basis):
        for nu, xn in enumerate(basis):
            corr[mu, nu] = product_expectation(xm, xn, cov) - means[mu] * means[nu]
    sigma_beta = np.real(0.5 * (corr + corr.T))
    form = 2.0 * np.imag(0.5 * (corr - corr.T))

    eta = bath.eta
    expected_cov = (eta**2 + 1.0) / (4.0 * eta) * np.eye(6)
    expected_form = symplectic_form(3)
    dev = max(np.max(np.abs(sigma_beta - expected_cov)), np.max(np.abs(form - expected_form)))
    if dev > TOL.algebraic:
        raise ConsistencyError(f"Wick covariance deviates from closed form by {dev:.3e}")
    return FluctuationKinematics(sigma_beta, form)


def kossakowski(bath: BathParams, enforce=True) -> np.ndarray:
    """Kossakowski matrix ``[[A, lam A], [lam A, A]]`` with ``A = (1+gamma)/2 [[1, i eta], [-i eta, 1]]``.

    Pass ``enforce=False`` to build the (non-positive) matrix for ``lambda^2 > 1``.
    """
    if enforce:
        bath.require_cp()
    eta = bath.eta
    a = 0.5 * (1.0 + bath.gamma) * np.array([[1.0, 1j * eta], [-1j * eta, 1.0]])
    b = bath.lam * a
    c = np.block([[a, b], [b.conj().T, a]])
    return 0.5 * (c + c.conj().T)


def kossakowski_min_eig(bath: BathParams) -> float:
    return min_eig_hermitian(kossakowski(bath, enforce=False))


def _ordered_to_symmetric(m):
    """Split ``sum_kl M_kl R_k R_l`` into a symmetric coefficient matrix and a scalar."""
    sym = 0.5 * (m + m.T)
    scalar = 0.5j * np.sum(m * SITE_FORM)
    return sym, scalar


def lindblad_action(x: QuadraticObservable, bath: BathParams) -> QuadraticObservable:
    """Heisenberg generator ``i[H, X] + D[X]`` applied to a quadratic observable.

    Uses ``[Q_A, Q_B] = 2i Q_(AJB - BJA)`` for the Hamiltonian part and
    ``D[Q_A] = i sum (G^T C - C G)_kl R_k R_l`` with ``G = J A`` for the dissipator.
    """
    j = SITE_FORM
    a = x.A
    hamiltonian = bath.omega * (a @ j - j @ a)
    g = j @ a
    c = kossakowski(bath)
    ordered = 1j * (g.T @ c - c @ g)
    sym, scalar = _ordered_to_symmetric(ordered)
    if np.max(np.abs(sym.imag)) > TOL.algebraic * max(1.0, np.max(np.abs(sym))):
        raise ConsistencyError("dissipator produced a non-hermitian quadratic")
    if abs(scalar.imag) > TOL.algebraic:
        raise ConsistencyError("dissipator produced a complex scalar")
    return QuadraticObservable(hamiltonian + sym.real, scalar.real)


def site_drift_diffusion(bath: BathParams):
    """Drift ``D`` and diffusion ``Q`` of the site covariance flow ``dS/dt = D S + S D^T + Q``."""
    c = kossakowski(bath)
    drift = bath.omega * SITE_FORM + SITE_FORM @ c.imag
    return drift, c.real.copy()


def _sym_coordinates(a):
    iu = np.triu_indices(4)
    weights = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return a[iu] * weights


def derive_meso_generator(bath: BathParams) -> MesoDerivation:
    """Generator matrix on the fluctuation basis, derived from the site Lindbladian.

    Row ``mu`` holds the expansion coefficients of ``L[X_mu]`` over the ``X_nu``.
    """
    basis = basis_observables(bath)
    design = np.column_stack([_sym_coordinates(x.A) for x in basis])
    rows, residuals, scalars = [], [], []
    for x in basis:
        image = lindblad_action(x, bath)
        target = _sym_coordinates(image.A)
        coef, *_ = np.linalg.lstsq(design, target, rcond=None)
        rows.append(coef)
        residuals.append(np.linalg.norm(design @ coef - target))
        scalars.append(image.c)
    residual = float(max(residuals))
    scalars = np.array(scalars)
    if residual > TOL.span_residual or np.max(np.abs(scalars)) > TOL.span_residual:
        raise SpanClosureError(
            f"basis not closed: residual {residual:.3e}, scalar parts {np.max(np.abs(scalars)):.3e}"
        )
    return MesoDerivation(np.array(rows), residual, scalars)


def mean_field_variance(x: QuadraticObservable, bath: BathParams, n: int) -> float:
    """Variance of the mean-field average of ``n`` independent copies of ``x``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    cov = thermal_site_covariance(bath)
    var = product_expectation(x, x, cov).real - expectation(x, cov) ** 2
    return var / n
