"""Small dense matrix kernel: exponentials, Hermitian spectra, symplectic forms, RK4."""

from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from ._config import TOL
from .exceptions import DimensionError, DivergenceError, ValidityError

_UNIT = np.array([[0.0, 1.0], [-1.0, 0.0]])


class BonaFide(NamedTuple):
    ok: bool
    margin: float


def _square(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def expm(a, t=1.0):
    """Return ``exp(t * a)`` for a square real or complex matrix.

    Scaling-and-squaring with a Pade approximant (scipy). Works on defective and
    degenerate generators, which matters for the undamped sector at lambda = 1.
    """
    a = _square(a)
    if not np.all(np.isfinite(a)):
        raise ValidityError("matrix exponential of a non-finite matrix")
    return scipy.linalg.expm(t * a)


def symplectic_form(n_modes):
    """Block-diagonal form with ``[[0, 1], [-1, 0]]`` units, ordering (x1, p1, x2, p2, ...)."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise DimensionError(f"n_modes must be a positive integer, got {n_modes}")
    return np.kron(np.eye(int(n_modes)), _UNIT)


def as_hermitian(h, tol=None):
    """Validate near-hermiticity and return the symmetrized matrix ``(h + h^H)/2``."""
    h = _square(h, "Hermitian matrix")
    tol = TOL.symmetry if tol is None else tol
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol * scale:
        raise ValidityError("matrix is not Hermitian within tolerance")
    return 0.5 * (h + h.conj().T)


def min_eig_hermitian(h, tol=None):
    """Smallest eigenvalue of a Hermitian matrix."""
    h = as_hermitian(h, tol)
    return float(np.linalg.eigvalsh(h)[0])


def check_bona_fide(cov, form=None, tol=None):
    """Robertson-Schrodinger test ``cov + (i/2) form >= 0``.

    Returns ``(ok, margin)`` with ``margin`` the smallest eigenvalue of the
    Hermitian combination.
    """
    cov = _square(cov, "covariance")
    if form is None:
        if cov.shape[0] % 2:
            raise DimensionError("covariance must have even dimension")
        form = symplectic_form(cov.shape[0] // 2)
    form = _square(form, "symplectic form")
    if form.shape != cov.shape:
        raise DimensionError(f"covariance {cov.shape} and form {form.shape} differ")
    tol = TOL.bona_fide if tol is None else tol
    margin = min_eig_hermitian(cov + 0.5j * form)
    return BonaFide(margin >= -tol, margin)


def integrate_linear_ode(
    rhs: Callable[[np.ndarray], np.ndarray], x0, t: float, dt: float
) -> np.ndarray:
    """Classical fixed-step RK4 for ``dX/dt = rhs(X)`` from 0 to ``t``.

    The step is shrunk slightly so that an integer number of steps lands exactly
    on ``t``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    x = np.array(x0)
    x = x.astype(np.result_type(x.dtype, float), copy=True)
    if t == 0:
        return x
    n_steps = max(1, int(np.ceil(t / dt - 1e-12)))
    h = t / n_steps
    for step in range(1, n_steps + 1):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(step)
    return x
