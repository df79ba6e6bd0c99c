"""Two-mode Gaussian entanglement: invariants, separability, logarithmic negativity.

Also the time-domain analysis built on it: entanglement curves, sudden birth and
death times, the long-time plateau, and the critical temperature at lambda = 1.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from ._config import TOL
from .exceptions import BracketError, ConsistencyError, ConvergenceError, ResolutionError
from .gaussian_states import TwoModeCovariance, evolved_reduced
from .micro_chain import BathParams

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EntanglementReport:
    I1: float
    I2: float
    I3: float
    I4: float
    S: float
    Idet: float
    E: float
    separable: bool

    def to_dict(self):
        return {
            "I1": self.I1,
            "I2": self.I2,
            "I3": self.I3,
            "I4": self.I4,
            "S": self.S,
            "Idet": self.Idet,
            "E": self.E,
            "separable": self.separable,
        }


def _matrix(cov):
    return cov.matrix if isinstance(cov, TwoModeCovariance) else np.asarray(cov, dtype=float)


def invariants(cov):
    """Local symplectic invariants ``(det S1, det S2, det Sc, tr(S1 J Sc J S2 J Sc^T J))``."""
    m = _matrix(cov)
    s1, s2, sc = m[:2, :2], m[2:, 2:], m[:2, 2:]
    i4 = np.trace(s1 @ _J @ sc @ _J @ s2 @ _J @ sc.T @ _J)
    return (float(np.linalg.det(s1)), float(np.linalg.det(s2)), float(np.linalg.det(sc)), float(i4))


def _score(i1, i2, i3, i4):
    s = i1 * i2 + (0.25 - abs(i3)) ** 2 - i4 - 0.25 * (i1 + i2)
    # rounding scale of the terms that cancel in s
    floor = 16 * _EPS * (abs(i1 * i2) + (0.25 - abs(i3)) ** 2 + abs(i4) + 0.25 * abs(i1 + i2))
    return s, floor


def separability(cov):
    """Partial-transpose criterion; returns ``(S, separable)`` with separable iff ``S >= 0``."""
    s, _ = _score(*invariants(cov))
    return s, s >= 0


def log_negativity(cov) -> EntanglementReport:
    i1, i2, i3, i4 = invariants(cov)
    s, _ = _score(i1, i2, i3, i4)
    half = 0.5 * (i1 + i2) - i3
    # half^2 - det(S) expanded so that equal roots do not cancel
    arg = 0.25 * (i1 - i2) ** 2 - (i1 + i2) * i3 + i4
    if arg < -TOL.sqrt_error * max(1.0, half**2):
        raise ConsistencyError(f"negative discriminant {arg:.3e}; covariance is not physical")
    if arg < 0:
        arg = 0.0
    idet = half - np.sqrt(arg)
    e = max(0.0, -0.5 * np.log2(4.0 * idet)) if idet > 0 else float("inf")
    return EntanglementReport(i1, i2, i3, i4, s, float(idet), float(e), s >= 0)


@dataclass(frozen=True)
class EntanglementCurve:
    bath: BathParams
    k: float
    t: np.ndarray
    E: np.ndarray
    S: np.ndarray
    Idet: np.ndarray
    covariances: np.ndarray = field(repr=False)


def entanglement_curve(bath: BathParams, k: float, t_grid) -> EntanglementCurve:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if t[0] < 0:
        raise ValueError("times must be non-negative")
    covs = np.empty((t.size, 4, 4))
    e = np.empty(t.size)
    s = np.empty(t.size)
    idet = np.empty(t.size)
    for n, tn in enumerate(t):
        red = evolved_reduced(bath, k, tn)
        rep = log_negativity(red)
        covs[n] = red.matrix
        e[n], s[n], idet[n] = rep.E, rep.S, rep.Idet
    for a in (t, e, s, idet, covs):
        a.setflags(write=False)
    return EntanglementCurve(bath, float(k), t, e, s, idet, covs)


def peak_E(curve: EntanglementCurve) -> float:
    """Maximum of ``E(t)``, refined between the neighbours of the best sample."""
    n = int(np.argmax(curve.E))
    if curve.E[n] == 0.0:
        return 0.0
    lo, hi = curve.t[max(n - 1, 0)], curve.t[min(n + 1, curve.t.size - 1)]

    def neg(t):
        return -log_negativity(evolved_reduced(curve.bath, curve.k, t)).E

    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return max(float(curve.E[n]), -float(res.fun))


class SuddenTimes(NamedTuple):
    t_birth: Optional[float]
    t_death: Optional[float]


def _entangled_at(bath, k, t):
    # same sign as S for physical states, but resolved far closer to the boundary
    cov = evolved_reduced(bath, k, t)
    floor = 64 * _EPS * float(np.max(np.abs(cov.matrix))) ** 2
    return log_negativity(cov).Idet < 0.25 - floor


def _bisect_time(bath, k, lo, hi, tol):
    lo_state = _entangled_at(bath, k, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _entangled_at(bath, k, mid) == lo_state:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sudden_times(curve: EntanglementCurve, tol=None) -> SuddenTimes:
    """Onset and disappearance of entanglement, refined by bisection to ``tol``.

    The verdict is read from ``Idet - 1/4``: same sign as ``S`` for physical
    states, but still resolved when both partially transposed symplectic
    eigenvalues sit next to 1/2. Values within rounding of the boundary count as
    separable. Each sampling interval is also probed at its midpoint; a flip there
    that the endpoints miss raises :class:`ResolutionError`.
    """
    tol = TOL.time_root if tol is None else tol
    t = curve.t
    ent = np.array([_entangled_at(curve.bath, curve.k, tn) for tn in t])
    for n in range(t.size - 1):
        if ent[n] == ent[n + 1]:
            mid = _entangled_at(curve.bath, curve.k, 0.5 * (t[n] + t[n + 1]))
            if mid != ent[n]:
                raise ResolutionError(
                    f"unresolved sign change of S in [{t[n]}, {t[n + 1]}]; refine the grid"
                )
    births = [n for n in range(1, t.size) if ent[n] and not ent[n - 1]]
    deaths = [n for n in range(1, t.size) if ent[n - 1] and not ent[n]]
    t_birth = None
    if births:
        n = births[0]
        t_birth = _bisect_time(curve.bath, curve.k, t[n - 1], t[n], tol)
    elif ent[0]:
        t_birth = float(t[0])
    t_death = None
    if deaths and not ent[-1]:
        n = deaths[-1]
        t_death = _bisect_time(curve.bath, curve.k, t[n - 1], t[n], tol)
    return SuddenTimes(t_birth, t_death)


def asymptotic_E(bath: BathParams, k: float, t_start=1.0, t_limit=1e4, tol=None) -> float:
    """Long-time logarithmic negativity.

    The time is doubled until the local invariants stop moving and ``E`` changes
    by less than ``tol`` between ``t`` and ``2t``.
    """
    tol = TOL.plateau if tol is None else tol
    # the free rotation never damps, so convergence is judged on the local invariants
    t = t_start
    prev = log_negativity(evolved_reduced(bath, k, t))
    while 2 * t <= t_limit:
        t *= 2
        cur = log_negativity(evolved_reduced(bath, k, t))
        a = np.array([cur.I1, cur.I2, cur.I3, cur.I4])
        b = np.array([prev.I1, prev.I2, prev.I3, prev.I4])
        if np.max(np.abs(a - b)) < 1e-9 * max(1.0, np.max(np.abs(a))) and abs(cur.E - prev.E) < tol:
            return cur.E
        prev = cur
    raise ConvergenceError(f"no entanglement plateau reached by t={t_limit}")


def asymptotic_E_closed_form(bath: BathParams, k: float) -> float:
    """Plateau value from the limiting covariance (valid for lambda = 1 and lambda < 1)."""
    eta = bath.eta
    d2 = ((1.0 + eta**2) / (4.0 * eta)) ** 2
    if abs(bath.lam) == 1.0:
        arg = (3.0 + np.exp(-4.0 * abs(k))) * d2
    else:
        arg = 4.0 * d2
    return max(0.0, -0.5 * np.log2(arg))


def critical_temperature(k, lam=1.0, omega=1.0, bracket=(0.01, 5.0), tol=None) -> float:
    """Temperature above which no entanglement survives at long times.

    Bisection on the sign of :func:`asymptotic_E` over ``bracket``.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    tol = TOL.temperature_root if tol is None else tol

    def entangled(temp):
        return asymptotic_E(BathParams(temp, omega, lam), k) > 0

    lo, hi = bracket
    if not entangled(lo) or entangled(hi):
        raise BracketError(f"no change of asymptotic entanglement in T in [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_temperature_closed_form(k, omega=1.0) -> float:
    """Root of ``(3 + exp(-4k)) (1 + eta^2)^2 = 16 eta^2`` mapped to a temperature."""
    if k < 0:
        raise ValueError("k must be non-negative")
    c = 4.0 / np.sqrt(3.0 + np.exp(-4.0 * k))  # (1 + eta^2) / eta
    eta = 0.5 * (c - np.sqrt(max(c * c - 4.0, 0.0)))
    if eta >= 1.0:
        return 0.0
    return omega / (2.0 * np.arctanh(eta))


class BoundaryPoint(NamedTuple):
    k: float
    T_c: float
    margin: float


def phase_boundary(k_values, lam=1.0, omega=1.0, tol=None):
    """Critical temperature for each squeezing value, in increasing ``k`` order."""
    tol = TOL.temperature_root if tol is None else tol
    return [
        BoundaryPoint(float(k), critical_temperature(k, lam, omega, tol=tol), 0.5 * tol)
        for k in sorted(k_values)
    ]


def script_E_reference(bath: BathParams, k: float, t: float) -> float:
    """Analytic diagnostic expression for the squeezed-state evolution.

    It equals the squared smallest symplectic eigenvalue of the partially
    transposed reduced covariance (the ``Idet`` of :func:`log_negativity`) for
    ``k >= 0``; entanglement corresponds to values below 1/4.
    """
    eta, lam = bath.eta, bath.lam
    d = (1.0 + eta**2) / (4.0 * eta)
    x = eta * t / (1.0 + eta)
    return (
        d**2
        * np.exp(-4.0 * (k + 2.0 * x))
        * (np.exp(4.0 * k) + np.exp(4.0 * x) - 1.0)
        * (np.exp(4.0 * (k + x)) - np.expm1(4.0 * k) * np.cosh(2.0 * lam * x) ** 2)
    )
