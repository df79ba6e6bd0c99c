"""Truncated-Fock oracle for one site (two bosonic modes).

Finite-N quantities are single-site expectations raised to the N-th power; by the
product structure of the state and the dynamics this is exact, so no N-site object
is ever built.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._config import TOL
from .exceptions import TruncationError, ValidityError
from .meso_dynamics import generator, propagate, thermal_covariance
from .micro_chain import BathParams, QuadraticObservable, basis_observables, fluctuation_kinematics, kossakowski
from .symplectic_core import integrate_linear_ode


@dataclass(frozen=True)
class FockGrid:
    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 4:
            raise ValidityError("n_max must be an integer >= 4")

    @property
    def levels(self):
        return self.n_max + 1

    @property
    def dim(self):
        return self.levels**2

    def interior(self):
        """Boolean mask of basis states with both occupations below the top level."""
        n = np.arange(self.levels)
        return ((n[:, None] < self.n_max) & (n[None, :] < self.n_max)).reshape(-1)


class FockOperator(NamedTuple):
    matrix: np.ndarray
    hermitian: bool


class TruncatedState(NamedTuple):
    rho: np.ndarray
    tail_mass: float


def _operator(m, hermitian=False):
    if hermitian and np.max(np.abs(m - m.conj().T)) > TOL.symmetry:
        raise ValidityError("operator flagged hermitian is not")
    return FockOperator(m, hermitian)


@lru_cache(maxsize=8)
def _canonicals(n_max):
    a = np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = (a - a.conj().T) / (1j * np.sqrt(2.0))
    eye = np.eye(n_max + 1)
    ops = (np.kron(x, eye), np.kron(p, eye), np.kron(eye, x), np.kron(eye, p))
    for o in ops:
        o.setflags(write=False)
    return ops


def build_canonicals(grid: FockGrid):
    """``x1, p1, x2, p2`` on the truncated two-mode space."""
    return tuple(_operator(o, hermitian=True) for o in _canonicals(grid.n_max))


def number_total(grid: FockGrid):
    n = np.arange(grid.levels, dtype=float)
    return (n[:, None] + n[None, :]).reshape(-1)


def thermal_state(grid: FockGrid, bath: BathParams, strict=True) -> TruncatedState:
    """Normalized ``exp(-beta H)`` with ``H = omega (n1 + n2 + 1)``.

    The tail mass is the weight on states with either occupation in the top two
    levels; above ``TOL.tail_mass`` a :class:`TruncationError` is raised unless
    ``strict`` is false.
    """
    n = np.arange(grid.levels, dtype=float)
    single = np.exp(-bath.beta * bath.omega * n)
    single /= single.sum()
    pops = np.outer(single, single).reshape(-1)
    top = single[-2:].sum()
    tail = float(1.0 - (1.0 - top) ** 2)
    if strict and tail > TOL.tail_mass:
        raise TruncationError(tail, grid.n_max)
    return TruncatedState(np.diag(pops).astype(complex), tail)


def expect(state: TruncatedState, op) -> complex:
    m = op.matrix if isinstance(op, FockOperator) else op
    return complex(np.trace(state.rho @ m))


def fock_quadratic(x: QuadraticObservable, grid: FockGrid) -> FockOperator:
    """``sum A_ij R_i R_j + c`` as a truncated matrix."""
    r = _canonicals(grid.n_max)
    m = x.c * np.eye(grid.dim, dtype=complex)
    for i in range(4):
        for j in range(4):
            if x.A[i, j] != 0:
                m = m + x.A[i, j] * (r[i] @ r[j])
    return _operator(0.5 * (m + m.conj().T), hermitian=True)


def weyl_generator(r, grid: FockGrid, bath: BathParams):
    """Hermitian ``X_r = sum r_mu X_mu`` over the fluctuation basis."""
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.shape != (6,):
        raise ValidityError("r must be a 6-vector")
    a = sum(rm * x.A for rm, x in zip(r, basis_observables(bath)))
    return fock_quadratic(QuadraticObservable(a), grid)


def _expi(h, scale):
    """``exp(i scale h)`` for hermitian ``h`` via its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * scale * w)) @ v.conj().T


def _centered(r, grid, bath, state):
    x = weyl_generator(r, grid, bath).matrix
    return x - expect(state, x).real * np.eye(grid.dim)


def _power(z, n):
    """``z**n`` through the principal logarithm; stable for ``z`` near 1 and large ``n``."""
    if z == 0:
        return 0j
    return complex(np.exp(n * np.log(complex(z))))


def _check_n(n):
    if int(n) != n or n < 1:
        raise ValidityError("N must be a positive integer")


def weyl_expectation_N(r, n, grid: FockGrid, bath: BathParams) -> complex:
    """``<exp(i (X_r - <X_r>) / sqrt(N))>^N``."""
    _check_n(n)
    state = thermal_state(grid, bath)
    u = _expi(_centered(r, grid, bath, state), 1.0 / np.sqrt(n))
    return _power(expect(state, u), n)


def weyl_limit(r, bath: BathParams) -> float:
    r = np.asarray(r, dtype=float)
    return float(np.exp(-0.5 * r @ thermal_covariance(bath) @ r))


class ConvergenceRow(NamedTuple):
    N: int
    lhs: complex
    rhs: complex
    error: float


class ConvergenceReport(NamedTuple):
    rows: list
    slope: float


def _slope(ns, errors):
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(errors)), 1)[0])


def clt_convergence(r, n_list, grid: FockGrid, bath: BathParams) -> ConvergenceReport:
    """Finite-N Weyl expectations against the Gaussian limit, with the log-log error slope."""
    rhs = weyl_limit(r, bath)
    rows = []
    for n in n_list:
        lhs = weyl_expectation_N(r, n, grid, bath)
        rows.append(ConvergenceRow(int(n), lhs, complex(rhs), abs(lhs - rhs)))
    slope = _slope([row.N for row in rows], [row.error for row in rows]) if len(rows) > 1 else float("nan")
    return ConvergenceReport(rows, slope)


def weyl_product_residual(r1, r2, n, grid: FockGrid, bath: BathParams) -> float:
    """``|<W_N(r1) W_N(r2)> - <W_N(r1+r2)> exp(-i/2 r1.s.r2)|`` with single-site factors."""
    _check_n(n)
    r1, r2 = np.asarray(r1, dtype=float), np.asarray(r2, dtype=float)
    state = thermal_state(grid, bath)
    eps = 1.0 / np.sqrt(n)
    u1 = _expi(_centered(r1, grid, bath, state), eps)
    u2 = _expi(_centered(r2, grid, bath, state), eps)
    u12 = _expi(_centered(r1 + r2, grid, bath, state), eps)
    form = fluctuation_kinematics(bath).form
    lhs = _power(expect(state, u1 @ u2), n)
    rhs = _power(expect(state, u12), n) * np.exp(-0.5j * (r1 @ form @ r2))
    return float(abs(lhs - rhs))


def mean_field_characteristic(x: QuadraticObservable, n, grid: FockGrid, bath: BathParams) -> complex:
    """``<exp(i X / N)>^N``; tends to ``exp(i <X>)`` as N grows."""
    _check_n(n)
    state = thermal_state(grid, bath)
    u = _expi(fock_quadratic(x, grid).matrix, 1.0 / n)
    return _power(expect(state, u), n)


def lindblad_fock(x, grid: FockGrid, bath: BathParams):
    """Heisenberg generator ``i[H, X] + sum C_ab (V_a X V_b - 1/2 {V_a V_b, X})`` with ``V = R``."""
    r = _canonicals(grid.n_max)
    c = kossakowski(bath)
    h = np.diag(bath.omega * (number_total(grid) + 1.0)).astype(complex)
    w = [sum(c[a, b] * r[a] for a in range(4)) for b in range(4)]
    k = sum(w[b] @ r[b] for b in range(4))

    def rhs(m):
        out = 1j * (h @ m - m @ h) - 0.5 * (k @ m + m @ k)
        for b in range(4):
            out = out + w[b] @ m @ r[b]
        return out

    return rhs(x) if x is not None else rhs


def heisenberg_evolve(x, bath: BathParams, t, grid: FockGrid, dt=1e-3) -> FockOperator:
    """Integrate the dual Lindblad flow on the truncated space with fixed-step RK4."""
    if t < 0:
        raise ValueError("t must be non-negative")
    m = x.matrix if isinstance(x, FockOperator) else np.asarray(x, dtype=complex)
    hermitian = x.hermitian if isinstance(x, FockOperator) else False
    out = integrate_linear_ode(lindblad_fock(None, grid, bath), m, t, dt)
    if hermitian:
        out = 0.5 * (out + out.conj().T)
    return FockOperator(out, hermitian)


class Sandwich(NamedTuple):
    lhs: complex
    rhs: complex
    error: float


def sandwich_limit(r1, r, r2, t, bath: BathParams) -> complex:
    """Limit of the Weyl sandwich under the mesoscopic dynamics.

    ``exp(-1/2 [(r1+r_t+r2).S.(r1+r_t+r2) + r.K_t.r] - i/2 Y_t)`` with
    ``r_t = M_t^T r`` and ``Y_t = r1.s.r_t + r_t.s.r2 + r1.s.r2``.
    """
    r1, r, r2 = (np.asarray(v, dtype=float) for v in (r1, r, r2))
    kin = fluctuation_kinematics(bath)
    s, form = kin.sigma_beta, kin.form
    b = propagate(generator(bath), s, t)
    rt = b.M.T @ r
    tot = r1 + rt + r2
    y = r1 @ form @ rt + rt @ form @ r2 + r1 @ form @ r2
    return complex(np.exp(-0.5 * (tot @ s @ tot + r @ b.K @ r) - 0.5j * y))


def theorem2_sandwich(r1, r, r2, t, n, grid: FockGrid, bath: BathParams, dt=1e-3) -> Sandwich:
    """Finite-N sandwich ``<W(r1) Phi_t[W(r)] W(r2)>`` against its mesoscopic limit."""
    _check_n(n)
    r1, r, r2 = (np.asarray(v, dtype=float) for v in (r1, r, r2))
    state = thermal_state(grid, bath)
    eps = 1.0 / np.sqrt(n)
    u1 = _expi(_centered(r1, grid, bath, state), eps)
    u = _expi(_centered(r, grid, bath, state), eps)
    u2 = _expi(_centered(r2, grid, bath, state), eps)
    ut = heisenberg_evolve(u, bath, t, grid, dt).matrix
    lhs = _power(expect(state, u1 @ ut @ u2), n)
    rhs = sandwich_limit(r1, r, r2, t, bath)
    return Sandwich(lhs, rhs, float(abs(lhs - rhs)))
