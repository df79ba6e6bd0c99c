import itertools

import numpy as np
import pytest

from mesofluct.exceptions import TruncationError, ValidityError
from mesofluct.fock_oracle import (
    FockGrid,
    build_canonicals,
    clt_convergence,
    expect,
    fock_quadratic,
    heisenberg_evolve,
    lindblad_fock,
    mean_field_characteristic,
    sandwich_limit,
    theorem2_sandwich,
    thermal_state,
    weyl_expectation_N,
    weyl_limit,
    weyl_product_residual,
)
from mesofluct.micro_chain import (
    SYMBOLS,
    BathParams,
    basis_observables,
    lindblad_action,
    ordered_moment,
    site_drift_diffusion,
    thermal_site_covariance,
)
from mesofluct.symplectic_core import integrate_linear_ode

E = np.eye(6)


@pytest.fixture(scope="module")
def grid24():
    return FockGrid(24)


@pytest.fixture(scope="module")
def grid8():
    return FockGrid(8)


def test_grid_validation():
    assert FockGrid(4).dim == 25
    with pytest.raises(ValidityError):
        FockGrid(3)


def test_canonical_commutators(grid8):
    x1, p1, x2, p2 = (o.matrix for o in build_canonicals(grid8))
    vac = np.zeros(grid8.dim)
    vac[0] = 1
    assert vac @ x1 @ x1 @ vac == pytest.approx(0.5)
    assert np.max(np.abs(x1 @ p2 - p2 @ x1)) == 0
    mask = grid8.interior()
    for x, p in ((x1, p1), (x2, p2)):
        comm = (x @ p - p @ x)[np.ix_(mask, mask)]
        assert np.max(np.abs(comm - 1j * np.eye(mask.sum()))) < 1e-12


def test_thermal_state_examples(grid24):
    b = BathParams(0.1)
    st = thermal_state(grid24, b)
    x1 = build_canonicals(grid24)[0].matrix
    assert expect(st, x1 @ x1).real == pytest.approx(1 / (2 * b.eta), abs=1e-10)
    assert np.trace(st.rho).real == pytest.approx(1, abs=1e-12)
    cold = thermal_state(FockGrid(6), BathParams(0.005))
    assert cold.rho[0, 0].real == pytest.approx(1, abs=1e-14)
    with pytest.raises(TruncationError) as info:
        thermal_state(FockGrid(6), BathParams(1.0))
    assert info.value.tail_mass > 1e-8


def test_fourth_moments_match_wick(grid24):
    b = BathParams(0.3)
    st = thermal_state(grid24, b)
    ops = [o.matrix for o in build_canonicals(grid24)]
    pairs = {(i, j): ops[i] @ ops[j] for i in range(4) for j in range(4)}
    pops = np.diag(st.rho).real
    cov = thermal_site_covariance(b)
    for idx in itertools.product(range(4), repeat=4):
        # diagonal state: <A B> = sum_n p_n sum_m A_nm B_mn
        val = np.sum(pops[:, None] * pairs[idx[:2]] * pairs[idx[2:]].T)
        ref = ordered_moment(cov, [SYMBOLS[i] for i in idx])
        assert abs(val - ref) <= 1e-6 * max(abs(ref), 1e-3)


def test_weyl_expectation_trivial(grid24):
    assert weyl_expectation_N(np.zeros(6), 10, grid24, BathParams(0.1)) == pytest.approx(1)


def test_weyl_expectation_near_gaussian(grid24):
    b = BathParams(0.1)
    val = weyl_expectation_N(E[0], 10**4, grid24, b)
    assert abs(val - np.exp(-0.25)) < 0.02
    assert weyl_limit(E[0], b) == pytest.approx(np.exp(-0.5 * (b.eta**2 + 1) / (4 * b.eta)))


def test_clt_error_decreases(grid24):
    rep = clt_convergence(np.array([0.3, -0.5, 0.2, 0.7, -0.4, 0.6]), [100, 1000, 10000], grid24, BathParams(0.1))
    errs = [r.error for r in rep.rows]
    assert errs[0] > errs[1] > errs[2]
    # every basis element shifts the photon number by 2, so odd cumulants vanish
    # and the leading correction is the fourth cumulant, O(1/N)
    assert -1.15 <= rep.slope <= -0.85


def test_weyl_product_residual(grid24):
    b = BathParams(0.1)
    assert weyl_product_residual(E[0], np.zeros(6), 100, grid24, b) == 0
    lo = weyl_product_residual(E[0], E[1], 10**4, grid24, b)
    hi = weyl_product_residual(E[0], E[1], 10**5, grid24, b)
    assert lo < 0.02 and hi < lo


def test_weyl_product_parallel_has_no_phase(grid24):
    b = BathParams(0.1)
    r = np.array([0.3, 0.1, -0.2, 0.4, 0.0, 0.5])
    res = weyl_product_residual(r, 2 * r, 10**3, grid24, b)
    # parallel arguments commute: the product equals the combined element exactly
    assert res < 1e-12


def test_mean_field_characteristic(grid24):
    b = BathParams(0.2)
    for x in basis_observables(b):
        assert abs(mean_field_characteristic(x, 10**4, grid24, b) - 1) < 1e-3


def test_heisenberg_unital_and_hermitian(grid8):
    b = BathParams(0.1, 1.0, 0.7)
    out = heisenberg_evolve(np.eye(grid8.dim, dtype=complex), b, 0.5, grid8)
    assert np.max(np.abs(out.matrix - np.eye(grid8.dim))) < 1e-8
    x = fock_quadratic(basis_observables(b)[4], grid8)
    ev = heisenberg_evolve(x, b, 0.2, grid8, dt=1e-3)
    raw = integrate_linear_ode(lindblad_fock(None, grid8, b), x.matrix, 0.2, 1e-3)
    assert np.max(np.abs(raw - raw.conj().T)) < 1e-10
    assert ev.hermitian


def _inner(grid, depth=2):
    n = np.arange(grid.levels)
    return ((n[:, None] < grid.n_max - depth) & (n[None, :] < grid.n_max - depth)).reshape(-1)


def test_generator_matches_symbolic_action(grid8):
    b = BathParams(0.1, 1.0, 0.5)
    mask = _inner(grid8)
    for x in basis_observables(b):
        lhs = lindblad_fock(fock_quadratic(x, grid8).matrix, grid8, b)
        rhs = fock_quadratic(lindblad_action(x, b), grid8).matrix
        assert np.max(np.abs((lhs - rhs)[np.ix_(mask, mask)])) < 1e-12


def test_finite_difference_against_symbolic_action(grid8):
    b = BathParams(0.1, 1.0, 0.5)
    x = basis_observables(b)[0]
    t = 1e-3
    ev = heisenberg_evolve(fock_quadratic(x, grid8), b, t, grid8, dt=1e-4).matrix
    fd = (ev - fock_quadratic(x, grid8).matrix) / t
    ref = fock_quadratic(lindblad_action(x, b), grid8).matrix
    mask = _inner(grid8, 3)
    assert np.max(np.abs((fd - ref)[np.ix_(mask, mask)])) < 1e-2


def test_second_moment_relaxes_like_lyapunov(grid8):
    b = BathParams(0.1, 1.0, 0.0)
    ops = build_canonicals(grid8)
    x1 = ops[0].matrix
    t = 0.5
    # start from the vacuum-squeezed covariance; Heisenberg picture: <x1^2>_t = <Phi_t(x1^2)>_0
    st = thermal_state(grid8, b)
    evolved = heisenberg_evolve(x1 @ x1, b, t, grid8, dt=1e-3).matrix
    val = expect(st, evolved).real
    d, q = site_drift_diffusion(b)
    s0 = thermal_site_covariance(b).matrix
    s_t = integrate_linear_ode(lambda s: d @ s + s @ d.T + q, s0, t, 1e-3)
    assert val == pytest.approx(s_t[0, 0], abs=1e-8)
    assert val == pytest.approx(1 / (2 * b.eta), abs=1e-8)


def test_sandwich_trivial_and_stationary(grid8):
    b = BathParams(0.1, 1.0, 0.9)
    zero = np.zeros(6)
    s = theorem2_sandwich(zero, zero, zero, 0.5, 50, grid8, b)
    assert s.lhs == pytest.approx(1) and s.rhs == pytest.approx(1)
    for t in (0.0, 0.7, 3.0):
        assert abs(sandwich_limit(zero, E[2], zero, t, b) - weyl_limit(E[2], b)) < 1e-12


def test_sandwich_reduces_to_weyl_relation_at_t0():
    b = BathParams(0.2, 1.0, 0.5)
    r1, r = E[0], E[1]
    sb = (b.eta**2 + 1) / (4 * b.eta)
    expected = np.exp(-0.5 * sb * 2) * np.exp(-0.5j * 1.0)
    assert sandwich_limit(r1, r, np.zeros(6), 0.0, b) == pytest.approx(expected)


def test_sandwich_error_decreases(grid8):
    b = BathParams(0.1, 1.0, 0.9)
    errs = [theorem2_sandwich(E[0], E[2], E[1], 0.5, n, grid8, b).error for n in (50, 200, 800)]
    assert errs[0] > errs[1] > errs[2]
