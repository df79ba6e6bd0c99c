import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mesofluct.exceptions import ValidityError
from mesofluct.gaussian_states import (
    TWO_MODE_FORM,
    MesoGaussianState,
    TwoModeCovariance,
    closed_form_reduced,
    evolved_reduced,
    reduce_two_modes,
    rotation,
    squeeze,
    squeeze_matrix,
    thermal_meso_state,
)
from mesofluct.meso_dynamics import MESO_FORM
from mesofluct.micro_chain import BathParams
from mesofluct.symplectic_core import check_bona_fide


def test_thermal_state():
    s = thermal_meso_state(BathParams(0.1)).sigma
    # (eta^2 + 1) / (4 eta) at eta = tanh(5); the site variance 1/(2 eta) is 0.5000454
    assert s[0, 0] == pytest.approx(0.5000000020611536, abs=1e-15)
    assert np.allclose(thermal_meso_state(BathParams(0.005)).sigma, 0.5 * np.eye(6), atol=1e-14)
    assert np.all(reduce_two_modes(thermal_meso_state(BathParams(0.3))).sigma_c == 0)


def test_meso_state_rejects_unphysical():
    with pytest.raises(ValidityError):
        MesoGaussianState(0.25 * np.eye(6))


def test_squeeze_blocks():
    b = BathParams(0.1)
    red = reduce_two_modes(squeeze(thermal_meso_state(b), 1.0))
    d = (1 + b.eta**2) / (4 * b.eta)
    assert np.allclose(red.sigma1, d * np.diag([np.e**4, np.e**-4]), rtol=1e-14)
    assert np.allclose(red.sigma2, red.sigma1, atol=0)
    assert np.all(red.sigma_c == 0)
    assert np.array_equal(squeeze(thermal_meso_state(b), 0.0).sigma, thermal_meso_state(b).sigma)


@pytest.mark.parametrize("k", [-1.0, 0.3, 2.0])
def test_squeeze_matrix_symplectic(k):
    s = squeeze_matrix(k)
    assert np.max(np.abs(s @ MESO_FORM @ s.T - MESO_FORM)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 2.0), st.floats(-3, 3))
def test_squeeze_preserves_bona_fide(temp, k):
    out = squeeze(thermal_meso_state(BathParams(temp)), k)
    assert check_bona_fide(out.sigma, MESO_FORM).ok
    assert reduce_two_modes(out).bona_fide().ok


def test_reduce_block_bookkeeping():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    sigma = a @ a.T + 3 * np.eye(6)
    red = reduce_two_modes(sigma)
    assert np.array_equal(red.sigma_c, sigma[:2, 2:4])
    assert np.array_equal(red.matrix, sigma[:4, :4])


def test_correlations_appear_under_evolution():
    red = evolved_reduced(BathParams(0.1, 1.0, 0.5), 1.0, 1.0)
    assert np.max(np.abs(red.sigma_c)) > 1e-3


def test_closed_form_initial_condition():
    b = BathParams(0.2, 1.0, 0.7)
    ref = reduce_two_modes(squeeze(thermal_meso_state(b), 0.8)).matrix
    assert np.max(np.abs(closed_form_reduced(b, 0.8, 0.0).matrix - ref)) < 1e-14


@pytest.mark.parametrize("t", [0.0, 0.5, 7.0])
def test_closed_form_unsqueezed_is_thermal(t):
    b = BathParams(0.2, 1.0, 0.7)
    d = (1 + b.eta**2) / (4 * b.eta)
    assert np.allclose(closed_form_reduced(b, 0.0, t).matrix, d * np.eye(4), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(0.5, 2.0), st.floats(0.0, 1.0), st.floats(0.0, 2.0), st.floats(0.0, 10.0))
def test_closed_form_matches_pipeline(temp, omega, lam, k, t):
    b = BathParams(temp, omega, lam)
    dev = np.max(np.abs(closed_form_reduced(b, k, t).matrix - evolved_reduced(b, k, t).matrix))
    assert dev < 1e-9


def test_closed_form_block_determinants_rotation_free():
    b = BathParams(0.1, 1.3, 0.9)
    red = closed_form_reduced(b, 1.0, 2.0)
    h = rotation(b.omega, 2.0)
    for block in (red.sigma1, red.sigma2, red.sigma_c):
        assert np.linalg.det(h.T @ block @ h) == pytest.approx(np.linalg.det(block), rel=1e-12)


def test_closed_form_large_time_finite():
    red = closed_form_reduced(BathParams(0.1, 1.0, 1.0), 2.0, 1e6)
    assert np.all(np.isfinite(red.matrix))


def test_two_mode_covariance_from_blocks():
    cov = TwoModeCovariance.from_blocks(np.eye(2), 2 * np.eye(2), [[0.1, 0.0], [0.0, -0.1]])
    assert cov.matrix[3, 1] == pytest.approx(-0.1)
    assert check_bona_fide(cov.matrix, TWO_MODE_FORM).ok
    with pytest.raises(ValidityError):
        TwoModeCovariance(np.eye(3))
