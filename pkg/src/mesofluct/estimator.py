"""scikit-learn style facade over the functional modules.

``EntanglementDynamics`` maps a column of times to ``(E, S, Idet)`` rows for one
bath and squeezing; ``CriticalTemperature`` predicts ``T_c`` from squeezing values.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive, check_time_grid
from .entanglement import critical_temperature, log_negativity
from .gaussian_states import MesoGaussianState, reduce_two_modes, squeeze
from .meso_dynamics import evolve_covariance, generator, thermal_covariance
from .micro_chain import BathParams


class EntanglementDynamics(TransformerMixin, BaseEstimator):
    def __init__(self, temperature=0.1, omega=1.0, lam=1.0, k=1.0, provenance="closed-form"):
        self.temperature = temperature
        self.omega = omega
        self.lam = lam
        self.k = k
        self.provenance = provenance

    def fit(self, X=None, y=None):
        check_positive("temperature", self.temperature)
        check_positive("omega", self.omega)
        self.bath_ = BathParams(self.temperature, self.omega, self.lam)
        self.generator_ = generator(self.bath_, self.provenance)
        self.sigma_beta_ = thermal_covariance(self.bath_)
        self.sigma0_ = squeeze(MesoGaussianState(self.sigma_beta_), self.k).sigma
        return self

    def covariance(self, t):
        check_is_fitted(self, "generator_")
        return reduce_two_modes(evolve_covariance(self.generator_, self.sigma_beta_, self.sigma0_, t))

    def transform(self, X):
        """Rows ``[E, S, Idet]``, one per time in ``X``."""
        check_is_fitted(self, "generator_")
        t = check_time_grid(X)
        out = np.empty((t.size, 3))
        for n, tn in enumerate(t):
            rep = log_negativity(self.covariance(tn))
            out[n] = rep.E, rep.S, rep.Idet
        return out


class CriticalTemperature(BaseEstimator):
    def __init__(self, lam=1.0, omega=1.0, tol=1e-3):
        self.lam = lam
        self.omega = omega
        self.tol = tol

    def fit(self, X=None, y=None):
        check_positive("omega", self.omega)
        check_positive("tol", self.tol)
        BathParams(1.0, self.omega, self.lam).require_cp()
        self.fitted_ = True
        return self

    def predict(self, X):
        check_is_fitted(self, "fitted_")
        k = np.asarray(X, dtype=float).reshape(-1)
        return np.array([critical_temperature(kk, self.lam, self.omega, tol=self.tol) for kk in k])
