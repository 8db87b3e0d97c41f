"""scikit-learn style front ends.

Each estimator takes its physical parameters in ``__init__`` (so
``get_params``/``set_params``/``clone`` work), does the expensive work in
``fit`` and exposes results as trailing-underscore attributes.  The input
``X`` is always a set of coordinates ``xi``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .floquet import DriveParams, ctd_frequency, dipole_matrix, floquet_spectrum
from .model import DeformationParams, build_basis, classify_wells
from .perturb import DisturbanceParams, diagonalize_perturbed, localization_report, reconstruct_potential
from .validation import check_positive_int, check_xi

__all__ = ["SmartBasis", "PerturbedHamiltonian", "FloquetSolver"]


class _ModelParamsMixin:
    def _params(self):
        return DeformationParams(self.nu, self.mu, self.lambda1, self.lambda2, self.omega0)

    def _fit_basis(self):
        size = check_positive_int(self.size, "size", 3, 40)
        self.params_ = self._params()
        self.basis_ = build_basis(self.params_, size, self.halfwidth)
        self.wells_ = classify_wells(self.params_, self.halfwidth)


class SmartBasis(_ModelParamsMixin, TransformerMixin, BaseEstimator):
    """Exact eigenbasis of one deformed Hamiltonian as a transformer.

    ``transform(xi)`` returns the basis functions as features, shape
    ``(n_samples, size)``.

    Examples
    --------
    >>> sb = SmartBasis(nu=-3.0, mu=-3.02).fit()
    >>> sb.energies_[:3]
    array([-2.52, -2.5 ,  0.5 ])
    """

    def __init__(self, nu=-3.0, mu=-3.02, lambda1=1.0, lambda2=1.0, omega0=1.0, size=10,
                 halfwidth=8.0):
        self.nu = nu
        self.mu = mu
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.omega0 = omega0
        self.size = size
        self.halfwidth = halfwidth

    def fit(self, X=None, y=None):
        self._fit_basis()
        self.energies_ = np.array(self.basis_.energies)
        self.n_features_out_ = self.basis_.size
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        return self.basis_.values(check_xi(X)).T

    def derivative(self, X):
        check_is_fitted(self, "basis_")
        return self.basis_.evaluate(check_xi(X))[1].T

    def potential(self, X):
        check_is_fitted(self, "basis_")
        return self.basis_.potential(check_xi(X))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "basis_")
        return np.array([f"psi{n}" for n in range(self.basis_.size)], dtype=object)


class PerturbedHamiltonian(_ModelParamsMixin, TransformerMixin, BaseEstimator):
    """Deformed Hamiltonian plus a compact bump, diagonalized in the smart basis.

    ``transform(xi)`` evaluates the perturbed eigenstates; ``predict(xi)``
    returns the potential rebuilt from the perturbed ground state.
    """

    def __init__(self, nu=-3.0, mu=-3.02, lambda1=1.0, lambda2=1.0, omega0=1.0, s=0.6, b=1.86,
                 c=0.25, size=10, halfwidth=8.0):
        self.nu = nu
        self.mu = mu
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.omega0 = omega0
        self.s = s
        self.b = b
        self.c = c
        self.size = size
        self.halfwidth = halfwidth

    def fit(self, X=None, y=None):
        self._fit_basis()
        self.disturbance_ = DisturbanceParams(self.s, self.b, self.c)
        self.spectrum_ = diagonalize_perturbed(self.basis_, self.disturbance_)
        self.energies_ = np.array(self.spectrum_.energies)
        self.coefficients_ = np.array(self.spectrum_.coeff_matrix)
        self.splitting_ = self.spectrum_.splitting
        self.localization_ = localization_report(self.spectrum_, self.wells_, states=[0, 1])
        return self

    def transform(self, X):
        check_is_fitted(self, "spectrum_")
        xi = check_xi(X)
        return np.array([self.spectrum_.evaluate(xi, n)[0] for n in range(self.spectrum_.basis_size)]).T

    def predict(self, X):
        check_is_fitted(self, "spectrum_")
        return reconstruct_potential(self.spectrum_, None, check_xi(X))


class FloquetSolver(_ModelParamsMixin, BaseEstimator):
    """Quasi-energies of the dipole-driven Hamiltonian via the monodromy."""

    def __init__(self, nu=-3.0, mu=-3.02, lambda1=1.0, lambda2=1.0, omega0=1.0, S=0.65, w=0.9,
                 phi0=0.0, size=10, halfwidth=8.0, tol=1e-10):
        self.nu = nu
        self.mu = mu
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.omega0 = omega0
        self.S = S
        self.w = w
        self.phi0 = phi0
        self.size = size
        self.halfwidth = halfwidth
        self.tol = tol

    def fit(self, X=None, y=None):
        self._fit_basis()
        self.drive_ = DriveParams(self.S, self.w, self.phi0)
        self.result_ = floquet_spectrum(self.basis_, self.drive_, self.basis_.size, self.tol)
        self.quasi_energies_ = np.array(self.result_.quasi_energies)
        self.doublet_ = self.result_.doublet
        self.dipole_ = dipole_matrix(self.basis_)
        self.ctd_frequency_ = ctd_frequency(self.S, self.dipole_[0, 1]) if self.S > 0 else None
        return self
