import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from isowell.estimators import FloquetSolver, PerturbedHamiltonian, SmartBasis
from isowell.exceptions import DomainError
from isowell.floquet import DriveParams, floquet_spectrum
from isowell.perturb import DisturbanceParams, diagonalize_perturbed


@pytest.fixture(scope="module")
def smart():
    return SmartBasis().fit()


@pytest.fixture(scope="module")
def perturbed():
    return PerturbedHamiltonian().fit()


class TestSmartBasis:
    def test_params_roundtrip(self):
        est = SmartBasis(lambda1=0.5, size=12)
        assert est.get_params()["lambda1"] == 0.5
        twin = clone(est)
        assert twin.get_params() == est.get_params() and not hasattr(twin, "basis_")
        assert est.set_params(size=8).size == 8

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            SmartBasis().transform([0.0])

    def test_transform_shapes(self, smart):
        assert smart.transform(np.linspace(-2, 2, 9)).shape == (9, 10)
        assert smart.transform(np.zeros((4, 1))).shape == (4, 10)
        assert smart.transform(0.3).shape == (1, 10)
        assert smart.derivative([0.1, 0.2]).shape == (2, 10)
        assert list(smart.get_feature_names_out()[:2]) == ["psi0", "psi1"]

    def test_matches_core(self, smart, sym_basis):
        x = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(smart.transform(x), sym_basis.values(x).T)
        np.testing.assert_allclose(smart.energies_, sym_basis.energies)
        np.testing.assert_allclose(smart.potential(x), sym_basis.potential(x))

    @pytest.mark.parametrize("X", [np.zeros((3, 2)), [np.nan], [[np.inf]]])
    def test_bad_coordinates(self, smart, X):
        with pytest.raises(DomainError):
            smart.transform(X)

    @pytest.mark.parametrize("size", [2, 41, 3.5])
    def test_size_guard(self, size):
        with pytest.raises(DomainError):
            SmartBasis(size=size).fit()

    def test_fit_ignores_data(self):
        a = SmartBasis(size=4).fit()
        b = SmartBasis(size=4).fit(np.ones(3), np.ones(3))
        np.testing.assert_array_equal(a.energies_, b.energies_)


class TestPerturbedHamiltonian:
    def test_matches_core(self, perturbed, sym_basis):
        spec = diagonalize_perturbed(sym_basis, DisturbanceParams(0.6, 1.86, 0.25))
        np.testing.assert_allclose(perturbed.energies_, spec.energies)
        np.testing.assert_allclose(perturbed.coefficients_, spec.coeff_matrix)
        assert perturbed.splitting_ == spec.splitting

    def test_transform_and_predict(self, perturbed):
        x = np.linspace(-2, 0, 5)
        assert perturbed.transform(x).shape == (5, 10)
        rec = perturbed.predict(x)
        np.testing.assert_allclose(rec, perturbed.basis_.potential(x), atol=0.05)

    def test_localization(self, perturbed):
        w = perturbed.localization_.weights
        assert w.shape[0] == 2 and np.all(w.max(axis=1) > 0.9)

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            PerturbedHamiltonian().predict([0.0])


class TestFloquetSolver:
    def test_matches_core(self, sym_basis):
        est = FloquetSolver().fit()
        res = floquet_spectrum(sym_basis, DriveParams(0.65, 0.9))
        np.testing.assert_allclose(est.quasi_energies_, res.quasi_energies, atol=1e-12)
        assert est.doublet_[:2] == res.doublet[:2]
        assert est.ctd_frequency_ == pytest.approx(0.802268, abs=0.005)

    def test_undriven_has_no_ctd(self):
        assert FloquetSolver(S=0.0, size=4).fit().ctd_frequency_ is None

    def test_clone(self):
        est = FloquetSolver(w=0.8)
        assert clone(est).w == 0.8
