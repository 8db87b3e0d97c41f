import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isowell.exceptions import DomainError
from isowell.model import (DeformationParams, OscillatorBasis, build_basis, classify_wells,
                           norm_constants, potential, seed_wronskian, spectrum, sublevel_psi,
                           wronskian)
from isowell.numerics import integrate, integrate_line
from isowell.specfun import gamma

from .conftest import params

XS = np.linspace(-4.0, 4.0, 33)


class TestParams:
    @pytest.mark.parametrize("kw", [
        dict(nu=-3.02, mu=-3.0, lambda1=1.0),
        dict(nu=0.1, mu=-1.0, lambda1=1.0),
        dict(nu=-3.0, mu=-3.02, lambda1=0.0),
        dict(nu=-3.0, mu=-3.02, lambda1=1.0, lambda2=-1.0),
        dict(nu=-3.0, mu=-3.02, lambda1=1.0, omega0=0.0),
        dict(nu=math.nan, mu=-3.02, lambda1=1.0),
    ])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            DeformationParams(**kw)

    def test_derived(self, sym_params):
        assert sym_params.e_minus1 == pytest.approx(-2.5)
        assert sym_params.e_minus2 == pytest.approx(-2.52)
        assert sym_params.splitting == pytest.approx(0.02)
        assert sym_params.replace(lambda1=0.5).lambda1 == 0.5


class TestSublevels:
    def test_odd_combination_vanishes_at_origin(self, sym_params):
        assert abs(sublevel_psi(2, sym_params, 0.0)[0]) < 1e-15

    def test_even_combination(self, sym_params):
        a = sublevel_psi(1, sym_params, XS)[0]
        np.testing.assert_allclose(a, a[::-1], rtol=1e-12)

    def test_specfun_composition(self):
        p = params(0.5)
        with mp.workdps(30):
            ref = float(mp.pcfd(-3, mp.sqrt(2)) + 0.5 * mp.pcfd(-3, -mp.sqrt(2)))
        assert sublevel_psi(1, p, 1.0)[0] == pytest.approx(ref, rel=1e-11)

    def test_bad_index(self, sym_params):
        with pytest.raises(DomainError):
            sublevel_psi(3, sym_params, 0.0)


class TestWronskian:
    def test_even_for_symmetric(self, sym_params):
        W = wronskian(sym_params, XS)[0]
        np.testing.assert_allclose(W, W[::-1], rtol=1e-11)

    @pytest.mark.parametrize("lam", [1.0, 0.5, 0.05])
    def test_derivatives_match_differences(self, lam):
        p = params(lam)
        h = 1e-6
        W, dW, d2W = wronskian(p, XS)
        fd1 = (wronskian(p, XS + h)[0] - wronskian(p, XS - h)[0]) / (2 * h)
        fd2 = (wronskian(p, XS + h)[1] - wronskian(p, XS - h)[1]) / (2 * h)
        np.testing.assert_allclose(dW, fd1, atol=1e-6 * max(1.0, np.abs(fd1).max()))
        np.testing.assert_allclose(d2W, fd2, atol=1e-6 * max(1.0, np.abs(fd2).max()))

    def test_no_zeros_in_box(self, sym_params):
        W = wronskian(sym_params, np.linspace(-8, 8, 4001))[0]
        assert np.all(W > 0) or np.all(W < 0)

    @pytest.mark.parametrize("order", [-3.0, -3.02, -1.0, -0.02])
    def test_seed_pair_constancy(self, order):
        x = np.linspace(-5, 5, 41)
        np.testing.assert_allclose(seed_wronskian(order, x), 2 * math.sqrt(math.pi) / gamma(-order),
                                   rtol=1e-9)


class TestPotential:
    def test_symmetric(self, sym_params):
        U = potential(sym_params, XS)
        np.testing.assert_allclose(U, U[::-1], atol=1e-10)

    @pytest.mark.parametrize("lam", [0.5, 0.05])
    def test_asymmetric(self, lam):
        U = potential(params(lam), XS)
        assert np.abs(U - U[::-1]).max() > 1e-2

    def test_log_wronskian_curvature(self, sym_params):
        h = 1e-3
        x = h * np.arange(-2, 3)
        lw = np.log(np.abs(wronskian(sym_params, x)[0]))
        d2 = (-lw[0] + 16 * lw[1] - 30 * lw[2] + 16 * lw[3] - lw[4]) / (12 * h * h)
        assert potential(sym_params, 0.0) == pytest.approx(-d2, abs=1e-6)

    def test_asymptote_is_seed_minus_two(self, sym_params):
        # two added levels shift the far-field potential by -2 (O(1/xi^2) approach)
        gaps = [abs(potential(sym_params, x) - 0.5 * x * x + 2.0) for x in (4.0, 6.0, 8.0)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.06
        right = potential(sym_params, -8.0) - 32.0
        assert right == pytest.approx(potential(sym_params, 8.0) - 32.0, abs=1e-10)


class TestWells:
    def test_symmetric_two_wells(self, sym_wells):
        assert sym_wells.well_count == 2
        assert len(sym_wells.barrier_tops) == 1
        assert abs(sym_wells.barrier_tops[0][0]) < 1e-9
        (a, _), (b, _) = sym_wells.minima
        assert a == pytest.approx(-b, abs=1e-8)

    def test_three_wells(self, three_params):
        w = classify_wells(three_params)
        assert w.well_count == 3 and len(w.barrier_tops) == 2

    def test_minimum_shifts_right(self, sym_wells):
        w = classify_wells(params(0.05))
        assert w.well_count == 2
        assert w.minima[-1][0] > sym_wells.minima[-1][0] + 0.1

    def test_regions_partition(self, sym_wells):
        r = sym_wells.regions(8.0)
        assert r[0][0] == -8.0 and r[-1][1] == 8.0
        assert all(a[1] == b[0] for a, b in zip(r, r[1:]))

    def test_dimple_kept_when_not_merging(self, sym_params):
        assert classify_wells(sym_params, min_depth=0.0).well_count == 3


class TestNormConstants:
    def test_formula(self, sym_params):
        n_ground, _ = norm_constants(sym_params)
        assert n_ground ** -2 == pytest.approx(4 * math.sqrt(math.pi) * 0.02 / gamma(3.02), rel=1e-14)

    def test_linear_in_lambda(self):
        a = norm_constants(params(1.0))[1] ** -2
        b = norm_constants(params(2.0))[1] ** -2
        assert b == pytest.approx(2 * a, rel=1e-14)

    @pytest.mark.parametrize("lam", [1.0, 0.5, 0.05])
    def test_normalizes_ground_state(self, lam):
        p = params(lam)
        n_ground, _ = norm_constants(p)

        def f(x):
            p1 = sublevel_psi(1, p, x)[0]
            return (p1 / wronskian(p, x)[0] / n_ground) ** 2

        assert integrate(f, -8, 8) == pytest.approx(1.0, abs=1e-8)


class TestSpectrum:
    def test_examples(self, sym_params):
        np.testing.assert_allclose(spectrum(sym_params, 4), [-2.52, -2.5, 0.5, 1.5])
        np.testing.assert_allclose(spectrum(params(nu=-0.02, mu=-1.0), 3), [-0.5, 0.48, 0.5])

    def test_lambda_independent(self):
        np.testing.assert_array_equal(spectrum(params(1.0), 10), spectrum(params(0.05), 10))

    def test_count_guard(self, sym_params):
        with pytest.raises(DomainError):
            spectrum(sym_params, 1)


def node_count(v):
    s = np.sign(v[np.abs(v) > 1e-8 * np.abs(v).max()])
    return int(np.sum(s[1:] != s[:-1]))


class TestBasis:
    def test_energies(self, sym_basis):
        np.testing.assert_allclose(sym_basis.energies, [-2.52, -2.5, 0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5])

    @pytest.mark.parametrize("name", ["sym_basis", "asym_basis", "weak_basis", "three_basis"])
    def test_gram(self, name, request):
        b = request.getfixturevalue(name)
        assert np.abs(b.gram() - np.eye(10)).max() < 1e-8

    def test_construction_branch(self, sym_basis):
        assert sym_basis.construction == "crum"
        assert max(sym_basis.hamiltonian_residuals()) <= 1e-6

    def test_parity(self, sym_basis):
        v = sym_basis.values(XS, 2)
        np.testing.assert_allclose(v[0], v[0][::-1], atol=1e-12)
        np.testing.assert_allclose(v[1], -v[1][::-1], atol=1e-12)

    @pytest.mark.parametrize("name", ["sym_basis", "weak_basis", "three_basis"])
    def test_node_counts(self, name, request):
        b = request.getfixturevalue(name)
        v = b.values(np.linspace(-b.halfwidth, b.halfwidth, 4001))
        assert [node_count(row) for row in v] == list(range(b.size))

    def test_sign_convention(self, weak_basis):
        x = np.linspace(-8, 8, 4001)
        v, d = weak_basis.evaluate(x)
        assert np.all(v[0] > 0)
        for k in range(1, weak_basis.size):
            turns = np.nonzero(np.sign(d[k, :-1]) != np.sign(d[k, 1:]))[0]
            assert v[k, turns[-1]] > 0

    def test_derivatives_analytic(self, asym_basis):
        h = 1e-6
        v, d = asym_basis.evaluate(XS)
        fd = (asym_basis.values(XS + h) - asym_basis.values(XS - h)) / (2 * h)
        np.testing.assert_allclose(d, fd, atol=1e-6)

    def test_analytic_normalization_consistent(self, sym_basis):
        assert sym_basis.analytic_norm_mismatch < 1e-8

    @pytest.mark.parametrize("lam", [0.05, 0.5, 1.0, 5.0])
    def test_isospectral_rayleigh_quotients(self, lam):
        b = build_basis(params(lam), 10)

        def f(x):
            v, d = b.evaluate(x)
            return 0.5 * d * d + b.potential(x) * v * v

        np.testing.assert_allclose(integrate_line(f, b.quadrature()), spectrum(params(lam), 10), atol=1e-6)

    def test_partial_localization_trend(self):
        left = []
        for lam in (1.0, 0.5, 0.2, 0.05):
            b = build_basis(params(lam), 3)
            top = classify_wells(params(lam)).barrier_tops[0][0]
            left.append(integrate(lambda x: b.values(x, 1)[0] ** 2, -b.halfwidth, top))
        assert all(a < b for a, b in zip(left, left[1:]))
        assert left[0] == pytest.approx(0.5, abs=1e-8)

    def test_large_basis(self, sym_params):
        b = build_basis(sym_params, 40)
        assert np.abs(b.gram() - np.eye(40)).max() < 1e-8

    @pytest.mark.parametrize("size", [2, 41])
    def test_size_guard(self, sym_params, size):
        with pytest.raises(DomainError):
            build_basis(sym_params, size)

    def test_evaluators(self, sym_basis):
        val, der = sym_basis.evaluators[3](0.7)
        v, d = sym_basis.evaluate(0.7)
        assert (val, der) == (v[3], d[3])

    @given(st.floats(-8, 8))
    def test_vectorization_consistent(self, sym_basis, x):
        b = sym_basis
        np.testing.assert_allclose(b.values(np.array([x]))[:, 0], b.values(x), rtol=1e-14)


def test_oscillator_basis():
    b = OscillatorBasis(12)
    assert np.abs(b.gram() - np.eye(12)).max() < 1e-10
    np.testing.assert_allclose(b.energies, np.arange(12) + 0.5)
