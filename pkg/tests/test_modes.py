import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from starsync import (
    DegenerateNetworkError,
    NetworkParams,
    PerturbationError,
    build_potential,
    classify_exact_modes,
    exact_diagonalize,
    g_eigensystem,
    perturb_corrections,
    squeezing_estimate,
)

from conftest import fig1_params, random_params, uniform_params


def pipeline(params):
    decomp = build_potential(params)
    modes = perturb_corrections(g_eigensystem(decomp), decomp)
    return decomp, modes


def assert_parallel(actual, expected, atol=1e-10):
    """Compare vectors up to overall sign."""
    if np.dot(actual, expected) < 0:
        expected = -np.asarray(expected)
    assert_allclose(actual, expected, atol=atol)


class TestGEigensystem:
    def test_uniform_n2_hand_solution(self):
        decomp = build_potential(uniform_params(2))
        m = g_eigensystem(decomp)
        assert m.g_plus == pytest.approx(2.0, rel=1e-14)
        assert m.g_minus == pytest.approx(-1.0, rel=1e-14)
        assert_parallel(m.vec_plus, np.array([-1.0, -1.0, 2.0]) / math.sqrt(6))
        assert_parallel(m.vec_minus, np.array([1.0, 1.0, 1.0]) / math.sqrt(3))
        assert_parallel(m.zero_basis[:, 0], np.array([1.0, -1.0, 0.0]) / math.sqrt(2))

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
    def test_uniform_closed_form(self, n):
        g = 3.7
        decomp = build_potential(uniform_params(n, k=2.0, g=g))
        m = g_eigensystem(decomp)
        assert m.g_plus == pytest.approx(n * g, rel=1e-13)
        assert m.g_minus == pytest.approx(-g, rel=1e-13)

    def test_decoupled_second_oscillator(self):
        p = NetworkParams(n=2, mass=1.0, hooke=(1.0, 1.0, 1.0), couplings=(1.0, 0.0))
        m = g_eigensystem(build_potential(p))
        assert_parallel(m.zero_basis[:, 0], np.array([0.0, 1.0, 0.0]))

    def test_all_zero_couplings_rejected(self):
        p = NetworkParams(n=2, mass=1.0, hooke=(1.0, 1.0, 1.0), couplings=(0.0, 0.0))
        with pytest.raises(DegenerateNetworkError):
            g_eigensystem(build_potential(p))

    def test_root_identities(self, rng):
        for _ in range(50):
            decomp = build_potential(random_params(rng))
            m = g_eigensystem(decomp)
            assert m.g_plus + m.g_minus == pytest.approx(decomp.delta, rel=1e-12, abs=1e-12)
            assert m.g_plus * m.g_minus == pytest.approx(-decomp.lambda_sq, rel=1e-12)
            assert m.g_plus >= 0 >= m.g_minus

    def test_eigen_residuals(self, rng):
        for _ in range(20):
            decomp = build_potential(random_params(rng))
            m = g_eigensystem(decomp)
            g_mat = decomp.g_matrix
            for vec, lam in ((m.vec_plus, m.g_plus), (m.vec_minus, m.g_minus)):
                assert np.linalg.norm(g_mat @ vec - lam * vec) <= 1e-10 * max(1.0, abs(lam))
            for j in range(m.n_protected):
                col = m.zero_basis[:, j]
                assert np.linalg.norm(g_mat @ col) <= 1e-10 * np.max(np.abs(g_mat))

    def test_frame_orthonormality_and_protection(self, rng):
        for _ in range(20):
            decomp = build_potential(random_params(rng))
            m = g_eigensystem(decomp)
            basis = np.column_stack([m.vec_plus, m.vec_minus, m.zero_basis])
            assert_allclose(basis.T @ basis, np.eye(decomp.size), atol=1e-10)
            assert np.all(m.zero_basis[-1, :] == 0.0)

    def test_mixing_angle(self):
        decomp = build_potential(uniform_params(2))
        m = g_eigensystem(decomp)
        assert math.tan(m.theta_mix) == pytest.approx(0.5, rel=1e-12)


class TestPerturbCorrections:
    def test_unperturbed_uniform_network(self):
        decomp, m = pipeline(uniform_params(4, k=2.0, g=3.0))
        assert m.dk_plus == pytest.approx(0.0, abs=1e-14)
        assert m.dk_minus == pytest.approx(0.0, abs=1e-14)
        assert_allclose(m.dk_zero, 0.0, atol=1e-14)
        protected = m.freqs[2:]
        assert_allclose(protected, math.sqrt(decomp.shift), rtol=1e-14)

    def test_detuned_n2_closed_form(self):
        p = NetworkParams(n=2, mass=1.0, hooke=(1.0, 1.2, 1.0), couplings=(10.0, 10.0))
        decomp, m = pipeline(p)
        assert m.dk_zero[0] == pytest.approx(1.0 / 30.0, rel=1e-12)
        assert m.k_corr[2] == pytest.approx(11.1, rel=1e-12)
        assert m.freqs[2] == pytest.approx(math.sqrt(11.1), rel=1e-12)

    def test_zero_sector_rotation_properties(self, rng):
        for _ in range(10):
            decomp, m = pipeline(random_params(rng, n=4))
            assert np.all(np.diff(m.dk_zero) >= -1e-12)
            r = m.zero_rotation
            assert_allclose(r.T @ r, np.eye(3), atol=1e-12)
            basis = np.column_stack([m.vec_plus, m.vec_minus, m.zero_basis])
            assert_allclose(basis.T @ basis, np.eye(decomp.size), atol=1e-10)

    def test_regime_warning_flag(self):
        p = NetworkParams(n=2, mass=1.0, hooke=(1.0, 3.0, 1.0), couplings=(1.0, 1.0))
        _, m = pipeline(p)
        assert m.xi > 0.3
        assert m.regime_warning

    def test_single_oscillator_network(self):
        # n = 1: no protected sector at all
        p = NetworkParams(n=1, mass=1.0, hooke=(1.0, 1.5), couplings=(2.0,))
        decomp, m = pipeline(p)
        assert m.n_protected == 0
        assert m.k_corr.shape == (2,)
        exact = exact_diagonalize(decomp).eigenvalues
        assert_allclose(np.sort(m.k_corr), exact, atol=5e-2 * np.max(exact))
        est = squeezing_estimate(m, decomp)
        assert est.degenerate and est.spread_exact == 0.0

    def test_undefined_xi_rejected(self):
        decomp = build_potential(uniform_params(2))
        m = g_eigensystem(decomp)
        object.__setattr__(m, "xi", None)
        with pytest.raises(PerturbationError):
            perturb_corrections(m, decomp)


class TestExactDiagonalize:
    def test_hand_3x3(self):
        decomp = build_potential(uniform_params(2))
        s = exact_diagonalize(decomp)
        assert_allclose(s.eigenvalues, [1.0, 2.0, 4.0], atol=1e-12)

    def test_diagonal_matrix(self):
        p = NetworkParams(n=2, mass=1.0, hooke=(3.0, 1.0, 2.0), couplings=(0.0, 0.0))
        s = exact_diagonalize(build_potential(p))
        assert_allclose(s.eigenvalues, [1.0, 2.0, 3.0], atol=1e-14)

    def test_uniform_n5_closed_form(self):
        decomp = build_potential(uniform_params(5, k=1.0, g=10.0))
        s = exact_diagonalize(decomp)
        assert_allclose(s.eigenvalues, [1.0] + [11.0] * 4 + [61.0], rtol=1e-12)

    def test_residuals_and_ordering(self, rng):
        for _ in range(20):
            decomp = build_potential(random_params(rng))
            s = exact_diagonalize(decomp)
            assert np.all(np.diff(s.eigenvalues) >= -1e-12)
            scale = np.max(np.abs(decomp.v))
            for j in range(s.size):
                resid = decomp.v @ s.eigenvectors[:, j] - s.eigenvalues[j] * s.eigenvectors[:, j]
                assert np.linalg.norm(resid) <= 1e-10 * scale


class TestPerturbationQuality:
    def test_uniform_exactness(self):
        decomp, m = pipeline(uniform_params(5, k=1.0, g=10.0))
        exact = exact_diagonalize(decomp).eigenvalues
        assert_allclose(np.sort(m.k_corr), exact, atol=1e-10)

    def test_second_order_error_scaling(self, rng):
        n = 4
        dk0 = rng.uniform(-1.0, 1.0, n)
        dk0 -= dk0.mean()
        dg0 = rng.uniform(-1.0, 1.0, n)
        dg0 -= dg0.mean()
        k_av0, g_av0 = 2.0, 4.0
        svals = np.geomspace(1e-3, 1e-1, 9)
        errs = []
        for s in svals:
            p = NetworkParams(
                n=n,
                mass=1.0,
                hooke=tuple(k_av0 + s * dk0) + (k_av0,),
                couplings=tuple(g_av0 + s * dg0),
            )
            decomp, m = pipeline(p)
            exact = exact_diagonalize(decomp).eigenvalues
            errs.append(np.max(np.abs(np.sort(m.k_corr) - exact)))
        slope = np.polyfit(np.log(svals), np.log(errs), 1)[0]
        assert abs(slope - 2.0) <= 0.3


class TestSqueezingEstimate:
    def test_first_order_formula(self):
        p = NetworkParams(n=3, mass=1.0, hooke=(1.1, 0.9, 1.0, 1.0), couplings=(99.0,) * 3)
        decomp, m = pipeline(p)
        est = squeezing_estimate(m, decomp)
        base = math.sqrt(decomp.shift)
        expected = base * (1.0 + m.dk_zero / (2.0 * decomp.shift))
        assert_allclose(est.freqs_approx, expected, rtol=1e-14)
        assert est.spread_approx == pytest.approx(
            (m.dk_zero[-1] - m.dk_zero[0]) / (2.0 * base), rel=1e-12
        )
        # first-order spread should match the exact one closely at small xi
        assert est.spread_exact == pytest.approx(est.spread_approx, rel=0.05)

    def test_degenerate_multiplet(self):
        decomp, m = pipeline(uniform_params(4, k=1.5, g=2.5))
        est = squeezing_estimate(m, decomp)
        assert est.spread_approx == 0.0
        assert est.spread_exact == pytest.approx(0.0, abs=1e-12)

    def test_single_protected_mode_flagged(self):
        decomp, m = pipeline(uniform_params(2))
        est = squeezing_estimate(m, decomp)
        assert est.degenerate
        assert est.spread_exact == 0.0

    def test_spread_decreases_with_coupling(self):
        spreads = []
        for g in (10.0, 100.0):
            decomp, m = pipeline(fig1_params(g))
            spreads.append(squeezing_estimate(m, decomp).spread_exact)
        assert spreads[1] < spreads[0]


class TestClassification:
    def test_protected_modes_have_small_hub_weight(self, rng):
        for _ in range(10):
            decomp, m = pipeline(random_params(rng, n=4))
            spectrum = exact_diagonalize(decomp)
            i_plus, i_minus, protected = classify_exact_modes(spectrum, m)
            assert len({i_plus, i_minus, *protected}) == decomp.size
            hub = np.abs(spectrum.eigenvectors[-1, :])
            assert max(hub[list(protected)]) <= min(hub[i_plus], hub[i_minus]) + 1e-9
