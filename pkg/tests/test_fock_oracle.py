import numpy as np
import pytest
from numpy.testing import assert_allclose

from starsync import (
    ModePrep,
    ResourceLimitError,
    build_canonical_transform,
    build_potential,
    fock_oracle_evolve,
    g_eigensystem,
    init_state,
    make_dissipation,
    perturb_corrections,
    position_trajectory,
    thermal_occupation,
)

from conftest import uniform_params


def setup_network(params):
    decomp = build_potential(params)
    modes = perturb_corrections(g_eigensystem(decomp), decomp)
    transform = build_canonical_transform(modes, params)
    diss = make_dissipation(modes, params)
    return modes, transform, diss


class TestFockOracle:
    def test_matches_gaussian_engine_short_horizon(self):
        params = uniform_params(2, bath_rate=0.1)
        modes, transform, diss = setup_network(params)
        preps = [ModePrep(kind="coherent", alpha=0.4), ModePrep(), ModePrep(kind="coherent", alpha=0.5)]
        times = np.linspace(0.0, 2.0, 21)
        traj, diag = fock_oracle_evolve(
            params, modes, diss, cutoff=6, preps=preps, times=times,
            step_check="full", picture="schroedinger",
        )
        state0 = init_state(preps, frame="normal")
        ref = position_trajectory(
            state0, transform, diss, modes, times, ["x_1", "x_2", "x_3"]
        )
        for label in ("x_1", "x_2", "x_3"):
            assert_allclose(traj.series[label], ref.series[label], atol=1e-5)
        assert diag["trace_deviation"] < 1e-8
        assert diag["halving_difference"] < 1e-8

    def test_pictures_agree(self):
        params = uniform_params(2, bath_rate=0.3)
        modes, transform, diss = setup_network(params)
        preps = [ModePrep(kind="coherent", alpha=0.3), ModePrep(kind="coherent", alpha=0.2j), ModePrep(kind="coherent", alpha=0.5)]
        times = np.linspace(0.0, 2.5, 11)
        kwargs = dict(cutoff=5, preps=preps, times=times, step_check="full")
        traj_s, _ = fock_oracle_evolve(params, modes, diss, picture="schroedinger", **kwargs)
        traj_i, _ = fock_oracle_evolve(params, modes, diss, picture="interaction", **kwargs)
        for label in ("x_1", "x_2", "x_3", "p_1", "n_plus", "n_zero_1"):
            assert_allclose(traj_i.series[label], traj_s.series[label], atol=2e-8)

    def test_thermal_relaxation_endpoint(self):
        params = uniform_params(2, bath_rate=2.0, bath_temp=0.5)
        modes, transform, diss = setup_network(params)
        preps = [
            ModePrep(kind="coherent", alpha=0.6),
            ModePrep(kind="coherent", alpha=0.5),
            ModePrep(),
        ]
        t_end = 12.0 / min(diss.gamma_plus, diss.gamma_minus)
        times = np.linspace(0.0, t_end, 9)
        traj, diag = fock_oracle_evolve(
            params, modes, diss, cutoff=5, preps=preps, times=times
        )
        nbar_plus = thermal_occupation(modes.freqs[0], params.bath_temp)
        nbar_minus = thermal_occupation(modes.freqs[1], params.bath_temp)
        assert traj.series["n_plus"][-1] == pytest.approx(nbar_plus, abs=1e-3)
        assert traj.series["n_minus"][-1] == pytest.approx(nbar_minus, abs=1e-3)
        # means decay with envelope e^{-gamma_minus t / 2} = e^{-6}
        assert abs(traj.series["x_1"][-1]) < 1e-3

    def test_state_stays_physical(self):
        params = uniform_params(2, bath_rate=0.5)
        modes, transform, diss = setup_network(params)
        preps = [ModePrep(kind="coherent", alpha=0.5)] * 3
        times = np.linspace(0.0, 3.0, 7)
        traj, diag = fock_oracle_evolve(
            params, modes, diss, cutoff=5, preps=preps, times=times
        )
        assert diag["min_eigenvalue"] >= -1e-8
        assert diag["trace_deviation"] < 1e-6
        assert 0.0 < diag["protected_purity"] <= 1.0 + 1e-9

    def test_closed_evolution_preserves_purity(self):
        params = uniform_params(2)  # no bath
        modes, transform, diss = setup_network(params)
        preps = [ModePrep(), ModePrep(), ModePrep(kind="coherent", alpha=0.5)]
        times = np.linspace(0.0, 3.0, 5)
        traj, diag = fock_oracle_evolve(
            params, modes, diss, cutoff=5, preps=preps, times=times,
            picture="schroedinger",
        )
        assert diag["protected_purity"] == pytest.approx(1.0, abs=1e-8)

    def test_dimension_cap(self):
        params = uniform_params(2, bath_rate=0.1)
        modes, transform, diss = setup_network(params)
        with pytest.raises(ResourceLimitError):
            fock_oracle_evolve(
                params, modes, diss, cutoff=30,
                preps=[ModePrep()] * 3, times=np.linspace(0, 1, 3),
            )
