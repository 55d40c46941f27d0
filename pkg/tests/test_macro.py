import numpy as np
import pytest
from scipy.special import ndtr

from cdsnet import ScenarioSpec, Sector, basel_rho, build_grid, builtin_scenario
from cdsnet.macro import QuadGrid, initial_state, run_trajectories, run_trajectory, step_macro


def test_basel_rho_examples():
    assert basel_rho(0.0) == pytest.approx(0.24)
    assert basel_rho(1.0) == pytest.approx(0.12, abs=1e-12)
    assert basel_rho(0.01) == pytest.approx(0.192784, abs=1e-6)
    # monotone non-increasing in default probability, strictly at the low end
    pd = np.linspace(0.0, 1.0, 101)
    rho = basel_rho(pd)
    assert np.all(np.diff(rho) <= 0)
    assert rho[1] < rho[0]


def test_build_grid_shapes_and_weights():
    spec = builtin_scenario("S0")
    grid = build_grid(spec.heterogeneity, spec.noise)
    assert grid.theta.shape == (3, 64)
    assert grid.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(grid.theta, axis=1) > 0)
    # quadrature reproduces the Gaussian mean and sd of initial wealth
    for s in Sector:
        mu = np.sum(grid.weights * grid.theta[int(s)])
        sd = np.sqrt(np.sum(grid.weights * (grid.theta[int(s)] - mu) ** 2))
        assert mu == pytest.approx(spec.heterogeneity.theta_mean[int(s)], abs=1e-10)
        assert sd == pytest.approx(spec.heterogeneity.theta_sd, abs=1e-10)


def test_first_step_default_probability_from_typical_firm():
    # one theta node per sector at the sector mean, rho = 0.24, xi0 = 0
    spec = ScenarioSpec(name="empty")
    grid = QuadGrid(theta=np.array([[2.75], [3.25], [3.75]]),
                    weights=np.array([1.0]),
                    rho=np.full((3, 1), 0.24), sigma=1.0)
    state = step_macro(initial_state(grid), spec, grid, 0.0)
    p_firm = ndtr(-2.75 / np.sqrt(0.76))
    assert p_firm == pytest.approx(8.0396e-4, rel=1e-4)
    assert state.history[0, 1] == pytest.approx(p_firm, abs=1e-15)


def test_no_exposures_matches_independent_survival():
    """Without loss channels every node defaults independently month by month."""
    spec = ScenarioSpec(name="empty")
    grid = build_grid(spec.heterogeneity, spec.noise)
    xi0 = -1.5
    traj = run_trajectory(spec, xi0, grid)
    for s in Sector:
        p = ndtr((-grid.sigma * np.sqrt(grid.rho[int(s)]) * xi0 - grid.theta[int(s)])
                 / (grid.sigma * np.sqrt(1.0 - grid.rho[int(s)])))
        for t in range(13):
            expected = float(np.sum(grid.weights * (1.0 - (1.0 - p) ** t)))
            assert traj.history[int(s), t] == pytest.approx(expected, abs=1e-14)
        assert traj.reported_loss[int(s), -1] == 0.0


def test_history_is_monotone_and_bounded():
    traj = run_trajectory(builtin_scenario("S9"), -2.0)
    assert np.all(np.diff(traj.history, axis=-1) >= 0)
    assert np.all(traj.history >= 0) and np.all(traj.history <= 1)


def test_default_fractions_decrease_with_milder_conditions():
    xi0 = np.linspace(-3.0, 3.0, 13)
    traj = run_trajectories(builtin_scenario("S0"), xi0)
    m_b = traj.final_m[:, int(Sector.B)]
    assert np.all(np.diff(m_b) < 0)


def test_vectorized_sweep_matches_scalar_runs():
    spec = builtin_scenario("S3")
    xi0 = np.array([-2.0, 0.0, 1.0])
    traj = run_trajectories(spec, xi0)
    for k, x in enumerate(xi0):
        single = run_trajectory(spec, float(x))
        assert np.allclose(traj.history[k], single.history, atol=1e-14)
        assert np.allclose(traj.reported_loss[k], single.reported_loss, atol=1e-14)


def test_quadrature_refinement_is_converged():
    spec = builtin_scenario("S0")
    coarse = run_trajectory(spec, -1.0, build_grid(spec.heterogeneity, spec.noise, nodes=64))
    fine = run_trajectory(spec, -1.0, build_grid(spec.heterogeneity, spec.noise, nodes=128))
    assert np.allclose(coarse.history, fine.history, atol=1e-10)
