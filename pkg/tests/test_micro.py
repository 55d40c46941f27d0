from dataclasses import replace

import numpy as np
import pytest

from cdsnet import (
    ConfigError, PairExposureStats, ScenarioSpec, Sector, TripleExposureStats,
    build_world, builtin_scenario, estimate_macro, sample_cds_hypergraph,
    sample_pair_graph, simulate_path,
)
from cdsnet.micro import dump_world

SIZES = (4000, 400, 400)
C = 8.0


def loan_stats(mean=1.0, sd=0.5, kappa=0.0):
    return PairExposureStats("u", Sector.B, Sector.F, mean, sd, kappa)


class TestSamplers:
    def test_cross_sector_degree_and_exposure_stats(self, rng):
        edges = sample_pair_graph(SIZES, C, loan_stats(), rng)
        n_b = SIZES[1]
        # expected C edges per source node
        assert edges.src.size == pytest.approx(n_b * C, rel=0.05)
        assert np.all(edges.src != edges.dst)
        # edges point B -> F in global node ids
        assert np.all((edges.src >= SIZES[0]) & (edges.src < SIZES[0] + n_b))
        assert np.all(edges.dst < SIZES[0])
        # nonzero exposures average Jbar / C
        assert edges.size.mean() == pytest.approx(1.0 / C, rel=0.05)

    def test_same_sector_kappa_one_is_symmetric(self, rng):
        stats = PairExposureStats("d", Sector.F, Sector.F, 1.0, 1.0, kappa=1.0)
        edges = sample_pair_graph(SIZES, C, stats, rng)
        half = edges.src.size // 2
        # forward and backward exposures of each sampled pair coincide
        assert np.allclose(edges.size[:half], edges.size[half:])
        assert np.array_equal(edges.src[:half], edges.dst[half:])

    def test_pair_graph_rejects_dense_request(self, rng):
        with pytest.raises(ConfigError):
            sample_pair_graph((10, 10, 10), 50.0, loan_stats(), rng)

    def test_hypergraph_degree_and_distinct_nodes(self, rng):
        stats = TripleExposureStats("hedge", Sector.B, Sector.F, Sector.I, 1.0, 0.5)
        triples = sample_cds_hypergraph(SIZES, C, stats, rng)
        assert triples.buyer.size == pytest.approx(SIZES[1] * C, rel=0.05)
        assert np.all(triples.buyer != triples.reference)
        assert np.all(triples.buyer != triples.seller)
        assert np.all(triples.reference != triples.seller)
        assert triples.size.mean() == pytest.approx(1.0 / C, rel=0.05)


class TestSimulate:
    def test_no_exposures_high_wealth_no_defaults(self, rng):
        spec = ScenarioSpec(name="calm",
                            heterogeneity=replace(builtin_scenario("S0").heterogeneity,
                                                  theta_mean=(10.0, 10.0, 10.0)))
        world = build_world(spec, sizes=(2000, 200, 200), connectivity=C, rng=rng)
        state = simulate_path(world, 0.0, rng)
        assert state.indicators.sum() == 0
        assert np.all(state.losses == 0)

    def test_survivor_interest_identity(self, rng):
        """A borrower alive through t* yields (1+eps)^t* - 1 interest per unit loan."""
        spec = ScenarioSpec(
            name="loans-only", horizon=3,
            pair_stats=(loan_stats(),),
            heterogeneity=replace(builtin_scenario("S0").heterogeneity,
                                  theta_mean=(30.0, 30.0, 30.0)))
        world = build_world(spec, sizes=(2000, 200, 200), connectivity=C, rng=rng)
        state = simulate_path(world, 0.0, rng)
        edges = world.pair_edges[0]
        expected = np.zeros(world.n_nodes)
        np.add.at(expected, edges.src, -edges.size * (1.005 ** 3 - 1.0))
        assert (1.005 ** 3 - 1.0) == pytest.approx(0.0150751, rel=1e-5)
        assert np.allclose(state.losses, expected, atol=1e-12)

    def test_forced_default_costs_lender_full_exposure(self, rng):
        spec = ScenarioSpec(
            name="one-bad-firm",
            pair_stats=(loan_stats(),),
            heterogeneity=replace(builtin_scenario("S0").heterogeneity,
                                  theta_mean=(30.0, 30.0, 30.0)))
        world = build_world(spec, sizes=(2000, 200, 200), connectivity=C, rng=rng)
        world.theta[0] = -50.0  # firm 0 defaults in month 1
        state = simulate_path(world, 0.0, rng)
        assert state.indicators[1, 0] == 1.0
        edges = world.pair_edges[0]
        expected = np.zeros(world.n_nodes)
        hit = edges.dst == 0
        # full exposure lost at tau=1, no interest ever collected on it
        np.add.at(expected, edges.src[hit], edges.size[hit])
        np.add.at(expected, edges.src[~hit],
                  -edges.size[~hit] * (1.005 ** 12 - 1.0))
        assert np.allclose(state.losses, expected, atol=1e-12)

    def test_absorbing_indicators(self, rng):
        world = build_world(builtin_scenario("S9"), sizes=SIZES, connectivity=C, rng=rng)
        state = simulate_path(world, -2.0, rng)
        assert np.all(np.diff(state.indicators, axis=0) >= 0)
        assert set(np.unique(state.indicators)) <= {0.0, 1.0}

    def test_hedge_triples_conserve_cash_per_path(self, rng):
        """Buyer plus seller cash flow of a hedge equals the unhedged-loan flow."""
        world = build_world(builtin_scenario("S3"), sizes=SIZES, connectivity=C, rng=rng)
        state = simulate_path(world, -2.0, rng, collect_channels=True)
        tr = world.triples[0]
        n = state.indicators
        total = 0.0
        for tau in range(1, 13):
            dn = n[tau, tr.reference] - n[tau - 1, tr.reference]
            alive = 1.0 - n[tau, tr.reference]
            total += np.sum(tr.size * (dn - tr.interest * 1.005 ** (tau - 1) * alive))
        combined = state.channel_losses["hb"].sum() + state.channel_losses["hs"].sum()
        assert combined == pytest.approx(total, abs=1e-9)

    def test_speculative_triples_are_zero_sum_per_path(self, rng):
        world = build_world(builtin_scenario("S9"), sizes=SIZES, connectivity=C, rng=rng)
        state = simulate_path(world, -2.0, rng, collect_channels=True)
        sb = state.channel_losses["sb"].sum()
        ss = state.channel_losses["ss"].sum()
        assert sb + ss == pytest.approx(0.0, abs=1e-9)
        assert abs(sb) > 0  # the channel actually carried flows


class TestEstimate:
    def test_estimate_macro_shapes_and_reproducibility(self):
        est1 = estimate_macro(builtin_scenario("S0"), 0.0, sizes=SIZES,
                              connectivity=C, replicas=3, seed=7)
        est2 = estimate_macro(builtin_scenario("S0"), 0.0, sizes=SIZES,
                              connectivity=C, replicas=3, seed=7)
        assert est1.m_mean.shape == (3, 13)
        assert np.array_equal(est1.m_mean, est2.m_mean)
        assert np.array_equal(est1.loss_mean, est2.loss_mean)
        assert np.all(est1.m_se >= 0)

    def test_estimate_macro_rejects_zero_replicas(self):
        with pytest.raises(ConfigError):
            estimate_macro(builtin_scenario("S0"), 0.0, replicas=0)

    def test_dump_world(self, rng, tmp_path):
        world = build_world(builtin_scenario("S0"), sizes=(500, 50, 50),
                            connectivity=4.0, rng=rng)
        state = simulate_path(world, 0.0, rng)
        out = tmp_path / "world.csv"
        dump_world(world, state, out)
        lines = out.read_text().splitlines()
        assert lines[0] == "node,sector,theta,default_month"
        assert len(lines) == world.n_nodes + 1
