"""
Tests for SCA power allocation: D.C. split, gradient, surrogate, water-filling and the outer loop.
"""

import math

import numpy as np
import pytest

from src.association.bkmc import bkmc
from src.core.channel import link_rates, bandwidth_shares
from src.core.config import NetworkConfig
from src.core.constraints import check_constraints
from src.core.errors import DomainError
from src.core.model import Association, PowerAllocation, Topology
from src.power.sca import (
    LN2, LinkSystem, SurrogateModel, build_surrogate, dc_objective, dc_parts, extrapolate, grad_h, inner_solve,
    kkt_residuals, sca, surrogate_value, water_fill,
)


def random_instance(rng, n_uavs=3, n_gus=12, side=200.0, mode="literal"):
    config = NetworkConfig(n_uavs=n_uavs, n_gus=n_gus, interference_mode=mode)
    gu = rng.uniform(0, side, (n_gus, 2))
    uav = np.column_stack([rng.uniform(0, side, (n_uavs, 2)), np.full(n_uavs, 20.0)])
    topo = Topology(uav_pos=uav, uav_heading=np.zeros(n_uavs), gu_pos=gu)
    assoc = bkmc(gu, uav[:, :2]).association
    return config, topo, assoc


def random_feasible(rng, assoc, p_max=2.0):
    p = np.zeros((assoc.n_uavs, assoc.n_gus))
    for k in range(assoc.n_uavs):
        members = assoc.members(k)
        w = rng.uniform(0.05, 1.0, members.size)
        p[k, members] = p_max * rng.uniform(0.2, 1.0) * w / w.sum()
    return PowerAllocation(p)


def project_budget_box(y, p_max, floor=1e-9):
    """Euclidean projection onto {floor <= p <= p_max, sum p <= p_max}."""
    clipped = np.clip(y, floor, p_max)
    if clipped.sum() <= p_max:
        return clipped
    lo, hi = 0.0, float(np.max(y))
    for _ in range(60):
        tau = 0.5 * (lo + hi)
        if np.clip(y - tau, floor, p_max).sum() > p_max:
            lo = tau
        else:
            hi = tau
    return np.clip(y - hi, floor, p_max)


def projected_gradient_oracle(g, p_max, steps=3000, lr=0.1):
    """Projected gradient ascent on sum log2(p) - g.p."""
    g = np.asarray(g, dtype=float)
    p = np.full(g.size, p_max / g.size)
    for _ in range(steps):
        p = project_budget_box(p + lr * (1.0 / (LN2 * p) - g), p_max)
    return p


class TestDcParts:

    def test_unit_single_link(self):
        # p * h0 = 1 and noise term 1 with no interference
        system = LinkSystem(association=Association([0], 1), phi=np.zeros((1, 1)), noise=np.ones(1),
                            ref_gain=1e-4)
        assert system.l_value(np.array([1e4])) == pytest.approx(0.0, abs=1e-12)
        assert system.h_value(np.array([1e4])) == 0.0

    def test_log_of_two_watts(self):
        system = LinkSystem(association=Association([0], 1), phi=np.zeros((1, 1)), noise=np.ones(1),
                            ref_gain=1e-4)
        assert system.l_value(np.array([2.0])) == pytest.approx(math.log2(2e-4), rel=1e-12)
        assert math.log2(2e-4) == pytest.approx(-12.2877, abs=1e-4)

    def test_nonpositive_power_is_domain_error(self):
        config, topo, assoc = random_instance(np.random.default_rng(0))
        p = random_feasible(np.random.default_rng(1), assoc)
        p.p[assoc.assign[0], 0] = 0.0
        with pytest.raises(DomainError):
            dc_parts(p, topo, assoc, config)

    def test_high_sinr_consistency_with_rates(self):
        # single UAV, no interference, gamma > 1e3 on every link
        config = NetworkConfig(n_uavs=1, n_gus=3)
        topo = Topology(uav_pos=[[50, 50, 20]], uav_heading=[0], gu_pos=[[50, 50], [55, 50], [50, 45]])
        assoc = Association([0, 0, 0], 1)
        p = PowerAllocation.from_links([0.6, 0.7, 0.7], assoc)
        rates = link_rates(topo, assoc, p, config)
        normalized = float(np.sum(rates / bandwidth_shares(assoc, config)))
        assert dc_objective(p, topo, assoc, config) == pytest.approx(normalized, rel=0.02)


class TestGradH:

    def test_single_uav_has_zero_gradient(self):
        config = NetworkConfig(n_uavs=1, n_gus=4)
        rng = np.random.default_rng(2)
        topo = Topology(uav_pos=[[10, 10, 20]], uav_heading=[0], gu_pos=rng.uniform(0, 200, (4, 2)))
        assoc = Association([0, 0, 0, 0], 1)
        p = PowerAllocation.from_links([0.5] * 4, assoc)
        assert np.all(grad_h(p, topo, assoc, config) == 0.0)

    def test_two_single_gu_clusters_by_hand(self):
        config = NetworkConfig(n_uavs=2, n_gus=2)
        topo = Topology(uav_pos=[[0, 0, 20], [60, 0, 20]], uav_heading=[0, 0], gu_pos=[[5, 0], [70, 0]])
        assoc = Association([0, 1], 2)
        p = PowerAllocation.from_links([0.8, 1.3], assoc)
        system = LinkSystem.build(topo, assoc, config)
        g = grad_h(p, topo, assoc, config)
        # d h / d p_0 only through link 1's interference term
        h_int = system.phi[1, 0]
        expected = (h_int / LN2) / (0.8 * h_int + system.noise[1])
        assert g[0, 0] == pytest.approx(expected, rel=1e-12)

        step = 1e-6
        up, down = p.p.copy(), p.p.copy()
        up[0, 0] += step
        down[0, 0] -= step
        fd = (system.h_value(PowerAllocation(up).links(assoc))
              - system.h_value(PowerAllocation(down).links(assoc))) / (2 * step)
        assert g[0, 0] == pytest.approx(fd, rel=1e-4)

    @pytest.mark.parametrize("mode", ["literal", "physical"])
    def test_matches_central_differences(self, mode):
        rng = np.random.default_rng(3)
        checked = 0
        while checked < 100:
            config, topo, assoc = random_instance(rng, n_uavs=3, n_gus=6, mode=mode)
            system = LinkSystem.build(topo, assoc, config)
            p = random_feasible(rng, assoc)
            x = p.links(assoc)
            g = grad_h(p, topo, assoc, config)[assoc.assign, np.arange(assoc.n_gus)]
            for m in range(assoc.n_gus):
                step = 1e-6 * x[m]
                up, down = x.copy(), x.copy()
                up[m] += step
                down[m] -= step
                fd = (system.h_value(up) - system.h_value(down)) / (2 * step)
                assert abs(g[m] - fd) <= max(1e-6, 1e-4 * abs(g[m]))
            checked += 1

    def test_gradient_zero_off_associated_links(self):
        config, topo, assoc = random_instance(np.random.default_rng(4))
        g = grad_h(random_feasible(np.random.default_rng(5), assoc), topo, assoc, config)
        assert np.all(g[assoc.indicator() == 0] == 0.0)
        assert np.all(g >= 0.0)


class TestSurrogate:

    def setup_method(self):
        rng = np.random.default_rng(6)
        self.config, self.topo, self.assoc = random_instance(rng)
        self.rng = rng

    def test_tangent_at_anchor(self):
        for _ in range(20):
            anchor = random_feasible(self.rng, self.assoc)
            model = build_surrogate(anchor, self.topo, self.assoc, self.config)
            value = surrogate_value(anchor, model, self.topo, self.assoc, self.config)
            assert abs(value - dc_objective(anchor, self.topo, self.assoc, self.config)) < 1e-9

    def test_lower_bound(self):
        anchor = random_feasible(self.rng, self.assoc)
        model = build_surrogate(anchor, self.topo, self.assoc, self.config)
        for _ in range(1000):
            p = random_feasible(self.rng, self.assoc)
            objective = dc_objective(p, self.topo, self.assoc, self.config)
            assert surrogate_value(p, model, self.topo, self.assoc, self.config) <= objective + 1e-9

    def test_zero_gradient_model(self):
        anchor = random_feasible(self.rng, self.assoc)
        l_anchor, h_anchor = dc_parts(anchor, self.topo, self.assoc, self.config)
        model = SurrogateModel(anchor=anchor.p, grad=np.zeros_like(anchor.p), h_at_anchor=h_anchor)
        p = random_feasible(self.rng, self.assoc)
        l_p, _ = dc_parts(p, self.topo, self.assoc, self.config)
        assert surrogate_value(p, model, self.topo, self.assoc, self.config) == pytest.approx(l_p - h_anchor)


class TestWaterFill:

    def test_one_link_zero_price(self):
        p, mu = water_fill(np.array([0.0]), 2.0)
        assert p.tolist() == pytest.approx([2.0])

    def test_equal_prices_split_budget(self):
        p, mu = water_fill(np.array([0.3, 0.3]), 2.0)
        assert p == pytest.approx([1.0, 1.0], rel=1e-12)
        assert mu > 0

    def test_budget_binding_example_against_oracle(self):
        g = np.array([0.5, 2.0])
        unconstrained = 1.0 / (LN2 * g)
        assert unconstrained == pytest.approx([2.885, 0.721], abs=1e-3)
        p, mu = water_fill(g, 2.0)
        assert p.sum() == pytest.approx(2.0, abs=1e-12)
        res = kkt_residuals(p, g, mu, 2.0)
        assert max(res.values()) <= 1e-8
        assert p == pytest.approx(projected_gradient_oracle(g, 2.0), abs=1e-4)

    def test_slack_budget_keeps_zero_multiplier(self):
        g = np.array([2.0, 3.0, 4.0])
        p, mu = water_fill(g, 2.0)
        assert mu == 0.0
        assert p == pytest.approx(1.0 / (LN2 * g), rel=1e-15)

    def test_random_kkt_and_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            g = rng.uniform(0.1, 3.0, 4)
            p, mu = water_fill(g, 2.0)
            assert max(kkt_residuals(p, g, mu, 2.0).values()) <= 1e-8
            assert p == pytest.approx(projected_gradient_oracle(g, 2.0), abs=1e-4)

    def test_inner_solve_is_per_uav_water_fill(self):
        config, topo, assoc = random_instance(np.random.default_rng(8))
        anchor = random_feasible(np.random.default_rng(9), assoc)
        model = build_surrogate(anchor, topo, assoc, config)
        out = inner_solve(model, assoc, config)
        for k in range(assoc.n_uavs):
            members = assoc.members(k)
            p, mu = water_fill(model.grad[k, members], config.p_max)
            assert np.array_equal(out.p[k, members], p)
            assert mu * (config.p_max - p.sum()) <= 1e-8
        assert np.all(out.p[assoc.indicator() == 0] == 0.0)


class TestSca:

    def test_monotone_objective_on_random_instances(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            config, topo, assoc = random_instance(rng)
            p, report = sca(None, topo, assoc, config)
            trace = np.array(report.objective_trace)
            assert trace.size == report.iterations + 1
            slack = 1e-6 * np.maximum(np.abs(trace[:-1]), 1.0)
            assert np.all(np.diff(trace) >= -slack)
            assert p.is_feasible(config.p_max)
            report_c = check_constraints([topo], assoc, p, config)
            assert not report_c.has("power_budget") and not report_c.has("power_box")

    def test_single_uav_converges_in_one_iteration(self):
        config = NetworkConfig(n_uavs=1, n_gus=5)
        rng = np.random.default_rng(11)
        topo = Topology(uav_pos=[[100, 100, 20]], uav_heading=[0], gu_pos=rng.uniform(0, 200, (5, 2)))
        assoc = Association([0] * 5, 1)
        p, report = sca(None, topo, assoc, config)
        assert report.iterations == 1
        assert report.converged
        assert p.per_uav_total()[0] == pytest.approx(2.0, rel=1e-12)

    def test_huge_tolerance_stops_after_first_surrogate(self):
        config, topo, assoc = random_instance(np.random.default_rng(12))
        p0 = random_feasible(np.random.default_rng(13), assoc)
        p, report = sca(p0, topo, assoc, config, tol=1e12)
        assert report.iterations == 1
        assert report.converged
        expected = inner_solve(build_surrogate(p0, topo, assoc, config), assoc, config)
        assert np.array_equal(p.p, expected.p)

    def test_max_outer_exhausted(self, caplog):
        config, topo, assoc = random_instance(np.random.default_rng(14))
        p0 = random_feasible(np.random.default_rng(15), assoc)
        _, report = sca(p0, topo, assoc, config, tol=0.0, max_outer=2)
        assert report.iterations == 2
        assert not report.converged
        assert any("max_outer" in r.message for r in caplog.records)

    @pytest.mark.parametrize("mode", ["literal", "physical"])
    def test_two_link_instance_matches_grid_oracle(self, mode):
        config = NetworkConfig(n_uavs=2, n_gus=2, interference_mode=mode)
        topo = Topology(uav_pos=[[40, 100, 20], [160, 100, 20]], uav_heading=[0, 0],
                        gu_pos=[[30, 90], [175, 110]])
        assoc = Association([0, 1], 2)
        system = LinkSystem.build(topo, assoc, config)
        grid = np.linspace(0.01, 2.0, 200)
        values = np.array([[system.l_value(np.array([a, b])) - system.h_value(np.array([a, b]))
                            for b in grid] for a in grid])
        best = float(values.max())
        i, j = np.unravel_index(int(np.argmax(values)), values.shape)

        p0 = PowerAllocation.from_links([0.1, 0.3], assoc)
        p, report = sca(p0, topo, assoc, config)
        final = report.objective_trace[-1]
        assert report.converged
        assert final >= report.objective_trace[0]
        assert abs(final - best) <= 0.005 * abs(best)
        assert np.allclose(p.links(assoc), [grid[i], grid[j]], atol=0.1)

    def test_interference_limited_start_reaches_full_power(self):
        # both links want full power; the plain tangent step moves ~1e-4 W per round
        config = NetworkConfig(n_uavs=2, n_gus=2)
        topo = Topology(uav_pos=[[40, 100, 20], [160, 100, 20]], uav_heading=[0, 0],
                        gu_pos=[[30, 90], [175, 110]])
        assoc = Association([0, 1], 2)
        p0 = PowerAllocation.from_links([0.1, 0.3], assoc)
        plain = inner_solve(build_surrogate(p0, topo, assoc, config), assoc, config)
        assert np.max(np.abs(plain.links(assoc) - p0.links(assoc))) < 0.01

        p, report = sca(p0, topo, assoc, config)
        assert report.iterations < 10
        assert np.allclose(p.links(assoc), [2.0, 2.0], atol=1e-6)
        assert p.is_feasible(config.p_max)

    def test_extrapolation_never_worse_than_water_filled_point(self):
        rng = np.random.default_rng(17)
        for mode in ("literal", "physical"):
            for _ in range(20):
                config, topo, assoc = random_instance(rng, mode=mode)
                system = LinkSystem.build(topo, assoc, config)
                p = random_feasible(rng, assoc)
                stepped = inner_solve(build_surrogate(p, topo, assoc, config, system=system), assoc, config)
                value = dc_objective(stepped, topo, assoc, config, system=system)
                ahead, ahead_value = extrapolate(p, stepped, value, system, assoc, config.p_max)
                assert ahead_value >= value
                assert ahead_value == pytest.approx(dc_objective(ahead, topo, assoc, config), rel=1e-12)
                assert ahead.is_feasible(config.p_max)

    def test_rate_trace_tracks_true_sum_rate(self):
        config, topo, assoc = random_instance(np.random.default_rng(16))
        p, report = sca(None, topo, assoc, config)
        assert len(report.rate_trace) == len(report.objective_trace)
        assert report.rate_trace[-1] == pytest.approx(float(np.sum(link_rates(topo, assoc, p, config))))
        assert report.to_dict()["iterations"] == report.iterations
