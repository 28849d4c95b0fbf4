"""Equilibrium solvers for every policy, checked against brute-force oracles."""

import json

import numpy as np
import pytest
from scipy.stats import norm

from fairgame.equilibrium import (
    Equilibrium,
    SolverConfig,
    dp_best_response,
    equilibria_from_json,
    equilibria_to_json,
    multiplicity_condition,
    parse_policy,
    scan_roots,
    solve,
    solve_cb,
    solve_dp,
    solve_eo,
    solve_eopp,
    solve_lf,
    verify,
)
from fairgame.errors import ConfigurationError
from fairgame.game_core import GameParams
from fairgame.signal_model import gaussian_model


def dense_scan(model, params, s, n=100_000):
    """Sign changes of AR - FR on a dense grid, located at the left node (no refinement)."""
    theta = np.linspace(model.theta_min, model.theta_max, n)
    fq = model.dist("q", s)
    fu = model.dist("u", s)
    ar = np.clip((params.omega * (fu.cdf(theta) - fq.cdf(theta)) - params.cost_lo)
                 / (params.cost_hi - params.cost_lo), 0, 1)
    phi = np.exp(fu.logpdf(theta) - fq.logpdf(theta))
    gap = ar - phi / (params.r + phi)
    idx = np.flatnonzero(np.sign(gap[:-1]) != np.sign(gap[1:]))
    return [(theta[i], ar[i]) for i in idx]


def step(model, cfg=SolverConfig()):
    return (model.theta_max - model.theta_min) / (cfg.grid_size - 1)


class TestScanRoots:
    def test_finds_all_crossings(self):
        grid = np.linspace(0.05, 10, 101)
        roots = scan_roots(np.sin, grid, 1e-10)
        np.testing.assert_allclose([r.x for r in roots], [np.pi, 2 * np.pi, 3 * np.pi], atol=1e-9)
        assert [r.direction for r in roots] == [-1, 1, -1]

    def test_exact_zero_on_node(self):
        grid = np.linspace(-1, 1, 5)
        roots = scan_roots(lambda x: x, grid, 1e-12)
        assert len(roots) == 1 and roots[0].x == 0.0 and roots[0].direction == 1

    def test_nan_breaks_bracket(self):
        grid = np.linspace(-1, 1, 5)
        roots = scan_roots(lambda x: np.where(np.abs(x) < 0.6, np.nan, x), grid, 1e-12)
        assert roots == []


class TestLaissezFaire:
    def test_g1_roots(self, g1, cfg):
        model, params = g1
        eqs = solve_lf(model, params, cfg)
        per_group = sorted({round(q.theta0, 6) for q in eqs})
        assert len(per_group) == 2
        hi = max(eqs, key=lambda q: q.pi0)
        assert hi.theta0 == pytest.approx(-0.875, abs=0.02)
        assert hi.pi0 == pytest.approx(0.80, abs=0.02)
        lo = min(eqs, key=lambda q: q.pi0)
        assert lo.theta0 == pytest.approx(3.25, abs=0.03) and lo.pi0 == pytest.approx(0.06, abs=0.01)

    def test_symmetric_groups_identical(self, g1, cfg):
        eqs = solve_lf(*g1, cfg)
        t0 = sorted({q.theta0 for q in eqs})
        t1 = sorted({q.theta1 for q in eqs})
        np.testing.assert_allclose(t0, t1, atol=1e-6)

    def test_cross_product(self, g1, cfg):
        assert len(solve_lf(*g1, cfg)) == 4

    def test_uninformative_boundary_only(self, uninformative, params, cfg):
        eqs = solve_lf(uninformative, params, cfg)
        assert len(eqs) == 1
        q = eqs[0]
        assert q.stability == "boundary" and q.pi0 == 0.0 and q.theta0 == uninformative.theta_max
        assert verify(uninformative, params, q, cfg).passed

    @pytest.mark.parametrize("seed", range(5))
    def test_dense_oracle(self, seed, cfg):
        rng = np.random.default_rng(seed)
        groups = [(m + g, sd, m, sd) for m, g, sd in rng.uniform([-1, 0.5, 0.5], [1, 2, 1.5], size=(2, 3))]
        model = gaussian_model(groups)
        params = GameParams(cost_hi=float(rng.uniform(0.1, 0.4)), lambda1=0.3)
        eqs = solve_lf(model, params, cfg)
        for s in (0, 1):
            oracle = dense_scan(model, params, s)
            found = sorted({(q.thetas[s], q.pis[s]) for q in eqs if q.stability != "boundary"})
            assert len(found) == len(oracle)
            for (t, p), (to, po) in zip(found, oracle):
                assert abs(t - to) <= 3 * step(model, cfg)
                assert abs(p - po) <= 0.01

    def test_multiplicity_condition(self, g1, uninformative, params, cfg):
        model, p = g1
        assert multiplicity_condition(model, p, 0, cfg)
        assert not multiplicity_condition(uninformative, params, 0, cfg)

    def test_stability_labels(self, g1, cfg):
        labels = {round(q.pi0, 3): q.stability for q in solve_lf(*g1, cfg) if q.theta0 == q.theta1}
        # AR - FR rises through the high-pi root and falls through the low one
        assert labels[min(labels)] == "stable"
        assert labels[max(labels)] == "unstable"


class TestColorBlind:
    def test_symmetric_equals_lf(self, g1, cfg):
        cb = solve_cb(*g1, cfg)
        lf = [q for q in solve_lf(*g1, cfg) if q.theta0 == q.theta1]
        assert len(cb) == len(lf)
        for a, b in zip(cb, lf):
            assert a.theta0 == pytest.approx(b.theta0, abs=1e-5)
            assert a.pi0 == pytest.approx(b.pi0, abs=1e-5) and a.pi0 == a.pi1

    def test_example1_minority_ignored(self, example1, cfg):
        eqs = solve_cb(*example1, cfg)
        assert any(q.pi1 < 0.05 and q.pi0 > 0.3 for q in eqs)
        assert all(q.theta0 == q.theta1 for q in eqs)

    def test_example2_disparity(self, example2, cfg):
        eqs = solve_cb(*example2, cfg)
        assert max(q.pi0 - q.pi1 for q in eqs) > 0.1

    def test_pooled_root_oracle(self, example1, cfg):
        model, params = example1
        theta = np.linspace(model.theta_min, model.theta_max, 200_001)
        lam0, lam1 = params.weights()
        ar = lam0 * np.clip(5 * (norm.cdf(theta) - norm.cdf(theta - 1)), 0, 1) + lam1 * np.clip(
            5 * (norm.cdf(theta - 10) - norm.cdf(theta - 11)), 0, 1)
        fu = lam0 * norm.pdf(theta) + lam1 * norm.pdf(theta - 10)
        fq = lam0 * norm.pdf(theta - 1) + lam1 * norm.pdf(theta - 11)
        with np.errstate(invalid="ignore", divide="ignore"):
            gap = ar - fu / (fq + fu)
        ok = np.isfinite(gap)
        t, g = theta[ok], gap[ok]
        oracle = t[np.flatnonzero(np.sign(g[:-1]) != np.sign(g[1:]))]
        got = [q.theta0 for q in solve_cb(model, params, cfg)]
        assert len(got) == len(oracle)
        np.testing.assert_allclose(got, oracle, atol=1e-3)


class TestDemographicParity:
    def test_symmetric_contains_lf(self, g1, cfg):
        dp = solve_dp(*g1, cfg)
        for q in solve_lf(*g1, cfg):
            if q.theta0 == q.theta1:
                assert any(abs(d.theta0 - q.theta0) < 2 * step(g1[0]) and abs(d.pi0 - q.pi0) < 1e-3 for d in dp)

    def test_patronizing(self, cfg):
        model = gaussian_model([(1.0, 1.0, 0.0, 1.0)] * 2)
        params = GameParams(lambda1=0.05)
        eqs = solve_dp(model, params, cfg)
        asym = [q for q in eqs if abs(q.pi0 - q.pi1) > 0.05]
        assert asym
        for q in eqs:
            assert verify(model, params, q, cfg).passed
            assert q.residuals["parity"] <= cfg.tol

    def test_best_response_equal_acceptance(self, g1):
        model, params = g1
        theta = model.grid()
        t0, t1, _, _ = dp_best_response(model, params, (0.8, 0.3), theta)
        acc = [p * (1 - model.dist("q", s).cdf(t)) + (1 - p) * (1 - model.dist("u", s).cdf(t))
               for s, t, p in ((0, t0, 0.8), (1, t1, 0.3))]
        assert acc[0] == pytest.approx(acc[1], abs=1e-6)

    def test_best_response_brute_force(self, g1):
        model, params = g1
        pis = (0.7, 0.4)
        theta = np.linspace(-3, 4, 701)
        t0, t1, fw, _ = dp_best_response(model, params, pis, model.grid())
        best = -np.inf
        a1 = pis[1] * norm.sf(theta - 1) + (1 - pis[1]) * norm.sf(theta)
        for x in theta:
            a0 = pis[0] * norm.sf(x - 1) + (1 - pis[0]) * norm.sf(x)
            y = np.interp(a0, a1[::-1], theta[::-1])
            val = 0.5 * (pis[0] * norm.sf(x - 1) - (1 - pis[0]) * norm.sf(x)) + 0.5 * (
                pis[1] * norm.sf(y - 1) - (1 - pis[1]) * norm.sf(y))
            best = max(best, val)
        assert fw == pytest.approx(best, abs=1e-4)

    def test_fixed_point_method_agrees(self, g1):
        model, params = g1
        cfg = SolverConfig(method="fixed_point", n_starts=8)
        scan = solve_dp(model, params)
        for q in solve_dp(model, params, cfg):
            if q.stability == "boundary":
                continue
            assert verify(model, params, q, cfg).passed
            assert any(abs(q.pi0 - r.pi0) < 0.02 and abs(q.pi1 - r.pi1) < 0.02 for r in scan)


class TestEqualizedOdds:
    @pytest.mark.parametrize("fixture", ["g1", "example1", "example2"])
    def test_identical_pi(self, fixture, request, cfg):
        model, params = request.getfixturevalue(fixture)
        for q in solve_eo(model, params, cfg):
            assert q.pi0 is q.pi1
            assert q.theta0 == q.theta1

    def test_matches_lf_on_g1(self, g1, cfg):
        model, params = g1
        eo = solve_eo(model, params, cfg)
        lf = [q for q in solve_lf(model, params, cfg) if q.theta0 == q.theta1]
        assert len(eo) == len(lf)
        for a, b in zip(eo, lf):
            # frontier coordinate p = 1 - fp maps back to a threshold through F_u
            theta = norm.ppf(a.theta0)
            assert abs(theta - b.theta0) <= 2 * step(model)
            assert a.pi0 == pytest.approx(b.pi0, abs=2e-3)

    def test_uninformative_boundary(self, uninformative, params, cfg):
        eqs = solve_eo(uninformative, params, cfg)
        assert [q.stability for q in eqs] == ["boundary"] and eqs[0].pi0 == 0.0


class TestEqualizedOpportunity:
    def test_symmetric_equals_lf(self, g1, cfg):
        model, params = g1
        eopp = solve_eopp(model, params, cfg)
        lf = sorted((q.pi0 for q in solve_lf(model, params, cfg) if q.theta0 == q.theta1), reverse=True)
        assert [q.pi0 for q in eopp] == pytest.approx(lf, abs=2e-3)

    def test_example2_unequal_pi(self, example2, cfg):
        eqs = solve_eopp(*example2, cfg)
        assert any(abs(q.pi0 - q.pi1) > 0.05 for q in eqs)
        for q in eqs:
            assert abs(q.rates[0][1] - q.rates[1][1]) <= cfg.tol


class TestVerify:
    def test_all_solver_outputs_pass(self, example2, cfg):
        for pol in ("LF", "CB", "DP", "EO", "EOPP"):
            for q in solve(pol, *example2, cfg):
                rep = verify(*example2, q, cfg)
                assert rep.passed, (pol, rep.residuals)

    def test_bad_candidate(self, g1, cfg):
        model, params = g1
        q = Equilibrium("LF", 0.5, 0.5, 0.5, 0.5, ((0.3, 0.7), (0.3, 0.7)))
        rep = verify(model, params, q, cfg)
        assert not rep.passed
        assert rep.residuals["ar0"] == pytest.approx(0.5, abs=1e-9)

    def test_perturbation_fails(self, g1, cfg):
        model, params = g1
        q = solve_lf(model, params, cfg)[0]
        bumped = Equilibrium(q.policy, q.theta0, q.theta1, q.pi0 + 10 * cfg.tol, q.pi1, q.rates, {}, q.stability)
        assert verify(model, params, q, cfg).passed
        assert not verify(model, params, bumped, cfg).passed


class TestInterfaces:
    def test_json_roundtrip(self, g1, cfg):
        eqs = solve_lf(*g1, cfg)
        text = equilibria_to_json(eqs)
        assert {"policy", "theta0", "theta1", "pi0", "pi1", "residuals", "stability"} <= set(json.loads(text)[0])
        back = equilibria_from_json(text)
        assert [(q.theta0, q.pi1, q.stability) for q in back] == [(q.theta0, q.pi1, q.stability) for q in eqs]

    def test_sorted_by_pi0(self, g1, cfg):
        pis = [q.pi0 for q in solve_lf(*g1, cfg)]
        assert pis == sorted(pis, reverse=True)

    def test_deterministic(self, example2, cfg):
        for pol in ("LF", "DP", "EOPP"):
            a = equilibria_to_json(solve(pol, *example2, cfg))
            b = equilibria_to_json(solve(pol, *example2, cfg))
            assert a == b

    def test_unknown_policy(self):
        with pytest.raises(ConfigurationError):
            parse_policy("fair")
        assert parse_policy(" eopp ") == "EOPP"

    def test_config_validation(self):
        with pytest.raises(ConfigurationError):
            SolverConfig(damping=0.0)
        with pytest.raises(ConfigurationError):
            SolverConfig(grid_size=0)
