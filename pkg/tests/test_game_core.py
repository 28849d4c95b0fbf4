"""Incentives and the two best-response curves."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairgame.errors import ConfigurationError
from fairgame.game_core import (
    NLSY_OMEGA,
    NLSY_V_Q,
    NLSY_V_U,
    CostModel,
    GameParams,
    applicant_response,
    firm_response,
    incentive,
    incentives,
    max_incentive,
    nlsy_params,
    response_curves,
)
from fairgame.signal_model import check_mlrp, likelihood_ratio, tabulated_model


class TestGameParams:
    def test_defaults(self):
        p = GameParams()
        assert p.r == 1.0 and p.lambda0 == 0.5
        assert p.weights() == (0.5, 0.5)

    @pytest.mark.parametrize(
        "kw", [{"v_q": 0}, {"v_u": -1}, {"omega": 0}, {"lambda1": 1.5}, {"cost_lo": 0.3, "cost_hi": 0.2}]
    )
    def test_validation(self, kw):
        with pytest.raises(ConfigurationError):
            GameParams(**kw)

    def test_nlsy_constants(self, g1_model):
        assert (NLSY_V_Q, NLSY_V_U, NLSY_OMEGA) == (6457.0, 6036.0, 6036.0)
        p = nlsy_params(g1_model, 782 / 2810)
        assert p.cost_hi == pytest.approx(max_incentive(g1_model, NLSY_OMEGA))
        # Phi(0.5) - Phi(-0.5) is the largest CDF gap of G1
        assert p.cost_hi == pytest.approx(NLSY_OMEGA * float(mpmath.erf(0.5 / mpmath.sqrt(2))), rel=1e-6)


class TestIncentive:
    def test_g1_value(self, g1_model, params):
        oracle = float(mpmath.ncdf(0.5) - mpmath.ncdf(-0.5))
        c = incentive(g1_model, params, 0, 0.5)
        assert float(c) == pytest.approx(oracle, abs=1e-14)
        assert float(c) == pytest.approx(0.382925, abs=1e-6)
        assert not c.negative

    def test_uninformative_zero(self, uninformative, params):
        np.testing.assert_allclose(incentives(uninformative, 1.0, 0, np.linspace(-3, 3, 9)), 0.0)

    def test_vanishes_at_top(self, g1_model, params):
        assert float(incentive(g1_model, params, 1, g1_model.theta_max)) == pytest.approx(0.0, abs=1e-8)

    def test_negative_flag(self):
        grid = np.linspace(0, 1, 3)
        pdfs = {("q", s): [2.0, 1.0, 0.0] for s in (0, 1)} | {("u", s): [0.0, 1.0, 2.0] for s in (0, 1)}
        m = tabulated_model(grid, pdfs)
        assert incentive(m, GameParams(), 0, 0.5).negative

    def test_reparametrisation_invariance(self, g1_model):
        # theta -> theta^3 + theta is strictly increasing; CDFs transform by composition
        x = np.linspace(-4.0, 5.0, 20001)
        y = x**3 + x
        pdfs, cdfs = {}, {}
        for e in "qu":
            for s in (0, 1):
                d = g1_model.dist(e, s)
                cdfs[(e, s)] = d.cdf(x)
                pdfs[(e, s)] = d.pdf(x) / (3 * x**2 + 1)
        m = tabulated_model(y, pdfs, cdfs)
        probe = np.linspace(-3.5, 4.5, 401)
        a = incentives(g1_model, 1.0, 0, probe)
        b = incentives(m, 1.0, 0, probe**3 + probe)
        assert np.max(np.abs(a - b)) <= 1e-6


class TestApplicantResponse:
    def test_saturates(self, params):
        assert applicant_response(params, 0.382925) == 1.0

    def test_zero_incentive(self):
        assert applicant_response(GameParams(cost_hi=1.0), 0.0) == 0.0

    def test_midpoint(self):
        assert applicant_response(GameParams(cost_lo=0.1, cost_hi=0.3), 0.2) == pytest.approx(0.5)

    def test_floor_below_cost_lo(self):
        assert applicant_response(GameParams(cost_lo=0.1, cost_hi=0.3), -5.0) == 0.0

    @given(st.floats(-1, 1), st.floats(-1, 1))
    def test_monotone(self, a, b):
        p = GameParams(cost_lo=0.05, cost_hi=0.4)
        lo, hi = sorted((a, b))
        assert applicant_response(p, lo) <= applicant_response(p, hi)

    def test_cost_model(self):
        g = CostModel(0.0, 0.2)
        assert g.cdf(0.0) == 0.0 and g.cdf(0.2) == 1.0


class TestFirmResponse:
    def test_midpoint(self, g1_model, params):
        assert firm_response(g1_model, params, 0, 0.5) == pytest.approx(0.5, abs=1e-14)

    def test_closed_form(self, g1_model, params):
        e = math.exp(-1.0)
        assert firm_response(g1_model, params, 0, 1.5) == pytest.approx(e / (1 + e), rel=1e-13)
        assert firm_response(g1_model, params, 0, 1.5) == pytest.approx(0.268941, abs=1e-6)

    def test_large_r(self, g1_model):
        assert firm_response(g1_model, GameParams(v_q=1e9), 0, 0.0) < 1e-8

    @given(st.floats(-4, 5))
    def test_inverts_indifference(self, theta):
        from fairgame.data_pipeline import ScenarioSpec

        spec = ScenarioSpec("gaussian_g1")
        model, p = spec.model(), GameParams(v_q=2.0)
        pi = firm_response(model, p, 0, theta)
        phi = likelihood_ratio(model, 0, theta)
        assert (1 - pi) / pi * phi == pytest.approx(p.r, rel=1e-9)


class TestResponseCurves:
    def test_mode(self, g1_model, params):
        t = response_curves(g1_model, params, 0)
        step = g1_model.grid()[1] - g1_model.grid()[0]
        assert abs(t.ar_mode - 0.5) <= step / 2 + 1e-12
        assert t.ar[np.searchsorted(t.theta, t.ar_mode)] == np.max(t.ar)

    def test_uninformative(self, uninformative, params):
        t = response_curves(uninformative, params, 0)
        np.testing.assert_allclose(t.ar, 0.0)
        np.testing.assert_allclose(t.fr, 1 / (1 + params.r))

    def test_fr_strictly_decreasing_under_mlrp(self, g1_model, params):
        assert check_mlrp(g1_model, 0).holds
        t = response_curves(g1_model, params, 0)
        assert np.all(np.diff(t.fr) < -1e-12)

    def test_entries_are_probabilities(self, g1_model, params):
        t = response_curves(g1_model, params, 1)
        assert np.all((t.fr >= 0) & (t.fr <= 1)) and np.all((t.ar >= 0) & (t.ar <= 1))

    def test_unsorted_grid(self, g1_model, params):
        with pytest.raises(ConfigurationError):
            response_curves(g1_model, params, 0, grid=[1.0, 0.0])

    def test_csv(self, tmp_path, g1_model, params):
        t = response_curves(g1_model, params, 0, grid=np.linspace(-1, 1, 5))
        t.to_csv(tmp_path / "c.csv")
        lines = (tmp_path / "c.csv").read_text().splitlines()
        assert lines[0] == "theta,fr,ar" and len(lines) == 6
