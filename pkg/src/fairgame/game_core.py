"""Economic parameters and both players' best responses (FR and AR curves)."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import ConfigurationError
from .signal_model import likelihood_ratio, likelihood_ratios


@dataclass(frozen=True)
class GameParams:
    """Payoffs and population shares.

    v_u is the magnitude of the loss from accepting an unqualified applicant.
    Investment costs are uniform on [cost_lo, cost_hi] for both groups.
    """

    v_q: float = 1.0
    v_u: float = 1.0
    omega: float = 1.0
    lambda1: float = 0.5
    cost_lo: float = 0.0
    cost_hi: float = 0.2

    def __post_init__(self):
        if not (self.v_q > 0 and self.v_u > 0 and self.omega > 0):
            raise ConfigurationError("v_q, v_u and omega must be positive")
        if not 0.0 <= self.lambda1 <= 1.0:
            raise ConfigurationError(f"lambda1 must lie in [0, 1], got {self.lambda1}")
        if not (self.cost_lo >= 0 and self.cost_hi > self.cost_lo):
            raise ConfigurationError("need 0 <= cost_lo < cost_hi")

    @property
    def r(self):
        return self.v_q / self.v_u

    @property
    def lambda0(self):
        return 1.0 - self.lambda1

    def weights(self):
        return (self.lambda0, self.lambda1)

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


# NLSY-style calibration: income gaps in dollars (53097 - 46640, 46640 - 40604).
NLSY_V_Q = 53097.0 - 46640.0
NLSY_V_U = 46640.0 - 40604.0
NLSY_OMEGA = 46640.0 - 40604.0


def max_incentive(model, omega, grid=None):
    """max over groups and grid of omega * (F_u - F_q)."""
    theta = model.grid() if grid is None else grid
    return max(float(np.max(incentives(model, omega, s, theta))) for s in (0, 1))


def nlsy_params(model, lambda1):
    """Dollar-calibrated parameters; cost_hi is the largest attainable incentive."""
    return GameParams(
        v_q=NLSY_V_Q,
        v_u=NLSY_V_U,
        omega=NLSY_OMEGA,
        lambda1=lambda1,
        cost_lo=0.0,
        cost_hi=max_incentive(model, NLSY_OMEGA),
    )


@dataclass(frozen=True)
class CostModel:
    """Uniform investment cost distribution G."""

    lo: float
    hi: float

    @classmethod
    def of(cls, params):
        return cls(params.cost_lo, params.cost_hi)

    def cdf(self, c):
        return np.clip((np.asarray(c, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)


# ---------------------------------------------------------------------------
# Applicant side
# ---------------------------------------------------------------------------


def incentives(model, omega, s, theta):
    """Vectorised omega * (F_u(theta) - F_q(theta)) for group s."""
    return omega * (model.dist("u", s).cdf(theta) - model.dist("q", s).cdf(theta))


@dataclass(frozen=True)
class Incentive:
    value: float
    negative: bool  # CDFs cross at theta: qualified applicants score lower

    def __float__(self):
        return self.value


def incentive(model, params, s, theta):
    """Expected reward gain from investing when the cut is ``theta``."""
    v = float(incentives(model, params.omega, s, theta))
    return Incentive(v, v < 0)


def applicant_response(params, c_tilde):
    """Fraction investing: G(c~) clamped to [0, 1]."""
    out = CostModel.of(params).cdf(c_tilde)
    return float(out) if np.ndim(out) == 0 else out


def applicant_curve(model, params, s, theta):
    return applicant_response(params, incentives(model, params.omega, s, theta))


# ---------------------------------------------------------------------------
# Firm side
# ---------------------------------------------------------------------------


def fr_from_ratio(phi, r):
    """pi = phi / (r + phi) with phi = +inf mapped to 1; nan passes through."""
    phi = np.asarray(phi, dtype=float)
    with np.errstate(invalid="ignore"):
        out = np.where(np.isposinf(phi), 1.0, phi / (r + phi))
    return float(out) if out.ndim == 0 else out


def firm_curve(model, params, s, theta):
    """Vectorised firm response; nan outside the joint support."""
    return fr_from_ratio(likelihood_ratios(model, s, theta), params.r)


def firm_response(model, params, s, theta):
    """Belief pi under which ``theta`` is the firm's optimal cut for group s."""
    return fr_from_ratio(likelihood_ratio(model, s, theta), params.r)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResponseCurveTable:
    s: int
    theta: np.ndarray
    fr: np.ndarray
    ar: np.ndarray
    ar_mode: float

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("theta", "fr", "ar"))
            for t, f, a in zip(self.theta, self.fr, self.ar):
                w.writerow([repr(float(t)), repr(float(f)), repr(float(a))])


def response_curves(model, params, s, grid=None):
    theta = model.grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.diff(theta) <= 0):
        raise ConfigurationError("grid must be sorted ascending")
    fr = firm_curve(model, params, s, theta)
    c = incentives(model, params.omega, s, theta)
    ar = applicant_response(params, c)
    # G is monotone, so the incentive maximiser is an AR maximiser; unlike AR
    # itself it stays unique when G saturates at 1.  argmax takes the first tie.
    mode = float(theta[int(np.argmax(c))])
    return ResponseCurveTable(s, theta, fr, ar, mode)
