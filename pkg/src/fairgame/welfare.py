"""Firm, applicant and social welfare of an equilibrium, and policy comparison tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .equilibrium import SolverConfig, solve
from .errors import ConfigurationError

TABLE_COLUMNS = ("policy", "disparity", "sw", "fw", "aw", "theta0", "theta1", "pi0", "pi1")
DEFAULT_POLICIES = ("LF", "CB", "DP", "EO")


def firm_welfare_rates(params, fp, tp, pi):
    return pi * tp * params.v_q - (1.0 - pi) * fp * params.v_u


def firm_welfare(model, params, s, theta, pi):
    """Expected hiring surplus per applicant of group s."""
    fp = 1.0 - model.dist("u", s).cdf(theta)
    tp = 1.0 - model.dist("q", s).cdf(theta)
    return firm_welfare_rates(params, fp, tp, pi)


def expected_cost(params, pi, literal=False):
    """Investment cost borne per applicant when the cheapest fraction ``pi`` invests.

    Default: E[c; c <= G^-1(pi)] under the uniform cost density.  ``literal``
    instead returns the raw integral of c dc up to the mixed cost
    (1 - pi) c_lo + pi c_hi, to be added rather than subtracted.
    """
    lo, hi = params.cost_lo, params.cost_hi
    if literal:
        top = (1.0 - pi) * lo + pi * hi
        return 0.5 * (top * top - lo * lo)
    top = lo + pi * (hi - lo)
    return 0.5 * (top * top - lo * lo) / (hi - lo)


def applicant_welfare_rates(params, fp, tp, pi, literal=False):
    reward = params.omega * (pi * tp + (1.0 - pi) * fp)
    cost = expected_cost(params, pi, literal)
    return reward + cost if literal else reward - cost


def applicant_welfare(model, params, s, theta, pi, literal=False):
    """Expected reward net of investment cost for group s."""
    fp = 1.0 - model.dist("u", s).cdf(theta)
    tp = 1.0 - model.dist("q", s).cdf(theta)
    return applicant_welfare_rates(params, fp, tp, pi, literal)


@dataclass(frozen=True)
class WelfareReport:
    fw: tuple
    aw: tuple
    sw: tuple
    sw_total: float
    fw_total: float
    aw_total: float
    disparity: float
    equilibrium: object

    def row(self):
        q = self.equilibrium
        return {
            "policy": q.policy,
            "disparity": self.disparity,
            "sw": self.sw_total,
            "fw": self.fw_total,
            "aw": self.aw_total,
            "theta0": q.theta0,
            "theta1": q.theta1,
            "pi0": q.pi0,
            "pi1": q.pi1,
        }


def social_welfare(params, equilibrium, literal=False):
    """Per-group and lambda-weighted welfare at the equilibrium's operating points.

    The equilibrium's stored rates are used, so thresholds that live on a
    derived scale (EO, EOPP) need no further translation.
    """
    fws, aws, sws = [], [], []
    for s, pi in enumerate(equilibrium.pis):
        fp, tp = equilibrium.rates[s]
        fw = float(firm_welfare_rates(params, fp, tp, pi))
        aw = float(applicant_welfare_rates(params, fp, tp, pi, literal))
        fws.append(fw)
        aws.append(aw)
        sws.append(fw + aw)
    lam = params.weights()
    return WelfareReport(
        fw=tuple(fws),
        aw=tuple(aws),
        sw=tuple(sws),
        sw_total=lam[0] * sws[0] + lam[1] * sws[1],
        fw_total=lam[0] * fws[0] + lam[1] * fws[1],
        aw_total=lam[0] * aws[0] + lam[1] * aws[1],
        disparity=abs(equilibrium.pi0 - equilibrium.pi1),
        equilibrium=equilibrium,
    )


@dataclass(frozen=True)
class PolicyRow:
    policy: str
    report: WelfareReport | None  # None when the solver found nothing

    def as_dict(self):
        if self.report is None:
            return {c: (self.policy if c == "policy" else None) for c in TABLE_COLUMNS}
        return self.report.row()


_SELECT_ALIASES = {"max": "best", "min": "worst"}


def select(reports, how="best"):
    """Equilibria to tabulate: max SW ("best"/"max"), min SW ("worst"/"min") or "all"."""
    how = _SELECT_ALIASES.get(how, how)
    if how not in ("best", "worst", "all"):
        raise ConfigurationError(f"unknown equilibrium selection {how!r}")
    if not reports:
        return []
    if how == "all":
        return list(reports)
    ordered = sorted(reports, key=lambda r: r.sw_total)
    return [ordered[-1] if how == "best" else ordered[0]]


def compare_policies(model, params, cfg=None, selection="best", policies=DEFAULT_POLICIES, literal=False):
    """One row per policy (several under ``selection='all'``) for the chosen equilibria."""
    cfg = cfg or SolverConfig()
    rows = []
    for pol in policies:
        eqs = solve(pol, model, params, cfg)
        reports = [social_welfare(params, q, literal) for q in eqs]
        chosen = select(reports, selection)
        if not chosen:
            rows.append(PolicyRow(pol, None))
        rows.extend(PolicyRow(pol, r) for r in chosen)
    return rows


def table_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    for row in rows:
        d = row.as_dict()
        w.writerow(["" if d[c] is None else (d[c] if c == "policy" else repr(float(d[c]))) for c in TABLE_COLUMNS])
    return buf.getvalue()


def table_to_json(rows):
    return json.dumps([row.as_dict() for row in rows], indent=2)


def sw_by_pi(params, equilibria, s, literal=False):
    """(pi_s, SW_s) pairs of every equilibrium, ordered by pi_s."""
    out = sorted((q.pis[s], social_welfare(params, q, literal).sw[s]) for q in equilibria)
    return np.array(out).reshape(-1, 2)


__all__ = [
    "TABLE_COLUMNS",
    "DEFAULT_POLICIES",
    "firm_welfare",
    "applicant_welfare",
    "expected_cost",
    "WelfareReport",
    "social_welfare",
    "compare_policies",
    "table_to_csv",
    "table_to_json",
]
