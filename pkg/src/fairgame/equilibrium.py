"""Equilibria of the applicant-firm game under each fairness policy.

Every solver discretizes the decision variable, looks for sign changes of
the defining equation on the grid and refines each bracket by bisection.
Policies:

* ``LF``  laissez-faire, one threshold per group
* ``CB``  color-blind, one shared threshold on the pooled population
* ``DP``  demographic parity, equal acceptance rates
* ``EO``  equalized odds, a shared operating point on the common frontier
* ``EOPP`` equalized opportunity, equal true-positive rates only
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .eo_derivation import DEFAULT_FRONTIER_POINTS, derived_signal_model, feasible_region, shared_frontier
from .errors import ConfigurationError
from .game_core import applicant_response, fr_from_ratio, incentives
from .signal_model import check_mlrp, concavify, likelihood_ratios, roc

log = logging.getLogger(__name__)

POLICIES = ("LF", "CB", "DP", "EO", "EOPP")


@dataclass(frozen=True)
class SolverConfig:
    grid_size: int = 2001
    tol: float = 1e-3  # residual tolerance, in pi units
    dedup_steps: float = 2.0
    theta_resolution: float = 1e-6
    frontier_points: int = DEFAULT_FRONTIER_POINTS
    # DP / EOPP fixed-point scheme (used when method == "fixed_point")
    damping: float = 0.5
    max_iter: int = 500
    n_starts: int = 32
    seed: int = 0
    method: str = "scan"

    def __post_init__(self):
        positive = (self.grid_size, self.tol, self.dedup_steps, self.theta_resolution,
                    self.frontier_points, self.max_iter, self.n_starts)
        if any(not v > 0 for v in positive) or self.grid_size < 3:
            raise ConfigurationError(f"solver settings must be positive: {self}")
        if not 0.0 < self.damping <= 1.0:
            raise ConfigurationError(f"damping must lie in (0, 1], got {self.damping}")
        if self.method not in ("scan", "fixed_point"):
            raise ConfigurationError(f"unknown method {self.method!r}")

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class Equilibrium:
    """Thresholds, qualification rates and diagnostics of one equilibrium.

    ``rates`` holds ``((fp0, tp0), (fp1, tp1))``: the acceptance probability
    of unqualified and qualified applicants in each group.  For EO the
    thresholds are the frontier coordinate p = 1 - fp; for EOPP they are the
    shared true-positive rate.
    """

    policy: str
    theta0: float
    theta1: float
    pi0: float
    pi1: float
    rates: tuple
    residuals: dict = field(default_factory=dict)
    stability: str | None = None

    @property
    def disparity(self):
        return abs(self.pi0 - self.pi1)

    @property
    def pis(self):
        return (self.pi0, self.pi1)

    @property
    def thetas(self):
        return (self.theta0, self.theta1)

    def to_dict(self):
        return {
            "policy": self.policy,
            "theta0": self.theta0,
            "theta1": self.theta1,
            "pi0": self.pi0,
            "pi1": self.pi1,
            "residuals": dict(sorted(self.residuals.items())),
            "stability": self.stability,
            "rates": [list(r) for r in self.rates],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            policy=d["policy"],
            theta0=float(d["theta0"]),
            theta1=float(d["theta1"]),
            pi0=float(d["pi0"]),
            pi1=float(d["pi1"]),
            rates=tuple(tuple(map(float, r)) for r in d["rates"]),
            residuals={k: float(v) for k, v in d.get("residuals", {}).items()},
            stability=d.get("stability"),
        )


def equilibria_to_json(eqs, indent=2):
    return json.dumps([e.to_dict() for e in eqs], indent=indent, sort_keys=True)


def equilibria_from_json(text):
    return [Equilibrium.from_dict(d) for d in json.loads(text)]


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------


def _grid(model, cfg):
    return np.linspace(model.theta_min, model.theta_max, cfg.grid_size)


def _ar(model, params, s, theta):
    return applicant_response(params, incentives(model, params.omega, s, theta))


def _fr(model, params, s, theta):
    return fr_from_ratio(likelihood_ratios(model, s, theta), params.r)


def _rates(model, s, theta):
    fp = 1.0 - float(model.dist("u", s).cdf(theta))
    tp = 1.0 - float(model.dist("q", s).cdf(theta))
    return fp, tp


def _sort(eqs):
    return sorted(eqs, key=lambda q: (-q.pi0, -q.pi1, q.theta0, q.theta1))


@dataclass(frozen=True)
class Root:
    x: float
    direction: int  # +1 when the function rises through zero, -1 when it falls, 0 if it touches


def bisect(fn, a, b, fa, resolution):
    """Shrink a sign-change bracket [a, b] to width ``resolution``."""
    while b - a > resolution:
        m = 0.5 * (a + b)
        fm = float(fn(m))
        if fm == 0.0:
            return m
        if math.isnan(fm):
            break
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def scan_roots(fn, grid, resolution, values=None):
    """All zero crossings of ``fn`` along ``grid``; nan values break brackets.

    Runs of exact zeros count as one root at their middle node.
    """
    v = np.asarray(fn(grid) if values is None else values, dtype=float)
    roots = []
    i, n = 0, v.size
    while i < n - 1:
        if not np.isfinite(v[i]):
            i += 1
            continue
        if v[i] == 0.0:
            j = i
            while j + 1 < n and v[j + 1] == 0.0:
                j += 1
            before = v[i - 1] if i > 0 else np.nan
            after = v[j + 1] if j + 1 < n else np.nan
            if np.isfinite(before) and np.isfinite(after) and (before > 0) != (after > 0):
                direction = 1 if after > 0 else -1
            else:
                direction = 0
            roots.append(Root(float(grid[(i + j) // 2]), direction))
            i = j + 1
            continue
        w = v[i + 1]
        if np.isfinite(w) and w != 0.0 and (w > 0) != (v[i] > 0):
            x = bisect(fn, float(grid[i]), float(grid[i + 1]), v[i], resolution)
            roots.append(Root(x, 1 if w > 0 else -1))
        i += 1
    return roots


def _dedup(items, key, radius):
    out = []
    for it in items:
        if all(np.max(np.abs(np.subtract(key(it), key(o)))) > radius for o in out):
            out.append(it)
    return out


def _stability(direction):
    # AR - FR falling through zero as theta grows is the stable crossing
    return {-1: "stable", 1: "unstable", 0: "unstable"}[direction]


def _firm_gap(fw_grid, fw_point, params):
    """Best attainable firm welfare minus the candidate's, in units of max(v_q, v_u)."""
    return max(0.0, float(np.nanmax(fw_grid)) - fw_point) / max(params.v_q, params.v_u)


def _fw(params, fp, tp, pi):
    return pi * tp * params.v_q - (1.0 - pi) * fp * params.v_u


def _group_fw_curve(model, params, s, theta, pi):
    fp = 1.0 - model.dist("u", s).cdf(theta)
    tp = 1.0 - model.dist("q", s).cdf(theta)
    return _fw(params, fp, tp, pi)


# ---------------------------------------------------------------------------
# Laissez-faire
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSolution:
    theta: float
    pi: float
    stability: str
    residuals: dict


def lf_group_solutions(model, params, s, cfg, grid=None, dedup_radius=None):
    """Intersections of the AR and FR curves of one group.

    Falls back to the no-hiring boundary point (theta at the top of the grid)
    when the curves never cross.
    """
    theta = _grid(model, cfg) if grid is None else grid
    if dedup_radius is None:
        dedup_radius = cfg.dedup_steps * (theta[-1] - theta[0]) / (theta.size - 1)

    def gap(x):
        return _ar(model, params, s, x) - _fr(model, params, s, x)

    roots = _dedup(scan_roots(gap, theta, cfg.theta_resolution), lambda r: (r.x,), dedup_radius)
    sols = []
    for r in roots:
        pi = float(_ar(model, params, s, r.x))
        res = {"ar": 0.0, "fr": abs(pi - float(_fr(model, params, s, r.x)))}
        sols.append(GroupSolution(r.x, pi, _stability(r.direction), res))
    if not sols:
        top = float(theta[-1])
        pi = float(_ar(model, params, s, top))
        fw = _group_fw_curve(model, params, s, theta, pi)
        res = {"ar": 0.0, "firm_gap": _firm_gap(fw, float(fw[-1]), params)}
        sols.append(GroupSolution(top, pi, "boundary", res))
    return sols


def solve_lf(model, params, cfg=None):
    """Every combination of per-group AR/FR intersections."""
    cfg = cfg or SolverConfig()
    for s in (0, 1):
        if not check_mlrp(model, s, _grid(model, cfg)).holds:
            log.warning("MLRP fails for group %d; FR curve may be non-monotone", s)
    per_group = [lf_group_solutions(model, params, s, cfg) for s in (0, 1)]
    eqs = []
    for g0, g1 in itertools.product(*per_group):
        res = {f"{k}{s}": v for s, g in enumerate((g0, g1)) for k, v in g.residuals.items()}
        if "boundary" in (g0.stability, g1.stability):
            stab = "boundary"
        else:
            stab = "stable" if g0.stability == g1.stability == "stable" else "unstable"
        rates = (_rates(model, 0, g0.theta), _rates(model, 1, g1.theta))
        eqs.append(Equilibrium("LF", g0.theta, g1.theta, g0.pi, g1.pi, rates, res, stab))
    return _sort(eqs)


def multiplicity_condition(model, params, s, cfg=None):
    """True iff the AR curve rises strictly above the FR curve somewhere on the grid."""
    cfg = cfg or SolverConfig()
    theta = _grid(model, cfg)
    gap = _ar(model, params, s, theta) - _fr(model, params, s, theta)
    return bool(np.any(gap[np.isfinite(gap)] > 0))


# ---------------------------------------------------------------------------
# Color-blind
# ---------------------------------------------------------------------------


def pooled_ratio(model, params, theta):
    """lambda-weighted f_u over lambda-weighted f_q across both groups."""
    lam = params.weights()
    with np.errstate(divide="ignore"):
        loglam = np.log(lam)
    lu = np.logaddexp(*(loglam[s] + model.dist("u", s).logpdf(theta) for s in (0, 1)))
    lq = np.logaddexp(*(loglam[s] + model.dist("q", s).logpdf(theta) for s in (0, 1)))
    with np.errstate(invalid="ignore", over="ignore"):
        ratio = np.exp(lu - lq)
    ratio = np.where(np.isneginf(lq) & np.isfinite(lu), np.inf, ratio)
    return np.where(np.isneginf(lq) & np.isneginf(lu), np.nan, ratio)


def _cb_gap(model, params, theta):
    lam0, lam1 = params.weights()
    ar = lam0 * _ar(model, params, 0, theta) + lam1 * _ar(model, params, 1, theta)
    return ar - fr_from_ratio(pooled_ratio(model, params, theta), params.r)


def solve_cb(model, params, cfg=None):
    """Single shared threshold against the pooled population."""
    cfg = cfg or SolverConfig()
    theta = _grid(model, cfg)
    radius = cfg.dedup_steps * (theta[1] - theta[0])
    roots = _dedup(
        scan_roots(lambda x: _cb_gap(model, params, x), theta, cfg.theta_resolution),
        lambda r: (r.x,),
        radius,
    )
    eqs = []
    for r in roots:
        pis = [float(_ar(model, params, s, r.x)) for s in (0, 1)]
        pooled = params.lambda0 * pis[0] + params.lambda1 * pis[1]
        fr = float(fr_from_ratio(pooled_ratio(model, params, r.x), params.r))
        res = {"ar0": 0.0, "ar1": 0.0, "fr": abs(pooled - fr)}
        rates = (_rates(model, 0, r.x), _rates(model, 1, r.x))
        eqs.append(Equilibrium("CB", r.x, r.x, pis[0], pis[1], rates, res, _stability(r.direction)))
    if not eqs:
        top = float(theta[-1])
        pis = [float(_ar(model, params, s, top)) for s in (0, 1)]
        fw = sum(lam * _group_fw_curve(model, params, s, theta, pis[s])
                 for s, lam in enumerate(params.weights()))
        res = {"ar0": 0.0, "ar1": 0.0, "firm_gap": _firm_gap(fw, float(fw[-1]), params)}
        rates = (_rates(model, 0, top), _rates(model, 1, top))
        eqs.append(Equilibrium("CB", top, top, pis[0], pis[1], rates, res, "boundary"))
    return _sort(eqs)


# ---------------------------------------------------------------------------
# Demographic parity
# ---------------------------------------------------------------------------


def _acceptance(model, s, theta, pi):
    return pi * (1.0 - model.dist("q", s).cdf(theta)) + (1.0 - pi) * (1.0 - model.dist("u", s).cdf(theta))


def _posterior_q(model, s, theta, pi):
    """P(e = q | theta, s) under belief pi; nan outside the joint support."""
    phi = likelihood_ratios(model, s, theta)
    pi = np.asarray(pi, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        post = pi / (pi + (1.0 - pi) * phi)
    post = np.where(np.isposinf(phi), np.where(pi >= 1.0, 1.0, 0.0), post)
    return np.where(np.isnan(phi), np.nan, post)


def dp_best_response(model, params, pis, theta):
    """Firm's welfare-maximizing DP cut pair given beliefs, by a sweep over group 0's cut.

    For every grid cut of group 0 the group-1 cut with the same acceptance
    rate is found by inverting group 1's (decreasing) acceptance curve.
    Returns ``(theta0, theta1, fw_max, fw_curve)``.
    """
    a0 = _acceptance(model, 0, theta, pis[0])
    a1 = _acceptance(model, 1, theta, pis[1])
    # a1 decreases in theta; reverse for interpolation
    xs = np.maximum.accumulate(a1[::-1])
    t1 = np.interp(a0, xs, theta[::-1])
    lam0, lam1 = params.weights()
    fw = lam0 * _group_fw_curve(model, params, 0, theta, pis[0]) + lam1 * _group_fw_curve(
        model, params, 1, t1, pis[1]
    )
    k = int(np.nanargmax(fw))
    return float(theta[k]), float(t1[k]), float(fw[k]), fw


def _dp_residuals(model, params, th0, th1, pis, theta):
    lam0, lam1 = params.weights()
    _, _, _, fw_curve = dp_best_response(model, params, pis, theta)
    fw = lam0 * float(_group_fw_curve(model, params, 0, th0, pis[0])) + lam1 * float(
        _group_fw_curve(model, params, 1, th1, pis[1])
    )
    return {
        "ar0": abs(pis[0] - float(_ar(model, params, 0, th0))),
        "ar1": abs(pis[1] - float(_ar(model, params, 1, th1))),
        "parity": abs(float(_acceptance(model, 0, th0, pis[0])) - float(_acceptance(model, 1, th1, pis[1]))),
        "firm_gap": _firm_gap(fw_curve, fw, params),
    }


def _dp_candidates_scan(model, params, theta):
    """Interior solutions of the DP first-order system with applicants best-responding.

    With pi_s = AR_s(theta_s) substituted, an equilibrium needs equal
    acceptance g0(theta0) = g1(theta1) and a vanishing marginal firm profit
    lam0 m0(theta0) + lam1 m1(theta1) = 0, where m_s is the expected profit
    of the marginal accepted applicant.  Both equations are separable, so on
    each grid cell their bilinear interpolants reduce to a 2x2 linear system.
    """
    lam0, lam1 = params.weights()
    g, m = [], []
    for s in (0, 1):
        pi = _ar(model, params, s, theta)
        g.append(_acceptance(model, s, theta, pi))
        post = _posterior_q(model, s, theta, pi)
        m.append(post * (params.v_q + params.v_u) - params.v_u)
    m0, m1 = lam0 * m[0], lam1 * m[1]

    def seg_range(v):
        return np.minimum(v[:-1], v[1:]), np.maximum(v[:-1], v[1:])

    g0lo, g0hi = seg_range(g[0])
    g1lo, g1hi = seg_range(g[1])
    m0lo, m0hi = seg_range(m0)
    m1lo, m1hi = seg_range(-m1)
    hit = (g0lo[:, None] <= g1hi[None, :]) & (g0hi[:, None] >= g1lo[None, :])
    hit &= (m0lo[:, None] <= m1hi[None, :]) & (m0hi[:, None] >= m1lo[None, :])
    ii, jj = np.nonzero(hit)
    out = []
    for i, j in zip(ii, jj):
        dg0, dg1 = g[0][i + 1] - g[0][i], g[1][j + 1] - g[1][j]
        dm0, dm1 = m0[i + 1] - m0[i], m1[j + 1] - m1[j]
        a = np.array([[dg0, -dg1], [dm0, dm1]])
        rhs = np.array([g[1][j] - g[0][i], -m0[i] - m1[j]])
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(rhs)):
            continue
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        if abs(det) < 1e-300:
            continue
        al = (rhs[0] * a[1, 1] - a[0, 1] * rhs[1]) / det
        be = (a[0, 0] * rhs[1] - a[1, 0] * rhs[0]) / det
        if -1e-12 <= al <= 1 + 1e-12 and -1e-12 <= be <= 1 + 1e-12:
            t0 = theta[i] + min(max(al, 0.0), 1.0) * (theta[i + 1] - theta[i])
            t1 = theta[j] + min(max(be, 0.0), 1.0) * (theta[j + 1] - theta[j])
            out.append((float(t0), float(t1)))
    return out


def _dp_candidates_fixed_point(model, params, theta, cfg):
    """Damped best-response iteration on (pi0, pi1) from seeded starts."""
    rng = np.random.default_rng(cfg.seed)
    starts = rng.uniform(0.0, 1.0, size=(cfg.n_starts, 2))
    out = []
    for pis in starts:
        for _ in range(cfg.max_iter):
            t0, t1, _, _ = dp_best_response(model, params, pis, theta)
            new = np.array([float(_ar(model, params, 0, t0)), float(_ar(model, params, 1, t1))])
            step = new - pis
            pis = pis + cfg.damping * step
            if np.max(np.abs(step)) < 0.1 * cfg.tol:
                out.append((t0, t1))
                break
    return out


def solve_dp(model, params, cfg=None):
    """Equilibria where the firm maximizes welfare subject to equal acceptance rates."""
    cfg = cfg or SolverConfig()
    theta = _grid(model, cfg)
    if cfg.method == "scan":
        cands = _dp_candidates_scan(model, params, theta)
    else:
        cands = _dp_candidates_fixed_point(model, params, theta, cfg)
    eqs = []
    for t0, t1 in cands:
        pis = (float(_ar(model, params, 0, t0)), float(_ar(model, params, 1, t1)))
        res = _dp_residuals(model, params, t0, t1, pis, theta)
        if max(res.values()) > cfg.tol:
            continue  # first-order point that is not the firm's global optimum
        if min(_acceptance(model, s, t, pis[s]) for s, t in ((0, t0), (1, t1))) < 1e-9:
            continue  # no-hiring corner, reported as the boundary point below
        rates = (_rates(model, 0, t0), _rates(model, 1, t1))
        eqs.append(Equilibrium("DP", t0, t1, pis[0], pis[1], rates, res, None))
    radius = cfg.dedup_steps * (theta[1] - theta[0])
    eqs = _dedup(_sort(eqs), lambda q: (q.theta0, q.theta1), radius)
    if not eqs:
        if cands:
            log.info("DP: %d candidate points, none verified", len(cands))
        top = float(theta[-1])
        pis = (float(_ar(model, params, 0, top)), float(_ar(model, params, 1, top)))
        res = _dp_residuals(model, params, top, top, pis, theta)
        rates = (_rates(model, 0, top), _rates(model, 1, top))
        eqs = [Equilibrium("DP", top, top, pis[0], pis[1], rates, res, "boundary")]
    return eqs


# ---------------------------------------------------------------------------
# Equalized odds
# ---------------------------------------------------------------------------


def eo_frontier(model, cfg=None):
    """Shared frontier of both groups' feasible regions, from ROCs on the solver grid."""
    cfg = cfg or SolverConfig()
    thresholds = _grid(model, cfg)[::-1]
    regions = [feasible_region(roc(model, s, thresholds), s) for s in (0, 1)]
    return shared_frontier(regions[0], regions[1], cfg.frontier_points)


def solve_eo(model, params, cfg=None):
    """Equilibria on the equalized-odds frontier; both groups share pi by construction."""
    cfg = cfg or SolverConfig()
    pseudo = derived_signal_model(eo_frontier(model, cfg))
    grid = pseudo.grid()
    radius = cfg.dedup_steps / (cfg.frontier_points - 1)
    eqs = []
    for sol in lf_group_solutions(pseudo, params, 0, cfg, grid=grid, dedup_radius=radius):
        rate = _rates(pseudo, 0, sol.theta)
        res = {k: v for k, v in sol.residuals.items()}
        # one float object for both groups: identical incentives, identical pi
        pi = sol.pi
        eqs.append(Equilibrium("EO", sol.theta, sol.theta, pi, pi, (rate, rate), res, sol.stability))
    return _sort(eqs)


# ---------------------------------------------------------------------------
# Equalized opportunity
# ---------------------------------------------------------------------------


class _HullFP:
    """False-positive rate as a convex function of the true-positive rate on a concave ROC."""

    def __init__(self, curve):
        hull = concavify(curve)
        tp, first = np.unique(hull.tp, return_index=True)
        self.tp = tp
        self.fp = hull.fp[first]  # lowest fp per tp level
        self.slope = np.diff(self.fp) / np.diff(self.tp)

    def __call__(self, t):
        return np.interp(t, self.tp, self.fp)

    def right_derivative(self, t):
        k = np.clip(np.searchsorted(self.tp, t, side="right") - 1, 0, self.slope.size - 1)
        return self.slope[k]


def _eopp_setup(model, params, cfg):
    thresholds = _grid(model, cfg)[::-1]
    hulls = [_HullFP(roc(model, s, thresholds)) for s in (0, 1)]
    t = np.unique(np.concatenate([np.linspace(0.0, 1.0, cfg.grid_size), hulls[0].tp, hulls[1].tp]))
    return hulls, t


def _eopp_pis(params, hulls, t):
    return [applicant_response(params, params.omega * (t - h(t))) for h in hulls]


def _eopp_marginal(params, hulls, t):
    """d FW / d t along the shared-TP line with applicants best-responding."""
    lam = params.weights()
    pis = _eopp_pis(params, hulls, t)
    return sum(
        lam[s] * (pis[s] * params.v_q - (1.0 - pis[s]) * params.v_u * hulls[s].right_derivative(t))
        for s in (0, 1)
    )


def _eopp_residuals(params, hulls, t, pis, tgrid):
    lam = params.weights()
    fw_curve = sum(lam[s] * _fw(params, hulls[s](tgrid), tgrid, pis[s]) for s in (0, 1))
    fw = sum(lam[s] * _fw(params, float(hulls[s](t)), t, pis[s]) for s in (0, 1))
    ar = [abs(pis[s] - float(applicant_response(params, params.omega * (t - hulls[s](t))))) for s in (0, 1)]
    return {"ar0": ar[0], "ar1": ar[1], "tp": 0.0, "firm_gap": _firm_gap(fw_curve, fw, params)}


def _eopp_equilibrium(params, hulls, t, tgrid, stability):
    pis = [float(p) for p in _eopp_pis(params, hulls, t)]
    res = _eopp_residuals(params, hulls, t, pis, tgrid)
    rates = tuple((float(h(t)), float(t)) for h in hulls)
    return Equilibrium("EOPP", float(t), float(t), pis[0], pis[1], rates, res, stability)


def solve_eopp(model, params, cfg=None):
    """Equilibria where both groups face the same true-positive rate.

    Each group is served on its own concavified ROC.  For fixed beliefs the
    firm's welfare is concave in the shared TP level t, so every zero of the
    marginal welfare (with pi_s = G(omega (t - FP_s(t)))) is a best response.
    """
    cfg = cfg or SolverConfig()
    hulls, tgrid = _eopp_setup(model, params, cfg)
    if cfg.method == "scan":
        roots = scan_roots(lambda t: _eopp_marginal(params, hulls, t), tgrid, cfg.theta_resolution)
        ts = [r.x for r in roots if 0.0 < r.x < 1.0]
    else:
        ts = _eopp_fixed_point(params, hulls, tgrid, cfg)
    eqs = [_eopp_equilibrium(params, hulls, t, tgrid, None) for t in ts]
    eqs = [q for q in eqs if max(q.residuals.values()) <= cfg.tol and q.theta0 > 1e-9]
    eqs = _dedup(_sort(eqs), lambda q: (q.theta0,), cfg.dedup_steps / (cfg.grid_size - 1))
    if not eqs:
        eqs = [_eopp_equilibrium(params, hulls, 0.0, tgrid, "boundary")]
    return eqs


def _eopp_fixed_point(params, hulls, tgrid, cfg):
    lam = params.weights()
    rng = np.random.default_rng(cfg.seed)
    out = []
    for pis in rng.uniform(0.0, 1.0, size=(cfg.n_starts, 2)):
        for _ in range(cfg.max_iter):
            fw = sum(lam[s] * _fw(params, hulls[s](tgrid), tgrid, pis[s]) for s in (0, 1))
            t = float(tgrid[int(np.argmax(fw))])
            new = np.array([float(p) for p in _eopp_pis(params, hulls, t)])
            step = new - pis
            pis = pis + cfg.damping * step
            if np.max(np.abs(step)) < 0.1 * cfg.tol:
                out.append(t)
                break
    return out


# ---------------------------------------------------------------------------
# Dispatch and verification
# ---------------------------------------------------------------------------

SOLVERS = {"LF": solve_lf, "CB": solve_cb, "DP": solve_dp, "EO": solve_eo, "EOPP": solve_eopp}


def parse_policy(name):
    key = str(name).strip().upper()
    if key not in SOLVERS:
        raise ConfigurationError(f"unknown policy {name!r}; expected one of {', '.join(POLICIES)}")
    return key


def solve(policy, model, params, cfg=None):
    return SOLVERS[parse_policy(policy)](model, params, cfg or SolverConfig())


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    residuals: dict
    tol: float

    def worst(self):
        return max(self.residuals.values()) if self.residuals else 0.0


def verify(model, params, candidate, cfg=None):
    """Recompute the defining equations of ``candidate`` and report absolute defects."""
    cfg = cfg or SolverConfig()
    q = candidate
    theta = _grid(model, cfg)
    pis = (q.pi0, q.pi1)
    if q.policy == "LF":
        res = {}
        for s, t in enumerate(q.thetas):
            res[f"ar{s}"] = abs(pis[s] - float(_ar(model, params, s, t)))
            if q.stability == "boundary" and t >= theta[-1]:
                fw = _group_fw_curve(model, params, s, theta, pis[s])
                res[f"firm_gap{s}"] = _firm_gap(fw, float(_group_fw_curve(model, params, s, t, pis[s])), params)
            else:
                res[f"fr{s}"] = abs(pis[s] - float(_fr(model, params, s, t)))
    elif q.policy == "CB":
        t = q.theta0
        res = {f"ar{s}": abs(pis[s] - float(_ar(model, params, s, t))) for s in (0, 1)}
        res["same_threshold"] = abs(q.theta0 - q.theta1)
        pooled = params.lambda0 * q.pi0 + params.lambda1 * q.pi1
        if q.stability == "boundary":
            fw = sum(lam * _group_fw_curve(model, params, s, theta, pis[s])
                     for s, lam in enumerate(params.weights()))
            fw_t = sum(lam * float(_group_fw_curve(model, params, s, t, pis[s]))
                       for s, lam in enumerate(params.weights()))
            res["firm_gap"] = _firm_gap(fw, fw_t, params)
        else:
            res["fr"] = abs(pooled - float(fr_from_ratio(pooled_ratio(model, params, t), params.r)))
    elif q.policy == "DP":
        res = _dp_residuals(model, params, q.theta0, q.theta1, pis, theta)
    elif q.policy == "EO":
        pseudo = derived_signal_model(eo_frontier(model, cfg))
        p = q.theta0
        res = {
            "equal_pi": abs(q.pi0 - q.pi1),
            "same_point": abs(q.theta0 - q.theta1),
            "ar": abs(q.pi0 - float(_ar(pseudo, params, 0, p))),
        }
        if q.stability == "boundary":
            grid = pseudo.grid()
            fw = _group_fw_curve(pseudo, params, 0, grid, q.pi0)
            res["firm_gap"] = _firm_gap(fw, float(_group_fw_curve(pseudo, params, 0, p, q.pi0)), params)
        else:
            res["fr"] = abs(q.pi0 - float(_fr(pseudo, params, 0, p)))
    elif q.policy == "EOPP":
        hulls, tgrid = _eopp_setup(model, params, cfg)
        res = _eopp_residuals(params, hulls, q.theta0, pis, tgrid)
        res["tp"] = abs(q.rates[0][1] - q.rates[1][1])
    else:
        raise ConfigurationError(f"unknown policy {q.policy!r}")
    res = {k: float(v) for k, v in res.items()}
    return VerifyReport(all(v <= cfg.tol for v in res.values()), res, cfg.tol)


def asdict_config(cfg):
    return asdict(cfg)
