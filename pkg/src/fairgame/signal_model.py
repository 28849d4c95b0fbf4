"""Score distributions per (effort, group) cell, likelihood ratios and ROC curves.

A :class:`SignalModel` holds one 1-D distribution of the classifier score for
every combination of effort ``e`` (``"q"`` qualified, ``"u"`` unqualified) and
group ``s`` (0 or 1).  Distributions are Gaussian, empirical (kernel smoothed
samples) or tabulated on a grid.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.interpolate import BSpline
from scipy.signal import fftconvolve
from scipy.special import expit, ndtr

from .errors import ConfigurationError, EstimationError, UndefinedRatioError

log = logging.getLogger(__name__)

EFFORTS = ("q", "u")
GROUPS = (0, 1)
CELLS = tuple((e, s) for s in GROUPS for e in EFFORTS)

DEFAULT_N_GRID = 2001
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


class Distribution1D:
    """Common interface: vectorised ``pdf``, ``logpdf`` and ``cdf``."""

    kind = "abstract"

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def support(self):
        """Interval carrying all but ~1e-9 of the mass."""
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(Distribution1D):
    mean: float
    sd: float
    kind = "gaussian"

    def __post_init__(self):
        if not self.sd > 0:
            raise ConfigurationError(f"gaussian sd must be > 0, got {self.sd}")

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.sd
        return -0.5 * z * z - _LOG_SQRT_2PI - math.log(self.sd)

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mean) / self.sd)

    def support(self):
        return self.mean - 6.0 * self.sd, self.mean + 6.0 * self.sd


class Tabulated(Distribution1D):
    """Density tabulated on a strictly increasing grid.

    The pdf is linearly interpolated between nodes and zero outside the grid.
    Without an explicit ``cdf`` table the CDF is the exact integral of the
    interpolated pdf, so pdf and CDF stay consistent off-grid.  With an
    explicit table the CDF is linearly interpolated instead; this is used for
    distributions defined through their CDF (derived frontier signals).
    """

    kind = "tabulated"

    def __init__(self, grid, pdf, cdf=None, normalize=True):
        grid = np.array(grid, dtype=float)
        pdf = np.array(pdf, dtype=float)
        if grid.ndim != 1 or grid.shape != pdf.shape or grid.size < 2:
            raise ConfigurationError("tabulated grid and pdf must be 1-D of equal length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise ConfigurationError("tabulated grid must be strictly increasing")
        if np.any(pdf < 0) or not np.all(np.isfinite(pdf)):
            raise ConfigurationError("tabulated pdf values must be finite and >= 0")
        if cdf is None:
            mass = np.trapezoid(pdf, grid)
            if not mass > 0:
                raise ConfigurationError("tabulated pdf has zero mass")
            if normalize:
                pdf = pdf / mass
            steps = 0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid)
            cdf = np.concatenate([[0.0], np.cumsum(steps)])
            self._explicit_cdf = False
        else:
            cdf = np.array(cdf, dtype=float)
            if cdf.shape != grid.shape or np.any(np.diff(cdf) < 0):
                raise ConfigurationError("explicit cdf must match the grid and be nondecreasing")
            self._explicit_cdf = True
        self.grid = grid
        self.pdf_values = pdf
        self.cdf_values = cdf
        for arr in (self.grid, self.pdf_values, self.cdf_values):
            arr.flags.writeable = False

    def pdf(self, x):
        return np.interp(x, self.grid, self.pdf_values, left=0.0, right=0.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        g, p, c = self.grid, self.pdf_values, self.cdf_values
        if self._explicit_cdf:
            return np.interp(x, g, c, left=0.0, right=c[-1])
        i = np.clip(np.searchsorted(g, x, side="right") - 1, 0, g.size - 2)
        t = x - g[i]
        width = g[i + 1] - g[i]
        val = c[i] + p[i] * t + (p[i + 1] - p[i]) * t * t / (2.0 * width)
        val = np.where(x <= g[0], 0.0, np.where(x >= g[-1], c[-1], val))
        return np.clip(val, 0.0, 1.0)

    def support(self):
        return float(self.grid[0]), float(self.grid[-1])

    def __repr__(self):
        return f"Tabulated(n={self.grid.size}, range=[{self.grid[0]:g}, {self.grid[-1]:g}])"


class Empirical(Tabulated):
    """Kernel-smoothed sample, stored as its tabulation on the fitting grid."""

    kind = "empirical"

    def __init__(self, samples, bandwidth, grid, pdf=None):
        samples = np.sort(np.asarray(samples, dtype=float))
        if samples.size < 2:
            raise EstimationError("empirical distribution needs at least 2 samples")
        if not bandwidth > 0:
            raise ConfigurationError(f"bandwidth must be > 0, got {bandwidth}")
        super().__init__(grid, kde_on_grid(samples, bandwidth, grid) if pdf is None else pdf)
        self.samples = samples
        self.samples.flags.writeable = False
        self.bandwidth = float(bandwidth)

    def __repr__(self):
        return f"Empirical(n={self.samples.size}, bandwidth={self.bandwidth:.4g})"


def silverman_bandwidth(samples):
    """1.06 * sd * n^(-1/5); falls back to a small positive width for constant samples."""
    x = np.asarray(samples, dtype=float)
    scale = max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    if sd > 1e-12 * scale:
        return 1.06 * sd * x.size ** (-0.2)
    return 1e-3 * scale


def kde_on_grid(samples, bandwidth, grid):
    """Gaussian kernel density of ``samples`` on a uniform ``grid``.

    Samples are linearly binned onto the grid nodes and the counts convolved
    with the sampled kernel; the result is renormalised to unit trapezoid mass.
    """
    grid = np.asarray(grid, dtype=float)
    n = grid.size
    delta = (grid[-1] - grid[0]) / (n - 1)
    pos = np.clip((np.asarray(samples, dtype=float) - grid[0]) / delta, 0.0, n - 1.0)
    left = np.minimum(np.floor(pos).astype(int), n - 2)
    frac = pos - left
    counts = np.bincount(left, weights=1.0 - frac, minlength=n)
    counts += np.bincount(left + 1, weights=frac, minlength=n)
    half = min(int(math.ceil(6.0 * bandwidth / delta)), n - 1)
    offsets = np.arange(-half, half + 1) * delta
    kernel = np.exp(-0.5 * (offsets / bandwidth) ** 2)
    dens = np.clip(fftconvolve(counts, kernel, mode="same"), 0.0, None)
    return dens / np.trapezoid(dens, grid)


def shrink_for_kernel(samples, bandwidth):
    """Pull samples toward their mean so that the smoothed law keeps the sample variance.

    A Gaussian kernel adds ``bandwidth**2`` to the variance; scaling deviations
    by sqrt(var / (var + h^2)) cancels that inflation (Jones, 1991).
    """
    x = np.asarray(samples, dtype=float)
    var = float(np.var(x))
    if var == 0.0:
        return x
    m = float(np.mean(x))
    return m + (x - m) * math.sqrt(var / (var + bandwidth * bandwidth))


def midpoint_ecdf(samples, x):
    """Empirical CDF with ties counted half: (#{X < x} + 0.5 #{X = x}) / n."""
    s = np.sort(np.asarray(samples, dtype=float))
    lo = np.searchsorted(s, x, side="left")
    hi = np.searchsorted(s, x, side="right")
    return (lo + 0.5 * (hi - lo)) / s.size


# ---------------------------------------------------------------------------
# Signal model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    theta_min: float
    theta_max: float
    n: int = DEFAULT_N_GRID

    def __post_init__(self):
        if not (self.n >= 2 and self.theta_max > self.theta_min):
            raise ConfigurationError(f"invalid grid spec {self}")

    def points(self):
        return np.linspace(self.theta_min, self.theta_max, self.n)


@dataclass(frozen=True)
class SignalModel:
    """Score distributions f_{e,s} for e in {q, u} and s in {0, 1}."""

    dists: Mapping[tuple, Distribution1D]
    grid_spec: GridSpec
    name: str = field(default="custom", compare=False)

    def dist(self, e, s):
        try:
            return self.dists[(e, s)]
        except KeyError:
            raise ConfigurationError(f"no distribution for cell (e={e!r}, s={s!r})") from None

    def grid(self):
        return self.grid_spec.points()

    @property
    def theta_min(self):
        return self.grid_spec.theta_min

    @property
    def theta_max(self):
        return self.grid_spec.theta_max


def gaussian_model(groups, n_grid=DEFAULT_N_GRID, name="gaussian"):
    """Parametric model from per-group ``(mean_q, sd_q, mean_u, sd_u)`` tuples.

    The grid spans six standard deviations beyond every cell so that the mass
    outside it is below 1e-8.
    """
    if len(groups) != 2:
        raise ConfigurationError("exactly two groups are required")
    dists = {}
    for s, (mq, sq, mu, su) in enumerate(groups):
        dists[("q", s)] = Gaussian(float(mq), float(sq))
        dists[("u", s)] = Gaussian(float(mu), float(su))
    lo = min(d.support()[0] for d in dists.values())
    hi = max(d.support()[1] for d in dists.values())
    return SignalModel(dists, GridSpec(lo, hi, n_grid), name=name)


def symmetric_gaussian_model(mean_q=1.0, mean_u=0.0, sd=1.0, n_grid=DEFAULT_N_GRID):
    g = (mean_q, sd, mean_u, sd)
    return gaussian_model([g, g], n_grid=n_grid, name="symmetric")


def tabulated_model(grid, pdfs, cdfs=None, name="tabulated"):
    """Model from tabulated pdfs keyed by cell; ``cdfs`` optionally pins CDF tables."""
    grid = np.asarray(grid, dtype=float)
    dists = {}
    for cell in CELLS:
        cdf = None if cdfs is None else cdfs[cell]
        dists[cell] = Tabulated(grid, pdfs[cell], cdf=cdf)
    return SignalModel(dists, GridSpec(float(grid[0]), float(grid[-1]), grid.size), name=name)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def evaluate(model, e, s, theta):
    """Return ``(pdf, cdf)`` of cell (e, s) at ``theta`` (scalar or array)."""
    d = model.dist(e, s)
    pdf, cdf = d.pdf(theta), d.cdf(theta)
    if np.ndim(theta) == 0:
        return float(pdf), float(cdf)
    return pdf, cdf


def likelihood_ratios(model, s, theta):
    """Vectorised f_u/f_q; +inf where only f_q vanishes, nan where both do."""
    lu = np.asarray(model.dist("u", s).logpdf(theta), dtype=float)
    lq = np.asarray(model.dist("q", s).logpdf(theta), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        ratio = np.exp(lu - lq)
    ratio = np.where(np.isneginf(lq) & np.isfinite(lu), np.inf, ratio)
    ratio = np.where(np.isneginf(lq) & np.isneginf(lu), np.nan, ratio)
    return ratio


def likelihood_ratio(model, s, theta):
    """phi_s(theta) = f_{u,s}(theta) / f_{q,s}(theta)."""
    ratio = float(likelihood_ratios(model, s, theta))
    if math.isnan(ratio):
        raise UndefinedRatioError(f"both densities vanish at theta={theta} for group {s}")
    return ratio


@dataclass(frozen=True)
class MLRPReport:
    holds: bool
    violations: list


def check_mlrp(model, s, grid=None, tol=1e-9):
    """Check that f_q/f_u strictly increases across consecutive grid points.

    Works on the log ratio so that tails do not underflow; points outside the
    joint support are skipped.  A step is a violation unless the log ratio
    rises by more than ``tol``, so a flat ratio fails as well.
    """
    theta = model.grid() if grid is None else np.asarray(grid, dtype=float)
    lq = np.asarray(model.dist("q", s).logpdf(theta), dtype=float)
    lu = np.asarray(model.dist("u", s).logpdf(theta), dtype=float)
    keep = np.isfinite(lq) & np.isfinite(lu)
    theta, log_ratio = theta[keep], lq[keep] - lu[keep]
    if theta.size < 2:
        raise ConfigurationError("MLRP check needs >= 2 grid points inside the joint support")
    step = np.diff(log_ratio)
    bad = np.flatnonzero(step <= tol)
    violations = [(float(theta[i]), float(theta[i + 1])) for i in bad]
    return MLRPReport(holds=not violations, violations=violations)


@dataclass(frozen=True)
class OperatingPoint:
    fp: float
    tp: float

    def __post_init__(self):
        if not (0.0 <= self.fp <= 1.0 and 0.0 <= self.tp <= 1.0):
            raise ValueError(f"operating point out of the unit square: ({self.fp}, {self.tp})")


class RocCurve:
    """Ordered (fp, tp) points from (0, 0) to (1, 1), monotone in both coordinates.

    ``thresholds[i]`` is the score cut producing point i (``+inf`` rejects
    everyone, ``-inf`` accepts everyone, ``nan`` marks points without a
    single-threshold source such as frontier samples).
    """

    def __init__(self, fp, tp, thresholds=None, atol=1e-12):
        fp = np.clip(np.asarray(fp, dtype=float), 0.0, 1.0)
        tp = np.clip(np.asarray(tp, dtype=float), 0.0, 1.0)
        if fp.shape != tp.shape or fp.ndim != 1 or fp.size < 2:
            raise ValueError("fp and tp must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(fp) < -atol) or np.any(np.diff(tp) < -atol):
            raise ValueError("ROC points must be nondecreasing in fp and tp")
        if abs(fp[0]) > atol or abs(tp[0]) > atol or abs(fp[-1] - 1) > atol or abs(tp[-1] - 1) > atol:
            raise ValueError("ROC curve must start at (0, 0) and end at (1, 1)")
        self.fp = np.maximum.accumulate(fp)
        self.tp = np.maximum.accumulate(tp)
        if thresholds is None:
            thresholds = np.full(fp.size, np.nan)
        self.thresholds = np.asarray(thresholds, dtype=float)
        for arr in (self.fp, self.tp, self.thresholds):
            arr.flags.writeable = False

    def __len__(self):
        return self.fp.size

    def points(self):
        return [OperatingPoint(float(a), float(b)) for a, b in zip(self.fp, self.tp)]

    def tp_at(self, fp):
        """Upper TP value at ``fp`` by linear interpolation (max tp on vertical runs)."""
        ufp, first = np.unique(self.fp[::-1], return_index=True)
        # reversed order so np.unique keeps the last (largest-tp) point per fp
        utp = self.tp[::-1][first]
        return np.interp(fp, ufp, utp)

    def __repr__(self):
        return f"RocCurve(n={len(self)})"


def roc(model, s, thresholds=None):
    """ROC of group ``s`` at ``thresholds`` (descending), anchored at (0,0) and (1,1)."""
    t = model.grid()[::-1] if thresholds is None else np.asarray(thresholds, dtype=float)
    if t.size > 1 and np.any(np.diff(t) > 0):
        raise ValueError("thresholds must be sorted in descending order")
    fp = 1.0 - model.dist("u", s).cdf(t)
    tp = 1.0 - model.dist("q", s).cdf(t)
    fp = np.concatenate([[0.0], fp, [1.0]])
    tp = np.concatenate([[0.0], tp, [1.0]])
    thr = np.concatenate([[np.inf], t, [-np.inf]])
    return RocCurve(np.maximum.accumulate(fp), np.maximum.accumulate(tp), thr)


def _upper_hull_indices(x, y):
    """Indices of the upper convex hull of points sorted by (x, y)."""
    hull = []
    for i in range(x.size):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def concavify(curve):
    """Upper concave envelope of an ROC curve (its upper-left convex-hull boundary)."""
    fp = np.concatenate([[0.0], curve.fp, [1.0]])
    tp = np.concatenate([[0.0], curve.tp, [1.0]])
    thr = np.concatenate([[np.inf], curve.thresholds, [-np.inf]])
    order = np.lexsort((tp, fp))
    fp, tp, thr = fp[order], tp[order], thr[order]
    idx = _upper_hull_indices(fp, tp)
    return RocCurve(fp[idx], tp[idx], thr[idx])


def _knot_vector(knots, lo, hi):
    return np.concatenate([[lo] * 4, knots, [hi] * 4])


def _spline_basis(x, knots, lo, hi):
    return BSpline.design_matrix(np.clip(x, lo, hi), _knot_vector(knots, lo, hi), 3).toarray()


def _line_penalty(knots, lo, hi):
    """Second divided differences of the coefficients over their Greville abscissae.

    Coefficients a + b * g_j reproduce the line a + b * theta exactly, so this
    penalty vanishes on lines even with unevenly spaced knots.  Rows are scaled
    by the squared mean abscissa spacing to keep penalty weights unit-free.
    """
    t = _knot_vector(knots, lo, hi)
    m = t.size - 4
    g = np.array([t[j + 1:j + 4].mean() for j in range(m)])
    d1 = np.diff(np.eye(m), axis=0) / np.diff(g)[:, None]
    d2 = np.diff(d1, axis=0) / (0.5 * (g[2:] - g[:-2]))[:, None]
    return d2 * np.mean(np.diff(g)) ** 2


DEFAULT_PENALTIES = tuple(10.0 ** np.arange(-2, 7))


def _logistic_newton(b, y, pen, tol, max_iter):
    beta = np.zeros(b.shape[1])
    for _ in range(max_iter):
        p = expit(b @ beta)
        grad = b.T @ (y - p) - pen @ beta
        hess = b.T @ (b * (p * (1.0 - p))[:, None]) + pen
        step = np.linalg.solve(hess, grad)
        beta += step
        if np.max(np.abs(step)) < tol:
            break
    else:
        log.warning("class posterior fit stopped after %d Newton steps", max_iter)
    p = expit(b @ beta)
    info = b.T @ (b * (p * (1.0 - p))[:, None])
    edf = float(np.trace(np.linalg.solve(info + pen, info)))
    with np.errstate(divide="ignore"):
        dev = -2.0 * float(np.sum(np.where(y > 0, np.log(p), np.log1p(-p))))
    return beta, dev + 2.0 * edf


def class_posterior(theta, y, grid, n_knots=8, penalties=DEFAULT_PENALTIES, tol=1e-10, max_iter=100):
    """P(y = 1 | theta) on ``grid`` from a penalised cubic B-spline logistic fit.

    Interior knots sit at quantiles of ``theta``; a second-divided-difference
    penalty on the coefficients shrinks the log-odds toward a line.  The penalty
    weight is picked from ``penalties`` by AIC with effective degrees of
    freedom.
    """
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = float(min(grid[0], theta.min())), float(max(grid[-1], theta.max()))
    knots = np.unique(np.quantile(theta, np.linspace(0.0, 1.0, n_knots + 2)[1:-1]))
    knots = knots[(knots > lo) & (knots < hi)]
    b = _spline_basis(theta, knots, lo, hi)
    m = b.shape[1]
    d = _line_penalty(knots, lo, hi)
    fits = [_logistic_newton(b, y, lam * d.T @ d + 1e-8 * np.eye(m), tol, max_iter) for lam in penalties]
    beta = min(fits, key=lambda f: f[1])[0]
    return expit(_spline_basis(np.asarray(grid, dtype=float), knots, lo, hi) @ beta)


FIT_METHODS = ("pooled", "kde")


def fit_empirical(s, e, theta, bandwidth=None, grid=None, method="pooled", n_knots=8, keep_variance=True):
    """Kernel-smoothed SignalModel from scored samples.

    ``method="kde"`` smooths every (e, s) cell on its own.  ``method="pooled"``
    (default) smooths each group's pooled scores and splits the result by a
    spline-logistic estimate of P(e = q | theta, s), so that f_u / f_q is a
    smooth odds curve even where one cell has few samples.

    ``bandwidth`` is a positive float, a mapping from cell to float (pooled
    fits use the mean of a group's two cells), or None for Silverman's rule.
    ``grid`` is a :class:`GridSpec`; by default 2001 points spanning the
    samples plus three bandwidths on each side.  ``keep_variance`` shrinks
    samples before smoothing so the kernel does not fatten the tails.
    """
    if method not in FIT_METHODS:
        raise ConfigurationError(f"unknown fit method {method!r}; expected one of {FIT_METHODS}")
    s = np.asarray(s)
    e = np.asarray(e)
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise EstimationError("scores must be finite")
    cells = {}
    for cell in CELLS:
        ce, cs = cell
        x = theta[(e == ce) & (s == cs)]
        if x.size < 2:
            raise EstimationError(f"cell (e={ce!r}, s={cs}) has {x.size} samples; need >= 2")
        cells[cell] = x
    if method == "pooled":
        pooled = {g: theta[s == g] for g in GROUPS}
        if bandwidth is None:
            bw = {g: silverman_bandwidth(x) for g, x in pooled.items()}
        elif isinstance(bandwidth, Mapping):
            bw = {g: 0.5 * (float(bandwidth[("q", g)]) + float(bandwidth[("u", g)])) for g in GROUPS}
        else:
            bw = {g: float(bandwidth) for g in GROUPS}
    elif bandwidth is None:
        bw = {c: silverman_bandwidth(x) for c, x in cells.items()}
    elif isinstance(bandwidth, Mapping):
        bw = {c: float(bandwidth[c]) for c in CELLS}
    else:
        bw = {c: float(bandwidth) for c in CELLS}
    if grid is None:
        pad = 3.0 * max(bw.values())
        grid = GridSpec(float(theta.min()) - pad, float(theta.max()) + pad, DEFAULT_N_GRID)
    points = grid.points()
    if method == "kde":
        dists = {}
        for c, x in cells.items():
            pdf = kde_on_grid(shrink_for_kernel(x, bw[c]) if keep_variance else x, bw[c], points)
            dists[c] = Empirical(x, bw[c], points, pdf=pdf)
        return SignalModel(dists, grid, name="empirical")
    dists = {}
    for g in GROUPS:
        x = shrink_for_kernel(pooled[g], bw[g]) if keep_variance else pooled[g]
        base = kde_on_grid(x, bw[g], points)
        post = class_posterior(pooled[g], e[s == g] == "q", points, n_knots=n_knots)
        dists[("q", g)] = Empirical(cells[("q", g)], bw[g], points, pdf=base * post)
        dists[("u", g)] = Empirical(cells[("u", g)], bw[g], points, pdf=base * (1.0 - post))
    return SignalModel(dists, grid, name="empirical")


# ---------------------------------------------------------------------------
# CSV interfaces
# ---------------------------------------------------------------------------

TABULATED_COLUMNS = ("theta", "pdf_q0", "pdf_u0", "pdf_q1", "pdf_u1")


def write_tabulated_csv(model, path, grid=None):
    """Write pdfs of all four cells on the model grid (theta, pdf_q0, pdf_u0, pdf_q1, pdf_u1)."""
    theta = model.grid() if grid is None else np.asarray(grid, dtype=float)
    cols = [theta] + [model.dist(c[4], int(c[5])).pdf(theta) for c in TABULATED_COLUMNS[1:]]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TABULATED_COLUMNS)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


def read_tabulated_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TABULATED_COLUMNS:
            raise ConfigurationError(f"{path}: expected columns {TABULATED_COLUMNS}")
        rows = [{k: float(v) for k, v in r.items()} for r in reader]
    grid = [r["theta"] for r in rows]
    pdfs = {(c[4], int(c[5])): [r[c] for r in rows] for c in TABULATED_COLUMNS[1:]}
    return tabulated_model(grid, pdfs, name=str(path))


def write_roc_csv(curve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("threshold", "fp", "tp"))
        for t, a, b in zip(curve.thresholds, curve.fp, curve.tp):
            w.writerow([repr(float(t)), repr(float(a)), repr(float(b))])


def read_roc_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return RocCurve(
        [float(r["fp"]) for r in rows],
        [float(r["tp"]) for r in rows],
        [float(r["threshold"]) for r in rows],
    )


def cells_of(samples: Iterable[tuple]):
    """Split ``(s, e, theta)`` triples into parallel arrays."""
    rows = list(samples)
    if not rows:
        raise EstimationError("no samples")
    s, e, theta = zip(*rows)
    return np.asarray(s), np.asarray(e), np.asarray(theta, dtype=float)
