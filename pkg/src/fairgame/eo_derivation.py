"""Equalized-odds post-processing: feasible ROC regions, the shared frontier
and randomized predictors realizing a target operating point.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleTargetError
from .signal_model import (
    GridSpec,
    OperatingPoint,
    RocCurve,
    SignalModel,
    Tabulated,
    _upper_hull_indices,
)

DEFAULT_FRONTIER_POINTS = 1001


@dataclass(frozen=True)
class FeasibleRegion:
    """Convex hull of an ROC curve together with (0, 0) and (1, 1).

    ``vertices`` run counter-clockwise from (0, 0): the lower chain up to
    (1, 1), then the upper chain back.  ``thresholds`` holds the source cut of
    each vertex (+inf rejects all, -inf accepts all).
    """

    vertices: np.ndarray
    thresholds: np.ndarray
    upper: RocCurve
    s: int | None = None

    @property
    def degenerate(self):
        return self.vertices.shape[0] < 3

    def edges(self):
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def violated_edge(self, point, slack=1e-9):
        """First edge whose outer side contains ``point``, or None if inside."""
        p = np.asarray(point, dtype=float)
        v = self.vertices
        if self.degenerate:
            a, b = v[0], v[-1]
            d = b - a
            cross = d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])
            t = np.dot(p - a, d) / np.dot(d, d)
            if abs(cross) > slack or t < -slack or t > 1 + slack:
                return (a, b)
            return None
        w = np.roll(v, -1, axis=0)
        cross = (w[:, 0] - v[:, 0]) * (p[1] - v[:, 1]) - (w[:, 1] - v[:, 1]) * (p[0] - v[:, 0])
        bad = np.flatnonzero(cross < -slack)
        if bad.size == 0:
            return None
        return (v[bad[0]], w[bad[0]])

    def contains(self, point, slack=1e-9):
        return self.violated_edge(point, slack) is None

    def is_convex(self):
        v = self.vertices
        if len(v) < 3:
            return True
        for i in range(len(v)):
            a, b, c = v[i], v[(i + 1) % len(v)], v[(i + 2) % len(v)]
            if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) < -1e-12:
                return False
        return True


def _lower_hull_indices(x, y):
    hull = []
    for i in range(x.size):
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            if (x[a] - x[o]) * (y[i] - y[o]) - (y[a] - y[o]) * (x[i] - x[o]) <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def feasible_region(curve, s=None):
    """Region of (fp, tp) pairs reachable by randomizing over the curve's cuts."""
    fp = np.concatenate([[0.0], curve.fp, [1.0]])
    tp = np.concatenate([[0.0], curve.tp, [1.0]])
    thr = np.concatenate([[np.inf], curve.thresholds, [-np.inf]])
    order = np.lexsort((tp, fp))
    fp, tp, thr = fp[order], tp[order], thr[order]
    lower = _lower_hull_indices(fp, tp)
    upper = _upper_hull_indices(fp, tp)
    ring = lower + upper[::-1][1:-1]
    verts = np.column_stack([fp[ring], tp[ring]])
    # collinear upper and lower chains (the diagonal) collapse to a segment
    if len(ring) >= 3:
        x, y = verts[:, 0], verts[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        if abs(area) < 1e-15:
            ring = [lower[0], lower[-1]]
            verts = np.column_stack([fp[ring], tp[ring]])
    return FeasibleRegion(verts, thr[ring], RocCurve(fp[upper], tp[upper], thr[upper]), s)


def shared_frontier(region0, region1, n_points=DEFAULT_FRONTIER_POINTS):
    """Upper boundary of the intersection of two feasible regions.

    Sampled on a uniform fp grid of ``n_points`` values, augmented with every
    hull vertex of either region and every crossing of the two boundaries, so
    the samples trace the pointwise minimum exactly.
    """
    u0, u1 = region0.upper, region1.upper
    fp = np.unique(np.concatenate([np.linspace(0.0, 1.0, n_points), u0.fp, u1.fp]))
    gap = u0.tp_at(fp) - u1.tp_at(fp)
    cross = np.flatnonzero(gap[:-1] * gap[1:] < 0)
    if cross.size:
        w = gap[cross] / (gap[cross] - gap[cross + 1])
        fp = np.unique(np.concatenate([fp, fp[cross] + w * (fp[cross + 1] - fp[cross])]))
    tp = np.minimum(u0.tp_at(fp), u1.tp_at(fp))
    tp = np.maximum(tp, fp)  # both boundaries dominate the diagonal; guards round-off
    fp = np.concatenate([[0.0], fp])
    tp = np.concatenate([[0.0], tp])
    return RocCurve(fp, np.maximum.accumulate(tp))


def write_frontier_csv(frontier, path):
    """Columns (p, fp, tp), p being the pseudo-signal coordinate 1 - fp."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("p", "fp", "tp"))
        for a, b in zip(frontier.fp, frontier.tp):
            w.writerow([repr(float(1.0 - a)), repr(float(a)), repr(float(b))])


# ---------------------------------------------------------------------------
# Derived predictors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    kind: str  # "threshold" or "coin"
    value: float  # score cut, or acceptance probability of the coin
    weight: float
    fp: float
    tp: float


@dataclass(frozen=True)
class DerivedPredictor:
    target: OperatingPoint
    components: tuple

    def expected_point(self):
        fp = sum(c.weight * c.fp for c in self.components)
        tp = sum(c.weight * c.tp for c in self.components)
        return fp, tp

    def to_dict(self):
        return {
            "target": {"fp": self.target.fp, "tp": self.target.tp},
            "components": [
                {"kind": c.kind, "value": c.value, "weight": c.weight, "fp": c.fp, "tp": c.tp}
                for c in self.components
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _barycentric(p, a, b, c):
    m = np.array([[a[0] - c[0], b[0] - c[0]], [a[1] - c[1], b[1] - c[1]]])
    det = np.linalg.det(m)
    if abs(det) < 1e-300:
        return None
    la, lb = np.linalg.solve(m, p - c)
    return np.array([la, lb, 1.0 - la - lb])


def _on_segment(p, a, b):
    d = b - a
    t = min(max(float(np.dot(p - a, d) / np.dot(d, d)), 0.0), 1.0)
    return np.array([1.0 - t, t])


def _mixture_error(p, points, w):
    w = np.clip(w, 0.0, None)
    return float(np.hypot(*(p - (w / w.sum()) @ points)))


def realize(curve, target, slack=1e-9):
    """Mixture of at most two threshold rules and one coin flip hitting ``target``.

    The region is fan-triangulated from (0, 0) and the first triangle holding
    the target is used, which fixes the otherwise non-unique mixture.
    ``curve`` may be an ROC curve or its precomputed :class:`FeasibleRegion`.
    """
    if not isinstance(target, OperatingPoint):
        target = OperatingPoint(*map(float, target))
    region = curve if isinstance(curve, FeasibleRegion) else feasible_region(curve)
    p = np.array([target.fp, target.tp])
    bad = region.violated_edge(p, slack)
    if bad is not None:
        a, b = bad
        raise InfeasibleTargetError(
            f"target {tuple(p)} violates half-plane of edge ({a[0]:.6g}, {a[1]:.6g})"
            f" -> ({b[0]:.6g}, {b[1]:.6g})"
        )
    v, thr = region.vertices, region.thresholds
    if region.degenerate:
        idx, w = [0, len(v) - 1], _on_segment(p, v[0], v[-1])
    else:
        idx, w = None, None
        d = p - v[0]
        nd = np.hypot(*d)
        for i in range(1, len(v) - 1):
            if nd == 0.0:
                idx, w = [0], np.ones(1)
                break
            a, b = v[i] - v[0], v[i + 1] - v[0]
            # sector test by normalised cross products; barycentrics are ill-conditioned on slivers
            ca = (a[0] * d[1] - a[1] * d[0]) / (np.hypot(*a) * nd)
            cb = (d[0] * b[1] - d[1] * b[0]) / (np.hypot(*b) * nd)
            if ca < -slack or cb < -slack:
                continue
            # clipping a rounded barycentric weight can move the point on slivers; keep the best mixture
            cands = [([0, i], _on_segment(p, v[0], v[i])), ([0, i + 1], _on_segment(p, v[0], v[i + 1]))]
            lam = _barycentric(p, v[0], v[i], v[i + 1])
            if lam is not None:
                cands.append(([0, i, i + 1], lam))
            idx, w = min(cands, key=lambda c: _mixture_error(p, v[c[0]], c[1]))
            break
        if idx is None:  # numerically on the hull but missed by every triangle
            raise InfeasibleTargetError(f"target {tuple(p)} not located in any hull triangle")
    w = np.clip(w, 0.0, None)
    w = w / w.sum()
    return DerivedPredictor(target, _components(v[idx], thr[idx], w))


def _components(points, thresholds, weights):
    out = []
    coin_w = coin_fp = 0.0
    for (fp, tp), t, w in zip(points, thresholds, weights):
        if w <= 0.0:
            continue
        if np.isinf(t) or np.isnan(t):
            # +inf rejects everyone (0, 0); -inf accepts everyone (1, 1)
            coin_w += w
            coin_fp += w * fp
        else:
            out.append(Component("threshold", float(t), float(w), float(fp), float(tp)))
    if coin_w > 0.0:
        prob = coin_fp / coin_w
        out.append(Component("coin", float(prob), float(coin_w), float(prob), float(prob)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Pseudo-signal along the frontier
# ---------------------------------------------------------------------------


def derived_signal_model(frontier):
    """Tabulated model over p = 1 - fp, identical for both groups.

    F_u(p) = 1 - fp and F_q(p) = 1 - tp, so the incentive at p is exactly
    omega * (tp - fp).  Densities are central differences of the CDFs
    (one-sided at the ends), which makes f_u/f_q the inverse frontier slope.
    """
    fp, tp = np.asarray(frontier.fp), np.asarray(frontier.tp)
    # one point per p (distinct tiny fp can round to the same p), keeping the highest tp
    p, first = np.unique((1.0 - fp)[::-1], return_index=True)
    cdf_u = p.copy()
    cdf_q = 1.0 - tp[::-1][first]
    if cdf_q[-1] > 0.0:
        # tp > 0 at fp = 0: qualified mass sits on the top cut
        p = np.append(p, 1.0 + 1e-9)
        cdf_u = np.append(cdf_u, 1.0)
        cdf_q = np.append(cdf_q, 1.0)
    pdf_u = _central_slopes(p, cdf_u)
    pdf_q = _central_slopes(p, cdf_q)
    dists = {}
    for s in (0, 1):
        dists[("u", s)] = Tabulated(p, pdf_u, cdf=cdf_u)
        dists[("q", s)] = Tabulated(p, pdf_q, cdf=cdf_q)
    return SignalModel(dists, GridSpec(float(p[0]), float(p[-1]), p.size), name="eo-frontier")


def _central_slopes(x, y):
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (x[2:] - x[:-2])
    d[0] = (y[1] - y[0]) / (x[1] - x[0])
    d[-1] = (y[-1] - y[-2]) / (x[-1] - x[-2])
    return np.clip(d, 0.0, None)
