"""Sample data: CSV ingestion, a closed-form ridge scorer and synthetic scenarios."""

from __future__ import annotations

import csv
import json
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import ConfigurationError, DataFormatError, NumericError
from .game_core import GameParams
from .signal_model import CELLS, EFFORTS, GROUPS, fit_empirical, gaussian_model

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleRecord:
    s: int
    e: str
    theta: float | None = None
    x: tuple | None = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """Column-oriented samples; exactly one of ``theta`` and ``x`` is set."""

    s: np.ndarray
    e: np.ndarray
    theta: np.ndarray | None = None
    x: np.ndarray | None = None

    def __post_init__(self):
        if (self.theta is None) == (self.x is None):
            raise ConfigurationError("a dataset is either scored (theta) or featured (x)")
        n = len(self.s)
        body = self.theta if self.theta is not None else self.x
        if len(self.e) != n or len(body) != n:
            raise ConfigurationError("dataset columns differ in length")

    @property
    def kind(self):
        return "scored" if self.theta is not None else "featured"

    @property
    def dim(self):
        return None if self.x is None else self.x.shape[1]

    def __len__(self):
        return len(self.s)

    def counts(self):
        return {(e, s): int(np.sum((self.e == e) & (self.s == s))) for e, s in CELLS}

    def lambda1(self):
        """Share of group-1 records."""
        return float(np.mean(self.s == 1))

    def records(self):
        for i in range(len(self)):
            if self.theta is not None:
                yield SampleRecord(int(self.s[i]), str(self.e[i]), theta=float(self.theta[i]))
            else:
                yield SampleRecord(int(self.s[i]), str(self.e[i]), x=tuple(map(float, self.x[i])))

    def subset(self, idx):
        return Dataset(
            self.s[idx],
            self.e[idx],
            None if self.theta is None else self.theta[idx],
            None if self.x is None else self.x[idx],
        )

    def fit(self, bandwidth=None, grid=None):
        if self.theta is None:
            raise ConfigurationError("featured data must be scored before fitting densities")
        return fit_empirical(self.s, self.e, self.theta, bandwidth, grid)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if self.theta is not None:
                w.writerow(("s", "e", "theta"))
                for s, e, t in zip(self.s, self.e, self.theta):
                    w.writerow([int(s), e, repr(float(t))])
            else:
                w.writerow(("s", "e") + tuple(f"x{j + 1}" for j in range(self.dim)))
                for s, e, row in zip(self.s, self.e, self.x):
                    w.writerow([int(s), e] + [repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# CSV loading
# ---------------------------------------------------------------------------


def _schema_of(header):
    if header == ["s", "e", "theta"]:
        return "scored", 0
    if len(header) >= 3 and header[:2] == ["s", "e"]:
        feats = header[2:]
        if feats == [f"x{j + 1}" for j in range(len(feats))]:
            return "featured", len(feats)
    return None, 0


def load_csv(path, schema=None):
    """Read a scored (s,e,theta) or featured (s,e,x1..xd) sample file.

    ``schema`` may force "scored" or "featured"; by default it is taken from
    the header.  Malformed rows raise :class:`DataFormatError` with the line
    number; an empty (e, s) cell only warns.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataFormatError("empty file", 1)
    header = [h.strip() for h in rows[0]]
    kind, d = _schema_of(header)
    if kind is None or (schema is not None and schema != kind):
        raise DataFormatError(f"unexpected header {header}", 1)
    s_col, e_col, vals = [], [], []
    width = 2 + (1 if kind == "scored" else d)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise DataFormatError(f"expected {width} columns, found {len(row)}", lineno)
        try:
            s = int(row[0])
        except ValueError:
            raise DataFormatError(f"group {row[0]!r} is not an integer", lineno) from None
        e = row[1].strip()
        if s not in GROUPS or e not in EFFORTS:
            raise DataFormatError(f"unknown cell (s={row[0]!r}, e={row[1]!r})", lineno)
        try:
            v = [float(c) for c in row[2:]]
        except ValueError:
            raise DataFormatError(f"non-numeric value in {row[2:]}", lineno) from None
        if not np.all(np.isfinite(v)):
            raise DataFormatError("non-finite value", lineno)
        s_col.append(s)
        e_col.append(e)
        vals.append(v)
    arr = np.asarray(vals, dtype=float).reshape(len(vals), width - 2)
    ds = Dataset(
        np.asarray(s_col, dtype=int),
        np.asarray(e_col, dtype="<U1"),
        theta=arr[:, 0] if kind == "scored" else None,
        x=arr if kind == "featured" else None,
    )
    counts = ds.counts()
    for cell, n in counts.items():
        if n == 0:
            warnings.warn(f"{path}: no records for cell (e={cell[0]}, s={cell[1]})", stacklevel=2)
    log.info("loaded %d records from %s: %s", len(ds), path, counts)
    return ds


# ---------------------------------------------------------------------------
# Ridge scorer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScorerSpec:
    penalties: tuple = (0.1, 1.0, 10.0)
    train_fraction: float = 2.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        if not self.penalties or any(not a > 0 for a in self.penalties):
            raise ConfigurationError("ridge penalties must be a nonempty list of positive values")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigurationError("train_fraction must lie in (0, 1)")


def _design(x):
    return np.column_stack([np.ones(len(x)), x])


def ridge_fit(x, y, alpha):
    """Ridge coefficients with an unpenalised intercept.

    Solves (Z'Z + P) beta = Z'y with Z = [1, X] and P = diag(0, alpha, ..., alpha).
    Returns ``(w, intercept)``.
    """
    z = _design(np.asarray(x, dtype=float))
    pen = np.full(z.shape[1], float(alpha))
    pen[0] = 0.0
    a = z.T @ z + np.diag(pen)
    try:
        beta = linalg.solve(a, z.T @ np.asarray(y, dtype=float), assume_a="sym")
    except (linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f"ridge system singular at alpha={alpha}: {exc}") from exc
    if not np.all(np.isfinite(beta)):
        raise NumericError(f"ridge solution not finite at alpha={alpha}")
    return beta[1:], float(beta[0])


def loo_mse(x, y, alpha):
    """Exact leave-one-out squared error of ridge via the hat-matrix diagonal."""
    z = _design(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    pen = np.full(z.shape[1], float(alpha))
    pen[0] = 0.0
    a = z.T @ z + np.diag(pen)
    try:
        cho = linalg.cho_factor(a)
    except linalg.LinAlgError as exc:
        raise NumericError(f"ridge system singular at alpha={alpha}: {exc}") from exc
    beta = linalg.cho_solve(cho, z.T @ y)
    h = np.einsum("ij,ji->i", z, linalg.cho_solve(cho, z.T))
    resid = (y - z @ beta) / (1.0 - h)
    return float(np.mean(resid**2))


@dataclass(frozen=True, eq=False)
class ScoreResult:
    scored: Dataset  # held-out records with theta = x . w + intercept
    alpha: float
    w: np.ndarray
    intercept: float
    cv_error: dict = field(default_factory=dict)
    train_index: np.ndarray | None = None
    test_index: np.ndarray | None = None


def split_indices(n, spec):
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    n_train = int(round(spec.train_fraction * n))
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def ridge_score(dataset, spec=None):
    """Fit ridge on the seeded training split (y = 1 for e = q) and score the rest."""
    spec = spec or ScorerSpec()
    if dataset.kind != "featured":
        raise ConfigurationError("ridge_score needs a featured dataset")
    train, test = split_indices(len(dataset), spec)
    if train.size < dataset.dim + 2:
        raise ConfigurationError(f"need at least {dataset.dim + 2} training rows, have {train.size}")
    x, y = dataset.x[train], (dataset.e[train] == "q").astype(float)
    cv = {float(a): loo_mse(x, y, a) for a in spec.penalties}
    alpha = min(cv, key=lambda a: (cv[a], a))
    w, b = ridge_fit(x, y, alpha)
    held = dataset.subset(test)
    theta = held.x @ w + b
    scored = Dataset(held.s, held.e, theta=theta)
    return ScoreResult(scored, alpha, w, b, cv, train, test)


# ---------------------------------------------------------------------------
# Synthetic scenarios
# ---------------------------------------------------------------------------

# per group: (mean_q, sd_q, mean_u, sd_u)
_PRESETS = {
    "gaussian_g1": {"groups": [[1.0, 1.0, 0.0, 1.0], [1.0, 1.0, 0.0, 1.0]], "lambda1": 0.5},
    "example1": {"groups": [[1.0, 1.0, 0.0, 1.0], [11.0, 1.0, 10.0, 1.0]], "lambda1": 0.01},
    "example2": {"groups": [[0.5, 1.0, -0.5, 1.0], [0.5, 10.0, -0.5, 10.0]], "lambda1": 0.5},
    "patronizing": {"groups": [[1.0, 1.0, 0.0, 1.0], [1.0, 1.0, 0.0, 1.0]], "lambda1": 0.05},
    "dp_welfare_gain": {
        "groups": [[1.0, 1.0, 0.0, 1.0], [0.3, 1.0, 0.0, 1.0]],
        "lambda1": 0.02,
        "cost_hi": 0.3,
    },
}
SCENARIO_KINDS = tuple(_PRESETS) + ("custom",)
_ECON_KEYS = ("v_q", "v_u", "omega", "lambda1", "cost_lo", "cost_hi")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str = "gaussian_g1"
    params: dict = field(default_factory=dict)
    n: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigurationError(f"unknown scenario kind {self.kind!r}; expected one of {SCENARIO_KINDS}")
        if self.kind == "custom" and "groups" not in self.params:
            raise ConfigurationError("custom scenarios need params.groups")
        unknown = set(self.params) - set(_ECON_KEYS) - {"groups", "n_grid"}
        if unknown:
            raise ConfigurationError(f"unknown scenario parameters {sorted(unknown)}")
        for g in self.groups:
            if len(g) != 4 or g[1] <= 0 or g[3] <= 0:
                raise ConfigurationError(f"group spec {g} needs (mean_q, sd_q>0, mean_u, sd_u>0)")
        if self.n < 2:
            raise ConfigurationError("n must be at least 2")

    @classmethod
    def from_dict(cls, d):
        return cls(d.get("kind", "gaussian_g1"), dict(d.get("params", {})), int(d.get("n", 10_000)),
                   int(d.get("seed", 0)))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def _merged(self):
        base = dict(_PRESETS.get(self.kind, {}))
        base.update(self.params)
        return base

    @property
    def groups(self):
        return [tuple(map(float, g)) for g in self._merged()["groups"]]

    def game_params(self):
        merged = self._merged()
        return GameParams(**{k: float(merged[k]) for k in _ECON_KEYS if k in merged})

    def model(self):
        """Ground-truth parametric signal model (for example2: the 1-D projections)."""
        return gaussian_model(self.groups, int(self._merged().get("n_grid", 2001)), name=self.kind)


@dataclass(frozen=True, eq=False)
class Generated:
    dataset: Dataset
    model: object
    params: GameParams
    spec: ScenarioSpec


def generate(spec, n=None, seed=None):
    """Draw ``n`` records per group, split evenly between efforts (q first).

    example2 emits 2-D features: group 0 lives on the first basis vector and
    group 1 on the second, to be scored with :func:`ridge_score`.
    """
    n = spec.n if n is None else int(n)
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    s_col, e_col, z_col = [], [], []
    for s, (mq, sq, mu, su) in enumerate(spec.groups):
        nq = n - n // 2
        for e, mean, sd, k in (("q", mq, sq, nq), ("u", mu, su, n // 2)):
            z_col.append(rng.normal(mean, sd, size=k))
            s_col.append(np.full(k, s))
            e_col.append(np.full(k, e, dtype="<U1"))
    s_arr = np.concatenate(s_col)
    e_arr = np.concatenate(e_col)
    z = np.concatenate(z_col)
    if spec.kind == "example2":
        x = np.zeros((z.size, 2))
        x[s_arr == 0, 0] = z[s_arr == 0]
        x[s_arr == 1, 1] = z[s_arr == 1]
        ds = Dataset(s_arr, e_arr, x=x)
    else:
        ds = Dataset(s_arr, e_arr, theta=z)
    return Generated(ds, spec.model(), spec.game_params(), spec)
