import logging

import numpy as np
import pytest

from fairgame.data_pipeline import ScenarioSpec
from fairgame.equilibrium import SolverConfig
from fairgame.game_core import GameParams
from fairgame.signal_model import gaussian_model, tabulated_model


def random_scenarios(count=20, seed=20240607):
    """Two-group Gaussian scenarios with equal within-group sd and a positive mean gap."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        groups = []
        for _ in range(2):
            mu = rng.uniform(-1.0, 1.0)
            gap = rng.uniform(0.5, 2.0)
            sd = rng.uniform(0.5, 1.5)
            groups.append((mu + gap, sd, mu, sd))
        params = GameParams(lambda1=float(rng.uniform(0.1, 0.9)), cost_hi=float(rng.uniform(0.1, 0.4)))
        out.append((f"random{i:02d}", gaussian_model(groups, name=f"random{i:02d}"), params))
    return out


def named_scenarios():
    out = []
    for kind in ("gaussian_g1", "example1", "example2"):
        spec = ScenarioSpec(kind)
        out.append((kind, spec.model(), spec.game_params()))
    return out


@pytest.fixture(autouse=True)
def _quiet_mlrp_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="fairgame")


@pytest.fixture(scope="session")
def g1():
    spec = ScenarioSpec("gaussian_g1")
    return spec.model(), spec.game_params()


@pytest.fixture(scope="session")
def g1_model(g1):
    return g1[0]


@pytest.fixture(scope="session")
def params():
    return GameParams()


@pytest.fixture(scope="session")
def cfg():
    return SolverConfig()


@pytest.fixture(scope="session")
def uninformative():
    return gaussian_model([(0.0, 1.0, 0.0, 1.0), (0.0, 1.0, 0.0, 1.0)], name="flat")


@pytest.fixture(scope="session")
def unit_uniform():
    grid = np.linspace(0.0, 1.0, 11)
    pdf = np.ones_like(grid)
    return tabulated_model(grid, {(e, s): pdf for e in "qu" for s in (0, 1)})


@pytest.fixture(scope="session")
def example1():
    spec = ScenarioSpec("example1")
    return spec.model(), spec.game_params()


@pytest.fixture(scope="session")
def example2():
    spec = ScenarioSpec("example2")
    return spec.model(), spec.game_params()


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# ---------------------------------------------------------------------------
# Acceptance summary: one PASS/FAIL line per criterion
# ---------------------------------------------------------------------------

_CRITERIA = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _CRITERIA.append((props["criterion"], props.get("title", ""), report.outcome, props.get("seconds")))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, outcome, secs in sorted(_CRITERIA):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        timing = f" ({secs:.1f} s)" if secs is not None else ""
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {title}{timing}")
