"""Equilibria, welfare and disparity of an applicant-firm investment game under fairness policies."""

from .equilibrium import Equilibrium, SolverConfig, solve, solve_cb, solve_dp, solve_eo, solve_eopp, solve_lf, verify
from .game_core import GameParams
from .signal_model import SignalModel, fit_empirical, gaussian_model
from .welfare import compare_policies, social_welfare

__all__ = [
    "Equilibrium",
    "GameParams",
    "SignalModel",
    "SolverConfig",
    "compare_policies",
    "fit_empirical",
    "gaussian_model",
    "social_welfare",
    "solve",
    "solve_cb",
    "solve_dp",
    "solve_eo",
    "solve_eopp",
    "solve_lf",
    "verify",
]
