"""Quasi-invariance and Noether first integrals for optimal control problems."""

from .expr import Expr, Symbol, diff, evaluate, normalize, parse, substitute
from .extremal import DriftReport, Trajectory, drift, ensemble_drift, integrate_extremal
from .family import Family, Generator, generator_of, scaling_family
from .homogeneity import Weights, detect_weights, scaling_integral
from .invariance import InvarianceReport, check_family, check_generator
from .model import Problem, adjoint_rhs, hamiltonian, solve_control, stationarity
from .noether import FirstIntegral, first_integral, gauge_adjust, verify_symbolic
from .search import Ansatz, search_generators, search_report

__version__ = "0.1.0"

__all__ = [
    "Ansatz",
    "DriftReport",
    "Expr",
    "Family",
    "FirstIntegral",
    "Generator",
    "InvarianceReport",
    "Problem",
    "Symbol",
    "Trajectory",
    "Weights",
    "adjoint_rhs",
    "check_family",
    "check_generator",
    "detect_weights",
    "diff",
    "drift",
    "ensemble_drift",
    "evaluate",
    "first_integral",
    "gauge_adjust",
    "generator_of",
    "hamiltonian",
    "integrate_extremal",
    "normalize",
    "parse",
    "scaling_family",
    "scaling_integral",
    "search_generators",
    "search_report",
    "solve_control",
    "stationarity",
    "substitute",
    "verify_symbolic",
]
