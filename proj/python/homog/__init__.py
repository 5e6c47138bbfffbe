"""Spectral periodic homogenization of 2m-order operators on the unit torus.

Thin wrappers over the compiled core; problems are built-in names, paths to
problem files, or dicts in the problem-file layout.
"""

import json as _json

from . import _homog
from ._homog import (
    AlignmentError,
    ConsistencyError,
    DegenerateFitError,
    PreconditionError,
    ShapeError,
    SolverError,
    __version__,
    builtin_problems,
    fit_slope,
)


def _spec(problem):
    return problem if isinstance(problem, str) else _json.dumps(problem)


def problem(spec):
    """Problem definition as a dict (round-trips through the core)."""
    return _json.loads(_homog.problem_json(_spec(spec)))


def check(problem):
    """Ellipticity report with the Garding shift estimate."""
    return _json.loads(_homog.check(_spec(problem)))


def homogenized(problem, cutoff=-1, tol=1e-10):
    """Homogenized matrix entries, symbol minimum and cell residuals."""
    return _json.loads(_homog.homogenized(_spec(problem), cutoff, tol))


def solve(problem, k, lam=None, f=None, cutoff=-1, tol=1e-10):
    """One eps = 1/k row: error norms plus field dumps of u_eps and u."""
    f = {"seed": 1} if f is None else f
    return _json.loads(_homog.solve(_spec(problem), k, -1.0 if lam is None else float(lam), _json.dumps(f), cutoff, tol))


def sweep(config, base_dir=""):
    """Full convergence report for a sweep config dict."""
    return _json.loads(_homog.sweep(_json.dumps(config), str(base_dir)))


def random_solenoidal(d, m, modes, seed):
    return _json.loads(_homog.random_solenoidal(d, m, modes, seed))


def skew_potential(g):
    return _json.loads(_homog.skew_potential(_json.dumps(g)))


def field_samples(field, R):
    """Real samples of a field dump on the R^d grid j / R."""
    return _homog.field_samples(_json.dumps(field), R)


__all__ = [
    "AlignmentError",
    "ConsistencyError",
    "DegenerateFitError",
    "PreconditionError",
    "ShapeError",
    "SolverError",
    "__version__",
    "builtin_problems",
    "check",
    "field_samples",
    "fit_slope",
    "homogenized",
    "problem",
    "random_solenoidal",
    "skew_potential",
    "solve",
    "sweep",
]
