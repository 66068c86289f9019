"""Pseudo-spectral solver for bounded radially symmetric capillary surfaces.

Generating curves of disk-type and annular interfaces are computed from the
arc-length form of the capillary equations by Chebyshev rectangular
collocation, Newton iteration with adaptive grid refinement, continuation in
the prescribed inclination angles, and several multi-scale domain splits for
configurations a single global grid cannot resolve.
"""

from .continuation import (
    ContinuationPlan,
    ContinuationStep,
    SolveReport,
    initial_guess_base,
    initial_guess_zones,
    p1_symmetry_error,
    plan_continuation,
    run,
    two_rz_seed,
)
from .newton import NewtonSettings, NewtonStatus, Verdict, newton_solve
from .oracle import IvpState, integrate, verify
from .problem import Method, ProblemSpec, resolve_method
from .state import Layout, Solution, SubdomainState

__all__ = [
    "ContinuationPlan",
    "ContinuationStep",
    "SolveReport",
    "initial_guess_base",
    "initial_guess_zones",
    "p1_symmetry_error",
    "plan_continuation",
    "run",
    "two_rz_seed",
    "NewtonSettings",
    "NewtonStatus",
    "Verdict",
    "newton_solve",
    "IvpState",
    "integrate",
    "verify",
    "Method",
    "ProblemSpec",
    "resolve_method",
    "Layout",
    "Solution",
    "SubdomainState",
]

__version__ = "0.1.0"
