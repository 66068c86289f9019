"""Independent verification of solved curves by direct ODE integration.

The arc-length system

    dr/ds = cos(psi),  du/ds = sin(psi),  dpsi/ds = kappa*u - sin(psi)/r

is integrated with a high-order adaptive Runge-Kutta method at tolerances two
orders tighter than the solver's residual target.  This path shares nothing
with the collocation solver, so agreement at sub-domain endpoints is a real
cross-check, not a tautology.  Integration must stay away from r = 0; curves
that cross the axis are verified on the two halves separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .cheb import chebpts, eval_row
from .state import Solution, SubdomainState

__all__ = ["IvpState", "IvpResult", "integrate", "verify"]

_R_FLOOR = 1e-12


@dataclass(frozen=True)
class IvpState:
    r: float
    u: float
    psi: float
    s: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.u, self.psi])


@dataclass
class IvpResult:
    end: IvpState
    s: np.ndarray
    r: np.ndarray
    u: np.ndarray
    psi: np.ndarray


def _rhs(kappa: float):
    def f(_s, y):
        r, u, psi = y
        return [np.cos(psi), np.sin(psi), kappa * u - np.sin(psi) / r]

    return f


def integrate(
    state0: IvpState,
    s_end: float,
    kappa: float,
    rtol: float = 1e-12,
    atol: float = 1e-12,
    n_samples: int = 200,
) -> IvpResult:
    """Integrate the arc-length system over [s0, s0 + s_end].

    ``s_end`` may be negative for backward integration.  Raises if the radius
    approaches zero or the integrator fails.
    """
    if abs(state0.r) < _R_FLOOR:
        raise ValueError(f"starting radius {state0.r} too close to the axis")
    if s_end == 0.0:
        z = np.array([state0.s])
        return IvpResult(state0, z, *[np.array([x]) for x in (state0.r, state0.u, state0.psi)])

    def axis_hit(_s, y):
        return abs(y[0]) - _R_FLOOR

    axis_hit.terminal = True

    t0, t1 = state0.s, state0.s + s_end
    sol = solve_ivp(
        _rhs(kappa),
        (t0, t1),
        state0.as_array(),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        t_eval=np.linspace(t0, t1, n_samples),
        events=axis_hit,
    )
    if sol.status == 1:
        raise RuntimeError("integration aborted: radius reached the axis")
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    end = IvpState(r=sol.y[0, -1], u=sol.y[1, -1], psi=sol.y[2, -1], s=sol.t[-1])
    return IvpResult(end, sol.t, sol.y[0], sol.y[1], sol.y[2])


def _interp_state(dom: SubdomainState, tau: float, s0: float) -> IvpState:
    row = eval_row(dom.n, tau)
    return IvpState(
        r=float(row @ dom.r),
        u=float(row @ dom.u),
        psi=float(row @ dom.psi),
        s=s0 + dom.ell * (tau + 1.0),
    )


def _crosses_axis(dom: SubdomainState) -> bool:
    return bool(dom.r.min() < 0.0 < dom.r.max())


def verify(
    solution: Solution,
    margin: float = 0.1,
    leg_max: float = 2.0,
    **integrate_kwargs,
) -> float:
    """Maximum mismatch between re-integration and the stored curve.

    Each sub-domain is re-integrated from stored states and compared against
    the stored curve further along, covering every sub-domain up to its right
    endpoint.  Because the initial value problem amplifies seed perturbations
    exponentially in arc-length, each integration leg is kept below ``leg_max``
    in arc-length; sub-domains whose curve crosses the axis skip the parameter
    band (-margin, margin) around it.  The prescribed boundary values are
    included in the returned maximum.
    """
    worst = 0.0
    s0 = 0.0
    for dom in solution.domains:
        pieces = [(-1.0, 1.0)]
        if _crosses_axis(dom):
            pieces = [(-1.0, -margin), (margin, 1.0)]
        for lo, hi in pieces:
            n_legs = max(1, math.ceil(dom.ell * (hi - lo) / leg_max))
            cuts = np.linspace(lo, hi, n_legs + 1)
            for ta, tb in zip(cuts[:-1], cuts[1:]):
                start = _interp_state(dom, ta, s0)
                target = _interp_state(dom, tb, s0)
                got = integrate(
                    start, dom.ell * (tb - ta), solution.spec.kappa, **integrate_kwargs
                ).end
                worst = max(
                    worst,
                    abs(got.r - target.r),
                    abs(got.u - target.u),
                    abs(got.psi - target.psi),
                )
        s0 += 2 * dom.ell
    spec = solution.spec
    first, last = solution.domains[0], solution.domains[-1]
    r_left = -spec.b if spec.kind == "p1" else spec.a
    psi_left = -spec.psi_b if spec.kind == "p1" else spec.psi_a
    worst = max(
        worst,
        abs(first.r[0] - r_left),
        abs(first.psi[0] - psi_left),
        abs(last.r[-1] - spec.b),
        abs(last.psi[-1] - spec.psi_b),
    )
    return worst


def grid_states(dom: SubdomainState, s0: float = 0.0) -> list[IvpState]:
    """Stored grid samples of one sub-domain as integrator states."""
    taus = chebpts(dom.n)
    return [
        IvpState(r=dom.r[j], u=dom.u[j], psi=dom.psi[j], s=s0 + dom.ell * (taus[j] + 1.0))
        for j in range(dom.n)
    ]
