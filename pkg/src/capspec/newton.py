"""Newton iteration with physical-step safeguards, plus adaptive refinement.

The basic loop solves L(v) dv = N(v) by dense LU with partial pivoting and
updates v <- v - dv until the relative step norm drops below the Newton
tolerance.  Steps that make an arc-length scale non-positive (or absurdly
large) or flip the sign of a sign-definite radius block are halved up to ten
times before the run is declared divergent; these safeguards stand in for the
admissibility barriers of the underlying method.

After a converged Newton run, each sub-domain is classified as resolved,
under-resolved, or oscillatory from its residual rows and the tail of the
Chebyshev coefficients of its angle samples; unresolved sub-domains get their
grids grown geometrically (more aggressively for oscillation) and the state
is resampled onto the new grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .cheb import cheb_coeffs, resample
from .state import SubdomainState
from .system import CollocationSystem, ode_residual_rows

__all__ = [
    "NewtonSettings",
    "NewtonStatus",
    "NewtonResult",
    "Verdict",
    "ResolutionExhausted",
    "newton_solve",
    "check_resolution",
    "refine",
]


@dataclass(frozen=True)
class NewtonSettings:
    tol_newton: float = 1e-13
    tol_bvp: float = 1e-12
    max_iter: int = 300
    refine_factor: float = 1.4
    aggressive_factor: float = 2.0
    n_max: int = 2048
    tail_resolved: float = 1e-8
    tail_oscillatory: float = 1e-2
    # a sub-domain only counts as resolved once its residual re-collocated on a
    # doubled grid is below overres_factor * tol_bvp; the collocated residual
    # alone superconverges and says little about accuracy between grid points
    overres_factor: float = 100.0
    max_halvings: int = 10
    # iterations without halving the best step norm before giving up on this grid
    stall_window: int = 10

    def __post_init__(self):
        if self.tol_newton <= 0 or self.tol_bvp <= 0:
            raise ValueError("tolerances must be positive")
        if self.refine_factor <= 1 or self.aggressive_factor <= 1:
            raise ValueError("growth factors must exceed 1")

    @classmethod
    def from_spec(cls, spec) -> "NewtonSettings":
        return cls(
            tol_newton=spec.tol_newton,
            tol_bvp=spec.tol_bvp,
            max_iter=spec.max_newton_iter,
            n_max=spec.n_max,
        )


class NewtonStatus(Enum):
    CONVERGED = "converged"
    NO_PROGRESS = "no-progress"  # hit max_iter or stalled; refinement requested
    SINGULAR = "singular"  # linear solve failed; refinement requested
    DIVERGED = "diverged"


@dataclass
class NewtonResult:
    v: np.ndarray
    status: NewtonStatus
    iterations: int
    res_newton: float
    res_bvp: float
    history: list[float] = field(default_factory=list)


class ResolutionExhausted(RuntimeError):
    """A sub-domain would need more than n_max points."""


def _step_ok(system: CollocationSystem, v: np.ndarray) -> bool:
    if not np.all(np.isfinite(v)):
        return False
    lay = system.layout
    for i, cfg in enumerate(system.domains):
        ell = v[lay.ell_index(i)]
        if ell <= 0 or abs(ell) > system.ell_cap:
            return False
        if cfg.r_sign:
            r = v[lay.field_slice("r", i)]
            if np.min(cfg.r_sign * r) <= 0:
                return False
    return True


def newton_solve(
    system: CollocationSystem, v0: np.ndarray, settings: NewtonSettings
) -> NewtonResult:
    """Iterate v <- v - L(v)^-1 N(v) until the relative step is below tolerance."""
    v = np.array(v0, dtype=float)
    if not _step_ok(system, v):
        return NewtonResult(v, NewtonStatus.DIVERGED, 0, np.inf, np.inf)
    history: list[float] = []
    res_newton = np.inf
    best = np.inf
    since_best = 0
    iterations = 0
    for _ in range(settings.max_iter):
        try:
            res = system.residual(v)
            jac = system.jacobian(v)
        except FloatingPointError:
            return NewtonResult(
                v, NewtonStatus.DIVERGED, iterations, res_newton, np.inf, history
            )
        try:
            dv = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError:
            return NewtonResult(
                v, NewtonStatus.SINGULAR, iterations, res_newton, _res_bvp(system, v), history
            )
        if not np.all(np.isfinite(dv)):
            return NewtonResult(
                v, NewtonStatus.DIVERGED, iterations, res_newton, np.inf, history
            )
        iterations += 1
        step = dv
        for _ in range(settings.max_halvings):
            if _step_ok(system, v - step):
                break
            step = 0.5 * step
        else:
            return NewtonResult(
                v, NewtonStatus.DIVERGED, iterations, res_newton, _res_bvp(system, v), history
            )
        v = v - step
        res_newton = float(np.linalg.norm(step) / np.linalg.norm(v))
        history.append(res_newton)
        if res_newton <= settings.tol_newton:
            return NewtonResult(
                v, NewtonStatus.CONVERGED, iterations, res_newton, _res_bvp(system, v), history
            )
        if res_newton > 1e8:
            return NewtonResult(v, NewtonStatus.DIVERGED, iterations, res_newton, np.inf, history)
        if res_newton < 0.5 * best:
            best = res_newton
            since_best = 0
        else:
            since_best += 1
            if since_best >= settings.stall_window:
                break
    return NewtonResult(
        v, NewtonStatus.NO_PROGRESS, iterations, res_newton, _res_bvp(system, v), history
    )


def _res_bvp(system: CollocationSystem, v: np.ndarray) -> float:
    try:
        return float(np.linalg.norm(system.residual(v)) / np.linalg.norm(v))
    except FloatingPointError:
        return np.inf


class Verdict(Enum):
    RESOLVED = "resolved"
    UNDERRESOLVED = "underresolved"
    OSCILLATORY = "oscillatory"


def psi_tail_ratio(psi: np.ndarray) -> float:
    """Max of the last three Chebyshev coefficients over the max coefficient."""
    c = np.abs(cheb_coeffs(psi))
    top = c.max()
    if top == 0.0:
        return 0.0
    return float(c[-3:].max() / top)


def check_resolution(
    system: CollocationSystem, v: np.ndarray, settings: NewtonSettings
) -> list[Verdict]:
    """Classify each sub-domain from residual rows, angle-tail decay, and the
    residual re-collocated on a doubled grid."""
    res = system.residual(v)
    vnorm = np.linalg.norm(v)
    lay = system.layout
    verdicts = []
    for i, cfg in enumerate(system.domains):
        rows = np.concatenate([res[s] for s in system.domain_ode_rows(i)])
        rel = np.linalg.norm(rows) / vnorm
        tail = psi_tail_ratio(v[lay.field_slice("psi", i)])
        if tail > settings.tail_oscillatory:
            verdicts.append(Verdict.OSCILLATORY)
            continue
        if rel > settings.tol_bvp or tail > settings.tail_resolved:
            verdicts.append(Verdict.UNDERRESOLVED)
            continue
        # axis-crossing domains need an odd evaluation grid so the doubled
        # collocation grid also avoids tau = 0
        n_eval = 2 * lay.ns[i] + (1 if cfg.force_odd else 0)
        fine = ode_residual_rows(
            v[lay.field_slice("r", i)],
            v[lay.field_slice("u", i)],
            v[lay.field_slice("psi", i)],
            v[lay.ell_index(i)],
            system.kappa,
            cfg.multiplied,
            n_eval=n_eval,
        )
        fine_rel = np.linalg.norm(fine) / vnorm
        if fine_rel <= settings.overres_factor * settings.tol_bvp:
            verdicts.append(Verdict.RESOLVED)
        else:
            verdicts.append(Verdict.UNDERRESOLVED)
    return verdicts


def grow_n(n: int, factor: float, force_odd: bool) -> int:
    # guard against 1.4*15 = 21.000000000000004 rounding up to 22
    n_new = math.ceil(factor * n - 1e-9)
    if force_odd and n_new % 2 == 0:
        n_new += 1
    return n_new


def refine(
    states: list[SubdomainState],
    verdicts: list[Verdict],
    settings: NewtonSettings,
    force_odd: list[bool],
) -> list[SubdomainState]:
    """Grow unresolved sub-domain grids and resample the state onto them."""
    if all(vd == Verdict.RESOLVED for vd in verdicts):
        raise ValueError("refine called with every sub-domain resolved")
    out = []
    for st, vd, odd in zip(states, verdicts, force_odd):
        if vd == Verdict.RESOLVED:
            out.append(st)
            continue
        factor = (
            settings.aggressive_factor if vd == Verdict.OSCILLATORY else settings.refine_factor
        )
        n_new = grow_n(st.n, factor, odd)
        if n_new > settings.n_max:
            raise ResolutionExhausted(
                f"sub-domain would need {n_new} points (cap {settings.n_max})"
            )
        out.append(
            SubdomainState(
                r=resample(st.r, n_new),
                u=resample(st.u, n_new),
                psi=resample(st.psi, n_new),
                ell=st.ell,
            )
        )
    return out
