"""Residual and Jacobian assembly for the collocated capillary system.

Each sub-domain contributes three collocated first-order equations on its
(n-1)-point grid, with unknowns sampled on the n-point grid:

    r' - ell*cos(psi)                    = 0
    u' - ell*sin(psi)                    = 0
    psi' + ell*sin(psi)/r - kappa*ell*u  = 0

Sub-domains whose radius may come close to zero use the radius-multiplied
angle equation instead, which trades the 1/r division for a row scaling:

    r*psi' + ell*sin(psi) - kappa*ell*r*u = 0

Boundary and matching rows (endpoint evaluations) square the system.  The
Jacobian is the analytic derivative of exactly these rows, assembled from the
same rectangular matrices, so a finite-difference check of the residual
validates it directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cheb import chebpts, diffmat_rect, eval_row, resample
from .problem import ProblemSpec
from .state import Layout


def _split_chord(f: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Deviation of f from its endpoint chord, plus the chord coefficients.

    Differentiating the deviation and adding the chord slope back is exact in
    exact arithmetic but avoids feeding the large linear trend of the radius
    samples through the big entries of the derivative matrix, keeping flat
    states residual-exact.
    """
    beta = 0.5 * (f[-1] - f[0])
    alpha = 0.5 * (f[-1] + f[0])
    return f - (alpha + beta * x), alpha, beta


def _colloc(D0: np.ndarray, f: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Values of the interpolant of f on the collocation grid."""
    g, alpha, beta = _split_chord(f, x)
    return D0 @ g + (alpha + beta * y)


def _colloc_deriv(D1: np.ndarray, f: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Derivative of the interpolant of f on the collocation grid."""
    g, _alpha, beta = _split_chord(f, x)
    return D1 @ g + beta


def ode_residual_rows(
    r: np.ndarray,
    u: np.ndarray,
    psi: np.ndarray,
    ell: float,
    kappa: float,
    multiplied: bool,
    n_eval: int | None = None,
) -> np.ndarray:
    """The three collocated equation blocks of one sub-domain, stacked.

    With ``n_eval`` set, the stored interpolants are first resampled onto an
    n_eval-point grid and the rows are collocated on its (n_eval - 1) points;
    evaluating on a finer grid than the solve used reveals the residual the
    collocated points cannot see.
    """
    if n_eval is not None and n_eval != r.size:
        r, u, psi = resample(r, n_eval), resample(u, n_eval), resample(psi, n_eval)
    n = r.size
    x, y = chebpts(n), chebpts(n - 1)
    D0, D1 = diffmat_rect(n, 0), diffmat_rect(n, 1)
    rc = _colloc(D0, r, x, y)
    uc = _colloc(D0, u, x, y)
    pc = _colloc(D0, psi, x, y)
    rows_r = _colloc_deriv(D1, r, x) - ell * np.cos(pc)
    rows_u = _colloc_deriv(D1, u, x) - ell * np.sin(pc)
    dpsi = _colloc_deriv(D1, psi, x)
    if multiplied:
        rows_p = rc * dpsi + ell * np.sin(pc) - kappa * ell * rc * uc
    else:
        rows_p = dpsi + ell * np.sin(pc) / rc - kappa * ell * uc
    return np.concatenate([rows_r, rows_u, rows_p])

__all__ = [
    "DomainConfig",
    "BcTerm",
    "BcRow",
    "CollocationSystem",
    "build_base_system",
]


@dataclass(frozen=True)
class DomainConfig:
    """Assembly options for one sub-domain.

    ``r_sign`` pins the admissible sign of the radius samples (+1, -1, or 0
    for sub-domains whose curve crosses r = 0).  ``force_odd`` keeps the grid
    size odd under refinement so the (n-1)-point collocation grid never
    contains tau = 0, where the radius of a symmetric curve vanishes.
    """

    multiplied: bool = False
    r_sign: int = 0
    force_odd: bool = False


@dataclass(frozen=True)
class BcTerm:
    dom: int
    field: str  # "r" | "u" | "psi"
    tau: float  # evaluation point, +-1 in practice
    coeff: float


@dataclass(frozen=True)
class BcRow:
    """One boundary or matching row: sum of endpoint evaluations plus a constant."""

    terms: tuple[BcTerm, ...]
    const: float
    label: str


class CollocationSystem:
    """Square collocated system N(v) = 0 with its Jacobian L(v)."""

    def __init__(
        self,
        layout: Layout,
        domains: list[DomainConfig],
        bc_rows: list[BcRow],
        kappa: float,
        ell_cap: float = np.inf,
    ):
        if len(domains) != layout.n_domains:
            raise ValueError("one DomainConfig per sub-domain required")
        n_ode = 3 * sum(n - 1 for n in layout.ns)
        if n_ode + len(bc_rows) != layout.n_v:
            raise ValueError(
                f"{len(bc_rows)} boundary rows do not square the system: "
                f"{n_ode} ODE rows vs {layout.n_v} unknowns"
            )
        self.layout = layout
        self.domains = list(domains)
        self.bc_rows = list(bc_rows)
        self.kappa = kappa
        self.ell_cap = ell_cap
        # equation-major row blocks: all r-rows, all u-rows, all psi-rows, BCs
        ms = [n - 1 for n in layout.ns]
        block = sum(ms)
        starts = np.cumsum([0] + ms)
        self._eq_rows = [
            [slice(e * block + starts[i], e * block + starts[i] + ms[i]) for e in range(3)]
            for i in range(layout.n_domains)
        ]
        self._bc_start = 3 * block

    @property
    def n_v(self) -> int:
        return self.layout.n_v

    def domain_ode_rows(self, dom: int) -> list[slice]:
        """Row slices of the three collocated equations of one sub-domain."""
        return self._eq_rows[dom]

    @property
    def bc_row_slice(self) -> slice:
        return slice(self._bc_start, self.n_v)

    def _domain_data(self, v: np.ndarray, i: int):
        lay = self.layout
        r = v[lay.field_slice("r", i)]
        u = v[lay.field_slice("u", i)]
        psi = v[lay.field_slice("psi", i)]
        ell = v[lay.ell_index(i)]
        n = lay.ns[i]
        return r, u, psi, ell, diffmat_rect(n, 0), diffmat_rect(n, 1)

    def residual(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n_v,):
            raise ValueError(f"vector length {v.size} does not match n_v={self.n_v}")
        out = np.empty(self.n_v)
        lay = self.layout
        for i, cfg in enumerate(self.domains):
            with np.errstate(divide="ignore", invalid="ignore"):
                stacked = ode_residual_rows(
                    v[lay.field_slice("r", i)],
                    v[lay.field_slice("u", i)],
                    v[lay.field_slice("psi", i)],
                    v[lay.ell_index(i)],
                    self.kappa,
                    cfg.multiplied,
                )
            m = lay.ns[i] - 1
            for e, rows in enumerate(self._eq_rows[i]):
                out[rows] = stacked[e * m : (e + 1) * m]
        for k, bc in enumerate(self.bc_rows):
            val = bc.const
            for t in bc.terms:
                n = self.layout.ns[t.dom]
                val += t.coeff * float(
                    eval_row(n, t.tau) @ v[self.layout.field_slice(t.field, t.dom)]
                )
            out[self._bc_start + k] = val
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("non-finite entries in assembled residual")
        return out

    def jacobian(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n_v,):
            raise ValueError(f"vector length {v.size} does not match n_v={self.n_v}")
        lay = self.layout
        kappa = self.kappa
        L = np.zeros((self.n_v, self.n_v))
        for i, cfg in enumerate(self.domains):
            r, u, psi, ell, D0, D1 = self._domain_data(v, i)
            n = lay.ns[i]
            x, y = chebpts(n), chebpts(n - 1)
            rc = _colloc(D0, r, x, y)
            uc = _colloc(D0, u, x, y)
            pc = _colloc(D0, psi, x, y)
            sin_p, cos_p = np.sin(pc), np.cos(pc)
            sr, su, sp = (lay.field_slice(f, i) for f in ("r", "u", "psi"))
            je = lay.ell_index(i)
            rows_r, rows_u, rows_p = self._eq_rows[i]

            L[rows_r, sr] = D1
            L[rows_r, sp] = (ell * sin_p)[:, None] * D0
            L[rows_r, je] = -cos_p

            L[rows_u, su] = D1
            L[rows_u, sp] = -(ell * cos_p)[:, None] * D0
            L[rows_u, je] = -sin_p

            if cfg.multiplied:
                dpsi = _colloc_deriv(D1, psi, x)
                L[rows_p, sr] = (dpsi - kappa * ell * uc)[:, None] * D0
                L[rows_p, su] = -(kappa * ell * rc)[:, None] * D0
                L[rows_p, sp] = rc[:, None] * D1 + (ell * cos_p)[:, None] * D0
                L[rows_p, je] = sin_p - kappa * rc * uc
            else:
                L[rows_p, sr] = -(ell * sin_p / rc**2)[:, None] * D0
                L[rows_p, su] = -kappa * ell * D0
                L[rows_p, sp] = D1 + (ell * cos_p / rc)[:, None] * D0
                L[rows_p, je] = sin_p / rc - kappa * uc
        for k, bc in enumerate(self.bc_rows):
            row = self._bc_start + k
            for t in bc.terms:
                n = lay.ns[t.dom]
                L[row, lay.field_slice(t.field, t.dom)] += t.coeff * eval_row(n, t.tau)
        if not np.all(np.isfinite(L)):
            raise FloatingPointError("non-finite entries in assembled Jacobian")
        return L


def _pin(dom: int, field: str, tau: float, target: float, label: str) -> BcRow:
    return BcRow((BcTerm(dom, field, tau, 1.0),), -target, label)


def _match(dom_l: int, dom_r: int, field: str, label: str) -> BcRow:
    return BcRow(
        (BcTerm(dom_l, field, 1.0, 1.0), BcTerm(dom_r, field, -1.0, -1.0)), 0.0, label
    )


def build_base_system(
    spec: ProblemSpec,
    n: int,
    psi_a: float | None = None,
    psi_b: float | None = None,
) -> CollocationSystem:
    """Single-domain system for p1 or p2 at the given (step) angles."""
    if psi_b is None:
        psi_b = spec.psi_b
    layout = Layout([n])
    if spec.kind == "p1":
        cfg = DomainConfig(multiplied=spec.b < 1, r_sign=0, force_odd=True)
        bc = [
            _pin(0, "r", -1.0, -spec.b, "r(-1)+b"),
            _pin(0, "r", 1.0, spec.b, "r(1)-b"),
            _pin(0, "psi", -1.0, -psi_b, "psi(-1)+psi_b"),
            _pin(0, "psi", 1.0, psi_b, "psi(1)-psi_b"),
        ]
    else:
        if psi_a is None:
            psi_a = spec.psi_a
        cfg = DomainConfig(multiplied=spec.a < 1, r_sign=1, force_odd=False)
        bc = [
            _pin(0, "r", -1.0, spec.a, "r(-1)-a"),
            _pin(0, "r", 1.0, spec.b, "r(1)-b"),
            _pin(0, "psi", -1.0, psi_a, "psi(-1)-psi_a"),
            _pin(0, "psi", 1.0, psi_b, "psi(1)-psi_b"),
        ]
    return CollocationSystem(layout, [cfg], bc, spec.kappa, ell_cap=100 * spec.length_scale)
