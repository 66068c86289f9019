"""Problem definitions for bounded radially symmetric capillary surfaces.

Two prototype problems are supported: disk-type interfaces (``p1``), where the
generating curve spans r in [-b, b] and the inclination angle is prescribed at
r = b, and annular interfaces (``p2``) with inner radius a and outer radius b
and angles prescribed at both walls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

__all__ = ["Method", "ProblemSpec", "resolve_method"]


class Method(str, Enum):
    """Assembly variant used for the solve."""

    BASE = "base"
    P1_THREE_ZONE = "p1-3z"
    THREE_RZ = "3rz"
    TWO_RZ = "2rz"
    A2RZ = "a2rz"
    AUTO = "auto"


_P1_METHODS = {Method.BASE, Method.P1_THREE_ZONE, Method.AUTO}
_P2_METHODS = {Method.BASE, Method.THREE_RZ, Method.TWO_RZ, Method.A2RZ, Method.AUTO}


@dataclass(frozen=True)
class ProblemSpec:
    """Full problem definition.

    Angles are in radians, in [-pi, pi].  ``kappa`` is the capillary constant
    (density difference times gravity over surface tension) and must be
    positive.  ``delta`` is the sub-domain offset used by the multi-scale
    methods; it has no default because it is an experiment parameter (see the
    CLI help for recommended values).
    """

    kind: str  # "p1" | "p2"
    b: float
    psi_b: float
    a: float | None = None
    psi_a: float | None = None
    kappa: float = 1.0
    method: Method = Method.AUTO
    delta: float | None = None
    tol_newton: float = 1e-13
    tol_bvp: float = 1e-12
    n0: int = 15
    max_newton_iter: int = 300
    continuation_steps: int | None = None
    n_max: int = 2048

    def __post_init__(self):
        if self.kind not in ("p1", "p2"):
            raise ValueError(f"unknown problem kind {self.kind!r}; expected 'p1' or 'p2'")
        if not self.b > 0:
            raise ValueError(f"outer radius b must be positive, got {self.b}")
        if not abs(self.psi_b) <= math.pi + 1e-12:
            raise ValueError(f"psi_b must lie in [-pi, pi], got {self.psi_b}")
        if self.kind == "p2":
            if self.a is None or self.psi_a is None:
                raise ValueError("p2 requires both the inner radius a and psi_a")
            if not 0 < self.a < self.b:
                raise ValueError(f"p2 requires 0 < a < b, got a={self.a}, b={self.b}")
            if not abs(self.psi_a) <= math.pi + 1e-12:
                raise ValueError(f"psi_a must lie in [-pi, pi], got {self.psi_a}")
        else:
            if self.a is not None or self.psi_a is not None:
                raise ValueError("a and psi_a only apply to p2 problems")
        if not self.kappa > 0:
            raise ValueError(f"capillary constant kappa must be positive, got {self.kappa}")
        if self.method not in (_P1_METHODS if self.kind == "p1" else _P2_METHODS):
            raise ValueError(f"method {self.method.value!r} does not apply to {self.kind}")
        if self.tol_newton <= 0 or self.tol_bvp <= 0:
            raise ValueError("tolerances must be positive")
        if self.n0 < 4:
            raise ValueError(f"initial grid size n0 must be at least 4, got {self.n0}")
        if self.max_newton_iter < 1:
            raise ValueError("max_newton_iter must be at least 1")
        if self.delta is not None:
            self._check_delta(self.method, self.delta)

    def _check_delta(self, method: Method, delta: float) -> None:
        if delta <= 0:
            raise ValueError(f"sub-domain offset delta must be positive, got {delta}")
        if method == Method.P1_THREE_ZONE and not delta < self.b:
            raise ValueError(f"p1-3z requires delta < b, got delta={delta}, b={self.b}")
        if method == Method.THREE_RZ and not delta < (self.b - self.a) / 2:
            raise ValueError(
                f"3rz requires delta < (b-a)/2, got delta={delta}, b-a={self.b - self.a}"
            )
        if method in (Method.TWO_RZ, Method.A2RZ) and not delta < self.b - self.a:
            raise ValueError(
                f"{method.value} requires delta < b-a, got delta={delta}, b-a={self.b - self.a}"
            )

    @property
    def is_multiscale(self) -> bool:
        return self.method in (
            Method.P1_THREE_ZONE,
            Method.THREE_RZ,
            Method.TWO_RZ,
            Method.A2RZ,
        )

    @property
    def length_scale(self) -> float:
        """Radial extent of the configuration (2b for p1, b-a for p2)."""
        return 2 * self.b if self.kind == "p1" else self.b - self.a

    def resolved(self) -> "ProblemSpec":
        """Return a copy with a concrete method and delta filled in."""
        spec = self
        if spec.method == Method.AUTO:
            method, delta = resolve_method(spec)
            spec = replace(spec, method=method, delta=spec.delta if spec.delta is not None else delta)
        if spec.is_multiscale and spec.delta is None:
            raise ValueError(f"method {spec.method.value!r} requires a sub-domain offset delta")
        if spec.is_multiscale:
            spec._check_delta(spec.method, spec.delta)
        return spec


def resolve_method(spec: ProblemSpec) -> tuple[Method, float | None]:
    """Pick an assembly variant (and default delta) from the configuration.

    Disk problems stay with the single-domain assembly unless the radius is
    large and the contact angle exceeds pi/2.  Annular problems switch to the
    three-zone split for wide gaps, the angle-marked split for tiny inner
    radii with near-vertical-and-beyond inner angles, and the two-zone split
    for small inner radii.
    """
    if spec.kind == "p1":
        if spec.b <= 10 or abs(spec.psi_b) <= math.pi / 2:
            return Method.BASE, None
        return Method.P1_THREE_ZONE, max(2.0, spec.b / 8)
    if spec.b - spec.a >= 15:
        return Method.THREE_RZ, max(3.0, (spec.b - spec.a) / 15)
    if spec.a < 0.1 and abs(spec.psi_a) > 15 * math.pi / 16:
        return Method.A2RZ, 0.2
    if spec.a < 1:
        return Method.TWO_RZ, 0.2
    return Method.BASE, None
