"""Domain-decomposition assemblies: block systems with matching conditions.

Four splits of the arc-length domain are provided.  Radius markers bound the
zones for the disk three-zone split (r = delta-b and b-delta), the annular
three-zone split (r = a+delta and b-delta) and the annular two-zone split
(r = a+delta).  The angle-marked split further divides the innermost annular
zone at the inclination psi_bar = sign(psi_a) * pi/2.  Matching rows tie the
height and angle (and, at the angle marker, the radius) across each artificial
boundary; each sub-domain keeps its own grid and arc-length scale.
"""

from __future__ import annotations

import math

import numpy as np

from .problem import Method, ProblemSpec
from .state import Layout
from .system import BcRow, BcTerm, CollocationSystem, DomainConfig, _match, _pin

__all__ = [
    "psi_bar_for",
    "markers_for",
    "build_p1_three_zone_system",
    "build_three_rz_system",
    "build_two_rz_system",
    "build_a2rz_system",
    "build_system",
]


def psi_bar_for(psi_a: float) -> float:
    """Angle marker used by the angle-split method: -pi/2 when psi_a < 0."""
    return -math.pi / 2 if psi_a < 0 else math.pi / 2


def markers_for(spec: ProblemSpec, method: Method) -> list[float]:
    """Radius markers bounding the sub-domains, left to right."""
    d = spec.delta
    if method == Method.P1_THREE_ZONE:
        return [d - spec.b, spec.b - d]
    if method == Method.THREE_RZ:
        return [spec.a + d, spec.b - d]
    if method in (Method.TWO_RZ, Method.A2RZ):
        return [spec.a + d]
    return []


def build_p1_three_zone_system(spec: ProblemSpec, ns, psi_b=None) -> CollocationSystem:
    if psi_b is None:
        psi_b = spec.psi_b
    b, d = spec.b, spec.delta
    layout = Layout(ns)
    # middle zone crosses r = 0; keep its grid odd so no collocation point
    # lands on the axis
    domains = [
        DomainConfig(multiplied=False, r_sign=-1, force_odd=False),
        DomainConfig(multiplied=False, r_sign=0, force_odd=True),
        DomainConfig(multiplied=False, r_sign=1, force_odd=False),
    ]
    bc = [
        _pin(0, "r", -1.0, -b, "r1(-1)+b"),
        _pin(0, "r", 1.0, d - b, "r1(1)+b-delta"),
        _pin(0, "psi", -1.0, -psi_b, "psi1(-1)+psi_b"),
        _match(0, 1, "psi", "psi1(1)-psi2(-1)"),
        _pin(1, "r", -1.0, d - b, "r2(-1)+b-delta"),
        _match(0, 1, "u", "u1(1)-u2(-1)"),
        _pin(1, "r", 1.0, b - d, "r2(1)-b+delta"),
        _match(1, 2, "psi", "psi2(1)-psi3(-1)"),
        _pin(2, "r", -1.0, b - d, "r3(-1)-b+delta"),
        _match(1, 2, "u", "u2(1)-u3(-1)"),
        _pin(2, "r", 1.0, b, "r3(1)-b"),
        _pin(2, "psi", 1.0, psi_b, "psi3(1)-psi_b"),
    ]
    return CollocationSystem(layout, domains, bc, spec.kappa, ell_cap=100 * spec.length_scale)


def build_three_rz_system(spec: ProblemSpec, ns, psi_a=None, psi_b=None) -> CollocationSystem:
    if psi_a is None:
        psi_a = spec.psi_a
    if psi_b is None:
        psi_b = spec.psi_b
    a, b, d = spec.a, spec.b, spec.delta
    layout = Layout(ns)
    domains = [
        DomainConfig(multiplied=a < 1, r_sign=1),
        DomainConfig(multiplied=False, r_sign=1),
        DomainConfig(multiplied=False, r_sign=1),
    ]
    bc = [
        _pin(0, "r", -1.0, a, "r1(-1)-a"),
        _pin(0, "r", 1.0, a + d, "r1(1)-(a+delta)"),
        _pin(0, "psi", -1.0, psi_a, "psi1(-1)-psi_a"),
        _match(0, 1, "psi", "psi1(1)-psi2(-1)"),
        _pin(1, "r", -1.0, a + d, "r2(-1)-(a+delta)"),
        _match(0, 1, "u", "u1(1)-u2(-1)"),
        _pin(1, "r", 1.0, b - d, "r2(1)-(b-delta)"),
        _match(1, 2, "psi", "psi2(1)-psi3(-1)"),
        _pin(2, "r", -1.0, b - d, "r3(-1)-(b-delta)"),
        _match(1, 2, "u", "u2(1)-u3(-1)"),
        _pin(2, "r", 1.0, b, "r3(1)-b"),
        _pin(2, "psi", 1.0, psi_b, "psi3(1)-psi_b"),
    ]
    return CollocationSystem(layout, domains, bc, spec.kappa, ell_cap=100 * spec.length_scale)


def build_two_rz_system(spec: ProblemSpec, ns, psi_a=None, psi_b=None) -> CollocationSystem:
    if psi_a is None:
        psi_a = spec.psi_a
    if psi_b is None:
        psi_b = spec.psi_b
    a, b, d = spec.a, spec.b, spec.delta
    layout = Layout(ns)
    domains = [
        DomainConfig(multiplied=True, r_sign=1),
        DomainConfig(multiplied=False, r_sign=1),
    ]
    bc = [
        _pin(0, "r", -1.0, a, "r1(-1)-a"),
        _pin(0, "r", 1.0, a + d, "r1(1)-(a+delta)"),
        _pin(0, "psi", -1.0, psi_a, "psi1(-1)-psi_a"),
        _match(0, 1, "psi", "psi1(1)-psi2(-1)"),
        _match(0, 1, "u", "u1(1)-u2(-1)"),
        _pin(1, "r", -1.0, a + d, "r2(-1)-(a+delta)"),
        _pin(1, "r", 1.0, b, "r2(1)-b"),
        _pin(1, "psi", 1.0, psi_b, "psi2(1)-psi_b"),
    ]
    return CollocationSystem(layout, domains, bc, spec.kappa, ell_cap=100 * spec.length_scale)


def build_a2rz_system(
    spec: ProblemSpec, ns, psi_a=None, psi_b=None, psi_bar=None
) -> CollocationSystem:
    """Angle-marked split: zones alpha (wall angle to psi_bar), beta, outer."""
    if psi_a is None:
        psi_a = spec.psi_a
    if psi_b is None:
        psi_b = spec.psi_b
    if psi_bar is None:
        psi_bar = psi_bar_for(psi_a)
    a, b, d = spec.a, spec.b, spec.delta
    layout = Layout(ns)
    domains = [
        DomainConfig(multiplied=True, r_sign=1),
        DomainConfig(multiplied=True, r_sign=1),
        DomainConfig(multiplied=False, r_sign=1),
    ]
    bc = [
        _pin(0, "r", -1.0, a, "ra(-1)-a"),
        _match(0, 1, "r", "ra(1)-rb(-1)"),
        _pin(0, "psi", -1.0, psi_a, "psia(-1)-psi_a"),
        _pin(0, "psi", 1.0, psi_bar, "psia(1)-psi_bar"),
        _match(0, 1, "u", "ua(1)-ub(-1)"),
        _pin(1, "r", 1.0, a + d, "rb(1)-(a+delta)"),
        _pin(1, "psi", -1.0, psi_bar, "psib(-1)-psi_bar"),
        _match(1, 2, "psi", "psib(1)-psi2(-1)"),
        _pin(2, "r", -1.0, a + d, "r2(-1)-(a+delta)"),
        _match(1, 2, "u", "ub(1)-u2(-1)"),
        _pin(2, "r", 1.0, b, "r2(1)-b"),
        _pin(2, "psi", 1.0, psi_b, "psi2(1)-psi_b"),
    ]
    return CollocationSystem(layout, domains, bc, spec.kappa, ell_cap=100 * spec.length_scale)


def build_system(
    spec: ProblemSpec,
    method: Method,
    ns,
    psi_a=None,
    psi_b=None,
    psi_bar=None,
) -> CollocationSystem:
    """Dispatch to the assembly for the given variant and step angles."""
    from .system import build_base_system

    if method == Method.BASE:
        (n,) = ns
        return build_base_system(spec, n, psi_a=psi_a, psi_b=psi_b)
    if method == Method.P1_THREE_ZONE:
        return build_p1_three_zone_system(spec, ns, psi_b=psi_b)
    if method == Method.THREE_RZ:
        return build_three_rz_system(spec, ns, psi_a=psi_a, psi_b=psi_b)
    if method == Method.TWO_RZ:
        return build_two_rz_system(spec, ns, psi_a=psi_a, psi_b=psi_b)
    if method == Method.A2RZ:
        return build_a2rz_system(spec, ns, psi_a=psi_a, psi_b=psi_b, psi_bar=psi_bar)
    raise ValueError(f"no assembly for method {method!r}")
