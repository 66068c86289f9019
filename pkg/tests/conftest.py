import math

import numpy as np
import pytest

from capspec.cheb import cheb_values
from capspec.continuation import run
from capspec.problem import Method, ProblemSpec
from capspec.state import SubdomainState


def smooth_values(n, amp, rng, modes=6):
    """Random low-order Chebyshev series sampled on the n-point grid."""
    c = np.zeros(n)
    k = min(modes, n)
    c[:k] = rng.standard_normal(k) * amp * 0.5 ** np.arange(k)
    return cheb_values(c)


def random_domain(n, r_lo, r_hi, rng, sign=1, amp=0.6):
    """Admissible sub-domain state; the radius keeps the requested sign.

    With sign=0 the radius runs linearly from -r_hi to r_hi (axis-crossing
    disk-type layout).
    """
    from capspec.cheb import chebpts

    tau = chebpts(n)
    if sign == 0:
        r = r_hi * tau + 0.05 * r_hi * smooth_values(n, 1.0, rng) * (1 - tau**2)
    else:
        r = r_lo + (r_hi - r_lo) * (tau + 1) / 2
        r = r + 0.15 * (r_hi - r_lo) * smooth_values(n, 1.0, rng)
        r = sign * np.maximum(np.abs(r), 0.6 * r_lo + 1e-3)
    return SubdomainState(
        r=r,
        u=smooth_values(n, amp, rng),
        psi=smooth_values(n, amp, rng),
        ell=float(rng.uniform(0.5, 2.5)),
    )


def fd_jacobian_error(system, v, rng, h=1e-7):
    """Relative error of a directional derivative against the Jacobian."""
    dv = rng.standard_normal(v.size)
    dv /= np.linalg.norm(dv)
    lhs = (system.residual(v + h * dv) - system.residual(v - h * dv)) / (2 * h)
    rhs = system.jacobian(v) @ dv
    return np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)


PI = math.pi

FIXTURE_SPECS = {
    "p1_b3_pi2": ProblemSpec(kind="p1", b=3.0, psi_b=PI / 2, method=Method.BASE),
    "p1_b3_pi": ProblemSpec(kind="p1", b=3.0, psi_b=PI, method=Method.BASE),
    "p1_b11_pi": ProblemSpec(kind="p1", b=11.0, psi_b=PI, method=Method.BASE),
    "p1_b29_3pi8": ProblemSpec(kind="p1", b=29.0, psi_b=3 * PI / 8, method=Method.BASE),
    "p1_b29_pi": ProblemSpec(kind="p1", b=29.0, psi_b=PI, method=Method.BASE),
    "p1_3z_b40": ProblemSpec(
        kind="p1", b=40.0, psi_b=PI, method=Method.P1_THREE_ZONE, delta=5.0
    ),
    "3rz_1_47": ProblemSpec(
        kind="p2", a=1.0, b=47.0, psi_a=-PI, psi_b=-PI, method=Method.THREE_RZ, delta=5.0
    ),
    "3rz_1_75": ProblemSpec(
        kind="p2", a=1.0, b=75.0, psi_a=-PI, psi_b=-PI, method=Method.THREE_RZ, delta=7.0
    ),
    "3rz_1_75_pp": ProblemSpec(
        kind="p2", a=1.0, b=75.0, psi_a=-PI, psi_b=PI, method=Method.THREE_RZ, delta=5.0
    ),
    "2rz_1_5": ProblemSpec(
        kind="p2", a=1.0, b=5.0, psi_a=-PI / 2, psi_b=-PI / 2, method=Method.TWO_RZ, delta=0.4
    ),
    "2rz_005_5": ProblemSpec(
        kind="p2", a=0.05, b=5.0, psi_a=-PI / 2, psi_b=-PI / 2, method=Method.TWO_RZ, delta=0.2
    ),
    "a2rz_b2": ProblemSpec(
        kind="p2", a=0.05, b=2.0, psi_a=-31 * PI / 32, psi_b=-PI, method=Method.A2RZ, delta=0.2
    ),
    "a2rz_b3": ProblemSpec(
        kind="p2", a=0.05, b=3.0, psi_a=-31 * PI / 32, psi_b=-PI, method=Method.A2RZ, delta=0.2
    ),
    "a2rz_b5": ProblemSpec(
        kind="p2", a=0.05, b=5.0, psi_a=-31 * PI / 32, psi_b=-PI, method=Method.A2RZ, delta=0.2
    ),
    "p2_base_1_5": ProblemSpec(
        kind="p2", a=1.0, b=5.0, psi_a=-PI / 2, psi_b=-PI / 2, method=Method.BASE
    ),
    "3rz_1_5": ProblemSpec(
        kind="p2", a=1.0, b=5.0, psi_a=-PI / 2, psi_b=-PI / 2, method=Method.THREE_RZ, delta=0.4
    ),
}

_CACHE = {}


@pytest.fixture(scope="session")
def solved():
    """Memoized access to the expensive reference solves."""

    def get(name):
        if name not in _CACHE:
            _CACHE[name] = run(FIXTURE_SPECS[name])
        return _CACHE[name]

    return get
