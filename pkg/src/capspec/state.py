"""Solution states and the flat computational vector.

A solve works on one or more sub-domains, each holding sampled radii, heights
and inclination angles on its own Chebyshev grid plus an arc-length scale.
The Newton iteration sees a single flat vector: all radius blocks, then all
height blocks, then all angle blocks, then one arc-length slot per sub-domain.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .problem import Method, ProblemSpec

__all__ = ["SubdomainState", "Layout", "Solution"]

_FIELDS = ("r", "u", "psi")


@dataclass
class SubdomainState:
    """Grid data for one sub-domain.

    ``ell`` is the arc-length scale: the local arc-length parameter is
    s = ell * tau with tau in [-1, 1], so the sub-domain carries total
    arc-length 2*ell.
    """

    r: np.ndarray
    u: np.ndarray
    psi: np.ndarray
    ell: float

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.psi = np.asarray(self.psi, dtype=float)
        if not (self.r.shape == self.u.shape == self.psi.shape) or self.r.ndim != 1:
            raise ValueError("r, u, psi must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return self.r.size


class Layout:
    """Index map between sub-domain states and the flat vector."""

    def __init__(self, ns):
        self.ns = tuple(int(n) for n in ns)
        if any(n < 2 for n in self.ns):
            raise ValueError(f"every sub-domain needs at least 2 points, got {self.ns}")
        self.n_domains = len(self.ns)
        self.n_total = sum(self.ns)
        self.n_v = 3 * self.n_total + self.n_domains
        starts = np.cumsum((0,) + self.ns)
        self._starts = starts

    def field_slice(self, field: str, dom: int) -> slice:
        f = _FIELDS.index(field)
        off = f * self.n_total + self._starts[dom]
        return slice(off, off + self.ns[dom])

    def ell_index(self, dom: int) -> int:
        return 3 * self.n_total + dom

    def pack(self, states: list[SubdomainState]) -> np.ndarray:
        if len(states) != self.n_domains or any(
            s.n != n for s, n in zip(states, self.ns)
        ):
            raise ValueError(
                f"states with sizes {[s.n for s in states]} do not match layout {self.ns}"
            )
        v = np.empty(self.n_v)
        for i, st in enumerate(states):
            v[self.field_slice("r", i)] = st.r
            v[self.field_slice("u", i)] = st.u
            v[self.field_slice("psi", i)] = st.psi
            v[self.ell_index(i)] = st.ell
        return v

    def unpack(self, v: np.ndarray) -> list[SubdomainState]:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n_v,):
            raise ValueError(f"vector of length {v.size} does not match layout n_v={self.n_v}")
        return [
            SubdomainState(
                r=v[self.field_slice("r", i)].copy(),
                u=v[self.field_slice("u", i)].copy(),
                psi=v[self.field_slice("psi", i)].copy(),
                ell=float(v[self.ell_index(i)]),
            )
            for i in range(self.n_domains)
        ]


@dataclass
class Solution:
    """A (possibly unconverged) solve state with enough context to output it."""

    spec: ProblemSpec
    method: Method
    delta: float | None
    psi_bar: float | None
    domains: list[SubdomainState]

    @property
    def layout(self) -> Layout:
        return Layout([d.n for d in self.domains])

    @property
    def vector(self) -> np.ndarray:
        return self.layout.pack(self.domains)

    def with_domains(self, domains: list[SubdomainState]) -> "Solution":
        return replace(self, domains=domains)

    @property
    def total_arc_length(self) -> float:
        """Arc-length of the full tau-in-[-1,1] curve (2*ell summed over zones)."""
        return 2 * sum(d.ell for d in self.domains)
