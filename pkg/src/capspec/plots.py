"""Static plots of generating curves.

Renders the curve in the (r, u) plane with visible dots at the grid points,
vertical lines at the radii of interest, and (for disk-type problems) the
mirror image through the axis.  Axes use equal scaling unless the profile is
too elongated, in which case independent scaling is used and declared in the
figure and in the file metadata.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .output import CurveRecord
from .problem import ProblemSpec

__all__ = ["emit_plot"]

_ASPECT_LIMIT = 20.0


def emit_plot(records: list[CurveRecord], spec: ProblemSpec, path) -> Path:
    """Write the generating-curve figure; the format follows the extension."""
    if not records:
        raise ValueError("cannot plot an empty curve")
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    doms = sorted({rec.subdomain for rec in records})
    for i in doms:
        r = [rec.r for rec in records if rec.subdomain == i]
        u = [rec.u for rec in records if rec.subdomain == i]
        ax.plot(r, u, "-", lw=1.1, color="tab:blue")
        ax.plot(r, u, ".", ms=3.0, color="tab:blue")
        if spec.kind == "p1":
            ax.plot([-x for x in r], u, "-", lw=1.1, color="tab:blue", alpha=0.6)
    radii = [spec.b, -spec.b] if spec.kind == "p1" else [spec.a, spec.b]
    for x in radii:
        ax.axvline(x, color="0.45", lw=0.9)
    r_all = [rec.r for rec in records]
    u_all = [rec.u for rec in records]
    r_span = max(max(r_all), max(radii)) - min(min(r_all), min(radii))
    u_span = max(u_all) - min(u_all)
    if u_span > 0 and r_span / u_span <= _ASPECT_LIMIT:
        ax.set_aspect("equal")
        aspect = "equal"
    else:
        aspect = "auto"
    ax.set_xlabel("r")
    ax.set_ylabel("u")
    title = f"{spec.kind}: b={spec.b:g}, psi_b={spec.psi_b:.6g}"
    if spec.kind == "p2":
        title = f"{spec.kind}: a={spec.a:g}, b={spec.b:g}, psi_a={spec.psi_a:.6g}, psi_b={spec.psi_b:.6g}"
    ax.set_title(f"{title}  [aspect={aspect}]", fontsize=9)
    meta = None
    if path.suffix.lower() == ".svg":
        meta = {"Description": f"generating curve; axis aspect={aspect}"}
    fig.savefig(path, bbox_inches="tight", metadata=meta)
    plt.close(fig)
    return path
