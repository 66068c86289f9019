"""Curve tables, report files, and reconstruction of a solve from its files.

The curve CSV holds one row per grid point with columns
``subdomain,tau,s,r,u,psi``; ``s`` is the cumulative arc-length starting at 0
on the left endpoint of the first sub-domain, so interface points appear once
per side with matching coordinates.  Values are written with enough digits to
reproduce the solver state bit-for-bit, which is what makes the round-trip
residual check in the tests meaningful.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cheb import chebpts
from .continuation import SolveReport
from .multiscale import psi_bar_for
from .problem import Method, ProblemSpec
from .state import Solution, SubdomainState

__all__ = [
    "CurveRecord",
    "curve_records",
    "write_curve_csv",
    "read_curve_csv",
    "records_to_domains",
    "report_payload",
    "write_report",
    "load_run",
]


@dataclass(frozen=True)
class CurveRecord:
    subdomain: int
    tau: float
    s: float
    r: float
    u: float
    psi: float


def curve_records(solution: Solution) -> list[CurveRecord]:
    """Flatten a solution into per-grid-point rows with cumulative arc-length."""
    records = []
    s0 = 0.0
    for i, dom in enumerate(solution.domains):
        taus = chebpts(dom.n)
        for j in range(dom.n):
            records.append(
                CurveRecord(
                    subdomain=i,
                    tau=float(taus[j]),
                    s=s0 + dom.ell * (taus[j] + 1.0),
                    r=float(dom.r[j]),
                    u=float(dom.u[j]),
                    psi=float(dom.psi[j]),
                )
            )
        s0 += 2 * dom.ell
    return records


_COLUMNS = ("subdomain", "tau", "s", "r", "u", "psi")


def write_curve_csv(records: list[CurveRecord], path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_COLUMNS)
        for rec in records:
            writer.writerow(
                [rec.subdomain]
                + [format(getattr(rec, c), ".17g") for c in _COLUMNS[1:]]
            )


def read_curve_csv(path) -> list[CurveRecord]:
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != _COLUMNS:
            raise ValueError(f"{path} does not look like a curve table")
        for row in reader:
            records.append(
                CurveRecord(
                    subdomain=int(row["subdomain"]),
                    tau=float(row["tau"]),
                    s=float(row["s"]),
                    r=float(row["r"]),
                    u=float(row["u"]),
                    psi=float(row["psi"]),
                )
            )
    return records


def records_to_domains(records: list[CurveRecord]) -> list[SubdomainState]:
    """Rebuild sub-domain states from curve rows (arc scales from the s spans)."""
    by_dom: dict[int, list[CurveRecord]] = {}
    for rec in records:
        by_dom.setdefault(rec.subdomain, []).append(rec)
    domains = []
    for i in sorted(by_dom):
        rows = sorted(by_dom[i], key=lambda rec: rec.tau)
        s = np.array([rec.s for rec in rows])
        domains.append(
            SubdomainState(
                r=np.array([rec.r for rec in rows]),
                u=np.array([rec.u for rec in rows]),
                psi=np.array([rec.psi for rec in rows]),
                ell=(s[-1] - s[0]) / 2.0,
            )
        )
    return domains


def report_payload(spec: ProblemSpec, report: SolveReport) -> dict:
    payload = {
        "problem": spec.kind,
        "a": spec.a,
        "b": spec.b,
        "psi_a": spec.psi_a,
        "psi_b": spec.psi_b,
        "kappa": spec.kappa,
        "n0": spec.n0,
        "tol_newton": spec.tol_newton,
        "tol_bvp": spec.tol_bvp,
    }
    payload.update(report.as_dict())
    return payload


def write_report(spec: ProblemSpec, report: SolveReport, path) -> None:
    Path(path).write_text(json.dumps(report_payload(spec, report), indent=2) + "\n")


def load_run(curve_path, report_path) -> Solution:
    """Reconstruct a solution object from its curve CSV and report JSON."""
    payload = json.loads(Path(report_path).read_text())
    method = Method(payload["method"])
    spec = ProblemSpec(
        kind=payload["problem"],
        b=payload["b"],
        psi_b=payload["psi_b"],
        a=payload["a"],
        psi_a=payload["psi_a"],
        kappa=payload["kappa"],
        method=method,
        delta=payload["delta"],
        tol_newton=payload["tol_newton"],
        tol_bvp=payload["tol_bvp"],
        n0=payload["n0"],
    )
    domains = records_to_domains(read_curve_csv(curve_path))
    psi_bar = psi_bar_for(spec.psi_a) if method == Method.A2RZ else None
    return Solution(
        spec=spec, method=method, delta=payload["delta"], psi_bar=psi_bar, domains=domains
    )
