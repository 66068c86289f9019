"""Command-line front end.

A single solve writes the curve table (CSV), the run report (JSON), and
optionally a figure of the generating curve; sweep mode runs a list of cases
from a JSON file and adds a summary table.  Exit codes: 0 converged, 1 usage
error, 2 did-not-converge (the report is still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .continuation import run
from .output import curve_records, write_curve_csv, write_report
from .plots import emit_plot
from .problem import Method, ProblemSpec, resolve_method

__all__ = ["auto_method", "run_cli", "main"]

# recommended sub-domain offsets when --delta is omitted with --method auto:
# wide disks: max(2, b/8); wide annuli: max(3, (b-a)/15); small inner radii: 0.2
auto_method = resolve_method


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_SPEC_KEYS = (
    "problem",
    "a",
    "b",
    "psi_a",
    "psi_b",
    "kappa",
    "method",
    "delta",
    "n0",
    "tol_newton",
    "tol_bvp",
    "max_iter",
    "continuation_steps",
    "n_max",
)
_PATH_KEYS = ("out_curve", "out_report", "out_plot")


def _build_parser() -> _Parser:
    p = _Parser(prog="capspec", description=__doc__)
    p.add_argument("--problem", choices=("p1", "p2"))
    p.add_argument("--a", type=float, help="inner radius (p2 only)")
    p.add_argument("--b", type=float, help="outer radius")
    p.add_argument("--psia", type=float, help="inclination at r=a in radians (p2 only)")
    p.add_argument("--psib", type=float, help="inclination at r=b in radians")
    p.add_argument(
        "--psia-pi-frac",
        nargs=2,
        type=float,
        metavar=("P", "Q"),
        help="psi_a = (P/Q)*pi, exact for table-style angles",
    )
    p.add_argument("--psib-pi-frac", nargs=2, type=float, metavar=("P", "Q"))
    p.add_argument("--kappa", type=float, help="capillary constant (default 1)")
    p.add_argument("--method", choices=[m.value for m in Method])
    p.add_argument("--delta", type=float, help="sub-domain offset for multi-scale methods")
    p.add_argument("--n0", type=int, help="initial points per sub-domain (default 15)")
    p.add_argument("--tol-newton", type=float, dest="tol_newton")
    p.add_argument("--tol-bvp", type=float, dest="tol_bvp")
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--continuation-steps", type=int, dest="continuation_steps")
    p.add_argument("--n-max", type=int, dest="n_max", help="per-sub-domain grid cap")
    p.add_argument("--out-curve", dest="out_curve", help="curve CSV path (default curve.csv)")
    p.add_argument("--out-report", dest="out_report", help="report JSON path (default report.json)")
    p.add_argument("--out-plot", dest="out_plot", help="figure path (.svg recommended)")
    p.add_argument("--config", help="JSON file with the same fields; flags override it")
    p.add_argument("--sweep", help="JSON file with a list of cases to run")
    p.add_argument("--out-dir", dest="out_dir", help="output directory for sweep mode")
    p.add_argument("--jobs", type=int, default=1, help="concurrent sweep solves")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _merge_settings(args: argparse.Namespace) -> dict:
    settings: dict = {}
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.exists():
            raise UsageError(f"config file {cfg_path} not found")
        loaded = json.loads(cfg_path.read_text())
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a JSON object")
        unknown = set(loaded) - set(_SPEC_KEYS) - set(_PATH_KEYS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        settings.update(loaded)
    for key in _SPEC_KEYS + _PATH_KEYS:
        cli_key = {"problem": "problem", "psi_a": "psia", "psi_b": "psib"}.get(key, key)
        val = getattr(args, cli_key, None)
        if val is not None:
            settings[key] = val
    if args.psia_pi_frac is not None:
        p_, q_ = args.psia_pi_frac
        settings["psi_a"] = p_ / q_ * math.pi
    if args.psib_pi_frac is not None:
        p_, q_ = args.psib_pi_frac
        settings["psi_b"] = p_ / q_ * math.pi
    return settings


def _spec_from_settings(settings: dict) -> ProblemSpec:
    if "problem" not in settings:
        raise UsageError("--problem is required")
    if "b" not in settings:
        raise UsageError("--b is required")
    if "psi_b" not in settings:
        raise UsageError("--psib (or --psib-pi-frac) is required")
    kind = settings["problem"]
    if kind == "p2" and ("a" not in settings or "psi_a" not in settings):
        raise UsageError("p2 requires --a and --psia (or --psia-pi-frac)")
    try:
        return ProblemSpec(
            kind=kind,
            b=settings["b"],
            psi_b=settings["psi_b"],
            a=settings.get("a") if kind == "p2" else None,
            psi_a=settings.get("psi_a") if kind == "p2" else None,
            kappa=settings.get("kappa", 1.0),
            method=Method(settings.get("method", "auto")),
            delta=settings.get("delta"),
            tol_newton=settings.get("tol_newton", 1e-13),
            tol_bvp=settings.get("tol_bvp", 1e-12),
            n0=settings.get("n0", 15),
            max_newton_iter=settings.get("max_iter", 300),
            continuation_steps=settings.get("continuation_steps"),
            n_max=settings.get("n_max", 2048),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _solve_and_write(
    settings: dict, verbose: bool, default_outputs: bool = True
) -> tuple[int, dict]:
    spec = _spec_from_settings(settings)
    try:
        resolved = spec.resolved()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    solution, report = run(spec)
    out_report = settings.get("out_report", "report.json" if default_outputs else None)
    out_curve = settings.get("out_curve", "curve.csv" if default_outputs else None)
    out_plot = settings.get("out_plot")
    if out_report:
        write_report(resolved, report, out_report)
    if report.converged and solution is not None:
        records = curve_records(solution)
        if out_curve:
            write_curve_csv(records, out_curve)
        if out_plot:
            emit_plot(records, resolved, out_plot)
    if verbose:
        status = "converged" if report.converged else f"dnc at step {report.dnc_step}"
        print(
            f"{resolved.kind} method={report.method} n_v={report.n_v} "
            f"n_N={report.n_N} res_bvp={report.res_bvp:.3e} [{status}]",
            file=sys.stderr,
        )
    payload = {
        "a": resolved.a,
        "b": resolved.b,
        "psia": resolved.psi_a,
        "psib": resolved.psi_b,
        "method": report.method,
        "n_v": report.n_v,
        "n_N": report.n_N,
        "delta": report.delta,
        "converged": report.converged,
    }
    return (0 if report.converged else 2), payload


def _run_sweep(args: argparse.Namespace) -> int:
    sweep_path = Path(args.sweep)
    if not sweep_path.exists():
        raise UsageError(f"sweep file {sweep_path} not found")
    loaded = json.loads(sweep_path.read_text())
    cases = loaded["cases"] if isinstance(loaded, dict) else loaded
    if not isinstance(cases, list) or not cases:
        raise UsageError("sweep file must hold a non-empty list of cases")
    out_dir = Path(args.out_dir or "sweep_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    base = _merge_settings(args)
    base.pop("out_curve", None)
    base.pop("out_report", None)
    base.pop("out_plot", None)

    def one(idx_case):
        idx, case = idx_case
        settings = dict(base)
        settings.update(case)
        settings["out_report"] = str(out_dir / f"case_{idx:03d}.report.json")
        settings["out_curve"] = str(out_dir / f"case_{idx:03d}.curve.csv")
        try:
            return one_result(idx, *_solve_and_write(settings, args.verbose, default_outputs=False))
        except UsageError as exc:
            raise UsageError(f"case {idx}: {exc}") from exc

    def one_result(idx, code, payload):
        return idx, code, payload

    items = list(enumerate(cases))
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, items))
    else:
        results = [one(item) for item in items]
    results.sort()
    summary = out_dir / "summary.csv"
    with summary.open("w") as fh:
        fh.write("a,b,psia,psib,method,n_v,n_N,delta,converged\n")
        for _idx, _code, pay in results:
            fh.write(
                f"{pay['a']},{pay['b']},{pay['psia']},{pay['psib']},{pay['method']},"
                f"{pay['n_v']},{pay['n_N']},{pay['delta']},{pay['converged']}\n"
            )
    return 0 if all(code == 0 for _i, code, _p in results) else 2


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        if args.sweep:
            return _run_sweep(args)
        settings = _merge_settings(args)
        code, _payload = _solve_and_write(settings, args.verbose)
        return code
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
