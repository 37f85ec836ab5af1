"""Command-line front end: single-point queries, sweeps, plot-data emission.

Every subcommand prints one JSON document to stdout; sweeps emit CSV rows (or
a JSON array) with a fixed, documented column order.  Exit codes: 0 success,
2 invalid parameters (the violated condition is named), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from typing import Any

import numpy as np

from . import energy, minimizer, spectrum
from .eig_oracle import ConvergenceFailure
from .params import (
    CknParams,
    DegenerateBoundary,
    InvalidParameters,
    ParameterError,
    classify,
    felli_schneider,
    make_params,
)

__all__ = ["main", "run_command"]

WORKERS_ENV = "CKNLAB_WORKERS"

SWEEP_COLUMNS = {
    "region": ["region", "b_fs", "b_fs_star", "a_c_star"],
    "spectrum": ["lambda_00", "lambda_01", "lambda_02", "lambda_10", "lambda_11"],
    "gap": ["lambda_star", "gap_winner", "lambda_star_variant"],
    "bounds": ["bound_two_bubble", "bound_two_bubble_variant", "bound_gap", "effective_bound"],
    "zhat": ["zhat", "zhat_variational", "q_star"],
    "minimize": ["q_best", "q_iterations", "q_start"],
}


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, np.ndarray):
        return [float(x) for x in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isnan(obj):
        return None
    return obj


def _emit(document: dict) -> None:
    print(json.dumps(_jsonable(document)))


def _params_payload(params: CknParams) -> dict:
    report = classify(params)
    return {
        "N": params.N,
        "a": params.a,
        "b": params.b,
        "a_c": params.a_c,
        "p": params.p,
        "gamma": params.gamma,
        "beta": params.beta,
        "region": report.region,
        "b_fs": report.b_fs,
        "b_fs_star": report.b_fs_star,
        "a_c_star": report.a_c_star,
        "boundary_note": report.boundary_note,
    }


def _cmd_region(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    doc = {"command": "region"}
    doc.update(_params_payload(params))
    return doc


def _cmd_spectrum(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    points = [
        spectrum.eigenvalue_closed(params, i, j)
        for i in range(args.imax + 1)
        for j in range(args.jmax + 1)
    ]
    doc = {"command": "spectrum"}
    doc.update(_params_payload(params))
    doc["eigenvalues"] = [
        {"i": pt.i, "j": pt.j, "tau": pt.tau, "lambda": pt.lam, "multiplicity": pt.multiplicity}
        for pt in points
    ]
    return doc


def _cmd_gap(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    gap = spectrum.spectral_gap(params)
    doc = {"command": "gap"}
    doc.update(_params_payload(params))
    doc.update(
        {
            "lambda_star": gap.lambda_star,
            "winner": list(gap.winner),
            "winner_multiplicity": gap.winner_multiplicity,
            "lambda_02": gap.lambda_02,
            "lambda_10": gap.lambda_10,
            "lambda_11": gap.lambda_11,
            "lambda_star_variant": gap.lambda_star_variant,
        }
    )
    return doc


def _cmd_bounds(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    doc = {"command": "bounds"}
    doc.update(_params_payload(params))
    doc["bounds"] = energy.bounds_report(params)
    return doc


def _cmd_energy(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    doc = {"command": "energy"}
    doc.update(_params_payload(params))
    doc["a0"] = energy.a0_coefficient(params)
    doc["two_bubble"] = energy.two_bubble_quotient(params, args.s / params.gamma)
    region = classify(params).region.value
    doc["third_order"] = energy.third_order_coefficient(params)
    doc["gap_perturbation"] = energy.gap_perturbation_quotient(params, args.eps)
    doc["gap_perturbation_is_gap_bound"] = region in ("CaseI", "CaseII")
    return doc


def _cmd_zhat(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    doc = {"command": "zhat"}
    doc.update(_params_payload(params))
    doc["appendix"] = energy.appendix_report(params)
    return doc


def _cmd_minimize(args) -> dict:
    params = make_params(args.N, args.a, args.b)
    report = minimizer.estimate_cbe(params, starts=args.starts, seed=args.seed)
    doc = {"command": "minimize", "seed": args.seed, "starts": args.starts}
    doc.update(_params_payload(params))
    doc.update(
        {
            "q_best": report.value,
            "distance_sq": report.distance_sq,
            "shift": report.shift,
            "iterations": report.iterations,
            "gradient_norm": report.gradient_norm,
            "start": report.start,
            "bounds": report.bounds,
            "trace": [[k, v] for k, v in report.trace],
        }
    )
    return doc


def _sweep_point_row(task_args) -> dict:
    n_dim, a, b, tasks, seed = task_args
    row: dict[str, Any] = {"N": n_dim, "a": a, "b": b}
    try:
        params = make_params(n_dim, a, b)
    except DegenerateBoundary:
        row["region"] = "DegenerateBoundary"
        return row
    except InvalidParameters:
        row["region"] = "Invalid"
        return row
    report = classify(params)
    row["region"] = report.region.value
    if "region" in tasks:
        row["b_fs"] = report.b_fs
        row["b_fs_star"] = report.b_fs_star
        row["a_c_star"] = report.a_c_star
    if "spectrum" in tasks:
        for key, (i, j) in {
            "lambda_00": (0, 0),
            "lambda_01": (0, 1),
            "lambda_02": (0, 2),
            "lambda_10": (1, 0),
            "lambda_11": (1, 1),
        }.items():
            row[key] = spectrum.eigenvalue_closed(params, i, j).lam
    if "gap" in tasks:
        gap = spectrum.spectral_gap(params)
        row["lambda_star"] = gap.lambda_star
        row["gap_winner"] = f"{gap.winner[0]}{gap.winner[1]}"
        row["lambda_star_variant"] = gap.lambda_star_variant
    if "bounds" in tasks:
        bounds = energy.bounds_report(params)
        row["bound_two_bubble"] = bounds.bound_two_bubble
        row["bound_two_bubble_variant"] = bounds.bound_two_bubble_variant
        row["bound_gap"] = bounds.bound_gap
        row["effective_bound"] = bounds.effective_bound
    if "zhat" in tasks:
        z = energy.zhat(params)
        row["zhat"] = z.value
        row["zhat_variational"] = z.value_variational
        row["q_star"] = z.q_star
    if "minimize" in tasks:
        report_min = minimizer.estimate_cbe(params, starts=1, seed=seed)
        row["q_best"] = report_min.value
        row["q_iterations"] = report_min.iterations
        row["q_start"] = report_min.start
    return row


def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _validate_sweep_config(config: dict) -> None:
    a_spec = config.get("a_range")
    if not a_spec or int(a_spec.get("steps", 0)) < 1:
        raise InvalidParameters("a_range.steps >= 1 violated")
    if float(a_spec["min"]) > float(a_spec["max"]):
        raise InvalidParameters("a_range ordering violated")
    b_rule = config.get("b_rule", {})
    kind = b_rule.get("type", "absolute")
    if kind == "absolute":
        if int(b_rule.get("steps", 0)) < 1:
            raise InvalidParameters("b_rule.steps >= 1 violated")
        if float(b_rule["min"]) > float(b_rule["max"]):
            raise InvalidParameters("b_rule ordering violated")
    elif kind == "offset_fs":
        if not b_rule.get("offsets"):
            raise InvalidParameters("b_rule.offsets must be nonempty")
    else:
        raise InvalidParameters(f"unknown b_rule type {kind!r}")
    unknown = set(config.get("tasks", [])) - set(SWEEP_COLUMNS)
    if unknown:
        raise InvalidParameters(f"unknown sweep tasks: {sorted(unknown)}")
    output = config.get("output")
    if output and not os.access(os.path.dirname(os.path.abspath(output)), os.W_OK):
        raise InvalidParameters("output path not writable")


def _cmd_sweep(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    _validate_sweep_config(config)
    n_dim = int(config["N"])
    a_spec = config["a_range"]
    a_values = np.linspace(float(a_spec["min"]), float(a_spec["max"]), int(a_spec["steps"]))
    b_rule = config["b_rule"]
    tasks = list(config.get("tasks", ["region"]))
    seed = int(config.get("seed", 0))
    out_format = config.get("format", "csv").lower()
    output_path = config.get("output")

    points = []
    for a in a_values:
        if b_rule.get("type", "absolute") == "absolute":
            b_values = np.linspace(
                float(b_rule["min"]), float(b_rule["max"]), int(b_rule["steps"])
            )
        else:  # offsets relative to the Felli-Schneider curve
            try:
                base = felli_schneider(n_dim, float(a))
            except ParameterError:
                base = math.nan
            b_values = [base + float(off) for off in b_rule["offsets"]]
        for b in b_values:
            points.append((n_dim, float(a), float(b), tuple(tasks), seed + len(points)))

    workers = int(os.environ.get(WORKERS_ENV, "0")) or (os.cpu_count() or 1)
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point_row, points, chunksize=8))
    else:
        rows = [_sweep_point_row(pt) for pt in points]

    columns = ["N", "a", "b", "region"]
    for task in tasks:
        columns.extend(SWEEP_COLUMNS.get(task, []))

    if out_format == "json":
        payload = json.dumps(_jsonable({"columns": columns, "rows": rows}))
        if output_path:
            with open(output_path, "w", encoding="utf-8") as fh:
                fh.write(payload + "\n")
        else:
            print(payload)
        return 0

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in columns])
    text = buffer.getvalue()
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(json.dumps({"command": "sweep", "rows": len(rows), "output": output_path}))
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cknlab",
        description="Stability laboratory for the weighted Sobolev inequality on the cylinder",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def point_args(sp):
        sp.add_argument("N", type=int)
        sp.add_argument("a", type=float)
        sp.add_argument("b", type=float)

    point_args(sub.add_parser("region", help="validate a point and classify its region"))
    sp = sub.add_parser("spectrum", help="closed-form eigenvalues lambda_{i,j}")
    point_args(sp)
    sp.add_argument("--imax", type=int, default=2)
    sp.add_argument("--jmax", type=int, default=2)
    point_args(sub.add_parser("gap", help="spectral gap constant and candidates"))
    point_args(sub.add_parser("bounds", help="upper bounds on the quotient"))
    sp = sub.add_parser("energy", help="two-bubble and gap-perturbation quotients")
    point_args(sp)
    sp.add_argument("--s", type=float, default=10.0, help="bubble separation in 1/gamma units")
    sp.add_argument("--eps", type=float, default=0.01)
    point_args(sub.add_parser("zhat", help="quartic coefficient and sign analysis"))
    sp = sub.add_parser("minimize", help="multi-start quotient minimization")
    point_args(sp)
    sp.add_argument("--starts", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp = sub.add_parser("sweep", help="batch evaluation over an (a, b) grid")
    sp.add_argument("--config", required=True, help="JSON file mirroring the sweep schema")
    return parser


_COMMANDS = {
    "region": _cmd_region,
    "spectrum": _cmd_spectrum,
    "gap": _cmd_gap,
    "bounds": _cmd_bounds,
    "energy": _cmd_energy,
    "zhat": _cmd_zhat,
    "minimize": _cmd_minimize,
}


def run_command(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "sweep":
            return _cmd_sweep(args)
        _emit(_COMMANDS[args.subcommand](args))
        return 0
    except ParameterError as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__})
        return 2
    except (
        minimizer.NumericalFailure,
        minimizer.NoDescent,
        minimizer.OnManifold,
        ConvergenceFailure,
    ) as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__})
        return 3


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
