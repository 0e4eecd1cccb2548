"""Command-line front end.

Subcommands::

    wbl validate  <config>
    wbl laplace   <config> --u <matrix> --t <time>
    wbl density   <config> --y <matrix> --t <time>
    wbl transform <config> --kind {drift|quadratic|hw|joint}
                  [--v <matrix>] [--lambda L] --x <matrix> --y <matrix> --t <time>
    wbl simulate  <config> --t <time> --steps K --paths N [--dump-paths]
    wbl verify    <config> --suite {martingale|drift|index|joint|density|all}
    wbl grid      <config> --kind {quadratic|hw|joint} --v-scales LO:HI:K
                  --lambdas LO:HI:K --y <matrix> --t <time> --csv <file>

Matrices on the command line are semicolon-separated rows ("1,0;0,1").
Numeric results are printed to stdout as JSON; ``--csv <dir>`` additionally
writes CSV.  The environment variable ``WBL_SEED`` overrides the config
seed.  Exit codes: 0 success, 1 validation error, 2 verification failure,
3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import linalg
from .bridges import (
    BridgeQuery,
    bridge_lt_drift,
    bridge_lt_hartman_watson,
    bridge_lt_joint,
    bridge_lt_quadratic,
)
from .distribution import laplace as laplace_transform
from .distribution import density as density_fn
from .errors import DomainError, WblError
from .harness import SUITES, Experiment, run_experiment, write_report
from .model import WishartParams, endpoint_spec, validate
from .sim import SimConfig, simulate_path, simulate_terminal_batch

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_VERIFICATION = 2
EXIT_NUMERICAL = 3

_CONFIG_KEYS = {"params", "seed", "output_dir", "variant", "experiments"}
_PARAMS_KEYS = {"n", "alpha", "a", "b", "x0"}
_EXPERIMENT_KEYS = {
    "name",
    "kind",
    "t",
    "paths",
    "steps",
    "seed",
    "variant",
    "params",
    "grid",
}
_GRID_KEYS = {"u", "w", "nu", "v", "lam", "g", "y", "form", "expect"}


def parse_matrix_literal(text: str, name: str = "matrix") -> np.ndarray:
    """Parse semicolon-separated rows, e.g. ``1,0;0,1``."""
    rows = []
    for i, row in enumerate(text.split(";")):
        entries = []
        for j, cell in enumerate(row.split(",")):
            try:
                entries.append(float(cell))
            except ValueError:
                raise DomainError(
                    f"malformed {name} literal at row {i + 1}, entry {j + 1}: {cell!r}"
                ) from None
        rows.append(entries)
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise DomainError(f"{name} literal has ragged rows (lengths {sorted(lengths)})")
    return np.asarray(rows)


def _reject_unknown(block: dict, allowed: set, where: str) -> None:
    unknown = set(block) - allowed
    if unknown:
        raise DomainError(f"unknown keys in {where}: {sorted(unknown)}")


def parse_params_block(block: dict, where: str = "params") -> WishartParams:
    """Single parse path for parameter blocks (used by every subcommand)."""
    _reject_unknown(block, _PARAMS_KEYS, where)
    missing = _PARAMS_KEYS - set(block)
    if missing:
        raise DomainError(f"missing keys in {where}: {sorted(missing)}")
    return WishartParams(
        n=int(block["n"]),
        alpha=float(block["alpha"]),
        a=np.asarray(block["a"], dtype=float),
        b=np.asarray(block["b"], dtype=float),
        x0=np.asarray(block["x0"], dtype=float),
    )


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise DomainError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"config is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DomainError("config root must be a JSON object")
    _reject_unknown(doc, _CONFIG_KEYS, "config")
    if "params" not in doc:
        raise DomainError("config must contain a 'params' block")
    for i, block in enumerate(doc.get("experiments", [])):
        _reject_unknown(block, _EXPERIMENT_KEYS, f"experiments[{i}]")
        for j, point in enumerate(block.get("grid", [])):
            _reject_unknown(point, _GRID_KEYS, f"experiments[{i}].grid[{j}]")
    if "WBL_SEED" in os.environ:
        doc["seed"] = int(os.environ["WBL_SEED"])
    return doc


def _config_seed(doc: dict) -> int:
    return int(doc.get("seed", 0))


def _grid_point_from_json(point: dict) -> dict:
    out = {}
    for key, val in point.items():
        if key in ("u", "w", "v", "y") and val is not None:
            out[key] = np.asarray(val, dtype=float)
        else:
            out[key] = val
    return out


def experiments_from_config(doc: dict, suite: str, workers: int) -> list[Experiment]:
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}")
    kinds = SUITES[suite]
    top_params = parse_params_block(doc["params"])
    seed = _config_seed(doc)
    exps = []
    for i, block in enumerate(doc.get("experiments", [])):
        if block.get("kind") not in kinds:
            continue
        params = (
            parse_params_block(block["params"], f"experiments[{i}].params")
            if "params" in block
            else top_params
        )
        exps.append(
            Experiment(
                name=block.get("name", f"experiment_{i}"),
                kind=block["kind"],
                params=params,
                t=float(block.get("t", 1.0)),
                grid=tuple(_grid_point_from_json(p) for p in block.get("grid", [])),
                paths=int(block.get("paths", 10_000)),
                steps=int(block.get("steps", 400)),
                base_seed=int(block.get("seed", seed + i)),
                variant=block.get("variant", doc.get("variant", "derived")),
                workers=workers,
            )
        )
    return exps


def _emit(obj, csv_dir=None, csv_name=None, csv_text=None) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))
    if csv_dir and csv_text is not None:
        os.makedirs(csv_dir, exist_ok=True)
        with open(os.path.join(csv_dir, csv_name), "w") as fh:
            fh.write(csv_text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_validate(args) -> int:
    doc = load_config(args.config)
    params = parse_params_block(doc["params"])
    problems = validate(params)
    _emit({"valid": not problems, "problems": problems})
    return EXIT_OK if not problems else EXIT_VALIDATION


def _require_valid(doc: dict) -> WishartParams:
    params = parse_params_block(doc["params"])
    problems = validate(params)
    if problems:
        raise DomainError("invalid parameters: " + "; ".join(problems))
    return params


def _cmd_laplace(args) -> int:
    doc = load_config(args.config)
    params = _require_valid(doc)
    u = parse_matrix_literal(args.u, "u")
    value = laplace_transform(endpoint_spec(params, args.t), u, args.variant)
    _emit(
        {"value": value, "t": args.t, "variant": args.variant},
        args.csv,
        "laplace.csv",
        f"t,variant,value\n{args.t},{args.variant},{value!r}\n",
    )
    return EXIT_OK


def _cmd_density(args) -> int:
    doc = load_config(args.config)
    params = _require_valid(doc)
    y = parse_matrix_literal(args.y, "y")
    value = density_fn(endpoint_spec(params, args.t), y)
    _emit(
        {"value": value, "t": args.t},
        args.csv,
        "density.csv",
        f"t,value\n{args.t},{value!r}\n",
    )
    return EXIT_OK


def _cmd_transform(args) -> int:
    doc = load_config(args.config)
    params = _require_valid(doc)
    x = parse_matrix_literal(args.x, "x") if args.x else np.asarray(params.x0)
    y = parse_matrix_literal(args.y, "y")
    query = BridgeQuery(params=params, x=x, y=y, t=args.t)
    v = parse_matrix_literal(args.v, "v") if args.v else np.zeros((params.n, params.n))
    lam = args.lam
    if args.kind == "drift":
        value = bridge_lt_drift(query, v, args.variant)
    elif args.kind == "quadratic":
        value = bridge_lt_quadratic(query, v, args.variant)
    elif args.kind == "hw":
        value = bridge_lt_hartman_watson(query, lam, args.variant)
    else:
        value = bridge_lt_joint(query, v, lam, args.variant)
    _emit(
        {"value": value, "kind": args.kind, "lambda": lam, "t": args.t},
        args.csv,
        "transform.csv",
        f"kind,lambda,t,value\n{args.kind},{lam},{args.t},{value!r}\n",
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    doc = load_config(args.config)
    params = _require_valid(doc)
    seed = args.seed if args.seed is not None else _config_seed(doc)
    batch = simulate_terminal_batch(params, args.t, args.steps, seed, 0, args.paths)
    summary = {
        "paths": args.paths,
        "steps": args.steps,
        "seed": seed,
        "t": args.t,
        "mean_x_t": batch.x_t.mean(axis=0).tolist(),
        "mean_int_x": batch.int_x.mean(axis=0).tolist(),
        "mean_int_tr_inv_unfloored": (
            float(batch.int_tr_inv[~batch.floored].mean())
            if (~batch.floored).any()
            else None
        ),
        "projection_fraction": float((batch.projections > 0).mean()),
        "floored_fraction": float(batch.floored.mean()),
        "min_eig_seen": float(batch.min_eig.min()),
    }
    dumped = []
    if args.dump_paths:
        out_dir = args.csv or doc.get("output_dir", "reports")
        os.makedirs(out_dir, exist_ok=True)
        for i in range(min(args.paths, args.dump_limit)):
            cfg = SimConfig(steps=args.steps, seed=seed, store_increments=False)
            from .sim import path_rng

            path = simulate_path(params, args.t, cfg, rng=path_rng(seed, i))
            fname = os.path.join(out_dir, f"path.{seed}.{i}.csv")
            with open(fname, "w") as fh:
                entries = ",".join(
                    f"x{r}{c}" for r in range(params.n) for c in range(params.n)
                )
                fh.write(f"step,time,{entries},min_eig\n")
                for k, (tk, state) in enumerate(zip(path.times, path.states)):
                    w = np.linalg.eigvalsh(state)
                    flat = ",".join(repr(float(v)) for v in state.ravel())
                    fh.write(f"{k},{float(tk)!r},{flat},{float(w[0])!r}\n")
            dumped.append(fname)
    summary["dumped_paths"] = dumped
    _emit(summary)
    return EXIT_OK


def _cmd_verify(args) -> int:
    doc = load_config(args.config)
    _require_valid(doc)
    workers = args.workers if args.workers else (os.cpu_count() or 1)
    exps = experiments_from_config(doc, args.suite, workers)
    if not exps:
        raise DomainError(f"config defines no experiments for suite {args.suite!r}")
    out_dir = args.out or doc.get("output_dir", "reports")
    all_passed = True
    summary = []
    for exp in exps:
        report = run_experiment(exp)
        paths = write_report(report, out_dir)
        all_passed &= report.passed()
        summary.append(
            {
                "name": report.name,
                "kind": report.kind,
                "passed": report.passed(),
                "records": len(report.records),
                "max_abs_z": max(
                    (abs(r["z"]) for r in report.records if np.isfinite(r["z"])),
                    default=0.0,
                ),
                "report": paths["json"],
            }
        )
    _emit({"suite": args.suite, "passed": all_passed, "experiments": summary})
    return EXIT_OK if all_passed else EXIT_VERIFICATION


def _parse_range(text: str, name: str) -> np.ndarray:
    try:
        lo, hi, count = text.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    except ValueError:
        raise DomainError(f"malformed {name} range {text!r}; expected LO:HI:COUNT") from None


def _cmd_grid(args) -> int:
    from .errors import ConvergenceError

    doc = load_config(args.config)
    params = _require_valid(doc)
    y = parse_matrix_literal(args.y, "y")
    x = parse_matrix_literal(args.x, "x") if args.x else np.asarray(params.x0)
    query = BridgeQuery(params=params, x=x, y=y, t=args.t)
    v_scales = _parse_range(args.v_scales, "--v-scales")
    lambdas = _parse_range(args.lambdas, "--lambdas")
    eye = np.eye(params.n)
    rows = []
    for vs in v_scales:
        for lam in lambdas:
            diag = ""
            try:
                if args.kind == "quadratic":
                    value = repr(bridge_lt_quadratic(query, vs * eye, args.variant))
                elif args.kind == "hw":
                    value = repr(bridge_lt_hartman_watson(query, lam, args.variant))
                else:
                    value = repr(bridge_lt_joint(query, vs * eye, lam, args.variant))
            except ConvergenceError as exc:
                value, diag = "nan", f"series not converged (estimate {exc.estimate:.2e})"
            rows.append((vs, lam, value, diag))
    csv_text = "v_scale,lambda,value,diagnostics\n" + "".join(
        f"{float(vs)!r},{float(lam)!r},{val},{diag}\n" for vs, lam, val, diag in rows
    )
    if args.csv_file:
        with open(args.csv_file, "w") as fh:
            fh.write(csv_text)
    _emit(
        {
            "kind": args.kind,
            "rows": len(rows),
            "csv": args.csv_file or None,
            "values": [
                {
                    "v_scale": float(vs),
                    "lambda": float(lam),
                    "value": val,
                    "diagnostics": diag,
                }
                for vs, lam, val, diag in rows
            ],
        }
    )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wbl",
        description="Wishart process and Wishart bridge laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("config", help="JSON config document")
        return p

    add("validate", _cmd_validate, help="check a parameter config")

    p = add("laplace", _cmd_laplace, help="endpoint Laplace transform")
    p.add_argument("--u", required=True, help="matrix literal, rows ';'-separated")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--variant", default="derived", choices=("derived", "printed"))
    p.add_argument("--csv", help="directory for CSV output")

    p = add("density", _cmd_density, help="endpoint transition density")
    p.add_argument("--y", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--csv", help="directory for CSV output")

    p = add("transform", _cmd_transform, help="bridge Laplace transforms")
    p.add_argument("--kind", required=True, choices=("drift", "quadratic", "hw", "joint"))
    p.add_argument("--v", help="matrix literal (drift shift or quadratic target)")
    p.add_argument("--lambda", dest="lam", type=float, default=0.0)
    p.add_argument("--x", help="bridge start (defaults to config x0)")
    p.add_argument("--y", required=True, help="bridge end")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--variant", default="derived", choices=("derived", "printed"))
    p.add_argument("--csv", help="directory for CSV output")

    p = add("simulate", _cmd_simulate, help="simulate paths, print summary stats")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--dump-paths", action="store_true")
    p.add_argument("--dump-limit", type=int, default=10)
    p.add_argument("--csv", help="directory for path dumps")

    p = add("verify", _cmd_verify, help="run verification experiments")
    p.add_argument("--suite", default="all", choices=sorted(SUITES))
    p.add_argument("--workers", type=int, default=0, help="0 = all cores")
    p.add_argument("--out", help="report directory (overrides config output_dir)")

    p = add("grid", _cmd_grid, help="tabulate a transform over (v, lambda)")
    p.add_argument("--kind", required=True, choices=("quadratic", "hw", "joint"))
    p.add_argument("--v-scales", required=True, help="LO:HI:COUNT")
    p.add_argument("--lambdas", required=True, help="LO:HI:COUNT")
    p.add_argument("--x")
    p.add_argument("--y", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--variant", default="derived", choices=("derived", "printed"))
    p.add_argument("--csv", dest="csv_file", help="CSV output file")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except DomainError as exc:
        print(json.dumps({"error": str(exc), "kind": "validation"}), file=sys.stderr)
        return EXIT_VALIDATION
    except WblError as exc:
        print(json.dumps({"error": str(exc), "kind": "numerical"}), file=sys.stderr)
        return EXIT_NUMERICAL
    except (np.linalg.LinAlgError, FloatingPointError, OverflowError) as exc:
        print(json.dumps({"error": str(exc), "kind": "numerical"}), file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
