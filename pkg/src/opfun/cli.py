"""Command-line front end.

    opfun <command> --config <path> [--seed N] [--out DIR] [--strict-classes]

Commands: identities, derivative, taylor, ssf, classes, demo-schrodinger.
Configs are JSON with a strict schema (unknown keys are rejected); identical
config + seed produces byte-identical report files. Exit codes: 0 all checks
passed, 1 at least one hard assertion failed, 2 usage or config error.
OPFUN_THREADS caps suite parallelism (default 1; execution order of results
is deterministic regardless).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .derivatives import gateaux_derivative, taylor_report
from .fourier import class_membership, taylor_constants
from .functions import function_from_config, standard_catalog
from .identities import run_identity_suite
from .linalg import eigendecompose, operator_norm, random_hermitian, resolvent
from .matrixmarket import read_matrix, write_matrix
from .relbound import hypothesis_report
from .schrodinger import GridOperatorSpec, generate_schrodinger, schatten_table_sweep
from .ssf import spectral_shift_functions, trace_formula_check, weighted_norm_report

__all__ = ["main"]


class ConfigError(ValueError):
    pass


_COMMON_KEYS = {"command", "seed", "dims", "functions", "tolerances", "output", "operators"}
_COMMAND_KEYS = {
    "identities": {"num_seeds"},
    "derivative": {"orders", "t0", "num_seeds"},
    "taylor": {"n_max", "contraction", "stop_below", "function"},
    "ssf": {"k_max", "num_cases", "remainder_factorials", "export_grid_points",
            "weighted_norms"},
    "classes": {"memberships"},
    "demo-schrodinger": {"grid"},
}
_OUTPUT_KEYS = {"dir", "formats"}
_OPERATOR_KEYS = {"source", "h_path", "v_path", "scale"}
_GRID_KEYS = {"dimension", "grid_points", "box_half_width", "potential", "summability", "sweep"}
_POTENTIAL_KEYS = {"kind", "radius", "strength", "width", "depth", "samples"}


def _check_keys(obj: dict, allowed: set, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}")


def load_config(path: str, command: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    _check_keys(cfg, _COMMON_KEYS | _COMMAND_KEYS[command], path)
    if cfg.get("command", command) != command:
        raise ConfigError(f"{path}: config is for command {cfg['command']!r}, not {command!r}")
    if "output" in cfg:
        _check_keys(cfg["output"], _OUTPUT_KEYS, f"{path}: output")
    if "operators" in cfg:
        _check_keys(cfg["operators"], _OPERATOR_KEYS, f"{path}: operators")
    if "grid" in cfg:
        _check_keys(cfg["grid"], _GRID_KEYS, f"{path}: grid")
        if "potential" in cfg["grid"]:
            _check_keys(cfg["grid"]["potential"], _POTENTIAL_KEYS, f"{path}: grid.potential")
    return cfg


def _functions_from(cfg: dict):
    specs = cfg.get("functions")
    if specs is None:
        return list(standard_catalog())
    try:
        return [function_from_config(s) for s in specs]
    except ValueError as exc:
        raise ConfigError(f"functions: {exc}") from exc


def _operators_from(cfg: dict, rng, dim: int):
    ops = cfg.get("operators", {"source": "random"})
    source = ops.get("source", "random")
    if source == "random":
        scale = float(ops.get("scale", 1.0))
        return random_hermitian(rng, dim, scale), random_hermitian(rng, dim, scale)
    if source == "matrix-market":
        try:
            h = read_matrix(ops["h_path"])
            v = read_matrix(ops["v_path"])
        except KeyError as exc:
            raise ConfigError(f"operators: matrix-market source needs {exc}") from exc
        return h, v
    raise ConfigError(f"operators: unknown source {source!r}")


def _write_csv(path: Path, header: list, rows: list):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_csv_cell(c) for c in row])


def _csv_cell(c):
    if isinstance(c, float):
        return repr(c)
    if isinstance(c, (np.floating,)):
        return repr(float(c))
    return c


def _write_json(path: Path, payload):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _outdir(cfg: dict, args) -> Path:
    out = args.out or cfg.get("output", {}).get("dir", "opfun-out")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _thread_cap() -> int:
    raw = os.environ.get("OPFUN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _report_rows(reports):
    rows = []
    for r in reports:
        meta = r.metadata
        rows.append([
            r.identity_name, meta.get("seed", ""), meta.get("dim", ""),
            meta.get("variant", ""), meta.get("n", ""), meta.get("j", ""),
            meta.get("t", ""), meta.get("f", ""),
            float(r.lhs_norm), float(r.rhs_norm), float(r.residual_norm),
            float(r.relative_residual), float(r.tolerance), bool(r.passed),
        ])
    return rows


_IDENTITY_HEADER = [
    "identity", "seed", "dim", "variant", "n", "j", "t", "f",
    "lhs_norm", "rhs_norm", "residual_norm", "relative_residual", "tolerance", "pass",
]


def cmd_identities(cfg: dict, args, outdir: Path) -> int:
    seeds = list(range(int(cfg.get("num_seeds", 5))))
    if args.seed is not None:
        seeds = [args.seed + s for s in seeds]
    elif "seed" in cfg:
        seeds = [int(cfg["seed"]) + s for s in seeds]
    dims = [int(d) for d in cfg.get("dims", [1, 2, 3, 4, 6])]
    functions = _functions_from(cfg)
    tolerances = cfg.get("tolerances")
    workers = min(_thread_cap(), len(seeds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(
                lambda s: run_identity_suite([s], dims, functions, tolerances), seeds
            ))
        reports = [r for chunk in chunks for r in chunk]
    else:
        reports = run_identity_suite(seeds, dims, functions, tolerances)
    _write_csv(outdir / "identities.csv", _IDENTITY_HEADER, _report_rows(reports))
    failures = [r for r in reports if not r.passed]
    _write_json(outdir / "identities.json", {
        "checks": len(reports),
        "failures": len(failures),
        "worst_relative_residual": max((r.relative_residual for r in reports), default=0.0),
    })
    print(f"identities: {len(reports)} checks, {len(failures)} failures")
    return 1 if failures else 0


def cmd_derivative(cfg: dict, args, outdir: Path) -> int:
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    dims = [int(d) for d in cfg.get("dims", [2, 3, 4])]
    orders = [int(n) for n in cfg.get("orders", [1, 2, 3])]
    t0 = float(cfg.get("t0", 0.0))
    num_seeds = int(cfg.get("num_seeds", 3))
    functions = _functions_from(cfg)
    if args.strict_classes:
        rc = _enforce_classes(functions, max(orders))
        if rc:
            return rc
    rows, failures = [], 0
    for s in range(num_seeds):
        for dim in dims:
            rng = np.random.default_rng(np.random.SeedSequence([23, seed + s, dim]))
            h, v = _operators_from(cfg, rng, dim)
            for f in functions:
                for n in orders:
                    res = gateaux_derivative(f, h, v, n, t0, with_fd=True)
                    scale = max(1.0, operator_norm(res.value))
                    gap = operator_norm(res.value - res.fd_value)
                    tol = max(1e-6 * scale, 10.0 * res.fd_error)
                    ok = gap <= tol
                    failures += not ok
                    rows.append([seed + s, dim, f.descriptor(), n, t0,
                                 float(operator_norm(res.value)), float(gap),
                                 float(res.fd_error), float(tol), bool(ok)])
    _write_csv(outdir / "derivative.csv",
               ["seed", "dim", "f", "order", "t0", "norm", "fd_gap", "fd_error", "tol", "pass"],
               rows)
    print(f"derivative: {len(rows)} cases, {failures} failures")
    return 1 if failures else 0


def cmd_taylor(cfg: dict, args, outdir: Path) -> int:
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    dims = [int(d) for d in cfg.get("dims", [4])]
    n_max = int(cfg.get("n_max", 60))
    target_contraction = float(cfg.get("contraction", 0.5))
    stop_below = float(cfg.get("stop_below", 1e-9))
    fspec = cfg.get("function")
    f = function_from_config(fspec) if fspec else standard_catalog()[0]
    if args.strict_classes:
        rc = _enforce_classes([f], 1, taylor=True)
        if rc:
            return rc
    tc = taylor_constants(f)
    rows, failures = [], 0
    for dim in dims:
        rng = np.random.default_rng(np.random.SeedSequence([29, seed, dim]))
        h, v = _operators_from(cfg, rng, dim)
        r = operator_norm(v @ resolvent(eigendecompose(h), 1j))
        v = v * (target_contraction / (1.0 + tc.C_f) / r)
        reports = taylor_report(f, h, v, n_max, constants=tc, stop_below=stop_below)
        for rep in reports:
            ok = rep.within_bound() and rep.consistent()
            failures += not ok
            rows.append([dim, rep.order, float(rep.remainder_norm), float(rep.bound),
                         float(rep.contraction), float(rep.route_gap), bool(ok)])
        if reports[-1].remainder_norm >= stop_below * reports[-1].scale:
            failures += 1
    _write_csv(outdir / "taylor.csv",
               ["dim", "n", "remainder_norm", "bound", "contraction", "route_gap", "pass"],
               rows)
    print(f"taylor: {len(rows)} orders, {failures} failures")
    return 1 if failures else 0


def cmd_ssf(cfg: dict, args, outdir: Path) -> int:
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    dims = [int(d) for d in cfg.get("dims", [5])]
    k_max = int(cfg.get("k_max", 3))
    num_cases = int(cfg.get("num_cases", 3))
    with_fact = bool(cfg.get("remainder_factorials", True))
    grid_points = int(cfg.get("export_grid_points", 201))
    functions = _functions_from(cfg)
    rows, failures = [], 0
    for case in range(num_cases):
        for dim in dims:
            rng = np.random.default_rng(np.random.SeedSequence([31, seed + case, dim]))
            h, v = _operators_from(cfg, rng, dim)
            etas = spectral_shift_functions(h, v, k_max)
            xi_gap = abs(etas[0].total_integral() - float(np.trace(v).real))
            if xi_gap > 1e-10 * max(1.0, abs(np.trace(v))):
                failures += 1
            for k in range(1, k_max + 1):
                for f in functions:
                    if f.max_deriv_order is not None and f.max_deriv_order < k:
                        continue
                    rep = trace_formula_check(f, h, v, k, etas[k - 1],
                                              with_factorials=with_fact,
                                              tolerance=1e-9 if k == 1 else 1e-7)
                    failures += not rep.passed
                    rows.append([seed + case, dim, k, f.descriptor(),
                                 float(rep.lhs_norm), float(rep.rhs_norm),
                                 float(rep.residual_norm), float(rep.relative_residual),
                                 bool(rep.passed)])
            if case == 0 and dim == dims[0]:
                lo, hi = etas[0].support_hull
                margin = 0.05 * (hi - lo + 1.0)
                grid = np.linspace(lo - margin, hi + margin, grid_points)
                for eta in etas:
                    _write_json(outdir / f"eta_{eta.order}.json", {
                        "order": eta.order,
                        "support_hull": list(eta.support_hull),
                        "imag_residue": eta.imag_residue,
                        "density": eta.density.to_dict(),
                    })
                    _write_csv(outdir / f"eta_{eta.order}.csv", ["lambda", "eta"],
                               [[float(x), float(val)] for x, val in zip(grid, eta(grid))])
            for spec_row in cfg.get("weighted_norms", []):
                rep = weighted_norm_report(
                    etas[int(spec_row.get("k", 1)) - 1],
                    n=int(spec_row.get("n", 2)),
                    k=int(spec_row.get("k", 1)),
                    eps=float(spec_row.get("eps", 1.0)),
                )
                rows.append([seed + case, dim, f"weighted-norm-k{spec_row.get('k', 1)}",
                             f"exp={rep['exponent']}", rep["value"], "", "", "", True])
    _write_csv(outdir / "ssf_trace_formulas.csv",
               ["seed", "dim", "k", "f", "lhs", "rhs", "residual", "relative_residual", "pass"],
               rows)
    print(f"ssf: {len(rows)} rows, {failures} failures")
    return 1 if failures else 0


def cmd_classes(cfg: dict, args, outdir: Path) -> int:
    functions = _functions_from(cfg)
    memberships = cfg.get("memberships", [
        {"name": "W_n", "n": 4, "k": 0},
        {"name": "Q^k_n", "n": 2, "k": 1},
        {"name": "TaylorClass", "n": 6, "k": 0},
    ])
    rows = []
    for f in functions:
        for m in memberships:
            rep = class_membership(f, m["name"], int(m.get("n", 2)), int(m.get("k", 0)))
            rows.append([f.descriptor(), rep.class_name, rep.n, rep.k, rep.verdict,
                         "; ".join(f"{c}={s}:{v:.6g}" for c, s, v in rep.witnesses)])
    _write_csv(outdir / "classes.csv",
               ["f", "class", "n", "k", "verdict", "witnesses"], rows)
    print(f"classes: {len(rows)} memberships")
    return 0


def cmd_demo_schrodinger(cfg: dict, args, outdir: Path) -> int:
    grid = cfg.get("grid", {})
    pot = grid.get("potential", {"kind": "gaussian-well", "width": 2.0, "depth": 1.0})
    kind = pot.get("kind", "gaussian-well")
    if kind == "truncated-coulomb":
        potential = (kind, float(pot.get("radius", 4.0)), float(pot.get("strength", 1.0)))
    elif kind == "gaussian-well":
        potential = (kind, float(pot.get("width", 2.0)), float(pot.get("depth", 1.0)))
    else:
        potential = ("samples", pot.get("samples", []))
    spec = GridOperatorSpec(
        dimension=int(grid.get("dimension", 1)),
        grid_points=int(grid.get("grid_points", 32)),
        box_half_width=float(grid.get("box_half_width", 10.0)),
        potential=potential,
        summability=int(grid.get("summability", 4)),
    )
    h, v, diag = generate_schrodinger(spec)
    write_matrix(outdir / "schrodinger_h.mtx", h)
    write_matrix(outdir / "schrodinger_v.mtx", v)
    _write_json(outdir / "hypothesis.json", {
        "n": diag.n,
        "alpha": diag.alpha,
        "certificate": {"a": diag.certificate.a, "b": diag.certificate.b},
        "schatten_table": [[p, order, val] for p, order, val in diag.schatten_table],
        "shift_rows": list(diag.shift_rows),
    })
    sweep = grid.get("sweep")
    if sweep:
        rows = schatten_table_sweep(spec, [int(g) for g in sweep])
        _write_csv(outdir / "schatten_sweep.csv",
                   ["grid_points", "p", "schatten_order", "value"],
                   [[r["grid_points"], r["p"], float(r["schatten_order"]), float(r["value"])]
                    for r in rows])
    print(f"demo-schrodinger: dim {spec.total_dim}, alpha {diag.alpha:.6g}")
    return 0


def _enforce_classes(functions, n: int, taylor: bool = False) -> int:
    for f in functions:
        name = "TaylorClass" if taylor else "W_n"
        rep = class_membership(f, name, n)
        if rep.verdict == "fails":
            print(f"class check failed: {f.descriptor()} not in {name} (n={n})",
                  file=sys.stderr)
            return 1
        if rep.verdict == "numeric-only":
            print(f"note: {f.descriptor()} in {name} only numerically", file=sys.stderr)
    return 0


_COMMANDS = {
    "identities": cmd_identities,
    "derivative": cmd_derivative,
    "taylor": cmd_taylor,
    "ssf": cmd_ssf,
    "classes": cmd_classes,
    "demo-schrodinger": cmd_demo_schrodinger,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="opfun",
        description="Operator-function calculus suites on finite Hermitian matrices.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=False, help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--strict-classes", action="store_true",
                        help="fail instead of warn when a function class check fails")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args.config, args.command) if args.config else {"command": args.command}
        outdir = _outdir(cfg, args)
        return _COMMANDS[args.command](cfg, args, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
