"""Experiment runner: named sweeps reproducing the study's figures.

Each experiment sweeps one parameter over a grid, computing analytic
values for both deployment scenarios and, when drops are requested,
simulation estimates with confidence intervals.  Output is one CSV per
run plus a JSON manifest carrying the resolved config, seed, versions,
and timing.  Exit codes: 0 ok, 1 config error, 2 numeric failure,
3 io error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .analysis import coverage_scenario1, coverage_scenario2
from .energy import energy_efficiency
from .geometry import ClusterPairGeometry, mean_rmm
from .montecarlo import simulate_coverage, simulate_energy
from .params import (ConfigError, NumericsConfig, ParamError, SystemParams,
                     load_config, save_config, validate)
from .quadrature import QuadratureError
from .travel import cdf_l, sample_l_oracle
from .empirical import EmpiricalDistribution

CSV_HEADER = ("swept_value,analytic_s1,analytic_s2,"
              "sim_s1,sim_s1_ci,sim_s2,sim_s2_ci")

EXPERIMENTS = {
    "fig3_travel_cdf": "travel-distance CDF, tabulated law vs sampled pads",
    "fig4_cov_vs_lambda_c": "coverage of both scenarios vs charging-pad density",
    "fig5_cov_vs_lambda_u": "coverage of both scenarios vs cluster-pair density",
    "fig6_ee_vs_lambda_c": "energy efficiency of both scenarios vs pad density",
    "fig7_ee_vs_lambda_u": "energy efficiency of both scenarios vs pair density",
    "custom_sweep": "user-chosen SystemParams key over a user-chosen grid",
}

_SWEPT_KEYS = {
    "fig3_travel_cdf": "l",
    "fig4_cov_vs_lambda_c": "lambda_c",
    "fig5_cov_vs_lambda_u": "lambda_user",
    "fig6_ee_vs_lambda_c": "lambda_c",
    "fig7_ee_vs_lambda_u": "lambda_user",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One named sweep: which key, over which grid, with which overrides."""

    name: str
    swept_key: str
    grid: tuple
    fixed: dict
    n_drops: int
    out_dir: str

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ParamError(f"unknown experiment {self.name!r}")
        if len(self.grid) == 0:
            raise ParamError("grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ParamError("grid must be strictly increasing")
        if (self.swept_key != "l"
                and self.swept_key not in {f.name for f in fields(SystemParams)}):
            raise ParamError(f"swept key {self.swept_key!r} is not a "
                             "SystemParams field")


def _default_grid(name: str, params: SystemParams):
    if name in ("fig4_cov_vs_lambda_c", "fig6_ee_vs_lambda_c"):
        return tuple(np.geomspace(1e-6, 1e-3, 10))
    if name == "fig5_cov_vs_lambda_u":
        return tuple(np.geomspace(1e-6, 1e-4, 10))
    if name == "fig7_ee_vs_lambda_u":
        return tuple(np.geomspace(1e-6, 3e-4, 10))
    if name == "fig3_travel_cdf":
        r_star = mean_rmm(params.lambda_c, params.d_nm)
        geom = ClusterPairGeometry(r_star, math.pi / 2, params.d_nm)
        return tuple(np.linspace(0.0, 2.0 * geom.r_mn, 41))
    raise ParamError(f"experiment {name!r} needs an explicit grid")


def _figure_overrides(name: str) -> dict:
    # figure conditioning shared by the coverage/energy sweeps
    if name in ("fig4_cov_vs_lambda_c", "fig6_ee_vs_lambda_c"):
        return {"lambda_t": 1e-6, "lambda_user": 1e-5, "d_nm": 300.0}
    if name in ("fig5_cov_vs_lambda_u", "fig7_ee_vs_lambda_u"):
        return {"lambda_t": 1e-6, "lambda_c": 1e-4, "d_nm": 300.0}
    return {}


def list_experiments() -> str:
    width = max(len(k) for k in EXPERIMENTS)
    lines = [f"{k.ljust(width)}  {v}" for k, v in sorted(EXPERIMENTS.items())]
    return "\n".join(lines)


def _rows_fig3(spec, params, numerics, rng):
    r_star = mean_rmm(params.lambda_c, params.d_nm)
    geom = ClusterPairGeometry(r_star, math.pi / 2, params.d_nm)
    emp = (sample_l_oracle(geom, params.lambda_c, spec.n_drops, rng)
           if spec.n_drops > 0 else None)
    rows = []
    for l in spec.grid:
        ana = cdf_l(float(l), geom, params.lambda_c)
        sim = "" if emp is None else repr(float(emp.cdf(l)))
        ci = "" if emp is None else repr(1.0 / math.sqrt(emp.n))
        rows.append(f"{float(l)!r},{ana!r},,{sim},{ci},,")
    return rows


def _rows_coverage(spec, params, numerics, rng):
    rows = []
    for value in spec.grid:
        point = validate(replace(params, **{spec.swept_key: float(value)}))
        a1 = coverage_scenario1(point, numerics).p_total
        a2 = coverage_scenario2(point, numerics).p_total
        if spec.n_drops > 0:
            s1 = simulate_coverage("s1", point, numerics, spec.n_drops,
                                   rng.spawn(1)[0])
            s2 = simulate_coverage("s2", point, numerics, spec.n_drops,
                                   rng.spawn(1)[0])
            sim = (f"{s1.p_total!r},{s1.ci_half_width!r},"
                   f"{s2.p_total!r},{s2.ci_half_width!r}")
        else:
            sim = ",,,"
        rows.append(f"{float(value)!r},{a1!r},{a2!r},{sim}")
    return rows


def _rows_energy(spec, params, numerics, rng):
    rows = []
    for value in spec.grid:
        point = validate(replace(params, **{spec.swept_key: float(value)}))
        e1 = energy_efficiency("s1", point, numerics).ee
        e2 = energy_efficiency("s2", point, numerics).ee
        if spec.n_drops > 0:
            r1 = simulate_energy("s1", point, numerics, spec.n_drops,
                                 rng.spawn(1)[0])
            r2 = simulate_energy("s2", point, numerics, spec.n_drops,
                                 rng.spawn(1)[0])
            half1 = e1 * r1.coverage.ci_half_width / max(r1.coverage.p_total, 1e-12)
            half2 = e2 * r2.coverage.ci_half_width / max(r2.coverage.p_total, 1e-12)
            sim = f"{r1.ee!r},{half1!r},{r2.ee!r},{half2!r}"
        else:
            sim = ",,,"
        rows.append(f"{float(value)!r},{e1!r},{e2!r},{sim}")
    return rows


def run(spec: ExperimentSpec, params: SystemParams,
        numerics: NumericsConfig) -> dict:
    """Execute one experiment; returns the manifest dictionary.

    The CSV is written incrementally; on failure the partial file is
    preserved under a ``_partial`` suffix.
    """
    import os

    os.makedirs(spec.out_dir, exist_ok=True)
    params = validate(replace(params, **spec.fixed))
    rng = np.random.default_rng(numerics.master_seed)
    csv_path = os.path.join(spec.out_dir, f"{spec.name}.csv")
    partial_path = csv_path.replace(".csv", "_partial.csv")

    start = time.time()
    row_fn = {"fig3_travel_cdf": _rows_fig3,
              "fig4_cov_vs_lambda_c": _rows_coverage,
              "fig5_cov_vs_lambda_u": _rows_coverage,
              "fig6_ee_vs_lambda_c": _rows_energy,
              "fig7_ee_vs_lambda_u": _rows_energy}.get(spec.name, _rows_coverage)
    try:
        rows = row_fn(spec, params, numerics, rng)
    except Exception:
        with open(partial_path, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
        raise
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write("\n".join(rows) + "\n")

    config_path = os.path.join(spec.out_dir, f"{spec.name}_config.txt")
    save_config(config_path, params, numerics=numerics)
    with open(config_path, "rb") as fh:
        config_hash = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "experiment": spec.name,
        "swept_key": spec.swept_key,
        "grid": [float(v) for v in spec.grid],
        "n_drops": spec.n_drops,
        "master_seed": numerics.master_seed,
        "config_file": config_path,
        "config_sha256": config_hash,
        "csv": csv_path,
        "versions": {"padnet": __version__, "numpy": np.__version__,
                     "python": sys.version.split()[0]},
        "wall_time_s": time.time() - start,
    }
    manifest_path = os.path.join(spec.out_dir, f"{spec.name}_manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="padnet",
        description="charging-pad UAV network experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a named experiment")
    runp.add_argument("--config", default=None, help="config file path")
    runp.add_argument("--experiment", required=True, choices=sorted(EXPERIMENTS))
    runp.add_argument("--drops", type=int, default=10_000,
                      help="simulation drops per grid point (0 = analytic only)")
    runp.add_argument("--seed", type=int, default=None,
                      help="override the master seed")
    runp.add_argument("--out", default="runs", help="output directory")
    runp.add_argument("--sweep-key", default=None,
                      help="SystemParams field for custom_sweep")
    runp.add_argument("--grid", default=None,
                      help="comma-separated grid values for custom_sweep")
    sub.add_parser("list", help="list available experiments")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list":
        print(list_experiments())
        return 0

    try:
        if args.config is not None:
            params, _, numerics = load_config(args.config)
        else:
            params, numerics = SystemParams(), NumericsConfig()
        if args.seed is not None:
            numerics = replace(numerics, master_seed=args.seed)
        if args.experiment == "custom_sweep":
            if not args.sweep_key or not args.grid:
                raise ParamError("custom_sweep needs --sweep-key and --grid")
            grid = tuple(float(v) for v in args.grid.split(","))
            swept = args.sweep_key
        else:
            swept = _SWEPT_KEYS[args.experiment]
            grid = _default_grid(args.experiment, params)
        spec = ExperimentSpec(name=args.experiment, swept_key=swept,
                              grid=grid, fixed=_figure_overrides(args.experiment),
                              n_drops=args.drops, out_dir=args.out)
    except (ConfigError, ParamError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        manifest = run(spec, params, numerics)
    except (QuadratureError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
