"""Command-line front end: single runs, sweeps, bound tables, scripted traces.

Subcommands: run | sweep | bounds | trace.  All outputs are plain CSV/JSON
(plus an optional gnuplot script next to curve data); reals are serialized
with 9 significant digits so determinism checks are meaningful.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    BoundInputs,
    check_c_condition,
    comp_frequency_bound,
    egreedy_comp_bound,
    egreedy_regret_bound,
    min_pairwise_gap,
    summarize,
    thompson_comp_bound,
    thompson_regret_bound,
    ucb_comp_bound,
    ucb_regret_bound,
)
from .core import BanditError, BanditInstance, DriftModel, NoiseModel
from .experiment import ExperimentConfig, ExperimentError, run_experiment
from .mechanism import MechanismOptions, run, trajectory_rows, write_trajectory_csv, TRAJECTORY_COLUMNS
from .policies import POLICY_NAMES, PolicyKind
from .rng import ScriptedRng, ScriptExhaustedError

DEFAULT_MEANS = "0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1"

SUMMARY_COLUMNS = ("policy", "l", "T", "seed", "regret", "compensation",
                   "comp_rounds", "arm1_rel_error")
SWEEP_COLUMNS = ("policy", "l", "regret_mean", "regret_std", "comp_mean",
                 "comp_std", "comp_rounds_mean", "arm1_err_mean")
CURVE_COLUMNS = ("policy", "l", "t", "cum_regret_mean", "cum_compensation_mean")


@dataclass
class OutputBundle:
    """Where one command put its files."""

    manifest: Path
    summary_csv: Path | None = None
    trajectory_csv: Path | None = None
    bounds_txt: Path | None = None
    curves_csv: Path | None = None


def _fmt(x: float) -> str:
    return format(x, ".9g")


def _parse_means(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"could not parse means list {text!r}")


def _write_manifest(bundle: OutputBundle, command: str, seed: int, config: dict) -> None:
    outputs = {
        name: path.name
        for name, path in (("summary_csv", bundle.summary_csv),
                           ("trajectory_csv", bundle.trajectory_csv),
                           ("bounds_txt", bundle.bounds_txt),
                           ("curves_csv", bundle.curves_csv))
        if path is not None
    }
    body = {
        "command": command,
        "package": "driftbandit",
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": seed,
        "config": config,
        "outputs": outputs,
    }
    with open(bundle.manifest, "w") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _build_env(args) -> BanditInstance:
    return BanditInstance(_parse_means(args.means), NoiseModel(args.noise, args.sigma))


def _build_drift(args) -> DriftModel:
    cap = getattr(args, "cap", None)
    return DriftModel(args.drift, lipschitz=args.l, cap=cap)


def _build_policy(args) -> PolicyKind:
    return PolicyKind(args.policy, args.c if args.policy == "egreedy" else None)


def _project_option(args) -> bool | None:
    return {"auto": None, "on": True, "off": False}[args.project]


def _gnuplot_script(path: Path, data_file: str, xcol: int, ycols: dict) -> None:
    lines = ["set datafile separator ','", "set key autotitle columnhead", "set xlabel 't'"]
    plots = ", ".join(f"'{data_file}' using {xcol}:{c} with lines title '{t}'"
                      for t, c in ycols.items())
    lines.append("plot " + plots)
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- run

def _cmd_run(args, parser) -> int:
    try:
        instance = _build_env(args)
        drift = _build_drift(args)
        policy = _build_policy(args)
    except ValueError as exc:
        parser.error(str(exc))
    if args.T < instance.k:
        parser.error(f"--T {args.T} is shorter than the warm start over {instance.k} arms")
    options = MechanismOptions(project_feedback=_project_option(args))
    traj = run(instance, policy, drift, options, args.T, args.seed)
    metrics = summarize(traj, instance)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = OutputBundle(manifest=out_dir / "manifest.json",
                          summary_csv=out_dir / "summary.csv",
                          trajectory_csv=out_dir / "trajectory.csv")
    write_trajectory_csv(traj, bundle.trajectory_csv)
    with open(bundle.summary_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerow((policy.name, _fmt(args.l), str(args.T), str(args.seed),
                         _fmt(metrics.regret), _fmt(metrics.compensation),
                         str(metrics.comp_rounds), _fmt(metrics.arm1_rel_error)))
    _gnuplot_script(out_dir / "trajectory.gp", "trajectory.csv", 1,
                    {"cum_regret": 9, "cum_compensation": 10})
    config = {
        "policy": policy.name, "c": policy.c, "means": list(instance.arm_means),
        "noise": args.noise, "sigma": args.sigma, "drift": args.drift,
        "cap": getattr(args, "cap", None), "l": args.l, "T": args.T,
        "seed": args.seed, "project": args.project,
    }
    _write_manifest(bundle, "run", args.seed, config)
    print(f"policy={policy.name} l={_fmt(args.l)} T={args.T} seed={args.seed} "
          f"regret={_fmt(metrics.regret)} compensation={_fmt(metrics.compensation)} "
          f"comp_rounds={metrics.comp_rounds} arm1_rel_error={_fmt(metrics.arm1_rel_error)}")
    return 0


# ---------------------------------------------------------------- sweep

def _cmd_sweep(args, parser) -> int:
    try:
        with open(args.config) as fh:
            data = json.load(fh)
        if args.seed is not None:
            data["master_seed"] = args.seed
        config = ExperimentConfig.from_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        parser.error(f"invalid config {args.config}: {exc}")
    result = run_experiment(config, jobs=args.jobs)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = OutputBundle(manifest=out_dir / "manifest.json",
                          summary_csv=out_dir / "sweep.csv")
    with open(bundle.summary_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for cell in result.cells:
            writer.writerow((cell.policy.name, _fmt(cell.l), _fmt(cell.regret_mean),
                             _fmt(cell.regret_std), _fmt(cell.comp_mean),
                             _fmt(cell.comp_std), _fmt(cell.comp_rounds_mean),
                             _fmt(cell.arm1_err_mean)))
    if config.capture_trajectories:
        bundle.curves_csv = out_dir / "curves.csv"
        with open(bundle.curves_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CURVE_COLUMNS)
            for cell in result.cells:
                for t, reg, comp in zip(cell.curve_rounds, cell.regret_curve_mean,
                                        cell.comp_curve_mean):
                    writer.writerow((cell.policy.name, _fmt(cell.l), str(t),
                                     _fmt(reg), _fmt(comp)))
        _gnuplot_script(out_dir / "curves.gp", "curves.csv", 3,
                        {"cum_regret_mean": 4, "cum_compensation_mean": 5})
    _write_manifest(bundle, "sweep", config.master_seed, config.to_dict())
    print(f"wrote {bundle.summary_csv} ({len(result.cells)} cells)")
    return 0


# ---------------------------------------------------------------- bounds

def _cmd_bounds(args, parser) -> int:
    try:
        means = _parse_means(args.means)
        instance = BanditInstance(means, NoiseModel("bernoulli"))
        delta_lower = args.delta_lower if args.delta_lower is not None else min_pairwise_gap(means)
        inputs = BoundInputs.from_instance(instance, horizon=args.T, lipschitz=args.l,
                                           c=args.c, delta_lower=delta_lower)
    except ValueError as exc:
        parser.error(str(exc))
    lines = [
        f"inputs: K={inputs.k} T={inputs.horizon} l={_fmt(inputs.lipschitz)} "
        f"c={_fmt(inputs.c)} delta={_fmt(inputs.delta_min)} "
        f"delta_lower={_fmt(inputs.delta_lower)}",
    ]
    if not check_c_condition(inputs.c, inputs.delta_min):
        lines.append(f"warning: c={_fmt(inputs.c)} fails the exploration-schedule "
                     f"condition c >= 36/delta = {_fmt(36.0 / inputs.delta_min)}")
    rows = (
        ("ucb regret", ucb_regret_bound(inputs)),
        ("ucb compensation", ucb_comp_bound(inputs)),
        ("egreedy regret", egreedy_regret_bound(inputs)),
        ("egreedy compensation", egreedy_comp_bound(inputs)),
        ("thompson regret", thompson_regret_bound(inputs)),
        ("thompson compensation", thompson_comp_bound(inputs)),
        ("thompson per-arm compensated pulls", comp_frequency_bound(inputs.delta_lower, inputs.horizon)),
    )
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        lines.append(f"{name:<{width}}  <= {_fmt(value)}")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out_dir is not None:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        bundle = OutputBundle(manifest=out_dir / "manifest.json",
                              bounds_txt=out_dir / "bounds.txt")
        bundle.bounds_txt.write_text(text)
        config = {"means": list(means), "l": args.l, "c": args.c,
                  "delta_lower": delta_lower, "T": args.T}
        _write_manifest(bundle, "bounds", 0, config)
    return 0


# ---------------------------------------------------------------- trace

def _cmd_trace(args, parser) -> int:
    if args.T > 20:
        parser.error("trace supports T <= 20 (use run for longer horizons)")
    try:
        instance = _build_env(args)
        drift = _build_drift(args)
        policy = _build_policy(args)
        draws = [float(v) for v in args.draws.split(",")] if args.draws else []
    except ValueError as exc:
        parser.error(str(exc))
    if args.T < instance.k:
        parser.error(f"--T {args.T} is shorter than the warm start over {instance.k} arms")
    options = MechanismOptions(project_feedback=_project_option(args))
    rng = ScriptedRng(draws)
    try:
        traj = run(instance, policy, drift, options, args.T, rng)
    except ScriptExhaustedError as exc:
        parser.error(str(exc))
    print(",".join(TRAJECTORY_COLUMNS))
    for row in trajectory_rows(traj):
        print(",".join(row))
    return 0


# ---------------------------------------------------------------- parser

def _add_env_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--means", default=DEFAULT_MEANS,
                   help="comma-separated true arm means in (0,1]")
    p.add_argument("--noise", choices=("gaussian", "bernoulli"), default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0,
                   help="gaussian noise standard deviation")
    p.add_argument("--drift", choices=("zero", "linear", "clipped_linear"),
                   default="linear", help="drift response to compensation")
    p.add_argument("--l", type=float, default=0.0, help="drift Lipschitz coefficient")
    p.add_argument("--cap", type=float, default=None, help="clip level for clipped_linear")
    p.add_argument("--c", type=float, default=4.0, help="egreedy exploration constant")
    p.add_argument("--project", choices=("auto", "on", "off"), default="auto",
                   help="project credited feedback onto [0,1] (auto: on for egreedy)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftbandit",
        description="Incentivized bandit simulation under compensation-driven reward drift")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one seeded trajectory")
    p_run.add_argument("--policy", choices=POLICY_NAMES, required=True)
    _add_env_flags(p_run)
    p_run.add_argument("--T", type=int, default=20000, help="horizon (rounds)")
    p_run.add_argument("--seed", type=int, default=1)
    p_run.add_argument("--out-dir", default="out")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="replicated (policy, l) grid from a JSON config")
    p_sweep.add_argument("--config", required=True, help="JSON experiment config")
    p_sweep.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.add_argument("--out-dir", default="out")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_bounds = sub.add_parser("bounds", help="print the closed-form bound table")
    p_bounds.add_argument("--means", default=DEFAULT_MEANS)
    p_bounds.add_argument("--l", type=float, default=0.0)
    p_bounds.add_argument("--c", type=float, default=4.0)
    p_bounds.add_argument("--delta-lower", type=float, default=None,
                          help="posted-mean separation (default: min pairwise true-mean gap)")
    p_bounds.add_argument("--T", type=int, default=20000)
    p_bounds.add_argument("--out-dir", default=None)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_trace = sub.add_parser("trace", help="short run on a scripted number list")
    p_trace.add_argument("--policy", choices=POLICY_NAMES, required=True)
    _add_env_flags(p_trace)
    p_trace.add_argument("--T", type=int, default=6, help="horizon, at most 20")
    p_trace.add_argument("--draws", required=True,
                         help="comma-separated scripted stream values")
    p_trace.set_defaults(func=_cmd_trace)
    return parser


def _validate_common(args, parser) -> None:
    if getattr(args, "l", 0.0) < 0:
        parser.error("drift coefficient --l must be >= 0 "
                     "(drift is non-decreasing in compensation and vanishes at zero)")
    if getattr(args, "sigma", 0.0) < 0:
        parser.error("--sigma must be >= 0")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_common(args, parser)
    try:
        return args.func(args, parser)
    except (BanditError, ExperimentError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error in {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
