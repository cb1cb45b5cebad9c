"""Command-line front end.

Subcommands: classify | simulate | stationary | deterministic | hitting.
Every run is driven by a ``key = value`` config file; ``--seed``, ``--out``
and ``--set key=value`` override file entries, and ``--threads`` changes
scheduling only, never results.  Data lands in CSV (17 significant digits);
unless ``--no-plot`` is given, report figures are rendered as PNG files next
to the CSV.  Exit codes: 0 success, 2 config error, 3 regime refusal,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .deterministic import (
    NoDeterministicSolution,
    integrate_deterministic,
    sqrt_profile,
    uniqueness_verdict,
)
from .experiment import (
    Experiment,
    ExperimentKind,
    ParseError,
    hitting_experiment,
    parse_config,
    run_monte_carlo,
)
from .integrator import (
    NumericFailure,
    RefusedNoSolutionRegime,
    SchemeRegimeMismatch,
    simulate_path,
)
from .model import ParameterError, PathSample, RngStream
from .regimes import classify
from .stationary import (
    NonIntegrableStationary,
    SkewSymmetryViolated,
    ergodic_sample,
    fit_check,
    gamma_product_params,
)

_EXIT_CONFIG = 2
_EXIT_REGIME = 3
_EXIT_NUMERIC = 4

_REGIME_ERRORS = (RefusedNoSolutionRegime, SchemeRegimeMismatch,
                  NoDeterministicSolution, NonIntegrableStationary,
                  SkewSymmetryViolated)
_NUMERIC_ERRORS = (NumericFailure, FloatingPointError)


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _write_csv(path: str, header: Sequence[str],
               rows: Sequence[Sequence[object]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_path_csv(path: str, sample: PathSample) -> None:
    rows = zip(sample.times, sample.xs, sample.ys,
               sample.int_inv_x, sample.int_inv_y)
    _write_csv(path, ("t", "x", "y", "int_inv_x", "int_inv_y"),
               [[float(v) for v in row] for row in rows])


def _plot_stem(out: str) -> str:
    p = Path(out)
    return str(p.with_suffix("")) if p.suffix else str(p)


def _require_out(exp: Experiment) -> str:
    if not exp.output_path:
        raise ParseError(
            f"kind {exp.kind.value!r} emits data; set 'out' in the config "
            "or pass --out")
    return exp.output_path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obliquebm",
        description=("Simulation and classification toolkit for planar "
                     "Brownian motion with oblique 1/x-type boundary "
                     "repulsion."))
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("classify", "regime report: corner polarity, wall hitting, "
                     "existence/uniqueness"),
        ("simulate", "sample paths / endpoint summary"),
        ("stationary", "ergodic sampling plus gamma-product fit check"),
        ("deterministic", "noise-free system: sqrt-profile and path"),
        ("hitting", "Monte Carlo wall-hitting fractions"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, metavar="PATH",
                       help="key = value config file")
        p.add_argument("--seed", type=int, default=None, metavar="N",
                       help="override the config seed")
        p.add_argument("--out", default=None, metavar="PATH",
                       help="override the config output path")
        p.add_argument("--threads", type=int, default=1, metavar="N",
                       help="worker threads (speed only, never results)")
        p.add_argument("--no-plot", action="store_true",
                       help="skip the companion PNG figures")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE", dest="assignments",
                       help="override any config key (repeatable)")
        if name == "stationary":
            p.add_argument("--burn-in", type=float, default=None,
                           help="time to discard (default: mixing heuristic)")
            p.add_argument("--thin", type=float, default=1.0,
                           help="time between retained samples")
            p.add_argument("--n-keep", type=int, default=10000,
                           help="number of retained samples")
    return parser


def _load_experiment(args: argparse.Namespace) -> Experiment:
    overrides: dict[str, object] = {"kind": args.command}
    for item in args.assignments:
        if "=" not in item:
            raise ParseError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out"] = args.out
    text = Path(args.config).read_text()
    return parse_config(text, overrides)


def _cmd_classify(exp: Experiment, args: argparse.Namespace) -> int:
    report = classify(exp.params)
    p = exp.params
    corner, sides, exist = report.corner, report.sides, report.existence
    flags = {name: name in corner.satisfied_conditions
             for name in ("C1", "C2a", "C2b", "C3")}
    witness = corner.c3_witness
    print(f"parameters: alpha={p.alpha:g} beta={p.beta:g} "
          f"gamma={p.gamma:g} delta={p.delta:g}")
    print(f"corner: {corner.verdict.name} "
          f"(conditions: {', '.join(sorted(corner.satisfied_conditions)) or 'none'})")
    if witness is not None:
        print(f"  C3 witness: lambda={witness[0]:.12g} mu={witness[1]:.12g}")
    print(f"x side: {sides.x_side.name}")
    print(f"y side: {sides.y_side.name}")
    print(f"both sides avoided: {sides.both_sides_never}")
    print(f"existence: {exist.regime.name} (case {exist.case.name})")
    if exist.notes:
        print(f"  note: {exist.notes}")

    header = ("alpha", "beta", "gamma", "delta", "c1", "c2a", "c2b", "c3",
              "c3_lambda", "c3_mu", "corner", "x_side", "y_side",
              "both_sides_never", "existence", "case")
    row = [p.alpha, p.beta, p.gamma, p.delta,
           flags["C1"], flags["C2a"], flags["C2b"], flags["C3"],
           witness[0] if witness else None,
           witness[1] if witness else None,
           corner.verdict.name, sides.x_side.name, sides.y_side.name,
           sides.both_sides_never, exist.regime.name, exist.case.name]
    print(",".join(header))
    print(",".join(_fmt(v) for v in row))
    if exp.output_path:
        _write_csv(exp.output_path, header, [row])
        if not args.no_plot:
            from . import plots
            plots.plot_corner_margin(p, _plot_stem(exp.output_path) + ".png")
    return 0


def _cmd_simulate(exp: Experiment, args: argparse.Namespace) -> int:
    out = _require_out(exp)
    if exp.n_paths == 1:
        path = simulate_path(exp.sim_config(), RngStream(exp.seed, 0))
        _write_path_csv(out, path)
        print(f"wrote path ({len(path)} rows) to {out}")
        if not args.no_plot:
            from . import plots
            plots.plot_trajectory(path, _plot_stem(out) + ".png")
        return 0
    mc = run_monte_carlo(exp, threads=args.threads)
    header = ("n_paths", "mean_x", "mean_y", "mean_x_sq", "mean_y_sq",
              "var_x", "var_y", "mean_int_inv_x", "mean_int_inv_y",
              "frac_x_hit", "frac_y_hit", "frac_corner_hit")
    _write_csv(out, header, [[
        mc.n_paths, mc.mean_x, mc.mean_y, mc.mean_x_sq, mc.mean_y_sq,
        mc.var_x, mc.var_y, mc.mean_int_inv_x, mc.mean_int_inv_y,
        mc.frac_x_hit, mc.frac_y_hit, mc.frac_corner_hit]])
    print(f"{mc.n_paths} paths: mean_x={mc.mean_x:.6g} "
          f"mean_y={mc.mean_y:.6g} -> {out}")
    if not args.no_plot:
        from . import plots
        plots.plot_endpoints(mc.x_end, mc.y_end, exp.grid.t_end,
                             _plot_stem(out) + ".png")
    return 0


def _cmd_stationary(exp: Experiment, args: argparse.Namespace) -> int:
    out = _require_out(exp)
    gp = gamma_product_params(exp.params, exp.drift)
    samples = ergodic_sample(exp.sim_config(), RngStream(exp.seed, 0),
                             n_keep=args.n_keep, burn_in=args.burn_in,
                             thin=args.thin)
    _write_csv(out, ("x", "y"), samples.tolist())
    fit = fit_check(samples, gp)
    fit_path = _plot_stem(out) + "_fit.csv"
    _write_csv(fit_path,
               ("n_samples", "mean_x", "var_x", "mean_y", "var_y",
                "ks_x", "ks_y", "xy_correlation"),
               [[fit.n_samples, fit.mean_x, fit.var_x, fit.mean_y,
                 fit.var_y, fit.ks_x, fit.ks_y, fit.xy_correlation]])
    print(f"target: Gamma(a={gp.a:g}, rate c={gp.c:g}) x "
          f"Gamma(b={gp.b:g}, rate d={gp.d:g})")
    print(f"{fit.n_samples} samples: mean_x={fit.mean_x:.4f} "
          f"var_x={fit.var_x:.4f} ks_x={fit.ks_x:.4f} ks_y={fit.ks_y:.4f} "
          f"corr={fit.xy_correlation:.4f}")
    print(f"wrote {out} and {fit_path}")
    if not args.no_plot:
        from . import plots
        plots.plot_stationary(samples, gp, _plot_stem(out) + ".png")
    return 0


def _cmd_deterministic(exp: Experiment, args: argparse.Namespace) -> int:
    out = _require_out(exp)
    profile = sqrt_profile(exp.params)
    verdict = uniqueness_verdict(exp.params)
    path = integrate_deterministic(exp.params, exp.grid,
                                   clamp_coeff=exp.clamp_coeff)
    _write_path_csv(out, path)
    print(f"sqrt profile: c={profile.c:.12g} d={profile.d:.12g}")
    print(f"uniqueness: {verdict.unique.name} "
          f"(branch {verdict.branch.name}, epsilon={verdict.epsilon:.12g})")
    print(f"wrote path ({len(path)} rows) to {out}")
    if not args.no_plot:
        from . import plots
        plots.plot_sqrt_profile(path, profile, _plot_stem(out) + ".png")
    return 0


def _cmd_hitting(exp: Experiment, args: argparse.Namespace) -> int:
    out = _require_out(exp)
    stats = hitting_experiment(exp, threads=args.threads)
    _write_csv(out,
               ("n_paths", "frac_x_hit", "frac_y_hit", "frac_corner_hit",
                "mean_first_x_hit", "wilson_halfwidth"),
               [[stats.n_paths, stats.frac_x_hit, stats.frac_y_hit,
                 stats.frac_corner_hit, stats.mean_first_x_hit,
                 stats.wilson_halfwidth]])
    print(f"{stats.n_paths} paths: frac_x_hit={stats.frac_x_hit:.4f} "
          f"(±{stats.wilson_halfwidth:.4f}) frac_y_hit={stats.frac_y_hit:.4f} "
          f"frac_corner_hit={stats.frac_corner_hit:.4f}")
    print(f"wrote {out}")
    if not args.no_plot:
        from . import plots
        plots.plot_hitting(stats.frac_x_hit, stats.frac_y_hit,
                           stats.frac_corner_hit, stats.wilson_halfwidth,
                           _plot_stem(out) + ".png")
    return 0


_COMMANDS = {
    ExperimentKind.CLASSIFY: _cmd_classify,
    ExperimentKind.SIMULATE: _cmd_simulate,
    ExperimentKind.STATIONARY: _cmd_stationary,
    ExperimentKind.DETERMINISTIC: _cmd_deterministic,
    ExperimentKind.HITTING: _cmd_hitting,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        exp = _load_experiment(args)
    except (ParseError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    try:
        return _COMMANDS[exp.kind](exp, args)
    except (ParseError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except _REGIME_ERRORS as exc:
        print(f"regime refusal: {exc}", file=sys.stderr)
        return _EXIT_REGIME
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
