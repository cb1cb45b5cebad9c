"""Experiment configuration, the parallel Monte Carlo driver, and hitting
statistics.

Configs are line-oriented ``key = value`` text ('#' starts a comment).
Recognized keys:

    kind alpha beta gamma delta mu nu dt t_end n_paths seed scheme epsilon
    n_trunc clamp_coeff hit_coeff x0 y0 out

Unknown keys are rejected, duplicate keys are an error (citing the second
occurrence), and command-line flags override file values.  Path i of a run
always consumes stream (seed, i), so results are identical for any worker
count; reductions go through numpy's pairwise summation for the same reason.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from . import _kernels
from .integrator import (
    ImplicitBessel,
    SchemeKind,
    SimConfig,
    TruncatedHn,
    TruncatedPsi,
    simulate_path,
)
from .model import (
    Drift,
    Params,
    RngStream,
    SimGrid,
    validate_drift,
    validate_params,
)

Z_95 = 1.959963984540054  # two-sided 95% normal quantile


class ParseError(ValueError):
    """Malformed config text; the message cites the offending line."""


class UnknownKey(ParseError):
    """A key outside the recognized set."""


class MissingRequiredKey(ParseError):
    """A key required by the chosen kind/scheme is absent."""


class ExperimentKind(enum.Enum):
    CLASSIFY = "classify"
    SIMULATE = "simulate"
    STATIONARY = "stationary"
    DETERMINISTIC = "deterministic"
    HITTING = "hitting"


@dataclass(frozen=True)
class Experiment:
    """A fully resolved experiment description."""

    kind: ExperimentKind
    params: Params
    drift: Drift
    grid: SimGrid
    n_paths: int
    seed: int
    scheme: SchemeKind
    x0: float = 1.0
    y0: float = 1.0
    clamp_coeff: float = 1e-2
    hit_coeff: float = 1e-1
    output_path: str | None = None

    def sim_config(self, force: bool = False) -> SimConfig:
        return SimConfig(
            params=self.params, grid=self.grid, drift=self.drift,
            x0=self.x0, y0=self.y0, scheme=self.scheme,
            clamp_coeff=self.clamp_coeff, hit_coeff=self.hit_coeff,
            force=force)


@dataclass(frozen=True)
class MonteCarloResult:
    """Order-insensitive aggregates over n_paths endpoint states.

    Arrays are per-path values indexed by path number (so they are
    scheduling-independent); hit time arrays hold -1.0 for paths that never
    crossed the threshold.
    """

    n_paths: int
    mean_x: float
    mean_y: float
    mean_x_sq: float
    mean_y_sq: float
    var_x: float
    var_y: float
    mean_int_inv_x: float
    mean_int_inv_y: float
    frac_x_hit: float
    frac_y_hit: float
    frac_corner_hit: float
    x_end: np.ndarray = field(repr=False)
    y_end: np.ndarray = field(repr=False)
    t_x_hit: np.ndarray = field(repr=False)
    t_y_hit: np.ndarray = field(repr=False)
    t_corner_hit: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class HittingStats:
    """Empirical wall-hitting fractions over a finite horizon.

    ``wilson_halfwidth`` is the 95% Wilson score halfwidth for
    ``frac_x_hit``; ``mean_first_x_hit`` averages the first-hit time over
    the paths that did hit (None if none did).
    """

    n_paths: int
    frac_x_hit: float
    frac_y_hit: float
    frac_corner_hit: float
    mean_first_x_hit: float | None
    wilson_halfwidth: float


_FLOAT_KEYS = ("alpha", "beta", "gamma", "delta", "mu", "nu", "dt", "t_end",
               "epsilon", "clamp_coeff", "hit_coeff", "x0", "y0")
_INT_KEYS = ("n_paths", "seed", "n_trunc")
_STR_KEYS = ("kind", "scheme", "out")
KNOWN_KEYS = frozenset(_FLOAT_KEYS + _INT_KEYS + _STR_KEYS)

_DEFAULTS = {
    "mu": "0", "nu": "0", "dt": "1e-4", "t_end": "1", "n_paths": "10000",
    "seed": "0", "scheme": "implicit_bessel", "clamp_coeff": "1e-2",
    "hit_coeff": "1e-1", "x0": "1", "y0": "1",
}


def _raw_entries(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise UnknownKey(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ParseError(
                f"line {lineno}: duplicate key {key!r} "
                f"(first set on line {first_line[key]})")
        if not value:
            raise ParseError(f"line {lineno}: empty value for {key!r}")
        entries[key] = value
        first_line[key] = lineno
    return entries


def _convert(key: str, value: str) -> float | int | str:
    try:
        if key in _FLOAT_KEYS:
            out = float(value)
            if not math.isfinite(out):
                raise ValueError("not finite")
            return out
        if key in _INT_KEYS:
            return int(value)
    except ValueError as exc:
        raise ParseError(f"key {key!r}: cannot parse {value!r} ({exc})") from None
    return value


def parse_config(text: str,
                 overrides: Mapping[str, object] | None = None) -> Experiment:
    """Parse config text (plus optional flag overrides) into an Experiment.

    ``overrides`` maps config keys to replacement values (strings or already
    typed); they win over file values.  Raises :class:`ParseError` /
    :class:`UnknownKey` / :class:`MissingRequiredKey` on malformed input and
    propagates parameter validation errors.
    """
    raw: dict[str, object] = dict(_raw_entries(text))
    for key, value in (overrides or {}).items():
        if key not in KNOWN_KEYS:
            raise UnknownKey(f"override: unknown key {key!r}")
        if value is not None:
            raw[key] = value
    for key, value in _DEFAULTS.items():
        raw.setdefault(key, value)
    vals = {k: (_convert(k, v) if isinstance(v, str) else v)
            for k, v in raw.items()}

    for key in ("kind", "alpha", "beta", "gamma", "delta"):
        if key not in vals:
            raise MissingRequiredKey(f"missing required key {key!r}")
    try:
        kind = ExperimentKind(str(vals["kind"]))
    except ValueError:
        names = ", ".join(k.value for k in ExperimentKind)
        raise ParseError(
            f"key 'kind': expected one of {names}, got {vals['kind']!r}") from None

    params = validate_params(Params(
        float(vals["alpha"]), float(vals["beta"]),
        float(vals["gamma"]), float(vals["delta"])))
    drift = validate_drift(Drift(float(vals["mu"]), float(vals["nu"])))
    grid = SimGrid(float(vals["dt"]), float(vals["t_end"]))

    scheme_name = str(vals["scheme"])
    if scheme_name == "implicit_bessel":
        scheme: SchemeKind = ImplicitBessel()
    elif scheme_name == "truncated_psi":
        # default truncation matches the cross-drift clamp scale
        eps = vals.get("epsilon",
                       float(vals["clamp_coeff"]) * math.sqrt(grid.dt))
        scheme = TruncatedPsi(float(eps))
    elif scheme_name == "truncated_hn":
        if "n_trunc" not in vals:
            raise MissingRequiredKey("scheme = truncated_hn requires n_trunc")
        scheme = TruncatedHn(int(vals["n_trunc"]))
    else:
        raise ParseError(
            "key 'scheme': expected implicit_bessel, truncated_psi or "
            f"truncated_hn, got {scheme_name!r}")

    n_paths = int(vals["n_paths"])
    if n_paths < 1:
        raise ParseError("n_paths must be >= 1")
    seed = int(vals["seed"])
    if not 0 <= seed < 2**64:
        raise ParseError("seed must be an unsigned 64-bit integer")
    for key in ("x0", "y0"):
        if float(vals[key]) < 0.0:
            raise ParseError(f"{key} must be >= 0")
    for key in ("clamp_coeff", "hit_coeff"):
        if not float(vals[key]) > 0.0:
            raise ParseError(f"{key} must be > 0")

    return Experiment(
        kind=kind, params=params, drift=drift, grid=grid,
        n_paths=n_paths, seed=seed, scheme=scheme,
        x0=float(vals["x0"]), y0=float(vals["y0"]),
        clamp_coeff=float(vals["clamp_coeff"]),
        hit_coeff=float(vals["hit_coeff"]),
        output_path=str(vals["out"]) if "out" in vals else None,
    )


def wilson_halfwidth(p_hat: float, n: int, z: float = Z_95) -> float:
    """Halfwidth of the Wilson score interval for a binomial fraction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    z2n = z * z / n
    return (z * math.sqrt(p_hat * (1.0 - p_hat) / n + z2n / (4.0 * n))
            / (1.0 + z2n))


def _mc_range(cfg: SimConfig, seed: int, lo: int, hi: int, n_steps: int,
              out: np.ndarray) -> None:
    p, d = cfg.params, cfg.drift
    dt = cfg.grid.dt
    sqdt = math.sqrt(dt)
    for i in range(lo, hi):
        gen = RngStream(seed, i).generator()
        out[i] = _kernels.mc_path_loop(
            gen, n_steps, cfg.x0, cfg.y0, dt, sqdt,
            p.alpha, p.beta, p.gamma, p.delta, d.mu, d.nu,
            cfg.clamp, cfg.hit_threshold)


def run_monte_carlo(exp: Experiment, threads: int = 1) -> MonteCarloResult:
    """Simulate exp.n_paths independent paths and aggregate endpoint
    statistics.

    Path i uses stream (exp.seed, i) regardless of scheduling, and the
    per-path results land in arrays indexed by i, so the output is
    bit-identical for every ``threads`` value.  Only the implicit scheme has
    a fused endpoint kernel; truncated schemes fall back to per-path
    :func:`simulate_path` (same contract, more memory traffic).
    """
    cfg = exp.sim_config()
    # run the regime guards once, not once per path
    simulate_path(replace(cfg, grid=SimGrid(cfg.grid.dt, cfg.grid.dt)),
                  RngStream(exp.seed, 0),
                  increments=np.zeros((1, 2)))
    cfg = replace(cfg, force=True)
    n_paths = exp.n_paths
    n_steps = cfg.grid.n_steps
    out = np.empty((n_paths, 7))
    if isinstance(cfg.scheme, ImplicitBessel):
        threads = max(1, threads)
        if threads == 1:
            _mc_range(cfg, exp.seed, 0, n_paths, n_steps, out)
        else:
            bounds = np.linspace(0, n_paths, threads + 1).astype(int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_mc_range, cfg, exp.seed, int(lo), int(hi),
                                n_steps, out)
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                    if hi > lo
                ]
                for f in futures:
                    f.result()
    else:
        for i in range(n_paths):
            s = simulate_path(cfg, RngStream(exp.seed, i), record_stride=n_steps)
            out[i] = (s.xs[-1], s.ys[-1], s.int_inv_x[-1], s.int_inv_y[-1],
                      -1.0 if s.x_hit is None else s.x_hit,
                      -1.0 if s.y_hit is None else s.y_hit,
                      -1.0 if s.corner_hit is None else s.corner_hit)
    if not np.isfinite(out[:, :4]).all():
        raise FloatingPointError("a path produced non-finite values")
    x_end = out[:, 0].copy()
    y_end = out[:, 1].copy()
    mean_x = float(np.mean(x_end))
    mean_y = float(np.mean(y_end))
    return MonteCarloResult(
        n_paths=n_paths,
        mean_x=mean_x, mean_y=mean_y,
        mean_x_sq=float(np.mean(x_end * x_end)),
        mean_y_sq=float(np.mean(y_end * y_end)),
        var_x=float(np.mean((x_end - mean_x) ** 2)),
        var_y=float(np.mean((y_end - mean_y) ** 2)),
        mean_int_inv_x=float(np.mean(out[:, 2])),
        mean_int_inv_y=float(np.mean(out[:, 3])),
        frac_x_hit=float(np.mean(out[:, 4] >= 0.0)),
        frac_y_hit=float(np.mean(out[:, 5] >= 0.0)),
        frac_corner_hit=float(np.mean(out[:, 6] >= 0.0)),
        x_end=x_end, y_end=y_end,
        t_x_hit=out[:, 4].copy(), t_y_hit=out[:, 5].copy(),
        t_corner_hit=out[:, 6].copy(),
    )


def hitting_experiment(exp: Experiment, threads: int = 1) -> HittingStats:
    """Monte Carlo estimate of the finite-horizon wall-hitting fractions."""
    mc = run_monte_carlo(exp, threads=threads)
    hit_times = mc.t_x_hit[mc.t_x_hit >= 0.0]
    return HittingStats(
        n_paths=mc.n_paths,
        frac_x_hit=mc.frac_x_hit,
        frac_y_hit=mc.frac_y_hit,
        frac_corner_hit=mc.frac_corner_hit,
        mean_first_x_hit=float(np.mean(hit_times)) if hit_times.size else None,
        wilson_halfwidth=wilson_halfwidth(mc.frac_x_hit, mc.n_paths),
    )
