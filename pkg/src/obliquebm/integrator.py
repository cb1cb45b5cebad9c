"""Positivity-preserving time stepping for the obliquely repelled diffusion.

Three schemes share one substep primitive:

* ``ImplicitBessel`` -- the production scheme.  Each coordinate treats its own
  1/x drift implicitly (closed-form positive root), the cross drift
  explicitly with the reciprocal clamped at ``clamp_coeff * sqrt(dt)``.
  Unconditionally positive, and the sqrt(dt)-scaled clamp makes the whole
  chain commute with Brownian rescaling at the discrete level.
* ``TruncatedPsi`` -- the Lipschitz-truncated pair (X, Z) with bounded cross
  rate 1/max(gamma*x + z, alpha*eps); the second coordinate is reported as
  Y = (gamma*X + Z)/alpha.  Valid where that construction makes sense:
  beta, gamma >= 0, or beta > 0 > gamma.
* ``TruncatedHn`` -- cross drifts through the bounded hyperbola branch
  h_n(v) = min(n-1, (1 - 1/n)/v), own terms implicit.  Valid for
  beta <= 0, gamma < 0.

The truncated schemes exist for cross-validation: they are independent
discretizations that must agree with the implicit scheme in distribution as
dt (and their truncation) go to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .model import (
    Drift,
    NonFiniteParameter,
    Params,
    PathSample,
    RngStream,
    SimGrid,
    State,
    ZERO_DRIFT,
    gaussian_increments,
    validate_drift,
    validate_params,
)
from .regimes import ExistenceRegime, classify_existence


class RefusedNoSolutionRegime(RuntimeError):
    """Simulation refused: the requested start has no solution to approximate."""


class SchemeRegimeMismatch(ValueError):
    """A truncated scheme was asked to run outside its validity signs."""


class NumericFailure(RuntimeError):
    """A trajectory produced non-finite values."""


@dataclass(frozen=True)
class ImplicitBessel:
    """Implicit own-drift / clamped explicit cross-drift scheme."""


@dataclass(frozen=True)
class TruncatedPsi:
    """Truncated (X, Z) construction with rate floor alpha*epsilon."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be > 0")


@dataclass(frozen=True)
class TruncatedHn:
    """Bounded cross-rate scheme with truncation level n."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")


SchemeKind = ImplicitBessel | TruncatedPsi | TruncatedHn


@dataclass(frozen=True)
class SimConfig:
    """Everything one trajectory needs.

    ``clamp_coeff`` (kappa) and ``hit_coeff`` are in units of sqrt(dt): the
    cross-drift reciprocal is clamped at kappa*sqrt(dt) and a coordinate
    counts as numerically hitting its wall on the first step whose
    pre-repulsion predictor (position before the implicit own-drift
    correction) lands below hit_coeff*sqrt(dt).  ``force=True`` skips the
    existence-regime and corner-start guards (for exploring regions the
    theory leaves open).
    """

    params: Params
    grid: SimGrid
    drift: Drift = ZERO_DRIFT
    x0: float = 1.0
    y0: float = 1.0
    scheme: SchemeKind = ImplicitBessel()
    clamp_coeff: float = 1e-2
    hit_coeff: float = 1e-1
    force: bool = False

    @property
    def clamp(self) -> float:
        return self.clamp_coeff * math.sqrt(self.grid.dt)

    @property
    def hit_threshold(self) -> float:
        return self.hit_coeff * math.sqrt(self.grid.dt)


def implicit_bessel_substep(x: float, b_extra: float, dw: float, dt: float,
                            alpha: float) -> float:
    """Unique positive root x' of x' = x + dw + b_extra*dt + alpha*dt/x'.

    Closed form x' = (b + sqrt(b^2 + 4*alpha*dt))/2 with
    b = x + dw + b_extra*dt; for b < 0 the equivalent rationalized quotient
    2*alpha*dt/(sqrt(b^2+4*alpha*dt) - b) avoids cancellation.  Strictly
    positive for every real b since alpha*dt > 0, and monotone in b.
    """
    b = x + dw + b_extra * dt
    adt = alpha * dt
    s = math.sqrt(b * b + 4.0 * adt)
    if b >= 0.0:
        return 0.5 * (b + s)
    return (adt + adt) / (s - b)


def step(s: State, dw: float, dc: float, cfg: SimConfig) -> State:
    """One implicit-Bessel step of the coupled system from state ``s``.

    Cross drifts are evaluated explicitly at the pre-step state with the
    clamped reciprocal; own drifts go through the implicit substep.  Both
    output coordinates are strictly positive.
    """
    p, d = cfg.params, cfg.drift
    dt = cfg.grid.dt
    clamp = cfg.clamp
    bex = p.beta / max(s.y, clamp) - d.mu
    bey = p.gamma / max(s.x, clamp) - d.nu
    x = implicit_bessel_substep(s.x, bex, dw, dt, p.alpha)
    y = implicit_bessel_substep(s.y, bey, dc, dt, p.delta)
    return State(x, y, s.t + dt)


def _check_start(cfg: SimConfig) -> None:
    validate_params(cfg.params)
    validate_drift(cfg.drift)
    if not (math.isfinite(cfg.x0) and math.isfinite(cfg.y0)):
        raise NonFiniteParameter("start point must be finite")
    if cfg.x0 < 0.0 or cfg.y0 < 0.0:
        raise ValueError("start point must lie in the nonnegative quadrant")
    if cfg.force:
        return
    report = classify_existence(cfg.params)
    if report.regime is ExistenceRegime.NO_SOLUTION:
        raise RefusedNoSolutionRegime(
            "no solution exists for these parameters "
            f"(alpha*delta = {cfg.params.alpha * cfg.params.delta:g} <= "
            f"beta*gamma = {cfg.params.beta * cfg.params.gamma:g} with "
            "beta <= 0, gamma < 0); pass force=True to step the scheme anyway"
        )
    if cfg.x0 == 0.0 and cfg.y0 == 0.0:
        if not (cfg.params.beta >= 0.0 and cfg.params.gamma >= 0.0):
            raise RefusedNoSolutionRegime(
                "a corner start is only known to admit a solution when "
                "beta >= 0 and gamma >= 0; pass force=True to override"
            )


def _record_len(n_steps: int, stride: int) -> int:
    k = 1 + n_steps // stride
    if n_steps % stride:
        k += 1
    return k


def _alloc(n_rec: int):
    return (np.empty(n_rec), np.empty(n_rec), np.empty(n_rec),
            np.empty(n_rec), np.empty(n_rec))


def _as_sample(k, times, xs, ys, iix, iiy, hits) -> PathSample:
    if not (np.isfinite(xs[:k]).all() and np.isfinite(ys[:k]).all()):
        raise NumericFailure("trajectory produced non-finite values")
    return PathSample(
        times=times[:k].copy(), xs=xs[:k].copy(), ys=ys[:k].copy(),
        int_inv_x=iix[:k].copy(), int_inv_y=iiy[:k].copy(),
        x_hit=None if hits[0] < 0.0 else float(hits[0]),
        y_hit=None if hits[1] < 0.0 else float(hits[1]),
        corner_hit=None if hits[2] < 0.0 else float(hits[2]),
    )


def simulate_path(cfg: SimConfig, stream: RngStream,
                  increments: np.ndarray | None = None,
                  record_stride: int = 1) -> PathSample:
    """Simulate one trajectory on the configured grid.

    ``increments`` overrides the stream with an explicit (n_steps, 2) array
    of Brownian increments (used by rescaling and common-noise tests).
    ``record_stride`` subsamples the stored states; hit detection and the
    integral accumulators still see every step.

    Refuses to run in the no-solution parameter regime, or from the corner
    when no corner-start solution is known, unless ``cfg.force`` is set.
    """
    _check_start(cfg)
    if isinstance(cfg.scheme, (TruncatedPsi, TruncatedHn)):
        return simulate_truncated(cfg, stream, increments, record_stride)
    if increments is None:
        increments = gaussian_increments(stream, cfg.grid)
    n = cfg.grid.n_steps
    if increments.shape != (n, 2):
        raise ValueError(f"increments must have shape ({n}, 2)")
    p, d = cfg.params, cfg.drift
    times, xs, ys, iix, iiy = _alloc(_record_len(n, record_stride))
    hits = np.full(3, -1.0)
    k = _kernels.path_loop(
        cfg.x0, cfg.y0, increments, cfg.grid.dt,
        p.alpha, p.beta, p.gamma, p.delta, d.mu, d.nu,
        cfg.clamp, cfg.hit_threshold, record_stride,
        times, xs, ys, iix, iiy, hits)
    return _as_sample(k, times, xs, ys, iix, iiy, hits)


def simulate_truncated(cfg: SimConfig, stream: RngStream,
                       increments: np.ndarray | None = None,
                       record_stride: int = 1) -> PathSample:
    """Run one of the truncated constructions on the configured grid.

    ``TruncatedPsi`` requires beta >= 0, gamma >= 0 or beta > 0 > gamma; a
    zero start of the second coordinate is lifted to epsilon (the
    construction needs a strictly positive effective Y0).  ``TruncatedHn``
    requires beta <= 0, gamma < 0.  Violations raise
    :class:`SchemeRegimeMismatch`.
    """
    p, d = cfg.params, cfg.drift
    validate_params(p)
    validate_drift(d)
    n = cfg.grid.n_steps
    if increments is None:
        increments = gaussian_increments(stream, cfg.grid)
    if increments.shape != (n, 2):
        raise ValueError(f"increments must have shape ({n}, 2)")
    times, xs, ys, iix, iiy = _alloc(_record_len(n, record_stride))
    hits = np.full(3, -1.0)
    if isinstance(cfg.scheme, TruncatedPsi):
        ok = (p.beta >= 0.0 and p.gamma >= 0.0) or (p.beta > 0.0 > p.gamma)
        if not ok:
            raise SchemeRegimeMismatch(
                "the truncated rate construction needs beta, gamma >= 0 or "
                f"beta > 0 > gamma; got beta={p.beta}, gamma={p.gamma}")
        eps = cfg.scheme.epsilon
        y0 = cfg.y0 + (eps if cfg.y0 == 0.0 else 0.0)
        z0 = -p.gamma * cfg.x0 + p.alpha * y0
        k = _kernels.psi_path_loop(
            cfg.x0, z0, increments, cfg.grid.dt,
            p.alpha, p.beta, p.gamma, p.delta, d.mu, d.nu, eps,
            cfg.clamp, cfg.hit_threshold, record_stride,
            times, xs, ys, iix, iiy, hits)
    else:
        if not (p.beta <= 0.0 and p.gamma < 0.0):
            raise SchemeRegimeMismatch(
                "the bounded cross-rate construction needs beta <= 0 and "
                f"gamma < 0; got beta={p.beta}, gamma={p.gamma}")
        k = _kernels.hn_path_loop(
            cfg.x0, cfg.y0, increments, cfg.grid.dt,
            p.alpha, p.beta, p.gamma, p.delta, d.mu, d.nu, cfg.scheme.n,
            cfg.clamp, cfg.hit_threshold, record_stride,
            times, xs, ys, iix, iiy, hits)
    return _as_sample(k, times, xs, ys, iix, iiy, hits)


def rescale_path(path: PathSample, c: float) -> PathSample:
    """Brownian rescaling of a recorded path: (t, x, y) -> (t/c^2, x/c, y/c).

    The singular integrals scale by 1/c and hit times by 1/c^2, so the result
    is exactly what simulating with step dt/c^2 and increments dw/c produces
    (bit-for-bit when c is a power of two, to rounding otherwise).
    """
    if not c > 0.0:
        raise ValueError("c must be > 0")
    c2 = c * c
    scale_t = lambda t: None if t is None else t / c2
    return PathSample(
        times=path.times / c2, xs=path.xs / c, ys=path.ys / c,
        int_inv_x=path.int_inv_x / c, int_inv_y=path.int_inv_y / c,
        x_hit=scale_t(path.x_hit), y_hit=scale_t(path.y_hit),
        corner_hit=scale_t(path.corner_hit),
    )


def rescaled_config(cfg: SimConfig, c: float) -> SimConfig:
    """The config whose simulation matches ``rescale_path`` of cfg's output:
    step dt/c^2, horizon t_end/c^2, start (x0/c, y0/c), drift scaled by c."""
    if not c > 0.0:
        raise ValueError("c must be > 0")
    c2 = c * c
    return replace(
        cfg,
        grid=SimGrid(cfg.grid.dt / c2, cfg.grid.t_end / c2),
        x0=cfg.x0 / c, y0=cfg.y0 / c,
        drift=Drift(cfg.drift.mu * c, cfg.drift.nu * c),
    )
