"""The noise-free singular system and its closed-form square-root solution.

Dropping the Brownian terms leaves the integral system

    x(t) = alpha*int_0^t ds/x(s) + beta*int_0^t ds/y(s)
    y(t) = gamma*int_0^t ds/x(s) + delta*int_0^t ds/y(s)

started at the corner.  It admits the self-similar solution
x = c*sqrt(t), y = d*sqrt(t) with (c, d) solving the fixed-point pair
c/2 = alpha/c + beta/d, d/2 = gamma/c + delta/d -- in closed form below --
whenever max(beta, gamma) >= 0 or beta*gamma < alpha*delta; with both cross
terms negative and alpha*delta <= beta*gamma there is no solution at all.
Uniqueness holds on the sign-definite branches under explicit thresholds and
is otherwise open; in the degenerate alpha = delta = 0 case a one-parameter
family of distinct solutions makes non-uniqueness explicit.

Also here: a numerical integrator seeded by the closed form, and the scalar
comparison solver used to check the monotone-coupling property the stochastic
schemes inherit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .model import Params, PathSample, SimGrid, validate_params


class NoDeterministicSolution(ValueError):
    """beta < 0, gamma < 0 and alpha*delta <= beta*gamma: nothing to solve for."""


class NonPositiveInputs(ValueError):
    """The degenerate-family formulas need beta, gamma, C > 0 and t >= 0."""


class Unique(enum.Enum):
    YES = "yes"
    NO = "no"
    OPEN = "open"


class SignBranch(enum.Enum):
    NONNEG_BETA_GAMMA = "nonneg_beta_gamma"
    NONPOS_BETA_GAMMA = "nonpos_beta_gamma"
    MIXED = "mixed"


@dataclass(frozen=True)
class SqrtProfile:
    """Coefficients of the self-similar solution x = c*sqrt(t), y = d*sqrt(t)."""

    c: float
    d: float


@dataclass(frozen=True)
class UniquenessVerdict:
    epsilon: float
    unique: Unique
    branch: SignBranch


@dataclass(frozen=True)
class ClosedForm:
    """Seed the integrator exactly on the square-root profile at the first node."""


@dataclass(frozen=True)
class PerturbedStart:
    """Start integration from a given interior point instead of the corner."""

    x0: float
    y0: float

    def __post_init__(self):
        if not (self.x0 > 0.0 and self.y0 > 0.0):
            raise ValueError("perturbed start must be interior (x0, y0 > 0)")


def _profile_squares(p: Params) -> tuple[float, float]:
    """(c^2, d^2); uses the rationalized quotient for a negative cross term,
    where the direct formula subtracts nearly equal quantities."""
    r = math.sqrt((p.beta - p.gamma) ** 2 + 4.0 * p.alpha * p.delta)
    k = p.alpha * p.delta - p.beta * p.gamma
    if p.beta >= 0.0:
        c2 = 2.0 * p.alpha + (p.beta / p.delta) * (p.beta - p.gamma + r)
    else:
        c2 = 4.0 * p.alpha * k / (
            2.0 * p.alpha * p.delta - p.beta * p.gamma + p.beta * p.beta
            - p.beta * r)
    if p.gamma >= 0.0:
        d2 = 2.0 * p.delta + (p.gamma / p.alpha) * (p.gamma - p.beta + r)
    else:
        d2 = 4.0 * p.delta * k / (
            2.0 * p.alpha * p.delta - p.beta * p.gamma + p.gamma * p.gamma
            - p.gamma * r)
    return c2, d2


def sqrt_profile(p: Params) -> SqrtProfile:
    """Closed-form (c, d) of the square-root solution.

    Raises :class:`NoDeterministicSolution` when beta < 0, gamma < 0 and
    alpha*delta <= beta*gamma.  The returned pair is checked against the
    fixed-point equations to 1e-12.
    """
    validate_params(p)
    if (p.beta < 0.0 and p.gamma < 0.0
            and p.alpha * p.delta <= p.beta * p.gamma):
        raise NoDeterministicSolution(
            "beta < 0, gamma < 0 and alpha*delta <= beta*gamma")
    c2, d2 = _profile_squares(p)
    if not (c2 > 0.0 and d2 > 0.0):
        raise AssertionError(f"profile squares must be positive, got {c2}, {d2}")
    c = math.sqrt(c2)
    d = math.sqrt(d2)
    res_x = abs(0.5 * c - p.alpha / c - p.beta / d)
    res_y = abs(0.5 * d - p.gamma / c - p.delta / d)
    if max(res_x, res_y) > 1e-12:
        raise AssertionError(
            f"fixed-point residuals too large: {res_x:g}, {res_y:g}")
    return SqrtProfile(c, d)


def uniqueness_verdict(p: Params) -> UniquenessVerdict:
    """Uniqueness of the corner-started solution, by sign branch.

    epsilon = min(beta*(beta - gamma + r), gamma*(gamma - beta + r)) with
    r = sqrt((beta - gamma)^2 + 4*alpha*delta).  With beta, gamma >= 0
    uniqueness holds if beta*gamma < 2*alpha*delta + epsilon/2, otherwise
    open.  With beta, gamma <= 0 it holds if beta*gamma < alpha*delta and
    otherwise there is no solution at all.  Mixed signs are open.

    Tolerates the boundary alpha = delta = 0 (where the degenerate family
    lives) even though those parameters fail the standing positivity
    assumption everywhere else.
    """
    if not all(map(math.isfinite, (p.alpha, p.beta, p.gamma, p.delta))):
        raise NonPositiveInputs("parameters must be finite")
    if p.alpha < 0.0 or p.delta < 0.0:
        raise NonPositiveInputs("need alpha >= 0 and delta >= 0")
    r = math.sqrt((p.beta - p.gamma) ** 2 + 4.0 * p.alpha * p.delta)
    eps = min(p.beta * (p.beta - p.gamma + r), p.gamma * (p.gamma - p.beta + r))
    bg = p.beta * p.gamma
    ad = p.alpha * p.delta
    if p.beta >= 0.0 and p.gamma >= 0.0:
        unique = Unique.YES if bg < 2.0 * ad + 0.5 * eps else Unique.OPEN
        branch = SignBranch.NONNEG_BETA_GAMMA
    elif p.beta <= 0.0 and p.gamma <= 0.0:
        unique = Unique.YES if bg < ad else Unique.NO
        branch = SignBranch.NONPOS_BETA_GAMMA
    else:
        unique = Unique.OPEN
        branch = SignBranch.MIXED
    return UniquenessVerdict(epsilon=eps, unique=unique, branch=branch)


def zero_alpha_delta_family(beta: float, gamma: float, C: float,
                            t: float) -> tuple[float, float]:
    """Member of the non-uniqueness family for alpha = delta = 0:

        x(t) = C * t^(beta/(beta+gamma)),
        y(t) = ((beta+gamma)/C) * t^(gamma/(beta+gamma)),

    an exact solution for every C > 0 (hence a continuum of corner-started
    solutions).  Requires beta > 0, gamma > 0, C > 0, t >= 0.
    """
    if not (beta > 0.0 and gamma > 0.0 and C > 0.0):
        raise NonPositiveInputs("need beta > 0, gamma > 0, C > 0")
    if t < 0.0:
        raise NonPositiveInputs("need t >= 0")
    s = beta + gamma
    x = C * t ** (beta / s)
    y = (s / C) * t ** (gamma / s)
    return x, y


def integrate_deterministic(p: Params, grid: SimGrid,
                            seed_profile: ClosedForm | PerturbedStart = ClosedForm(),
                            clamp_coeff: float = 1e-2) -> PathSample:
    """Integrate the noise-free system over the grid.

    ``ClosedForm`` places the first node exactly on the square-root profile
    (the corner itself is singular, so the first step is seeded, not
    computed) and advances with the implicit scheme from there;
    ``PerturbedStart`` begins at a given interior point at t = 0.  Integral
    accumulators use the same clamped integrand as the stochastic scheme.
    """
    validate_params(p)
    dt = grid.dt
    n = grid.n_steps
    clamp = clamp_coeff * math.sqrt(dt)
    if isinstance(seed_profile, ClosedForm):
        prof = sqrt_profile(p)  # may raise NoDeterministicSolution
        sq = math.sqrt(dt)
        x1, y1, t1, n_rest = prof.c * sq, prof.d * sq, dt, n - 1
    else:
        x1, y1, t1, n_rest = seed_profile.x0, seed_profile.y0, 0.0, n
    times = np.empty(n_rest + 1)
    xs = np.empty(n_rest + 1)
    ys = np.empty(n_rest + 1)
    iix = np.empty(n_rest + 1)
    iiy = np.empty(n_rest + 1)
    _kernels.deterministic_loop(
        x1, y1, t1, n_rest, dt, p.alpha, p.beta, p.gamma, p.delta,
        clamp, times, xs, ys, iix, iiy)
    if isinstance(seed_profile, ClosedForm):
        # prepend the corner node; integrals are accumulated from t1 = dt on
        times = np.concatenate(([0.0], times))
        xs = np.concatenate(([0.0], xs))
        ys = np.concatenate(([0.0], ys))
        iix = np.concatenate(([0.0], iix))
        iiy = np.concatenate(([0.0], iiy))
    return PathSample(times=times, xs=xs, ys=ys, int_inv_x=iix, int_inv_y=iiy)


def comparison_solve(alpha: float, v: np.ndarray, grid: SimGrid) -> np.ndarray:
    """Solve the scalar singular equation x(t) = v(t) + alpha*int_0^t ds/x(s)
    for a continuous driver given by its values at the grid nodes (linear in
    between).

    Uses the implicit substep with b_extra = (v_{i+1} - v_i)/dt, so the
    output is strictly positive past any node where v > 0 and, crucially,
    monotone in the driver: if v2 - v1 is nondecreasing then the solution
    for v2 dominates the one for v1 at every node, exactly.
    """
    if not alpha > 0.0:
        raise ValueError("alpha must be > 0")
    v = np.ascontiguousarray(v, dtype=float)
    if v.ndim != 1 or v.size != grid.n_steps + 1:
        raise ValueError(f"v must hold {grid.n_steps + 1} grid-node values")
    if v[0] < 0.0:
        raise ValueError("v(0) must be >= 0")
    out = np.empty_like(v)
    _kernels.comparison_loop(alpha, v, grid.dt, out)
    return out
