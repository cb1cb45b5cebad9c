"""Shared domain types, parameter validation, and reproducible noise streams.

The process under study lives in the nonnegative quadrant and solves

    X_t = X_0 + B_t + alpha * int_0^t ds/X_s + beta * int_0^t ds/Y_s - mu*t
    Y_t = Y_0 + C_t + gamma * int_0^t ds/X_s + delta * int_0^t ds/Y_s - nu*t

with independent Brownian motions (B, C) and alpha > 0, delta > 0.  Everything
else in the package consumes the value records defined here.

Randomness is counter-based: a stream is a pure function of (seed, path_index),
so Monte Carlo results cannot depend on scheduling or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox


class ParameterError(ValueError):
    """Base class for invalid model parameters."""


class NonPositiveAlphaDelta(ParameterError):
    """The diagonal repulsion strengths must satisfy alpha > 0 and delta > 0."""


class NonFiniteParameter(ParameterError):
    """NaN or infinity where a finite real is required."""


@dataclass(frozen=True)
class Params:
    """The four repulsion constants (alpha, beta, gamma, delta).

    The standing assumption is alpha > 0, delta > 0 (each wall repels along
    its own normal); beta and gamma are the oblique components and may take
    any sign.  Construction does not validate -- call :func:`validate_params`
    at entry points.  A few boundary analyses (e.g. the degenerate
    alpha = delta = 0 family of the deterministic system) deliberately build
    records that would fail validation.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    def swapped(self) -> "Params":
        """Parameters of the relabeled system with the two coordinates exchanged."""
        return Params(self.delta, self.gamma, self.beta, self.alpha)


@dataclass(frozen=True)
class Drift:
    """Constant drift magnitudes (mu, nu); the drift vector is (-mu, -nu).

    (0, 0) means no drift (the driftless system).
    """

    mu: float = 0.0
    nu: float = 0.0


ZERO_DRIFT = Drift(0.0, 0.0)


@dataclass(frozen=True)
class State:
    """A point (x, y) of the quadrant at time t."""

    x: float
    y: float
    t: float = 0.0


@dataclass(frozen=True)
class SimGrid:
    """Uniform time grid: step dt, horizon t_end, n_steps = ceil(t_end/dt)."""

    dt: float
    t_end: float

    def __post_init__(self):
        if not (math.isfinite(self.dt) and math.isfinite(self.t_end)):
            raise NonFiniteParameter("grid dt and t_end must be finite")
        if self.dt <= 0.0 or self.t_end <= 0.0:
            raise ValueError("grid requires dt > 0 and t_end > 0")
        if self.dt > self.t_end:
            raise ValueError("grid requires dt <= t_end")

    @property
    def n_steps(self) -> int:
        # small slack absorbs binary representation fuzz in t_end/dt
        return int(math.ceil(self.t_end / self.dt - 1e-9))


@dataclass(frozen=True)
class PathSample:
    """A discretized trajectory with accumulated singular integrals.

    ``int_inv_x[k]`` and ``int_inv_y[k]`` are trapezoidal estimates of
    int_0^{times[k]} ds/X and ds/Y with the integrand clamped at the same
    floor the integrator uses for the cross drift, so the recorded identity
    X_t ~= X_0 + B_t + alpha*int_inv_x + beta*int_inv_y - mu*t holds to
    one-step truncation error.

    ``x_hit``/``y_hit``/``corner_hit`` are the first grid times t > 0 at
    which the coordinate's step predictor (or both at once) fell below the
    numerical-hit threshold, or None.
    """

    times: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    int_inv_x: np.ndarray
    int_inv_y: np.ndarray
    x_hit: float | None = None
    y_hit: float | None = None
    corner_hit: float | None = None

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class RngStream:
    """Key of a counter-based noise stream: (seed, path_index).

    The increment sequence is a pure function of the key; distinct
    path_index values give statistically independent streams.
    """

    seed: int
    path_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be an unsigned 64-bit integer")
        if self.path_index < 0:
            raise ParameterError("path_index must be >= 0")

    def generator(self) -> Generator:
        """A fresh generator positioned at the start of this stream."""
        return Generator(Philox(key=[int(self.seed), int(self.path_index)]))


def validate_params(p: Params) -> Params:
    """Return ``p`` unchanged if alpha > 0, delta > 0 and all four values are finite.

    Raises
    ------
    NonFiniteParameter
        if any of the four constants is NaN or infinite.
    NonPositiveAlphaDelta
        if alpha <= 0 or delta <= 0.
    """
    vals = (p.alpha, p.beta, p.gamma, p.delta)
    if not all(math.isfinite(v) for v in vals):
        raise NonFiniteParameter(f"parameters must be finite, got {vals}")
    if p.alpha <= 0.0 or p.delta <= 0.0:
        raise NonPositiveAlphaDelta(
            f"need alpha > 0 and delta > 0, got alpha={p.alpha}, delta={p.delta}"
        )
    return p


def validate_drift(d: Drift) -> Drift:
    """Return ``d`` unchanged if both components are finite."""
    if not (math.isfinite(d.mu) and math.isfinite(d.nu)):
        raise NonFiniteParameter(f"drift must be finite, got ({d.mu}, {d.nu})")
    return d


def gaussian_increments(stream: RngStream, grid: SimGrid) -> np.ndarray:
    """Brownian increments (dB, dC) for one path, shape (n_steps, 2).

    Each component is N(0, dt).  The sequence is reproducible from
    (seed, path_index, grid) and bit-identical to what the compiled
    integrator kernels draw internally from the same stream.
    """
    z = stream.generator().standard_normal((grid.n_steps, 2))
    return z * math.sqrt(grid.dt)
