"""Noise-free singular system: square-root profiles, uniqueness thresholds,
the zero-diagonal non-uniqueness family, integration, comparison oracle."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from obliquebm import (
    ClosedForm,
    NoDeterministicSolution,
    NonPositiveInputs,
    Params,
    PerturbedStart,
    SignBranch,
    SimGrid,
    Unique,
    comparison_solve,
    integrate_deterministic,
    sqrt_profile,
    uniqueness_verdict,
    zero_alpha_delta_family,
)


# ----------------------------------------------------------------- profiles

def test_sqrt_profile_closed_forms():
    prof = sqrt_profile(Params(1.0, 0.0, 0.0, 1.0))
    assert prof.c == math.sqrt(2.0) and prof.d == math.sqrt(2.0)
    prof = sqrt_profile(Params(1.0, 1.0, 1.0, 1.0))
    assert prof.c == 2.0 and prof.d == 2.0
    prof = sqrt_profile(Params(1.0, -0.5, -0.5, 1.0))
    assert prof.c == 1.0 and prof.d == 1.0


def test_sqrt_profile_residuals_over_random_draws():
    # includes the cancellation-prone beta < 0 branch; the constructor
    # asserts residuals <= 1e-12 internally, re-checked here directly.
    rng = np.random.default_rng(1234)
    checked = 0
    while checked < 10_000:
        a, d = rng.uniform(0.05, 3.0, 2)
        b, g = rng.uniform(-2.0, 2.0, 2)
        if b < 0.0 and g < 0.0 and a * d <= b * g:
            continue                      # no solution regime
        p = Params(a, b, g, d)
        prof = sqrt_profile(p)
        assert prof.c > 0.0 and prof.d > 0.0
        rx = abs(0.5 * prof.c - a / prof.c - b / prof.d)
        ry = abs(0.5 * prof.d - g / prof.c - d / prof.d)
        assert max(rx, ry) <= 1e-12
        checked += 1


def test_sqrt_profile_no_solution():
    with pytest.raises(NoDeterministicSolution):
        sqrt_profile(Params(1.0, -1.0, -1.0, 1.0))
    with pytest.raises(NoDeterministicSolution):
        sqrt_profile(Params(0.5, -2.0, -2.0, 0.5))


# --------------------------------------------------------------- uniqueness

def test_uniqueness_verdicts():
    v = uniqueness_verdict(Params(1.0, 1.0, 1.0, 1.0))
    assert v.epsilon == 2.0
    assert v.unique is Unique.YES and v.branch is SignBranch.NONNEG_BETA_GAMMA

    v = uniqueness_verdict(Params(1.0, -0.5, -0.5, 1.0))
    assert v.unique is Unique.YES and v.branch is SignBranch.NONPOS_BETA_GAMMA

    v = uniqueness_verdict(Params(1.0, -1.0, -1.0, 1.0))
    assert v.unique is Unique.NO          # no solution at all past the bound

    v = uniqueness_verdict(Params(1.0, 0.5, -0.5, 1.0))
    assert v.unique is Unique.OPEN and v.branch is SignBranch.MIXED


def test_uniqueness_tolerates_zero_diagonal():
    # the degenerate family lives at alpha = delta = 0; epsilon = 0 there
    # and the question is open (and in fact answered negatively below).
    v = uniqueness_verdict(Params(0.0, 1.0, 1.0, 0.0))
    assert v.epsilon == 0.0 and v.unique is Unique.OPEN


# ------------------------------------------------- zero-diagonal family

def test_zero_alpha_delta_family_values():
    assert zero_alpha_delta_family(1.0, 1.0, 1.0, 4.0) == (2.0, 4.0)
    assert zero_alpha_delta_family(1.0, 1.0, 2.0, 4.0) == (4.0, 2.0)
    assert zero_alpha_delta_family(1.0, 1.0, 1.0, 0.0) == (0.0, 0.0)
    with pytest.raises(NonPositiveInputs):
        zero_alpha_delta_family(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(NonPositiveInputs):
        zero_alpha_delta_family(1.0, 1.0, 1.0, -0.5)


def test_zero_alpha_delta_family_solves_the_integral_system():
    beta, gamma, C, t = 1.3, 0.7, 1.7, 2.0
    x_t, y_t = zero_alpha_delta_family(beta, gamma, C, t)
    ix = quad(lambda s: 1.0 / zero_alpha_delta_family(beta, gamma, C, s)[1],
              0.0, t)[0]
    iy = quad(lambda s: 1.0 / zero_alpha_delta_family(beta, gamma, C, s)[0],
              0.0, t)[0]
    assert abs(beta * ix - x_t) <= 1e-8 * max(1.0, x_t)
    assert abs(gamma * iy - y_t) <= 1e-8 * max(1.0, y_t)
    # a continuum of corner-started solutions: every C works
    x2, _ = zero_alpha_delta_family(beta, gamma, 2.0 * C, t)
    assert x2 != x_t


# -------------------------------------------------------------- integration

def test_integrate_closed_form_seed():
    path = integrate_deterministic(Params(1.0, 1.0, 1.0, 1.0),
                                   SimGrid(1e-4, 1.0))
    assert path.times[0] == 0.0 and path.xs[0] == 0.0
    assert abs(path.xs[-1] - 2.0) / 2.0 < 1e-4       # measured ~3.1e-6
    assert abs(path.ys[-1] - 2.0) / 2.0 < 1e-4

    with pytest.raises(NoDeterministicSolution):
        integrate_deterministic(Params(1.0, -1.0, -1.0, 1.0),
                                SimGrid(1e-4, 1.0))


def test_integrate_perturbed_start_converges_to_profile():
    path = integrate_deterministic(Params(1.0, 0.0, 0.0, 1.0),
                                   SimGrid(1e-5, 1.0),
                                   seed_profile=PerturbedStart(0.1, 0.1))
    # decoupled ODE: x(t) = sqrt(x0^2 + 2t) -> close to sqrt(2) by t = 1
    assert abs(path.xs[-1] - math.sqrt(2.0)) < 1e-2
    assert abs(path.xs[-1] - math.sqrt(2.01)) < 1e-4
    with pytest.raises(ValueError):
        PerturbedStart(0.0, 1.0)


def test_integrate_error_at_least_halves_when_dt_quarters():
    errs = []
    for dt in (4e-4, 1e-4):
        path = integrate_deterministic(Params(1.0, 1.0, 1.0, 1.0),
                                       SimGrid(dt, 1.0))
        errs.append(abs(path.xs[-1] - 2.0) / 2.0)
    assert errs[1] <= 0.6 * errs[0]       # observed ratio ~0.25


def test_integrate_scaling_fixed_point():
    # x(c^2 t)/c is the same discrete path on the rescaled grid, exactly.
    p = Params(1.0, 0.5, -0.25, 1.0)
    base = integrate_deterministic(p, SimGrid(1e-3, 0.5))
    scaled = integrate_deterministic(p, SimGrid(4e-3, 2.0))
    assert np.array_equal(scaled.times, 4.0 * base.times)
    assert np.array_equal(scaled.xs, 2.0 * base.xs)
    assert np.array_equal(scaled.ys, 2.0 * base.ys)


# ------------------------------------------------------------- comparison

def test_comparison_solve_reproduces_sqrt():
    grid = SimGrid(1e-6, 1.0)
    v = np.zeros(grid.n_steps + 1)
    x = comparison_solve(1.0, v, grid)
    assert abs(x[-1] - math.sqrt(2.0)) / math.sqrt(2.0) < 1e-3


def test_comparison_solve_orders_simple_drivers():
    grid = SimGrid(1e-4, 1.0)
    t = np.linspace(0.0, 1.0, grid.n_steps + 1)
    x1 = comparison_solve(1.0, np.zeros_like(t), grid)
    x2 = comparison_solve(1.0, t, grid)
    assert np.all(x2 >= x1)
    assert x2[-1] > x1[-1]


def test_comparison_solve_orders_random_driver_pairs():
    grid = SimGrid(1e-4, 1.0)
    rng = np.random.default_rng(40)
    t = np.linspace(0.0, 1.0, grid.n_steps + 1)
    knots = np.linspace(0.0, 1.0, 11)
    for _ in range(20):
        v1k = rng.uniform(0.0, 1.0) + np.concatenate(
            ([0.0], np.cumsum(rng.uniform(-1.0, 1.0, 10))))
        gk = rng.uniform(0.0, 0.5) + np.concatenate(
            ([0.0], np.cumsum(rng.uniform(0.0, 1.0, 10))))
        v1 = np.interp(t, knots, v1k)
        v2 = v1 + np.interp(t, knots, gk)     # v2 - v1 nondecreasing
        x1 = comparison_solve(1.0, v1, grid)
        x2 = comparison_solve(1.0, v2, grid)
        assert x1.min() > 0.0
        assert np.all(x2 >= x1)
