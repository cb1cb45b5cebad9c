"""Core value types: parameter validation, time grids, reproducible streams."""

import math

import numpy as np
import pytest

from obliquebm import (
    Drift,
    NonFiniteParameter,
    NonPositiveAlphaDelta,
    ParameterError,
    Params,
    PathSample,
    RngStream,
    SimGrid,
    ZERO_DRIFT,
    gaussian_increments,
    validate_drift,
    validate_params,
)


# ---------------------------------------------------------------- parameters

def test_validate_params_accepts_positive_diagonal():
    p = Params(1.0, 0.0, 0.0, 1.0)
    assert validate_params(p) is p


def test_validate_params_rejects_nonpositive_diagonal():
    with pytest.raises(NonPositiveAlphaDelta):
        validate_params(Params(0.0, 1.0, 1.0, 1.0))
    with pytest.raises(NonPositiveAlphaDelta):
        validate_params(Params(1.0, 1.0, 1.0, 0.0))
    with pytest.raises(NonPositiveAlphaDelta):
        validate_params(Params(-0.5, 0.0, 0.0, 1.0))


def test_validate_params_rejects_non_finite():
    with pytest.raises(NonFiniteParameter):
        validate_params(Params(1.0, math.nan, 0.0, 1.0))
    with pytest.raises(NonFiniteParameter):
        validate_params(Params(1.0, 0.0, math.inf, 1.0))


def test_parameter_errors_are_value_errors():
    assert issubclass(NonPositiveAlphaDelta, ParameterError)
    assert issubclass(NonFiniteParameter, ParameterError)
    assert issubclass(ParameterError, ValueError)


def test_swapped_relabels_coordinates():
    p = Params(1.0, 2.0, 3.0, 4.0)
    assert p.swapped() == Params(4.0, 3.0, 2.0, 1.0)
    assert p.swapped().swapped() == p


def test_validate_drift():
    assert validate_drift(ZERO_DRIFT) is ZERO_DRIFT
    assert validate_drift(Drift(-3.0, 2.0)) == Drift(-3.0, 2.0)
    with pytest.raises(NonFiniteParameter):
        validate_drift(Drift(math.nan, 0.0))


# ---------------------------------------------------------------------- grid

def test_grid_step_counts():
    assert SimGrid(0.25, 1.0).n_steps == 4
    assert SimGrid(0.3, 1.0).n_steps == 4          # ceil(10/3)
    assert SimGrid(1e-4, 1.0).n_steps == 10_000    # no fp spillover to 10001
    assert SimGrid(1e-3, 1.0).n_steps == 1_000
    assert SimGrid(0.1, 0.1).n_steps == 1


def test_grid_rejects_bad_inputs():
    with pytest.raises(ValueError):
        SimGrid(0.0, 1.0)
    with pytest.raises(ValueError):
        SimGrid(1e-3, -1.0)
    with pytest.raises(ValueError):
        SimGrid(2.0, 1.0)          # dt > t_end
    with pytest.raises(NonFiniteParameter):
        SimGrid(math.nan, 1.0)


# ------------------------------------------------------------------- streams

def test_stream_key_range():
    RngStream(0, 0)
    RngStream(2**64 - 1, 2**64 - 1)
    with pytest.raises(ValueError):
        RngStream(-1, 0)
    with pytest.raises(ValueError):
        RngStream(2**64, 0)
    with pytest.raises(ValueError):
        RngStream(0, -1)


def test_increments_are_reproducible():
    grid = SimGrid(1e-3, 0.5)
    a = gaussian_increments(RngStream(42, 3), grid)
    b = gaussian_increments(RngStream(42, 3), grid)
    assert a.shape == (500, 2)
    assert np.array_equal(a, b)
    c = gaussian_increments(RngStream(42, 4), grid)
    assert not np.array_equal(a, c)


def test_streams_with_different_path_index_are_uncorrelated():
    grid = SimGrid(1e-3, 100.0)    # 1e5 increments
    a = gaussian_increments(RngStream(1, 0), grid)[:, 0]
    b = gaussian_increments(RngStream(1, 1), grid)[:, 0]
    corr = np.corrcoef(a, b)[0, 1]
    assert abs(corr) < 0.02


def test_increment_variance_matches_dt():
    grid = SimGrid(0.01, 5000.0)   # 5e5 steps -> 1e6 draws
    incr = gaussian_increments(RngStream(7, 0), grid)
    var = float(np.var(incr))
    assert abs(var - 0.01) / 0.01 < 0.01
    # mean within 5 standard errors of zero
    assert abs(float(np.mean(incr))) < 5 * 0.1 / math.sqrt(incr.size)


# ---------------------------------------------------------------- PathSample

def test_path_sample_len():
    t = np.linspace(0.0, 1.0, 11)
    z = np.zeros(11)
    sample = PathSample(times=t, xs=z, ys=z, int_inv_x=z, int_inv_y=z)
    assert len(sample) == 11
    assert sample.x_hit is None and sample.corner_hit is None
