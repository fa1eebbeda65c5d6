import numpy as np
from hypothesis import given, settings, strategies as st

from phasekit.angles import (
    TWO_PI,
    circ_distance,
    circ_midpoint,
    circ_signed_error,
    wrap_pm_pi,
    wrap_two_pi,
)

finite_angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(finite_angles)
def test_wrap_ranges(x):
    assert 0.0 <= wrap_two_pi(x) < TWO_PI
    assert -np.pi < wrap_pm_pi(x) <= np.pi


def test_wrap_pm_pi_boundaries():
    assert wrap_pm_pi(np.pi) == np.pi
    assert wrap_pm_pi(-np.pi) == np.pi


@settings(max_examples=200, deadline=None)
@given(finite_angles, finite_angles)
def test_distance_symmetric_and_bounded(a, b):
    d = circ_distance(a, b)
    assert 0.0 <= d <= np.pi
    assert np.isclose(d, circ_distance(b, a), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(finite_angles, st.floats(min_value=-3.0, max_value=3.0, allow_nan=False))
def test_signed_error_recovers_offset(truth, delta):
    err = circ_signed_error(truth + delta, truth)
    assert np.isclose(circ_distance(truth + delta, truth), abs(err), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(finite_angles, st.floats(min_value=-3.0, max_value=3.0, allow_nan=False))
def test_midpoint_equidistant(a, delta):
    b = a + delta
    mid = circ_midpoint(a, b)
    assert np.isclose(circ_distance(mid, a), circ_distance(mid, b), atol=1e-9)


def test_midpoint_across_wrap():
    # short arc from 2pi - 0.1 to +0.1 passes through zero
    assert np.isclose(circ_midpoint(TWO_PI - 0.1, 0.1), 0.0, atol=1e-12)
