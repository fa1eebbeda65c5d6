"""Circular (mod 2*pi) arithmetic used throughout the toolkit.

Phases live on the circle, so every comparison, error and midpoint has to
be wrap-aware.  The canonical distance is d(a, b) = min_m |a - b + 2*pi*m|.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_two_pi(x):
    """Reduce an angle (scalar or array) to [0, 2*pi)."""
    r = np.mod(x, TWO_PI)
    # np.mod(-tiny, 2*pi) rounds up to exactly 2*pi; fold it back to 0
    return np.where(r >= TWO_PI, 0.0, r) if np.ndim(r) else (0.0 if r >= TWO_PI else r)


def wrap_pm_pi(x):
    """Reduce an angle (scalar or array) to (-pi, pi]."""
    r = np.mod(x, TWO_PI)
    return np.where(r > np.pi, r - TWO_PI, r) if np.ndim(r) else (r - TWO_PI if r > np.pi else r)


def circ_distance(a, b):
    """Circular distance |wrap(a - b)|, in [0, pi]."""
    return np.abs(wrap_pm_pi(a - b))


def circ_signed_error(estimate, truth):
    """Signed wrap-aware error estimate - truth, in (-pi, pi]."""
    return wrap_pm_pi(estimate - truth)


def circ_midpoint(a, b):
    """Midpoint of the short arc from a to b, reduced to [0, 2*pi)."""
    return wrap_two_pi(a + 0.5 * wrap_pm_pi(b - a))
