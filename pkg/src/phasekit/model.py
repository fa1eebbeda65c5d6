"""Exact outcome statistics of windowed phase readout, and seeded sampling.

For a window alpha and effective phase phi + delta, the probability of
reading outcome y from an N-point register is

    f(y) = (1/N) * | sum_n alpha_n * exp(j*n*(phi + delta - 2*pi*y/N)) |^2

The flat window admits the closed form sin^2(N*t/2) / (N^2 * sin^2(t/2));
general windows are evaluated with an FFT, which is the same sum computed
exactly.  The optional offset delta models a half-cell frequency shift of
the register (implemented physically by per-qubit phase rotations); it
enters the statistics only through phi + delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .angles import TWO_PI
from .rng import make_generator
from .windows import WindowVector

PROB_SUM_TOL = 1e-10

# |sin(t/2)| below this switches the closed form to its removable-singularity
# limit (value 1); keeps on-grid phases exact in double precision.
_SINGULARITY_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class PhaseDistribution:
    """Outcome probability vector for one (window, phase, offset) triple."""

    n_points: int
    phase: float
    offset: float
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (self.n_points,):
            raise ValueError("probs must have length n_points")
        total = float(p.sum())
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        if p.min() < -1e-15:
            raise ValueError("negative probability beyond roundoff")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Measurement outcomes y_i in {0..N-1}, with the offset they were drawn under."""

    n_points: int
    outcomes: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        y = np.asarray(self.outcomes, dtype=np.int64)
        if y.size and (y.min() < 0 or y.max() >= self.n_points):
            raise ValueError("outcomes outside [0, n_points)")
        y.setflags(write=False)
        object.__setattr__(self, "outcomes", y)

    def __len__(self):
        return self.outcomes.size


@dataclass(frozen=True, eq=False)
class Histogram:
    """Outcome counts z over {0..N-1}; total is the shot count."""

    n_points: int
    counts: np.ndarray
    total: int

    def __post_init__(self):
        z = np.asarray(self.counts, dtype=np.int64)
        if z.shape != (self.n_points,):
            raise ValueError("counts must have length n_points")
        if z.min() < 0:
            raise ValueError("counts must be nonnegative")
        if int(z.sum()) != self.total:
            raise ValueError("counts do not sum to total")
        z.setflags(write=False)
        object.__setattr__(self, "counts", z)


def distribution(window: WindowVector, phase: float, offset: float = 0.0) -> PhaseDistribution:
    """Exact outcome distribution for a window at effective phase phase + offset."""
    if not np.isfinite(phase) or not np.isfinite(offset):
        raise ValueError("phase and offset must be finite")
    n = window.n_points
    effective = phase + offset
    if window.kind == "rect":
        probs = _rect_probs(n, effective)
    else:
        probs = _window_probs(window.weights, effective)
    probs = np.maximum(probs, 0.0)
    return PhaseDistribution(n, phase, offset, probs)


def _rect_probs(n: int, effective: float) -> np.ndarray:
    theta = effective - TWO_PI * np.arange(n) / n
    half = 0.5 * theta
    s = np.sin(half)
    on_grid = np.abs(s) < _SINGULARITY_EPS
    denom = np.where(on_grid, 1.0, s)
    probs = np.sin(n * half) ** 2 / (n * n * denom * denom)
    probs[on_grid] = 1.0
    return probs


def _window_probs(weights: np.ndarray, effective: float) -> np.ndarray:
    n = weights.shape[0]
    ramp = weights * np.exp(1j * effective * np.arange(n))
    # fft[y] = sum_n ramp_n * exp(-2j*pi*n*y/N), exactly the amplitude sum
    return np.abs(np.fft.fft(ramp)) ** 2 / n


def sample(dist: PhaseDistribution, n_shots: int, seed: int) -> SampleSet:
    """Draw n_shots i.i.d. outcomes by inverse CDF; bit-reproducible per seed."""
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    return sample_with_rng(dist, n_shots, make_generator(seed))


def sample_with_rng(dist: PhaseDistribution, n_shots: int, rng: np.random.Generator) -> SampleSet:
    """Inverse-CDF sampling from an explicit generator (shared stream use)."""
    probs = np.maximum(dist.probs, 0.0)
    total = probs.sum()
    if total <= 0.0:
        raise ValueError("degenerate distribution: no positive probability mass")
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = rng.random(n_shots)
    outcomes = np.searchsorted(cdf, u, side="right")
    np.minimum(outcomes, dist.n_points - 1, out=outcomes)
    return SampleSet(dist.n_points, outcomes, offset=dist.offset)


def histogram(samples: SampleSet) -> Histogram:
    """Count occurrences of each outcome."""
    counts = np.bincount(samples.outcomes, minlength=samples.n_points)
    return Histogram(samples.n_points, counts, int(counts.sum()))
