"""Phase estimators: circular sample mean, sinc-refined ML, and dual-frequency.

The sinc-refined estimator (AML) takes the histogram peak as a rough
estimate and then grid-searches a sinc-approximated log-likelihood within
one resolution cell of it.  Its weakness is the mirror ambiguity: data
from a phase at displacement d from the nearest grid line looks almost
identical to data from the reflected phase at -d, so a fraction of
estimates lands on the wrong side.

The dual-frequency estimator removes the ambiguity by running AML twice,
once on samples taken as-is and once on samples taken with a half-cell
(pi/N) frequency offset.  Each run contributes its refined estimate and
the mirror of that estimate across the run's own grid line; the two grids
are staggered by half a cell, so only the true phase shows up in both
candidate pairs.  The final estimate is the circular midpoint of the
closest cross-run pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import TWO_PI, circ_distance, circ_midpoint, wrap_two_pi
from .model import Histogram, SampleSet, histogram

# Offsets within this of 0 resp. pi/N identify the two sample sets of the
# dual-frequency estimator.
_OFFSET_TOL = 1e-9

# Scale factor of the default O(sqrt(N_s)) refinement-grid rule.  The grid
# step is 4*pi/(N*N_g) over a fixed two-cell span, so with N_g ~ 8*sqrt(N_s)
# the step stays below the statistical error at every shot count and the
# refinement never becomes the accuracy floor.
GRID_RULE_CONSTANT = 8.0


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning knobs shared by the grid-search estimators.

    bins_kept:    number of highest-count histogram bins entering the
                  objective (ties broken toward the smaller index).
    grid_points:  explicit odd grid size for the refinement search, or None
                  for the default rule max(9, ceil(8*sqrt(N_s))) forced odd.
                  The search spans two resolution cells, so the step is
                  4*pi/(N*N_g); the constant 8 keeps that step below the
                  per-set statistical error, whose cell-units size falls
                  as 1/sqrt(N_s), so refinement noise never dominates.
    sinc_floor:   |sinc| is clamped here before the log so that grid points
                  colliding with a sinc zero stay finite.
    """

    bins_kept: int = 8
    grid_points: int | None = None
    sinc_floor: float = 1e-12

    def __post_init__(self):
        if self.bins_kept < 2:
            raise ValueError("bins_kept must be >= 2")
        if self.grid_points is not None:
            if self.grid_points < 3 or self.grid_points % 2 == 0:
                raise ValueError("grid_points must be odd and >= 3")
        if not 0.0 < self.sinc_floor < 1.0:
            raise ValueError("sinc_floor must be in (0, 1)")

    def resolve_grid_points(self, n_samples: int) -> int:
        if self.grid_points is not None:
            return self.grid_points
        g = max(9, math.ceil(GRID_RULE_CONSTANT * math.sqrt(max(n_samples, 0))))
        return g if g % 2 == 1 else g + 1


DEFAULT_CONFIG = EstimatorConfig()


def split_shot_counts(n_shots: int) -> tuple[int, int]:
    """Shot split for the dual-frequency estimator: first set gets ceil(N_s/2)."""
    if n_shots < 2:
        raise ValueError("dual-frequency estimation needs at least 2 shots")
    first = (n_shots + 1) // 2
    return first, n_shots - first


@dataclass(frozen=True)
class AmlResult:
    """Rough and refined estimates, both in the frame of the data's offset."""

    rough: float
    refined: float
    correction: float


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """The four intermediate dual-frequency candidates, reduced to [0, 2*pi)."""

    u: np.ndarray

    def __post_init__(self):
        u = wrap_two_pi(np.asarray(self.u, dtype=np.float64))
        if u.shape != (4,):
            raise ValueError("candidate vector must have exactly 4 entries")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)


@dataclass(frozen=True)
class DualFrequencyResult:
    """Estimate plus diagnostics of the matching step."""

    estimate: float
    candidates: CandidateSet
    matched_pair: tuple[int, int]
    aml_set1: AmlResult
    aml_set2: AmlResult


def circular_sample_mean(samples: SampleSet) -> float:
    """Circular mean of the naive per-sample phases 2*pi*y_i/N."""
    if len(samples) == 0:
        raise ValueError("sample set is empty")
    resultant = np.exp(2j * np.pi * samples.outcomes / samples.n_points).sum()
    if abs(resultant) < 1e-12 * len(samples):
        raise ValueError("circular mean undefined: zero resultant vector")
    return wrap_two_pi(float(np.angle(resultant)))


def rough_estimate(hist: Histogram) -> float:
    """Phase of the highest-count bin, 2*pi*argmax(z)/N (ties: smallest index)."""
    if hist.total < 1:
        raise ValueError("histogram is empty")
    return TWO_PI * int(np.argmax(hist.counts)) / hist.n_points


def aml_objective(
    hist: Histogram,
    phase: float,
    offset: float = 0.0,
    config: EstimatorConfig = DEFAULT_CONFIG,
) -> float:
    """Sinc-approximated log-likelihood of a phase hypothesis.

    Only the config.bins_kept highest-count bins contribute.  The bin
    displacement N*(phase + offset)/(2*pi) - k is wrapped to [-N/2, N/2).
    """
    bins, counts = _top_bins(hist.counts, config.bins_kept)
    position = hist.n_points * (phase + offset) / TWO_PI
    return float(_objective_at_positions(np.array([position]), bins, counts,
                                         hist.n_points, config.sinc_floor)[0])


def aml_estimate(
    hist: Histogram,
    offset: float = 0.0,
    config: EstimatorConfig = DEFAULT_CONFIG,
) -> AmlResult:
    """Histogram-peak estimate refined by a sinc grid search within one cell.

    Both returned phases estimate phi + offset (the effective phase the
    data was drawn under); the caller maps back to the phi frame.  The
    grid has resolve_grid_points(total) points spaced 4*pi/(N*N_g) around
    the rough estimate, so the rough value itself is always a grid point
    and the search never leaves [rough - 2*pi/N, rough + 2*pi/N].
    """
    rough = rough_estimate(hist)
    n = hist.n_points
    n_grid = config.resolve_grid_points(hist.total)
    half = (n_grid - 1) // 2
    offsets = (2.0 * TWO_PI / (n * n_grid)) * np.arange(-half, half + 1)

    bins, counts = _top_bins(hist.counts, config.bins_kept)
    positions = n * (rough + offsets) / TWO_PI
    scores = _objective_at_positions(positions, bins, counts, n, config.sinc_floor)
    best = int(np.argmax(scores))

    correction = float(offsets[best])
    refined = wrap_two_pi(rough + correction)
    return AmlResult(rough=rough, refined=refined, correction=correction)


def dual_frequency_estimate(
    set1: SampleSet,
    set2: SampleSet,
    config: EstimatorConfig = DEFAULT_CONFIG,
) -> float:
    """Ambiguity-free phase estimate from two half-cell-offset sample sets."""
    return dual_frequency_details(set1, set2, config).estimate


def dual_frequency_details(
    set1: SampleSet,
    set2: SampleSet,
    config: EstimatorConfig = DEFAULT_CONFIG,
) -> DualFrequencyResult:
    """Dual-frequency estimate with candidates and matching diagnostics.

    One input set must carry offset 0 and the other offset pi/N; argument
    order is irrelevant because the offset travels with the set.  The
    candidate vector is

        u = [r1 + e1,  r1 - e1,  r2' + e2,  r2' - e2]

    where (r1, e1) come from the plain set, (r2psi, e2) from the offset
    set, and r2' = r2psi - pi/N maps the offset-frame rough onto the
    half-staggered grid in the plain frame.  Candidates 3 and 4 are thus
    the offset run's refined estimate and its mirror, both expressed in
    the plain frame.  The closest pair across runs (never within a run)
    is matched; its circular midpoint is the estimate.
    """
    plain, shifted = _identify_sets(set1, set2)
    if len(plain) == 0 or len(shifted) == 0:
        raise ValueError("both sample sets must be nonempty")
    if plain.n_points != shifted.n_points:
        raise ValueError("sample sets must share the record length")
    n = plain.n_points
    half_cell = np.pi / n

    aml1 = aml_estimate(histogram(plain), 0.0, config)
    aml2 = aml_estimate(histogram(shifted), half_cell, config)

    rough2_plain = wrap_two_pi(aml2.rough - half_cell)
    candidates = CandidateSet(np.array([
        aml1.rough + aml1.correction,
        aml1.rough - aml1.correction,
        rough2_plain + aml2.correction,
        rough2_plain - aml2.correction,
    ]))

    pair = _closest_cross_pair(candidates.u)
    estimate = circ_midpoint(candidates.u[pair[0]], candidates.u[pair[1]])
    return DualFrequencyResult(
        estimate=float(estimate),
        candidates=candidates,
        matched_pair=pair,
        aml_set1=aml1,
        aml_set2=aml2,
    )


def _identify_sets(set1: SampleSet, set2: SampleSet) -> tuple[SampleSet, SampleSet]:
    """Sort the two sets into (offset 0, offset pi/N) by their recorded offsets."""
    def is_plain(s):
        return circ_distance(s.offset, 0.0) < _OFFSET_TOL

    def is_shifted(s):
        return circ_distance(s.offset, np.pi / s.n_points) < _OFFSET_TOL

    if is_plain(set1) and is_shifted(set2):
        return set1, set2
    if is_plain(set2) and is_shifted(set1):
        return set2, set1
    raise ValueError("need one sample set at offset 0 and one at offset pi/N")


def _closest_cross_pair(u: np.ndarray) -> tuple[int, int]:
    """Index pair (i in {0,1}, j in {2,3}) minimizing circular distance."""
    best = None
    best_dist = np.inf
    for i in (0, 1):
        for j in (2, 3):
            d = circ_distance(u[i], u[j])
            if d < best_dist:
                best = (i, j)
                best_dist = d
    return best


def _top_bins(counts: np.ndarray, bins_kept: int):
    """Indices and counts of the bins_kept highest-count nonzero bins."""
    n = counts.shape[0]
    order = np.lexsort((np.arange(n), -counts))
    chosen = order[:bins_kept]
    nonzero = counts[chosen] > 0
    return chosen[nonzero], counts[chosen[nonzero]].astype(np.float64)


def _objective_at_positions(positions, bins, counts, n_points, sinc_floor):
    """Vectorized objective: rows are candidate bin positions N*phi/(2*pi)."""
    delta = positions[:, None] - bins[None, :]
    delta = np.mod(delta + n_points / 2.0, n_points) - n_points / 2.0
    mag = np.abs(np.sinc(delta))
    return np.log(np.maximum(mag, sinc_floor)) @ counts
