"""One-step-lookahead movement planning on the sensing grid.

The planner scores a position by how costly the remaining search looks
from there: distance to the current source estimate plus an uncertainty
term, the cloud entropy scaled by a weight that tracks belief spread. A
candidate move is judged by the expected score after one hypothetical
measurement taken there, averaging over the posterior-predictive count
distribution. The agent then picks the grid direction with the largest
expected improvement.

Step length along the chosen direction adapts to plume coverage: when
plume cells are sparse in the volume, several grid cells per move are
allowed, discouraged near previously measured regions by a revisit
penalty counted on nested spheres spanning the candidate leg.
"""

from __future__ import annotations

import math
from itertools import product

import numpy as np
from scipy.special import xlogy

from .filtering import ParticleCloud, estimate_source
from .plume import PlumeParams, SearchVolume, encounter_rates

__all__ = [
    "DIRECTIONS",
    "MeasurementLog",
    "direction_index",
    "feasible_directions",
    "entropy",
    "distance_to_estimate",
    "value_function",
    "expected_next_value",
    "choose_direction",
    "max_step",
    "sphere_point_counts",
    "choose_step",
]

# All 26 neighbor offsets of a grid cell, lexicographically ordered; the
# order is the tie-break rule and the stable index used in trajectory rows.
DIRECTIONS: tuple[tuple[int, int, int], ...] = tuple(
    o for o in product((-1, 0, 1), repeat=3) if o != (0, 0, 0)
)
_DIRECTION_INDEX = {o: i for i, o in enumerate(DIRECTIONS)}


def direction_index(offset: tuple[int, int, int]) -> int:
    return _DIRECTION_INDEX[tuple(offset)]


class MeasurementLog:
    """Append-only record of where an agent has already measured."""

    def __init__(self) -> None:
        self._points: list[np.ndarray] = []

    def append(self, point: np.ndarray) -> None:
        self._points.append(np.asarray(point, dtype=float).copy())

    def __len__(self) -> int:
        return len(self._points)

    def as_array(self) -> np.ndarray:
        if not self._points:
            return np.zeros((0, 3))
        return np.stack(self._points)


def feasible_directions(pos: np.ndarray,
                        volume: SearchVolume) -> list[tuple[int, int, int]]:
    """Directions whose one-cell endpoint stays inside the volume."""
    g = volume.grid_edge
    tol = g * 1e-9
    p = np.asarray(pos, dtype=float)
    return [o for o in DIRECTIONS
            if volume.contains(p + g * np.array(o, float), tol=tol)]


def entropy(weights: np.ndarray) -> float:
    """Shannon entropy of the weight vector, 0 log 0 = 0."""
    w = np.asarray(weights, dtype=float)
    return float(-xlogy(w, w).sum())


def distance_to_estimate(pos: np.ndarray, cloud: ParticleCloud) -> float:
    return float(np.linalg.norm(np.asarray(pos, float)
                                - estimate_source(cloud)))


def value_function(pos: np.ndarray, cloud: ParticleCloud,
                   h1: float) -> float:
    """Search cost proxy at a position: distance to the estimate plus
    entropy weighted by ``h1``."""
    return distance_to_estimate(pos, cloud) + h1 * entropy(cloud.weights)


def expected_next_value(candidate: np.ndarray, cloud: ParticleCloud,
                        plume: PlumeParams, h1: float,
                        cdf_target: float = 0.999,
                        d_cap: int = 50) -> float:
    """Expected cost after one hypothetical measurement at ``candidate``.

    Counts are averaged over the posterior-predictive law of the agent's
    own next detection; for each count the cloud is reweighted in place
    and rescored. The count range stops at the smallest value whose
    predictive CDF reaches ``cdf_target``, never above ``d_cap``.
    """
    cand = np.asarray(candidate, dtype=float)
    rates = encounter_rates(cand, cloud.positions, plume)
    mu = rates * plume.sense_interval
    w = cloud.weights
    positions = cloud.positions

    pmf = np.exp(-mu)
    expected = 0.0
    cdf = 0.0
    d = 0
    while True:
        wp = w * pmf
        mass = float(wp.sum())
        if mass > 0.0:
            post = wp / mass
            ent = float(-xlogy(post, post).sum())
            est = post @ positions
            dist = float(np.linalg.norm(cand - est))
            expected += mass * (dist + h1 * ent)
            cdf += mass
        if cdf >= cdf_target or d >= d_cap:
            break
        d += 1
        pmf = pmf * (mu / d)
    return expected


def choose_direction(pos: np.ndarray, cloud: ParticleCloud,
                     plume: PlumeParams, volume: SearchVolume,
                     h1: float) -> tuple[int, int, int]:
    """Grid direction with the largest expected one-step improvement.

    Equal rewards resolve to the lexicographically smallest offset because
    candidates are scanned in that order and only strict improvements
    replace the incumbent.
    """
    g = volume.grid_edge
    tol = g * 1e-9
    p = np.asarray(pos, dtype=float)
    best: tuple[int, int, int] | None = None
    best_value = math.inf
    for offset in DIRECTIONS:
        cand = p + g * np.array(offset, float)
        if not volume.contains(cand, tol=tol):
            continue
        value = expected_next_value(cand, cloud, plume, h1)
        if value < best_value:
            best_value = value
            best = offset
    if best is None:
        raise ValueError("no feasible direction from position "
                         f"{p.tolist()} in volume {volume}")
    return best


def max_step(coverage: float, ceiling: int = 10) -> int:
    """Longest step allowed for a given plume cell coverage fraction.

    Dense plumes (coverage >= 0.1) force single-cell moves; sparser ones
    allow floor(0.1 / coverage) cells, always at least one and never more
    than the ceiling. Zero coverage means the plume is invisible on the
    grid and the ceiling applies.
    """
    if coverage < 0.0:
        raise ValueError("coverage must be non-negative")
    if coverage >= 0.1:
        return 1
    if coverage == 0.0:
        return ceiling
    # Tiny float guard so exact decimal ratios land on their integer.
    raw = int(math.floor(0.1 / coverage + 1e-9))
    return max(1, min(ceiling, raw))


def sphere_point_counts(pos: np.ndarray, offset: tuple[int, int, int],
                        log_points: np.ndarray, grid_edge: float,
                        l_max: int) -> np.ndarray:
    """Fresh measurement-point counts on nested spheres along a leg.

    Sphere ``l`` has the segment from ``pos`` to the l-cell endpoint as a
    diameter. Entry ``l-1`` of the result counts logged points strictly
    inside sphere ``l`` but outside sphere ``l-1``; the spheres are nested
    so the counts are non-negative.
    """
    counts = np.zeros(l_max, dtype=int)
    pts = np.asarray(log_points, dtype=float)
    if len(pts) == 0:
        return counts
    p = np.asarray(pos, dtype=float)
    step = grid_edge * np.array(offset, dtype=float)
    half_norm = 0.5 * float(np.linalg.norm(step))
    prev_inside = 0
    for l in range(1, l_max + 1):
        center = p + 0.5 * l * step
        radius = l * half_norm
        inside = int(np.count_nonzero(
            np.linalg.norm(pts - center[None, :], axis=1) < radius
        ))
        counts[l - 1] = inside - prev_inside
        prev_inside = inside
    return counts


def choose_step(pos: np.ndarray, offset: tuple[int, int, int],
                cloud: ParticleCloud, log_points: np.ndarray,
                volume: SearchVolume, l_max: int, h2: float) -> int:
    """Step length in cells along ``offset`` minimizing endpoint distance
    to the estimate plus the revisit penalty ``h2`` per fresh sphere point.

    Lengths whose endpoints leave the volume are excluded; ties take the
    shortest length. If nothing is feasible the caller gets a single-cell
    step and is expected to clamp the endpoint.
    """
    p = np.asarray(pos, dtype=float)
    est = estimate_source(cloud)
    g = volume.grid_edge
    tol = g * 1e-9
    step_vec = g * np.array(offset, dtype=float)
    fresh = sphere_point_counts(p, offset, log_points, g, l_max)
    best_l = 0
    best_score = math.inf
    for l in range(1, l_max + 1):
        end = p + l * step_vec
        if not volume.contains(end, tol=tol):
            continue
        score = float(np.linalg.norm(end - est)) + h2 * float(fresh[l - 1])
        if score < best_score:
            best_score = score
            best_l = l
    return best_l if best_l > 0 else 1
