"""Steady advection-diffusion plume field and Poisson odor detection.

A point source releases particles at a constant rate into a uniform wind
blowing along -y. Particles diffuse isotropically and decay with a finite
lifetime, which gives the classic cigar-shaped mean concentration field:
stretched downwind, thin crosswind. A spherical sensor of radius ``a``
intercepts particles as a Poisson process whose mean over one sensing
interval is ``rate * dt``.

The mean encounter rate seen by a sensor at ``u`` for a source at ``r_s`` is

    rate(u) = (a * Q / |u - r_s|)
              * exp(-(u_y - r_s_y) * V / (2 D))
              * exp(-|u - r_s| / lam)

with the plume length scale ``lam = sqrt(D tau / (1 + V^2 tau / (4 D)))``.
Positions are metres, rates are events per second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

__all__ = [
    "PlumeParams",
    "SearchVolume",
    "SourceConfig",
    "Detection",
    "typical_length",
    "mean_encounter_rate",
    "encounter_rates",
    "rate_field",
    "detection_pmf",
    "log_detection_pmf",
    "sample_detection",
    "diffusion_ratio",
    "default_conc_threshold",
]


@dataclass(frozen=True)
class PlumeParams:
    """Physical constants of the release, the wind and the sensor.

    Attributes:
        release_rate: source emission rate Q (particles per second).
        wind_speed: mean wind speed V along -y (m/s). May be zero.
        diffusivity: isotropic effective diffusivity D (m^2/s).
        lifetime: mean particle lifetime tau (s).
        sensor_radius: interception radius a of the spherical sensor (m).
        sense_interval: duration dt of one sensing interval (s).
    """

    release_rate: float = 5.0
    wind_speed: float = 1.0
    diffusivity: float = 1.0
    lifetime: float = 100.0
    sensor_radius: float = 1.0
    sense_interval: float = 1.0

    def __post_init__(self) -> None:
        for name in ("release_rate", "diffusivity", "lifetime",
                     "sensor_radius", "sense_interval"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.wind_speed < 0.0:
            raise ValueError("wind_speed must be non-negative")


@dataclass(frozen=True)
class SearchVolume:
    """Axis-aligned box [0,size_x] x [0,size_y] x [0,size_z] with a cubic
    planning grid of edge ``grid_edge``."""

    size_x: float
    size_y: float
    size_z: float
    grid_edge: float

    def __post_init__(self) -> None:
        if min(self.size_x, self.size_y, self.size_z) <= 0.0:
            raise ValueError("volume extents must be positive")
        if self.grid_edge <= 0.0:
            raise ValueError("grid_edge must be positive")

    @property
    def extents(self) -> np.ndarray:
        return np.array([self.size_x, self.size_y, self.size_z])

    def contains(self, point: np.ndarray, tol: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= -tol) and np.all(p <= self.extents + tol))

    def clamp(self, points: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(points, dtype=float), 0.0, self.extents)

    def diagonal(self) -> float:
        return float(np.linalg.norm(self.extents))

    def cell_counts(self) -> tuple[int, int, int]:
        # Partial cells at the far boundary are dropped; at least one cell
        # per axis.
        g = self.grid_edge
        return tuple(
            max(1, int(math.floor(s / g + 1e-9)))
            for s in (self.size_x, self.size_y, self.size_z)
        )

    def cell_centers(self) -> np.ndarray:
        """Centers of the grid cells, shape (n_cells, 3)."""
        nx, ny, nz = self.cell_counts()
        g = self.grid_edge
        xs = (np.arange(nx) + 0.5) * g
        ys = (np.arange(ny) + 0.5) * g
        zs = (np.arange(nz) + 0.5) * g
        grid = np.meshgrid(xs, ys, zs, indexing="ij")
        return np.stack([ax.ravel() for ax in grid], axis=1)


@dataclass(frozen=True)
class SourceConfig:
    """True odor source location."""

    x: float
    y: float
    z: float

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def inside(self, volume: SearchVolume) -> bool:
        return volume.contains(self.position)


class Detection(NamedTuple):
    """One sensing outcome: particle count over a single interval."""

    count: int
    position: tuple[float, float, float]
    iteration: int


def typical_length(params: PlumeParams) -> float:
    """Plume length scale lam = sqrt(D tau / (1 + V^2 tau / (4 D)))."""
    d, tau, v = params.diffusivity, params.lifetime, params.wind_speed
    return math.sqrt(d * tau / (1.0 + v * v * tau / (4.0 * d)))


def _rates(dist: np.ndarray, downwind_drop: np.ndarray,
           params: PlumeParams) -> np.ndarray:
    """Rate formula on precomputed source distances and y offsets.

    ``downwind_drop`` is sensor_y - source_y; positive values sit upwind of
    the source and are exponentially suppressed by advection.
    """
    lam = typical_length(params)
    a, q = params.sensor_radius, params.release_rate
    v, d = params.wind_speed, params.diffusivity
    return (a * q / dist) * np.exp(
        -downwind_drop * v / (2.0 * d) - dist / lam
    )


def mean_encounter_rate(sensor_pos: np.ndarray, params: PlumeParams,
                        source: SourceConfig) -> float:
    """Mean Poisson rate at ``sensor_pos`` for the true source.

    Raises ValueError when the sensor sphere overlaps the source; callers
    that must stay total use :func:`encounter_rates` which saturates at the
    sensor shell instead.
    """
    u = np.asarray(sensor_pos, dtype=float)
    offset = u - source.position
    dist = float(np.linalg.norm(offset))
    if dist < params.sensor_radius:
        raise ValueError(
            "sensor position overlaps the source "
            f"(distance {dist:.3g} < sensor_radius {params.sensor_radius:.3g})"
        )
    return float(_rates(np.array(dist), np.array(offset[1]), params))


def encounter_rates(sensor_pos: np.ndarray, hypotheses: np.ndarray,
                    params: PlumeParams) -> np.ndarray:
    """Rates at one sensor for many hypothesized source positions.

    Distances are clamped at the sensor shell so a hypothesis inside the
    sensor sphere saturates instead of diverging.
    """
    u = np.asarray(sensor_pos, dtype=float)
    hyp = np.asarray(hypotheses, dtype=float)
    diff = u[None, :] - hyp
    dist = np.maximum(np.linalg.norm(diff, axis=1), params.sensor_radius)
    return _rates(dist, diff[:, 1], params)


def rate_field(points: np.ndarray, params: PlumeParams,
               source: SourceConfig) -> np.ndarray:
    """Rates at many sensor points for the one true source (shell-clamped)."""
    pts = np.asarray(points, dtype=float)
    diff = pts - source.position[None, :]
    dist = np.maximum(np.linalg.norm(diff, axis=1), params.sensor_radius)
    return _rates(dist, diff[:, 1], params)


def log_detection_pmf(counts: np.ndarray, rates: np.ndarray,
                      dt: float) -> np.ndarray:
    """Log Poisson pmf of ``counts`` with mean ``rates * dt``, vectorized.

    Zero mean is the point mass at zero: log pmf is 0 for count 0 and -inf
    otherwise.
    """
    k = np.asarray(counts, dtype=float)
    mu = np.asarray(rates, dtype=float) * dt
    out = np.full(np.broadcast(k, mu).shape, -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        body = k * np.log(mu) - mu - gammaln(k + 1.0)
    positive = np.broadcast_to(mu > 0.0, out.shape)
    out[positive] = np.broadcast_to(body, out.shape)[positive]
    zero_zero = np.broadcast_to((mu == 0.0) & (k == 0), out.shape)
    out[zero_zero] = 0.0
    return out


def detection_pmf(count: int, rate: float, dt: float) -> float:
    """Probability of observing ``count`` particles in one interval."""
    if count < 0:
        return 0.0
    return float(np.exp(log_detection_pmf(np.array(count),
                                          np.array(rate), dt)))


def sample_detection(rng: np.random.Generator, sensor_pos: np.ndarray,
                     params: PlumeParams, source: SourceConfig,
                     iteration: int) -> Detection:
    """Draw one Poisson detection at the sensor position.

    Uses the shell-clamped rate so a sensor sitting on top of the source
    saturates rather than failing; the swarm layer relies on that to keep
    sensing total everywhere in the volume.
    """
    u = np.asarray(sensor_pos, dtype=float)
    rate = float(encounter_rates(u, u[None, :] * 0.0 + source.position,
                                 params)[0])
    count = int(rng.poisson(rate * params.sense_interval))
    return Detection(count, (float(u[0]), float(u[1]), float(u[2])),
                     iteration)


def default_conc_threshold(params: PlumeParams) -> float:
    """Rate threshold used to classify grid cells as plume-covered: one
    percent of the shell rate scale a*Q/lam."""
    return 0.01 * params.sensor_radius * params.release_rate / typical_length(params)


def diffusion_ratio(params: PlumeParams, source: SourceConfig,
                    volume: SearchVolume, conc_threshold: float) -> float:
    """Fraction of grid cells whose center rate exceeds the threshold.

    Gauges how widely the plume covers the search volume; sparse coverage
    lets the planner take longer steps between measurements.
    """
    centers = volume.cell_centers()
    rates = rate_field(centers, params, source)
    return float(np.count_nonzero(rates > conc_threshold) / len(centers))
