"""Collaborative particle filter over source-location hypotheses.

Each agent carries a cloud of weighted hypotheses about where the source
sits. One update round multiplies the prior weights by the agent's own
detection likelihood and by each neighbor's likelihood damped to the power
of a confidence factor beta in (0, 1]. Beta is derived from how much the
two agents' previous Gaussian beliefs diverge, so an agent discounts
evidence from teammates whose picture of the world disagrees with its own.

Besides the Bayesian update the cloud is reshaped in three scheduled ways:
a decaying fraction of particles drifts upwind (the source must be upwind
of wherever odor is found), particles of agents without fresh cues are
pulled toward the belief consensus of cue-holding neighbors, and the cloud
shrinks as the belief sharpens to save computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .plume import PlumeParams, SearchVolume, encounter_rates, log_detection_pmf

__all__ = [
    "ParticleCloud",
    "GaussianSummary",
    "ConfidenceFactor",
    "NeighborMessage",
    "uniform_cloud",
    "kl_gaussian",
    "confidence_factor",
    "update_weights",
    "effective_sample_size",
    "resample_low_variance",
    "select_move_count",
    "planned_particle_count",
    "drift_upwind",
    "cue_weighted_target",
    "pull_toward",
    "adapt_particle_count",
    "fit_gaussian",
    "estimate_source",
]

# Confidence factors may underflow exp(-KL) for wildly divergent beliefs;
# they stay strictly positive so the damped likelihood keeps a gradient.
MIN_CONFIDENCE = 1e-300


@dataclass
class ParticleCloud:
    """Weighted source-location hypotheses plus the agent's cue history.

    ``cue_iterations`` records the iteration index of every sensing round
    with a nonzero count; the adaptive cloud-size rule reads it to judge
    how fresh the evidence stream is. ``n_min``/``n_max`` bound the cloud
    size through all adaptations.
    """

    positions: np.ndarray
    weights: np.ndarray
    n_min: int
    n_max: int
    cue_iterations: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must have shape (n, 3)")
        if self.weights.shape != (len(self.positions),):
            raise ValueError("weights length must match positions")
        if np.any(self.weights < 0.0):
            raise ValueError("weights must be non-negative")
        if not math.isclose(float(self.weights.sum()), 1.0, rel_tol=1e-6):
            raise ValueError("weights must sum to one")
        if not 0 < self.n_min <= self.n_max:
            raise ValueError("need 0 < n_min <= n_max")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def cue_count(self) -> int:
        return len(self.cue_iterations)

    def record_cue(self, iteration: int) -> None:
        self.cue_iterations.append(iteration)


def uniform_cloud(count: int, volume: SearchVolume, rng: np.random.Generator,
                  n_min: int, n_max: int) -> ParticleCloud:
    """Fresh cloud drawn uniformly over the search volume."""
    positions = rng.uniform(0.0, 1.0, size=(count, 3)) * volume.extents
    weights = np.full(count, 1.0 / count)
    return ParticleCloud(positions, weights, n_min, n_max)


@dataclass(frozen=True)
class GaussianSummary:
    """Compact belief: mean source estimate and covariance of the cloud."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if mean.shape != (3,):
            raise ValueError("mean must have shape (3,)")
        if cov.shape != (3, 3):
            raise ValueError("cov must have shape (3, 3)")
        if not np.allclose(cov, cov.T, atol=1e-9):
            raise ValueError("cov must be symmetric")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("summary must be finite")

    def spread(self) -> float:
        """Scalar belief width: sqrt of the covariance trace."""
        return math.sqrt(float(np.trace(self.cov)))


@dataclass(frozen=True)
class ConfidenceFactor:
    """Damping exponent applied to one neighbor's likelihood."""

    beta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")


@dataclass(frozen=True)
class NeighborMessage:
    """What one agent broadcasts after sensing: previous-round belief
    summary (None before the first fit), current position, latest count
    and whether it has ever captured a cue."""

    sender: int
    summary: GaussianSummary | None
    position: np.ndarray
    detection: int
    cue_captured: bool


def kl_gaussian(p: GaussianSummary, q: GaussianSummary,
                reg: float = 1e-6) -> float:
    """KL divergence KL(p || q) between two 3D Gaussians.

    Both covariances are ridge-regularized before inversion. The result is
    clamped at zero so rounding can never produce a negative divergence.
    """
    eye = reg * np.eye(3)
    sp = p.cov + eye
    sq = q.cov + eye
    tr = float(np.trace(np.linalg.solve(sq, sp)))
    dmu = q.mean - p.mean
    quad = float(dmu @ np.linalg.solve(sq, dmu))
    ld_p = np.linalg.slogdet(sp)[1]
    ld_q = np.linalg.slogdet(sq)[1]
    kl = 0.5 * (tr + quad - 3.0 + ld_q - ld_p)
    return max(kl, 0.0)


def confidence_factor(own_prev: GaussianSummary,
                      neighbor_prev: GaussianSummary,
                      reg: float = 1e-6) -> ConfidenceFactor:
    """Trust in a neighbor: exp(-KL(own || neighbor)), floored above zero."""
    beta = math.exp(-kl_gaussian(own_prev, neighbor_prev, reg))
    return ConfidenceFactor(max(min(beta, 1.0), MIN_CONFIDENCE))


def update_weights(cloud: ParticleCloud, detection: int,
                   sensor_pos: np.ndarray,
                   weighted_messages: list[tuple[NeighborMessage,
                                                 ConfidenceFactor]],
                   plume: PlumeParams) -> ParticleCloud:
    """One Bayesian round over the cloud, in log space.

    Posterior weight of hypothesis o:

        w' ~ w * pmf(own count | o) * prod_j pmf(neighbor count | o)^beta_j

    If every hypothesis underflows to zero likelihood the weights reset to
    uniform rather than dying.
    """
    dt = plume.sense_interval
    with np.errstate(divide="ignore"):
        logw = np.log(cloud.weights)
    rates = encounter_rates(sensor_pos, cloud.positions, plume)
    logw = logw + log_detection_pmf(detection, rates, dt)
    for msg, cf in weighted_messages:
        rates = encounter_rates(msg.position, cloud.positions, plume)
        logw = logw + cf.beta * log_detection_pmf(msg.detection, rates, dt)

    peak = float(np.max(logw))
    if peak == -np.inf:
        cloud.weights = np.full(cloud.n, 1.0 / cloud.n)
        return cloud
    w = np.exp(logw - peak)
    cloud.weights = w / w.sum()
    return cloud


def effective_sample_size(cloud: ParticleCloud) -> float:
    return float(1.0 / np.sum(cloud.weights ** 2))


def resample_low_variance(cloud: ParticleCloud, rng: np.random.Generator,
                          force: bool = False) -> bool:
    """Systematic resampling, triggered when ESS drops below half the
    cloud or unconditionally with ``force``. Returns whether it ran.

    One uniform draw spaces all selection points, so a particle of weight
    w is copied floor(n*w) or ceil(n*w) times.
    """
    n = cloud.n
    if not force and effective_sample_size(cloud) >= n / 2.0:
        return False
    points = (np.arange(n) + rng.uniform()) / n
    cum = np.cumsum(cloud.weights)
    cum[-1] = 1.0  # guard rounding so the last bin always closes
    idx = np.searchsorted(cum, points, side="right")
    cloud.positions = cloud.positions[idx].copy()
    cloud.weights = np.full(n, 1.0 / n)
    return True


def select_move_count(count: int, iteration: int, max_iterations: int,
                      gamma1: float, gamma2: float) -> int:
    """How many particles get a scheduled position update this round.

    The fraction decays from all of the cloud at the start to none at the
    final iteration, polynomially shaped by the two exponents.
    """
    ratio = min(iteration / max_iterations, 1.0)
    return int(math.floor(count * (1.0 - ratio ** gamma1) ** gamma2))


def drift_upwind(positions: np.ndarray, heading: float,
                 rng: np.random.Generator,
                 volume: SearchVolume) -> np.ndarray:
    """Nudge hypotheses along the upwind heading in the horizontal plane.

    Each particle draws one step fraction and one jittered angle
    (heading plus uniform noise in [-pi/4, pi/4]) and displaces by a
    fraction of its own x and y coordinates; z is left alone. Results
    are clamped to the volume.
    """
    out = np.array(positions, dtype=float, copy=True)
    frac = rng.uniform(size=len(out))
    angle = heading + rng.uniform(-math.pi / 4, math.pi / 4, size=len(out))
    out[:, 0] += frac * out[:, 0] * np.cos(angle)
    out[:, 1] += frac * out[:, 1] * np.sin(angle)
    return volume.clamp(out)


def cue_weighted_target(weighted_messages: list[tuple[NeighborMessage,
                                                      ConfidenceFactor]],
                        ) -> np.ndarray | None:
    """Consensus point of cue-holding neighbors, weighted by trust.

    Only messages from agents that have captured a cue and already carry a
    belief summary participate; their betas are renormalized over that
    subset. Returns None when no neighbor qualifies.
    """
    means = []
    betas = []
    for msg, cf in weighted_messages:
        if msg.cue_captured and msg.summary is not None:
            means.append(msg.summary.mean)
            betas.append(cf.beta)
    if not means:
        return None
    b = np.array(betas)
    b = b / b.sum()
    return b @ np.array(means)


def pull_toward(positions: np.ndarray, target: np.ndarray,
                rng: np.random.Generator,
                volume: SearchVolume) -> np.ndarray:
    """Move each particle a uniform random fraction of the way to the
    target point. Segments stay inside the (convex) volume; a final clamp
    only scrubs rounding."""
    pos = np.asarray(positions, dtype=float)
    draws = rng.uniform(size=(len(pos), 1))
    out = pos + draws * (np.asarray(target, dtype=float)[None, :] - pos)
    return volume.clamp(out)


def planned_particle_count(cloud: ParticleCloud, agent_pos: np.ndarray,
                           estimate: np.ndarray, iteration: int,
                           cue_window: int) -> int:
    """Cloud size the adaptation rule would choose, without mutating.

    The target is floor(n * f_dist * (1 - f_cue)) clamped to the cloud
    bounds, where f_dist = exp(-1 / |agent - estimate|) fades as the agent
    approaches its estimate and f_cue = window / (iterations spanned by
    the last ``cue_window`` cues) rewards a dense cue stream. Fewer cues
    than the window means f_cue = 0; exactly the window anchors the span
    at the episode start. Never larger than the current size.
    """
    n = cloud.n
    dist = float(np.linalg.norm(np.asarray(agent_pos, float)
                                - np.asarray(estimate, float)))
    f_dist = math.exp(-1.0 / dist) if dist > 0.0 else 0.0
    m = cloud.cue_count
    if m < cue_window:
        f_cue = 0.0
    else:
        anchor = 0 if m == cue_window else cloud.cue_iterations[m - cue_window - 1]
        span = iteration - anchor
        f_cue = cue_window / span if span > 0 else 1.0
    target = math.floor(n * f_dist * (1.0 - f_cue))
    return max(cloud.n_min, min(cloud.n_max, target, n))


def adapt_particle_count(cloud: ParticleCloud, agent_pos: np.ndarray,
                         estimate: np.ndarray, iteration: int,
                         cue_window: int, rng: np.random.Generator) -> None:
    """Shrink the cloud to :func:`planned_particle_count`.

    Dropped particles are a uniform random subset and the survivors'
    weights renormalize. Callers must have resampled in the same round
    before shrinking so the dropped subset is unbiased.
    """
    n = cloud.n
    new_n = planned_particle_count(cloud, agent_pos, estimate, iteration,
                                   cue_window)
    if new_n >= n:
        return
    keep = np.sort(rng.choice(n, size=new_n, replace=False))
    cloud.positions = cloud.positions[keep]
    w = cloud.weights[keep]
    s = float(w.sum())
    cloud.weights = w / s if s > 0.0 else np.full(new_n, 1.0 / new_n)


def fit_gaussian(cloud: ParticleCloud, reg: float = 1e-6) -> GaussianSummary:
    """Moment-match the weighted cloud; the ridge keeps the covariance
    invertible even for a collapsed cloud."""
    mean = estimate_source(cloud)
    diff = cloud.positions - mean
    cov = (cloud.weights[:, None] * diff).T @ diff + reg * np.eye(3)
    cov = 0.5 * (cov + cov.T)
    return GaussianSummary(mean, cov)


def estimate_source(cloud: ParticleCloud) -> np.ndarray:
    """Posterior mean source location."""
    return cloud.weights @ cloud.positions
