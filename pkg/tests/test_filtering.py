import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from plumeseek.filtering import (
    ConfidenceFactor,
    GaussianSummary,
    NeighborMessage,
    ParticleCloud,
    adapt_particle_count,
    confidence_factor,
    cue_weighted_target,
    drift_upwind,
    effective_sample_size,
    estimate_source,
    fit_gaussian,
    kl_gaussian,
    pull_toward,
    resample_low_variance,
    select_move_count,
    uniform_cloud,
    update_weights,
)
from plumeseek.plume import PlumeParams, SearchVolume, encounter_rates

PLUME = PlumeParams()
VOL = SearchVolume(100.0, 60.0, 30.0, 10.0)


def make_cloud(positions, weights=None, n_min=20, n_max=160):
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    if weights is None:
        weights = np.full(n, 1.0 / n)
    return ParticleCloud(positions, np.asarray(weights, dtype=float),
                         n_min, n_max)


def summary(mean, cov):
    return GaussianSummary(np.asarray(mean, float), np.asarray(cov, float))


class ConstRng:
    """Degenerate generator pinning every uniform draw to one quantile."""

    def __init__(self, value):
        self.value = value

    def uniform(self, low=0.0, high=1.0, size=None):
        draw = low + self.value * (high - low)
        if size is None:
            return draw
        return np.full(size, draw)


# ---------------------------------------------------------------- divergence

def test_kl_identity_covs_unit_offset():
    p = summary([0.0, 0.0, 0.0], np.eye(3))
    q = summary([1.0, 0.0, 0.0], np.eye(3))
    assert kl_gaussian(p, q) == pytest.approx(0.5, abs=1e-5)


def test_kl_self_is_zero():
    p = summary([3.0, 4.0, 5.0], [[2.0, 0.3, 0.0],
                                  [0.3, 1.5, 0.1],
                                  [0.0, 0.1, 0.8]])
    assert kl_gaussian(p, p) == pytest.approx(0.0, abs=1e-12)


def test_kl_is_asymmetric():
    p = summary([0.0, 0.0, 0.0], np.eye(3))
    q = summary([0.0, 0.0, 0.0], np.diag([4.0, 1.0, 1.0]))
    assert kl_gaussian(p, q) != pytest.approx(kl_gaussian(q, p), rel=1e-3)


def test_kl_matches_monte_carlo_cross_entropy():
    # Independent estimate of E_p[log p - log q] by sampling.
    rng = np.random.default_rng(99)
    p = summary([1.0, -2.0, 0.5], [[3.0, 0.5, 0.0],
                                   [0.5, 2.0, 0.3],
                                   [0.0, 0.3, 1.0]])
    q = summary([0.0, 0.0, 0.0], [[2.0, -0.2, 0.0],
                                  [-0.2, 1.0, 0.1],
                                  [0.0, 0.1, 2.5]])
    draws = rng.multivariate_normal(p.mean, p.cov, size=200_000)
    log_ratio = stats.multivariate_normal.logpdf(
        draws, p.mean, p.cov
    ) - stats.multivariate_normal.logpdf(draws, q.mean, q.cov)
    mc = log_ratio.mean()
    stderr = log_ratio.std(ddof=1) / math.sqrt(len(draws))
    assert abs(kl_gaussian(p, q) - mc) < 5 * stderr


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_kl_nonnegative(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3))
    p = summary(rng.normal(size=3), a @ a.T + 0.1 * np.eye(3))
    q = summary(rng.normal(size=3), b @ b.T + 0.1 * np.eye(3))
    assert kl_gaussian(p, q) >= 0.0


def test_confidence_factor_frozen_value():
    p = summary([0.0, 0.0, 0.0], np.eye(3))
    q = summary([1.0, 0.0, 0.0], np.eye(3))
    cf = confidence_factor(p, q)
    assert cf.beta == pytest.approx(math.exp(-0.5), abs=1e-5)


def test_confidence_factor_self_is_full_trust():
    p = summary([2.0, 2.0, 2.0], np.diag([1.0, 2.0, 3.0]))
    assert confidence_factor(p, p).beta == pytest.approx(1.0, abs=1e-12)
    assert confidence_factor(p, p).beta <= 1.0


def test_confidence_factor_floors_at_tiny_positive():
    p = summary([0.0, 0.0, 0.0], 1e-4 * np.eye(3))
    q = summary([1e6, 1e6, 1e6], 1e-4 * np.eye(3))
    cf = confidence_factor(p, q)
    assert cf.beta > 0.0
    assert cf.beta <= 1e-250


@given(seed=st.integers(min_value=0, max_value=10_000))
@settings(max_examples=40, deadline=None)
def test_confidence_factor_in_unit_interval(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3))
    b = rng.normal(size=(3, 3))
    p = summary(rng.normal(size=3), a @ a.T + 0.1 * np.eye(3))
    q = summary(rng.normal(size=3), b @ b.T + 0.1 * np.eye(3))
    beta = confidence_factor(p, q).beta
    assert 0.0 < beta <= 1.0


def test_confidence_factor_shrinks_with_disagreement():
    p = summary([0.0, 0.0, 0.0], np.eye(3))
    near = summary([1.0, 0.0, 0.0], np.eye(3))
    far = summary([5.0, 0.0, 0.0], np.eye(3))
    assert confidence_factor(p, far).beta < confidence_factor(p, near).beta


def test_confidence_factor_rejects_out_of_range():
    with pytest.raises(ValueError):
        ConfidenceFactor(0.0)
    with pytest.raises(ValueError):
        ConfidenceFactor(1.5)


# ------------------------------------------------------------- weight update

def test_update_weights_matches_brute_force_product():
    positions = np.array([
        [12.0, 28.0, 24.0],
        [40.0, 15.0, 10.0],
        [8.0, 33.0, 26.0],
        [70.0, 50.0, 5.0],
        [25.0, 25.0, 25.0],
    ])
    prior = np.array([0.3, 0.25, 0.2, 0.15, 0.1])
    cloud = make_cloud(positions, prior.copy())

    own_pos = np.array([20.0, 30.0, 20.0])
    own_count = 1
    msg_a = NeighborMessage(1, None, np.array([15.0, 25.0, 22.0]), 2, True)
    msg_b = NeighborMessage(2, None, np.array([60.0, 40.0, 10.0]), 0, False)
    beta_a, beta_b = 0.7, 0.35
    update_weights(
        cloud, own_count, own_pos,
        [(msg_a, ConfidenceFactor(beta_a)), (msg_b, ConfidenceFactor(beta_b))],
        PLUME,
    )

    expected = []
    for w0, particle in zip(prior, positions):
        like = w0
        r = float(encounter_rates(own_pos, particle[None], PLUME)[0])
        like *= stats.poisson.pmf(own_count, r * PLUME.sense_interval)
        r = float(encounter_rates(msg_a.position, particle[None], PLUME)[0])
        like *= stats.poisson.pmf(msg_a.detection,
                                  r * PLUME.sense_interval) ** beta_a
        r = float(encounter_rates(msg_b.position, particle[None], PLUME)[0])
        like *= stats.poisson.pmf(msg_b.detection,
                                  r * PLUME.sense_interval) ** beta_b
        expected.append(like)
    expected = np.array(expected)
    expected /= expected.sum()
    np.testing.assert_allclose(cloud.weights, expected, rtol=1e-12)


def test_update_weights_no_messages_is_own_likelihood_only():
    positions = np.array([[10.0, 30.0, 25.0], [90.0, 55.0, 5.0]])
    cloud = make_cloud(positions)
    own_pos = np.array([12.0, 30.0, 25.0])
    update_weights(cloud, 3, own_pos, [], PLUME)
    # Sensor sits close to the first particle; three hits favor it strongly.
    assert cloud.weights[0] > 0.99
    assert cloud.weights.sum() == pytest.approx(1.0, rel=1e-12)


def test_update_weights_symmetric_particles_stay_equal():
    # Two hypotheses mirrored across the sensor in x see identical fields.
    own_pos = np.array([50.0, 30.0, 15.0])
    positions = np.array([[45.0, 30.0, 15.0], [55.0, 30.0, 15.0]])
    cloud = make_cloud(positions)
    update_weights(cloud, 1, own_pos, [], PLUME)
    assert cloud.weights[0] == pytest.approx(cloud.weights[1], rel=1e-12)


def test_update_weights_total_underflow_resets_uniform():
    # Hypotheses so remote that their rate underflows to zero make a
    # positive count impossible; the guard falls back to uniform.
    positions = np.array([[1e7, 1e7, 1e7], [2e7, 1e7, 1e7], [1e7, 2e7, 2e7]])
    cloud = make_cloud(positions, np.array([0.5, 0.3, 0.2]))
    update_weights(cloud, 1, np.array([0.0, 0.0, 0.0]), [], PLUME)
    np.testing.assert_allclose(cloud.weights, np.full(3, 1.0 / 3.0))


def test_update_weights_respects_confidence_exponent():
    positions = np.array([[12.0, 28.0, 24.0], [40.0, 15.0, 10.0]])
    msg = NeighborMessage(1, None, np.array([15.0, 25.0, 22.0]), 1, True)

    full = make_cloud(positions.copy())
    update_weights(full, 0, np.array([20.0, 30.0, 20.0]),
                   [(msg, ConfidenceFactor(1.0))], PLUME)
    half = make_cloud(positions.copy())
    update_weights(half, 0, np.array([20.0, 30.0, 20.0]),
                   [(msg, ConfidenceFactor(0.5))], PLUME)
    # Damped exponent pulls the posterior toward the own-likelihood-only one.
    own_only = make_cloud(positions.copy())
    update_weights(own_only, 0, np.array([20.0, 30.0, 20.0]), [], PLUME)
    gap_full = abs(full.weights[0] - own_only.weights[0])
    gap_half = abs(half.weights[0] - own_only.weights[0])
    assert gap_half < gap_full


# ----------------------------------------------------- ESS and resampling

def test_effective_sample_size_cases():
    assert effective_sample_size(make_cloud(np.zeros((4, 3)))) == pytest.approx(4.0)
    point = make_cloud(np.zeros((4, 3)), [1.0, 0.0, 0.0, 0.0])
    assert effective_sample_size(point) == pytest.approx(1.0)
    skew = make_cloud(np.zeros((2, 3)), [2.0 / 3.0, 1.0 / 3.0])
    assert effective_sample_size(skew) == pytest.approx(1.8, rel=1e-12)


def test_resample_skipped_when_ess_high():
    cloud = make_cloud(np.arange(12.0).reshape(4, 3),
                       [0.26, 0.25, 0.25, 0.24])
    before = cloud.positions.copy()
    did = resample_low_variance(cloud, np.random.default_rng(0))
    assert not did
    np.testing.assert_array_equal(cloud.positions, before)


def test_resample_threshold_is_strict_half():
    # ESS of (0.5, 0.5, 0, 0) is exactly n/2: not low enough to trigger.
    boundary = make_cloud(np.arange(12.0).reshape(4, 3),
                          [0.5, 0.5, 0.0, 0.0])
    assert not resample_low_variance(boundary, np.random.default_rng(3))
    low = make_cloud(np.arange(12.0).reshape(4, 3),
                     [0.6, 0.4, 0.0, 0.0])
    assert resample_low_variance(low, np.random.default_rng(3))
    np.testing.assert_allclose(low.weights, np.full(4, 0.25))


def test_resample_exact_counts_for_half_half():
    cloud = make_cloud(np.arange(12.0).reshape(4, 3),
                       [0.5, 0.5, 0.0, 0.0])
    originals = cloud.positions.copy()
    # Integer expected counts reproduce exactly under systematic resampling.
    resample_low_variance(cloud, np.random.default_rng(3), force=True)
    first = np.count_nonzero((cloud.positions == originals[0]).all(axis=1))
    second = np.count_nonzero((cloud.positions == originals[1]).all(axis=1))
    assert first == 2 and second == 2
    np.testing.assert_allclose(cloud.weights, np.full(4, 0.25))


def test_resample_force_flag():
    cloud = make_cloud(np.arange(12.0).reshape(4, 3))
    assert not resample_low_variance(cloud, np.random.default_rng(1))
    assert resample_low_variance(cloud, np.random.default_rng(1), force=True)
    assert effective_sample_size(cloud) == pytest.approx(cloud.n)


@given(seed=st.integers(min_value=0, max_value=2_000))
@settings(max_examples=60, deadline=None)
def test_resample_duplication_counts_property(seed):
    rng = np.random.default_rng(seed)
    n = 10
    w = rng.dirichlet(np.ones(n) * 0.4)
    cloud = make_cloud(rng.uniform(0.0, 50.0, size=(n, 3)), w)
    originals = cloud.positions.copy()
    resample_low_variance(cloud, rng, force=True)
    for i in range(n):
        copies = np.count_nonzero((cloud.positions == originals[i]).all(axis=1))
        lo = math.floor(n * w[i])
        hi = math.ceil(n * w[i])
        assert lo <= copies <= hi


def test_resample_deterministic_per_seed():
    base = np.random.default_rng(42).uniform(size=(8, 3)) * 40.0
    w = np.random.default_rng(43).dirichlet(np.ones(8))
    a = make_cloud(base.copy(), w.copy())
    b = make_cloud(base.copy(), w.copy())
    resample_low_variance(a, np.random.default_rng(7), force=True)
    resample_low_variance(b, np.random.default_rng(7), force=True)
    np.testing.assert_array_equal(a.positions, b.positions)


# ------------------------------------------------- scheduled particle motion

def test_select_move_count_frozen_value():
    assert select_move_count(100, 400, 800, 1.8, 4.0) == 25


def test_select_move_count_boundaries():
    assert select_move_count(100, 0, 800, 1.8, 4.0) == 100
    assert select_move_count(100, 800, 800, 1.8, 4.0) == 0


@given(
    k=st.integers(min_value=0, max_value=800),
    k2=st.integers(min_value=0, max_value=800),
)
@settings(max_examples=60, deadline=None)
def test_select_move_count_monotone_in_iteration(k, k2):
    lo, hi = sorted((k, k2))
    early = select_move_count(100, lo, 800, 1.8, 4.0)
    late = select_move_count(100, hi, 800, 1.8, 4.0)
    assert late <= early
    assert 0 <= late <= 100


def test_drift_upwind_zero_draw_is_identity():
    pos = np.array([[10.0, 20.0, 5.0], [50.0, 30.0, 25.0]])
    out = drift_upwind(pos, math.pi / 2.0, ConstRng(0.0), VOL)
    np.testing.assert_array_equal(out, pos)


def test_drift_upwind_full_draw_takes_steepest_jitter():
    pos = np.array([[40.0, 20.0, 5.0]])
    out = drift_upwind(pos, math.pi / 2.0, ConstRng(1.0), VOL)
    # Quantile 1 pins the angle at heading + pi/4 with a full-length
    # step: x shrinks by cos(3pi/4), y grows by sin(3pi/4), z frozen.
    root_half = math.sqrt(0.5)
    assert out[0, 0] == pytest.approx(40.0 * (1.0 - root_half), rel=1e-12)
    assert out[0, 1] == pytest.approx(20.0 * (1.0 + root_half), rel=1e-12)
    assert out[0, 2] == 5.0


def test_drift_upwind_midpoint_jitter_is_pure_upwind():
    pos = np.array([[40.0, 20.0, 5.0]])
    out = drift_upwind(pos, math.pi / 2.0, ConstRng(0.5), VOL)
    # Quantile 0.5 leaves the angle on the heading itself, so x keeps
    # only cos(pi/2) rounding dust and y grows by half its own size.
    assert out[0, 0] == pytest.approx(40.0, rel=1e-9)
    assert out[0, 1] == pytest.approx(30.0, rel=1e-12)
    assert out[0, 2] == 5.0


def test_drift_upwind_never_touches_z_and_stays_inside():
    rng = np.random.default_rng(5)
    pos = rng.uniform(0.0, 1.0, size=(40, 3)) * np.array([100.0, 60.0, 30.0])
    out = drift_upwind(pos, math.pi / 2.0, rng, VOL)
    np.testing.assert_array_equal(out[:, 2], pos[:, 2])
    assert np.all(out >= 0.0) and np.all(out <= VOL.extents)


def test_drift_upwind_clamps_at_boundary():
    pos = np.array([[90.0, 58.0, 5.0]])
    out = drift_upwind(pos, math.pi / 2.0, ConstRng(1.0), VOL)
    assert out[0, 1] == 60.0


def test_cue_weighted_target_renormalizes():
    s1 = summary([10.0, 10.0, 10.0], np.eye(3))
    s2 = summary([20.0, 30.0, 10.0], np.eye(3))
    msgs = [
        (NeighborMessage(0, s1, np.zeros(3), 1, True), ConfidenceFactor(0.3)),
        (NeighborMessage(1, s2, np.zeros(3), 2, True), ConfidenceFactor(0.2)),
    ]
    target = cue_weighted_target(msgs)
    np.testing.assert_allclose(
        target, 0.6 * s1.mean + 0.4 * s2.mean, rtol=1e-12
    )


def test_cue_weighted_target_filters_non_cue_and_unsummarized():
    s1 = summary([10.0, 10.0, 10.0], np.eye(3))
    msgs = [
        (NeighborMessage(0, s1, np.zeros(3), 0, False), ConfidenceFactor(0.9)),
        (NeighborMessage(1, None, np.zeros(3), 3, True), ConfidenceFactor(0.9)),
    ]
    assert cue_weighted_target(msgs) is None
    msgs.append(
        (NeighborMessage(2, s1, np.zeros(3), 1, True), ConfidenceFactor(0.5))
    )
    np.testing.assert_allclose(cue_weighted_target(msgs), s1.mean)


def test_pull_toward_extremes():
    pos = np.array([[10.0, 10.0, 10.0], [40.0, 20.0, 5.0]])
    target = np.array([50.0, 50.0, 25.0])
    stay = pull_toward(pos.copy(), target, ConstRng(0.0), VOL)
    np.testing.assert_array_equal(stay, pos)
    jump = pull_toward(pos.copy(), target, ConstRng(1.0), VOL)
    np.testing.assert_allclose(jump, np.broadcast_to(target, (2, 3)))


def test_pull_toward_stays_on_segment():
    rng = np.random.default_rng(8)
    pos = rng.uniform(0.0, 30.0, size=(25, 3))
    target = np.array([80.0, 50.0, 20.0])
    out = pull_toward(pos, target, rng, VOL)
    lo = np.minimum(pos, target)
    hi = np.maximum(pos, target)
    assert np.all(out >= lo - 1e-12) and np.all(out <= hi + 1e-12)


# ------------------------------------------------------ adaptive cloud size

def test_adapt_particle_count_frozen_example():
    # exp(-1/dist) = 0.9 at dist = -1/ln(0.9); cues spaced so the recency
    # factor is 0.5: floor(100 * 0.9 * 0.5) = 45.
    rng = np.random.default_rng(11)
    cloud = make_cloud(rng.uniform(0.0, 50.0, size=(100, 3)))
    cloud.cue_iterations.extend([2, 4, 6, 8])
    dist = -1.0 / math.log(0.9)
    agent = np.array([0.0, 0.0, 0.0])
    estimate = np.array([dist, 0.0, 0.0])
    adapt_particle_count(cloud, agent, estimate, iteration=8,
                         cue_window=3, rng=rng)
    assert cloud.n == 45
    assert cloud.weights.sum() == pytest.approx(1.0, rel=1e-12)


def test_adapt_particle_count_no_cues_uses_distance_only():
    rng = np.random.default_rng(12)
    cloud = make_cloud(rng.uniform(0.0, 50.0, size=(100, 3)))
    dist = -1.0 / math.log(0.5)
    adapt_particle_count(cloud, np.zeros(3), np.array([dist, 0.0, 0.0]),
                         iteration=10, cue_window=3, rng=rng)
    assert cloud.n == 50


def test_adapt_particle_count_exactly_window_cues_anchors_at_start():
    rng = np.random.default_rng(13)
    cloud = make_cloud(rng.uniform(0.0, 50.0, size=(100, 3)))
    cloud.cue_iterations.extend([4, 5, 6])
    # Far estimate: f_dist ~ 1, recency = 3 / (6 - 0) = 0.5.
    adapt_particle_count(cloud, np.zeros(3),
                         np.array([1e6, 0.0, 0.0]), iteration=6,
                         cue_window=3, rng=rng)
    assert cloud.n == max(20, math.floor(100 * math.exp(-1e-6) * 0.5))


def test_adapt_particle_count_clamps_to_floor():
    rng = np.random.default_rng(14)
    cloud = make_cloud(rng.uniform(0.0, 50.0, size=(100, 3)))
    # Estimate on top of the agent: f_dist = 0 and the floor clamp binds.
    adapt_particle_count(cloud, np.zeros(3), np.zeros(3), iteration=5,
                         cue_window=3, rng=rng)
    assert cloud.n == 20


def test_adapt_particle_count_keeps_subset_of_positions():
    rng = np.random.default_rng(15)
    original = rng.uniform(0.0, 50.0, size=(60, 3))
    cloud = make_cloud(original.copy())
    adapt_particle_count(cloud, np.zeros(3),
                         np.array([5.0, 0.0, 0.0]), iteration=9,
                         cue_window=3, rng=rng)
    assert cloud.n < 60
    rows = {tuple(r) for r in np.round(original, 9)}
    assert all(tuple(r) in rows for r in np.round(cloud.positions, 9))


@given(
    seed=st.integers(min_value=0, max_value=3_000),
    n=st.integers(min_value=20, max_value=160),
    iteration=st.integers(min_value=1, max_value=800),
)
@settings(max_examples=60, deadline=None)
def test_adapt_particle_count_bounds_property(seed, n, iteration):
    rng = np.random.default_rng(seed)
    cloud = make_cloud(rng.uniform(0.0, 60.0, size=(n, 3)))
    cues = sorted(rng.choice(np.arange(1, iteration + 1),
                             size=min(iteration, int(rng.integers(0, 6))),
                             replace=False).tolist())
    cloud.cue_iterations.extend(int(c) for c in cues)
    estimate = rng.uniform(0.0, 60.0, size=3)
    adapt_particle_count(cloud, rng.uniform(0.0, 60.0, size=3), estimate,
                         iteration=iteration, cue_window=3, rng=rng)
    assert 20 <= cloud.n <= 160
    assert cloud.n <= n


# ------------------------------------------------------------ gaussian fits

def test_fit_gaussian_matches_brute_force_moments():
    rng = np.random.default_rng(21)
    pos = rng.uniform(0.0, 40.0, size=(30, 3))
    w = rng.dirichlet(np.ones(30))
    cloud = make_cloud(pos, w)
    got = fit_gaussian(cloud, reg=1e-6)

    mean = np.zeros(3)
    for wi, pi in zip(w, pos):
        mean += wi * pi
    cov = np.zeros((3, 3))
    for wi, pi in zip(w, pos):
        d = pi - mean
        cov += wi * np.outer(d, d)
    cov += 1e-6 * np.eye(3)
    np.testing.assert_allclose(got.mean, mean, rtol=1e-12)
    np.testing.assert_allclose(got.cov, cov, rtol=1e-9, atol=1e-12)


def test_fit_gaussian_point_mass_is_regularizer_only():
    cloud = make_cloud(np.tile([5.0, 6.0, 7.0], (10, 1)))
    got = fit_gaussian(cloud, reg=1e-6)
    np.testing.assert_allclose(got.cov, 1e-6 * np.eye(3), atol=1e-18)
    assert np.linalg.eigvalsh(got.cov).min() >= 1e-6 - 1e-12


def test_fit_gaussian_spread():
    cloud = make_cloud(np.tile([5.0, 6.0, 7.0], (4, 1)))
    got = fit_gaussian(cloud, reg=1e-6)
    assert got.spread() == pytest.approx(math.sqrt(3e-6), rel=1e-9)


def test_estimate_source_equals_fit_mean_bitwise():
    rng = np.random.default_rng(22)
    pos = rng.uniform(0.0, 90.0, size=(50, 3))
    w = rng.dirichlet(np.ones(50))
    cloud = make_cloud(pos, w)
    est = estimate_source(cloud)
    fit = fit_gaussian(cloud, reg=1e-6)
    assert np.array_equal(est, fit.mean)


def test_summary_validation():
    with pytest.raises(ValueError):
        GaussianSummary(np.zeros(2), np.eye(3))
    with pytest.raises(ValueError):
        GaussianSummary(np.zeros(3), np.eye(2))
    asym = np.eye(3)
    asym[0, 1] = 0.5
    with pytest.raises(ValueError):
        GaussianSummary(np.zeros(3), asym)


# ------------------------------------------------------------ cloud basics

def test_uniform_cloud_inside_volume_normalized():
    cloud = uniform_cloud(50, VOL, np.random.default_rng(1), 20, 160)
    assert cloud.n == 50
    assert np.all(cloud.positions >= 0.0)
    assert np.all(cloud.positions <= VOL.extents)
    assert cloud.weights.sum() == pytest.approx(1.0, rel=1e-12)
    assert cloud.cue_count == 0


def test_uniform_cloud_deterministic():
    a = uniform_cloud(20, VOL, np.random.default_rng(9), 20, 160)
    b = uniform_cloud(20, VOL, np.random.default_rng(9), 20, 160)
    np.testing.assert_array_equal(a.positions, b.positions)


def test_cloud_validation():
    with pytest.raises(ValueError):
        ParticleCloud(np.zeros((4, 3)), np.full(3, 1.0 / 3.0), 20, 160)
    with pytest.raises(ValueError):
        ParticleCloud(np.zeros((4, 3)), np.array([0.5, 0.5, 0.5, -0.5]),
                      20, 160)
    with pytest.raises(ValueError):
        ParticleCloud(np.zeros((4, 2)), np.full(4, 0.25), 20, 160)


def test_cloud_records_cues_in_order():
    cloud = make_cloud(np.zeros((4, 3)))
    cloud.record_cue(3)
    cloud.record_cue(7)
    assert cloud.cue_iterations == [3, 7]
    assert cloud.cue_count == 2
