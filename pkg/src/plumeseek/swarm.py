"""Swarm episode driver: sensing, message exchange, filtering, movement.

One iteration has two phases. First every active agent hovers and senses
at its current position; the resulting counts, positions, belief
summaries from the previous round and cue flags are snapshotted into
messages. Second, each agent folds its own detection and its neighbors'
messages into its particle cloud, refits its Gaussian belief, plans a
move and flies it. Because updates read only the snapshot, the outcome
is independent of agent processing order.

An agent declares the source found once its belief spread drops below
the declaration threshold; the declaration succeeds when the estimate
lies within the success radius of the true source, which ends the
episode. A miss grounds just that agent. Agents also halt on energy
budget exhaustion or on their per-agent search-time cap.

Four algorithm variants share this loop and differ in two switches:
whether the cloud is adaptive (scheduled upwind/consensus particle moves
plus cloud shrinking) and whether multi-cell steps are allowed. The
fully adaptive variant is "muc-osl"; "col-inf" is the fixed-cloud,
single-step baseline; "col-pf" keeps only the adaptive cloud and
"adap-pp" only the adaptive steps.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .config import RunConfig, VARIANTS
from .energy import EnergyLedger
from .filtering import (
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
    planned_particle_count,
    pull_toward,
    resample_low_variance,
    select_move_count,
    uniform_cloud,
    update_weights,
)
from .planning import (
    choose_direction,
    choose_step,
    direction_index,
    distance_to_estimate,
    max_step,
    MeasurementLog,
)
from .plume import (
    SearchVolume,
    default_conc_threshold,
    diffusion_ratio,
    sample_detection,
)

__all__ = [
    "AgentState",
    "TrajectoryRow",
    "AgentReport",
    "RunResult",
    "MCStats",
    "uses_adaptive_cloud",
    "uses_adaptive_steps",
    "payload_values",
    "nominal_payload_ratio",
    "initial_positions",
    "neighbors",
    "check_declaration",
    "step_iteration",
    "run_episode",
    "monte_carlo",
]

# Wind blows along -y, so the upwind heading in the x-y plane is +y.
UPWIND_HEADING = math.pi / 2.0
# Each heading change costs one second of maneuvering time.
TURN_SECONDS = 1.0
# Values processed per particle per filter round (coordinates + weight).
VALUES_PER_PARTICLE = 4


def uses_adaptive_cloud(algo: str) -> bool:
    """Scheduled particle motion and cloud shrinking enabled."""
    return algo in ("muc-osl", "col-pf")


def uses_adaptive_steps(algo: str) -> bool:
    """Multi-cell steps under sparse plume coverage enabled."""
    return algo in ("muc-osl", "adap-pp")


def payload_values(algo: str, particle_count: int) -> tuple[int, int]:
    """(nominal, actual) values per broadcast for the variant's protocol.

    Adaptive-cloud variants ship a Gaussian belief: nominally mean plus
    full covariance (12 values), actually mean, the six unique covariance
    entries, sender position, count and cue flag (14). The baselines ship
    raw clouds: nominally positions and weights (4N), actually those plus
    sender position, count and cue flag (4N + 5).
    """
    if uses_adaptive_cloud(algo):
        return 12, 14
    return 4 * particle_count, 4 * particle_count + 5


def nominal_payload_ratio(particle_count: int) -> Fraction:
    """Exact nominal particle-to-summary payload ratio 4N / 12."""
    return Fraction(4 * particle_count, 12)


@dataclass
class AgentState:
    """Everything one UAV carries through an episode."""

    agent_id: int
    position: np.ndarray
    cloud: ParticleCloud
    ledger: EnergyLedger
    log: MeasurementLog
    sense_rng: np.random.Generator
    filter_rng: np.random.Generator
    summary: GaussianSummary | None = None
    cue_captured: bool = False
    last_direction: tuple[int, int, int] | None = None
    fly_time: float = 0.0
    hover_time: float = 0.0
    turn_time: float = 0.0
    halted: bool = False
    halt_reason: str | None = None

    @property
    def search_clock(self) -> float:
        """Wall-clock search time: flying plus hovering plus turning."""
        return self.fly_time + self.hover_time + self.turn_time


class TrajectoryRow(NamedTuple):
    iteration: int
    agent_id: int
    x: float
    y: float
    z: float
    detection: int
    n_particles: int
    ess: float
    est_x: float
    est_y: float
    est_z: float
    spread: float
    dir_index: int
    step: int
    turned: int
    t_cum: float
    e_cum: float


@dataclass(frozen=True)
class AgentReport:
    """Per-agent accounting at episode end."""

    agent_id: int
    hover_points: int
    turn_points: int
    fly_distance: float
    fly_time: float
    hover_time: float
    turn_time: float
    compute_bits: int
    comm_bits: int
    e_fly: float
    e_hover: float
    e_turn: float
    e_compute: float
    e_comm: float
    e_movement: float
    e_total: float
    cue_count: int
    halt_reason: str | None


@dataclass(frozen=True)
class RunResult:
    success: bool
    search_time: float | None
    declaring_agent: int | None
    estimate_error: float | None
    iterations: int
    seed: int
    algo: str
    agents: tuple[AgentReport, ...]
    rows: tuple[TrajectoryRow, ...]


@dataclass(frozen=True)
class MCStats:
    run_count: int
    success_count: int
    success_rate: float
    mean_search_time: float | None
    results: tuple[RunResult, ...]


def initial_positions(volume: SearchVolume,
                      agent_ids: list[int]) -> dict[int, np.ndarray]:
    """Launch layout: a line near the downwind edge at 5 m altitude.

    The first three slots sit at x = 10, 30, 60; later slots continue at
    20 m spacing and fold back by the volume width when they pass it.
    Lateral and vertical coordinates clamp into small volumes.
    """
    base = (10.0, 30.0, 60.0)
    out: dict[int, np.ndarray] = {}
    for agent_id in agent_ids:
        x = base[agent_id] if agent_id < 3 else 60.0 + 20.0 * (agent_id - 2)
        while x > volume.size_x:
            x -= volume.size_x
        y = min(10.0, volume.size_y)
        z = min(5.0, volume.size_z)
        out[agent_id] = np.array([x, y, z])
    return out


def neighbors(positions: list[np.ndarray], comm_radius: float
              ) -> list[set[int]]:
    """Symmetric neighbor sets by index; a zero radius disables the mesh
    entirely (even coincident agents are isolated)."""
    n = len(positions)
    sets: list[set[int]] = [set() for _ in range(n)]
    if comm_radius <= 0.0:
        return sets
    for i in range(n):
        for j in range(i + 1, n):
            if float(np.linalg.norm(positions[i] - positions[j])) \
                    <= comm_radius:
                sets[i].add(j)
                sets[j].add(i)
    return sets


def check_declaration(agent: AgentState, source_pos: np.ndarray,
                      declare_spread: float, success_radius: float
                      ) -> tuple[bool, bool, float | None]:
    """(declared, success, estimate_error) for the agent's current belief.

    Declaration fires when belief spread is strictly below the threshold;
    it succeeds when the estimate is within the success radius.
    """
    if agent.summary is None or not agent.summary.spread() < declare_spread:
        return False, False, None
    err = float(np.linalg.norm(agent.summary.mean - source_pos))
    return True, err <= success_radius, err


class _World(NamedTuple):
    """Static per-episode context shared by all iterations."""

    config: RunConfig
    plume: object
    volume: SearchVolume
    source: object
    l_max: int
    coverage: float


def _make_world(config: RunConfig) -> _World:
    plume = config.plume_params()
    volume = config.volume()
    source = config.source()
    threshold = (config.conc_threshold if config.conc_threshold is not None
                 else default_conc_threshold(plume))
    coverage = diffusion_ratio(plume, source, volume, threshold)
    l_max = (max_step(coverage, config.step_ceiling)
             if uses_adaptive_steps(config.algo) else 1)
    return _World(config, plume, volume, source, l_max, coverage)


def _spawn_agents(config: RunConfig, volume: SearchVolume, seed: int,
                  agent_ids: list[int]) -> list[AgentState]:
    placements = initial_positions(volume, agent_ids)
    agents = []
    for agent_id in agent_ids:
        # Two per-agent streams keyed by (episode seed, agent id): one for
        # world sensing, one for filter randomness. Keying by id keeps an
        # agent's draws identical no matter how many teammates fly.
        children = np.random.SeedSequence((seed, agent_id)).spawn(2)
        sense_rng = np.random.default_rng(children[0])
        filter_rng = np.random.default_rng(children[1])
        cloud = uniform_cloud(config.particle_count, volume, filter_rng,
                              config.particle_min, config.particle_max)
        agents.append(AgentState(
            agent_id=agent_id,
            position=placements[agent_id],
            cloud=cloud,
            ledger=EnergyLedger(config.energy_params()),
            log=MeasurementLog(),
            sense_rng=sense_rng,
            filter_rng=filter_rng,
        ))
    return agents


class _Snapshot(NamedTuple):
    summary: GaussianSummary | None
    position: np.ndarray
    detection: int
    cue_captured: bool


def step_iteration(world: _World, agents: list[AgentState], k: int
                   ) -> tuple[list[TrajectoryRow],
                              tuple[AgentState, float] | None]:
    """Run one full iteration; returns rows plus a successful declaration
    as (agent, estimate_error) if one fired."""
    config = world.config
    active = [a for a in agents if not a.halted]
    rows: list[TrajectoryRow] = []
    if not active:
        return rows, None

    # Phase 1: hover and sense everywhere before anyone updates.
    detections = {}
    for a in active:
        det = sample_detection(a.sense_rng, a.position, world.plume,
                               world.source, k)
        detections[a.agent_id] = det
        a.log.append(a.position)
        a.ledger.record_hover()
        a.hover_time += config.hover_duration
        if det.count > 0:
            a.cloud.record_cue(k)
            a.cue_captured = True

    snapshot = {
        a.agent_id: _Snapshot(a.summary, a.position.copy(),
                              detections[a.agent_id].count, a.cue_captured)
        for a in active
    }
    neighbor_sets = neighbors([a.position for a in active],
                              config.comm_radius)
    ids = [a.agent_id for a in active]

    # Phase 2: per-agent update, planning and movement on the snapshot.
    success: tuple[AgentState, float] | None = None
    for idx, a in enumerate(active):
        own = snapshot[a.agent_id]
        msgs: list[tuple[NeighborMessage, ConfidenceFactor]] = []
        for j in sorted(neighbor_sets[idx]):
            peer = snapshot[ids[j]]
            msg = NeighborMessage(ids[j], peer.summary, peer.position,
                                  peer.detection, peer.cue_captured)
            if own.summary is None or peer.summary is None:
                cf = ConfidenceFactor(1.0)
            else:
                cf = confidence_factor(own.summary, peer.summary,
                                       config.cov_reg)
            msgs.append((msg, cf))

        # The sender is charged for one broadcast per reachable neighbor.
        nominal, actual = payload_values(config.algo, a.cloud.n)
        a.ledger.record_comm(actual * config.value_bits * len(msgs))
        # Filter work scales with the cloud entering this round.
        a.ledger.record_compute(a.cloud.n * VALUES_PER_PARTICLE
                                * config.value_bits)

        update_weights(a.cloud, own.detection, a.position, msgs, world.plume)
        ess = effective_sample_size(a.cloud)
        resampled = resample_low_variance(a.cloud, a.filter_rng)

        if uses_adaptive_cloud(config.algo):
            n_move = select_move_count(a.cloud.n, k, config.k_max,
                                       config.gamma1, config.gamma2)
            if n_move > 0:
                chosen = np.sort(a.filter_rng.choice(a.cloud.n, size=n_move,
                                                     replace=False))
                moved = drift_upwind(a.cloud.positions[chosen],
                                     UPWIND_HEADING, a.filter_rng,
                                     world.volume)
                if not a.cue_captured:
                    target = cue_weighted_target(msgs)
                    if target is not None:
                        moved = pull_toward(moved, target, a.filter_rng,
                                            world.volume)
                a.cloud.positions[chosen] = moved
            # Shrinking drops a random subset, which is only unbiased on
            # uniform weights: force a resample first when needed.
            estimate = estimate_source(a.cloud)
            planned = planned_particle_count(a.cloud, a.position, estimate,
                                             k, config.cue_window)
            if planned < a.cloud.n and not resampled:
                resample_low_variance(a.cloud, a.filter_rng, force=True)
                resampled = True
            adapt_particle_count(a.cloud, a.position, estimate, k,
                                 config.cue_window, a.filter_rng)

        a.summary = fit_gaussian(a.cloud, config.cov_reg)

        # Plan: direction by expected value improvement, step by coverage.
        h1 = config.entropy_weight * a.summary.spread()
        offset = choose_direction(a.position, a.cloud, world.plume,
                                  world.volume, h1)
        if world.l_max > 1:
            h2 = config.revisit_weight * min(
                1.0, distance_to_estimate(a.position, a.cloud)
                / world.volume.diagonal())
            step = choose_step(a.position, offset, a.cloud,
                               a.log.as_array(), world.volume,
                               world.l_max, h2)
        else:
            step = 1

        sense_pos = own.position
        new_pos = world.volume.clamp(
            a.position + step * world.volume.grid_edge
            * np.array(offset, float))
        dist = float(np.linalg.norm(new_pos - a.position))
        a.ledger.record_flight(dist, config.fly_speed)
        a.fly_time += dist / config.fly_speed
        turned = (a.last_direction is not None
                  and offset != a.last_direction)
        if turned:
            a.ledger.record_turn()
            a.turn_time += TURN_SECONDS
        a.last_direction = offset
        a.position = new_pos

        rows.append(TrajectoryRow(
            iteration=k,
            agent_id=a.agent_id,
            x=float(sense_pos[0]),
            y=float(sense_pos[1]),
            z=float(sense_pos[2]),
            detection=own.detection,
            n_particles=a.cloud.n,
            ess=float(ess),
            est_x=float(a.summary.mean[0]),
            est_y=float(a.summary.mean[1]),
            est_z=float(a.summary.mean[2]),
            spread=a.summary.spread(),
            dir_index=direction_index(offset),
            step=step,
            turned=int(turned),
            t_cum=a.search_clock,
            e_cum=a.ledger.total_and_budget()[0],
        ))

        declared, hit, err = check_declaration(
            a, world.source.position, config.declare_spread,
            config.success_radius)
        if declared:
            a.halted = True
            if hit:
                a.halt_reason = "success"
                success = (a, err)
                break  # episode over; trailing agents stand down
            a.halt_reason = "declared-miss"
            continue
        if a.ledger.total_and_budget()[1]:
            a.halted = True
            a.halt_reason = "energy"
        elif a.search_clock > config.time_cap:
            a.halted = True
            a.halt_reason = "time"

    return rows, success


def _finalize(config: RunConfig, seed: int, agents: list[AgentState],
              rows: list[TrajectoryRow], iterations: int,
              success: tuple[AgentState, float] | None) -> RunResult:
    reports = []
    for a in agents:
        led = a.ledger
        total, _ = led.total_and_budget()
        reports.append(AgentReport(
            agent_id=a.agent_id,
            hover_points=led.hover_points,
            turn_points=led.turn_points,
            fly_distance=led.fly_distance,
            fly_time=a.fly_time,
            hover_time=a.hover_time,
            turn_time=a.turn_time,
            compute_bits=led.compute_bits,
            comm_bits=led.comm_bits,
            e_fly=led.e_fly,
            e_hover=led.e_hover,
            e_turn=led.e_turn,
            e_compute=led.e_compute,
            e_comm=led.e_comm,
            e_movement=led.e_movement,
            e_total=total,
            cue_count=a.cloud.cue_count,
            halt_reason=a.halt_reason,
        ))
    if success is not None:
        agent, err = success
        return RunResult(True, agent.search_clock, agent.agent_id, err,
                         iterations, seed, config.algo, tuple(reports),
                         tuple(rows))
    return RunResult(False, None, None, None, iterations, seed,
                     config.algo, tuple(reports), tuple(rows))


def run_episode(config: RunConfig, seed: int,
                agent_ids: list[int] | None = None) -> RunResult:
    """Simulate one episode; deterministic in (config, seed, agent_ids).

    ``agent_ids`` picks launch slots and random streams explicitly
    (default 0..uav_count-1); passing a single id reproduces that agent's
    solo behavior exactly.
    """
    if config.algo not in VARIANTS:
        raise ValueError(f"unknown algo {config.algo!r}; "
                         f"expected one of {VARIANTS}")
    world = _make_world(config)
    ids = list(range(config.uav_count)) if agent_ids is None else list(agent_ids)
    agents = _spawn_agents(config, world.volume, seed, ids)

    rows: list[TrajectoryRow] = []
    success = None
    iterations = 0
    for k in range(1, config.k_max + 1):
        if all(a.halted for a in agents):
            break
        iterations = k
        new_rows, success = step_iteration(world, agents, k)
        rows.extend(new_rows)
        if success is not None:
            break
    return _finalize(config, seed, agents, rows, iterations, success)


def _mc_worker(payload: tuple[RunConfig, int]) -> RunResult:
    config, seed = payload
    return run_episode(config, seed)


def monte_carlo(config: RunConfig, run_count: int, master_seed: int,
                workers: int = 1) -> MCStats:
    """Batch of independent episodes seeded master_seed + run index.

    Results are keyed by run index, so worker count changes scheduling
    only, never the statistics.
    """
    if run_count < 1:
        raise ValueError("run_count must be at least 1")
    jobs = [(config, master_seed + i) for i in range(run_count)]
    if workers <= 1:
        results = [_mc_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_mc_worker, jobs))
    succ = [r for r in results if r.success]
    mean_time = (sum(r.search_time for r in succ) / len(succ)
                 if succ else None)
    return MCStats(run_count, len(succ), len(succ) / run_count,
                   mean_time, tuple(results))
