"""Deterministic run artifacts: trajectory CSVs and summary records.

Every artifact embeds the master seed, the canonical serialization of the
effective configuration and its SHA-256 digest, so a file is traceable to
the exact settings that produced it and identical inputs rewrite
byte-identical files. Data values are rendered with six significant
digits; the embedded config echo keeps full precision because the digest
is computed over it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, fields

from .config import RunConfig, config_digest, serialize_config
from .swarm import MCStats, RunResult, nominal_payload_ratio, payload_values

__all__ = [
    "CSV_HEADER",
    "trajectory_text",
    "write_trajectory",
    "batch_summary",
    "sweep_summary",
    "render_json",
    "write_json",
]

CSV_HEADER = ("iter,uav_id,x,y,z,detection,n_particles,ess,"
              "est_x,est_y,est_z,spread,dir_index,step,turned,t_cum,e_cum")

# TrajectoryRow fields rendered as integers; everything else is %.6g.
_INT_COLUMNS = {"iteration", "agent_id", "detection", "n_particles",
                "dir_index", "step", "turned"}


def _fmt(name: str, value) -> str:
    if name in _INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".6g")


def _preamble(config: RunConfig, seed: int) -> list[str]:
    lines = [f"# seed = {seed}",
             f"# config_sha256 = {config_digest(config)}"]
    lines += [f"# config: {line}"
              for line in serialize_config(config).splitlines()]
    return lines


def trajectory_text(result: RunResult, config: RunConfig) -> str:
    """Render one episode as CSV text (header only when no iterations ran)."""
    lines = _preamble(config, result.seed)
    lines.append(CSV_HEADER)
    names = result.rows[0]._fields if result.rows else ()
    for row in result.rows:
        lines.append(",".join(_fmt(n, v) for n, v in zip(names, row)))
    return "\n".join(lines) + "\n"


def write_trajectory(result: RunResult, config: RunConfig,
                     path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trajectory_text(result, config))


def _round6(value):
    """Six-significant-digit rounding, applied recursively."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(format(value, ".6g"))
    if isinstance(value, dict):
        return {k: _round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round6(v) for v in value]
    return value


def _run_record(result: RunResult) -> dict:
    return {
        "seed": result.seed,
        "success": result.success,
        "search_time": result.search_time,
        "declaring_agent": result.declaring_agent,
        "estimate_error": result.estimate_error,
        "iterations": result.iterations,
        "agents": [asdict(a) for a in result.agents],
    }


def batch_summary(stats: MCStats, config: RunConfig, master_seed: int,
                  swept: dict | None = None) -> dict:
    """Structured record for one batch: headline metrics, per-run search
    times and outcomes, per-agent energy breakdowns, and the exact
    communication payload accounting for the batch's variant."""
    nominal, actual = payload_values(config.algo, config.particle_count)
    payload = {
        "schema": "batch-summary/1",
        "algo": config.algo,
        "master_seed": master_seed,
        "config_sha256": config_digest(config),
        "run_count": stats.run_count,
        "success_count": stats.success_count,
        "failure_count": stats.run_count - stats.success_count,
        "success_rate": stats.success_rate,
        "mean_search_time": stats.mean_search_time,
        "search_times": [r.search_time for r in stats.results
                         if r.success],
        "comm_payload": {
            "values_nominal": nominal,
            "values_actual": actual,
            "bits_per_value": config.value_bits,
            "cloud_to_summary_ratio":
                str(nominal_payload_ratio(config.particle_count)),
        },
        "per_run": [_run_record(r) for r in stats.results],
    }
    if swept is not None:
        payload["swept"] = dict(swept)
    payload = {k: (_round6(v) if k != "config" else v)
               for k, v in payload.items()}
    payload["config"] = {f.name: getattr(config, f.name)
                         for f in fields(RunConfig)}
    return payload


def sweep_summary(swept_key: str, rows: list[dict]) -> dict:
    """Combined table across one swept key: one row per (value, algo)."""
    return {
        "schema": "sweep-summary/1",
        "swept_key": swept_key,
        "rows": [_round6(row) for row in rows],
    }


def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_json(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_json(payload))
