"""Command-line surface: single runs, Monte Carlo batches, parameter sweeps.

Exit codes: 0 on completion, 2 for bad flags or a bad configuration,
1 for runtime failures such as an unwritable output directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (
    ConfigError,
    RunConfig,
    VARIANTS,
    apply_override,
    parse_config_file,
)
from .reporting import batch_summary, sweep_summary, write_json, \
    write_trajectory
from .swarm import monte_carlo

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plumeseek",
        description="Multi-UAV odor source localization simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", metavar="PATH",
                       help="key = value configuration file")
        p.add_argument("--seed", type=int, default=None, metavar="U64",
                       help="master seed (default: config value)")
        p.add_argument("--algo", choices=VARIANTS, default=None,
                       help="variant override")
        p.add_argument("--out-dir", default=".", metavar="PATH",
                       help="directory for artifacts (default: cwd)")

    run_p = sub.add_parser("run", help="one episode")
    common(run_p)

    mc_p = sub.add_parser("mc", help="Monte Carlo batch")
    common(mc_p)
    mc_p.add_argument("--runs", type=int, default=200, metavar="N",
                      help="episode count (default 200)")
    mc_p.add_argument("--workers", type=int, default=1, metavar="N",
                      help="parallel processes (default 1)")

    sweep_p = sub.add_parser("sweep", help="one batch per swept value")
    common(sweep_p)
    sweep_p.add_argument("--runs", type=int, default=200, metavar="N",
                         help="episodes per value (default 200)")
    sweep_p.add_argument("--workers", type=int, default=1, metavar="N",
                         help="parallel processes (default 1)")
    sweep_p.add_argument("--sweep", required=True, metavar="KEY=V1,V2,...",
                         help="config key and comma-separated values")
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    config = (parse_config_file(args.config) if args.config
              else RunConfig())
    if args.algo is not None:
        config = apply_override(config, "algo", args.algo)
    if args.seed is not None:
        config = apply_override(config, "seed", str(args.seed))
    return config


def _prepare_dir(path: Path) -> Path:
    path.mkdir(parents=True, exist_ok=True)
    return path


def _run_batch(config: RunConfig, runs: int, workers: int,
               out_dir: Path, swept: dict | None = None) -> dict:
    """Execute one batch and write its artifacts; returns the summary."""
    stats = monte_carlo(config, runs, config.seed, workers=workers)
    for result in stats.results:
        write_trajectory(result, config,
                         str(out_dir / f"run_seed{result.seed}.csv"))
    summary = batch_summary(stats, config, config.seed, swept=swept)
    write_json(summary, str(out_dir / "summary.json"))
    return summary


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _prepare_dir(
        Path(args.out_dir) / f"run_{config.algo}_seed{config.seed}")
    summary = _run_batch(config, 1, 1, out)
    record = summary["per_run"][0]
    verdict = ("success" if record["success"]
               else "failure")
    print(f"{verdict}: seed {config.seed}, {record['iterations']} "
          f"iterations -> {out}")
    return 0


def _cmd_mc(args: argparse.Namespace) -> int:
    config = _load_config(args)
    out = _prepare_dir(
        Path(args.out_dir)
        / f"mc_{config.algo}_seed{config.seed}_n{args.runs}")
    summary = _run_batch(config, args.runs, args.workers, out)
    mst = summary["mean_search_time"]
    print(f"{config.algo}: SR {summary['success_rate']:.3f} "
          f"({summary['success_count']}/{summary['run_count']}), "
          f"MST {mst if mst is not None else 'n/a'} -> {out}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    key, _, raw_values = args.sweep.partition("=")
    key = key.strip()
    values = [v.strip() for v in raw_values.split(",") if v.strip()]
    if not key or not values:
        print("sweep: expected KEY=V1,V2,...", file=sys.stderr)
        return 2
    base = _load_config(args)
    # Validate every value before running anything.
    configs = [(value, apply_override(base, key, value)) for value in values]

    sweep_dir = _prepare_dir(Path(args.out_dir) / f"sweep_{key}")
    rows = []
    for value, config in configs:
        batch_dir = _prepare_dir(sweep_dir / f"{config.algo}_{value}")
        summary = _run_batch(config, args.runs, args.workers, batch_dir,
                             swept={"key": key, "value": value})
        rows.append({
            "value": value,
            "algo": config.algo,
            "run_count": summary["run_count"],
            "success_count": summary["success_count"],
            "success_rate": summary["success_rate"],
            "mean_search_time": summary["mean_search_time"],
            "summary_path": str(batch_dir.relative_to(sweep_dir)
                                / "summary.json"),
        })
        mst = summary["mean_search_time"]
        print(f"{key}={value} [{config.algo}]: "
              f"SR {summary['success_rate']:.3f}, "
              f"MST {mst if mst is not None else 'n/a'}")
    write_json(sweep_summary(key, rows), str(sweep_dir / "sweep_summary.json"))
    print(f"sweep table -> {sweep_dir / 'sweep_summary.json'}")
    return 0


_COMMANDS = {"run": _cmd_run, "mc": _cmd_mc, "sweep": _cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
