"""Command-line surface mirroring the simulator's flag naming."""

from __future__ import annotations

import argparse
import sys

from .charts import plot_sweep, plot_trajectory3d

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plumeseek-plots",
        description="Render figures from plumeseek run artifacts.")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep_p = sub.add_parser("sweep", help="metric comparison chart")
    sweep_p.add_argument("summaries", nargs="+", metavar="SUMMARY.json",
                         help="sweep or swept batch summary files")
    sweep_p.add_argument("--metric", choices=("mst", "sr"), default="mst",
                         help="mean search time or success rate")
    sweep_p.add_argument("--out", required=True, metavar="IMAGE",
                         help="output image path")

    traj_p = sub.add_parser("traj", help="3D trajectory scene")
    traj_p.add_argument("trajectory", metavar="TRAJECTORY.csv",
                        help="episode trajectory file")
    traj_p.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            chart = plot_sweep(args.summaries, args.metric, args.out)
            print(f"{len(chart.table.rows)} rows "
                  f"({len(chart.series)} variants) -> {chart.path}")
        else:
            scene = plot_trajectory3d(args.trajectory, args.out)
            print(f"{len(scene.agent_paths)} agents, "
                  f"{len(scene.cue_points)} cues -> {scene.path}")
        return 0
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
