"""Readers for the simulator's file formats.

Two inputs exist: trajectory CSVs (one row per agent per iteration, with
a ``# key = value`` provenance preamble) and JSON summary records
(``batch-summary/1`` per batch, ``sweep-summary/1`` per swept key). This
module never writes anything.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Trajectory",
    "SweepRow",
    "SweepTable",
    "read_trajectory",
    "read_summary",
    "load_sweep_table",
]

# Columns the plotting code relies on; extra columns are kept but unused.
_REQUIRED = ("iter", "uav_id", "x", "y", "z", "detection")
_INT_COLUMNS = {"iter", "uav_id", "detection", "n_particles", "dir_index",
                "step", "turned"}


@dataclass(frozen=True)
class Trajectory:
    """One episode: provenance metadata plus columnar row data."""

    seed: int | None
    config: dict[str, str]
    config_sha256: str | None
    columns: dict[str, np.ndarray]

    @property
    def agents(self) -> list[int]:
        if len(self.columns["uav_id"]) == 0:
            return []
        return sorted(int(i) for i in np.unique(self.columns["uav_id"]))

    def agent_path(self, agent_id: int) -> np.ndarray:
        """Sensing positions of one agent in iteration order, shape (k, 3)."""
        mask = self.columns["uav_id"] == agent_id
        order = np.argsort(self.columns["iter"][mask], kind="stable")
        xyz = np.column_stack([self.columns[c][mask] for c in "xyz"])
        return xyz[order]

    def cue_points(self) -> np.ndarray:
        """Positions of every nonzero detection, shape (m, 3)."""
        mask = self.columns["detection"] > 0
        return np.column_stack([self.columns[c][mask] for c in "xyz"])

    def source(self) -> tuple[float, float, float] | None:
        try:
            return tuple(float(self.config[f"source_{c}"]) for c in "xyz")
        except (KeyError, ValueError):
            return None


def read_trajectory(path: str) -> Trajectory:
    seed: int | None = None
    digest: str | None = None
    config: dict[str, str] = {}
    data_lines: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# config: "):
                key, _, value = line[len("# config: "):].partition("=")
                config[key.strip()] = value.strip()
            elif line.startswith("# seed = "):
                seed = int(line[len("# seed = "):])
            elif line.startswith("# config_sha256 = "):
                digest = line[len("# config_sha256 = "):].strip()
            elif line.startswith("#") or not line.strip():
                continue
            else:
                data_lines.append(line)
    if not data_lines:
        raise ValueError(f"{path}: no header row found")
    reader = csv.reader(data_lines)
    header = next(reader)
    missing = [c for c in _REQUIRED if c not in header]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    raw = list(reader)
    columns: dict[str, np.ndarray] = {}
    for i, name in enumerate(header):
        cells = [row[i] for row in raw]
        dtype = int if name in _INT_COLUMNS else float
        columns[name] = np.array([dtype(c) for c in cells],
                                 dtype=dtype)
    return Trajectory(seed, config, digest, columns)


def read_summary(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    schema = doc.get("schema")
    if schema not in ("batch-summary/1", "sweep-summary/1"):
        raise ValueError(f"{path}: unknown schema {schema!r}")
    return doc


@dataclass(frozen=True)
class SweepRow:
    value: str
    variant: str
    mst: float | None
    sr: float
    run_count: int


@dataclass(frozen=True)
class SweepTable:
    """One row per (value, variant) pair of a single swept key."""

    key: str
    rows: tuple[SweepRow, ...]

    @property
    def values(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.value not in seen:
                seen.append(row.value)
        return seen

    @property
    def variants(self) -> list[str]:
        seen: list[str] = []
        for row in self.rows:
            if row.variant not in seen:
                seen.append(row.variant)
        return seen

    def lookup(self, value: str, variant: str) -> SweepRow | None:
        for row in self.rows:
            if row.value == value and row.variant == variant:
                return row
        return None


def _rows_from_doc(doc: dict, path: str) -> tuple[str, list[SweepRow]]:
    if doc["schema"] == "sweep-summary/1":
        rows = [SweepRow(str(r["value"]), r["algo"], r["mean_search_time"],
                         r["success_rate"], r["run_count"])
                for r in doc["rows"]]
        return doc["swept_key"], rows
    swept = doc.get("swept")
    if not swept:
        raise ValueError(
            f"{path}: batch summary carries no swept key/value tag")
    row = SweepRow(str(swept["value"]), doc["algo"],
                   doc["mean_search_time"], doc["success_rate"],
                   doc["run_count"])
    return swept["key"], [row]


def load_sweep_table(paths: list[str]) -> SweepTable:
    """Merge summary files into one table; mixed keys or duplicate
    (value, variant) pairs are rejected."""
    if not paths:
        raise ValueError("no summary paths given")
    key: str | None = None
    rows: list[SweepRow] = []
    seen: set[tuple[str, str]] = set()
    for path in paths:
        doc_key, doc_rows = _rows_from_doc(read_summary(path), path)
        if key is None:
            key = doc_key
        elif key != doc_key:
            raise ValueError(
                f"{path}: swept key {doc_key!r} clashes with {key!r}")
        for row in doc_rows:
            pair = (row.value, row.variant)
            if pair in seen:
                raise ValueError(f"{path}: duplicate entry for {pair}")
            seen.add(pair)
            rows.append(row)
    assert key is not None
    return SweepTable(key, tuple(rows))
