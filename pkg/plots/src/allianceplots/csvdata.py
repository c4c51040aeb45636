"""Readers for the simulator's CSV and JSON artifacts.

The plotting layer consumes the documented file formats only; it never
imports the simulator.  Every reader validates the header and raises
SchemaError naming the column it expected.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np


class SchemaError(Exception):
    """An input file does not match its documented schema."""


def _read_table(path: str, expected: list[str]) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        columns = header.split(",") if header else []
        for name in expected:
            if name not in columns:
                raise SchemaError(
                    f"{os.path.basename(path)}: expected column {name!r}, "
                    f"got header {header!r}")
        if columns != expected:
            raise SchemaError(
                f"{os.path.basename(path)}: expected header "
                f"{','.join(expected)!r}, got {header!r}")
        body = fh.read()
    if not body.strip():
        return np.empty((0, len(expected)))
    import io
    return np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.float64, ndmin=2)


@dataclass
class Timeseries:
    step: np.ndarray
    leader_id: np.ndarray
    leader_status: np.ndarray
    count_above: np.ndarray
    total_status: np.ndarray


def read_timeseries(path: str) -> Timeseries:
    data = _read_table(path, ["step", "leader_id", "leader_status",
                              "count_above", "total_status"])
    if data.shape[0] == 0:
        raise SchemaError(f"{os.path.basename(path)}: no data rows")
    return Timeseries(data[:, 0], data[:, 1].astype(np.int64), data[:, 2],
                      data[:, 3].astype(np.int64), data[:, 4])


@dataclass
class Episodes:
    individual: np.ndarray
    rise_step: np.ndarray
    above_from: np.ndarray
    above_to: np.ndarray
    tenure_above: np.ndarray

    def __len__(self) -> int:
        return self.individual.shape[0]


def read_episodes(path: str) -> Episodes:
    data = _read_table(path, ["individual", "rise_step", "above_from",
                              "above_to", "tenure_above"])
    return Episodes(*(data[:, k].astype(np.int64) for k in range(5)))


@dataclass
class Histogram:
    in_degree: np.ndarray
    frequency: np.ndarray


def read_histogram(path: str) -> Histogram:
    data = _read_table(path, ["in_degree", "frequency"])
    if data.shape[0] == 0:
        raise SchemaError(f"{os.path.basename(path)}: no data rows")
    return Histogram(data[:, 0].astype(np.int64), data[:, 1])


@dataclass
class Snapshots:
    step: np.ndarray
    statuses: np.ndarray  # one row per snapshot, one column per individual


def read_snapshots(path: str) -> Snapshots:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    if not header or header[0] != "step" or len(header) < 2 or \
            not all(c.startswith("s_") for c in header[1:]):
        raise SchemaError(f"{os.path.basename(path)}: expected column 'step' "
                          f"followed by s_0..s_n columns")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[0] == 0:
        raise SchemaError(f"{os.path.basename(path)}: no data rows")
    return Snapshots(data[:, 0], data[:, 1:])


@dataclass
class FinalState:
    individual: np.ndarray
    status: np.ndarray
    targets: np.ndarray  # (n, lambda) link targets


def read_final_state(path: str) -> FinalState:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    if header[:2] != ["individual", "status"] or len(header) < 3 or \
            not all(c.startswith("target_") for c in header[2:]):
        raise SchemaError(f"{os.path.basename(path)}: expected columns "
                          f"'individual,status,target_0...'")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return FinalState(data[:, 0].astype(np.int64), data[:, 1],
                      data[:, 2:].astype(np.int64))


@dataclass
class SweepTable:
    q: np.ndarray
    median_tenure: np.ndarray
    new_leader_count: np.ndarray


def read_sweep(path: str) -> SweepTable:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for name in ("q", "median_tenure", "new_leader_count", "error"):
            if name not in header:
                raise SchemaError(f"{os.path.basename(path)}: expected column "
                                  f"{name!r}, got header {','.join(header)!r}")
        qi = header.index("q")
        ti = header.index("median_tenure")
        ni = header.index("new_leader_count")
        ei = header.index("error")
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(header) or parts[ei]:
                continue  # skip error rows
            rows.append((float(parts[qi]), float(parts[ti]), float(parts[ni])))
    if not rows:
        raise SchemaError(f"{os.path.basename(path)}: no usable rows")
    data = np.array(rows)
    return SweepTable(data[:, 0], data[:, 1], data[:, 2])


def read_analysis(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "threshold" not in doc:
        raise SchemaError(f"{os.path.basename(path)}: expected key 'threshold'")
    return doc
