"""CSV and manifest emission.

All files use LF line endings and print reals with 17 significant digits,
so every float64 round-trips exactly and re-running a seeded run reproduces
byte-identical files.  Schemas:

  timeseries.csv        step,leader_id,leader_status,count_above,total_status
  episodes.csv          individual,rise_step,above_from,above_to,tenure_above
  histogram.csv         in_degree,frequency           (ascending, non-empty bins)
  sweep.csv             one row per sweep grid row, all summary fields
  status_snapshots.csv  step,s_0,...,s_{n-1}
  final_state.csv       individual,status,target_0,...,target_{lambda-1}

The run manifest (run_manifest.json) lists every emitted file with its
sha256 checksum plus the resolved configuration.
"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .metrics import DegreeHistogram, LeaderEpisode, StepRecords
from .model import NetworkState
from .runner import StatusSnapshots
from .sweep import SweepResult

MANIFEST_SCHEMA_VERSION = 1
MANIFEST_NAME = "run_manifest.json"


def fmt_real(x: float) -> str:
    return f"{x:.17g}"


def _write_lines(path: str, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def emit_timeseries(records: StepRecords, path: str) -> None:
    lines = ["step,leader_id,leader_status,count_above,total_status"]
    for k in range(len(records)):
        lines.append(
            f"{records.step[k]},{records.leader[k]},"
            f"{fmt_real(records.leader_status[k])},{records.count_above[k]},"
            f"{fmt_real(records.total_status[k])}")
    _write_lines(path, lines)


def read_timeseries(path: str) -> StepRecords:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        expected = "step,leader_id,leader_status,count_above,total_status"
        if header != expected:
            raise ConfigError(f"{path}: expected header {expected!r}, got {header!r}")
        body = fh.read()
    if not body.strip():
        return StepRecords.empty()
    import io as _io
    data = np.loadtxt(_io.StringIO(body), delimiter=",", dtype=np.float64, ndmin=2)
    return StepRecords(
        step=data[:, 0].astype(np.int64),
        leader=data[:, 1].astype(np.int64),
        leader_status=data[:, 2],
        count_above=data[:, 3].astype(np.int64),
        total_status=data[:, 4],
    )


def emit_episodes(episodes: Sequence[LeaderEpisode], path: str) -> None:
    lines = ["individual,rise_step,above_from,above_to,tenure_above"]
    for e in episodes:
        lines.append(f"{e.individual},{e.rise_step},{e.above_from},"
                     f"{e.above_to},{e.tenure_above}")
    _write_lines(path, lines)


def read_episodes(path: str) -> list[LeaderEpisode]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        expected = "individual,rise_step,above_from,above_to,tenure_above"
        if header != expected:
            raise ConfigError(f"{path}: expected header {expected!r}, got {header!r}")
        episodes = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            ind, rise, a_from, a_to, _tenure = (int(v) for v in line.split(","))
            episodes.append(LeaderEpisode(ind, rise, a_from, a_to))
    return episodes


def emit_histogram(hist: DegreeHistogram, path: str) -> None:
    lines = ["in_degree,frequency"]
    for x, freq in hist.nonzero_items():
        lines.append(f"{x},{freq}")
    _write_lines(path, lines)


def read_histogram(path: str) -> DegreeHistogram:
    """Rebuild the dense counts array; absent bins are zero.  The CSV does
    not carry sample_count (the manifest does), so it is returned as 0."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "in_degree,frequency":
            raise ConfigError(f"{path}: expected header 'in_degree,frequency', got {header!r}")
        pairs = [(int(a), int(b)) for a, b in
                 (line.strip().split(",") for line in fh if line.strip())]
    size = max((x for x, _ in pairs), default=0) + 1
    counts = np.zeros(size, dtype=np.int64)
    for x, freq in pairs:
        counts[x] = freq
    return DegreeHistogram(counts=counts, sample_count=0)


SWEEP_HEADER = ("index,n,lambda,r,q,w,steps,run_seed,error,new_leader_count,"
                "mean_tenure,median_tenure,frac_count_0,frac_count_1,"
                "frac_count_2,frac_count_3plus,exponent,fit_r_squared,phase")


def emit_sweep(result: SweepResult, path: str) -> None:
    lines = [SWEEP_HEADER]
    for row in result.rows:
        p = row.params
        exponent = "" if row.exponent is None else fmt_real(row.exponent)
        r2 = "" if row.fit_r_squared is None else fmt_real(row.fit_r_squared)
        phase = "" if row.phase is None else row.phase.value
        error = row.error.replace(",", ";").replace("\n", " ")
        lines.append(
            f"{row.index},{p.n},{p.lam},{fmt_real(p.r)},{fmt_real(p.q)},"
            f"{fmt_real(p.w)},{p.steps},{row.run_seed},{error},"
            f"{row.new_leader_count},{fmt_real(row.mean_tenure)},"
            f"{fmt_real(row.median_tenure)},{fmt_real(row.frac_count_0)},"
            f"{fmt_real(row.frac_count_1)},{fmt_real(row.frac_count_2)},"
            f"{fmt_real(row.frac_count_3plus)},{exponent},{r2},{phase}")
    _write_lines(path, lines)


def emit_status_snapshots(snapshots: StatusSnapshots, path: str) -> None:
    n = snapshots.statuses.shape[1]
    lines = ["step," + ",".join(f"s_{i}" for i in range(n))]
    for k in range(len(snapshots)):
        row = ",".join(fmt_real(v) for v in snapshots.statuses[k])
        lines.append(f"{snapshots.step[k]},{row}")
    _write_lines(path, lines)


def emit_final_state(state: NetworkState, path: str) -> None:
    lam = state.lam
    lines = ["individual,status," + ",".join(f"target_{k}" for k in range(lam))]
    for i in range(state.n):
        targets = ",".join(str(int(t)) for t in state.out_links[i])
        lines.append(f"{i},{fmt_real(state.statuses[i])},{targets}")
    _write_lines(path, lines)


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: str, payload: dict, artifact_names: Sequence[str]) -> str:
    """Write run_manifest.json with a checksum entry for every artifact."""
    artifacts = {}
    for name in artifact_names:
        full = os.path.join(out_dir, name)
        artifacts[name] = {"path": name, "sha256": sha256_file(full)}
    doc = {"schema_version": MANIFEST_SCHEMA_VERSION, **payload, "artifacts": artifacts}
    path = os.path.join(out_dir, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
