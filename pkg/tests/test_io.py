"""CSV emission: schemas, byte-level determinism, and round trips."""

import numpy as np
import pytest

import alliancesim as asim
from alliancesim import io as asio
from alliancesim.errors import ConfigError


@pytest.fixture
def short_run():
    params = asim.ModelParams(n=15, lam=3, q=0.6, w=0.5, steps=300, seed=21)
    return asim.run_recorded(params, asim.MetricsConfig())


class TestTimeseries:
    def test_row_count_and_header(self, tmp_path, short_run):
        path = tmp_path / "timeseries.csv"
        rec = asim.StepRecords(*[getattr(short_run.records, f)[:3] for f in
                                 ("step", "leader", "leader_status",
                                  "count_above", "total_status")])
        asio.emit_timeseries(rec, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 4
        assert lines[0] == "step,leader_id,leader_status,count_above,total_status"

    def test_lf_endings_and_byte_determinism(self, tmp_path, short_run):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        asio.emit_timeseries(short_run.records, str(a))
        asio.emit_timeseries(short_run.records, str(b))
        data = a.read_bytes()
        assert data == b.read_bytes()
        assert b"\r" not in data

    def test_floats_round_trip_exactly(self, tmp_path, short_run):
        path = tmp_path / "t.csv"
        asio.emit_timeseries(short_run.records, str(path))
        back = asio.read_timeseries(str(path))
        for field in ("step", "leader", "leader_status", "count_above",
                      "total_status"):
            assert np.array_equal(getattr(back, field),
                                  getattr(short_run.records, field)), field

    def test_header_mismatch_raises(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope\n1,2\n")
        with pytest.raises(ConfigError, match="expected header"):
            asio.read_timeseries(str(path))

    def test_empty_records_round_trip(self, tmp_path):
        path = tmp_path / "empty.csv"
        asio.emit_timeseries(asim.StepRecords.empty(), str(path))
        assert len(asio.read_timeseries(str(path))) == 0


class TestEpisodesAndHistogram:
    def test_empty_episode_list_gives_header_only(self, tmp_path):
        path = tmp_path / "episodes.csv"
        asio.emit_episodes([], str(path))
        assert path.read_text() == \
            "individual,rise_step,above_from,above_to,tenure_above\n"

    def test_episode_round_trip(self, tmp_path):
        episodes = [asim.LeaderEpisode(3, 10, 10, 110),
                    asim.LeaderEpisode(9, 200, 200, 270)]
        path = tmp_path / "episodes.csv"
        asio.emit_episodes(episodes, str(path))
        assert asio.read_episodes(str(path)) == episodes

    def test_histogram_sorted_and_round_trip(self, tmp_path, short_run):
        path = tmp_path / "histogram.csv"
        asio.emit_histogram(short_run.histogram, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "in_degree,frequency"
        degrees = [int(line.split(",")[0]) for line in lines[1:]]
        assert degrees == sorted(degrees)
        back = asio.read_histogram(str(path))
        trimmed = short_run.histogram.counts[:back.counts.size]
        assert np.array_equal(back.counts, trimmed)
        assert short_run.histogram.counts[back.counts.size:].sum() == 0

    def test_final_state_and_snapshot_schemas(self, tmp_path):
        params = asim.ModelParams(n=6, lam=2, steps=40, seed=2)
        res = asim.run_recorded(params, status_stride=10)
        fs = tmp_path / "final_state.csv"
        asio.emit_final_state(res.final_state, str(fs))
        lines = fs.read_text().splitlines()
        assert lines[0] == "individual,status,target_0,target_1"
        assert len(lines) == 7
        snaps = tmp_path / "snaps.csv"
        asio.emit_status_snapshots(res.snapshots, str(snaps))
        lines = snaps.read_text().splitlines()
        assert lines[0] == "step," + ",".join(f"s_{i}" for i in range(6))
        assert len(lines) == 1 + 4


class TestSweepEmission:
    def test_row_count_matches_grid(self, tmp_path):
        base = asim.ModelParams(n=10, lam=2, steps=200)
        cfg = asim.SweepConfig(base=base, axes=(("q", (0.5, 0.6)),), replicates=2)
        result = asim.run_sweep(cfg)
        path = tmp_path / "sweep.csv"
        asio.emit_sweep(result, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == asio.SWEEP_HEADER
        assert len(lines) == 1 + len(asim.expand_grid(cfg))

    def test_error_rows_keep_csv_shape(self, tmp_path):
        base = asim.ModelParams(n=5, lam=2, steps=50)
        cfg = asim.SweepConfig(base=base, axes=(("lam", (2, 9)),))
        result = asim.run_sweep(cfg)
        path = tmp_path / "sweep.csv"
        asio.emit_sweep(result, str(path))
        for line in path.read_text().splitlines()[1:]:
            assert line.count(",") == asio.SWEEP_HEADER.count(",")


class TestManifest:
    def test_checksums_match_contents(self, tmp_path, short_run):
        asio.emit_timeseries(short_run.records, str(tmp_path / "timeseries.csv"))
        asio.emit_histogram(short_run.histogram, str(tmp_path / "histogram.csv"))
        manifest_path = asio.write_manifest(
            str(tmp_path), {"kind": "run"}, ["timeseries.csv", "histogram.csv"])
        import json
        manifest = json.loads(open(manifest_path).read())
        assert manifest["schema_version"] == 1
        for name, entry in manifest["artifacts"].items():
            assert entry["sha256"] == asio.sha256_file(str(tmp_path / name))
