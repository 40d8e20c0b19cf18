"""
Tests for the quench runner — run directories, manifests and sweeps.

Validates:
- CSV layout, config echo and row counts
- Byte-identical output for identical configurations
- Failed runs leave a failed manifest behind
- Sweep directories, index file and failure isolation
"""

from __future__ import annotations

import csv
import json

import pytest

from xxz_quench.dynamics.tebd import observe
from xxz_quench.errors import CanonicalizationError, EvolutionAbortedError
from xxz_quench.experiments import runner
from xxz_quench.experiments.runner import (
    CONCURRENCE_FILE,
    INDEX_FILE,
    MAGNETIZATION_FILE,
    MANIFEST_FILE,
    RUNLOG_FILE,
    SNAPSHOT_FILE,
    QuenchRunError,
    format_number,
    run_quench,
    sweep,
    sweep_directories,
)
from xxz_quench.experiments.schema import QuenchConfig, QuenchProtocol, RunStatus
from xxz_quench.mps.snapshot import load_snapshot


def _small_config(tmp_path, **updates) -> QuenchConfig:
    values = {
        "n_sites": 6,
        "j_z": 1.0,
        "dt": 0.05,
        "t_max": 0.4,
        "observe_stride": 2,
        "output_dir": tmp_path / "run",
    }
    values.update(updates)
    return QuenchConfig(**values)


def _data_rows(path) -> list[list[str]]:
    with path.open(encoding="utf-8") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.reader(lines))


class TestRunQuench:
    """Test a single run."""

    def setup_method(self):
        self.observations = 5  # steps 0, 2, 4, 6, 8

    def test_writes_all_files(self, tmp_path):
        result = run_quench(_small_config(tmp_path))
        for name in (CONCURRENCE_FILE, MAGNETIZATION_FILE, RUNLOG_FILE, MANIFEST_FILE):
            assert (result.output_dir / name).is_file()
        assert not (result.output_dir / SNAPSHOT_FILE).exists()

    def test_csv_headers_and_rows(self, tmp_path):
        result = run_quench(_small_config(tmp_path))
        concurrence = _data_rows(result.output_dir / CONCURRENCE_FILE)
        assert concurrence[0] == ["time", "bond", "concurrence"]
        assert len(concurrence) - 1 == self.observations * 5
        assert [row[1] for row in concurrence[1:6]] == ["1", "2", "3", "4", "5"]

        magnetization = _data_rows(result.output_dir / MAGNETIZATION_FILE)
        assert magnetization[0] == ["time", "site", "sz"]
        assert len(magnetization) - 1 == self.observations * 6
        assert magnetization[1] == ["0", "1", "1"]
        assert magnetization[2] == ["0", "2", "-1"]

        runlog = _data_rows(result.output_dir / RUNLOG_FILE)
        assert runlog[0] == [
            "step", "time", "discarded_weight_step", "discarded_weight_cum", "energy", "norm"
        ]
        assert [row[0] for row in runlog[1:]] == ["0", "2", "4", "6", "8"]
        assert float(runlog[1][4]) == pytest.approx(-5.0)

    def test_config_echo_header(self, tmp_path):
        result = run_quench(_small_config(tmp_path, j_z=0.5))
        lines = (result.output_dir / CONCURRENCE_FILE).read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("# xxz-quench ")
        assert "# j_z = 0.5" in lines
        assert "# protocol = anisotropy_quench" in lines

    def test_deterministic_output(self, tmp_path):
        config = _small_config(tmp_path, protocol=QuenchProtocol.DOMAIN_WALL)
        run_quench(config)
        first = {
            name: (config.output_dir / name).read_bytes()
            for name in (CONCURRENCE_FILE, MAGNETIZATION_FILE, RUNLOG_FILE)
        }
        run_quench(config)
        for name, content in first.items():
            assert (config.output_dir / name).read_bytes() == content

    def test_manifest_on_success(self, tmp_path):
        result = run_quench(_small_config(tmp_path))
        manifest = json.loads((result.output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
        assert manifest["status"] == "success"
        assert manifest["observations"] == self.observations
        assert manifest["config"]["n_sites"] == 6
        assert manifest["error"] is None
        assert manifest["final_cumulative_discarded_weight"] >= 0.0

    def test_output_dir_override(self, tmp_path):
        result = run_quench(_small_config(tmp_path), output_dir=tmp_path / "elsewhere")
        assert result.output_dir == tmp_path / "elsewhere"
        assert result.config.output_dir == tmp_path / "elsewhere"
        assert (tmp_path / "elsewhere" / MANIFEST_FILE).is_file()

    def test_saves_final_state(self, tmp_path):
        result = run_quench(_small_config(tmp_path, save_final_state=True))
        state = load_snapshot(result.output_dir / SNAPSHOT_FILE)
        assert state.n_sites == 6

    def test_failure_writes_failed_manifest(self, tmp_path, monkeypatch):
        def _abort(*args, **kwargs):
            raise EvolutionAbortedError("Norm drifted", step=3, time=0.15)

        monkeypatch.setattr(runner, "evolve", _abort)
        config = _small_config(tmp_path)
        with pytest.raises(QuenchRunError) as info:
            run_quench(config)
        assert info.value.output_dir == str(config.output_dir)
        manifest = json.loads((config.output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
        assert manifest["status"] == "failed"
        assert "Norm drifted" in manifest["error"]

    def test_any_exception_writes_failed_manifest(self, tmp_path, monkeypatch):
        def _lose_canonical_form(*args, **kwargs):
            raise CanonicalizationError("Bond 2 weights underflow to zero")

        monkeypatch.setattr(runner, "evolve", _lose_canonical_form)
        config = _small_config(tmp_path)
        with pytest.raises(QuenchRunError):
            run_quench(config)
        manifest = json.loads((config.output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
        assert manifest["status"] == "failed"
        assert manifest["error"].startswith("CanonicalizationError")

    def test_rows_before_abort_are_kept(self, tmp_path, monkeypatch):
        def _abort_after_first(state, params, schedule, trunc, observer=None, **kwargs):
            observer(observe(state, params, step=0, time=0.0))
            raise EvolutionAbortedError("Norm drifted", step=2, time=0.1)

        monkeypatch.setattr(runner, "evolve", _abort_after_first)
        config = _small_config(tmp_path)
        with pytest.raises(QuenchRunError):
            run_quench(config)
        concurrence = _data_rows(config.output_dir / CONCURRENCE_FILE)
        assert len(concurrence) - 1 == 5
        runlog = _data_rows(config.output_dir / RUNLOG_FILE)
        assert [row[0] for row in runlog[1:]] == ["0"]


class TestFormatting:
    """Test number formatting of CSV cells."""

    def test_integers_are_short(self):
        assert format_number(1.0) == "1"
        assert format_number(-1.0) == "-1"

    def test_keeps_fifteen_digits(self):
        assert float(format_number(0.1 + 0.2)) == pytest.approx(0.3, abs=1e-15)
        assert len(format_number(1 / 3).replace("0.", "")) >= 12

    def test_sweep_directory_names(self):
        assert sweep_directories([0, 0.5, 1.0, 0.5]) == ["jz_0", "jz_0.5", "jz_1", "jz_0.5__2"]


class TestSweep:
    """Test anisotropy sweeps."""

    def test_one_directory_per_value(self, tmp_path):
        base = _small_config(tmp_path, output_dir=tmp_path / "sweep", t_max=0.1)
        entries = sweep(base, [0.0, 0.5, 1.0, 1.5, 2.0])
        assert [e.j_z for e in entries] == [0.0, 0.5, 1.0, 1.5, 2.0]
        assert all(e.status is RunStatus.SUCCESS for e in entries)
        for entry in entries:
            assert (entry.directory / CONCURRENCE_FILE).is_file()

        index = _data_rows(tmp_path / "sweep" / INDEX_FILE)
        assert index[0] == ["j_z", "directory", "status", "error"]
        assert [row[1] for row in index[1:]] == ["jz_0", "jz_0.5", "jz_1", "jz_1.5", "jz_2"]

    def test_run_uses_its_own_anisotropy(self, tmp_path):
        base = _small_config(tmp_path, output_dir=tmp_path / "sweep", t_max=0.1)
        sweep(base, [0.25])
        manifest = json.loads(
            (tmp_path / "sweep" / "jz_0.25" / MANIFEST_FILE).read_text(encoding="utf-8")
        )
        assert manifest["config"]["j_z"] == 0.25

    def test_failure_does_not_stop_others(self, tmp_path, monkeypatch):
        real_evolve = runner.evolve

        def _evolve(state, params, *args, **kwargs):
            if params.j_z == 0.5:
                raise EvolutionAbortedError("corrupt density matrix", step=1, time=0.05)
            return real_evolve(state, params, *args, **kwargs)

        monkeypatch.setattr(runner, "evolve", _evolve)
        base = _small_config(tmp_path, output_dir=tmp_path / "sweep", t_max=0.1)
        entries = sweep(base, [0.0, 0.5, 1.0])
        assert [e.status for e in entries] == [
            RunStatus.SUCCESS, RunStatus.FAILED, RunStatus.SUCCESS
        ]
        assert "corrupt" in entries[1].error
        index = _data_rows(tmp_path / "sweep" / INDEX_FILE)
        assert index[2][2] == "failed"

    def test_unexpected_error_does_not_stop_others(self, tmp_path, monkeypatch):
        real_evolve = runner.evolve

        def _evolve(state, params, *args, **kwargs):
            if params.j_z == 1.0:
                raise CanonicalizationError("Cannot canonicalize a state of zero norm")
            return real_evolve(state, params, *args, **kwargs)

        monkeypatch.setattr(runner, "evolve", _evolve)
        base = _small_config(tmp_path, output_dir=tmp_path / "sweep", t_max=0.1)
        entries = sweep(base, [0.0, 1.0])
        assert [e.status for e in entries] == [RunStatus.SUCCESS, RunStatus.FAILED]
        index = _data_rows(tmp_path / "sweep" / INDEX_FILE)
        assert [row[2] for row in index[1:]] == ["success", "failed"]

    def test_parallel_matches_sequential(self, tmp_path):
        base = _small_config(tmp_path, t_max=0.2)
        sweep(base, [0.5, 1.5], output_dir=tmp_path / "seq")
        sweep(base, [0.5, 1.5], max_workers=2, output_dir=tmp_path / "par")
        for name in ("jz_0.5", "jz_1.5"):
            # the echoed output_dir differs, the data rows must not
            assert _data_rows(tmp_path / "seq" / name / CONCURRENCE_FILE) == _data_rows(
                tmp_path / "par" / name / CONCURRENCE_FILE
            )

    def test_empty_sweep_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            sweep(_small_config(tmp_path), [])
