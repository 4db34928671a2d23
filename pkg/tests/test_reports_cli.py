"""Tests for report emission (CSV/JSON/SVG) and the command-line interface."""

import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from rdspectral import (
    SolverConfig,
    SweepConfig,
    binary_hamming,
    bottleneck_four_symbol,
    detect_transitions,
    emit_reports,
    planar_four_point,
    sweep,
)
from rdspectral.reports import CSV_HEADER, write_sweep_csv


@pytest.fixture(scope="module")
def rd_sweep_results():
    problem = planar_four_point()
    config = SweepConfig(
        beta_grid=np.geomspace(25.0, 10.0, 12),
        init="reverse",
        solver=SolverConfig(epsilon=1e-10),
        support_tol=1e-6,
    )
    records = sweep(problem, config)
    return records, detect_transitions(records)


@pytest.fixture(scope="module")
def ib_sweep_results():
    problem = bottleneck_four_symbol()
    config = SweepConfig(
        beta_grid=np.geomspace(40.0, 10.0, 15),
        init="reverse",
        solver=SolverConfig(epsilon=1e-7),
        merge_tol=1e-4,
        support_tol=1e-5,
    )
    records = sweep(problem, config)
    return records, detect_transitions(records)


class TestCsv:
    def test_header_is_pinned(self):
        assert CSV_HEADER == (
            "beta,iterations,converged,support_size,effective_cardinality,"
            "lambda0,lambda_max,predicted_rate,measured_rate,rate,"
            "distortion_or_info"
        )

    def test_single_record(self, rd_sweep_results, tmp_path):
        records, _ = rd_sweep_results
        path = write_sweep_csv(records[:1], tmp_path / "one.csv")
        lines = path.read_text().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2
        cells = lines[1].split(",")
        assert len(cells) == 11
        assert cells[2] == "true"
        assert cells[4] == ""  # no effective cardinality on the RD side

    def test_deterministic_bytes(self, tmp_path):
        problem = planar_four_point()
        config = SweepConfig(
            beta_grid=np.geomspace(20.0, 15.0, 4),
            init="dirichlet",
            seed=3,
            solver=SolverConfig(epsilon=1e-10),
        )
        a = write_sweep_csv(sweep(problem, config), tmp_path / "a.csv")
        b = write_sweep_csv(sweep(problem, config), tmp_path / "b.csv")
        assert a.read_bytes() == b.read_bytes()


class TestEmitReports:
    def test_empty_formats_writes_nothing(self, rd_sweep_results, tmp_path):
        records, transitions = rd_sweep_results
        manifest = emit_reports(records, transitions, tmp_path / "out", formats=())
        assert manifest == []
        assert not (tmp_path / "out").exists()

    def test_rd_panel_set(self, rd_sweep_results, tmp_path):
        records, transitions = rd_sweep_results
        manifest = emit_reports(records, transitions, tmp_path / "out")
        names = sorted(p.name for p in manifest)
        assert names == [
            "eigenvalues_vs_beta.svg",
            "iterations_vs_beta.svg",
            "marginal_vs_beta.svg",
            "rate_prediction.svg",
            "sweep.csv",
            "sweep.json",
            "transitions.json",
        ]
        for path in manifest:
            if path.suffix == ".svg":
                root = ET.fromstring(path.read_text())
                assert root.tag.endswith("svg")
                assert len(list(root.iter())) > 10

    def test_ib_panel_set(self, ib_sweep_results, tmp_path):
        records, transitions = ib_sweep_results
        manifest = emit_reports(records, transitions, tmp_path / "out")
        names = sorted(p.name for p in manifest)
        assert "decoder_vs_beta.svg" in names
        assert "eigenvalues_vs_beta.svg" not in names

    def test_sweep_json_carries_all_records(self, rd_sweep_results, tmp_path):
        records, transitions = rd_sweep_results
        manifest = emit_reports(records, transitions, tmp_path / "out",
                                formats=("json",))
        payload = json.loads((tmp_path / "out" / "sweep.json").read_text())
        assert len(payload) == len(records)
        assert payload[0]["beta"] == records[0].beta
        tr = json.loads((tmp_path / "out" / "transitions.json").read_text())
        assert tr["kind"] == "support"

    def test_unknown_format_rejected(self, rd_sweep_results, tmp_path):
        records, transitions = rd_sweep_results
        with pytest.raises(ValueError, match="unknown"):
            emit_reports(records, transitions, tmp_path, formats=("pdf",))

    def test_unwritable_directory_reports_path(self, rd_sweep_results, tmp_path):
        records, transitions = rd_sweep_results
        blocker = tmp_path / "blocked"
        blocker.write_text("a file where a directory should go")
        with pytest.raises(OSError, match="blocked"):
            emit_reports(records, transitions, blocker / "out")

    def test_log_iteration_panel_has_polyline(self, rd_sweep_results, tmp_path):
        records, transitions = rd_sweep_results
        emit_reports(records, transitions, tmp_path / "out", formats=("svg",))
        text = (tmp_path / "out" / "iterations_vs_beta.svg").read_text()
        assert "<polyline" in text


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "rdspectral.cli", *args],
        capture_output=True,
        text=True,
    )


class TestCli:
    def test_builtin_list(self):
        out = run_cli("builtin")
        assert out.returncode == 0
        assert "fig2" in out.stdout
        assert "binary_hamming" in out.stdout

    def test_builtin_emit_matches_construction(self):
        out = run_cli("builtin", "--name", "fig2")
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        pxy = np.asarray(payload["pxy"])
        np.testing.assert_allclose(pxy.sum(axis=1), [0.7, 0.1, 0.1, 0.1],
                                   atol=1e-12)

    def test_unknown_builtin_is_usage_error(self):
        out = run_cli("builtin", "--name", "nope")
        assert out.returncode == 1

    def test_solve_success(self):
        out = run_cli("solve", "--builtin", "binary_hamming", "--beta", "1.0986")
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        np.testing.assert_allclose(payload["distortion"], 0.25, atol=1e-4)

    def test_solve_nonconvergence_exit_code(self):
        out = run_cli(
            "solve", "--builtin", "binary_hamming_skewed", "--beta", "2.5",
            "--max-iters", "3",
        )
        assert out.returncode == 3

    def test_solve_missing_problem_is_usage_error(self):
        out = run_cli("solve", "--beta", "1.0")
        assert out.returncode == 1

    def test_solve_conflicting_sources_is_usage_error(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(binary_hamming().to_json())
        out = run_cli("solve", "--problem", str(path), "--builtin",
                      "binary_hamming", "--beta", "1.0")
        assert out.returncode == 1

    def test_solve_from_problem_file(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(binary_hamming(0.7).to_json())
        out = run_cli("solve", "--problem", str(path), "--beta", "2.0",
                      "--epsilon", "1e-11")
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        np.testing.assert_allclose(
            payload["distortion"], np.exp(-2) / (1 + np.exp(-2)), atol=1e-6
        )

    def test_solve_dispatches_bottleneck(self):
        out = run_cli("solve", "--builtin", "fig2", "--beta", "3.0")
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        assert "relevant_info" in payload

    def test_spectrum_output(self):
        out = run_cli("spectrum", "--builtin", "binary_hamming", "--beta", "2.0")
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        assert set(payload) == {
            "beta", "eigenvalues", "kernel_dim", "lambda0", "lambda_max",
            "predicted_rate",
        }
        assert payload["kernel_dim"] == 0

    def test_spectrum_rejects_bottleneck(self):
        out = run_cli("spectrum", "--builtin", "fig2", "--beta", "2.0")
        assert out.returncode == 1

    def test_sweep_end_to_end(self, tmp_path):
        out = run_cli(
            "sweep", "--builtin", "fig1_like", "--beta-min", "10",
            "--beta-max", "25", "--beta-steps", "8", "--init", "reverse",
            "--epsilon", "1e-9", "--out", str(tmp_path / "run"),
            "--formats", "csv,json",
        )
        assert out.returncode == 0, out.stderr
        csv_text = (tmp_path / "run" / "sweep.csv").read_text()
        assert csv_text.startswith(CSV_HEADER)
        assert len(csv_text.strip().split("\n")) == 9

    def test_sweep_rejects_bottleneck_problem(self):
        out = run_cli("sweep", "--builtin", "fig2", "--beta-min", "1",
                      "--beta-max", "2", "--beta-steps", "3")
        assert out.returncode == 1

    def test_sweep_linear_grid_forward(self, tmp_path):
        out = run_cli(
            "sweep", "--builtin", "binary_hamming", "--beta-min", "0.5",
            "--beta-max", "3", "--beta-steps", "6", "--linear-grid",
            "--init", "forward", "--out", str(tmp_path / "lin"),
            "--formats", "csv",
        )
        assert out.returncode == 0, out.stderr
        lines = (tmp_path / "lin" / "sweep.csv").read_text().strip().split("\n")
        betas = [float(l.split(",")[0]) for l in lines[1:]]
        np.testing.assert_allclose(betas, np.linspace(0.5, 3, 6), atol=1e-12)

    def test_ib_sweep_end_to_end(self, tmp_path):
        out = run_cli(
            "ib-sweep", "--builtin", "fig2", "--beta-min", "10",
            "--beta-max", "40", "--beta-steps", "10", "--init", "reverse",
            "--epsilon", "1e-7", "--support-tol", "1e-5",
            "--merge-tol", "1e-4", "--out", str(tmp_path / "ib"),
            "--formats", "csv,svg",
        )
        assert out.returncode == 0, out.stderr
        assert (tmp_path / "ib" / "decoder_vs_beta.svg").exists()

    def test_rate_study_json(self):
        out = run_cli(
            "rate-study", "--builtin", "binary_hamming_skewed", "--beta", "2.5",
            "--anchor-beta", "8.0", "--epsilons", "1e-6,1e-10",
        )
        assert out.returncode == 0, out.stderr
        payload = json.loads(out.stdout)
        assert len(payload) == 2
        assert payload[0]["epsilon"] == 1e-6

    def test_rate_study_beta_zero_usage_error(self):
        out = run_cli("rate-study", "--builtin", "binary_hamming", "--beta", "0.0")
        assert out.returncode == 1

    def test_tangent_end_to_end(self, tmp_path):
        out = run_cli(
            "tangent", "--builtin", "fig2", "--beta-min", "20",
            "--beta-max", "30", "--beta-steps", "30", "--init", "reverse",
            "--epsilon", "1e-7", "--support-tol", "1e-5", "--merge-tol", "1e-4",
            "--dedup-tol", "5e-3", "--tangent-steps", "10",
            "--out", str(tmp_path / "tan"), "--formats", "csv",
        )
        assert out.returncode == 0, out.stderr
        assert (tmp_path / "tan" / "ib" / "sweep.csv").exists()
        assert (tmp_path / "tan" / "tangent" / "sweep.csv").exists()
        assert "tangent problem over" in out.stdout
