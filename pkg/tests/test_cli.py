"""End-to-end tests of the command-line interface and its exit codes."""

import json
import struct

import pytest

from ttmera.cli import main
from ttmera.formats import load_tensor


def run(argv):
    return main([str(a) for a in argv])


class TestHeat2d:
    def test_writes_tensor(self, tmp_path, capsys):
        code = run(["heat2d", "--ds", "0.2", "--t-end", "0.1",
                    "--out", tmp_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "heat.mrt1" in out
        t = load_tensor(tmp_path / "heat.mrt1")
        assert t.dims[0] == 5

    def test_capacity_guard_exit_code(self, tmp_path, capsys):
        code = run(["heat2d", "--ds", "1e-3", "--out", tmp_path])
        assert code == 3
        assert "capacity" in capsys.readouterr().err

    def test_unstable_time_step_exit_code(self, tmp_path, capsys):
        code = run(["heat2d", "--ds", "0.1", "--dt", "0.01",
                    "--out", tmp_path])
        assert code == 2
        assert "stability" in capsys.readouterr().err


class TestCompress:
    @pytest.fixture()
    def tensor_file(self, tmp_path):
        assert run(["heat2d", "--ds", "0.2", "--t-end", "0.1",
                    "--out", tmp_path]) == 0
        return tmp_path / "heat.mrt1"

    def test_all_methods(self, tensor_file, tmp_path, capsys):
        out_dir = tmp_path / "reports"
        code = run(["compress", tensor_file, "--eps", "1e-2",
                    "--out", out_dir])
        assert code == 0
        text = capsys.readouterr().out
        for method in ("sthosvd", "tt", "tt-tucker"):
            assert method in text
        payload = json.loads((out_dir / "compress.json").read_text())
        assert [r["method"] for r in payload["reports"]] == [
            "sthosvd", "tt", "tt-tucker"]

    def test_repeatable_method_flag(self, tensor_file, capsys):
        code = run(["compress", tensor_file, "--method", "tt",
                    "--method", "sthosvd"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("tt ")

    def test_factorize(self, tensor_file, capsys):
        code = run(["compress", tensor_file, "--factorize",
                    "--method", "tt"])
        assert code == 0

    def test_bad_epsilon_exit_code(self, tensor_file, capsys):
        code = run(["compress", tensor_file, "--eps", "-1"])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_missing_input_exit_code(self, tmp_path, capsys):
        code = run(["compress", tmp_path / "absent.mrt1"])
        assert code == 2

    def test_malformed_input_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.mrt1"
        bad.write_bytes(b"XXXX" + b"\x00" * 8)
        code = run(["compress", bad])
        assert code == 2

    def test_nonfinite_input_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "nan.mrt1"
        payload = struct.pack("<2d", 1.0, float("nan"))
        bad.write_bytes(
            b"MRT1" + struct.pack("<H", 1) + struct.pack("<Q", 2) + payload
        )
        code = run(["compress", bad])
        assert code == 4
        assert "numeric" in capsys.readouterr().err


class TestPlanted:
    def test_artifacts_and_summary(self, tmp_path, capsys):
        code = run(["planted", "--I", "4", "--rprime", "2", "--seed", "4",
                    "--out", tmp_path])
        assert code == 0
        assert "converged=True" in capsys.readouterr().out
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["achieved_rank"] == 2

    def test_invalid_rank_exit_code(self, capsys):
        code = run(["planted", "--I", "3", "--rprime", "64"])
        assert code == 2


class TestScans:
    def test_rmin_scan(self, tmp_path, capsys):
        code = run(["rmin-scan", "--I-values", "2", "--seeds", "1",
                    "--out", tmp_path])
        assert code == 0
        assert "rmin=2" in capsys.readouterr().out
        assert (tmp_path / "rmin.csv").exists()

    def test_iters_vs_rank(self, tmp_path, capsys):
        code = run(["iters-vs-rank", "--I", "2", "--rprimes", "2-3",
                    "--out", tmp_path])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert (tmp_path / "iterations.csv").exists()

    def test_bad_range_exit_code(self, capsys):
        code = run(["iters-vs-rank", "--I", "2", "--rprimes", "9"])
        assert code == 2


class TestMera12:
    def test_hosvd_only_smoke(self, tmp_path, capsys):
        code = run(["mera12", "--order", "4", "--layers", "1",
                    "--seed", "4", "--strategy", "hosvd",
                    "--out", tmp_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "mera[plant]" in out
        assert "mera[hosvd]" in out
        payload = json.loads((tmp_path / "mera12.json").read_text())
        assert payload["order"] == 4

    def test_bad_layers_exit_code(self, capsys):
        code = run(["mera12", "--layers", "0"])
        assert code == 2


class TestParser:
    def test_missing_command_is_usage_error(self):
        with pytest.raises(SystemExit):
            main([])

    def test_unknown_method_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["compress", "x", "--method", "qr"])

    def test_seed_range_enforced(self):
        with pytest.raises(SystemExit):
            main(["rmin-scan", "--seed", "-1"])
