"""Tests for the command-line interface: flags, formats, exit codes."""

import json
import math

import pytest

from discordqkd import CSV_HEADER
from discordqkd.cli import main

import highprec as hp

DISCORD_NATS_V2 = 0.1166606369244032949  # frozen: natural-log discord at V = 1


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEval:
    def test_transparent_channel(self, capsys):
        code, out, err = run_cli(
            capsys, "eval", "--state", "discord", "--vd", "40", "--t", "1.0",
            "--w", "1.0", "--det", "hom", "--rec", "dr",
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == CSV_HEADER
        fields = lines[1].split(",")
        assert float(fields[10]) == 0.0  # attacker learns nothing
        assert float(fields[11]) == float(fields[9])

    def test_vacuum_source(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--state", "epr", "--ve", "1", "--t", "0.5",
            "--w", "1", "--det", "hom", "--rec", "rr",
        )
        assert code == 0
        fields = out.strip().split("\n")[1].split(",")
        assert float(fields[9]) == 0.0
        assert float(fields[11]) <= 0.0

    def test_golden_row_json(self, capsys):
        code, out, _ = run_cli(
            capsys, "eval", "--vd", "40", "--t", "0.9", "--w", "1",
            "--det", "het", "--rec", "rr", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload[0]["key_rate"] == pytest.approx(1.0967347447443038, rel=1e-12)

    def test_invalid_parameter_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys, "eval", "--state", "discord", "--vd", "40", "--t", "1.5",
            "--w", "1", "--det", "hom", "--rec", "dr",
        )
        assert code == 2
        assert "error" in err

    def test_state_flag_cross_check(self, capsys):
        code, _, err = run_cli(
            capsys, "eval", "--state", "epr", "--vd", "40", "--t", "0.5",
            "--w", "1", "--det", "hom", "--rec", "dr",
        )
        assert code == 2
        assert "--vd" in err

    def test_missing_required_flag(self, capsys):
        code, _, err = run_cli(
            capsys, "eval", "--state", "discord", "--vd", "40", "--t", "0.5",
            "--w", "1", "--det", "hom",
        )
        assert code == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "eval", "--frobnicate", "1")
        assert code == 2

    def test_nonphysical_state_exit_code(self, capsys, monkeypatch):
        import discordqkd.cli as cli_mod
        from discordqkd import NonPhysicalState
        from discordqkd.sweeps import ResultRow

        def broken(*args, **kwargs):
            return ResultRow(
                state="discord", v=39.0, variance=40.0, t=0.5, w=1.0,
                detection="hom", reconciliation="dr",
                discord=None, ppt_nu=None, i_ab=None, i_eve=None, key_rate=None,
                error="synthetic failure",
            )

        monkeypatch.setattr(cli_mod, "evaluate_point", broken)
        code, _, err = run_cli(
            capsys, "eval", "--state", "discord", "--vd", "40", "--t", "0.5",
            "--w", "1", "--det", "hom", "--rec", "dr",
        )
        assert code == 3
        assert "non-physical" in err


class TestSweep:
    def test_csv_to_file(self, capsys, tmp_path):
        out_file = tmp_path / "sweep.csv"
        code, _, _ = run_cli(
            capsys, "sweep", "--sweep", "t", "--range", "0:1", "--steps", "11",
            "--state", "discord", "--vd", "40", "--w", "1",
            "--det", "hom", "--rec", "rr", "--out", str(out_file),
        )
        assert code == 0
        lines = out_file.read_text().strip().split("\n")
        assert lines[0] == CSV_HEADER
        assert len(lines) == 12
        t_column = [float(line.split(",")[3]) for line in lines[1:]]
        assert t_column == pytest.approx([0.1 * i for i in range(11)])

    def test_repeat_runs_byte_identical(self, capsys, tmp_path):
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = [
            "sweep", "--sweep", "vd", "--range", "1:1000", "--steps", "21",
            "--t", "0.9", "--w", "1", "--det", "het", "--rec", "rr",
        ]
        assert main(argv + ["--out", str(f1)]) == 0
        assert main(argv + ["--out", str(f2)]) == 0
        capsys.readouterr()
        assert f1.read_bytes() == f2.read_bytes()

    def test_monotone_discord_column(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--sweep", "vd", "--range", "1:1000", "--steps", "9",
            "--t", "0.9", "--w", "1", "--det", "hom", "--rec", "dr",
        )
        assert code == 0
        discords = [float(line.split(",")[7]) for line in out.strip().split("\n")[1:]]
        assert all(b >= a - 1e-12 for a, b in zip(discords, discords[1:]))

    def test_all_protocols_when_unspecified(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--sweep", "t", "--range", "0.2:0.8", "--steps", "3",
            "--state", "discord", "--vd", "40", "--w", "1",
        )
        assert code == 0
        assert len(out.strip().split("\n")) == 1 + 3 * 4

    def test_swept_parameter_must_not_be_fixed(self, capsys):
        code, _, err = run_cli(
            capsys, "sweep", "--sweep", "t", "--range", "0:1", "--steps", "3",
            "--state", "discord", "--vd", "40", "--w", "1", "--t", "0.5",
        )
        assert code == 2

    def test_clamp_negative_flag(self, capsys):
        code, out, _ = run_cli(
            capsys, "sweep", "--sweep", "t", "--range", "0.1:0.4", "--steps", "4",
            "--state", "discord", "--vd", "40", "--w", "1",
            "--det", "het", "--rec", "rr", "--clamp-negative",
        )
        assert code == 0
        rates = [float(line.split(",")[11]) for line in out.strip().split("\n")[1:]]
        assert all(r == 0.0 for r in rates)


class TestFigure:
    def test_fig2(self, capsys, tmp_path):
        out_file = tmp_path / "fig2.csv"
        code, _, _ = run_cli(
            capsys, "figure", "fig2", "--steps", "11", "--out", str(out_file)
        )
        assert code == 0
        lines = out_file.read_text().strip().split("\n")
        assert lines[0] == "vd,discord,ppt_nu"
        assert len(lines) == 12
        assert all(abs(float(line.split(",")[2]) - 1.0) <= 1e-9 for line in lines[1:])

    def test_fig3b_header(self, capsys):
        code, out, _ = run_cli(capsys, "figure", "fig3b", "--steps", "5")
        assert code == 0
        assert out.split("\n")[0] == "t,discord_vd40,discord_vd1000,epr_ve40"

    def test_fig5b_header(self, capsys):
        code, out, _ = run_cli(capsys, "figure", "fig5b", "--steps", "3")
        assert code == 0
        assert out.split("\n")[0] == "vd,discord,kr_t0.75,kr_t0.8,kr_t0.9,kr_t0.3"

    def test_unknown_figure_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "figure", "fig7")
        assert code == 2
        assert "unknown figure" in err

    def test_w_override_validated(self, capsys):
        code, _, _ = run_cli(capsys, "figure", "fig2", "--w", "0.5")
        assert code == 2


class TestThreshold:
    def test_heterodyne_reverse_transmission(self, capsys):
        code, out, _ = run_cli(
            capsys, "threshold", "--state", "discord", "--vd", "40", "--w", "1",
            "--det", "het", "--rec", "rr", "--sweep", "t",
        )
        assert code == 0
        assert float(out.strip()) == pytest.approx(0.538, abs=2e-3)

    def test_discord_threshold(self, capsys):
        code, out, _ = run_cli(
            capsys, "threshold", "--t", "0.75", "--w", "1",
            "--det", "het", "--rec", "dr", "--sweep", "discord",
        )
        assert code == 0
        assert float(out.strip()) == pytest.approx(0.213, abs=2e-3)

    def test_no_sign_change_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys, "threshold", "--state", "discord", "--vd", "40", "--w", "1",
            "--det", "hom", "--rec", "rr", "--sweep", "t", "--range", "0.6:0.9",
        )
        assert code == 5
        assert "key_rate(0.6)" in err
        assert "key_rate(0.9)" in err


class TestStateQueries:
    def test_discord_bits(self, capsys):
        code, out, _ = run_cli(capsys, "discord", "--vd", "2")
        assert code == 0
        assert float(out.strip()) == pytest.approx(0.1683057223577845, rel=1e-10)

    def test_discord_nats(self, capsys):
        code, out, _ = run_cli(capsys, "discord", "--vd", "2", "--units", "nats")
        assert code == 0
        assert float(out.strip()) == pytest.approx(DISCORD_NATS_V2, rel=1e-10)

    def test_ppt_of_epr(self, capsys):
        code, out, _ = run_cli(capsys, "ppt", "--ve", "40")
        assert code == 0
        assert float(out.strip()) == pytest.approx(40.0 - math.sqrt(1599.0), rel=1e-9)

    def test_ppt_of_discord_state(self, capsys):
        code, out, _ = run_cli(capsys, "ppt", "--vd", "500")
        assert code == 0
        assert float(out.strip()) == pytest.approx(1.0, abs=1e-9)


class TestConfigFile:
    def test_defaults_from_file(self, capsys, tmp_path):
        cfg = tmp_path / "proto.cfg"
        cfg.write_text("# fixture protocol\nvd=40\nt=0.9\nw=1\ndet=het\nrec=rr\n")
        code, out, _ = run_cli(capsys, "eval", "--config", str(cfg))
        assert code == 0
        fields = out.strip().split("\n")[1].split(",")
        assert float(fields[11]) == pytest.approx(1.0967347447443038, rel=1e-12)

    def test_flags_take_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "proto.cfg"
        cfg.write_text("vd=40\nt=0.9\nw=1\ndet=het\nrec=rr\n")
        code, out, _ = run_cli(capsys, "eval", "--config", str(cfg), "--t", "1.0")
        assert code == 0
        fields = out.strip().split("\n")[1].split(",")
        assert float(fields[3]) == 1.0
        assert float(fields[10]) == 0.0

    def test_bad_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "proto.cfg"
        cfg.write_text("bogus=1\n")
        code, _, err = run_cli(capsys, "eval", "--config", str(cfg))
        assert code == 2
        assert "bogus" in err

    def test_missing_file_is_io_error(self, capsys, tmp_path):
        code, _, err = run_cli(capsys, "eval", "--config", str(tmp_path / "nope.cfg"))
        assert code == 4
