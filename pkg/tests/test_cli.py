import json

import pytest

from gnlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExponentsCommand:
    def test_basic_query(self, capsys):
        code, out, _ = run(
            capsys, "exponents", "--n", "2", "--j", "1", "--k", "2",
            "--theta", "1/2", "--q", "2", "--r", "2",
        )
        assert code == 0
        assert "p = 2" in out
        assert "scaling deficit = 0" in out
        assert "admissible: OK" in out

    def test_special_solver_flag(self, capsys):
        code, out, _ = run(
            capsys, "exponents", "--n", "1", "--j", "1", "--k", "2",
            "--theta", "1/2", "--q", "6", "--r", "2", "--special",
        )
        assert code == 0
        assert "special-case p (theta = j/k) = 3" in out

    def test_json_report_rational_encoding(self, capsys, tmp_path):
        out_path = tmp_path / "exp.json"
        code, _, _ = run(
            capsys, "exponents", "--n", "2", "--j", "1", "--k", "2",
            "--theta", "1/2", "--q", "4", "--r", "2", "--output", str(out_path),
        )
        assert code == 0
        data = json.loads(out_path.read_text())
        assert data["p"] == {"num": 8, "den": 3}
        assert data["params"]["theta"] == {"num": 1, "den": 2}
        assert (tmp_path / "exp.json.meta.json").exists()

    def test_infinity_on_the_wire(self, capsys, tmp_path):
        out_path = tmp_path / "inf.json"
        code, _, _ = run(
            capsys, "exponents", "--n", "1", "--j", "0", "--k", "1",
            "--theta", "1", "--q", "2", "--r", "1", "--output", str(out_path),
        )
        assert code == 0
        assert json.loads(out_path.read_text())["p"] == "inf"

    def test_missing_flags_is_config_error(self, capsys):
        code, _, err = run(capsys, "exponents", "--n", "2")
        assert code == 2
        assert "missing required options" in err


class TestCoverCommand:
    def test_cover_json_contract(self, capsys, tmp_path):
        out_path = tmp_path / "cover.json"
        code, out, _ = run(
            capsys, "cover", "--family", "bump", "--p", "2", "--q", "2", "--r", "2",
            "--grid-points", "1025", "--output", str(out_path), "--no-ascii",
        )
        assert code == 0
        data = json.loads(out_path.read_text())
        assert data["cover"]["multiplicity"]["max"] <= 4
        assert data["pass"] is True
        first = data["cover"]["intervals"][0]
        assert {"center", "radius", "omega", "alpha", "residual"} <= set(first)

    def test_ascii_chart_printed(self, capsys):
        code, out, _ = run(
            capsys, "cover", "--family", "sine_bump", "--width", "1.2",
            "--grid-points", "1025", "--ascii",
        )
        assert code == 0
        assert "overlap count" in out

    def test_deterministic_reports(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            code, _, _ = run(
                capsys, "cover", "--family", "bump", "--grid-points", "1025",
                "--output", str(path), "--no-ascii",
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()


class TestSharpnessCommand:
    def test_perturbed_slope(self, capsys, tmp_path):
        out_path = tmp_path / "sharp.json"
        code, out, _ = run(
            capsys, "sharpness", "--n", "2", "--j", "1", "--k", "2",
            "--theta", "1/2", "--q", "2", "--r", "2", "--p", "11/5",
            "--grid-points", "129", "--output", str(out_path),
        )
        assert code == 0
        data = json.loads(out_path.read_text())
        slope = data["report"]["slope_data"]["slope"]
        assert abs(slope - 1 / 11) < 0.05 / 11

    def test_admissible_slope_zero(self, capsys):
        code, out, _ = run(
            capsys, "sharpness", "--n", "1", "--j", "1", "--k", "2",
            "--theta", "1/2", "--q", "2", "--r", "2", "--grid-points", "1025",
        )
        assert code == 0
        assert "slope matches deficit: True" in out


class TestVerifyCommand:
    def test_fast_suites_pass(self, capsys, tmp_path):
        out_path = tmp_path / "verify.json"
        code, out, _ = run(
            capsys, "verify", "--suite", "modular", "--suite", "chain",
            "--output", str(out_path),
        )
        assert code == 0
        assert "[PASS] modular-form" in out
        data = json.loads(out_path.read_text())
        assert data["pass"] is True

    def test_unconverged_grid_fails_with_flag(self, capsys, tmp_path):
        out_path = tmp_path / "coarse.json"
        code, out, _ = run(
            capsys, "verify", "--suite", "line", "--grid-points", "17",
            "--output", str(out_path),
        )
        assert code == 1
        data = json.loads(out_path.read_text())
        flags = data["reports"][0]["details"].get("flags", [])
        assert any("GRID_UNCONVERGED" in f for f in flags)

    def test_csv_output(self, capsys, tmp_path):
        out_path = tmp_path / "verify.csv"
        code, _, _ = run(
            capsys, "verify", "--suite", "scaling", "--output", str(out_path),
            "--format", "csv",
        )
        assert code == 0
        lines = out_path.read_text().splitlines()
        assert lines[0] == "case_id,metric,value"
        assert len(lines) > 1


class TestConstantCommand:
    def test_small_sweep(self, capsys, tmp_path):
        out_path = tmp_path / "const.json"
        code, out, _ = run(
            capsys, "constant", "--n", "1", "--j", "1", "--k", "2",
            "--theta", "1/2", "--q", "2", "--r", "2",
            "--widths", "0.8", "1.2", "--grid-points", "1025",
            "--no-refine-search", "--output", str(out_path),
        )
        assert code == 0
        data = json.loads(out_path.read_text())
        assert data["report"]["estimated_constant"] > 0
        assert "estimated constant" in out


class TestConfigFile:
    def test_config_mirrors_flags(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "n": 2, "j": 1, "k": 2, "theta": "1/2", "q": "2", "r": "2",
        }))
        code, out, _ = run(capsys, "exponents", "--config", str(cfg))
        assert code == 0
        assert "p = 2" in out

    def test_explicit_flag_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "n": 2, "j": 1, "k": 2, "theta": "1/2", "q": "2", "r": "2",
        }))
        code, out, _ = run(
            capsys, "exponents", "--config", str(cfg), "--q", "4",
        )
        assert code == 0
        assert "p = 8/3" in out

    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        code, _, err = run(capsys, "exponents", "--config", str(cfg))
        assert code == 2

    def test_unreadable_config(self, capsys, tmp_path):
        code, _, err = run(capsys, "exponents", "--config", str(tmp_path / "none.json"))
        assert code == 2

    def test_grid_budget_enforced(self, capsys):
        code, _, err = run(
            capsys, "cover", "--family", "bump", "--grid-points", str(2**29),
        )
        assert code == 2
