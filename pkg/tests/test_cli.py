import csv
import json
import math
import subprocess
import sys

import pytest

from carburettor.cli import FIGURES, FigureRequest, UsageError, main, resolve_params


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def run_json(capsys, *argv):
    assert main(["run", *argv]) == 0
    return json.loads(capsys.readouterr().out)


class TestFigures:
    def test_eta_curves_fixed_reflectivity(self, tmp_path):
        out = tmp_path / "eta.csv"
        assert main(["figure", "eta_curves", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "r_sq", "eta", "p_success"]
        assert {r[1] for r in rows} == {"0.869"}
        assert {r[2] for r in rows} == {"1", "0.8", "0.6", "0.4"}
        assert float(rows[-1][0]) == 4.0

    def test_prob_tends_to_inverse_e(self, tmp_path):
        out = tmp_path / "prob.csv"
        assert main(["figure", "prob", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "r_opt_sq", "p_success"]
        assert len(rows) == 101
        assert float(rows[-1][0]) == 10.0
        assert abs(float(rows[-1][2]) - 0.367879) < 0.01

    def test_pnfail_hole(self, tmp_path):
        out = tmp_path / "pnfail.csv"
        assert main(["figure", "pnfail", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["n", "probability"]
        p = [float(r[1]) for r in rows]
        interior = min(range(1, len(p) - 1), key=lambda n: p[n] if p[n - 1] > p[n] < p[n + 1] else math.inf)
        assert interior == 4

    def test_fid_short_range(self, tmp_path):
        out = tmp_path / "fid.csv"
        assert main(["figure", "fid", "--alpha-max", "1", "--alpha-step", "0.5", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header[:3] == ["alpha", "fid_bare_impl", "fid_std_raise"]
        last = rows[-1]
        assert float(last[0]) == 1.0
        assert float(last[1]) > float(last[2]) >= 0.94

    def test_pncompare(self, tmp_path):
        out = tmp_path / "pn.csv"
        assert main(["figure", "pncompare", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["n", "coherent", "std_raise", "bare_raise"]
        assert len(rows) == 9
        assert float(rows[0][2]) == 0.0 and float(rows[0][3]) == 0.0

    def test_cascade_scatter_small_grid(self, tmp_path):
        out = tmp_path / "cas.csv"
        assert main(["figure", "cascade_scatter", "--alpha", "2", "--grid", "3", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "r1_sq", "r2_sq", "p_total", "f_mean"]
        assert len(rows) == 9

    def test_characbs_peak(self, tmp_path):
        out = tmp_path / "ch.csv"
        assert main(["figure", "characbs", "--r-sq", "0.99", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        peak = max(rows, key=lambda r: float(r[2]))
        assert abs(float(peak[1]) - 9.95) < 0.02

    def test_basefid_columns(self, tmp_path):
        out = tmp_path / "bf.csv"
        assert main(["figure", "basefid", "--eta", "0.4", "--alpha-step", "0.5", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "r_sq", "eta", "fid_do_nothing", "fid_scheme"]
        assert len(rows) == 5

    def test_json_format(self, tmp_path):
        out = tmp_path / "pn.json"
        assert main(["figure", "pncompare", "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["figure"] == "pncompare"
        assert doc["columns"] == ["n", "coherent", "std_raise", "bare_raise"]
        assert doc["rows"][1][1] == pytest.approx(math.exp(-1), abs=1e-15)

    def test_twelve_significant_digits(self, tmp_path):
        out = tmp_path / "pn.csv"
        main(["figure", "pncompare", "--out", str(out)])
        _, rows = read_csv(out)
        assert rows[1][1] == format(math.exp(-1), ".12g")

    def test_byte_identical_rerun(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            main(["figure", "eta_curves", "--alpha-max", "1", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()

    def test_set_override(self, tmp_path):
        out = tmp_path / "pn.csv"
        assert main(["figure", "pncompare", "--set", "n_max=3", "--out", str(out)]) == 0
        assert len(read_csv(out)[1]) == 4


class TestFigureErrors:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        out = tmp_path / "x.csv"
        assert main(["figure", "prob", "--r-sq", "0.5", "--out", str(out)]) != 0
        err = capsys.readouterr().err
        assert err.count("\n") == 1 and "r_sq" in err
        assert not out.exists()

    def test_unknown_key_before_compute(self):
        with pytest.raises(UsageError):
            resolve_params(FigureRequest("fid", "x.csv", {"bogus": "1"}))

    def test_unknown_figure(self, tmp_path):
        assert main(["figure", "fig99", "--out", str(tmp_path / "x.csv")]) != 0

    @pytest.mark.parametrize("args", [["--eta", "1.5"], ["--alpha-step", "0"], ["--eta", "abc"]])
    def test_bad_values(self, tmp_path, args):
        assert main(["figure", "eta_curves", *args, "--out", str(tmp_path / "x.csv")]) != 0

    def test_missing_directory(self, tmp_path):
        out = tmp_path / "missing" / "x.csv"
        assert main(["figure", "pncompare", "--out", str(out)]) != 0
        assert not out.exists()

    def test_failed_write_leaves_nothing(self, tmp_path):
        target = tmp_path / "dir.csv"
        target.mkdir()
        assert main(["figure", "pncompare", "--out", str(target)]) != 0
        assert sorted(p.name for p in tmp_path.iterdir()) == ["dir.csv"]

    def test_defaults_cover_every_figure(self):
        assert set(FIGURES) == {
            "pncompare", "prob", "fid", "eta_curves", "basefid", "cascade_scatter", "characbs", "pnfail",
        }


class TestRun:
    def test_half_mirror(self, capsys):
        rec = run_json(capsys, "--alpha", "1", "--r-sq", "0.5")
        assert rec["p_success"] == pytest.approx(0.454898, abs=1e-6)

    def test_vacuum(self, capsys):
        rec = run_json(capsys, "--alpha", "0", "--r-sq", "0.5")
        assert rec["p_success"] == pytest.approx(0.5, abs=1e-15)
        assert rec["photon_distribution"] == pytest.approx([0.0, 1.0], abs=1e-15)

    def test_optimized(self, capsys):
        rec = run_json(capsys, "--alpha", "2", "--r-sq", "opt")
        assert rec["r_sq"] == pytest.approx(0.798145, abs=1e-6)

    def test_two_stages(self, capsys):
        rec = run_json(capsys, "--alpha", "2", "--r-sq", "0.8", "--stages", "2", "--r2-sq", "0.5")
        assert rec["p_total"] == pytest.approx(rec["p1_0"] + rec["p1_1"] * rec["p2_0"], abs=1e-15)
        assert sum(rec["photon_distribution"]) == pytest.approx(1.0, abs=1e-12)

    def test_second_stage_needs_r2(self, capsys):
        assert main(["run", "--alpha", "1", "--r-sq", "0.5", "--stages", "2"]) != 0
        assert "r2" in capsys.readouterr().err

    def test_out_of_range(self):
        assert main(["run", "--alpha", "1", "--r-sq", "1.5"]) != 0

    def test_bad_number_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--alpha", "1", "--r-sq", "half"])
        assert exc.value.code != 0

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "carburettor", "run", "--alpha", "1", "--r-sq", "0.5"],
            capture_output=True, text=True, check=True,
        )
        assert json.loads(proc.stdout)["r_sq"] == 0.5
