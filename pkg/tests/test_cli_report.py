import csv
import io
import json
import math
import subprocess
import sys

import pytest

from chebqls import cli_report as cr
from chebqls.approx_family import SWEEP_HEADER


def parse_csv(text):
    return list(csv.reader(io.StringIO(text)))


class TestDegrees:
    def test_reference_table(self):
        rows = cr.table_degrees()
        assert len(rows) == 32 // 2
        assert cr.degree_discrepancies(rows) == []
        got = {(r.kappa, r.epsilon): (r.cks_degree, r.chebiter_degree) for r in rows}
        assert got[(2, 0.5)] == (15, 7)
        assert got[(1000, 1e-6)] == (52989, 28327)

    def test_csv(self):
        text = cr.degrees_csv(cr.table_degrees([2], [0.5]))
        assert text == "kappa,epsilon,cks_degree,chebiter_degree\n2,0.5,15,7\n"

    def test_degenerate_epsilon(self):
        (row,) = cr.table_degrees([2], [10.0])
        assert row.chebiter_degree >= 1 and row.cks_degree >= 1

    def test_discrepancy_report(self):
        rows = [cr.DegreeRow(2, 0.5, 17, 7)]
        (line,) = cr.degree_discrepancies(rows)
        assert "cks" in line and "17" in line and "15" in line and "reference" in line

    def test_bound_convention_differs(self):
        assert cr.degree_discrepancies(cr.table_degrees(convention="bound"))


class TestSweep:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            cr.SweepConfig(degrees=[2])
        with pytest.raises(ValueError):
            cr.SweepConfig(kappas=[])
        with pytest.raises(ValueError):
            cr.SweepConfig(kappas=[1.0])
        with pytest.raises(ValueError):
            cr.SweepConfig(families=["newton"])

    def test_rows_and_header(self):
        res = cr.error_sweep(cr.SweepConfig(kappas=[4.0], degrees=[3, 7, 11]))
        rows = parse_csv(res.csv())
        assert tuple(rows[0]) == tuple(SWEEP_HEADER)
        assert [r[0] for r in rows[1:]] == ["chebiter"] * 3 + ["cks"] * 3
        assert all(len(r) == len(SWEEP_HEADER) for r in rows)

    def test_chebiter_wins_and_ratio(self):
        res = cr.error_sweep(cr.SweepConfig(kappas=[16.0], degrees=list(range(3, 256, 8))))
        assert 1.7 <= res.ratios[16.0] <= 2.3
        by = {}
        for r in res.rows:
            by.setdefault(r[3], {})[r[0]] = float(r[5])
        assert all(v["chebiter"] < v["cks"] for v in by.values())

    def test_max_error_filter(self):
        # at kappa = 2000 a degree-127 residual is 1 - 1/kappa^2 to the 64th, about 0.99998
        res = cr.error_sweep(cr.SweepConfig(kappas=[2000.0], degrees=[127], families=["gd"], max_error=0.5))
        assert res.rows == []
        kept = cr.error_sweep(cr.SweepConfig(kappas=[2.0], degrees=[127], families=["gd"], max_error=0.5))
        assert len(kept.rows) == 1

    def test_byte_deterministic_and_parallel(self):
        cfg = dict(kappas=[3.0, 8.0], degrees=[1, 5, 21], families=["chebiter", "cks", "gd"])
        a = cr.error_sweep(cr.SweepConfig(**cfg)).csv()
        b = cr.error_sweep(cr.SweepConfig(**cfg)).csv()
        c = cr.error_sweep(cr.SweepConfig(workers=2, **cfg)).csv()
        assert a == b == c

    def test_fit_slope(self):
        d = [1, 3, 5, 7]
        assert cr.fit_slope(d, [math.exp(-0.5 * x) for x in d]) == pytest.approx(-0.5)
        assert math.isnan(cr.fit_slope([1, 3], [1e-20, 2.0]))


class TestBench:
    def test_rows(self):
        rows = cr.bench_coeffs([16, 32], kappa=5.0, repeats=1)
        assert [r.t for r in rows] == [16, 32]
        assert math.isnan(rows[0].fast_ratio)
        assert rows[1].rel_diff <= 1e-9
        header = cr.bench_csv(rows).splitlines()[0]
        assert header == "t,fast_seconds,recurrence_seconds,rel_diff,fast_ratio,recurrence_ratio"

    def test_equal_at_1024(self):
        (row,) = cr.bench_coeffs([1024], kappa=64.0, repeats=1)
        assert row.rel_diff <= 1e-9

    def test_limits(self):
        with pytest.raises(ValueError):
            cr.bench_coeffs([2**17])

    def test_exponent(self):
        assert cr.scaling_exponent(4.0) == pytest.approx(2.0)


class TestSimulate:
    @pytest.mark.parametrize("circuit", ["w-form", "qsvt", "lcu"])
    def test_circuits(self, circuit):
        out = cr.simulate(4, 3.0, 5, seed=2, circuit=circuit)
        assert out["block_error"] <= 1e-9
        assert out["query_count"] == 9

    def test_large_lcu_falls_back(self):
        out = cr.simulate(8, 3.0, 200, seed=1)
        assert out["block_error"] <= 1e-9 and out["residual"] < 1e-9

    def test_unknown(self):
        with pytest.raises(ValueError):
            cr.simulate(2, 2.0, 2, circuit="magic")


class TestSpecial:
    @pytest.mark.parametrize(
        "function,kw,tol",
        [
            ("monomial", {"degree": 5}, 1e-14),
            ("exp", {"kappa": 3.0}, 1e-12),
            ("slog", {"kappa": 3.0}, 1e-8),
            ("erf", {"kappa": 5.0, "epsilon": 1e-8}, 1e-8),
            ("sign", {"epsilon": 1e-3}, 1e-3),
            ("rect", {"epsilon": 1e-3}, 1e-3),
        ],
    )
    def test_functions(self, function, kw, tol):
        _, summary = cr.special(function, **kw)
        assert summary["grid_error"] <= tol

    def test_unknown(self):
        with pytest.raises(ValueError):
            cr.special("gamma")


def test_gadget_report():
    rows = cr.gadget_report(6, seed=3)
    assert len(rows) == 4 and all(r[3] for r in rows)


class TestVerify:
    def test_all_pass(self):
        results = cr.verify_all()
        assert all(r.passed for r in results), cr.format_claims(results)
        assert len(results) == 11

    def test_corrupt_fails_norm_claim(self):
        failed = [r.claim for r in cr.verify_all(corrupt=True) if not r.passed]
        assert len(failed) == 1 and "1-norm" in failed[0]

    def test_crash_is_failure(self):
        r = cr._claim("boom", lambda: 1 / 0)
        assert not r.passed and "ZeroDivisionError" in r.detail


class TestMain:
    def test_degrees_stdout(self, capsys):
        assert cr.main(["degrees", "--kappa", "2", "--epsilon", "0.5"]) == 0
        assert capsys.readouterr().out.splitlines() == ["kappa,epsilon,cks_degree,chebiter_degree", "2,0.5,15,7"]

    def test_off_table_entries_report_nothing(self, capsys):
        cr.main(["degrees", "--kappa", "3", "--epsilon", "0.5"])
        assert capsys.readouterr().err == ""

    def test_sweep_to_file(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert cr.main(["sweep", "--kappa", "4", "--degree", "1:9:2", "--out", str(out)]) == 0
        rows = parse_csv(out.read_text())
        assert len(rows) == 1 + 2 * 5
        assert "slope_ratio" in json.loads(capsys.readouterr().err)

    def test_single_degree_ratio_is_null(self, capsys):
        assert cr.main(["sweep", "--kappa", "4", "--degree", "7"]) == 0
        assert json.loads(capsys.readouterr().err) == {"slope_ratio": {"4": None}}

    def test_sweep_bad_degree(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cr.main(["sweep", "--degree", "4"])
        assert exc.value.code == 2

    def test_coeffs(self, capsys):
        assert cr.main(["coeffs", "--t", "1", "--kappa", "2"]) == 0
        assert capsys.readouterr().out == "index,basis_degree,coefficient\n0,1,1.6000000000000001\n"

    def test_coeffs_methods_match(self, capsys):
        cr.main(["coeffs", "--t", "3", "--kappa", "2"])
        fast = capsys.readouterr().out
        cr.main(["coeffs", "--t", "3", "--kappa", "2", "--method", "recurrence"])
        slow = capsys.readouterr().out
        f = [float(r[2]) for r in parse_csv(fast)[1:]]
        s = [float(r[2]) for r in parse_csv(slow)[1:]]
        assert f == pytest.approx(s, rel=1e-13)

    def test_coeffs_cks(self, capsys):
        assert cr.main(["coeffs", "--family", "cks", "--t", "30", "--kappa", "4", "--epsilon", "0.01"]) == 0
        assert capsys.readouterr().out.startswith("index,basis_degree,coefficient\n")

    def test_simulate_and_special(self, capsys):
        assert cr.main(["simulate", "--n", "2", "--t", "3", "--circuit", "qsvt"]) == 0
        assert json.loads(capsys.readouterr().out)["query_count"] == 5
        assert cr.main(["special", "--function", "exp", "--kappa", "1"]) == 0
        out = capsys.readouterr().out
        assert json.loads(out.splitlines()[-1])["grid_error"] < 1e-12

    def test_bench(self, capsys):
        assert cr.main(["bench", "--t", "8,16", "--repeats", "1"]) == 0
        assert len(capsys.readouterr().out.splitlines()) == 3

    def test_gadget(self, capsys):
        assert cr.main(["gadget", "--n", "3", "--seed", "4"]) == 0
        assert capsys.readouterr().out.count("PASS") == 4

    def test_verify_corrupt_exit(self, tmp_path):
        out = tmp_path / "v.txt"
        assert cr.main(["verify", "--corrupt", "--out", str(out)]) == 1
        assert "FAIL" in out.read_text()

    def test_config(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"kappa": "10", "epsilon": [0.01]}))
        assert cr.main(["degrees", "--config", str(cfg)]) == 0
        assert capsys.readouterr().out.splitlines()[1] == "10,0.01,203,101"

    def test_config_flag_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"kappa": [10], "epsilon": [0.01]}))
        cr.main(["degrees", "--config", str(cfg), "--kappa", "2"])
        assert capsys.readouterr().out.splitlines()[1].startswith("2,")

    @pytest.mark.parametrize("content", ["", "{}"])
    def test_empty_config_is_usage_error(self, tmp_path, capsys, content):
        cfg = tmp_path / "c.json"
        cfg.write_text(content)
        with pytest.raises(SystemExit) as exc:
            cr.main(["verify", "--config", str(cfg)])
        assert exc.value.code == 2
        assert "empty" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"colour": "red"}))
        with pytest.raises(SystemExit):
            cr.main(["degrees", "--config", str(cfg)])

    def test_missing_command(self):
        with pytest.raises(SystemExit):
            cr.main([])

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "chebqls", "degrees", "--kappa", "2", "--epsilon", "0.5"],
            capture_output=True, text=True, check=True,
        )  # fmt: skip
        assert proc.stdout.endswith("2,0.5,15,7\n")
