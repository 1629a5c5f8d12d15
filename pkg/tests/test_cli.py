import json

import jsonschema
import numpy as np
import pytest

import ima
from ima import io
from ima.cli import main


def _schema(name):
    import importlib.resources as res

    return json.loads((res.files("ima") / "schemas" / name).read_text())


def _simulate(tmp_path, name="series.csv", theta="0.6", n="200", seed="5", extra=()):
    out = tmp_path / name
    rc = main(
        ["simulate", "--theta", theta, "--sigma2", "1.0",
         "--shifted-exp", n, "1.0", "--seed", seed, "--out", str(out), *extra]
    )
    assert rc == 0
    return out


class TestVersionAndUsage:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert ima.__version__ in capsys.readouterr().out

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--theta", "0.5"])
        assert exc.value.code == 2


class TestSimulate:
    def test_regular_row_count(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        rc = main(["simulate", "--theta", "0.5", "--regular", "100",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 101
        assert lines[0] == "time,value"
        assert "100 observations" in capsys.readouterr().out

    def test_same_seed_byte_identical(self, tmp_path):
        a = _simulate(tmp_path, "a.csv", seed="7")
        b = _simulate(tmp_path, "b.csv", seed="7")
        assert a.read_bytes() == b.read_bytes()

    def test_times_from_file(self, tmp_path):
        tfile = tmp_path / "times.csv"
        tfile.write_text("time\n0\n1\n3\n6\n")
        out = tmp_path / "s.csv"
        rc = main(["simulate", "--theta", "0.4", "--times", str(tfile),
                   "--seed", "2", "--out", str(out)])
        assert rc == 0
        s = io.read_series_csv(out)
        np.testing.assert_array_equal(s.grid.times, [0.0, 1.0, 3.0, 6.0])

    def test_exp_mixture_grid(self, tmp_path):
        out = tmp_path / "s.csv"
        rc = main(["simulate", "--theta", "0.3",
                   "--exp-mixture", "50", "130", "6.5", "0.15", "0.85",
                   "--seed", "3", "--out", str(out)])
        assert rc == 0
        assert io.read_series_csv(out).n == 50

    def test_student_t_dist(self, tmp_path):
        out = tmp_path / "s.csv"
        rc = main(["simulate", "--theta", "0.5", "--regular", "50",
                   "--dist", "student_t(7)", "--seed", "4", "--out", str(out)])
        assert rc == 0

    def test_bad_dist_exits_2(self, tmp_path):
        out = tmp_path / "s.csv"
        rc = main(["simulate", "--theta", "0.5", "--regular", "50",
                   "--dist", "cauchy", "--out", str(out)])
        assert rc == 2

    def test_bad_theta_exits_2(self, tmp_path):
        rc = main(["simulate", "--theta", "1.5", "--regular", "50",
                   "--out", str(tmp_path / "s.csv")])
        assert rc == 2

    def test_unwritable_out_exits_3(self, tmp_path):
        rc = main(["simulate", "--theta", "0.5", "--regular", "50",
                   "--out", str(tmp_path / "nodir" / "s.csv")])
        assert rc == 3


class TestFit:
    def test_round_trip_recovery(self, tmp_path, capsys):
        data = _simulate(tmp_path, theta="0.85", n="600", seed="11")
        fit_json = tmp_path / "fit.json"
        rc = main(["fit", str(data), "--zero-mean", "--json", str(fit_json)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "theta_hat=" in out
        payload = json.loads(fit_json.read_text())
        assert abs(payload["theta_hat"] - 0.85) < 3 * payload["se_theta"]

    def test_json_validates_against_schema(self, tmp_path):
        data = _simulate(tmp_path, n="150", seed="12")
        fit_json = tmp_path / "fit.json"
        assert main(["fit", str(data), "--json", str(fit_json)]) == 0
        jsonschema.validate(json.loads(fit_json.read_text()), _schema("fit.schema.json"))

    def test_missing_file_exits_3(self, tmp_path):
        assert main(["fit", str(tmp_path / "absent.csv")]) == 3

    def test_non_increasing_times_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("time,value\n0,1.0\n2,0.5\n1,0.7\n")
        assert main(["fit", str(bad)]) == 2
        assert "line 4" in capsys.readouterr().err

    def test_two_rows_exit_4(self, tmp_path, capsys):
        tiny = tmp_path / "tiny.csv"
        tiny.write_text("time,value\n0,1.0\n2,0.5\n")
        assert main(["fit", str(tiny)]) == 4
        assert "InsufficientData" in capsys.readouterr().err


class TestPredict:
    def test_fixed_params(self, tmp_path):
        data = _simulate(tmp_path, n="80", seed="21")
        out = tmp_path / "pred.csv"
        pjson = tmp_path / "pred.json"
        rc = main(["predict", str(data), "--theta", "0.6", "--sigma2", "1.0",
                   "--out", str(out), "--json", str(pjson)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "time,x,xhat,mse,innovation,std_innovation"
        assert len(lines) == 81
        jsonschema.validate(json.loads(pjson.read_text()),
                            _schema("prediction.schema.json"))

    def test_theta_without_sigma2_exits_2(self, tmp_path):
        data = _simulate(tmp_path, n="50", seed="22")
        rc = main(["predict", str(data), "--theta", "0.6",
                   "--out", str(tmp_path / "p.csv")])
        assert rc == 2

    def test_refit_path_matches_library(self, tmp_path):
        data = _simulate(tmp_path, n="120", seed="23")
        out = tmp_path / "pred.csv"
        assert main(["predict", str(data), "--zero-mean", "--out", str(out)]) == 0
        series = io.read_series_csv(data)
        fit = ima.fit_mle(series, mu=0.0, compute_se=False)
        pred = ima.innovations_predict(fit.params(), series)
        got = np.loadtxt(out, delimiter=",", skiprows=1)
        np.testing.assert_allclose(got[:, 2], pred.predictors, rtol=1e-12)


class TestBootstrap:
    def test_json_and_consistency(self, tmp_path, capsys):
        data = _simulate(tmp_path, n="200", seed="31")
        bjson = tmp_path / "boot.json"
        rc = main(["bootstrap", str(data), "-B", "40", "--seed", "2",
                   "--zero-mean", "--json", str(bjson)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "theta_b=" in out and "interval" in out
        payload = json.loads(bjson.read_text())
        jsonschema.validate(payload, _schema("bootstrap.schema.json"))
        assert abs(payload["theta_b"] - payload["fit"]["theta_hat"]) \
            < 3 * payload["se_theta_b"]

    def test_minimal_b(self, tmp_path):
        data = _simulate(tmp_path, n="100", seed="32")
        bjson = tmp_path / "boot.json"
        rc = main(["bootstrap", str(data), "-B", "2", "--seed", "3",
                   "--zero-mean", "--json", str(bjson)])
        assert rc == 0
        payload = json.loads(bjson.read_text())
        assert payload["se_theta_b"] is not None

    def test_same_seed_identical_json(self, tmp_path):
        data = _simulate(tmp_path, n="100", seed="33")
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert main(["bootstrap", str(data), "-B", "15", "--seed", "4",
                         "--zero-mean", "--json", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestDiagnose:
    def test_output_file_set(self, tmp_path, capsys):
        data = _simulate(tmp_path, n="250", seed="41")
        out_dir = tmp_path / "diag"
        rc = main(["diagnose", str(data), "--zero-mean", "--out", str(out_dir)])
        assert rc == 0
        names = sorted(p.name for p in out_dir.iterdir())
        assert names == ["acf.csv", "lb.csv", "mse.csv", "qq.csv", "report.json"]
        assert "ljung-box" in capsys.readouterr().out
        jsonschema.validate(json.loads((out_dir / "report.json").read_text()),
                            _schema("diagnostics.schema.json"))


class TestMc:
    CFG = "theta0 = 0.4, 0.7\nn_obs = 60\nreplications = 8\nseed = 51\n"

    def test_study_outputs(self, tmp_path, capsys):
        cfg = tmp_path / "study.cfg"
        cfg.write_text(self.CFG)
        out_dir = tmp_path / "mc"
        rc = main(["mc", str(cfg), "--out", str(out_dir), "--threads", "2"])
        assert rc == 0
        table = capsys.readouterr().out
        assert "mean_estimate" in table
        csv_text = (out_dir / "scenarios.csv").read_text()
        assert len(csv_text.strip().splitlines()) == 3  # header + 2 scenarios
        payload = json.loads((out_dir / "report.json").read_text())
        jsonschema.validate(payload, _schema("mc.schema.json"))
        assert payload["meta"]["threads"] == 2

    def test_threads_do_not_change_csv(self, tmp_path):
        cfg = tmp_path / "study.cfg"
        cfg.write_text(self.CFG)
        outs = []
        for t in ("1", "2"):
            out_dir = tmp_path / f"mc{t}"
            assert main(["mc", str(cfg), "--out", str(out_dir), "--threads", t]) == 0
            outs.append((out_dir / "scenarios.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_bundled_listing_on_miss(self, tmp_path, capsys):
        rc = main(["mc", "--bundled", "nope", "--out", str(tmp_path / "x")])
        assert rc == 2
        err = capsys.readouterr().err
        assert "table1" in err and "table2" in err

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("theta0 = 0.5\nwalrus = 9\n")
        rc = main(["mc", str(cfg), "--out", str(tmp_path / "x")])
        assert rc == 2
        assert "walrus" in capsys.readouterr().err

    def test_missing_config_file_exits_3(self, tmp_path):
        rc = main(["mc", str(tmp_path / "absent.cfg"), "--out", str(tmp_path / "x")])
        assert rc == 3

    def test_config_and_bundled_exclusive(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["mc", "a.cfg", "--bundled", "table1", "--out", str(tmp_path / "x")])
        assert exc.value.code == 2
