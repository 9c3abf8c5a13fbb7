import json

import numpy as np
import pytest

import ergokit as ek
from ergokit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_ergodic_chain_exit_zero(self, capsys):
        code, out, _ = run(capsys, "analyze", "--gen", "lazy_hypercube", "--params", "d=3")
        obj = json.loads(out)
        assert code == 0
        assert obj["irreducible"] and obj["aperiodic"]
        assert obj["primitivity_exponent"] == 3

    def test_periodic_chain_exit_two(self, capsys):
        code, out, _ = run(capsys, "analyze", "--gen", "flip")
        obj = json.loads(out)
        assert code == 2
        assert obj["aperiodic"] is False
        assert obj["periods"] == {"s0": 2, "s1": 2}

    def test_chain_from_json_file(self, capsys, tmp_path):
        P = ek.generators.two_state(0.2, 0.3)
        f = tmp_path / "chain.json"
        f.write_text(P.to_json())
        code, out, _ = run(capsys, "analyze", "--chain", str(f))
        assert code == 0
        assert json.loads(out)["irreducible"]

    def test_missing_file_exit_one(self, capsys):
        code, _, err = run(capsys, "analyze", "--chain", "/no/such/file.json")
        assert code == 1
        assert "error" in err

    def test_malformed_csv_exit_one(self, capsys, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("a,b\n0.5,0.5\n")  # missing second matrix row
        code, _, err = run(capsys, "analyze", "--chain", str(f))
        assert code == 1
        assert "ChainParseError" in err

    def test_no_source_exit_one(self, capsys):
        code, _, err = run(capsys, "analyze")
        assert code == 1


class TestStationary:
    def test_all_methods_agree(self, capsys):
        code, out, _ = run(
            capsys, "stationary", "--gen", "two_state", "--params", "p=0.2,q=0.3"
        )
        obj = json.loads(out)
        assert code == 0
        assert len(obj["methods"]) == 6
        for m, r in obj["methods"].items():
            assert "error" not in r, m
            assert np.abs(np.array(r["pi"]) - [0.6, 0.4]).max() < 1e-8
        assert max(obj["pairwise_max_discrepancy"].values()) < 1e-8

    def test_periodic_chain_partial_methods(self, capsys):
        # flip is periodic: envelope and power methods fail inline, exact ones work
        code, out, _ = run(capsys, "stationary", "--gen", "flip")
        obj = json.loads(out)
        assert code == 0
        assert "error" in obj["methods"]["envelope"]
        assert obj["methods"]["linear_solve"]["pi"] == [0.5, 0.5]

    def test_method_subset(self, capsys):
        code, out, _ = run(
            capsys,
            "stationary",
            "--gen",
            "uniform",
            "--params",
            "n=3",
            "--methods",
            "linear_solve,return_time",
        )
        obj = json.loads(out)
        assert code == 0
        assert set(obj["methods"]) == {"linear_solve", "return_time"}

    def test_unknown_method_exit_one(self, capsys):
        code, _, err = run(
            capsys, "stationary", "--gen", "flip", "--methods", "ouija_board"
        )
        assert code == 1

    def test_envelope_csv_written(self, capsys, tmp_path):
        out_csv = tmp_path / "trace.csv"
        code, _, _ = run(
            capsys,
            "stationary",
            "--gen",
            "two_state",
            "--params",
            "p=0.2,q=0.3",
            "--csv",
            str(out_csv),
        )
        assert code == 0
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0] == "column,i,m,M,delta"
        assert len(lines) > 2


class TestMix:
    def test_two_state(self, capsys):
        code, out, _ = run(capsys, "mix", "--gen", "two_state", "--params", "p=0.2,q=0.3")
        obj = json.loads(out)
        assert code == 0
        assert obj["empirical_tmix"] == 2
        assert obj["empirical_tmix"] <= obj["bound_tmix"]
        assert obj["primitivity_m"] == 1

    def test_csv_curve(self, capsys, tmp_path):
        out_csv = tmp_path / "curve.csv"
        code, _, _ = run(
            capsys,
            "mix",
            "--gen",
            "two_state",
            "--params",
            "p=0.2,q=0.3",
            "--horizon",
            "10",
            "--csv",
            str(out_csv),
        )
        assert code == 0
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0] == "t,d,n_delta,theta_pow"
        t, d, nd, th = lines[1].split(",")
        assert float(d) == pytest.approx(0.3)  # d(1) = 0.6 * 0.5
        assert float(d) <= float(nd)
        assert float(d) <= float(th)

    def test_periodic_exit_one(self, capsys):
        code, _, err = run(capsys, "mix", "--gen", "flip")
        assert code == 1


class TestCouple:
    def test_two_state_passes(self, capsys, tmp_path):
        out_csv = tmp_path / "lemma.csv"
        code, out, _ = run(
            capsys,
            "couple",
            "--gen",
            "two_state",
            "--params",
            "p=0.2,q=0.3",
            "--trials",
            "20000",
            "--horizon",
            "10",
            "--seed",
            "3",
            "--csv",
            str(out_csv),
        )
        assert code == 0
        assert json.loads(out)["passed"] is True
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0] == "step,exact_tv,tail,tail_se"
        assert len(lines) == 12  # header + steps 0..10

    def test_seed_determinism(self, capsys):
        args = (
            "couple", "--gen", "two_state", "--params", "p=0.2,q=0.3",
            "--trials", "5000", "--horizon", "5", "--seed", "11",
        )
        _, out_a, _ = run(capsys, *args)
        _, out_b, _ = run(capsys, *args)
        assert out_a == out_b


class TestGenerate:
    def test_json_round_trip(self, capsys, tmp_path):
        code, out, _ = run(capsys, "generate", "lazy_hypercube", "--params", "d=2")
        assert code == 0
        f = tmp_path / "cube.json"
        f.write_text(out)
        code2, out2, _ = run(capsys, "analyze", "--chain", str(f))
        assert code2 == 0
        assert json.loads(out2)["primitivity_exponent"] == 2

    def test_csv_round_trip(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "generate", "two_state", "--params", "p=0.2,q=0.3",
            "--format", "csv",
        )
        assert code == 0
        f = tmp_path / "chain.csv"
        f.write_text(out)
        back = ek.chain.load_chain(str(f))
        assert np.array_equal(back.entries, [[0.8, 0.2], [0.3, 0.7]])

    def test_param_alias(self, capsys):
        code, out, _ = run(capsys, "generate", "cycle", "--params", "L=4")
        assert code == 0
        assert len(json.loads(out)["states"]) == 4

    def test_bad_generator_exit_one(self, capsys):
        code, _, err = run(capsys, "generate", "perpetual_motion")
        assert code == 1


class TestReport:
    def test_two_state_full_pass(self, capsys):
        code, out, _ = run(
            capsys,
            "report",
            "--gen",
            "two_state",
            "--params",
            "p=0.2,q=0.3",
            "--trials",
            "20000",
        )
        obj = json.loads(out)
        assert code == 0
        assert all(obj["verdicts"].values())
        assert set(obj["verdicts"]) == {
            "methods_agree",
            "mixing_bound_dominates",
            "coupling_lemma",
            "doeblin_tv_bound",
            "doeblin_recursion",
        }
        assert obj["doeblin"]["delta"] == pytest.approx(0.5)
        for r in obj["stationary"].values():
            assert np.abs(np.array(r["pi"]) - [0.6, 0.4]).max() < 1e-8

    def test_periodic_chain_exit_two(self, capsys):
        code, out, _ = run(capsys, "report", "--gen", "flip", "--trials", "100")
        obj = json.loads(out)
        assert code == 2
        assert obj["ergodicity"]["aperiodic"] is False
        assert "mixing" not in obj


class TestThreadsEnv:
    def test_threaded_matches_serial(self, capsys, monkeypatch):
        args = ("stationary", "--gen", "two_state", "--params", "p=0.2,q=0.3")
        _, serial, _ = run(capsys, *args)
        monkeypatch.setenv("ERGOKIT_THREADS", "4")
        _, threaded, _ = run(capsys, *args)
        assert serial == threaded

    def test_garbage_env_tolerated(self, capsys, monkeypatch):
        monkeypatch.setenv("ERGOKIT_THREADS", "many")
        code, out, _ = run(capsys, "stationary", "--gen", "uniform", "--params", "n=3")
        assert code == 0
