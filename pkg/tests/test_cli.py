import csv
import io
import json

import numpy as np
import pytest
from click.testing import CliRunner

from antidist.certificates import all_ones_witness_example, certificate_to_json, small_incoherent_example
from antidist.cli import main
from antidist.formats import gram_to_json, load_input, write_json
from antidist.gram import make_equiangular


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


def gram_file(path, g):
    write_json(path, gram_to_json(g))
    return path


class TestGenerate:
    def test_trine_states_round_trip(self, runner, tmp_path):
        out = tmp_path / "trine.json"
        assert run(runner, "generate", "trine", "--states", "-o", out).exit_code == 0
        g, s = load_input(out)
        assert s is not None and s.n == 3
        assert np.allclose(np.abs(g[0, 1]), 0.5)

    def test_equiangular(self, runner, tmp_path):
        out = tmp_path / "eq.json"
        assert run(runner, "generate", "equiangular", "--n", 5, "--gamma", 0.3, "-o", out).exit_code == 0
        g, s = load_input(out)
        assert s is None
        assert np.allclose(g, make_equiangular(5, 0.3))

    def test_equiangular_states_reproduce_gram(self, runner, tmp_path):
        out = tmp_path / "eq.json"
        run(runner, "generate", "equiangular", "--n", 4, "--gamma", 0.5, "--states", "-o", out)
        g, _ = load_input(out)
        assert np.allclose(g, make_equiangular(4, 0.5), atol=1e-12)

    def test_d4_writes_two_files(self, runner, tmp_path):
        prefix = tmp_path / "ex"
        res = run(runner, "generate", "d4", "--eps", 0.05, "-o", prefix)
        assert res.exit_code == 0
        g, _ = load_input(f"{prefix}_G.json")
        g_eps, _ = load_input(f"{prefix}_G_eps.json")
        assert g.shape == g_eps.shape == (4, 4)
        assert not np.allclose(g, g_eps)

    def test_circulant_spectrum(self, runner, tmp_path):
        out = tmp_path / "c.json"
        assert run(runner, "generate", "circulant-spectrum", "--lams", "2.1,1.9,0,0", "-o", out).exit_code == 0
        g, _ = load_input(out)
        assert np.allclose(np.sort(np.linalg.eigvalsh(g))[::-1], [2.1, 1.9, 0, 0], atol=1e-12)

    @pytest.mark.parametrize(
        "args",
        [
            ["generate", "equiangular", "--n", "4"],
            ["generate", "d4"],
            ["generate", "circulant-spectrum"],
            ["generate", "circulant-spectrum", "--lams", "a,b"],
            ["generate", "nosuch"],
            ["generate", "equiangular", "--n", "3", "--gamma", "1.5"],
        ],
    )
    def test_bad_arguments_exit_1(self, runner, args):
        assert runner.invoke(main, args).exit_code == 1


class TestAnalyze:
    def test_trine_json(self, runner, tmp_path):
        src = tmp_path / "t.json"
        run(runner, "generate", "trine", "--states", "-o", src)
        res = run(runner, "analyze", src)
        assert res.exit_code == 0
        rep = json.loads(res.output)
        assert rep["decision"] == "Antidistinguishable"
        assert rep["decided_by"] == "SDP"
        assert "timings" in rep

    def test_no_timings_is_byte_stable(self, runner, tmp_path):
        src = gram_file(tmp_path / "g.json", make_equiangular(6, 0.81))
        a = run(runner, "analyze", src, "--no-timings").output
        b = run(runner, "analyze", src, "--no-timings").output
        assert a == b
        assert "timings" not in json.loads(a)

    def test_csv(self, runner, tmp_path):
        src = gram_file(tmp_path / "g.json", make_equiangular(4, 0.7))
        res = run(runner, "analyze", src, "--csv")
        rows = list(csv.DictReader(io.StringIO(res.output)))
        assert len(rows) == 1
        assert rows[0]["decision"] == "NotAntidistinguishable"
        assert rows[0]["decided_by"] == "PairwiseIP_NotAnti"

    def test_certificate_written_and_verifiable(self, runner, tmp_path):
        src = gram_file(tmp_path / "g.json", make_equiangular(5, 0.9))
        cert = tmp_path / "cert.json"
        assert run(runner, "analyze", src, "--method", "sdp", "--cert", cert).exit_code == 0
        res = run(runner, "verify", src, cert)
        assert res.exit_code == 0
        assert json.loads(res.output)["accepted"] is True

    def test_undecided_exit_3(self, runner, tmp_path):
        g = make_equiangular(4, 0.62).real.copy()
        g[0, 1] = g[1, 0] = 0.92
        g[2, 3] = g[3, 2] = 0.32
        src = gram_file(tmp_path / "g.json", g)
        assert run(runner, "analyze", src, "--method", "bounds").exit_code == 3

    def test_missing_file_exit_1(self, runner, tmp_path):
        res = runner.invoke(main, ["analyze", str(tmp_path / "none.json")])
        assert res.exit_code == 1

    def test_invalid_gram_exit_1(self, runner, tmp_path):
        src = tmp_path / "bad.json"
        src.write_text(json.dumps(gram_to_json(np.array([[1.0, 2.0], [2.0, 1.0]]))))
        res = runner.invoke(main, ["analyze", str(src)])
        assert res.exit_code == 1
        assert "Error" in res.output

    def test_malformed_json_exit_1(self, runner, tmp_path):
        src = tmp_path / "bad.json"
        src.write_text("{not json")
        assert runner.invoke(main, ["analyze", str(src)]).exit_code == 1

    def test_bad_method_exit_1(self, runner, tmp_path):
        src = gram_file(tmp_path / "g.json", make_equiangular(3, 0.2))
        assert runner.invoke(main, ["analyze", str(src), "--method", "guess"]).exit_code == 1


class TestVerify:
    def test_decomposition_fixture(self, runner, tmp_path):
        g, dec = small_incoherent_example()
        gpath = gram_file(tmp_path / "g.json", g)
        cpath = tmp_path / "c.json"
        write_json(cpath, certificate_to_json(dec))
        res = run(runner, "verify", gpath, cpath)
        assert res.exit_code == 0
        assert json.loads(res.output)["kind"] == "decomposition"

    def test_witness_fixture(self, runner, tmp_path):
        x, w = all_ones_witness_example()
        gpath = gram_file(tmp_path / "g.json", x)
        cpath = tmp_path / "c.json"
        write_json(cpath, certificate_to_json(w))
        res = run(runner, "verify", gpath, cpath)
        assert res.exit_code == 0
        assert json.loads(res.output)["margins"]["trace_product"] == pytest.approx(-3)

    def test_tampered_certificate_exit_2(self, runner, tmp_path):
        g, dec = small_incoherent_example()
        gpath = gram_file(tmp_path / "g.json", g)
        obj = certificate_to_json(dec)
        obj["blocks"][0][1][1]["re"] += 0.5
        cpath = tmp_path / "c.json"
        write_json(cpath, obj)
        res = run(runner, "verify", gpath, cpath)
        assert res.exit_code == 2
        assert json.loads(res.output)["accepted"] is False

    def test_size_mismatch_exit_1(self, runner, tmp_path):
        _, dec = small_incoherent_example()
        gpath = gram_file(tmp_path / "g.json", make_equiangular(4, 0.1))
        cpath = tmp_path / "c.json"
        write_json(cpath, certificate_to_json(dec))
        assert runner.invoke(main, ["verify", str(gpath), str(cpath)]).exit_code == 1

    def test_unknown_kind_exit_1(self, runner, tmp_path):
        gpath = gram_file(tmp_path / "g.json", make_equiangular(3, 0.1))
        cpath = tmp_path / "c.json"
        cpath.write_text(json.dumps({"kind": "hunch"}))
        assert runner.invoke(main, ["verify", str(gpath), str(cpath)]).exit_code == 1


class TestSweepAndThresholds:
    def test_sweep_csv(self, runner):
        res = run(runner, "sweep", "--n-min", 3, "--n-max", 4, "--gamma-step", 0.25, "--threads", 2)
        assert res.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(res.output)))
        assert tuple(rows[0]) == ("n", "gamma", "sdp_value", "error_probability", "antidistinguishable", "converged")
        assert len(rows) == 2 * 5
        by_key = {(int(r["n"]), float(r["gamma"])): r for r in rows}
        assert by_key[(3, 0.5)]["antidistinguishable"] == "true"
        assert by_key[(3, 0.75)]["antidistinguishable"] == "false"
        assert by_key[(4, 1.0)]["antidistinguishable"] == "false"

    def test_sweep_to_file(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        assert run(runner, "sweep", "--n-min", 2, "--n-max", 2, "--gamma-step", 0.5, "-o", out).exit_code == 0
        assert out.read_text().count("\n") == 4

    def test_sweep_bad_range_exit_1(self, runner):
        assert runner.invoke(main, ["sweep", "--n-min", "5", "--n-max", "3"]).exit_code == 1

    def test_thresholds(self, runner):
        res = run(runner, "thresholds", "--n-min", 3, "--n-max", 5)
        rows = list(csv.DictReader(io.StringIO(res.output)))
        assert [int(r["n"]) for r in rows] == [3, 4, 5]
        assert float(rows[1]["not_anti_above"]) == pytest.approx(2 / 3)


def test_help_lists_commands(runner):
    res = run(runner, "--help")
    assert res.exit_code == 0
    for cmd in ("analyze", "sweep", "generate", "verify", "thresholds"):
        assert cmd in res.output
