import csv
import io
import json
import shutil
import subprocess

import pytest

from tfm_lab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.fixture
def files(tmp_path):
    grid5 = ["0", "1/4", "1/2", "1", "2"]
    return {
        "uniform": write(tmp_path, "u.json", {"kind": "uniform"}),
        "cubic": write(tmp_path, "c.json", {"kind": "cubic_poly", "a": 5.62, "b": 10, "c": 5.62}),
        "third": write(tmp_path, "t.json", {"kind": "builtin", "name": "third_price",
                                            "grid": grid5, "n_max": 3}),
        "posted": write(tmp_path, "p.json", {"kind": "builtin", "name": "posted_price", "n_max": 1,
                                             "grid": [str(k / 10) for k in range(11)],
                                             "params": {"price": "4/5", "burn": 0}}),
        "lower": write(tmp_path, "l.json", {"kind": "builtin", "name": "lower_price",
                                            "params": {"price": "4/5", "target": "1/2"}}),
        "bad": write(tmp_path, "bad.json", {"kind": "nonsense"}),
        "tmp": tmp_path,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestPricing:
    def test_price_uniform(self, capsys, files):
        code, out, _ = run(capsys, "price", "--dist", files["uniform"], "--beta", "0.5")
        assert code == EXIT_OK
        assert "price: 0.75" in out and "revenue: 0.0625" in out

    def test_price_cubic(self, capsys, files):
        code, out, _ = run(capsys, "price", "--dist", files["cubic"])
        assert code == EXIT_OK and "price: 0.84567" in out

    def test_curves_rows_and_top(self, capsys, files):
        code, out, _ = run(capsys, "curves", "--dist", files["uniform"], "--betas", "0:1:100")
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 101
        assert float(rows[-1]["revenue"]) == 0.0

    def test_curves_cubic_monotone_price(self, capsys, files):
        code, out, _ = run(capsys, "curves", "--dist", files["cubic"], "--betas", "0:0.5:50")
        prices = [float(r["price"]) for r in csv.DictReader(io.StringIO(out))]
        assert code == EXIT_OK and len(prices) == 51
        assert all(b >= a - 1e-12 for a, b in zip(prices, prices[1:]))

    def test_curves_file_is_byte_stable(self, capsys, files):
        a, b = files["tmp"] / "a.csv", files["tmp"] / "b.csv"
        for p in (a, b):
            assert run(capsys, "curves", "--dist", files["cubic"], "--betas", "0:0.5:20",
                       "--out", str(p))[0] == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_collusion_free_cubic_two_intervals(self, capsys, files):
        code, out, _ = run(capsys, "collusion-free", "--dist", files["cubic"])
        assert code == EXIT_OK and out.count("..") == 2

    def test_approx(self, capsys, files):
        code, out, _ = run(capsys, "approx", "--dist", files["uniform"])
        assert code == EXIT_OK and out.startswith("C_F: ")


class TestAudits:
    def test_scp_fails_with_witness(self, capsys, files):
        code, out, _ = run(capsys, "check", "--mech", files["third"], "--prop", "scp", "--c", "1",
                           "--valuations", "1,1/2,1/4")
        assert code == EXIT_FAIL
        assert "bidder 1 bids 2" in out

    def test_oca_passes(self, capsys, files):
        code, _, _ = run(capsys, "check", "--mech", files["third"], "--prop", "oca")
        assert code == EXIT_OK

    def test_json_report(self, capsys, files):
        rep = files["tmp"] / "r.json"
        code, _, _ = run(capsys, "check", "--mech", files["third"], "--prop", "scp", "--c", "1",
                         "--valuations", "1,1/2,1/4", "--report", str(rep))
        data = json.loads(rep.read_text())
        assert code == EXIT_FAIL and data["verdict"] == "FAIL"
        assert data["witness"]["coalition"] == [1]

    def test_scp_needs_c(self, capsys, files):
        assert run(capsys, "check", "--mech", files["third"], "--prop", "scp")[0] == EXIT_USAGE

    def test_enumerate(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--levels", "0,1,2", "--n", "1")
        assert code == EXIT_OK and out.startswith("survivors: 4, max revenue: 0")


class TestCollude:
    def test_check_ic_and_ir(self, capsys, files):
        code, out, _ = run(capsys, "collude", "check", "--mech", files["posted"],
                           "--collusion", files["lower"], "--prior", files["uniform"])
        assert code == EXIT_OK and "IR: PASS" in out

    def test_search_finds(self, capsys, files):
        code, out, _ = run(capsys, "collude", "search", "--mech", files["posted"],
                           "--prior", files["uniform"])
        assert code == EXIT_FAIL and "lower_price(4/5, 1/2)" in out

    def test_search_needs_prior(self, capsys, files):
        assert run(capsys, "collude", "search", "--mech", files["posted"])[0] == EXIT_USAGE


class TestBuild:
    def test_sqrtlog_round_trip(self, capsys, files):
        out_path = files["tmp"] / "s.json"
        code, out, _ = run(capsys, "build", "sqrtlog", "--n", "5", "--out", str(out_path))
        assert code == EXIT_OK and "discrete regular: False" in out
        code, out, _ = run(capsys, "approx", "--dist", str(out_path))
        assert code == EXIT_OK and "C_F: 1.11803399" in out

    def test_smear_needs_inner(self, capsys):
        assert run(capsys, "build", "smear")[0] == EXIT_USAGE

    def test_cubic_negative_density(self, capsys):
        code, _, err = run(capsys, "build", "cubic", "--a", "1", "--b", "10", "--c", "1")
        assert code == EXIT_USAGE and err.startswith("error:")


class TestErrors:
    def test_bad_spec(self, capsys, files):
        code, _, err = run(capsys, "price", "--dist", files["bad"])
        assert code == EXIT_USAGE and "unknown distribution kind" in err

    def test_missing_file(self, capsys, files):
        assert run(capsys, "price", "--dist", str(files["tmp"] / "nope.json"))[0] == EXIT_USAGE

    def test_bad_betas(self, capsys, files):
        assert run(capsys, "curves", "--dist", files["uniform"], "--betas", "x")[0] == EXIT_USAGE

    def test_unwritable_out(self, capsys, files):
        assert run(capsys, "curves", "--dist", files["uniform"], "--out",
                   str(files["tmp"] / "no" / "dir.csv"))[0] == EXIT_USAGE

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == EXIT_USAGE


@pytest.mark.skipif(shutil.which("tfm-lab") is None, reason="console script not installed")
def test_console_script_exit_code(files):
    r = subprocess.run(["tfm-lab", "check", "--mech", files["third"], "--prop", "scp", "--c", "1",
                        "--valuations", "1,1/2,1/4"], capture_output=True, text=True)
    assert r.returncode == EXIT_FAIL
