import csv
import io
import json
import math
import subprocess
import sys

import pytest

from conftest import ternary
from erasure_exponents import cli
from erasure_exponents.simulator import SimResult


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bound_new(capsys):
    code, out, _ = run(["bound", "new", "--channel", "bsc:0.1", "--rate", "0.130812", "--threshold", "0.05"], capsys)
    assert code == 0
    d = json.loads(out)
    assert set(d) >= {"R", "T", "s_r", "s_opt", "e1_star", "e2_star", "branch"}
    assert d["e2_star"] - d["e1_star"] == pytest.approx(0.05, abs=1e-12)
    code, out2, _ = run(["bound", "new", "--channel", "bsc:0.1", "--rate", "0.130812", "--threshold", "0.05",
                         "--generic"], capsys)
    assert json.loads(out2)["e1_star"] == pytest.approx(d["e1_star"], abs=1e-9)


def test_bound_new_rejects_bad_p(capsys):
    code, _, err = run(["bound", "new", "--channel", "bsc:0.6", "--rate", "0.1", "--threshold", "0"], capsys)
    assert code == 1 and "p < 1/2" in err


@pytest.mark.parametrize("argv", [
    ["bound", "new", "--channel", "bsc:0.1", "--rate", "-0.1", "--threshold", "0"],
    ["bound", "new", "--channel", "bsc:0.1", "--rate", "0.1", "--threshold", "-1"],
    ["bound", "new", "--channel", "bsc:0.1", "--rate", "0.5", "--threshold", "0"],
    ["bound", "new", "--channel", "bsc:0.1", "--rate", "abc", "--threshold", "0"],
    ["bound", "sweep", "--channel", "bsc:0.1", "--rates", "0:1", "--thresholds", "0"],
    ["bound", "sweep", "--channel", "bsc:0.1", "--rates", "0.1,x", "--thresholds", "0"],
    ["simulate", "--channel", "bsc:0.1", "--n", "0", "--rate", "0.1", "--threshold", "0"],
    ["moments", "verify", "--s-values", "1.5"],
    ["moments", "verify", "--ns", "5000"],
    ["bound"],
    [],
])
def test_validation_errors_exit_1(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and err


def test_io_errors_exit_2(tmp_path, capsys):
    code, _, err = run(["check", "symmetry", "--channel", str(tmp_path / "nope.json")], capsys)
    assert code == 2 and "I/O" in err
    code, _, _ = run(["bound", "sweep", "--channel", "bsc:0.1", "--rates", "0.1", "--thresholds", "0",
                      "--out", str(tmp_path / "missing_dir" / "x.csv")], capsys)
    assert code == 2


def test_help_exits_0(capsys):
    code, out, _ = run(["--help"], capsys)
    assert code == 0 and "bound" in out


def test_bound_compare_example(capsys):
    code, out, _ = run(["bound", "compare", "--channel", "bsc:0.1", "--rates", "0.02:0.36:10",
                        "--thresholds", "0,0.05,0.1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "R,T,s_R,s_opt,branch,e1_star,e2_star,forney_e1,gap"
    table = rows(out)
    assert len(table) == 30
    assert [(float(r["R"]), float(r["T"])) for r in table[:3]] == [(0.02, 0.0), (0.02, 0.05), (0.02, 0.1)]
    assert all(float(r["gap"]) >= -1e-3 for r in table)


def test_sweep_records_errors(capsys):
    code, out, err = run(["bound", "sweep", "--channel", "bsc:0.1", "--rates", "0.1,0.5", "--thresholds", "0"],
                         capsys)
    assert code == 0
    table = rows(out)
    assert out.splitlines()[0] == "R,T,s_R,s_opt,branch,e1_star,e2_star"
    assert table[1]["branch"] == "error" and table[1]["e1_star"] == "nan"
    assert "RateOutOfRange" in err


def test_bits_round_trip(capsys):
    code, out, _ = run(["bound", "new", "--channel", "bsc:0.1", "--rate", "0.2", "--threshold", "0.1",
                        "--bits"], capsys)
    d = json.loads(out)
    assert d["R"] == pytest.approx(0.2) and d["T"] == pytest.approx(0.1)
    _, nat, _ = run(["bound", "new", "--channel", "bsc:0.1", "--rate", str(0.2 * math.log(2)),
                     "--threshold", str(0.1 * math.log(2))], capsys)
    assert d["e1_star"] == pytest.approx(json.loads(nat)["e1_star"] / math.log(2), abs=1e-12)
    assert d["s_opt"] == pytest.approx(json.loads(nat)["s_opt"], abs=1e-12)


def test_check_symmetry_files(tmp_path, capsys):
    f = tmp_path / "t.json"
    f.write_text(ternary().to_json())
    code, out, _ = run(["check", "symmetry", "--channel", str(f)], capsys)
    d = json.loads(out)
    assert code == 0 and d["is_symmetric"] and d["max_deviation"] <= 1e-12
    f.write_text(ternary(p0_b=0.31).to_json())
    code, out, _ = run(["check", "symmetry", "--channel", str(f)], capsys)
    d = json.loads(out)
    assert code == 0 and not d["is_symmetric"] and d["max_deviation"] > 1e-3


def test_bad_channel_file_exit_1(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"input_dist": [0.5, 0.5], "channel": [[0.5, 0.6], [0.1, 0.9]]}')
    code, _, err = run(["check", "symmetry", "--channel", str(f)], capsys)
    assert code == 1 and "row 0" in err
    f.write_text("not json")
    code, _, _ = run(["check", "symmetry", "--channel", str(f)], capsys)
    assert code == 1


def test_moments_verify(capsys):
    code, out, _ = run(["moments", "verify"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,R,s,delta,regime,predicted,oracle,abs_error"
    assert len(rows(out)) == 12


def test_oracle_types(capsys):
    code, out, _ = run(["oracle", "types", "--channel", "bsc:0.1", "--rates", "0.2", "--s-values", "0.2,0.5,0.8"],
                       capsys)
    assert code == 0
    assert out.splitlines()[0] == "R,s,s_R,lambda_closed,lambda_oracle,abs_error,on_boundary"
    assert [r["on_boundary"] for r in rows(out)] == ["true", "true", "false"]


def test_simulate_json_and_csv(capsys):
    argv = ["simulate", "--channel", "bsc:0.1", "--n", "20", "--rate", "0.1", "--threshold", "0.05",
            "--trials", "3000", "--seed", "4", "--codebooks", "4"]
    code, out, _ = run(argv, capsys)
    d = json.loads(out)
    assert code == 0
    assert set(d) == set(SimResult.__dataclass_fields__)
    assert d["count_e1"] == d["count_e2"] + d["count_erase"]
    code, out, _ = run(argv + ["--out", "csv"], capsys)
    (row,) = rows(out)
    assert int(row["count_e1"]) == d["count_e1"]


def test_outputs_byte_identical_with_manifest(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["bound", "sweep", "--channel", "bsc:0.1", "--rates", "0.05:0.3:4", "--thresholds", "0,0.05"]
    assert cli.main(base + ["--out", str(a)]) == 0
    assert cli.main(base + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    man = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert man["command_line"][1:] == base + ["--out", str(a)]
    assert {"config", "seeds", "tool_version", "wall_time_s"} <= set(man)
    j = tmp_path / "sim.json"
    assert cli.main(["simulate", "--channel", "bsc:0.1", "--n", "16", "--rate", "0.1", "--threshold", "0",
                     "--trials", "500", "--seed", "42", "--out", str(j)]) == 0
    assert json.loads((tmp_path / "sim.json.manifest.json").read_text())["seeds"] == [42]
    assert json.loads(j.read_text())["seed"] == 42


def test_parse_list():
    assert cli.parse_list("0:1:3") == [0.0, 0.5, 1.0]
    assert cli.parse_list("0.1, 0.2") == [0.1, 0.2]
    with pytest.raises(cli.UsageError):
        cli.parse_list("0:1:0")


def test_console_script_and_module():
    out = subprocess.run([sys.executable, "-m", "erasure_exponents", "bound", "new", "--channel", "bsc:0.1",
                          "--rate", "0.1", "--threshold", "0.05"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["e1_star"] == pytest.approx(0.0988340240211343, abs=1e-12)
    bad = subprocess.run(["erasure-exponents", "bound", "new", "--channel", "bsc:0.6", "--rate", "0.1",
                          "--threshold", "0"], capture_output=True, text=True)
    assert bad.returncode == 1
