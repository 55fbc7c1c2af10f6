import json
import subprocess
import sys

import pytest

from perfectforms.cli import EXIT_FAIL, EXIT_OK, EXIT_TRUNCATED, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_seed_d5(capsys):
    code, out, _ = run(["seed", "--d", "5"], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["seed"]["alpha"] == ["3/5", "-1/5"]
    assert data["seed"]["alpha_sqrt_coords"] == ["1/2", "-1/10"]
    assert data["trace_form_minimum"] == "1/1"
    assert data["form"]["n"] == 2


def test_seed_bad_d(capsys):
    code, _, err = run(["seed", "--d", "12"], capsys)
    assert code == EXIT_USAGE and "square-free" in err


def test_perfect_check_d5(capsys):
    code, out, err = run(["perfect-check", "--d", "5"], capsys)
    assert code == EXIT_OK
    assert err.strip() == "perfect: true, rank 6/6"
    assert json.loads(out)["is_perfect"] is True


def test_minvec_a2_file(tmp_path, capsys):
    p = tmp_path / "a2.json"
    p.write_text(json.dumps({"gram": [["1", "1/2"], ["1/2", "1"]]}))
    code, out, err = run(["minvec", "--input", str(p)], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["minimum"] == "1/1" and data["num_min_vectors"] == 3
    assert sorted(map(tuple, data["vectors"])) == [(0, 1), (1, -1), (1, 0)]
    assert "3 vector pairs" in err


def test_minvec_form_roundtrip(tmp_path, capsys):
    code, out, _ = run(["seed", "--d", "13"], capsys)
    p = tmp_path / "f.json"
    form = json.loads(out)["form"]
    p.write_text(json.dumps(form))
    code, out, _ = run(["perfect-check", "--input", str(p)], capsys)
    assert code == EXIT_OK and json.loads(out)["summary"] == "perfect: true, rank 6/6"


@pytest.mark.parametrize("argv, summary", [
    (["enumerate", "--d", "5"], "D=5 N_D=2 classes"),
    (["enumerate", "--d", "6"], "D=24 N_D=22 classes"),
    (["enumerate", "--rational", "--n", "2"], "N=1 classes"),
])
def test_enumerate_summaries(argv, summary, capsys):
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK and out.strip() == summary


def test_enumerate_files(tmp_path, capsys):
    code, _, _ = run(["enumerate", "--d", "5", "--output", str(tmp_path), "--galois"], capsys)
    assert code == EXIT_OK
    classes = json.loads((tmp_path / "classes_D5_n2.json").read_text())
    adj = json.loads((tmp_path / "adjacency_D5_n2.json").read_text())
    assert classes["N_D"] == 2 and len(classes["classes"]) == 2
    assert all("galois_partner" in c for c in classes["classes"])
    assert adj["adjacency"] == classes["adjacency"]


def test_enumerate_truncated(tmp_path, capsys):
    code, out, _ = run(["enumerate", "--d", "13", "--max-classes", "3",
                        "--output", str(tmp_path)], capsys)
    assert code == EXIT_TRUNCATED and out.startswith("TRUNCATED")
    data = json.loads((tmp_path / "classes_D13_n2.json").read_text())
    assert data["truncated"] is True


def test_table_small(tmp_path, capsys):
    csv_path = tmp_path / "t.csv"
    plot = tmp_path / "p.dat"
    code, _, _ = run(["table", "--d", "5,2,3,13", "--output", str(csv_path),
                      "--plot-data", str(plot)], capsys)
    assert code == EXIT_OK
    assert csv_path.read_text() == "D,N_D\n5,2\n8,2\n12,3\n13,9\n"
    assert plot.read_text() == "# D N_D\n5 2\n8 2\n12 3\n13 9\n"


def test_table_single(capsys):
    code, out, _ = run(["table", "--d", "17"], capsys)
    assert code == EXIT_OK and out == "D,N_D\n17,34\n"


def test_table_empty_range(capsys):
    code, out, _ = run(["table", "--d-min", "9", "--d-max", "9"], capsys)
    assert code == EXIT_OK and out == "D,N_D\n"


def test_verify_match(tmp_path, capsys):
    ref = tmp_path / "ref.csv"
    ref.write_text("D,h_D,N_D\n5,1,2\n8,1,2\n")
    comp = tmp_path / "c.csv"
    comp.write_text("D,N_D\n5,2\n8,2\n")
    code, out, _ = run(["verify", "--reference", str(ref), "--computed", str(comp)], capsys)
    assert code == EXIT_OK and out.strip().endswith("2/2 match")


def test_verify_mismatch(tmp_path, capsys):
    ref = tmp_path / "ref.csv"
    ref.write_text("D,N_D\n5,2\n")
    comp = tmp_path / "c.csv"
    comp.write_text("D,N_D\n5,3\n")
    code, out, _ = run(["verify", "--reference", str(ref), "--computed", str(comp)], capsys)
    assert code == EXIT_FAIL and "MISMATCH" in out and "0/1 match" in out


def test_verify_recomputes_shipped_rows(capsys):
    code, out, _ = run(["verify", "--max-D", "13"], capsys)
    assert code == EXIT_OK and out.strip().endswith("4/4 match")


def test_verify_malformed_reference(tmp_path, capsys):
    ref = tmp_path / "ref.csv"
    ref.write_text("foo,bar\n1,2\n")
    code, _, _ = run(["verify", "--reference", str(ref), "--computed", str(ref)], capsys)
    assert code == EXIT_USAGE
    ref.write_text("D,N_D\n5,two\n")
    code, _, _ = run(["verify", "--reference", str(ref), "--computed", str(ref)], capsys)
    assert code == EXIT_USAGE


def test_shipped_table_complete():
    from perfectforms.cli import read_table_csv, reference_table_text
    table = read_table_csv(reference_table_text())
    assert len(table) == 40
    assert table[5] == 2 and table[57] == 515 and table[264] is not None


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "perfectforms", "perfect-check", "--rational"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stderr.strip() == "perfect: true, rank 3/3"
