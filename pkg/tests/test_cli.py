import json
import subprocess
import sys

import pytest

from extsource.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_quartic_solve_json(capsys):
    code, out, _ = run(["quartic-solve", "--a", "10", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert next(iter(doc)) == "meta"
    assert doc["alpha"] == pytest.approx(-95.36, abs=0.01)
    assert doc["beta"] == pytest.approx(21.2, abs=0.05)
    assert doc["diagnostics"]["pass"]


def test_density_csv(tmp_path, capsys):
    path = tmp_path / "rho.csv"
    code, _, _ = run(["density", "--a", "10", "--grid", "400", "--out", str(path)], capsys)
    text = path.read_text()
    lines = text.split("\n")
    assert code == 0
    assert lines[0].startswith("# extsource")
    masses = json.loads(next(l for l in lines if l.startswith("# masses:"))[len("# masses: "):])
    assert masses == pytest.approx([0.5, 0.5], abs=1e-6)
    data = [l for l in lines if l and not l.startswith("#")]
    assert data[0] == "x,rho,cut" and len(data) == 801
    assert "\r" not in text


def test_verify_exit_codes(capsys):
    code, out, _ = run(["verify", "--a", "10", "--grid", "60"], capsys)
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(["verify", "--a", "0.1"], capsys)
    assert code == 1 and not json.loads(out)["pass"]


@pytest.mark.parametrize("argv", [["density", "--a", "10", "--bogus", "1"], ["mc", "--n", "7"],
                                  ["density"], ["nosuch"], ["density", "--a", "-1"],
                                  ["mc", "--format", "xml"]])
def test_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and "usage" in err


def test_mc_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"mc{k}.csv"
        assert main(["mc", "--n", "40", "--samples", "5", "--seed", "7", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert b"# seed: 7\n" in outs[0]


def test_gaussian_curve_and_report(capsys):
    code, out, _ = run(["gaussian-curve", "--a", "2", "--grid", "11", "--format", "csv"], capsys)
    assert code == 0 and "z_re,z_im" in out
    code, out, _ = run(["report", "--a", "3", "--field", "gaussian", "--grid", "60"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["verification"]["pass"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "extsource", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "extsource" in out.stdout
