import json
import math
import subprocess
import sys

import pytest

from trilip import __version__
from trilip.cli import run

T345 = '{"edges": [3, 4, 5]}'
T6810 = '{"edges": [6, 8, 10]}'
ACUTE1 = json.dumps({"angles": [math.radians(80), math.radians(60), math.pi - math.radians(140)]})
ACUTE2 = json.dumps({"angles": [math.radians(70), math.radians(65), math.pi - math.radians(135)]})
OBTUSE = '{"edges": [2, 2, 3]}'


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dist_example(capsys):
    code, out, _ = call(capsys, "dist", T345, T6810)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["m"] == pytest.approx(math.log(2), abs=1e-15)
    assert doc["result"]["pivot"] is None
    assert doc["tool"] == "trilip" and doc["version"] == __version__
    assert doc["flags"]["area"] == 0.5 and doc["flags"]["seed"] == 0
    assert "tolerance" in doc["tolerances"]


def test_dist_pivot_and_lower_bound(capsys):
    code, out, _ = call(capsys, "dist", ACUTE1, ACUTE2)
    r = json.loads(out)["result"]
    assert code == 0
    assert (r["pivot"], r["case"]) == (1, "nested")
    assert r["L_lower"] == pytest.approx(r["m"], abs=1e-12)


def test_dist_obtuse_source_reports_gap(capsys):
    code, out, _ = call(capsys, "dist", OBTUSE, T345)
    assert code == 0
    assert "gap_proven" in json.loads(out)["result"]


def test_tolerance_is_recorded(capsys):
    _, out, _ = call(capsys, "dist", T345, T6810, "--tolerance", "1e-7")
    assert json.loads(out)["tolerances"]["tolerance"] == 1e-7


def test_dist_from_stdin(capsys, monkeypatch):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO(f"[{T345}, {T6810}]"))
    code, out, _ = call(capsys, "dist")
    assert code == 0 and json.loads(out)["result"]["m"] == pytest.approx(math.log(2))


def test_dist_from_file(capsys, tmp_path):
    f = tmp_path / "pair.json"
    f.write_text(f"[{T345}, {T6810}]")
    code, out, _ = call(capsys, "dist", f"@{f}")
    assert code == 0 and json.loads(out)["result"]["m"] == pytest.approx(math.log(2))


@pytest.mark.parametrize("bad", ['{"edges": [1, 1, 3]}', "{not json", '{"angles": [1, 1, 1]}'])
def test_invalid_input_exit_2(capsys, bad):
    code, out, err = call(capsys, "dist", bad, T345)
    assert code == 2 and out == "" and "invalid input" in err


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, _ = call(capsys, "dist", f"@{tmp_path / 'nope.json'}", T345)
    assert code == 2


def test_obtuse_map_exit_3(capsys):
    code, _, err = call(capsys, "map", OBTUSE, ACUTE1)
    assert code == 3 and "precondition" in err


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["dist", "--bogus"])
    assert exc.value.code == 2


def test_map_json(capsys):
    code, out, _ = call(capsys, "map", ACUTE1, ACUTE2)
    r = json.loads(out)["result"]
    assert code == 0 and r["valid"]
    assert r["constant"] == pytest.approx(r["exp_m"], rel=1e-9)
    assert {"cell", "linear", "offset"} <= set(r["pieces"][0])


def test_map_csv_and_svg(capsys):
    _, out, _ = call(capsys, "map", ACUTE1, ACUTE2, "--format", "csv")
    assert out.splitlines()[0].startswith("piece,x1,y1")
    _, out, _ = call(capsys, "map", ACUTE1, ACUTE2, "--format", "svg")
    assert out.startswith("<svg") and out.rstrip().endswith("</svg>")


def test_geodesic_csv(capsys):
    code, out, _ = call(capsys, "geodesic", ACUTE1, ACUTE2, "--format", "csv", "--samples", "20")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "t,theta1,theta2,theta3,a1,a2,a3"
    assert len(rows) == 21
    _, out, _ = call(capsys, "geodesic", ACUTE1, ACUTE2, "--samples", "20")
    r = json.loads(out)["result"]
    assert r["defect"] <= 1e-9 and r["monotone"] and r["geodesic"]


def test_flength_with_waypoint(capsys):
    mid = json.dumps({"angles": [1.0, 1.3, math.pi - 2.3]})
    _, out, _ = call(capsys, "flength", ACUTE1, mid, ACUTE2, "--samples", "2000")
    r = json.loads(out)["result"]
    assert r["waypoints"] == 1 and r["excess"] >= -1e-6
    _, out, _ = call(capsys, "flength", ACUTE1, ACUTE2, "--format", "csv", "--samples", "100")
    assert out.splitlines()[0] == "t,F"


def test_boundary(capsys):
    _, out, _ = call(capsys, "boundary", "--samples", "500")
    r = json.loads(out)["result"]
    assert r["isometry"]["ok"] and r["isometry"]["kind"] == "consistency check"
    assert r["ipairs"][-1]["m"] == pytest.approx(0.5 * math.log(2), abs=1e-15)
    _, out, _ = call(capsys, "boundary", "--format", "csv")
    assert out.splitlines()[0] == "a,m,m_direct" and len(out.splitlines()) == 11


def test_oracle(capsys):
    _, out, _ = call(capsys, "oracle", ACUTE1, ACUTE2, "--samples", "1000", "--grid", "4")
    r = json.loads(out)["result"]
    assert r["sampled"] <= r["certified"] + 1e-12
    assert r["generator"] == "numpy.random.PCG64"


def test_figures(capsys, tmp_path):
    code, out, _ = call(capsys, "figure", "angle-model")
    assert code == 0 and out.startswith("<svg") and "B1" in out
    path = tmp_path / "gap.svg"
    code, out, _ = call(capsys, "figure", "obtuse-gap", "--out", str(path))
    assert code == 0 and out == "" and path.read_text().startswith("<svg")
    _, out, _ = call(capsys, "figure", "obtuse-gap", "--format", "json")
    assert json.loads(out)["result"]["gap_proven"] is True


def test_byte_identical_runs(capsys):
    outs = [call(capsys, "oracle", ACUTE1, ACUTE2, "--samples", "500", "--grid", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [call(capsys, "boundary", "--samples", "200", "--seed", "4")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "trilip", "dist", T345, T6810],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0
    assert json.loads(p.stdout)["result"]["m"] == pytest.approx(math.log(2))
