import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusheight.cli import FanParseError, emit_fan, main, parse_fan
from torusheight.fan import trop_hypersurface, trop_monomial_curve

CURVE = """tropfan v1
ambient 2
dim 1
cone
ray 2 3
mult 1
cone   # opposite ray
ray -2 -3
mult 1
"""

LINE_EMIT = """tropfan v1
ambient 2
dim 1

cone
ray -1 -1
mult 1

cone
ray 0 1
mult 1

cone
ray 1 0
mult 1
"""


@pytest.fixture
def curve_file(tmp_path):
    p = tmp_path / "c.fan"
    p.write_text(CURVE)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def machine(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "machine")
    assert code == 0
    return json.loads(out)


def test_fan_emit_tropical_line(capsys):
    code, out, _ = run(capsys, "fan", "emit", "--hypersurface", "1,0;0,1;0,0")
    assert code == 0 and out == LINE_EMIT
    f = parse_fan(out)
    assert sorted(c.rays[0] for c, _ in f.cones) == [(-1, -1), (0, 1), (1, 0)]


def test_fan_check(capsys, curve_file):
    assert machine(capsys, "fan", "check", curve_file) == {
        "ambient": 2, "balanced": True, "cones": 2, "dim": 1, "spans": 1, "violations": [], "warnings": [],
    }
    code, out, _ = run(capsys, "fan", "check", curve_file)
    assert code == 0 and "balanced: true" in out


def test_fan_parse_errors(capsys, tmp_path):
    bad = CURVE.replace("mult 1\ncone   #", "mult 0\ncone   #")
    with pytest.raises(FanParseError) as e:
        parse_fan(bad)
    assert (e.value.line, e.value.column) == (6, 6)
    p = tmp_path / "bad.fan"
    p.write_text(bad)
    code, _, err = run(capsys, "fan", "check", str(p))
    assert code == 2
    assert err.strip() == "error: line 6, column 6: multiplicity must be positive, got 0"


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("tropfan v2\n", 1),
        ("tropfan v1\nambient 2\ndim 3\n", 3),
        ("tropfan v1\nambient 2\ndim 1\nray 1 0\n", 4),
        ("tropfan v1\nambient 2\ndim 1\ncone\nray 1\nmult 1\n", 5),
        ("tropfan v1\nambient 2\ndim 1\ncone\nray 1 x\nmult 1\n", 5),
        ("tropfan v1\nambient 2\ndim 1\ncone\nray 1 0\n", 4),
        ("tropfan v1\nambient 2\ndim 1\ncone\nray 1 0\nmult 1\nmult 2\n", 7),
    ],
)
def test_fan_parse_error_positions(text, line):
    with pytest.raises(FanParseError) as e:
        parse_fan(text)
    assert e.value.line == line


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=2, max_size=6, unique=True))
def test_fan_round_trip(support):
    f = trop_hypersurface(support)
    assert parse_fan(emit_fan(f)) == f.canonical()
    assert emit_fan(parse_fan(emit_fan(f))) == emit_fan(f)


def test_fan_emit_curve(capsys):
    code, out, _ = run(capsys, "fan", "emit", "--curve", "2,3")
    assert code == 0 and parse_fan(out) == trop_monomial_curve((2, 3)).canonical()


def test_degree(capsys, curve_file):
    code, out, _ = run(capsys, "degree", curve_file, "--phi", "2,0", "--format", "machine")
    assert code == 0
    assert out.strip() == (
        '{"degree":"4","dominant":true,"scale":1,"terms":[{"cone":1,"fiber_point":["4","6"],'
        '"index":4,"multiplicity":1}],"w":[8]}'
    )


def test_machine_output_is_deterministic(capsys, curve_file):
    argv = ("degree", curve_file, "--phi", "1,1", "--seed", "3", "--format", "machine")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
    argv = ("exp", "fourplanes", "--trials", "200", "--format", "machine")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_dx(capsys, curve_file):
    d = machine(capsys, "dx", "build", curve_file, "--s", "1")
    assert d["polynomial"] == "4*M11^2 + 12*M11*M12 + 9*M12^2" and d["spans"] == 1
    assert machine(capsys, "dx", "eval", curve_file, "--s", "1", "--phi", "1,0") == {"value": "4"}
    rep = machine(capsys, "dx", "supnorm", curve_file, "--s", "1", "--degX", "3")
    assert rep["supnorm"] == 12 and rep["holds"] is True
    assert run(capsys, "dx", "eval", curve_file, "--s", "1")[0] == 2


def test_regular(capsys):
    v = machine(capsys, "regular", "certify", "--phi", "1,0;0,1", "--eps", "1/2")
    assert v["verdict"] == "certified" and v["minor"] == [0, 1]
    v = machine(capsys, "regular", "falsify", "--phi", "1,1;1,1", "--eps", "1/10")
    assert v == {"distance": "0", "verdict": "falsified", "witness": [["1", "1"], ["1", "1"]]}
    assert run(capsys, "regular", "certify", "--phi", "1,0", "--eps", "0")[0] == 2


def test_approx(capsys):
    assert machine(capsys, "approx", "round", "--psi0", "1,1,1", "--Q", "7") == {
        "ok": True, "psi": [[7, 7, 7]], "regular": True,
    }
    rep = machine(capsys, "approx", "verify", "--psi0", "1,-1", "--Q", "5", "--psi", "5,-5", "--point", "2,2")
    assert rep["ok"] and rep["height_ok"] is True
    assert run(capsys, "approx", "round", "--psi0", "1,2;2,4", "--Q", "10")[0] == 2


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "mu", "--r", "1", "--s", "1", "--n", "2")
    assert code == 0 and out.strip() == "mu: 79"
    assert machine(capsys, "bounds", "de", "--deltas", "2,3", "--n", "2") == {"D": 3, "E": 96, "kappa": "2/3"}
    rep = machine(capsys, "bounds", "effbhc", "--n", "2", "--r", "1", "--s", "1", "--degX", "1", "--hX", "0")
    assert rep["C"] == 19660800
    sym = machine(capsys, "bounds", "effbhc", "--n", "2", "--r", "1", "--s", "1", "--degX", "d", "--hX", "h")
    assert "d" in sym["point_height"]["form"]
    assert run(capsys, "bounds", "mu", "--r", "1")[0] == 2


def test_heights(capsys):
    code, out, _ = run(capsys, "heights", "point", "3,4")
    assert code == 0 and out.splitlines()[0] == "height.exact: log(5)"
    assert machine(capsys, "heights", "matrix", "1,2;3,4", "--t", "1")["height"]["exact"] == "1/2*log(30)"
    assert machine(capsys, "heights", "subspace", "1,0,0;0,1,0")["height"]["exact"] == "0"
    assert machine(capsys, "heights", "subspace", "1,2,0")["height"]["exact"] == "1/2*log(5)"
    assert machine(capsys, "heights", "poly", "1,0:2;0,1:3")["height"]["exact"] == "1/2*log(13)"
    rep = machine(capsys, "heights", "algebraic", "1,0,-2", "--root", "1")
    assert rep["minimal"] and rep["minimal_poly"] == [1, 0, -2]
    assert rep["height"]["value"].startswith("0.34657359027997265470861606072908828403775006718")


def test_exp(capsys):
    rep = machine(capsys, "exp", "fourplanes", "--trials", "100")
    assert rep["summary"]["status"] == "PASS"
    code, out, _ = run(capsys, "exp", "fourplanes", "--trials", "100")
    assert "meets_V0 1: PASS" in out
    assert run(capsys, "exp", "line", "--line", "1,0,0,0,1,1", "--bmax", "1")[0] == 2
    rep = machine(capsys, "exp", "line", "--line", "1,0,0,0,1,1", "--bmax", "1", "--allow-degenerate")
    assert rep["max_height"] == "0.0" and rep["inputs"]["nondegenerate"] is False
    assert run(capsys, "exp", "line", "--line", "1,2,3")[0] == 2


def test_missing_file(capsys):
    code, _, err = run(capsys, "degree", "/nonexistent/x.fan", "--phi", "1,0")
    assert code == 2 and err.startswith("error:")


def test_machine_errors_are_json(capsys):
    code, out, _ = run(capsys, "bounds", "mu", "--format", "machine")
    assert code == 2 and "error" in json.loads(out)
