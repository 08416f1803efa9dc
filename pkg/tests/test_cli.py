import json
from fractions import Fraction

import pytest

from cli_interface import Interface, dumps, load_coefficients, load_supports, to_jsonable
from errors import DuplicatePoint, SchemaError
from lattice_core import INFINITE, SupportSet
from main import main


def run(capsys, *argv, env=None):
    code = Interface(env={} if env is None else env).dispatch(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def cusp_files(tmp_path):
    paths = []
    for name, points in (("a1.json", [[0, 0, 0], [2, 0, 0], [0, 1, 0]]),
                         ("a2.json", [[0, 0, 0], [3, 0, 0], [0, 0, 1]])):
        path = tmp_path / name
        path.write_text(json.dumps({"dim": 3, "points": points}))
        paths.append(str(path))
    return paths


def test_delta_command(capsys):
    code, out = run(capsys, "delta", "--b1", "2", "--b2", "3")
    assert code == 0
    assert out == {"delta": 1, "j_sequence": [1], "milnor": 2}


def test_delta_with_coefficients_and_oracle(capsys, tmp_path):
    path = tmp_path / "coeffs.json"
    path.write_text(json.dumps({"f1": {"2": 1}, "f2": {"3": "1/2"}}))
    code, out = run(capsys, "delta", "--b1", "2", "--b2", "3", "--coeffs", str(path), "--oracle")
    assert code == 0
    assert out["nondegenerate"] is True
    assert out["oracle"] == 1


def test_delta_sampled_oracle(capsys):
    code, out = run(capsys, "--seed", "3", "delta", "--b1", "4,6", "--b2", "5", "--oracle")
    assert code == 0
    assert out["oracle"] == out["delta"]


def test_strata_command(capsys):
    code, out = run(capsys, "strata", "--b1", "0,1,2", "--b2", "0,1,2")
    assert code == 0
    assert [(r["name"], r["degree"]) for r in out] == [("T0", 3)]


def test_strata_cross_check(capsys):
    code, out = run(capsys, "strata", "--b1", "0,1,2", "--b2", "0,4", "--cross-check")
    assert code == 0
    assert {r["name"] for r in out} >= {"S_2", "T2", "S1"}
    rows = {r["name"]: r for r in out}
    assert (rows["S_2"]["source"], rows["S_2"]["closed_form_degree"]) == ("closed_form/m", [6, 1])
    assert (rows["S1"]["source"], rows["S1"]["closed_form_degree"]) == ("node_budget", [13, 1])
    assert rows["T2"]["source"] == "table"


def test_exceptional_case_is_an_input_error(capsys):
    code, out = run(capsys, "strata", "--b1", "0,1", "--b2", "0,1")
    assert code == 2
    assert out["error"] == "ExceptionalCase"
    assert out["context"] == {"case": "determinantal"}


def test_bad_arguments(capsys):
    code, out = run(capsys, "delta", "--b1", "2")
    assert code == 2
    assert out["error"] == "SchemaError"
    code, out = run(capsys, "delta", "--b1", "2", "--b2", "x,y")
    assert code == 2


def test_bad_environment(capsys):
    code, out = run(capsys, "delta", "--b1", "2", "--b2", "3", env={"TROPSING_JOBS": "0"})
    assert code == 2
    assert out["error"] == "SchemaError"


def test_project_and_newton(capsys, cusp_files):
    a1, a2 = cusp_files
    code, out = run(capsys, "project", "--a1", a1, "--a2", a2)
    assert code == 0
    assert out["total_delta"] == 1
    assert out["nodes"] == 0
    code, out = run(capsys, "newton", "--a1", a1, "--a2", a2)
    assert code == 0
    assert out["dim"] == 2
    assert len(out["vertices"]) == 3


def test_utrop_command(capsys, cusp_files):
    a1, a2 = cusp_files
    code, out = run(capsys, "utrop", "--a1", a1, "--a2", a2)
    assert code == 0
    assert out["assumptions"]["same_proj"] is True
    assert out["thsum_total"] == 1
    assert set(out["g_direct"]) == set(out["g_calibrated"]) == set(out["matrices"])
    assert out["g_convention"]["requested"] == "direct"
    assert out["g_convention"]["used"] == "calibrated"
    assert out["g_convention"]["flipped"] is True


def test_vdm_sweep_command(capsys):
    code, out = run(capsys, "vdm-sweep", "--k", "1", "--max-order", "6", "--max-exp", "5",
                    "--max-width", "3")
    assert code == 0
    assert out["counterexamples"] == []
    assert out["checked"] > 0


def test_report_wrapper(capsys):
    code, out = run(capsys, "--report", "delta", "--b1", "2", "--b2", "3")
    assert code == 0
    assert set(out) == {"command", "inputs", "outputs", "warnings", "seconds", "g_convention"}
    assert out["g_convention"] is None
    assert out["inputs"]["command"] == "delta"
    assert out["outputs"]["delta"] == 1


def test_report_collects_warnings(capsys):
    code, out = run(capsys, "--report", "strata", "--b1", "0,1,2", "--b2", "0,4")
    assert code == 0
    assert any("closed form" in w for w in out["warnings"])


def test_load_supports_inline_and_file(tmp_path):
    assert load_supports("0,2,3") == SupportSet.line([0, 2, 3])
    with pytest.raises(DuplicatePoint):
        load_supports("1,1")
    with pytest.raises(SchemaError):
        load_supports("a,b")
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({"dim": 2, "points": [[0, 1], [0, 1]]}))
    with pytest.raises(DuplicatePoint):
        load_supports(str(path))
    path = tmp_path / "broken.json"
    path.write_text("{")
    with pytest.raises(SchemaError):
        load_supports(str(path))


def test_load_coefficients(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"f1": {"2": [1, 3]}, "f2": {"3": 2, "5": "-1/4"}}))
    f1, f2 = load_coefficients(str(path))
    assert f1 == {2: Fraction(1, 3)}
    assert f2 == {3: 2, 5: Fraction(-1, 4)}
    with pytest.raises(SchemaError):
        load_coefficients(str(tmp_path / "missing.json"))


def test_to_jsonable():
    assert to_jsonable(Fraction(3, 4)) == [3, 4]
    assert to_jsonable(INFINITE) == "infinite"
    assert to_jsonable({1: (Fraction(2), None)}) == {"1": [[2, 1], None]}
    assert dumps({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'


def test_main_exit_codes(capsys):
    assert main(Interface(env={}), ["delta", "--b1", "2", "--b2", "3"]) == 0
    assert main(Interface(env={}), ["strata", "--b1", "0,1", "--b2", "0,1"]) == 2
    assert main(Interface(env={}), []) == 2
    capsys.readouterr()


@pytest.mark.slow
def test_selftest_command(capsys):
    code, out = run(capsys, "selftest")
    assert code == 0
    assert out["passed"] is True
    assert len(out["checks"]) == 8


def test_report_records_the_g_convention(capsys, tmp_path):
    paths = []
    for name, points in (("a1.json", [[0, 0, 0], [4, 0, 0], [0, 1, 0]]),
                         ("a2.json", [[0, 0, 0], [5, 0, 0], [6, 0, 0], [0, 0, 1]])):
        path = tmp_path / name
        path.write_text(json.dumps({"dim": 3, "points": points}))
        paths.append(str(path))
    code, out = run(capsys, "--report", "project", "--a1", paths[0], "--a2", paths[1])
    assert code == 0
    assert out["outputs"]["total_delta"] == 7
    assert out["g_convention"]["requested"] == "direct"
    assert out["g_convention"]["used"] == "calibrated"
    assert [r["convention"] for r in out["g_convention"]["rejected"]] == \
        ["direct", "closed_form"]
    code, out = run(capsys, "--report", "--g-convention", "calibrated", "project",
                    "--a1", paths[0], "--a2", paths[1])
    assert code == 0
    assert out["g_convention"]["flipped"] is False
    assert out["g_convention"]["rejected"] == []
