import io
import json
import os
import subprocess
import sys

import pytest

from koszulkit.cli import InputError, parse_presentation, parse_presentation_text, run
from koszulkit.presets import yang_mills

FIXTURE = os.path.join(os.path.dirname(__file__), "fixtures", "ym4.json")


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text) if text else None


def test_dims_example():
    code, rep = call_json("dims", "--preset", "ym", "--metric", "euclid4", "--cutoff", "5", "--format", "json")
    assert code == 0
    assert rep["results"]["dims"] == [1, 4, 16, 60, 225, 840]
    assert sorted(rep) == ["certificates", "input", "meta", "results"]


def test_lie_dims_example():
    code, rep = call_json("lie-dims", "--preset", "ym", "--metric", "euclid4", "--jmax", "10")
    assert code == 0
    assert rep["results"]["lie_dims"] == [4, 6, 16, 45, 144, 440, 1440, 4680, 15600, 52344]
    assert rep["results"]["closed_form_agrees"] is True


def test_gorenstein_sd_exit_1():
    code, rep = call_json("gorenstein", "--preset", "sd+", "--cutoff", "8")
    assert code == 1
    (cert,) = rep["certificates"]
    assert cert["kind"] == "gorenstein" and cert["verdict"] == "fail"
    assert cert["witness"]


def test_koszul_exit_0():
    code, rep = call_json("koszul", "--preset", "sd-", "--cutoff", "5")
    assert code == 0
    assert rep["certificates"][0]["details"]["global_dimension"] == 2


def test_fixture_round_trip():
    p = parse_presentation(FIXTURE)
    ym = yang_mills()
    assert p.relators == ym.relators
    assert p.fingerprint() == ym.fingerprint()
    code, rep = call_json("dims", "--input", FIXTURE, "--cutoff", "4")
    assert code == 0 and rep["results"]["dims"] == [1, 4, 16, 60, 225]


def _doc(relators, degree=3, gens=("a", "b")):
    return json.dumps({"generators": list(gens), "degree": degree, "relators": relators}, indent=2)


def test_degree_mismatch_has_line(tmp_path):
    text = _doc([[{"word": [0, 1, 1], "coeff": "1"}, {"word": [1, 0], "coeff": "-1"}]])
    f = tmp_path / "bad.json"
    f.write_text(text)
    with pytest.raises(InputError) as err:
        parse_presentation_text(text, "bad.json")
    assert str(err.value).startswith("bad.json:")
    assert "length 2" in str(err.value)
    # the diagnostic points at the offending term, past the first one
    reported = int(str(err.value).split(":")[1])
    assert reported > 1
    code, _ = call("dims", "--input", str(f))
    assert code == 2


def test_degree_mismatch_exact_line(tmp_path):
    text = '{"generators": ["a", "b"], "degree": 3, "relators": [[\n{"word": [0, 1, 1], "coeff": "1"},\n{"word": [1, 0], "coeff": "2"}\n]]}'
    with pytest.raises(InputError, match=r"^x\.json:3: relator 0 term 1"):
        parse_presentation_text(text, "x.json")


def test_empty_relators_free(tmp_path):
    f = tmp_path / "free.json"
    f.write_text(_doc([], degree=2, gens=("a", "b", "c")))
    code, rep = call_json("dims", "--input", str(f), "--cutoff", "5")
    assert code == 0
    assert rep["results"]["dims"] == [3**n for n in range(6)]


@pytest.mark.parametrize("argv", [
    ["dims"],
    ["dims", "--preset", "nope"],
    ["dims", "--preset", "ym", "--input", "x.json"],
    ["dims", "--input", "/nonexistent/file.json"],
    ["dims", "--preset", "ym", "--metric", "diag:1,0,1,1"],
    ["dims", "--preset", "ym", "--cutoff", "40"],
    ["frobnicate", "--preset", "ym"],
    ["repcheck", "--preset", "sd+"],
])
def test_input_errors_exit_2(argv):
    code, _ = call(*argv)
    assert code == 2


def test_invalid_json_file(tmp_path):
    f = tmp_path / "broken.json"
    f.write_text('{"generators": ["a"],\n "degree": 2,,}')
    code, _ = call("dims", "--input", str(f))
    assert code == 2


def test_byte_identical():
    argv = ("series", "--preset", "sd+", "--cutoff", "6", "--seed", "3")
    outs = {call(*argv)[1] for _ in range(3)}
    assert len(outs) == 1
    # a fresh interpreter gives the same bytes too
    proc = subprocess.run([sys.executable, "-m", "koszulkit.cli", *argv], capture_output=True, text=True)
    assert proc.stdout in outs


def test_timing_only_on_request():
    _, rep = call_json("dims", "--preset", "heisenberg", "--cutoff", "4")
    assert "seconds" not in rep["meta"]
    _, rep = call_json("dims", "--preset", "heisenberg", "--cutoff", "4", "--timing")
    assert rep["meta"]["seconds"] >= 0


def test_big_ints_are_strings():
    _, rep = call_json("lie-dims", "--preset", "ym", "--jmax", "40")
    lie = rep["results"]["lie_dims"]
    assert all(isinstance(x, int) for x in lie[:25])
    assert isinstance(lie[-1], str) and int(lie[-1]) > 2**53


@pytest.mark.parametrize("name, cutoff", [("sd+", 4), ("heisenberg", 5), ("poly:2", 5)])
def test_report_is_conjunction(name, cutoff):
    code, rep = call_json("report", "--preset", name, "--cutoff", str(cutoff))
    singles = []
    for verb in ("koszul", "gorenstein", "euler", "dnzero"):
        c, _ = call(verb, "--preset", name, "--cutoff", str(cutoff))
        singles.append(c)
    assert code == (1 if any(singles) else 0)
    assert all(c in (0, 1) for c in singles)
    verdicts = [c["verdict"] for c in rep["certificates"]]
    assert (code == 0) == all(v == "pass" for v in verdicts)


def test_dualcheck_and_repcheck(tmp_path):
    code, rep = call_json("dualcheck", "--preset", "ym", "--metric", "diag:2,1,-1,3")
    assert code == 0 and rep["results"]["dual_relation_check"] is True
    # commuting 1x1 matrices represent the polynomial algebra, not the free one
    f = tmp_path / "rep.json"
    f.write_text(json.dumps({"matrices": [[["2"]], [["3"]]]}))
    assert call("repcheck", "--preset", "poly:2", "--rep", str(f))[0] == 0
    g = tmp_path / "rep2.json"
    g.write_text(json.dumps({"matrices": [[["0", "1"], ["0", "0"]], [["0", "0"], ["1", "0"]]]}))
    code, rep = call_json("repcheck", "--preset", "poly:2", "--rep", str(g))
    assert code == 1 and rep["results"]["representation"] is False


def test_csv_and_text():
    code, text = call("dims", "--preset", "heisenberg", "--cutoff", "3", "--format", "csv")
    assert code == 0
    assert text.splitlines() == ["n,dims", "0,1", "1,2", "2,4", "3,6"]
    code, text = call("koszul", "--preset", "heisenberg", "--cutoff", "4", "--format", "text")
    assert code == 0
    assert "koszul: pass, verified through degree 4" in text


def test_entry_point():
    proc = subprocess.run([sys.executable, "-m", "koszulkit.cli", "dual-dims", "--preset", "ym",
                           "--cutoff", "6"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["dual_dims"] == [1, 4, 16, 4, 1, 0, 0]
