import io
import json
import os
import subprocess
import sys

import jsonschema
import pytest

from expfield import __version__
from expfield.cli import run

ROOT = os.path.join(os.path.dirname(__file__), "..")
SAMPLES = os.path.join(ROOT, "samples")
with open(os.path.join(ROOT, "docs", "report.schema.json")) as fh:
    SCHEMA = json.load(fh)


def s(name):
    return os.path.join(SAMPLES, name)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, _ = call(*argv, "--json")
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert rep["exit_code"] == code
    return code, rep


COMMANDS = [
    ("rotund", "--depth", "2", s("point-0-1.gv")),
    ("rotund", "--depth", "2", s("G2.gv")),
    ("free", "--height", "1", s("diagonal.gv")),
    ("act", "--matrix", "1,-1", s("diagonal.gv")),
    ("atypical", "--depth", "2", s("point24.mv")),
    ("depth", "--rows", "2,-1"),
    ("predim", s("counterexample.ef"), "--tuple", "t,r*t,r^2*t"),
    ("strong", s("counterexample.ef"), "--probe", "t,r*t,r^2*t"),
    ("semistrong", s("two-four.ef"), "--sub", s("two-four.ef"), "--probe", "a"),
    ("ela-step", s("independent.ef"), "--exp", "b"),
    ("kernel-extend", s("kernel-line.ef"), "--new", "k^2", "--residues", "2=1"),
    ("khovanskii", "derive", s("coupled.ks"), "--equation", "2", "--index", "1"),
    ("khovanskii", "jacobian", s("diagonal.ks")),
    ("khovanskii", "verify", s("fixed-point.ks"), "--field", s("fixed-point.ef"), "--point", "a"),
    ("axiom", "strong-kernel-instance", s("point-1-2.gv")),
    ("axiom", "seac-instance", s("shifted-graphs.gv"), "--r", "1", "--irreducible"),
    ("axiom", "check-eac", s("shifted-graphs.gv"), "--field", s("fixed-point.ef"), "--point", "a,a"),
    ("reduce", "--seed", "3", s("three-fold.gv")),
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(os.path.basename(x) for x in a))
def test_reports_validate_and_are_deterministic(argv):
    code, rep = report(*argv)
    assert rep["version"] == __version__ and rep["tool"] == "expfield"
    assert code in (0, 1)
    again = call(*argv, "--json")[1]
    assert again == call(*argv, "--json")[1]
    text_a, text_b = call(*argv)[1], call(*argv)[1]
    assert text_a == text_b


def test_rotund_point_reports_witness_with_exit_zero():
    code, rep = report("rotund", "--depth", "2", s("point-0-1.gv"))
    assert code == 0
    assert rep["result"]["status"] == "not-rotund" and rep["result"]["witness"] == [[1]]


def test_atypical_verdict():
    code, rep = report("atypical", "--depth", "2", s("point24.mv"))
    assert code == 0 and rep["result"]["verdict"] == "witnesses-found"


def test_inputs_are_digested():
    _, rep = report("rotund", s("G2.gv"))
    (path, digest), = rep["inputs"].items()
    assert path.endswith("G2.gv") and len(digest) == 64
    assert rep["bounds"]["depth"] == 2


def test_counterexample_values():
    _, rep = report("predim", s("counterexample.ef"), "--tuple", "t,r*t,r^2*t")
    assert rep["result"]["delta"] == -1 and rep["result"]["Delta"] == 0


def test_witness_invalid_exits_one():
    code, rep = report("axiom", "check-eac", s("shifted-graphs.gv"), "--field", s("two-four.ef"),
                       "--point", "a,a")
    assert code == 1 and rep["result"]["verdict"] == "witness-invalid"


def test_parse_error_exits_two_with_location(tmp_path):
    bad = tmp_path / "bad.gv"
    bad.write_text("n: 1\nx1 * * y1\n")
    code, out, err = call("rotund", str(bad))
    assert code == 2 and out == ""
    assert err.strip().endswith("bad.gv:2:6: unexpected '*'")
    code, rep = report("rotund", str(bad))
    assert rep["error"]["line"] == 2 and rep["error"]["col"] == 6


def test_wrong_extension_is_input_error():
    code, _ = report("rotund", s("point24.mv"))
    assert code == 2


def test_nonpositive_bound_rejected():
    code, rep = report("rotund", "--depth", "0", s("G2.gv"))
    assert code == 2 and "depth" in rep["error"]["message"]


def test_budget_exceeded_exits_three():
    code, rep = report("rotund", "--budget-degree", "1", s("square-and-sum.gv"))
    assert code == 3 and rep["status"] == "budget-exceeded"
    assert "max_degree" in rep["error"]["stats"]


def test_reduce_requires_seed():
    code, _, _ = call("reduce", s("three-fold.gv"))
    assert code == 2


def test_console_script_matches_run():
    out = subprocess.run([sys.executable, "-m", "expfield.cli", "depth", "--rows", "2,-1", "--json"],
                         capture_output=True, text=True, check=False)
    assert out.returncode == 0
    assert out.stdout == call("depth", "--rows", "2,-1", "--json")[1]
