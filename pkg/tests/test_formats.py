import os

import pytest

from expfield import corpus
from expfield.formats import KINDS, format_value, parse_inputs, parse_text
from expfield.poly import ParseError

SAMPLES = os.path.join(os.path.dirname(__file__), "..", "samples")


def corpus_items():
    for name, V in corpus.gvarieties():
        yield ".gv", name, V
    for name, W in corpus.mult_varieties():
        yield ".mv", name, W
    for name, F in corpus.presentations():
        yield ".ef", name, F
    for name, S in corpus.khovanskii_systems():
        yield ".ks", name, S


@pytest.mark.parametrize("kind,name,value", list(corpus_items()), ids=lambda x: x if isinstance(x, str) else "")
def test_print_parse_fixpoint(kind, name, value):
    text = format_value(value, kind)
    again = parse_text(text, kind, name + kind)
    assert format_value(again, kind) == text


def test_sample_files_are_canonical():
    files = sorted(os.listdir(SAMPLES))
    assert files
    for f in files:
        kind = os.path.splitext(f)[1]
        assert kind in KINDS
        path = os.path.join(SAMPLES, f)
        with open(path) as fh:
            assert format_value(parse_inputs(path), kind) == fh.read(), f


def test_mv_generator_accepted():
    W = parse_text("n: 2\ny1^2 - y2\n", ".mv")
    assert W.dim == 1


def test_comments_and_eq_prefix():
    V = parse_text("# a line\nn: 1\neq: x1 - 1  # trailing\ny1 - 2\n", ".gv")
    assert V.dim == 0


@pytest.mark.parametrize("text,kind,where", [
    ("n: 1\nx1 * * y1\n", ".gv", (2, 6)),
    ("width: 1\nf: exp(exp(X1))\n", ".ks", (2, 8)),
    ("n: 1\nfoo: 3\n", ".gv", (2, 1)),
    ("gens: a\nexp: a 2\n", ".ef", (2, 6)),
    ("width: 2\nf: X1\n", ".ks", (1, 1)),
    ("x1\n", ".gv", (1, 1)),
])
def test_located_errors(text, kind, where):
    with pytest.raises(ParseError) as e:
        parse_text(text, kind, "input" + kind)
    assert (e.value.line, e.value.col) == where
    assert str(e.value).startswith(f"input{kind}:{where[0]}:{where[1]}:")


def test_iterated_exp_message():
    with pytest.raises(ParseError, match="iterated exponentials"):
        parse_text("width: 1\nf: exp(exp(X1))\n", ".ks")


def test_unknown_kind():
    with pytest.raises(ValueError):
        parse_text("", ".txt")


def test_ef_kernel_index_range():
    with pytest.raises(ParseError):
        parse_text("gens: k\ndspan: k\nexp: k -> 1\nkernel: 2\n", ".ef")
