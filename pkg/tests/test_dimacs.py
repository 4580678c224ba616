import warnings

import pytest

from docsat.dimacs import InvalidToken, parse_dimacs, parse_dimacs_document, read_dimacs, save_dimacs, write_dimacs
from docsat.errors import (
    ClauseCountMismatch,
    DimacsError,
    LiteralOutOfRange,
    MalformedHeader,
    MissingHeader,
    NonTernaryClause,
    UnterminatedClause,
)
from docsat.formula import Formula
from docsat.generate import GenConfig, generate

F1_TEXT = "p cnf 3 3\n1 2 3 0\n-1 -2 3 0\n1 -2 -3 0\n"

MALFORMED = [
    ("1 2 3 0\n", MissingHeader),
    ("", MissingHeader),
    ("c only a comment\n", MissingHeader),
    ("p cnf 3\n1 2 3 0\n", MalformedHeader),
    ("p sat 3 1\n1 2 3 0\n", MalformedHeader),
    ("p cnf x 1\n1 2 3 0\n", MalformedHeader),
    ("p cnf -3 1\n1 2 3 0\n", MalformedHeader),
    ("p cnf 3 1\np cnf 3 1\n1 2 3 0\n", MalformedHeader),
    ("p cnf 2 1\n1 2 3 0\n", LiteralOutOfRange),
    ("p cnf 3 1\n1 2 3\n", UnterminatedClause),
    ("p cnf 3 2\n1 2 3 0\n", ClauseCountMismatch),
    ("p cnf 3 0\n1 2 3 0\n", ClauseCountMismatch),
    ("p cnf 3 1\n1 2 0\n", NonTernaryClause),
    ("p cnf 4 1\n1 2 3 4 0\n", NonTernaryClause),
    ("p cnf 3 1\n0\n", NonTernaryClause),
    ("p cnf 3 1\n1 2 x 0\n", InvalidToken),
]


def test_parse_f1(f1):
    assert parse_dimacs(F1_TEXT) == f1
    assert parse_dimacs(F1_TEXT.encode()) == f1


def test_comment_and_empty():
    f = parse_dimacs("c comment\np cnf 1 0\n")
    assert f.n_vars == 1 and f.n_clauses == 0
    assert write_dimacs(Formula(1, [])) == "p cnf 1 0\n"


def test_write_f1_exact(f1):
    assert write_dimacs(f1) == F1_TEXT


def test_multiline_clause_and_comments():
    doc = parse_dimacs_document("c first\np cnf 3 1\nc mid\n1\n 2 3\n0\n")
    assert doc.clauses == [(1, 2, 3)]
    assert doc.comments == ["c first", "c mid"]


@pytest.mark.parametrize("text, exc", MALFORMED)
def test_malformed_corpus(text, exc):
    with pytest.raises(exc) as info:
        parse_dimacs(text)
    assert isinstance(info.value, DimacsError)


def test_error_reports_line():
    with pytest.raises(LiteralOutOfRange, match="line 3"):
        parse_dimacs("p cnf 3 2\n1 2 3 0\n1 2 4 0\n")


def test_lenient_mode():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        f = parse_dimacs("p cnf 3 2\n1 2 3 0\n", strict=False)
    assert f.n_clauses == 1 and w
    f = parse_dimacs("p cnf 3 1\n1 2 3 0\n%\n0\n", strict=False)
    assert f.n_clauses == 1


def test_roundtrip_generated(tmp_path):
    for seed in range(40):
        f = generate(GenConfig(30 + seed, 4.27, seed=seed))
        assert parse_dimacs(write_dimacs(f)) == f
        text = write_dimacs(f)
        assert write_dimacs(parse_dimacs(text)) == text
    path = tmp_path / "x.cnf"
    save_dimacs(f, path, comments=("hello",))
    assert read_dimacs(path) == f
    assert path.read_text().startswith("c hello\np cnf")
