"""DIMACS CNF reading and canonical writing (3-literal clauses only)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ClauseCountMismatch,
    DimacsError,
    LiteralOutOfRange,
    MalformedHeader,
    MissingHeader,
    NonTernaryClause,
    UnterminatedClause,
)
from .formula import Formula


class InvalidToken(DimacsError):
    pass


@dataclass
class DimacsDocument:
    n_vars: int
    n_clauses_declared: int
    clauses: list = field(default_factory=list)
    comments: list = field(default_factory=list)

    def to_formula(self) -> Formula:
        return Formula(self.n_vars, self.clauses)


def _parse_header(tokens, lineno):
    if len(tokens) != 4 or tokens[0] != "p" or tokens[1] != "cnf":
        raise MalformedHeader(f"expected 'p cnf <vars> <clauses>', got {' '.join(tokens)!r}", lineno)
    try:
        n, m = int(tokens[2]), int(tokens[3])
    except ValueError:
        raise MalformedHeader(f"non-integer counts in header {' '.join(tokens)!r}", lineno) from None
    if n < 0 or m < 0:
        raise MalformedHeader("negative counts in header", lineno)
    return n, m


def parse_dimacs_document(text, strict: bool = True) -> DimacsDocument:
    """Parse DIMACS CNF text (str or bytes).

    Clauses may span lines; each ends at a ``0`` token.  In lenient mode a
    clause-count mismatch only warns, and a SATLIB-style ``%`` line ends
    the clause section.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii")
    doc = None
    comments = []
    current = []
    current_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line[0] == "c":
            comments.append(raw)
            continue
        if line[0] == "p":
            if doc is not None:
                raise MalformedHeader("second header line", lineno)
            n, m = _parse_header(line.split(), lineno)
            doc = DimacsDocument(n, m, comments=comments)
            continue
        if line[0] == "%" and not strict:
            break
        if doc is None:
            raise MissingHeader("clause data before the 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise InvalidToken(f"not an integer literal: {tok!r}", lineno) from None
            if lit == 0:
                if len(current) != 3:
                    raise NonTernaryClause(
                        f"clause has {len(current)} literals, expected 3", current_line if current else lineno
                    )
                doc.clauses.append(tuple(current))
                current = []
                continue
            if abs(lit) > doc.n_vars:
                raise LiteralOutOfRange(f"literal {lit} outside 1..{doc.n_vars}", lineno)
            if not current:
                current_line = lineno
            current.append(lit)
    if doc is None:
        raise MissingHeader("no 'p cnf' header found")
    if current:
        raise UnterminatedClause("last clause is missing its terminating 0", current_line)
    if len(doc.clauses) != doc.n_clauses_declared:
        msg = f"header declares {doc.n_clauses_declared} clauses, found {len(doc.clauses)}"
        if strict:
            raise ClauseCountMismatch(msg)
        warnings.warn(msg, stacklevel=2)
    return doc


def parse_dimacs(text, strict: bool = True) -> Formula:
    return parse_dimacs_document(text, strict).to_formula()


def read_dimacs(path, strict: bool = True) -> Formula:
    return parse_dimacs(Path(path).read_bytes(), strict)


def write_dimacs(f: Formula, comments=()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.n_vars} {f.n_clauses}")
    lines.extend(" ".join(str(lit) for lit in c) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def save_dimacs(f: Formula, path, comments=()):
    Path(path).write_text(write_dimacs(f, comments))
