"""Text formats for rulebases and scenarios."""

from __future__ import annotations

from pathlib import Path

from ..errors import DslError
from ..theory import Theory
from .ast import Document
from .compile import compile_document, compile_literal, to_theory
from .lexer import Diagnostic, Span
from .parser import SourceFile, parse
from .printer import format_literal, print_document

__all__ = [
    "Diagnostic", "Document", "SourceFile", "Span", "compile_document", "compile_literal",
    "format_literal",
    "load_source", "parse", "print_document", "read_source", "to_theory",
]


def read_source(path: str | Path, kind: str | None = None) -> SourceFile:
    p = Path(path)
    return SourceFile(str(p), p.read_text(encoding="utf-8"), kind)


def load_source(
    source: SourceFile,
    base: Theory | None = None,
    *,
    allow_scenario_rules: bool = False,
) -> Theory:
    """Parse and compile one file over ``base``.

    Syntax errors are reported before resolution errors; resolution is
    skipped when the file does not parse.
    """
    doc, diags = parse(source)
    if diags:
        raise DslError(diags)
    return to_theory(
        doc, base, path=source.path, kind=source.kind,
        allow_scenario_rules=allow_scenario_rules,
    )
