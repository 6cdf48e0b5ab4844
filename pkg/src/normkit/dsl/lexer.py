from __future__ import annotations

import re
from dataclasses import dataclass, field

KEYWORDS = frozenset(
    {
        "nk", "kind", "sort", "const", "var", "pred", "layer", "persistent",
        "backward_persistent", "cwa", "horizon", "expand", "fact", "rule",
        "default", "prio", "unless", "not", "combine", "neg", "false",
    }
)

PUNCT = {
    "->": "ARROW",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACK",
    "]": "RBRACK",
    ",": "COMMA",
    ";": "SEMI",
    ":": "COLON",
    "&": "AMP",
    "@": "AT",
    "+": "PLUS",
    "-": "MINUS",
    "/": "SLASH",
}


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    length: int = 1


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    span: Span
    message: str
    hint: str | None = None
    path: str = "<input>"

    @property
    def line(self) -> int:
        return self.span.line

    @property
    def column(self) -> int:
        return self.span.column

    def __str__(self) -> str:
        text = f"{self.path}:{self.span.line}:{self.span.column}: {self.severity}: {self.message}"
        if self.hint:
            text += f" (hint: {self.hint})"
        return text


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT, INT, EOF or a PUNCT name
    text: str
    span: Span = field(compare=False)

    def is_kw(self, word: str) -> bool:
        return self.kind == "IDENT" and self.text == word


_SCAN = re.compile(
    r"(?P<nl>\n)|(?P<ws>[ \t\r\f\v]+)|(?P<comment>#[^\n]*)"
    r"|(?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)|(?P<INT>[0-9]+)"
    r"|(?P<punct>->|[()\[\],;:&@+\-/])|(?P<bad>.)",
    re.DOTALL,
)


def tokenize(text: str, path: str = "<input>") -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    line, line_start = 1, 0
    last_span = Span(1, 1)
    for m in _SCAN.finditer(text):
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
            continue
        if kind in ("ws", "comment"):
            continue
        word = m.group()
        span = Span(line, m.start() - line_start + 1, len(word))
        if kind == "bad":
            diags.append(Diagnostic("error", span, f"unexpected character {word!r}", path=path))
            continue
        last_span = span
        tokens.append(Token(PUNCT[word] if kind == "punct" else kind, word, span))
    tokens.append(Token("EOF", "", last_span))
    return tokens, diags
