"""Recursive-descent parser with statement-level error recovery.

Every syntax error becomes a :class:`Diagnostic`; after an error the
parser skips to the next ``;`` and carries on, so independent mistakes
are all reported in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    CombineNode, ConstDecl, CwaDecl, DefaultStmt, Document, ExpandStmt, FactStmt,
    Header, HorizonDecl, KindDecl, LiteralNode, NameRef, NegNode, PersistentDecl,
    PredDecl, RuleStmt, SortDecl, StateNode, TermNode, VarDecl,
)
from .lexer import KEYWORDS, Diagnostic, Span, Token, tokenize

MAX_NESTING = 64
FORMAT_VERSION = 1


@dataclass(frozen=True)
class SourceFile:
    path: str
    text: str
    kind: str | None = None


class _Failure(Exception):
    def __init__(self, span: Span, message: str, hint: str | None = None):
        super().__init__(message)
        self.span = span
        self.message = message
        self.hint = hint


class _Parser:
    def __init__(self, tokens: list[Token], path: str):
        self.toks = tokens
        self.pos = 0
        self.path = path
        self.diags: list[Diagnostic] = []

    # -- token helpers -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> Token:
        t = self.tok
        if t.kind != kind:
            found = "end of input" if t.kind == "EOF" else repr(t.text)
            raise _Failure(t.span, f"expected {what}, found {found}")
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        t = self.tok
        if not t.is_kw(word):
            found = "end of input" if t.kind == "EOF" else repr(t.text)
            raise _Failure(t.span, f"expected '{word}', found {found}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        t = self.expect("IDENT", what)
        if t.text in KEYWORDS:
            raise _Failure(t.span, f"expected {what}, found keyword '{t.text}'")
        return t

    def integer(self, what: str = "integer") -> int:
        return int(self.expect("INT", what).text)

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            return self.advance()
        return None

    def recover(self) -> None:
        while self.tok.kind not in ("SEMI", "EOF"):
            self.advance()
        self.accept("SEMI")

    # -- grammar ----------------------------------------------------------

    def document(self) -> Document:
        header = kind = None
        decls, facts, rules = [], [], []
        first_stmt: Token | None = None
        while self.tok.kind != "EOF":
            start = self.tok
            if first_stmt is None:
                first_stmt = start
            try:
                stmt = self.statement()
            except _Failure as f:
                self.diags.append(Diagnostic("error", f.span, f.message, f.hint, self.path))
                self.recover()
                continue
            if isinstance(stmt, Header):
                if header is not None:
                    self.error(start.span, "duplicate format header")
                header = stmt
            elif isinstance(stmt, KindDecl):
                if kind is not None:
                    self.error(start.span, "duplicate kind declaration")
                kind = stmt
            elif isinstance(stmt, FactStmt):
                facts.append(stmt)
            elif isinstance(stmt, (RuleStmt, DefaultStmt, ExpandStmt)):
                rules.append(stmt)
            else:
                decls.append(stmt)
        if first_stmt is not None and header is None:
            self.error(first_stmt.span, "missing format header", hint=f"start the file with 'nk {FORMAT_VERSION};'")
        return Document(header, kind, tuple(decls), tuple(facts), tuple(rules))

    def error(self, span: Span, message: str, hint: str | None = None) -> None:
        self.diags.append(Diagnostic("error", span, message, hint, self.path))

    def end(self) -> None:
        self.expect("SEMI", "';'")

    def statement(self):
        t = self.tok
        if t.kind != "IDENT":
            raise _Failure(t.span, f"expected a statement, found {t.text!r}")
        word = t.text
        handler = getattr(self, "stmt_" + word, None) if word in KEYWORDS else None
        if handler is None:
            raise _Failure(t.span, f"unknown statement {word!r}")
        self.advance()
        node = handler(t.span)
        self.end()
        return node

    def stmt_nk(self, span):
        version = self.integer("format version")
        if version != FORMAT_VERSION:
            raise _Failure(span, f"unsupported format version {version}")
        return Header(version, span)

    def stmt_kind(self, span):
        t = self.ident("'rulebase' or 'scenario'")
        if t.text not in ("rulebase", "scenario"):
            raise _Failure(t.span, f"unknown file kind {t.text!r}", hint="use 'rulebase' or 'scenario'")
        return KindDecl(t.text, span)

    def ident_list(self, what: str) -> list[Token]:
        out = [self.ident(what)]
        while self.accept("COMMA"):
            out.append(self.ident(what))
        return out

    def stmt_sort(self, span):
        return SortDecl(tuple(t.text for t in self.ident_list("sort name")), span)

    def stmt_const(self, span):
        names = self.ident_list("constant name")
        self.expect("COLON", "':'")
        sort = self.ident("sort name").text
        return ConstDecl(tuple(t.text for t in names), sort, span, tuple(t.span for t in names))

    def stmt_var(self, span):
        names = self.ident_list("variable name")
        self.expect("COLON", "':'")
        sort = self.ident("sort name").text
        return VarDecl(tuple(t.text for t in names), sort, span)

    def stmt_pred(self, span):
        name = self.ident("predicate name").text
        self.expect("SLASH", "'/'")
        arity_tok = self.tok
        arity = self.integer("arity")
        sorts: list[str] = []
        if self.accept("LPAREN"):
            sorts = [t.text for t in self.ident_list("sort name")]
            self.expect("RPAREN", "')'")
        if len(sorts) != arity:
            raise _Failure(arity_tok.span, f"predicate {name}/{arity} lists {len(sorts)} argument sorts")
        layer = None
        if self.tok.is_kw("layer"):
            self.advance()
            layer = self.integer("layer index")
        return PredDecl(name, arity, tuple(sorts), layer, span)

    def term_list(self) -> list[TermNode]:
        out = [self.term()]
        while self.accept("COMMA"):
            out.append(self.term())
        return out

    def stmt_persistent(self, span):
        return PersistentDecl(tuple(self.term_list()), False, span)

    def stmt_backward_persistent(self, span):
        return PersistentDecl(tuple(self.term_list()), True, span)

    def stmt_cwa(self, span):
        return CwaDecl(tuple(t.text for t in self.ident_list("predicate name")), span)

    def stmt_horizon(self, span):
        return HorizonDecl(self.integer("horizon"), span)

    def tag(self) -> str:
        if self.accept("LBRACK"):
            t = self.ident("tag")
            self.expect("RBRACK", "']'")
            return t.text
        return ""

    def stmt_expand(self, span):
        kind = self.ident("expansion kind").text
        return ExpandStmt(kind, self.tag(), span)

    def stmt_fact(self, span):
        return FactStmt(self.literal(), span)

    def literals(self, stop: tuple[str, ...]) -> list[LiteralNode]:
        if self.tok.kind in stop:
            return []
        out = [self.literal()]
        while self.accept("AMP"):
            out.append(self.literal())
        return out

    def stmt_rule(self, span):
        rid = self.ident("rule id").text
        tag = self.tag()
        self.expect("COLON", "':'")
        body = self.literals(("ARROW",))
        self.expect("ARROW", "'->'")
        if self.tok.is_kw("false"):
            self.advance()
            head: list[LiteralNode] = []
        else:
            head = self.literals(())
        return RuleStmt(rid, tag, tuple(body), tuple(head), span)

    def stmt_default(self, span):
        rid = self.ident("default id").text
        tag = self.tag()
        self.expect_kw("prio")
        prio = self.integer("priority class")
        self.expect("COLON", "':'")
        prereq = self.literals(("COLON",))
        self.expect("COLON", "':'")
        just = self.literal()
        exc = None
        if self.tok.is_kw("unless"):
            self.advance()
            exc = self.literal()
        return DefaultStmt(rid, tag, prio, tuple(prereq), just, exc, span)

    def literal(self) -> LiteralNode:
        start = self.tok
        positive = True
        if start.is_kw("not"):
            self.advance()
            positive = False
        name_tok = self.tok
        nxt = self.toks[min(self.pos + 1, len(self.toks) - 1)]
        # Predicate names may coincide with keywords (persistent/1) when
        # an argument list follows.
        if name_tok.kind == "IDENT" and name_tok.text in KEYWORDS and nxt.kind == "LPAREN" \
                and name_tok.text not in ("not", "combine", "neg"):
            self.advance()
        else:
            name_tok = self.ident("predicate name")
        args: list[TermNode] = []
        if self.accept("LPAREN"):
            args = self.term_list()
            self.expect("RPAREN", "')' or ','")
        state = None
        if self.accept("AT"):
            state = self.state()
        return LiteralNode(positive, name_tok.text, tuple(args), state, start.span)

    def state(self) -> StateNode:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return StateNode(None, int(t.text), t.span)
        var = self.ident("state index or state variable")
        offset = 0
        sign = self.accept("PLUS") or self.accept("MINUS")
        if sign is not None:
            offset = self.integer("state offset")
            if sign.kind == "MINUS":
                offset = -offset
        return StateNode(var.text, offset, var.span)

    def term(self, depth: int = 0) -> TermNode:
        t = self.tok
        if depth > MAX_NESTING:
            raise _Failure(t.span, "term nesting too deep")
        if t.is_kw("combine"):
            self.advance()
            self.expect("LPAREN", "'('")
            functor = self.term(depth + 1)
            self.expect("COMMA", "','")
            arg = self.term(depth + 1)
            self.expect("RPAREN", "')'")
            return CombineNode(functor, arg, t.span)
        if t.is_kw("neg"):
            self.advance()
            self.expect("LPAREN", "'('")
            inner = self.term(depth + 1)
            self.expect("RPAREN", "')'")
            if isinstance(inner, NegNode):
                return inner.inner
            return NegNode(inner, t.span)
        return NameRef(self.ident("term").text, t.span)


def parse(source: SourceFile | str, path: str = "<input>") -> tuple[Document, list[Diagnostic]]:
    """Parse a rulebase or scenario file.

    Returns the tree together with the diagnostics; the tree contains every
    statement that parsed cleanly even when errors were reported.
    """
    if isinstance(source, SourceFile):
        text, path = source.text, source.path
    else:
        text = source
    tokens, diags = tokenize(text, path)
    p = _Parser(tokens, path)
    doc = p.document()
    all_diags = sorted(diags + p.diags, key=lambda d: (d.span.line, d.span.column))
    return doc, all_diags
