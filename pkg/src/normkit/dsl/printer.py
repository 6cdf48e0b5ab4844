"""Canonical text form: one statement per line, declarations, facts, rules."""

from __future__ import annotations

from .ast import (
    CombineNode, ConstDecl, CwaDecl, DefaultStmt, Document, ExpandStmt, FactStmt,
    HorizonDecl, LiteralNode, NameRef, NegNode, PersistentDecl, PredDecl, RuleStmt,
    SortDecl, StateNode, TermNode, VarDecl,
)
from .parser import FORMAT_VERSION


def format_term(t: TermNode) -> str:
    if isinstance(t, NameRef):
        return t.ident
    if isinstance(t, CombineNode):
        return f"combine({format_term(t.functor)}, {format_term(t.arg)})"
    inner = t.inner
    if isinstance(inner, NegNode):
        return format_term(inner.inner)
    return f"neg({format_term(inner)})"


def format_state(s: StateNode) -> str:
    if s.var is None:
        return str(s.value)
    if s.value == 0:
        return s.var
    return f"{s.var}{'+' if s.value > 0 else '-'}{abs(s.value)}"


def format_literal(lit: LiteralNode) -> str:
    text = "" if lit.positive else "not "
    text += lit.pred
    if lit.args:
        text += "(" + ", ".join(format_term(a) for a in lit.args) + ")"
    if lit.state is not None:
        text += " @ " + format_state(lit.state)
    return text


def _conj(lits) -> str:
    return " & ".join(format_literal(l) for l in lits)


def _tag(tag: str) -> str:
    return f" [{tag}]" if tag else ""


def format_statement(stmt) -> str:
    if isinstance(stmt, SortDecl):
        return f"sort {', '.join(stmt.names)};"
    if isinstance(stmt, ConstDecl):
        return f"const {', '.join(stmt.names)} : {stmt.sort};"
    if isinstance(stmt, VarDecl):
        return f"var {', '.join(stmt.names)} : {stmt.sort};"
    if isinstance(stmt, PredDecl):
        text = f"pred {stmt.name}/{stmt.arity}"
        if stmt.sorts:
            text += f" ({', '.join(stmt.sorts)})"
        if stmt.layer is not None:
            text += f" layer {stmt.layer}"
        return text + ";"
    if isinstance(stmt, PersistentDecl):
        word = "backward_persistent" if stmt.backward else "persistent"
        return f"{word} {', '.join(format_term(t) for t in stmt.terms)};"
    if isinstance(stmt, CwaDecl):
        return f"cwa {', '.join(stmt.names)};"
    if isinstance(stmt, HorizonDecl):
        return f"horizon {stmt.value};"
    if isinstance(stmt, FactStmt):
        return f"fact {format_literal(stmt.literal)};"
    if isinstance(stmt, ExpandStmt):
        return f"expand {stmt.kind}{_tag(stmt.tag)};"
    if isinstance(stmt, RuleStmt):
        body = _conj(stmt.body)
        head = _conj(stmt.head) if stmt.head else "false"
        lead = f"{body} -> " if body else "-> "
        return f"rule {stmt.id}{_tag(stmt.tag)}: {lead}{head};"
    if isinstance(stmt, DefaultStmt):
        prereq = _conj(stmt.prerequisite)
        text = f"default {stmt.id}{_tag(stmt.tag)} prio {stmt.priority}: "
        text += f"{prereq} : " if prereq else ": "
        text += format_literal(stmt.justification)
        if stmt.exception is not None:
            text += " unless " + format_literal(stmt.exception)
        return text + ";"
    raise TypeError(f"not a statement: {stmt!r}")


def print_document(doc: Document) -> str:
    if doc.is_empty:
        return ""
    version = doc.header.version if doc.header else FORMAT_VERSION
    lines = [f"nk {version};"]
    if doc.kind is not None:
        lines.append(f"kind {doc.kind.kind};")
    for group in (doc.declarations, doc.facts, doc.rules):
        lines.extend(format_statement(s) for s in group)
    return "\n".join(lines) + "\n"
