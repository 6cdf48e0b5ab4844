"""Syntax tree for rulebase and scenario files.

Spans are excluded from equality so that trees compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .lexer import Span

_NOSPAN = Span(0, 0, 0)


def _span():
    return field(default=_NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class NameRef:
    ident: str
    span: Span = _span()


@dataclass(frozen=True)
class CombineNode:
    functor: "TermNode"
    arg: "TermNode"
    span: Span = _span()


@dataclass(frozen=True)
class NegNode:
    inner: "TermNode"
    span: Span = _span()


TermNode = Union[NameRef, CombineNode, NegNode]


@dataclass(frozen=True)
class StateNode:
    """Either a literal index (``var`` is None) or ``var`` plus ``offset``."""

    var: str | None
    value: int = 0
    span: Span = _span()


@dataclass(frozen=True)
class LiteralNode:
    positive: bool
    pred: str
    args: tuple[TermNode, ...] = ()
    state: StateNode | None = None
    span: Span = _span()


@dataclass(frozen=True)
class Header:
    version: int
    span: Span = _span()


@dataclass(frozen=True)
class KindDecl:
    kind: str
    span: Span = _span()


@dataclass(frozen=True)
class SortDecl:
    names: tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True)
class ConstDecl:
    names: tuple[str, ...]
    sort: str
    span: Span = _span()
    name_spans: tuple[Span, ...] = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class VarDecl:
    names: tuple[str, ...]
    sort: str
    span: Span = _span()


@dataclass(frozen=True)
class PredDecl:
    name: str
    arity: int
    sorts: tuple[str, ...]
    layer: int | None
    span: Span = _span()


@dataclass(frozen=True)
class PersistentDecl:
    terms: tuple[TermNode, ...]
    backward: bool = False
    span: Span = _span()


@dataclass(frozen=True)
class CwaDecl:
    names: tuple[str, ...]
    span: Span = _span()


@dataclass(frozen=True)
class HorizonDecl:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class ExpandStmt:
    kind: str
    tag: str = ""
    span: Span = _span()


@dataclass(frozen=True)
class FactStmt:
    literal: LiteralNode
    span: Span = _span()


@dataclass(frozen=True)
class RuleStmt:
    id: str
    tag: str
    body: tuple[LiteralNode, ...]
    head: tuple[LiteralNode, ...]  # empty means `false`
    span: Span = _span()


@dataclass(frozen=True)
class DefaultStmt:
    id: str
    tag: str
    priority: int
    prerequisite: tuple[LiteralNode, ...]
    justification: LiteralNode
    exception: LiteralNode | None = None
    span: Span = _span()


Declaration = Union[SortDecl, ConstDecl, VarDecl, PredDecl, PersistentDecl, CwaDecl, HorizonDecl]
RuleLike = Union[RuleStmt, DefaultStmt, ExpandStmt]


@dataclass(frozen=True)
class Document:
    header: Header | None = None
    kind: KindDecl | None = None
    declarations: tuple[Declaration, ...] = ()
    facts: tuple[FactStmt, ...] = ()
    rules: tuple[RuleLike, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not (self.header or self.kind or self.declarations or self.facts or self.rules)
