"""Resolution of parsed files into :class:`~normkit.theory.Theory` values."""

from __future__ import annotations

from .ast import (
    CombineNode, ConstDecl, CwaDecl, Document, ExpandStmt,
    HorizonDecl, LiteralNode, NameRef, PersistentDecl, PredDecl, RuleStmt,
    SortDecl, TermNode, VarDecl,
)
from .lexer import KEYWORDS, Diagnostic, Span
from ..errors import DslError
from ..terms import (
    ANY, NAME, STATE, Atom, Combine, Const, Literal, Shift, State, Var, neg,
    normalize, sort_of,
)
from ..theory import DefaultRule, Expansion, PredicateDecl, StrictRule, Theory

EXPANSION_KINDS = ("controllable", "able_to", "keep_state_availability")


class _Fail(Exception):
    def __init__(self, span: Span, message: str, hint: str | None = None):
        super().__init__(message)
        self.span, self.message, self.hint = span, message, hint


class _Compiler:
    def __init__(self, base: Theory, path: str, allow_rules: bool):
        self.base = base
        self.path = path
        self.allow_rules = allow_rules
        self.diags: list[Diagnostic] = []
        self.sorts = {s.lower(): s for s in base.sorts}
        self.sorts.setdefault(STATE, STATE)
        self.sorts.setdefault(ANY, ANY)
        self.consts = {n.lower(): (n, s) for n, s in base.constants.items()}
        self.preds = {n.lower(): d for n, d in base.predicates.items()}
        self.vars = {n.lower(): v for n, v in base.variables.items()}
        self.ids = {i.lower() for i in base.rule_ids()}
        self.new_sorts: list[str] = []
        self.new_consts: dict[str, str] = {}
        self.new_preds: dict[str, PredicateDecl] = {}
        self.new_vars: dict[str, Var] = {}
        self.horizon = base.horizon
        self.horizon_span: Span | None = None

    def fail(self, span: Span, message: str, hint: str | None = None) -> None:
        self.diags.append(Diagnostic("error", span, message, hint, self.path))

    def _taken(self, name: str) -> str | None:
        low = name.lower()
        if low in KEYWORDS:
            return "a keyword"
        if low in self.consts:
            return "a constant"
        if low in self.vars:
            return "a variable"
        return None

    # -- declarations --------------------------------------------------------

    def declare(self, decl) -> None:
        if isinstance(decl, SortDecl):
            for name in decl.names:
                if name.lower() in self.sorts:
                    self.fail(decl.span, f"sort {name} already declared")
                    continue
                self.sorts[name.lower()] = name
                self.new_sorts.append(name)
        elif isinstance(decl, ConstDecl):
            sort = self.resolve_sort(decl.sort, decl.span)
            spans = decl.name_spans or (decl.span,) * len(decl.names)
            for name, span in zip(decl.names, spans):
                what = self._taken(name)
                if what:
                    self.fail(span, f"{name} is already {what}")
                    continue
                if sort is not None:
                    self.consts[name.lower()] = (name, sort)
                    self.new_consts[name] = sort
        elif isinstance(decl, VarDecl):
            sort = self.resolve_sort(decl.sort, decl.span)
            for name in decl.names:
                what = self._taken(name)
                if what:
                    self.fail(decl.span, f"{name} is already {what}")
                    continue
                if sort is not None:
                    v = Var(name, sort)
                    self.vars[name.lower()] = v
                    self.new_vars[name] = v
        elif isinstance(decl, PredDecl):
            if decl.name.lower() in self.preds:
                self.fail(decl.span, f"predicate {decl.name} already declared")
                return
            sorts = []
            for s in decl.sorts:
                r = self.resolve_sort(s, decl.span)
                if r is None:
                    return
                sorts.append(r)
            if STATE in sorts[:-1]:
                self.fail(decl.span, "only the last argument of a predicate may be a state")
                return
            pd = PredicateDecl(decl.name, tuple(sorts), decl.layer)
            self.preds[decl.name.lower()] = pd
            self.new_preds[decl.name] = pd
        elif isinstance(decl, HorizonDecl):
            if self.horizon_span is not None:
                self.fail(decl.span, "duplicate horizon declaration")
            self.horizon = decl.value
            self.horizon_span = decl.span

    def resolve_sort(self, name: str, span: Span) -> str | None:
        sort = self.sorts.get(name.lower())
        if sort is None:
            self.fail(span, f"unknown sort {name}")
        return sort

    # -- terms and literals ----------------------------------------------------

    def term(self, node: TermNode, allow_vars: bool):
        if isinstance(node, NameRef):
            low = node.ident.lower()
            if allow_vars and low in self.vars:
                return self.vars[low]
            if low in self.consts:
                name, sort = self.consts[low]
                return Atom(name) if sort == NAME else Const(name, sort)
            if low in self.vars:
                raise _Fail(node.span, f"unknown constant {node.ident}",
                            hint=f"{node.ident} is a variable; facts must be ground")
            raise _Fail(node.span, f"unknown constant {node.ident}")
        if isinstance(node, CombineNode):
            functor = self.term(node.functor, allow_vars=False)
            if not isinstance(functor, Atom):
                raise _Fail(node.functor.span, "the first argument of combine must be a name constant")
            return Combine(functor.name, self.term(node.arg, allow_vars))
        inner = self.term(node.inner, allow_vars)
        if sort_of(inner) != NAME:
            raise _Fail(node.span, "neg applies to predicate names only")
        return neg(inner)

    def literal(self, node: LiteralNode, allow_vars: bool) -> Literal:
        decl = self.preds.get(node.pred.lower())
        if decl is None:
            raise _Fail(node.span, f"unknown predicate {node.pred}")
        stateful = bool(decl.sorts) and decl.sorts[-1] == STATE
        expected = decl.arity - 1 if stateful else decl.arity
        if len(node.args) != expected:
            raise _Fail(
                node.span,
                f"{decl.name} takes {expected} argument(s) before the state, got {len(node.args)}"
                if stateful else f"{decl.name} takes {expected} argument(s), got {len(node.args)}",
            )
        args = []
        for i, (arg, sort) in enumerate(zip(node.args, decl.sorts), start=1):
            t = self.term(arg, allow_vars)
            if sort_of(t) != sort:
                raise _Fail(arg.span, f"argument {i} of {decl.name} must be of sort {sort}, got {sort_of(t)}")
            args.append(t)
        if stateful:
            if node.state is None:
                raise _Fail(node.span, f"{decl.name} needs a state: write '@ <state>'")
            args.append(self.state(node.state, allow_vars))
        elif node.state is not None:
            raise _Fail(node.state.span, f"{decl.name} is not state-indexed")
        return normalize(Literal(decl.name, tuple(args), node.positive))

    def state(self, node, allow_vars: bool):
        if node.var is None:
            return State(node.value)
        v = self.vars.get(node.var.lower()) if allow_vars else None
        if v is None or v.sort != STATE:
            raise _Fail(node.span, f"{node.var} is not a state variable")
        return v if node.value == 0 else Shift(v, node.value)

    def check_range(self, head_lits, body_lits, span: Span, what: str) -> None:
        bound = set()
        for lit in body_lits:
            bound |= lit.vars()
        free = set()
        for lit in head_lits:
            free |= lit.vars() - bound
        if free:
            names = ", ".join(sorted(v.name for v in free))
            raise _Fail(span, f"{what}: variable(s) {names} do not occur in the body")

    def new_id(self, rid: str, span: Span) -> None:
        if rid.lower() in self.ids:
            raise _Fail(span, f"duplicate rule id {rid}")
        self.ids.add(rid.lower())

    # -- driver ------------------------------------------------------------------

    def run(self, doc: Document, kind: str | None) -> Theory:
        if kind is not None and doc.kind is not None and doc.kind.kind != kind:
            self.fail(doc.kind.span, f"expected a {kind} file, found {doc.kind.kind}")
        is_scenario = (doc.kind.kind if doc.kind else kind) == "scenario"
        for decl in doc.declarations:
            if isinstance(decl, SortDecl):
                self.declare(decl)
        for decl in doc.declarations:
            if not isinstance(decl, SortDecl):
                self.declare(decl)

        persistent, backward, cwa = [], [], []
        for decl in doc.declarations:
            try:
                if isinstance(decl, PersistentDecl):
                    for t in decl.terms:
                        term = self.term(t, allow_vars=False)
                        if sort_of(term) != NAME:
                            raise _Fail(t.span, "only predicate names can be persistent")
                        (backward if decl.backward else persistent).append(term)
                elif isinstance(decl, CwaDecl):
                    for name in decl.names:
                        pd = self.preds.get(name.lower())
                        if pd is None:
                            raise _Fail(decl.span, f"unknown predicate {name}")
                        cwa.append(pd.name)
            except _Fail as f:
                self.fail(f.span, f.message, f.hint)

        facts: list[tuple[Literal, Span]] = []
        for stmt in doc.facts:
            try:
                lit = self.literal(stmt.literal, allow_vars=False)
            except _Fail as f:
                self.fail(f.span, f.message, f.hint)
                continue
            facts.append((lit, stmt.span))

        rules, defaults, expansions = [], [], []
        for stmt in doc.rules:
            try:
                if isinstance(stmt, ExpandStmt):
                    if is_scenario and not self.allow_rules:
                        raise _Fail(stmt.span, "scenarios may not request expansions")
                    if stmt.kind not in EXPANSION_KINDS:
                        raise _Fail(stmt.span, f"unknown expansion {stmt.kind}",
                                    hint="one of " + ", ".join(EXPANSION_KINDS))
                    self.new_id(stmt.kind, stmt.span)
                    expansions.append(Expansion(stmt.kind, stmt.tag))
                elif isinstance(stmt, RuleStmt):
                    body = tuple(self.literal(l, True) for l in stmt.body)
                    head = tuple(self.literal(l, True) for l in stmt.head)
                    self.check_range(head, body, stmt.span, f"rule {stmt.id}")
                    self.new_id(stmt.id, stmt.span)
                    rules.append(StrictRule(stmt.id, body, head, stmt.tag))
                else:
                    if is_scenario and not self.allow_rules:
                        raise _Fail(stmt.span, "scenarios may not define defaults",
                                    hint="use --allow-scenario-rules")
                    prereq = tuple(self.literal(l, True) for l in stmt.prerequisite)
                    just = self.literal(stmt.justification, True)
                    exc = self.literal(stmt.exception, True) if stmt.exception else None
                    self.check_range((just,), prereq + (just,), stmt.span, f"default {stmt.id}")
                    if exc is not None:
                        self.check_range((exc,), prereq + (just,), stmt.span, f"default {stmt.id}")
                    self.new_id(stmt.id, stmt.span)
                    defaults.append(DefaultRule(stmt.id, prereq, just, just, exc, stmt.priority, stmt.tag))
            except _Fail as f:
                self.fail(f.span, f.message, f.hint)

        if is_scenario and self.horizon is None and doc.header is not None:
            self.fail(doc.header.span, "scenario declares no horizon", hint="add 'horizon <n>;'")
        seen: dict[Literal, Span] = {lit: span for lit, span in ((l, Span(0, 0)) for l in self.base.facts)}
        fact_lits = []
        for lit, span in facts:
            for a in lit.args:
                if isinstance(a, State) and self.horizon is not None and a.value > self.horizon:
                    self.fail(span, f"state {a.value} is beyond the horizon {self.horizon}")
            if lit not in seen:
                fact_lits.append(lit)
            seen[lit] = span

        fragment = Theory(
            sorts=tuple(self.new_sorts),
            constants=self.new_consts,
            predicates=self.new_preds,
            variables=self.new_vars,
            facts=tuple(fact_lits),
            rules=tuple(rules),
            defaults=tuple(defaults),
            persistent=tuple(persistent),
            backward_persistent=tuple(backward),
            cwa=tuple(cwa),
            expansions=tuple(expansions),
            horizon=self.horizon if self.horizon_span is not None else None,
        )
        return self.base.merge(fragment)


def compile_document(
    doc: Document,
    base: Theory | None = None,
    *,
    path: str = "<input>",
    kind: str | None = None,
    allow_scenario_rules: bool = False,
) -> tuple[Theory, list[Diagnostic]]:
    c = _Compiler(base or Theory(), path, allow_scenario_rules)
    theory = c.run(doc, kind)
    return theory, c.diags


def to_theory(doc: Document, base: Theory | None = None, **kwargs) -> Theory:
    """Merge a parsed file over ``base``; raise :class:`DslError` on any error."""
    theory, diags = compile_document(doc, base, **kwargs)
    if diags:
        raise DslError(diags)
    return theory


def compile_literal(text: str, theory: Theory, path: str = "<literal>") -> Literal:
    """Read one ground literal such as ``must(stop, B) @ 1`` against ``theory``."""
    from .parser import parse

    prefix = "nk 1; fact "
    doc, diags = parse(f"{prefix}{text};", path)

    def shift(span: Span) -> Span:
        col = max(1, span.column - len(prefix)) if span.line == 1 else span.column
        return Span(span.line, col, span.length)

    if diags or len(doc.facts) != 1:
        raise DslError(
            [Diagnostic(d.severity, shift(d.span), d.message, d.hint, path) for d in diags]
            or [Diagnostic("error", Span(1, 1), "expected exactly one literal", None, path)]
        )
    c = _Compiler(theory, path, False)
    try:
        return c.literal(doc.facts[0].literal, allow_vars=False)
    except _Fail as f:
        raise DslError([Diagnostic("error", shift(f.span), f.message, f.hint, path)]) from None
