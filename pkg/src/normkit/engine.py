"""Extensions of ground default theories.

Strict rules are inference rules (no contraposition).  A set of
justifications ``J`` is consistent with a literal set ``S`` when the
strict closure of ``S | J`` contains neither a complementary pair nor a
fired constraint.  Besides the ground rules, the closure propagates
incompatibility: ``Holds(F, X, t)`` and ``Incompatible(F, G)`` give
``not Holds(G, X, t)``.

:func:`compute_extension` is the production solver: prioritized greedy
application with chronological backtracking.  :func:`check_extension`
tests a candidate against the fixed-point definition directly.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import InconsistentFacts, NoExtension, NotFound, ResourceLimitError
from .grounder import GroundDefault, GroundProgram
from .terms import Literal, complement, neg, normalize

DEFAULT_MAX_NODES = 20_000

APPLIED = "applied"
REDUNDANT = "redundant"
BLOCKED = "justification-blocked"
UNSATISFIED = "prerequisite-unsatisfied"


@dataclass(frozen=True)
class Derivation:
    """How a literal first entered a closure."""

    kind: str  # fact | rule | default | incompatibility
    source: str
    premises: tuple[Literal, ...] = ()
    step: int = 0
    tag: str = ""


@dataclass(frozen=True)
class InconsistencyReport:
    kind: str  # complementary | falsum
    literals: tuple[Literal, ...]
    rule: str | None = None
    derivations: tuple[Derivation | None, ...] = ()

    def __str__(self) -> str:
        lits = ", ".join(str(l) for l in self.literals)
        if self.kind == "falsum":
            return f"constraint {self.rule} violated by {lits}"
        return f"complementary literals {lits}"


class _Index:
    """Static lookup structures shared by every closure over one program."""

    def __init__(self, program: GroundProgram):
        self.program = program
        self.rules = program.rules
        self.bodies = [tuple(dict.fromkeys(r.body)) for r in program.rules]
        self.watch: dict[Literal, list[int]] = defaultdict(list)
        for i, body in enumerate(self.bodies):
            for lit in body:
                self.watch[lit].append(i)
        self.unconditional = [i for i, body in enumerate(self.bodies) if not body]


def _holds_effect(lit: Literal):
    if lit.pred != "Holds" or len(lit.args) != 3:
        return None
    return lit.args[0] if lit.positive else neg(lit.args[0])


class Closure:
    """Incrementally maintained strict closure of a literal set."""

    def __init__(self, index: _Index):
        self.index = index
        self.literals: set[Literal] = set()
        self.missing = [len(b) for b in index.bodies]
        self.provenance: dict[Literal, Derivation] = {}
        self.order: list[Literal] = []
        self.incompatible: dict = defaultdict(list)
        self.by_effect: dict = defaultdict(list)
        self.conflict: InconsistencyReport | None = None

    @classmethod
    def of(cls, program: GroundProgram, index: _Index | None = None) -> "Closure":
        c = cls(index or _Index(program))
        for i in c.index.unconditional:
            c._fire(i, [])
        c.add_all(((f, Derivation("fact", "fact")) for f in program.facts))
        return c

    def copy(self) -> "Closure":
        c = Closure.__new__(Closure)
        c.index = self.index
        c.literals = set(self.literals)
        c.missing = list(self.missing)
        c.provenance = dict(self.provenance)
        c.order = list(self.order)
        c.incompatible = defaultdict(list, {k: list(v) for k, v in self.incompatible.items()})
        c.by_effect = defaultdict(list, {k: list(v) for k, v in self.by_effect.items()})
        c.conflict = self.conflict
        return c

    @property
    def consistent(self) -> bool:
        return self.conflict is None

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.literals

    def _fire(self, i: int, queue: list) -> None:
        rule = self.index.rules[i]
        if rule.head is None:
            if self.conflict is None:
                body = self.index.bodies[i]
                self.conflict = InconsistencyReport(
                    "falsum", body, rule.id, tuple(self.provenance.get(b) for b in body)
                )
            return
        queue.append((rule.head, Derivation("rule", rule.id, self.index.bodies[i], tag=rule.tag)))

    def add_all(self, items: Iterable[tuple[Literal, Derivation]]) -> bool:
        queue = list(items)
        queue.reverse()
        while queue:
            lit, why = queue.pop()
            if lit in self.literals:
                continue
            why = Derivation(why.kind, why.source, why.premises, len(self.order), why.tag)
            self.literals.add(lit)
            self.provenance[lit] = why
            self.order.append(lit)
            if self.conflict is None and complement(lit) in self.literals:
                other = complement(lit)
                self.conflict = InconsistencyReport(
                    "complementary", (other, lit), None, (self.provenance.get(other), why)
                )
            new: list = []
            for i in self.index.watch.get(lit, ()):
                self.missing[i] -= 1
                if self.missing[i] == 0:
                    self._fire(i, new)
            new += self._incompatibility(lit)
            queue.extend(reversed(new))
        return self.conflict is None

    def _incompatibility(self, lit: Literal) -> list:
        out = []
        if lit.pred == "Incompatible" and lit.positive and len(lit.args) == 2:
            e, other = lit.args
            self.incompatible[e].append(other)
            for h in self.by_effect.get(e, ()):
                out.append(self._incompatible_with(h, other, lit))
        effect = _holds_effect(lit)
        if effect is not None:
            self.by_effect[effect].append(lit)
            for other in self.incompatible.get(effect, ()):
                out.append(self._incompatible_with(lit, other, Literal("Incompatible", (effect, other))))
        return out

    @staticmethod
    def _incompatible_with(h: Literal, other, inc: Literal):
        _, x, t = h.args
        derived = normalize(Literal("Holds", (other, x, t), False))
        return derived, Derivation("incompatibility", "incompatibility", (h, inc))

    def trial(self, extra: Iterable[Literal]) -> bool:
        """Is the closure of ``self | extra`` consistent?  Leaves ``self`` untouched."""
        if self.conflict is not None:
            return False
        extra = [l for l in extra if l not in self.literals]
        if not extra:
            return True
        if any(complement(l) in self.literals for l in extra):
            return False
        return _Overlay(self).run(extra)


class _Overlay:
    """Propagation on top of a closure without copying it."""

    def __init__(self, base: Closure):
        self.base = base
        self.added: set[Literal] = set()
        self.missing: dict[int, int] = {}
        self.incompatible: dict = defaultdict(list)
        self.by_effect: dict = defaultdict(list)

    def has(self, lit: Literal) -> bool:
        return lit in self.added or lit in self.base.literals

    def run(self, extra: list[Literal]) -> bool:
        idx = self.base.index
        queue = list(extra)
        while queue:
            lit = queue.pop()
            if self.has(lit):
                continue
            if self.has(complement(lit)):
                return False
            self.added.add(lit)
            for i in idx.watch.get(lit, ()):
                left = self.missing.get(i, self.base.missing[i]) - 1
                self.missing[i] = left
                if left == 0:
                    head = idx.rules[i].head
                    if head is None:
                        return False
                    queue.append(head)
            if lit.pred == "Incompatible" and lit.positive and len(lit.args) == 2:
                e, other = lit.args
                self.incompatible[e].append(other)
                for h in self.base.by_effect.get(e, ()) + self.by_effect.get(e, []):
                    queue.append(Closure._incompatible_with(h, other, lit)[0])
            effect = _holds_effect(lit)
            if effect is not None:
                self.by_effect[effect].append(lit)
                for other in self.base.incompatible.get(effect, []) + self.incompatible.get(effect, []):
                    queue.append(Closure._incompatible_with(lit, other, lit)[0])
        return True


def strict_closure(base: Iterable[Literal], program: GroundProgram) -> frozenset[Literal] | InconsistencyReport:
    """Least superset of ``base`` closed under the strict rules of ``program``."""
    index = _Index(program)
    c = Closure(index)
    for i in index.unconditional:
        c._fire(i, [])
    c.add_all((normalize(l), Derivation("fact", "fact")) for l in base)
    if c.conflict is not None:
        return c.conflict
    return frozenset(c.literals)


# -- extensions -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Extension:
    literals: frozenset[Literal]
    applied: tuple[str, ...]
    provenance: dict = field(compare=False, hash=False, repr=False)
    status: dict = field(compare=False, hash=False, repr=False, default_factory=dict)
    complete: bool = True
    stats: dict = field(compare=False, hash=False, repr=False, default_factory=dict)

    def __contains__(self, lit: Literal) -> bool:
        return lit in self.literals

    def default_status(self, default_id: str) -> str:
        return self.status[default_id]

    def blocked(self) -> list[str]:
        return [d for d, s in self.status.items() if s == BLOCKED]


def _justified(closure: Closure, d: GroundDefault) -> bool:
    return closure.trial(d.justifications)


def _classify(program: GroundProgram, closure: Closure, applied: set[str]) -> dict[str, str]:
    out = {}
    for d in program.defaults:
        if d.id in applied:
            out[d.id] = APPLIED
        elif not all(p in closure.literals for p in d.prerequisite):
            out[d.id] = UNSATISFIED
        elif not _justified(closure, d):
            out[d.id] = BLOCKED
        else:
            out[d.id] = REDUNDANT
    return out


@dataclass
class _Frame:
    closure: Closure
    applied: tuple[GroundDefault, ...]
    excluded: frozenset = frozenset()
    choice: GroundDefault | None = None
    stage: int = 0  # 0 fresh, 1 apply branch taken, 2 exclude branch taken


def _first_candidate(program: GroundProgram, closure: Closure, skip: set[str]) -> GroundDefault | None:
    for d in program.defaults:
        if d.id in skip or d.consequent in closure.literals:
            continue
        if all(p in closure.literals for p in d.prerequisite) and _justified(closure, d):
            return d
    return None


def _upper_bound(program: GroundProgram, closure: Closure, skip: set[str]) -> Closure:
    """Closure of everything any extension below this node could contain.

    Adds the consequents of every undecided default whose justification is
    still consistent, ignoring conflicts between them.
    """
    live = [d for d in program.defaults if d.id not in skip and _justified(closure, d)]
    upper = closure.copy()
    changed = True
    while changed and upper.conflict is None:
        changed = False
        for d in live:
            if d.consequent not in upper.literals and all(p in upper.literals for p in d.prerequisite):
                upper.add_all([(d.consequent, Derivation("default", d.id, d.prerequisite))])
                changed = True
    return upper


def _doomed_exclusion(program: GroundProgram, frame: _Frame, skip: set[str]) -> GroundDefault | None:
    """An excluded default that every extension below ``frame`` would generate."""
    closure = frame.closure
    pending = [
        d for d in program.defaults
        if d.id in frame.excluded and d.consequent not in closure.literals
        and all(p in closure.literals for p in d.prerequisite) and _justified(closure, d)
    ]
    if not pending:
        return None
    upper = _upper_bound(program, closure, skip)
    for d in pending:
        if upper.trial(d.justifications):
            return d
    return None


def compute_extension(
    program: GroundProgram,
    stop_when: Literal | Callable[[Closure], bool] | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> Extension:
    """Return the first extension in priority order.

    The search takes the highest-priority applicable default at every
    node; on failure it revisits the most recent choice with that default
    ruled out.  ``stop_when`` halts default application as soon as the
    given literal (or predicate over the closure) is reached; the result
    is then a partial extension with ``complete=False``.  Raises
    :class:`InconsistentFacts` when the facts alone are inconsistent,
    :class:`NoExtension` when the search space is exhausted and
    :class:`ResourceLimitError` when it visits more than ``max_nodes``.
    """
    index = _Index(program)
    root = Closure.of(program, index)
    if root.conflict is not None:
        raise InconsistentFacts(root.conflict)
    if isinstance(stop_when, Literal):
        target = stop_when
        stop = lambda c: target in c.literals  # noqa: E731
    else:
        stop = stop_when

    trace: list[str] = []
    nodes = 0
    backtracks = 0
    stack = [_Frame(root, ())]
    while stack:
        frame = stack[-1]
        closure = frame.closure
        skip = {d.id for d in frame.applied} | frame.excluded
        if frame.stage == 0:
            nodes += 1
            if nodes > max_nodes:
                raise ResourceLimitError(f"extension search exceeded {max_nodes} nodes")
            if stop is not None and stop(closure):
                return _finish(program, closure, frame.applied, False, nodes, backtracks)
            if any(complement(j) in closure.literals for d in frame.applied for j in d.justifications):
                trace.append(f"prune: justification of {_violated(closure, frame.applied)} refuted")
                stack.pop()
                backtracks += 1
                continue
            doomed = _doomed_exclusion(program, frame, skip)
            if doomed is not None:
                trace.append(f"prune: {doomed.id} was ruled out but stays applicable")
                stack.pop()
                backtracks += 1
                continue
            first = _first_candidate(program, closure, skip)
            if first is None:
                bad = [d for d in frame.applied if not _justified(closure, d)]
                if not bad:
                    return _finish(program, closure, frame.applied, True, nodes, backtracks)
                trace.append(f"reject: justification of {bad[0].id} not consistent with result")
                stack.pop()
                backtracks += 1
                continue
            frame.choice = first
        d = frame.choice
        if frame.stage == 0:
            frame.stage = 1
            child = closure.copy()
            child.add_all([(d.consequent, Derivation("default", d.id, d.prerequisite, tag=d.tag))])
            trace.append(f"apply {d.id}")
            stack.append(_Frame(child, frame.applied + (d,), frame.excluded))
        elif frame.stage == 1:
            frame.stage = 2
            trace.append(f"rule out {d.id}")
            stack.append(_Frame(closure, frame.applied, frame.excluded | {d.id}))
        else:
            stack.pop()
    raise NoExtension(trace)


def _violated(closure: Closure, applied) -> str:
    for d in applied:
        if any(complement(j) in closure.literals for j in d.justifications):
            return d.id
    return "?"


def _finish(program, closure: Closure, applied, complete: bool, nodes: int, backtracks: int) -> Extension:
    ids = tuple(d.id for d in applied)
    stats = {
        "ground_defaults": len(program.defaults),
        "ground_rules": len(program.rules),
        "applied": len(ids),
        "backtracks": backtracks,
        "nodes": nodes,
    }
    return Extension(
        frozenset(closure.literals), ids, dict(closure.provenance),
        _classify(program, closure, set(ids)), complete, stats,
    )


# -- checking -----------------------------------------------------------------------------------


def check_extension(candidate: Iterable[Literal], program: GroundProgram) -> tuple[bool, list[str]]:
    """Fixed-point test: is ``candidate`` an extension of ``program``?

    Computes the least set containing the facts that is closed under the
    strict rules and under every default whose justifications are
    consistent with the candidate, and compares it with the candidate.
    """
    cand = frozenset(normalize(l) for l in candidate)
    report: list[str] = []
    index = _Index(program)
    frozen = Closure(index)
    for i in index.unconditional:
        frozen._fire(i, [])
    frozen.add_all((l, Derivation("fact", "candidate")) for l in cand)
    if frozen.conflict is not None:
        report.append(f"inconsistent: {frozen.conflict}")
        return False, report
    if frozenset(frozen.literals) != cand:
        extra = sorted(frozen.literals - cand, key=Literal.key)
        report.append("not closed under strict rules: missing " + ", ".join(str(l) for l in extra[:5]))

    usable = [d for d in program.defaults if frozen.trial(d.justifications)]
    gamma = Closure.of(program, index)
    changed = True
    while changed and gamma.conflict is None:
        changed = False
        for d in usable:
            if d.consequent not in gamma.literals and all(p in gamma.literals for p in d.prerequisite):
                gamma.add_all([(d.consequent, Derivation("default", d.id, d.prerequisite))])
                changed = True
    got = frozenset(gamma.literals)
    if gamma.conflict is not None:
        report.append(f"generated set is inconsistent: {gamma.conflict}")
    missing = sorted(got - cand, key=Literal.key)
    unsupported = sorted(cand - got, key=Literal.key)
    if missing:
        report.append("not closed: " + ", ".join(str(l) for l in missing[:5]))
    if unsupported:
        report.append("unsupported literals: " + ", ".join(str(l) for l in unsupported[:5]))
    return not report, report


# -- provenance ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class ProofNode:
    literal: Literal
    kind: str
    source: str
    children: tuple["ProofNode", ...] = ()
    tag: str = ""

    def leaves(self) -> list[Literal]:
        if not self.children:
            return [self.literal]
        out = []
        for c in self.children:
            out += c.leaves()
        return out

    def literals(self) -> list[Literal]:
        out = [self.literal]
        for c in self.children:
            out += c.literals()
        return out


def derive_provenance(lit: Literal, ext: Extension) -> ProofNode:
    """Derivation tree of ``lit`` following the recorded first derivations."""
    lit = normalize(lit)
    if lit not in ext.literals:
        raise NotFound(f"{lit} is not in the extension")

    def build(l: Literal, seen: frozenset) -> ProofNode:
        why = ext.provenance.get(l)
        if why is None:
            return ProofNode(l, "fact", "fact")
        if l in seen:
            return ProofNode(l, why.kind, why.source, (), why.tag)
        kids = tuple(build(p, seen | {l}) for p in why.premises)
        return ProofNode(l, why.kind, why.source, kids, why.tag)

    return build(lit, frozenset())


def render_tree(node: ProofNode, indent: str = "") -> str:
    label = node.kind if node.kind in ("fact", "incompatibility") else f"{node.kind} {node.source}"
    if node.tag:
        label += f" [{node.tag}]"
    lines = [f"{indent}{node.literal}  <- {label}"]
    for c in node.children:
        lines.append(render_tree(c, indent + "  "))
    return "\n".join(lines)
