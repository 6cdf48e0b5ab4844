"""Exhaustive extension enumeration, used to cross-check the solver.

The enumerator shares no code with :mod:`normkit.engine` beyond the data
types: it has its own naive fixpoint closure and searches over which
defaults are *usable* (justifications consistent with the extension)
rather than over application sequences.  An extension is fully
determined by its usable set ``U``: it is the least set containing the
facts and closed under the strict rules and the defaults in ``U``, and it
must make exactly the defaults in ``U`` usable.

Search decides each default in turn.  With ``in`` the defaults decided
usable and ``open`` those still undecided, any extension ``E`` in the
subtree satisfies ``lower <= E <= upper`` where ``lower`` is generated by
``in`` and ``upper`` by ``in | open``.  A branch is cut when ``lower`` is
inconsistent, when a usable default is refuted by ``lower``, or when an
unusable default is consistent with ``upper``.
"""

from __future__ import annotations

from typing import Iterable

from .engine import InconsistencyReport
from .errors import InconsistentFacts, ResourceLimitError
from .grounder import GroundDefault, GroundProgram, GroundRule
from .terms import Literal, complement, neg, normalize

DEFAULT_CAP = 20


class _Rules:
    """Body-literal index over the ground rules, for worklist closure."""

    def __init__(self, rules: Iterable[GroundRule]):
        self.rules = list(rules)
        self.by_literal: dict[Literal, list[int]] = {}
        self.sizes = []
        self.empty = []
        for i, r in enumerate(self.rules):
            body = set(r.body)
            self.sizes.append(len(body))
            if not body:
                self.empty.append(i)
            for b in body:
                self.by_literal.setdefault(b, []).append(i)


def _effect(l: Literal):
    if l.pred == "Holds" and len(l.args) == 3:
        return l.args[0] if l.positive else neg(l.args[0])
    return None


def naive_closure(base: Iterable[Literal], rules) -> tuple[frozenset[Literal], bool]:
    """Strict closure of ``base``; returns ``(literals, consistent)``."""
    if not isinstance(rules, _Rules):
        rules = _Rules(rules)
    lits: set[Literal] = set()
    waiting = {}
    falsum = False
    incompatible: dict = {}
    holds: dict = {}
    todo = list(base)
    for i in rules.empty:
        head = rules.rules[i].head
        if head is None:
            falsum = True
        else:
            todo.append(head)
    while todo:
        l = todo.pop()
        if l in lits:
            continue
        lits.add(l)
        for i in rules.by_literal.get(l, ()):
            waiting[i] = waiting.get(i, rules.sizes[i]) - 1
            if waiting[i] == 0:
                head = rules.rules[i].head
                if head is None:
                    falsum = True
                else:
                    todo.append(head)
        pairs = []
        if l.pred == "Incompatible" and l.positive and len(l.args) == 2:
            incompatible.setdefault(l.args[0], []).append(l.args[1])
            pairs += [(h, l.args[1]) for h in holds.get(l.args[0], ())]
        e = _effect(l)
        if e is not None:
            holds.setdefault(e, []).append(l)
            pairs += [(l, other) for other in incompatible.get(e, ())]
        for h, other in pairs:
            todo.append(normalize(Literal("Holds", (other, h.args[1], h.args[2]), False)))
    consistent = not falsum and not any(complement(l) in lits for l in lits)
    return frozenset(lits), consistent


def _generate(facts, rules, defaults: Iterable[GroundDefault]) -> tuple[frozenset[Literal], bool]:
    lits, ok = naive_closure(facts, rules)
    defaults = list(defaults)
    while True:
        fresh = {d.consequent for d in defaults
                 if d.consequent not in lits and all(p in lits for p in d.prerequisite)}
        if not fresh:
            return lits, ok
        lits, ok = naive_closure(lits | fresh, rules)


def _consistent_with(lits: frozenset[Literal], just: tuple[Literal, ...], rules) -> bool:
    if any(complement(j) in lits for j in just):
        return False
    if all(j in lits for j in just):
        return True
    return naive_closure(lits | set(just), rules)[1]


def relevant_part(program: GroundProgram) -> tuple[list[GroundRule], list[GroundDefault]]:
    """Drop rules and defaults that can never fire or never matter."""
    index = _Rules(program.rules)
    reach, _ = _generate(program.facts, index, program.defaults)
    base, _ = naive_closure(program.facts, index)
    # Every rule is kept: a justification may complete a body that is
    # otherwise unreachable.
    defaults = [
        d for d in program.defaults
        if all(p in reach for p in d.prerequisite) and d.consequent not in base
    ]
    return list(program.rules), defaults


def enumerate_extensions(program: GroundProgram, cap: int = DEFAULT_CAP) -> list[frozenset[Literal]]:
    """Every extension of ``program``, sorted canonically.

    Raises :class:`ResourceLimitError` when more than ``cap`` defaults
    remain after relevance reduction, and :class:`InconsistentFacts` when
    the facts alone are inconsistent.
    """
    facts = frozenset(program.facts)
    base, ok = naive_closure(facts, program.rules)
    if not ok:
        raise InconsistentFacts(InconsistencyReport("complementary", tuple(sorted(base, key=Literal.key)[:2])))
    rules, defaults = relevant_part(program)
    rules = _Rules(rules)
    if len(defaults) > cap:
        raise ResourceLimitError(
            f"{len(defaults)} relevant defaults exceed the enumeration bound of {cap}"
        )

    found: set[frozenset[Literal]] = set()

    def search(usable: tuple, unusable: tuple, open_: tuple) -> None:
        while True:
            lower, lower_ok = _generate(facts, rules, usable)
            if not lower_ok:
                return
            if any(not _consistent_with(lower, d.justifications, rules) for d in usable):
                return
            upper, upper_ok = _generate(facts, rules, usable + open_)
            if upper_ok and any(_consistent_with(upper, d.justifications, rules) for d in unusable):
                return
            # Decisions forced by the bounds: refuted by the lower bound
            # means unusable, consistent with a consistent upper bound
            # means usable.
            forced_out = tuple(d for d in open_ if not _consistent_with(lower, d.justifications, rules))
            rest = tuple(d for d in open_ if d not in forced_out)
            forced_in = ()
            if upper_ok:
                forced_in = tuple(d for d in rest if _consistent_with(upper, d.justifications, rules))
            if not forced_out and not forced_in:
                break
            usable += forced_in
            unusable += forced_out
            open_ = tuple(d for d in rest if d not in forced_in)
        if not open_:
            if _is_extension(lower, facts, rules, defaults):
                found.add(lower)
            return
        d, rest = open_[0], open_[1:]
        search(usable + (d,), unusable, rest)
        search(usable, unusable + (d,), rest)

    search((), (), tuple(defaults))
    return sorted(found, key=lambda e: sorted(l.key() for l in e))


def _is_extension(candidate: frozenset[Literal], facts, rules, defaults) -> bool:
    usable = [d for d in defaults if _consistent_with(candidate, d.justifications, rules)]
    generated, ok = _generate(facts, rules, usable)
    return ok and generated == candidate
