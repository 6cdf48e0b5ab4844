"""Instantiation of a sorted theory over its finite Herbrand universe.

Variables range over the declared constants of their sort and over the
states ``0..horizon``.  Positive body literals whose predicate is never
derived by any rule ("static" predicates such as ``Pcb`` or ``Action``)
are joined against the facts first; an instantiation that falsifies one
of them can never fire and is not emitted.

Besides plain instantiation the grounder adds the completion facts the
language presupposes (``Incompatible(F, Neg(F))``, symmetry of
``Incompatible``, keep-state actions for persistent effects) and compiles
the requested definitions into conjunctive single-headed rules:

* ``controllable``: both directions of the controllability definition,
  the negative one by De Morgan over the finite set of avoidance
  preconditions;
* ``able_to``: the positive direction, and a negative direction obtained
  from the one-action-per-effect hypothesis instead of a full completion;
* ``keep_state_availability``: the unavailability of keep-state actions
  under an uncontrollable incompatible event.
"""

from __future__ import annotations

import itertools
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import CompletionError, GroundingError, ResourceLimitError
from .terms import (
    ANY, NAME, STATE, Atom, Combine, Const, Literal, Neg, Shift, State, Term, Var, is_ground, neg,
    normalize,
    substitute_literal, match, term_key,
)
from .theory import DefaultRule, StrictRule, Theory

DEFAULT_MAX_GROUND = 50_000
KEEP_STATE = "Keep_State"

PERSISTENCE_PRIORITY = 1
CWA_PRIORITY = 5


def _binding_text(subst: tuple) -> str:
    return ",".join(f"{k}={v}" for k, v in subst)


@dataclass(frozen=True)
class GroundRule:
    head: Literal | None  # None is Falsum
    body: tuple[Literal, ...]
    source: str
    subst: tuple[tuple[str, Term], ...] = ()
    tag: str = ""

    @property
    def id(self) -> str:
        return f"{self.source}[{_binding_text(self.subst)}]" if self.subst else self.source

    def binding(self, name: str):
        return dict(self.subst).get(name)


@dataclass(frozen=True)
class GroundDefault:
    prerequisite: tuple[Literal, ...]
    justification: Literal
    consequent: Literal
    exception: Literal | None
    priority: int
    source: str
    subst: tuple[tuple[str, Term], ...] = ()
    tag: str = ""
    decl_index: int = 0

    @property
    def id(self) -> str:
        return f"{self.source}[{_binding_text(self.subst)}]" if self.subst else self.source

    @property
    def justifications(self) -> tuple[Literal, ...]:
        if self.exception is None:
            return (self.justification,)
        return (self.justification, Literal(self.exception.pred, self.exception.args, not self.exception.positive))

    @property
    def is_normal(self) -> bool:
        return self.exception is None and self.justification == self.consequent

    def order_key(self) -> tuple:
        return (self.priority, self.decl_index, tuple((k, term_key(v)) for k, v in self.subst))

    def binding(self, name: str):
        return dict(self.subst).get(name)


@dataclass(frozen=True)
class GroundProgram:
    facts: tuple[Literal, ...]
    rules: tuple[GroundRule, ...] = ()
    defaults: tuple[GroundDefault, ...] = ()
    horizon: int | None = None
    tags: dict = field(default_factory=dict, compare=False)

    def provenance(self, item: GroundRule | GroundDefault) -> tuple[str, dict]:
        return item.source, dict(item.subst)

    @classmethod
    def build(cls, facts: Iterable[Literal], rules: Iterable[GroundRule] = (),
              defaults: Iterable[GroundDefault] = (), horizon: int | None = None) -> "GroundProgram":
        """Assemble a program, normalizing literals and sorting defaults."""
        facts = tuple(dict.fromkeys(normalize(f) for f in facts))
        rules = tuple(
            GroundRule(None if r.head is None else normalize(r.head),
                       tuple(normalize(b) for b in r.body), r.source, r.subst, r.tag)
            for r in rules
        )
        defaults = tuple(sorted(defaults, key=GroundDefault.order_key))
        return cls(facts, rules, defaults, horizon)


# -- completion ---------------------------------------------------------------------


def _index(facts: Iterable[Literal]) -> dict[str, list[Literal]]:
    idx: dict[str, list[Literal]] = defaultdict(list)
    for f in facts:
        if f.positive:
            idx[f.pred].append(f)
    return idx


def effects_of(theory: Theory, facts: Iterable[Literal]) -> list:
    """Every term the theory treats as an effect."""
    out = {}
    for f in facts:
        if not f.positive:
            continue
        if f.pred in ("Effect", "Persistent"):
            out[f.args[0]] = None
        elif f.pred == "Pcb":
            out[f.args[0]] = None
        elif f.pred in ("Precond_Action", "Precond_Av_Event"):
            out[f.args[0]] = None
            out[f.args[1]] = None
    for p in theory.persistent:
        out[p] = None
    return sorted(out, key=term_key)


def completion_facts(theory: Theory) -> tuple[Literal, ...]:
    """Theory facts plus the facts the language presupposes."""
    preds = theory.predicates
    facts = [normalize(f) for f in theory.facts]
    if "Persistent" in preds:
        facts += [Literal("Persistent", (p,)) for p in theory.persistent]
    if "Pcb" in preds and "Action" in preds:
        for p in theory.persistent:
            ks = Combine(KEEP_STATE, p)
            facts += [Literal("Action", (ks,)), Literal("Pcb", (p, ks))]
    if "Incompatible" in preds:
        for f in effects_of(theory, facts):
            facts.append(Literal("Incompatible", (f, neg(f))))
        for f in list(facts):
            if f.pred == "Incompatible" and f.positive:
                facts.append(Literal("Incompatible", (f.args[1], f.args[0])))
    return tuple(dict.fromkeys(facts))


# -- expansions -----------------------------------------------------------------------


def _agent_state_vars(theory: Theory, pred: str, offset: int) -> tuple[Var, Var]:
    decl = theory.predicates.get(pred)
    if decl is None:
        raise GroundingError(f"expansion needs predicate {pred} to be declared")
    return Var("X", decl.sorts[offset]), Var("t", STATE)


def _facts(theory: Theory, facts) -> dict[str, list[Literal]]:
    return _index(completion_facts(theory) if facts is None else facts)


def expand_controllable(theory: Theory, facts: Iterable[Literal] | None = None) -> list[StrictRule]:
    idx = _facts(theory, facts)
    X, t = _agent_state_vars(theory, "Controllable", 1)
    rules: list[StrictRule] = []
    events = sorted({f.args[0] for f in idx.get("Event", [])}, key=term_key)
    for v in events:
        ev = Literal("Event", (v,))
        holds = Literal("Holds", (v, X, t))
        ctrl = Literal("Controllable", (v, X, t))
        pred = Literal("Predictable", (v, X, t))
        precs = []
        for pcb in idx.get("Pcb", []):
            if pcb.args[1] != v:
                continue
            for pre in idx.get("Precond_Av_Event", []):
                if pre.args[0] == pcb.args[0]:
                    precs.append((pcb, pre))
        precs.sort(key=lambda pair: (pair[0].key(), pair[1].key()))
        rules.append(StrictRule(f"controllable.absent({v})", (ev, normalize(Literal("Holds", (v, X, t), False))), (ctrl,), "ability"))
        body = [ev, pred]
        for pcb, pre in precs:
            body += [pcb, pre, normalize(Literal("Holds", (pre.args[1], X, t)))]
        rules.append(StrictRule(f"controllable.avoid({v})", tuple(dict.fromkeys(body)), (ctrl,), "ability"))
        not_ctrl = Literal("Controllable", (v, X, t), False)
        rules.append(StrictRule(f"controllable.unpredictable({v})",
                                (ev, normalize(holds), Literal("Predictable", (v, X, t), False)), (not_ctrl,), "ability"))
        for pcb, pre in precs:
            rules.append(StrictRule(
                f"controllable.precondition({v},{pre.args[1]})",
                (ev, normalize(holds), pcb, pre, normalize(Literal("Holds", (pre.args[1], X, t), False))),
                (not_ctrl,), "ability",
            ))
    return rules


def producers(theory: Theory, facts: Iterable[Literal] | None = None) -> dict:
    """Map each effect to its producing actions (keep-state exception noted separately)."""
    idx = _facts(theory, facts)
    actions = {f.args[0] for f in idx.get("Action", [])}
    out: dict = defaultdict(list)
    for pcb in idx.get("Pcb", []):
        f, act = pcb.args
        if act in actions:
            out[f].append(act)
    return {f: sorted(acts, key=term_key) for f, acts in out.items()}


def _exempt(effect, act, persistent) -> bool:
    return act == Combine(KEEP_STATE, effect) and effect in persistent


def uniqueness_violations(theory: Theory, facts: Iterable[Literal] | None = None) -> dict:
    facts = completion_facts(theory) if facts is None else tuple(facts)
    persistent = {f.args[0] for f in facts if f.pred == "Persistent" and f.positive} | set(theory.persistent)
    out = {}
    for effect, acts in producers(theory, facts).items():
        regular = [a for a in acts if not _exempt(effect, a, persistent)]
        if len(regular) > 1:
            out[effect] = regular
    return out


def expand_able_to(theory: Theory, facts: Iterable[Literal] | None = None) -> list[StrictRule]:
    facts = completion_facts(theory) if facts is None else tuple(facts)
    bad = uniqueness_violations(theory, facts)
    if bad:
        effect = sorted(bad, key=term_key)[0]
        raise CompletionError(effect, bad[effect])
    X, t = _agent_state_vars(theory, "Able_To", 1)
    F, Act = Var("F", NAME), Var("Act", NAME)
    rules = [StrictRule(
        "able_to",
        (Literal("Action", (Act,)), Literal("Available", (Act, F, X, t)), Literal("Pcb", (F, Act))),
        (Literal("Able_To", (F, X, t)),), "ability",
    )]
    prods = producers(theory, facts)
    effect_facts = {f.args[0] for f in facts if f.pred == "Effect" and f.positive}
    for effect in effects_of(theory, facts):
        head = (Literal("Able_To", (effect, X, t), False),)
        acts = prods.get(effect, [])
        if acts:
            body = []
            for act in acts:
                body += [Literal("Pcb", (effect, act)), Literal("Available", (act, effect, X, t), False)]
            rules.append(StrictRule(f"able_to.completion({effect})", tuple(body), head, "ability"))
        else:
            body = (Literal("Effect", (effect,)),) if effect in effect_facts else ()
            rules.append(StrictRule(f"able_to.none({effect})", body, head, "ability"))
    return rules


def expand_keepstate_availability(theory: Theory, facts: Iterable[Literal] | None = None) -> list[StrictRule]:
    idx = _facts(theory, facts)
    X, t = _agent_state_vars(theory, "Available", 2)
    events = {f.args[0] for f in idx.get("Event", [])}
    rules = []
    witnesses = []
    for pcb in idx.get("Pcb", []):
        f2, v = pcb.args
        if v not in events:
            continue
        for inc in idx.get("Incompatible", []):
            if inc.args[1] == f2:
                witnesses.append((inc.args[0], f2, v))
    for f, f2, v in sorted(set(witnesses), key=lambda w: tuple(term_key(x) for x in w)):
        rules.append(StrictRule(
            f"keep_state_availability({f},{f2},{v})",
            (Literal("Pcb", (f2, v)), Literal("Event", (v,)), Literal("Incompatible", (f, f2)),
             Literal("Controllable", (v, X, t), False)),
            (Literal("Available", (Combine(KEEP_STATE, f), f, X, t), False),),
            "ability",
        ))
    return rules


EXPANDERS = {
    "controllable": expand_controllable,
    "able_to": expand_able_to,
    "keep_state_availability": expand_keepstate_availability,
}


def generated_defaults(theory: Theory) -> list[DefaultRule]:
    out = []
    if theory.backward_persistent:
        decl = theory.predicates.get("Holds")
        if decl is None:
            raise GroundingError("backward persistence needs Holds to be declared")
        X, t = Var("X", decl.sorts[1]), Var("t", STATE)
        for p in theory.backward_persistent:
            later = normalize(Literal("Holds", (p, X, Shift(t, 1))))
            now = normalize(Literal("Holds", (p, X, t)))
            out.append(DefaultRule(f"persistence_bwd({p})", (later,), now, now, None,
                                   PERSISTENCE_PRIORITY, "persistence"))
    for pred in theory.cwa:
        decl = theory.predicates[pred]
        vs = tuple(Var(f"V{i}", s) for i, s in enumerate(decl.sorts))
        lit = Literal(pred, vs, False)
        out.append(DefaultRule(f"cwa({pred})", (), lit, lit, None, CWA_PRIORITY, "cwa"))
    return out


# -- instantiation ------------------------------------------------------------------------


def _name_subterms(term, out: set) -> None:
    if isinstance(term, (Atom, Combine, Neg)) and is_ground(term):
        out.add(term)
    if isinstance(term, Combine):
        _name_subterms(term.arg, out)
    elif isinstance(term, Neg):
        _name_subterms(term.inner, out)


def name_universe(theory: Theory, facts: Iterable[Literal], literals: Iterable[Literal] = ()) -> set:
    """Declared name constants plus every ground name term mentioned anywhere.

    Compound names such as ``Combine(Tech_Pb, Brake)`` only enter the
    universe when a fact or a rule mentions them, which keeps it finite.
    """
    out: set = {Atom(n) for n in theory.constants_of(NAME)}
    for lit in itertools.chain(facts, literals):
        for a in lit.args:
            _name_subterms(a, out)
    for p in theory.persistent + theory.backward_persistent:
        _name_subterms(p, out)
    return out


class _Instantiator:
    def __init__(self, theory: Theory, facts: tuple[Literal, ...], static: set[str],
                 literals: Iterable[Literal] = ()):
        self.horizon = theory.horizon
        self.theory = theory
        self.index = _index(facts)
        self.fact_set = set(facts)
        self.static = static
        self.names = name_universe(theory, facts, literals)
        self.domains: dict[str, list[Term]] = {}

    def domain(self, sort: str) -> list[Term]:
        if sort not in self.domains:
            if sort == STATE:
                if self.horizon is None:
                    raise GroundingError("no horizon declared: cannot enumerate states")
                values: list[Term] = [State(i) for i in range(self.horizon + 1)]
            elif sort == ANY:
                values = list(self.names) + [
                    Const(n, s) for n, s in self.theory.constants.items() if s != NAME
                ]
            elif sort == NAME:
                values = list(self.names)
            else:
                values = [Const(n, sort) for n in self.theory.constants_of(sort)]
            self.domains[sort] = sorted(values, key=term_key)
        return self.domains[sort]

    def substitutions(self, body: tuple[Literal, ...], others: tuple[Literal, ...], what: str) -> Iterator[dict]:
        joins = [l for l in body if l.positive and l.pred in self.static and not l.is_ground]
        ground_static = [l for l in body if l.positive and l.pred in self.static and l.is_ground]
        for l in ground_static:
            if normalize(l) not in self.fact_set:
                return
        all_vars: set[Var] = set()
        for l in body + others:
            all_vars |= l.vars()

        def join(i: int, subst: dict) -> Iterator[dict]:
            if i == len(joins):
                yield subst
                return
            pattern = substitute_literal(joins[i], subst)
            for fact in self.index.get(pattern.pred, ()):
                s = match(pattern, fact, subst)
                if s is not None:
                    yield from join(i + 1, s)

        seen = set()
        for partial in join(0, {}):
            free = sorted((v for v in all_vars if v not in partial), key=lambda v: v.name)
            domains = []
            for v in free:
                dom = self.domain(v.sort)
                if not dom:
                    raise GroundingError(f"sort {v.sort} has no constants (needed by variable {v.name} in {what})")
                domains.append(dom)
            for values in itertools.product(*domains):
                subst = dict(partial)
                subst.update(zip(free, values))
                key = tuple(sorted((v.name, term_key(val)) for v, val in subst.items()))
                if key in seen:
                    continue
                seen.add(key)
                yield subst

    def ground(self, lit: Literal, subst: dict) -> Literal | None:
        g = substitute_literal(lit, subst)
        for a in g.args:
            if isinstance(a, State) and not (0 <= a.value <= (self.horizon if self.horizon is not None else a.value)):
                return None
        return normalize(g)


def _subst_key(subst: dict) -> tuple:
    return tuple(sorted(((v.name, val) for v, val in subst.items()), key=lambda kv: kv[0]))


def static_predicates(theory: Theory, rules: Iterable[StrictRule], defaults: Iterable[DefaultRule]) -> set[str]:
    # Holds is also derived by incompatibility propagation in the engine.
    derived = {"Holds"}
    for r in rules:
        derived |= {h.pred for h in r.head}
    for d in defaults:
        derived.add(d.consequent.pred)
    return set(theory.predicates) - derived


def ground_theory(theory: Theory, max_ground: int | None = None) -> GroundProgram:
    """Instantiate every rule and default of ``theory``.

    ``max_ground`` caps the number of ground defaults; it defaults to the
    ``NORMKIT_MAX_GROUND`` environment variable, then to 50,000.
    """
    if max_ground is None:
        max_ground = int(os.environ.get("NORMKIT_MAX_GROUND", DEFAULT_MAX_GROUND))
    facts = completion_facts(theory)
    rules = list(theory.rules)
    for exp in theory.expansions:
        rules += EXPANDERS[exp.kind](theory, facts)
    defaults = list(theory.defaults) + generated_defaults(theory)
    static = static_predicates(theory, rules, defaults)
    mentioned = [l for r in rules for l in r.body + r.head]
    mentioned += [l for d in defaults for l in d.prerequisite + (d.justification, d.consequent)]
    inst = _Instantiator(theory, facts, static, mentioned)

    for item in list(rules) + defaults:
        for v in sorted(item.vars(), key=lambda v: v.name):
            if not inst.domain(v.sort):
                raise GroundingError(f"sort {v.sort} has no constants (needed by variable {v.name} in {item.id})")

    ground_rules: list[GroundRule] = []
    for rule in rules:
        for subst in inst.substitutions(rule.body, rule.head, rule.id):
            body = [inst.ground(b, subst) for b in rule.body]
            if any(b is None for b in body):
                continue
            key = _subst_key(subst)
            heads = [inst.ground(h, subst) for h in rule.head] if rule.head else [None]
            for head in heads:
                if rule.head and head is None:
                    continue
                ground_rules.append(GroundRule(head, tuple(body), rule.id, key, rule.tag))

    ground_defaults: list[GroundDefault] = []
    for index, d in enumerate(defaults):
        others = (d.justification, d.consequent) + ((d.exception,) if d.exception else ())
        for subst in inst.substitutions(d.prerequisite, others, d.id):
            prereq = [inst.ground(p, subst) for p in d.prerequisite]
            just, cons = inst.ground(d.justification, subst), inst.ground(d.consequent, subst)
            exc = inst.ground(d.exception, subst) if d.exception else None
            if any(p is None for p in prereq) or just is None or cons is None or (d.exception and exc is None):
                continue
            ground_defaults.append(GroundDefault(tuple(prereq), just, cons, exc, d.priority, d.id,
                                                 _subst_key(subst), d.tag, index))
            if len(ground_defaults) > max_ground:
                raise ResourceLimitError(
                    f"more than {max_ground} ground defaults; raise --max-ground to continue"
                )
    ground_defaults.sort(key=GroundDefault.order_key)
    return GroundProgram(facts, tuple(ground_rules), tuple(ground_defaults), theory.horizon)
