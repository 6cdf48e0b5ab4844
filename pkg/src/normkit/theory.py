"""Rules, defaults and theories over the reified language."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

from .terms import Literal, PredTerm, Var, complement


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    sorts: tuple[str, ...]
    layer: int | None = None

    @property
    def arity(self) -> int:
        return len(self.sorts)


@dataclass(frozen=True)
class StrictRule:
    """``body -> head``.  An empty head is Falsum (an integrity constraint).

    A head with several literals is a conjunction; each conjunct is
    grounded into its own single-headed rule.
    """

    id: str
    body: tuple[Literal, ...]
    head: tuple[Literal, ...]
    tag: str = ""

    @property
    def is_constraint(self) -> bool:
        return not self.head

    def vars(self) -> set[Var]:
        out: set[Var] = set()
        for lit in self.body + self.head:
            out |= lit.vars()
        return out


@dataclass(frozen=True)
class DefaultRule:
    """``prerequisite : justification [not exception] / consequent``.

    For a semi-normal default ``A : B [C]`` the exception is the complement
    of ``C``: the default is blocked once the exception is derivable.
    """

    id: str
    prerequisite: tuple[Literal, ...]
    justification: Literal
    consequent: Literal
    exception: Literal | None = None
    priority: int = 2
    tag: str = ""

    @property
    def is_normal(self) -> bool:
        return self.exception is None and self.justification == self.consequent

    @property
    def justifications(self) -> tuple[Literal, ...]:
        if self.exception is None:
            return (self.justification,)
        return (self.justification, complement(self.exception))

    def vars(self) -> set[Var]:
        out: set[Var] = set()
        lits = self.prerequisite + (self.justification, self.consequent)
        if self.exception is not None:
            lits += (self.exception,)
        for lit in lits:
            out |= lit.vars()
        return out


@dataclass(frozen=True)
class Expansion:
    """A request for a compiled definition (controllable, able_to, ...)."""

    kind: str
    tag: str = ""

    @property
    def id(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Theory:
    sorts: tuple[str, ...] = ()
    constants: Mapping[str, str] = field(default_factory=dict)
    predicates: Mapping[str, PredicateDecl] = field(default_factory=dict)
    variables: Mapping[str, Var] = field(default_factory=dict)
    facts: tuple[Literal, ...] = ()
    rules: tuple[StrictRule, ...] = ()
    defaults: tuple[DefaultRule, ...] = ()
    persistent: tuple[PredTerm, ...] = ()
    backward_persistent: tuple[PredTerm, ...] = ()
    cwa: tuple[str, ...] = ()
    expansions: tuple[Expansion, ...] = ()
    horizon: int | None = None

    @property
    def schema(self) -> dict[str, tuple[str, ...]]:
        return {name: decl.sorts for name, decl in self.predicates.items()}

    @property
    def constraints(self) -> tuple[StrictRule, ...]:
        return tuple(r for r in self.rules if r.is_constraint)

    def constants_of(self, sort: str) -> list[str]:
        return sorted(name for name, s in self.constants.items() if s == sort)

    def rule_ids(self) -> list[str]:
        return (
            [r.id for r in self.rules]
            + [d.id for d in self.defaults]
            + [e.id for e in self.expansions]
        )

    def with_horizon(self, horizon: int) -> "Theory":
        return replace(self, horizon=horizon)

    def merge(self, other: "Theory") -> "Theory":
        """Union of two fragments; ``other``'s horizon wins when set."""
        return Theory(
            sorts=self.sorts + tuple(s for s in other.sorts if s not in self.sorts),
            constants={**self.constants, **other.constants},
            predicates={**self.predicates, **other.predicates},
            variables={**self.variables, **other.variables},
            facts=self.facts + other.facts,
            rules=self.rules + other.rules,
            defaults=self.defaults + other.defaults,
            persistent=self.persistent + other.persistent,
            backward_persistent=self.backward_persistent + other.backward_persistent,
            cwa=self.cwa + other.cwa,
            expansions=self.expansions + other.expansions,
            horizon=other.horizon if other.horizon is not None else self.horizon,
        )
