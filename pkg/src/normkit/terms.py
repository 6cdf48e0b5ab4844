"""Reified term language: predicate-name terms, literals, matching.

Predicate names are first-order terms so that rules can quantify over
them.  ``Combine(Q, Y)`` turns a binary predicate into a name usable as
the first argument of ``Holds``; ``Neg(P)`` names the complement of ``P``.
``Holds(Neg(P), X, t)`` and ``not Holds(P, X, t)`` denote the same literal
and :func:`normalize` maps the former onto the latter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .errors import SortError

NAME = "name"
STATE = "state"
# Variables of this sort match a term of any sort (used inside Combine).
ANY = "any"

# Predicates whose first argument is a name term subject to Neg stripping.
NEG_NORMALIZED = frozenset({"Holds"})


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Combine:
    functor: str
    arg: "Term"

    def __str__(self) -> str:
        return f"Combine({self.functor}, {self.arg})"


@dataclass(frozen=True, slots=True)
class Neg:
    inner: "PredTerm"

    def __str__(self) -> str:
        return f"Neg({self.inner})"


@dataclass(frozen=True, slots=True)
class Const:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class State:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Shift:
    """A state variable plus a constant offset (``t+1``, ``t-1``)."""

    var: Var
    offset: int

    def __str__(self) -> str:
        if self.offset == 0:
            return self.var.name
        sign = "+" if self.offset > 0 else "-"
        return f"{self.var.name}{sign}{abs(self.offset)}"


PredTerm = Union[Atom, Combine, Neg]
Term = Union[Atom, Combine, Neg, Const, Var, State, Shift]


def neg(p: PredTerm) -> PredTerm:
    """Negate a predicate name, collapsing double negation."""
    if isinstance(p, Neg):
        return p.inner
    return Neg(p)


def sort_of(term: Term) -> str:
    if isinstance(term, (Atom, Combine, Neg)):
        return NAME
    if isinstance(term, (Const, Var)):
        return term.sort
    return STATE


def is_ground(term: Term) -> bool:
    if isinstance(term, (Var, Shift)):
        return False
    if isinstance(term, Combine):
        return is_ground(term.arg)
    if isinstance(term, Neg):
        return is_ground(term.inner)
    return True


def term_vars(term: Term) -> set[Var]:
    if isinstance(term, Var):
        return {term}
    if isinstance(term, Shift):
        return {term.var}
    if isinstance(term, Combine):
        return term_vars(term.arg)
    if isinstance(term, Neg):
        return term_vars(term.inner)
    return set()


def term_key(term: Term) -> tuple:
    """Total order on terms, used for deterministic output and priorities."""
    if isinstance(term, State):
        return (0, term.value)
    if isinstance(term, Const):
        return (1, term.sort, term.name)
    if isinstance(term, Atom):
        return (2, term.name)
    if isinstance(term, Combine):
        return (3, term.functor, term_key(term.arg))
    if isinstance(term, Neg):
        return (4, term_key(term.inner))
    if isinstance(term, Var):
        return (5, term.name)
    return (6, term.var.name, term.offset)


def normalize_term(term: Term) -> Term:
    if isinstance(term, Neg):
        inner = normalize_term(term.inner)
        return neg(inner)
    if isinstance(term, Combine):
        return Combine(term.functor, normalize_term(term.arg))
    return term


@dataclass(frozen=True, slots=True)
class Literal:
    pred: str
    args: tuple = ()
    positive: bool = True

    def __str__(self) -> str:
        body = self.pred
        if self.args:
            body += "(" + ", ".join(str(a) for a in self.args) + ")"
        return body if self.positive else "¬" + body

    def key(self) -> tuple:
        return (self.pred, tuple(term_key(a) for a in self.args), not self.positive)

    @property
    def is_ground(self) -> bool:
        return all(is_ground(a) for a in self.args)

    def vars(self) -> set[Var]:
        out: set[Var] = set()
        for a in self.args:
            out |= term_vars(a)
        return out


def complement(lit: Literal) -> Literal:
    return Literal(lit.pred, lit.args, not lit.positive)


def normalize(lit: Literal, schema: Mapping[str, tuple[str, ...]] | None = None) -> Literal:
    """Return the canonical form of ``lit``.

    ``schema`` maps predicate names to argument sorts; when given, the
    literal is sort-checked and a :class:`SortError` names the first
    offending argument position (1-based).
    """
    if schema is not None:
        check_sorts(lit, schema)
    args = tuple(normalize_term(a) for a in lit.args)
    positive = lit.positive
    if lit.pred in NEG_NORMALIZED and args and isinstance(args[0], Neg):
        args = (args[0].inner,) + args[1:]
        positive = not positive
    return Literal(lit.pred, args, positive)


def check_sorts(lit: Literal, schema: Mapping[str, tuple[str, ...]]) -> None:
    if lit.pred not in schema:
        raise SortError(f"unknown predicate {lit.pred}")
    sorts = schema[lit.pred]
    if len(sorts) != len(lit.args):
        raise SortError(
            f"{lit.pred} expects {len(sorts)} arguments, got {len(lit.args)}"
        )
    for i, (arg, expected) in enumerate(zip(lit.args, sorts), start=1):
        actual = sort_of(arg)
        if actual != expected:
            raise SortError(
                f"argument {i} of {lit.pred} has sort {actual}, expected {expected}",
                position=i,
            )
        if isinstance(arg, Neg) and sort_of(arg.inner) != NAME:
            raise SortError(f"argument {i} of {lit.pred}: Neg applies to names only", position=i)


Subst = dict


def substitute(term: Term, subst: Mapping[Var, Term]) -> Term:
    if isinstance(term, Var):
        return subst.get(term, term)
    if isinstance(term, Shift):
        value = subst.get(term.var)
        if isinstance(value, State):
            return State(value.value + term.offset)
        return term
    if isinstance(term, Combine):
        return Combine(term.functor, substitute(term.arg, subst))
    if isinstance(term, Neg):
        return neg(substitute(term.inner, subst))
    return term


def substitute_literal(lit: Literal, subst: Mapping[Var, Term]) -> Literal:
    return Literal(lit.pred, tuple(substitute(a, subst) for a in lit.args), lit.positive)


def _match_term(pattern: Term, ground: Term, subst: dict) -> bool:
    if isinstance(pattern, Var):
        if pattern.sort != ANY and sort_of(ground) != pattern.sort:
            return False
        bound = subst.get(pattern)
        if bound is None:
            subst[pattern] = ground
            return True
        return bound == ground
    if isinstance(pattern, Shift):
        if not isinstance(ground, State):
            return False
        value = State(ground.value - pattern.offset)
        if value.value < 0:
            return False
        return _match_term(pattern.var, value, subst)
    if isinstance(pattern, Combine):
        return (
            isinstance(ground, Combine)
            and pattern.functor == ground.functor
            and _match_term(pattern.arg, ground.arg, subst)
        )
    if isinstance(pattern, Neg):
        return isinstance(ground, Neg) and _match_term(pattern.inner, ground.inner, subst)
    return pattern == ground


def match(pattern: Literal, ground: Literal, subst: Mapping[Var, Term] | None = None) -> dict | None:
    """Sort-respecting one-way matching of ``pattern`` onto a ground literal.

    Returns the extended substitution, or ``None`` when no substitution
    makes the two literals equal.
    """
    if (
        pattern.pred != ground.pred
        or pattern.positive != ground.positive
        or len(pattern.args) != len(ground.args)
    ):
        return None
    out = dict(subst) if subst else {}
    for p, g in zip(pattern.args, ground.args):
        if not _match_term(p, g, out):
            return None
    return out
