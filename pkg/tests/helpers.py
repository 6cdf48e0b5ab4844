"""Shared builders for hand-made and random ground programs."""

from __future__ import annotations

import random
from pathlib import Path

from normkit.grounder import GroundDefault, GroundProgram, GroundRule
from normkit.terms import Literal

SCENARIOS = Path(__file__).resolve().parent.parent / "src" / "normkit" / "scenarios"


def lit(text: str) -> Literal:
    """``"p"`` or ``"-p"`` as a propositional literal."""
    if text.startswith("-"):
        return Literal(text[1:], (), False)
    return Literal(text)


def rule(body: str, head: str | None, name: str = "r") -> GroundRule:
    lits = tuple(lit(b) for b in body.split()) if body else ()
    return GroundRule(None if head is None else lit(head), lits, name)


def default(prereq: str, cons: str, exception: str | None = None, priority: int = 2,
            name: str = "d", index: int = 0) -> GroundDefault:
    pre = tuple(lit(p) for p in prereq.split()) if prereq else ()
    c = lit(cons)
    exc = lit(exception) if exception else None
    return GroundDefault(pre, c, c, exc, priority, name, (), "", index)


def program(facts: str = "", rules=(), defaults=()) -> GroundProgram:
    fs = [lit(f) for f in facts.split()] if facts else []
    return GroundProgram.build(fs, rules, defaults)


def random_program(rng: random.Random, semi_normal: float = 0.3, max_defaults: int = 12) -> GroundProgram:
    """A random propositional program with at most 20 atoms."""
    n_atoms = rng.randint(3, 20)
    atoms = [f"p{i}" for i in range(n_atoms)]

    def any_lit() -> str:
        a = rng.choice(atoms)
        return a if rng.random() < 0.5 else "-" + a

    facts = {}
    for _ in range(rng.randint(0, 3)):
        a = any_lit()
        facts[a.lstrip("-")] = a
    rules = []
    for i in range(rng.randint(0, 8)):
        body = " ".join(any_lit() for _ in range(rng.randint(1, 2)))
        head = None if rng.random() < 0.1 else any_lit()
        rules.append(rule(body, head, f"r{i}"))
    defaults = []
    for i in range(rng.randint(1, max_defaults)):
        prereq = " ".join(any_lit() for _ in range(rng.randint(0, 2)))
        exc = any_lit() if rng.random() < semi_normal else None
        defaults.append(default(prereq, any_lit(), exc, rng.randint(0, 3), f"d{i}", i))
    return program(" ".join(facts.values()), rules, defaults)
