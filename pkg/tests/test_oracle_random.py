import itertools
import random

import pytest

from normkit.engine import check_extension, compute_extension
from normkit.errors import InconsistentFacts, NoExtension, ResourceLimitError
from normkit.oracle import enumerate_extensions
from normkit.terms import complement

from helpers import default, program, random_program

SEEDS = range(250)


def closure(lits, rules):
    lits = set(lits)
    changed = True
    while changed:
        changed = False
        for r in rules:
            if r.head is not None and r.head not in lits and all(b in lits for b in r.body):
                lits.add(r.head)
                changed = True
    return lits


def consistent(lits, rules):
    c = closure(lits, rules)
    falsum = any(r.head is None and all(b in c for b in r.body) for r in rules)
    return not falsum and not any(complement(l) in c for l in c)


def brute_force(p):
    """Reiter's definition tried on every subset of defaults as generating set."""
    found = set()
    for k in range(len(p.defaults) + 1):
        for subset in itertools.combinations(p.defaults, k):
            cand = frozenset(closure(set(p.facts) | {d.consequent for d in subset}, p.rules))
            if not consistent(cand, p.rules):
                continue
            usable = [d for d in p.defaults if consistent(cand | set(d.justifications), p.rules)]
            gen = closure(p.facts, p.rules)
            grew = True
            while grew:
                grew = False
                for d in usable:
                    if d.consequent not in gen and all(x in gen for x in d.prerequisite):
                        gen = closure(gen | {d.consequent}, p.rules)
                        grew = True
            if gen == cand:
                found.add(cand)
    return found


@pytest.mark.parametrize("seed", range(120))
def test_enumerator_matches_brute_force(seed):
    # Propositional programs without incompatibility facts, small enough to try every subset.
    p = random_program(random.Random(10_000 + seed), max_defaults=7)
    if not consistent(p.facts, p.rules):
        with pytest.raises(InconsistentFacts):
            enumerate_extensions(p)
        return
    assert set(enumerate_extensions(p)) == brute_force(p)


def test_random_programs_agree():
    counts = {"extension": 0, "none": 0, "inconsistent": 0}
    for seed in SEEDS:
        p = random_program(random.Random(seed))
        try:
            exts = enumerate_extensions(p)
        except InconsistentFacts:
            with pytest.raises(InconsistentFacts):
                compute_extension(p)
            counts["inconsistent"] += 1
            continue
        for e in exts:
            assert check_extension(e, p)[0]
        try:
            ext = compute_extension(p)
        except NoExtension:
            assert exts == []
            counts["none"] += 1
            continue
        ok, report = check_extension(ext.literals, p)
        assert ok, (seed, report)
        assert ext.literals in exts, seed
        counts["extension"] += 1
    assert counts["extension"] >= 200


def test_enumeration_order_independent():
    p = program("quaker republican", defaults=[
        default("quaker", "pacifist", name="q"), default("republican", "-pacifist", name="r", index=1)])
    q = program("quaker republican", defaults=[
        default("republican", "-pacifist", name="r"), default("quaker", "pacifist", name="q", index=1)])
    assert enumerate_extensions(p) == enumerate_extensions(q)


def test_bound_is_enforced():
    defaults = [default("", f"a{i}", name=f"d{i}", index=i) for i in range(25)]
    with pytest.raises(ResourceLimitError):
        enumerate_extensions(program(defaults=defaults))
    assert len(enumerate_extensions(program(defaults=defaults), cap=25)) == 1


@pytest.mark.parametrize("name", ["crash_report", "icy_patch", "tech_problem", "empty"])
def test_bundled_scenarios_agree(scenario_program, name):
    p = scenario_program(name)
    exts = enumerate_extensions(p, cap=60)
    assert exts
    assert compute_extension(p).literals in exts
