import pytest
from hypothesis import given, strategies as st

from normkit.errors import SortError
from normkit.terms import (
    ANY, NAME, STATE, Atom, Combine, Const, Literal, Neg, Shift, State, Var, complement, match,
    neg, normalize, substitute_literal, term_key,
)

STOP, CONTROL = Atom("Stop"), Atom("Control")
A, B = Const("A", "agent"), Const("B", "agent")
X, T = Var("X", "agent"), Var("t", STATE)
F = Var("F", NAME)

SCHEMA = {"Holds": (NAME, "agent", STATE), "Must": (NAME, "agent", STATE), "Pcb": (NAME, NAME)}


def holds(p, x, t, positive=True):
    return Literal("Holds", (p, x, t), positive)


@pytest.mark.parametrize("given_lit, expected", [
    (holds(Neg(STOP), B, State(2)), holds(STOP, B, State(2), False)),
    (holds(Neg(Neg(CONTROL)), A, State(0)), holds(CONTROL, A, State(0))),
    (holds(Neg(Atom("On_Normal_Lane")), B, State(1), False), holds(Atom("On_Normal_Lane"), B, State(1))),
])
def test_normalize_examples(given_lit, expected):
    assert normalize(given_lit) == expected


def test_neg_collapses_double_negation():
    assert neg(neg(STOP)) == STOP
    assert neg(STOP) == Neg(STOP)


def test_must_keeps_neg_argument():
    # Must(Neg(F)) is a duty to avoid F, not the absence of a duty.
    lit = Literal("Must", (Neg(STOP), A, State(1)))
    assert normalize(lit) == lit


def test_normalize_reports_sort_position():
    with pytest.raises(SortError) as err:
        normalize(Literal("Holds", (STOP, STOP, State(0))), SCHEMA)
    assert err.value.position == 2


def test_normalize_reports_arity():
    with pytest.raises(SortError):
        normalize(Literal("Pcb", (STOP,)), SCHEMA)


@pytest.mark.parametrize("lit", [
    Literal("Anomaly"),
    holds(STOP, B, State(2), False),
    Literal("Pcb", (STOP, Atom("Brake"))),
])
def test_complement_is_involution(lit):
    assert complement(complement(lit)) == lit
    assert complement(lit).positive != lit.positive


def test_complement_examples():
    assert complement(Literal("Anomaly")) == Literal("Anomaly", (), False)
    assert complement(holds(STOP, B, State(2), False)) == holds(STOP, B, State(2))


def test_match_binds_variables():
    assert match(holds(STOP, X, T), holds(STOP, A, State(2))) == {X: A, T: State(2)}


def test_match_predicate_mismatch():
    assert match(holds(STOP, X, T), Literal("Must", (STOP, A, State(1)))) is None


def test_match_pcb():
    assert match(Literal("Pcb", (F, Atom("Brake"))), Literal("Pcb", (STOP, Atom("Brake")))) == {F: STOP}


def test_match_respects_sorts():
    assert match(Literal("Pcb", (X, Atom("Brake"))), Literal("Pcb", (STOP, Atom("Brake")))) is None
    anything = Var("C", ANY)
    pattern = holds(Combine("Obstacle", anything), X, T)
    assert match(pattern, holds(Combine("Obstacle", A), B, State(0)))[anything] == A
    assert match(pattern, holds(Combine("Obstacle", STOP), B, State(0)))[anything] == STOP


def test_match_shift_inverts_offset():
    pattern = holds(STOP, X, Shift(T, 1))
    assert match(pattern, holds(STOP, A, State(2)))[T] == State(1)
    assert match(pattern, holds(STOP, A, State(0))) is None


def test_substitute_shift():
    g = substitute_literal(holds(STOP, X, Shift(T, -1)), {X: A, T: State(2)})
    assert g == holds(STOP, A, State(1))


def test_match_consistent_bindings():
    pattern = Literal("Pcb", (F, F))
    assert match(pattern, Literal("Pcb", (STOP, STOP))) == {F: STOP}
    assert match(pattern, Literal("Pcb", (STOP, CONTROL))) is None


# -- properties -------------------------------------------------------------------------

names = st.sampled_from([STOP, CONTROL, Atom("Brake"), Combine("Shock", A), Combine("Turn", Atom("Right"))])


def _wrap(p, depth):
    for _ in range(depth):
        p = Neg(p)
    return p


pred_terms = st.builds(_wrap, names, st.integers(0, 4))
literals = st.builds(
    lambda p, x, t, pred, pos: Literal(pred, (p, x, State(t)), pos),
    pred_terms, st.sampled_from([A, B]), st.integers(0, 3), st.sampled_from(["Holds", "Must"]), st.booleans(),
)


@given(literals)
def test_normalize_idempotent(l):
    assert normalize(normalize(l)) == normalize(l)


@given(literals)
def test_normalize_commutes_with_complement(l):
    assert normalize(complement(l)) == complement(normalize(l))


@given(literals)
def test_normalized_holds_has_no_neg_root(l):
    n = normalize(l)
    if n.pred == "Holds":
        assert not isinstance(n.args[0], Neg)


@given(literals, literals)
def test_match_is_structural_congruence(a, b):
    # Equal ground literals match each other with the empty substitution.
    na, nb = normalize(a), normalize(b)
    assert (match(na, nb) == {}) == (na == nb)


@given(st.lists(pred_terms, min_size=2, max_size=6))
def test_term_key_is_total_order(terms):
    keys = [term_key(t) for t in terms]
    assert sorted(keys) == sorted(keys, key=lambda k: k)
    for s, t in zip(terms, terms[1:]):
        assert (term_key(s) == term_key(t)) == (s == t)
