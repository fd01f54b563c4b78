import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synlab import corpus
from synlab.csp import (CnfFormula, Constraint, CspInstance, best_assignment, clause_constraint,
                        cnf_satisfiable_bruteforce, dumps_csp, dumps_dimacs, eval_constraint, fsat,
                        from_cnf, loads_csp, parse_dimacs, satisfying_assignment, value)
from synlab.errors import CapacityError, ParseError, ValidationError


def _value_by_enumeration(phi):
    best = 0
    for v in itertools.product((0, 1), repeat=phi.n_vars):
        best = max(best, sum(c.restrict(v) in c.sat_rows for c in phi.constraints))
    return Fraction(best, phi.n_constraints)


@st.composite
def csps(draw, max_vars=6):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    n = draw(st.integers(1, max_vars))
    m = draw(st.integers(1, 5))
    return CspInstance(n, tuple(corpus.random_constraint(n, rng) for _ in range(m)))


def test_two_variable_or_constraint():
    c = Constraint((2, 4), ("01", "10", "11"))
    assert eval_constraint(c, (0, 0, 1, 0, 0, 0))
    assert not eval_constraint(c, (1, 1, 0, 1, 0, 1))
    assert c.restrict((0, 0, 0, 0, 1, 0)) == "01"


def test_constraint_validation():
    with pytest.raises(ValidationError):
        Constraint((1, 0), ("00",))
    with pytest.raises(ValidationError):
        Constraint((0,), ("00",))
    with pytest.raises(ValidationError):
        Constraint((0,), ("1", "1"))
    with pytest.raises(ValidationError):
        CspInstance(2, (Constraint((2,), ("1",)),))
    with pytest.raises(ValidationError):
        CspInstance(2, ())


def test_assignment_length_checked():
    phi = corpus.contradiction_pair()
    with pytest.raises(ValidationError):
        phi.satisfied_count((0, 1))
    with pytest.raises(ValidationError):
        eval_constraint(Constraint((3,), ("1",)), (0, 1))


def test_contradiction_value():
    phi = corpus.contradiction_pair()
    assert value(phi) == Fraction(1, 2)
    assert satisfying_assignment(phi) is None
    assert phi.satisfied_count(best_assignment(phi)) == 1


def test_clause_constraint_rows():
    c = clause_constraint((3, -5))
    assert c.dep_vars == (2, 4)
    assert set(c.sat_rows) == {"00", "10", "11"}
    assert clause_constraint((1, -1)).sat_rows == ("",)
    assert clause_constraint((2, 2)).dep_vars == (1,)
    with pytest.raises(ValidationError):
        clause_constraint(())


@settings(max_examples=80)
@given(csps())
def test_value_matches_enumeration(phi):
    assert value(phi) == _value_by_enumeration(phi)
    v = best_assignment(phi)
    assert Fraction(phi.satisfied_count(v), phi.n_constraints) == value(phi)


@given(csps(), st.data())
def test_flipping_a_non_dependency_keeps_truth(phi, data):
    c = phi.constraints[0]
    v = data.draw(st.lists(st.integers(0, 1), min_size=phi.n_vars, max_size=phi.n_vars))
    free = [i for i in range(phi.n_vars) if i not in c.dep_vars]
    if free:
        i = data.draw(st.sampled_from(free))
        w = list(v)
        w[i] ^= 1
        assert eval_constraint(c, v) == eval_constraint(c, w)


@settings(max_examples=60)
@given(st.integers(1, 6), st.integers(1, 8), st.integers(0, 10**6))
def test_cnf_translation_preserves_satisfiability(n, m, seed):
    f = corpus.random_cnf(n, m, random.Random(seed), widths=(1, 2, 3))
    phi = from_cnf(f)
    assert (value(phi) == 1) == cnf_satisfiable_bruteforce(f)
    for v in itertools.product((0, 1), repeat=n):
        by_clause = [any(v[abs(lit) - 1] == (lit > 0) for lit in cl) for cl in f.clauses]
        assert phi.satisfied_count(v) == sum(by_clause)


def test_value_cap():
    phi = CspInstance(30, (Constraint((29,), ("1",)),))
    with pytest.raises(CapacityError):
        value(phi)


def test_value_over_block_boundary():
    # 21 variables spans two evaluation blocks; only the all-ones assignment satisfies both
    deps = tuple(range(21))
    phi = CspInstance(21, (Constraint(deps, ("1" * 21,)), Constraint((20,), ("1",))))
    assert value(phi) == 1
    assert satisfying_assignment(phi) == (1,) * 21


def test_fsat():
    phi = CspInstance(3, (Constraint((0, 1), ("00", "11")), Constraint((2,), ("1",))))
    assert fsat(phi) == 2


def test_parse_dimacs_basic():
    f = parse_dimacs("c hello\np cnf 3 2\n1 -3 0\n2\n3 0\n%\n0\n")
    assert f == CnfFormula(3, ((1, -3), (2, 3)))
    assert parse_dimacs(dumps_dimacs(f)) == f


@pytest.mark.parametrize("text, line, message", [
    ("1 2 0\n", 1, "before"),
    ("p cnf 2 1\n1 3 0\n", 2, "out of range"),
    ("p cnf 2 1\n1 x 0\n", 2, "bad literal"),
    ("p cnf 2 2\n1 0\n", 1, "declares 2"),
    ("p cnf 2 1\n0\n", 2, "empty clause"),
    ("p dnf 2 1\n", 1, "malformed"),
    ("p cnf 2 1\np cnf 2 1\n", 2, "duplicate"),
])
def test_parse_dimacs_errors(text, line, message):
    with pytest.raises(ParseError, match=message) as info:
        parse_dimacs(text, source="in.cnf")
    assert info.value.line == line


def test_parse_dimacs_missing_header():
    with pytest.raises(ParseError, match="missing"):
        parse_dimacs("c only comments\n")


def test_empty_clause_allowed_on_request():
    f = parse_dimacs("p cnf 1 1\n0\n", allow_empty_clause=True)
    assert f.clauses == ((),)


@given(csps())
def test_csp_text_roundtrip(phi):
    assert loads_csp(dumps_csp(phi)) == phi


def test_csp_text_handles_empty_rows():
    phi = CspInstance(1, (Constraint((), ("",)), Constraint((0,), ("1",))))
    text = dumps_csp(phi)
    assert "-" in text
    assert loads_csp(text) == phi


@pytest.mark.parametrize("text", [
    "csp 2\n",
    "csp 2 1\nconstraint 1 1\n0 1\n1\n",
    "csp 2 1\nconstraint 1 1\n0\n",
    "csp 2 1\nconstraint 1 1\n0\n11\n",
    "csp 2 1\nconstraint 1 1\n5\n1\n",
])
def test_loads_csp_errors(text):
    with pytest.raises((ParseError, ValidationError)):
        loads_csp(text)
