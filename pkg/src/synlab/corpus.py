"""Seeded instance generators used by the CLI, the tests and the acceptance run."""

from __future__ import annotations

import itertools
import random

from .automaton import Dfa, random_synchronizing_dfa
from .csp import CnfFormula, Constraint, CspInstance, cnf_satisfiable_bruteforce, value


def random_cnf(n_vars: int, n_clauses: int, rng: random.Random, widths=(3,)) -> CnfFormula:
    """Clauses over distinct variables with random signs; width drawn from ``widths``."""
    clauses = []
    for _ in range(n_clauses):
        width = min(rng.choice(widths), n_vars)
        chosen = sorted(rng.sample(range(1, n_vars + 1), width))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return CnfFormula(n_vars, tuple(clauses))


def satisfiable_3cnf(count: int, seed: int, n_range=(3, 8), m_range=(1, 6)) -> list[CnfFormula]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        f = random_cnf(rng.randint(*n_range), rng.randint(*m_range), rng)
        if cnf_satisfiable_bruteforce(f):
            out.append(f)
    return out


def unsatisfiable_cnf(count: int, seed: int, max_vars: int = 4, max_clauses: int = 6) -> list[CnfFormula]:
    """Unsatisfiable CNFs with clauses of width 1..3.

    With at most six clauses, width-3 clauses alone can never be
    unsatisfiable, so narrower clauses are mixed in.
    """
    rng = random.Random(seed)
    out = []
    seen = set()
    while len(out) < count:
        n = 1 + len(out) % max_vars
        f = random_cnf(n, rng.randint(2, max_clauses), rng, widths=(1, 2, 2, 3, 3))
        key = (n, f.clauses)
        if key not in seen and not cnf_satisfiable_bruteforce(f):
            seen.add(key)
            out.append(f)
    return out


def random_constraint(n_vars: int, rng: random.Random, max_deps: int | None = None,
                      n_rows: int | None = None) -> Constraint:
    d = rng.randint(1, min(n_vars, max_deps or n_vars))
    deps = tuple(sorted(rng.sample(range(n_vars), d)))
    all_rows = ["".join(bits) for bits in itertools.product("01", repeat=d)]
    k = n_rows if n_rows is not None else rng.randint(1, len(all_rows))
    return Constraint(deps, tuple(sorted(rng.sample(all_rows, min(k, len(all_rows))))))


def unsatisfiable_csp(count: int, seed: int, max_vars: int = 3, max_constraints: int = 5) -> list[CspInstance]:
    """Unsatisfiable CSPs with positive value (every constraint has a satisfying row)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, max_vars)
        m = rng.randint(2, max_constraints)
        phi = CspInstance(n, tuple(random_constraint(n, rng) for _ in range(m)))
        if value(phi) < 1:
            out.append(phi)
    return out


def contradiction_pair() -> CspInstance:
    """x1 and not-x1 as two unit constraints (Val = 1/2)."""
    return CspInstance(1, (Constraint((0,), ("1",)), Constraint((0,), ("0",))))


def synchronizing_dfas(count: int, seed: int, n_range=(4, 12), letter_range=(2, 3)) -> list[Dfa]:
    rng = random.Random(seed)
    return [random_synchronizing_dfa(rng.randint(*n_range), rng.randint(*letter_range), rng)
            for _ in range(count)]
