"""Boolean CSP instances in the satisfying-rows representation.

A constraint is stored as its dependency set (sorted variable indices)
plus the explicit list of satisfying assignments restricted to it, each a
``'0'``/``'1'`` string aligned with the dependency set.  Variables are
0-based: variable ``i`` is bit ``i`` of an assignment.  DIMACS literals are
1-based and signed, as usual.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import CapacityError, ParseError, ValidationError

DEFAULT_BRUTE_FORCE_CAP = 24
_BLOCK_BITS = 20


@dataclass(frozen=True)
class Constraint:
    dep_vars: tuple[int, ...]
    sat_rows: tuple[str, ...]

    def __post_init__(self):
        deps = tuple(int(i) for i in self.dep_vars)
        if any(i < 0 for i in deps):
            raise ValidationError(f"negative variable index in {deps}")
        if list(deps) != sorted(set(deps)):
            raise ValidationError(f"dep_vars must be distinct and ascending, got {deps}")
        rows = tuple(self.sat_rows)
        d = len(deps)
        for row in rows:
            if len(row) != d or set(row) - {"0", "1"}:
                raise ValidationError(f"sat row {row!r} is not a {d}-bit string")
        if len(set(rows)) != len(rows):
            raise ValidationError("sat rows must be pairwise distinct")
        object.__setattr__(self, "dep_vars", deps)
        object.__setattr__(self, "sat_rows", rows)

    @cached_property
    def row_set(self) -> frozenset[str]:
        return frozenset(self.sat_rows)

    def restrict(self, v: Sequence[int]) -> str:
        return "".join("1" if v[i] else "0" for i in self.dep_vars)


@dataclass(frozen=True)
class CspInstance:
    n_vars: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.n_vars < 0:
            raise ValidationError(f"n_vars must be >= 0, got {self.n_vars}")
        if not self.constraints:
            raise ValidationError("a CSP instance needs at least one constraint")
        for j, c in enumerate(self.constraints):
            if c.dep_vars and c.dep_vars[-1] >= self.n_vars:
                raise ValidationError(f"constraint {j} uses variable {c.dep_vars[-1]} "
                                      f">= n_vars={self.n_vars}")

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def satisfied_count(self, v: Sequence[int]) -> int:
        _check_assignment(v, self.n_vars)
        return sum(c.restrict(v) in c.row_set for c in self.constraints)


@dataclass(frozen=True)
class CnfFormula:
    n_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        for j, clause in enumerate(clauses):
            for lit in clause:
                if lit == 0 or abs(lit) > self.n_vars:
                    raise ValidationError(f"clause {j}: literal {lit} out of range for {self.n_vars} variables")
        object.__setattr__(self, "clauses", clauses)


def _check_assignment(v, n_vars):
    if len(v) != n_vars:
        raise ValidationError(f"assignment has length {len(v)}, instance has {n_vars} variables")


def eval_constraint(c: Constraint, v: Sequence[int], n_vars: int | None = None) -> bool:
    if n_vars is not None:
        _check_assignment(v, n_vars)
    elif c.dep_vars and c.dep_vars[-1] >= len(v):
        raise ValidationError(f"assignment of length {len(v)} misses variable {c.dep_vars[-1]}")
    return c.restrict(v) in c.row_set


def _counts_block(phi: CspInstance, lo: int, hi: int) -> np.ndarray:
    assignments = np.arange(lo, hi, dtype=np.int64)
    counts = np.zeros(hi - lo, dtype=np.int32)
    for c in phi.constraints:
        d = len(c.dep_vars)
        lookup = np.zeros(1 << d, dtype=np.int32)
        for row in c.sat_rows:
            lookup[int(row, 2) if row else 0] = 1
        code = np.zeros(hi - lo, dtype=np.int64)
        for var in c.dep_vars:
            code = (code << 1) | ((assignments >> var) & 1)
        counts += lookup[code]
    return counts


def _check_cap(phi, cap):
    if phi.n_vars > cap:
        raise CapacityError(f"brute force over {phi.n_vars} variables exceeds the cap of {cap}")


def _best_assignment(phi: CspInstance, cap: int) -> tuple[int, int]:
    _check_cap(phi, cap)
    total = 1 << phi.n_vars
    block = 1 << _BLOCK_BITS
    best, best_at = -1, 0
    for lo in range(0, total, block):
        counts = _counts_block(phi, lo, min(total, lo + block))
        i = int(np.argmax(counts))
        if counts[i] > best:
            best, best_at = int(counts[i]), lo + i
            if best == phi.n_constraints:
                break
    return best, best_at


def _bits(a: int, n: int) -> tuple[int, ...]:
    return tuple((a >> i) & 1 for i in range(n))


def value(phi: CspInstance, cap: int = DEFAULT_BRUTE_FORCE_CAP) -> Fraction:
    """Maximum fraction of simultaneously satisfiable constraints, exactly."""
    best, _ = _best_assignment(phi, cap)
    return Fraction(best, phi.n_constraints)


def best_assignment(phi: CspInstance, cap: int = DEFAULT_BRUTE_FORCE_CAP) -> tuple[int, ...]:
    """An assignment attaining Val; the numerically smallest one among ties."""
    return _bits(_best_assignment(phi, cap)[1], phi.n_vars)


def satisfying_assignment(phi: CspInstance, cap: int = DEFAULT_BRUTE_FORCE_CAP) -> tuple[int, ...] | None:
    best, at = _best_assignment(phi, cap)
    return _bits(at, phi.n_vars) if best == phi.n_constraints else None


def fsat(phi: CspInstance) -> int:
    return max(len(c.sat_rows) for c in phi.constraints)


def clause_constraint(clause: Sequence[int]) -> Constraint:
    """Constraint for one disjunction of signed 1-based literals."""
    if not clause:
        raise ValidationError("empty clause has no satisfying row")
    lits = set(clause)
    if any(-lit in lits for lit in lits):
        return Constraint((), ("",))
    deps = sorted({abs(lit) - 1 for lit in lits})
    falsifying = "".join("1" if -(i + 1) in lits else "0" for i in deps)
    rows = tuple("".join(bits) for bits in itertools.product("01", repeat=len(deps))
                 if "".join(bits) != falsifying)
    return Constraint(tuple(deps), rows)


def from_cnf(f: CnfFormula) -> CspInstance:
    return CspInstance(f.n_vars, tuple(clause_constraint(c) for c in f.clauses))


def cnf_satisfiable_bruteforce(f: CnfFormula) -> bool:
    """Plain enumeration over all assignments; oracle for small formulas."""
    for v in itertools.product((False, True), repeat=f.n_vars):
        if all(any(v[abs(lit) - 1] == (lit > 0) for lit in c) for c in f.clauses):
            return True
    return False


# -- DIMACS ------------------------------------------------------------------

def parse_dimacs(text: str, source: str | None = None, allow_empty_clause: bool = False) -> CnfFormula:
    header = None
    n_vars = n_clauses = 0
    clauses = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise ParseError("duplicate problem line", lineno, source)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}, expected 'p cnf <vars> <clauses>'",
                                 lineno, source)
            try:
                n_vars, n_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"non-integer counts in header {line!r}", lineno, source) from None
            if n_vars < 0 or n_clauses < 0:
                raise ParseError("negative counts in header", lineno, source)
            header = lineno
            continue
        if header is None:
            raise ParseError("clause data before 'p cnf' header", lineno, source)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno, source) from None
            if lit == 0:
                if not current and not allow_empty_clause:
                    raise ParseError("empty clause", lineno, source)
                clauses.append(tuple(dict.fromkeys(current)))
                current = []
            elif abs(lit) > n_vars:
                raise ParseError(f"literal {lit} out of range for {n_vars} variables", lineno, source)
            else:
                current.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", source=source)
    if current:
        clauses.append(tuple(dict.fromkeys(current)))
    if len(clauses) != n_clauses:
        raise ParseError(f"header declares {n_clauses} clauses, found {len(clauses)}", header, source)
    return CnfFormula(n_vars, tuple(clauses))


def dumps_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.n_vars} {len(f.clauses)}"]
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


# -- CSP text format ---------------------------------------------------------

def dumps_csp(phi: CspInstance) -> str:
    lines = [f"csp {phi.n_vars} {phi.n_constraints}"]
    for c in phi.constraints:
        lines.append(f"constraint {len(c.dep_vars)} {len(c.sat_rows)}")
        lines.append(" ".join(map(str, c.dep_vars)) or "-")
        lines.extend(row or "-" for row in c.sat_rows)
    return "\n".join(lines) + "\n"


def loads_csp(text: str, source: str | None = None) -> CspInstance:
    """Parse the ``csp``/``constraint`` block format; ``-`` stands for an empty line."""
    lines = [(i, raw.strip()) for i, raw in enumerate(text.splitlines(), 1)]
    lines = [(i, s) for i, s in lines if s and not s.startswith("#")]
    pos = 0

    def take(what):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else None
            raise ParseError(f"unexpected end of input, expected {what}", last, source)
        pos += 1
        return lines[pos - 1]

    def ints(tokens, lineno):
        try:
            return [int(t) for t in tokens]
        except ValueError:
            raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno, source) from None

    lineno, header = take("header")
    parts = header.split()
    if len(parts) != 3 or parts[0] != "csp":
        raise ParseError(f"expected header 'csp <N> <M>', got {header!r}", lineno, source)
    n_vars, m = ints(parts[1:], lineno)
    constraints = []
    for _ in range(m):
        lineno, line = take("constraint line")
        parts = line.split()
        if len(parts) != 3 or parts[0] != "constraint":
            raise ParseError(f"expected 'constraint <d> <K>', got {line!r}", lineno, source)
        d, k = ints(parts[1:], lineno)
        lineno, line = take("dependency list")
        deps = [] if line == "-" else ints(line.split(), lineno)
        if len(deps) != d:
            raise ParseError(f"expected {d} variable indices, got {len(deps)}", lineno, source)
        rows = []
        for _ in range(k):
            lineno, line = take("satisfying row")
            rows.append("" if line == "-" else line)
        try:
            constraints.append(Constraint(tuple(deps), tuple(rows)))
        except ValidationError as exc:
            raise ParseError(str(exc), lineno, source) from None
    if pos != len(lines):
        raise ParseError("trailing content after last constraint", lines[pos][0], source)
    try:
        return CspInstance(n_vars, tuple(constraints))
    except ValidationError as exc:
        raise ParseError(str(exc), source=source) from None
