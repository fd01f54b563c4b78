"""Satisfiable/unsatisfiable length-gap report for reduced instances."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .automaton import StateSet, image
from .csp import CspInstance, satisfying_assignment, value
from .errors import CapacityError
from .exact import shortest_reset, shortest_sync_of_set
from .gadgets import assignment_certificate, reduce

COLUMNS = ("instance", "N", "M", "states", "val", "upper", "lower", "gap", "status")


@dataclass
class GapReportRow:
    instance: str
    n_vars: int
    n_constraints: int
    states: int = 0
    val: Fraction | None = None
    upper: Fraction | None = None
    lower: Fraction | None = None
    status: str = "ok"
    violations: list[str] = field(default_factory=list)

    @property
    def gap(self) -> float | None:
        if self.upper is None or self.lower is None or self.lower == 0:
            return None
        return float(self.upper / self.lower)

    def csv_row(self) -> list[str]:
        def fmt(x):
            return "unknown" if x is None else str(x)
        gap = "unknown" if self.gap is None else f"{self.gap:.6f}"
        return [self.instance, str(self.n_vars), str(self.n_constraints), str(self.states),
                fmt(self.val), fmt(self.upper), fmt(self.lower), gap, self.status]


def gap_row(instance: str, phi: CspInstance, mode: str = "tree", from_cnf: bool = False,
            budget: int | None = None) -> GapReportRow:
    """Build, measure and check one instance; never raises on budget trouble."""
    n = phi.n_vars
    row = GapReportRow(instance, n, phi.n_constraints)
    try:
        out = reduce(phi, mode)
    except CapacityError as exc:
        row.status = f"capacity: {exc}"
        return row
    dfa = out.dfa
    row.states = dfa.n_states
    try:
        row.val = value(phi)
    except CapacityError:
        row.val = None

    satisfiable = row.val == 1
    if satisfiable:
        v = satisfying_assignment(phi)
        cert = assignment_certificate(v)
        if image(dfa, StateSet.full(dfa.n_states), cert).bits != 1 << out.sink:
            row.violations.append("2v0 certificate does not replay to the sink")
        row.upper = Fraction(len(cert))

    value_lower = None
    if row.val:
        value_lower = Fraction(n + 1) / row.val
        try:
            w = shortest_sync_of_set(dfa, out.root_and_sink, budget=budget)
        except CapacityError:
            w = None
        else:
            if w is None or len(w) < value_lower:
                row.violations.append(f"roots synchronize in {None if w is None else len(w)} "
                                      f"< (N+1)/Val = {value_lower}")

    exact = None
    try:
        cert = shortest_reset(dfa, budget=budget)
    except CapacityError:
        row.status = "budget"
    else:
        if cert is None:
            if not out.degenerate:
                row.violations.append("reduction output is not synchronizing")
        else:
            exact = Fraction(cert.length)
            if image(dfa, StateSet.full(dfa.n_states), cert.word).bits.bit_count() != 1:
                row.violations.append("exact certificate does not replay")

    if exact is not None:
        row.upper = exact
        row.lower = exact
        if satisfiable and exact > n + 2:
            row.violations.append(f"Syn = {exact} exceeds N+2 = {n + 2}")
        if value_lower is not None and exact < value_lower:
            row.violations.append(f"Syn = {exact} below (N+1)/Val = {value_lower}")
        if from_cnf and not satisfiable and row.val is not None and exact < 2 * n + 2:
            row.violations.append(f"unsatisfiable CNF with Syn = {exact} < 2N+2 = {2 * n + 2}")
    elif value_lower is not None:
        row.lower = value_lower
    if out.degenerate:
        row.status = "nonsync"
    if row.violations:
        row.status = "violation"
    return row


def rows_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow(r.csv_row())
    return buf.getvalue()
