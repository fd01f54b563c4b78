"""Compile CSP instances into synchronizing automata over {0, 1, 2}.

Each constraint becomes a tree-gadget whose level ``j`` remembers the
values read so far for the constraint's variables with index ``< j``.
After ``N`` binary letters the gadget sits on a leaf labelled by the
restriction of the assignment; one more binary letter goes to the shared
sink when that restriction is a satisfying row and back to the gadget
root otherwise.  Letter 2 sends every gadget state to its root.

The compressed variant keeps only the subtree spanned by satisfying rows.
A maximal dead subtree hanging off a live node is replaced by a path of
the same height whose endpoint returns to the root on 0 and 1, so timing
is preserved exactly.

State numbering: the sink is 0, then gadgets in constraint order, each
numbered in BFS order from its root along letters 0 < 1.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .automaton import Dfa, StateSet, Word
from .csp import Constraint, CspInstance, fsat
from .errors import CapacityError, ValidationError

log = logging.getLogger(__name__)

TREE_LEAF_CAP = 1 << 16
DEFAULT_STATE_BUDGET = 10_000_000
SINK = 0

_ROOT = "root"
_SINK = "sink"


@dataclass(frozen=True)
class GadgetEntry:
    state: int
    constraint: int | None
    role: str
    level: int | None
    label: str

    def state_name(self) -> str:
        if self.role == "sink":
            return "s"
        return f"q_{self.level}^{self.label or 'eps'}"


class GadgetMap(tuple):
    """Per-state :class:`GadgetEntry`, indexed by state number."""

    @property
    def sink(self) -> int:
        (sink,) = [e.state for e in self if e.role == "sink"]
        return sink

    def roots(self) -> tuple[int, ...]:
        return tuple(e.state for e in self if e.role == "root")

    def gadget(self, constraint: int) -> tuple[GadgetEntry, ...]:
        return tuple(e for e in self if e.constraint == constraint)

    def dumps(self) -> str:
        lines = []
        for e in self:
            cons = "-" if e.constraint is None else str(e.constraint)
            level = "-" if e.level is None else str(e.level)
            lines.append(f"{e.state} {cons} {e.role} {level} {e.label or '-'}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ReductionOutput:
    dfa: Dfa
    map: GadgetMap
    n_vars: int
    n_constraints: int
    mode: str
    roots: tuple[int, ...]
    degenerate: tuple[int, ...] = ()

    sink = SINK

    @property
    def root_set(self) -> StateSet:
        return StateSet.of(self.dfa.n_states, self.roots)

    @property
    def root_and_sink(self) -> StateSet:
        """``image(Q, 2)``: every root plus the sink."""
        return StateSet.of(self.dfa.n_states, self.roots + (SINK,))


@dataclass
class _Fragment:
    """One gadget with local node keys; targets may be the markers root/sink."""

    keys: list
    trans: dict
    info: dict  # key -> (role, level, label)


def _levelled_role(level, n):
    if level == 0:
        return "root"
    return "leaf" if level == n else "internal"


def _dead_path(frag: _Fragment, head, level: int, label: str, n: int) -> None:
    """Attach the timing-equivalent path below dead node ``head`` at ``level``."""
    prev = head
    for j in range(level + 1, n + 1):
        key = ("path", head, j)
        frag.trans[prev] = (key, key)
        frag.info[key] = ("path", j, label)
        prev = key
    frag.trans[prev] = (_ROOT, _ROOT)


def _fragment(c: Constraint, n: int, compressed: bool) -> _Fragment:
    deps = set(c.dep_vars)
    if compressed:
        alive = {row[:i] for row in c.sat_rows for i in range(len(row) + 1)}
    frag = _Fragment([], {}, {})
    root = (0, "")
    frag.info[root] = ("root", 0, "")
    if compressed and "" not in alive:
        _dead_path(frag, root, 0, "", n)
        return frag
    level = [""]
    for j in range(n):
        nxt = []
        for w in level:
            if j in deps:
                children = []
                for bit in "01":
                    child = (j + 1, w + bit)
                    frag.info[child] = (_levelled_role(j + 1, n), j + 1, w + bit)
                    if compressed and w + bit not in alive:
                        _dead_path(frag, child, j + 1, w + bit, n)
                    else:
                        nxt.append(w + bit)
                    children.append(child)
                frag.trans[(j, w)] = tuple(children)
            else:
                child = (j + 1, w)
                frag.info[child] = (_levelled_role(j + 1, n), j + 1, w)
                frag.trans[(j, w)] = (child, child)
                nxt.append(w)
        level = nxt
    for w in level:
        target = _SINK if w in c.row_set else _ROOT
        frag.trans[(n, w)] = (target, target)
    return frag


def _check_constraint(c: Constraint, n: int):
    if n < 1:
        raise ValidationError("gadgets need at least one variable")
    if c.dep_vars and c.dep_vars[-1] >= n:
        raise ValidationError(f"constraint uses variable {c.dep_vars[-1]} >= N={n}")


def _tree_cap_check(c: Constraint, cap: int):
    if 1 << len(c.dep_vars) > cap:
        raise CapacityError(f"uncompressed gadget over {len(c.dep_vars)} variables has "
                            f"2^{len(c.dep_vars)} leaves, above the cap of {cap}; "
                            f"use compressed mode")


def _number(frag: _Fragment, offset: int) -> tuple[list, dict]:
    """BFS order from the root along letters 0, 1."""
    root = (0, "")
    order = [root]
    index = {root: offset}
    queue = deque([root])
    while queue:
        key = queue.popleft()
        for t in frag.trans[key]:
            if t not in (_ROOT, _SINK) and t not in index:
                index[t] = offset + len(order)
                order.append(t)
                queue.append(t)
    return order, index


def build_tree_gadget(c: Constraint, n_vars: int, offset: int = 1, constraint_index: int = 0,
                      compressed: bool = False, cap: int = TREE_LEAF_CAP):
    """One gadget as ``(rows, entries)`` with global state numbers from ``offset``.

    ``rows[i]`` holds the (0, 1, 2)-transitions of state ``offset + i``;
    the sink is state 0.
    """
    _check_constraint(c, n_vars)
    if not compressed:
        _tree_cap_check(c, cap)
    frag = _fragment(c, n_vars, compressed)
    order, index = _number(frag, offset)
    resolve = {_ROOT: offset, _SINK: SINK}
    rows, entries = [], []
    for key in order:
        t0, t1 = (resolve.get(t) if t in resolve else index[t] for t in frag.trans[key])
        rows.append((t0, t1, offset))
        role, level, label = frag.info[key]
        entries.append(GadgetEntry(index[key], constraint_index, role, level, label))
    return rows, entries


def _assemble(phi: CspInstance, compressed: bool, cap: int) -> ReductionOutput:
    rows = [(SINK, SINK, SINK)]
    entries = [GadgetEntry(SINK, None, "sink", None, "")]
    roots = []
    degenerate = []
    for i, c in enumerate(phi.constraints):
        if not c.sat_rows:
            degenerate.append(i)
        g_rows, g_entries = build_tree_gadget(c, phi.n_vars, len(rows), i, compressed, cap)
        roots.append(len(rows))
        rows.extend(g_rows)
        entries.extend(g_entries)
    if degenerate:
        log.warning("constraints %s have no satisfying row; the automaton is not synchronizing",
                    degenerate)
    dfa = Dfa(len(rows), 3, tuple(rows))
    return ReductionOutput(dfa, GadgetMap(entries), phi.n_vars, phi.n_constraints,
                           "compressed" if compressed else "tree", tuple(roots), tuple(degenerate))


def build_automaton(phi: CspInstance, cap: int = TREE_LEAF_CAP) -> ReductionOutput:
    """Uncompressed reduction; every constraint must stay under the leaf cap."""
    for c in phi.constraints:
        _tree_cap_check(c, cap)
    return _assemble(phi, False, cap)


def compressed_size_bound(n_vars: int, n_constraints: int, k: int) -> int:
    """Worst-case state count of the compressed automaton.

    A gadget has at most ``1 + N*K`` live nodes and at most ``N*K`` dead
    heads, each carrying at most ``N`` states.
    """
    k = max(k, 1)
    return 1 + n_constraints * (1 + n_vars * k + n_vars * n_vars * k)


def build_compressed_automaton(phi: CspInstance, budget: int = DEFAULT_STATE_BUDGET) -> ReductionOutput:
    bound = compressed_size_bound(phi.n_vars, phi.n_constraints, fsat(phi))
    if bound > budget:
        raise CapacityError(f"compressed automaton may need {bound} states "
                            f"(N={phi.n_vars}, M={phi.n_constraints}, K={fsat(phi)}), "
                            f"above the budget of {budget}")
    return _assemble(phi, True, TREE_LEAF_CAP)


def reduce(phi: CspInstance, mode: str = "tree") -> ReductionOutput:
    if mode == "tree":
        return build_automaton(phi)
    if mode == "compressed":
        return build_compressed_automaton(phi)
    raise ValidationError(f"unknown mode {mode!r}; expected 'tree' or 'compressed'")


# -- probes ------------------------------------------------------------------

def gadget_trace(out: ReductionOutput, constraint_index: int, w: Sequence[int]) -> GadgetEntry:
    """Entry of the state reached by reading ``w`` from a gadget's root."""
    if not 0 <= constraint_index < out.n_constraints:
        raise ValidationError(f"constraint index {constraint_index} out of range")
    q = out.roots[constraint_index]
    delta = out.dfa.delta
    for a in out.dfa.check_word(w):
        q = delta[q][a]
    return out.map[q]


def assignment_certificate(v: Sequence[int]) -> Word:
    """The word ``2 v 0`` that resets the automaton when ``v`` satisfies every constraint."""
    return (2, *(int(b) for b in v), 0)


def reduce_word(w: Sequence[int], n_vars: int) -> Word:
    """Binary word acting on the roots like ``w`` followed by a 2.

    Split at the 2s (a trailing 2 is implied), keep from every segment its
    longest prefix whose length is a multiple of ``N + 1`` and concatenate.
    """
    period = n_vars + 1
    out: list[int] = []
    segment: list[int] = []
    for a in list(w) + [2]:
        if a == 2:
            out.extend(segment[:len(segment) - len(segment) % period])
            segment = []
        elif a in (0, 1):
            segment.append(a)
        else:
            raise ValidationError(f"letter {a!r} is not in {{0, 1, 2}}")
    return tuple(out)


def _observe(out: ReductionOutput, q: int):
    e = out.map[q]
    if e.role == "sink":
        return ("sink",)
    if e.role == "root":
        return ("root", e.constraint)
    return ("node", e.constraint, e.level)


def root_behavior_equivalent(a: ReductionOutput, b: ReductionOutput, max_len: int) -> bool:
    """Do the gadget roots of ``a`` and ``b`` look alike under every word of length <= max_len?

    Observations are sink / own root / (gadget, level).  Explores the
    product automaton from each root pair, so it covers all words over the
    alphabet up to ``max_len`` without enumerating them.
    """
    if a.n_constraints != b.n_constraints or a.n_vars != b.n_vars:
        return False
    da, db = a.dfa.delta, b.dfa.delta
    for ra, rb in zip(a.roots, b.roots):
        seen = {(ra, rb)}
        frontier = [(ra, rb)]
        for _ in range(max_len + 1):
            nxt = []
            for p, q in frontier:
                if _observe(a, p) != _observe(b, q):
                    return False
                for letter in range(3):
                    pair = (da[p][letter], db[q][letter])
                    if pair not in seen:
                        seen.add(pair)
                        nxt.append(pair)
            frontier = nxt
            if not frontier:
                break
    return True
