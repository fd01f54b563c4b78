"""Phase-wise approximation of the shortest reset word.

Each phase picks ``k + 1`` still-distinct states, merges them with a
shortest word found by BFS over the graph of subsets of size at most
``k + 1``, and appends that word.  The result is at most
``ceil(n / k)`` times longer than a shortest reset word; ``k = 1`` gives
the classical cubic upper bound.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass

from .automaton import Dfa, Word, is_synchronizing
from .errors import NotSynchronizingError, PropertyViolation, ValidationError


@dataclass(frozen=True)
class Phase:
    subset: tuple[int, ...]
    word: Word


@dataclass(frozen=True)
class ApproxResult:
    word: Word
    phases: tuple[Phase, ...]
    k: int
    guarantee: int

    def phase_table_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["phase", "subset", "word_length"])
        for i, phase in enumerate(self.phases, 1):
            writer.writerow([i, " ".join(map(str, phase.subset)), len(phase.word)])
        return buf.getvalue()


def merge_small_subset(dfa: Dfa, subset: tuple[int, ...]) -> Word | None:
    """Shortest word collapsing ``subset`` to one state, searched over sorted tuples."""
    start = tuple(sorted(set(subset)))
    if len(start) <= 1:
        return ()
    delta = dfa.delta
    parent = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for a in range(dfa.n_letters):
            child = tuple(sorted({delta[q][a] for q in node}))
            if child in parent:
                continue
            parent[child] = (node, a)
            if len(child) == 1:
                word = []
                while parent[child] is not None:
                    child, a = parent[child]
                    word.append(a)
                return tuple(reversed(word))
            queue.append(child)
    return None


def approx_reset(dfa: Dfa, k: int) -> ApproxResult:
    n = dfa.n_states
    if isinstance(k, bool) or not isinstance(k, int) or not 1 <= k <= max(1, n - 1):
        raise ValidationError(f"k must be an integer in [1, {max(1, n - 1)}], got {k!r}")
    if not is_synchronizing(dfa):
        raise NotSynchronizingError("not synchronizing")
    delta = dfa.delta
    remaining = set(range(n))
    word: list[int] = []
    phases = []
    while len(remaining) > 1:
        # lowest-indexed states; any choice keeps the guarantee
        subset = tuple(sorted(remaining)[:k + 1])
        piece = merge_small_subset(dfa, subset)
        if piece is None:
            raise PropertyViolation(f"subset {subset} of a synchronizing automaton cannot be merged")
        before = len(remaining)
        for a in piece:
            remaining = {delta[q][a] for q in remaining}
        if len(remaining) > max(1, before - k):
            raise PropertyViolation(f"phase on {subset} shrank {before} states only to {len(remaining)}")
        word.extend(piece)
        phases.append(Phase(subset, piece))
    return ApproxResult(tuple(word), tuple(phases), k, math.ceil(n / k))


@dataclass(frozen=True)
class CubicReport:
    n_states: int
    phase_lengths: tuple[int, ...]
    per_phase_bound: int
    total_bound: int

    @property
    def holds(self) -> bool:
        return (all(length <= self.per_phase_bound for length in self.phase_lengths)
                and sum(self.phase_lengths) <= self.total_bound)


def cubic_certificate(dfa: Dfa) -> tuple[Word, CubicReport]:
    """Pairwise-merging reset word with its n(n-1)/2 per-phase accounting."""
    result = approx_reset(dfa, 1)
    n = dfa.n_states
    per_phase = n * (n - 1) // 2
    report = CubicReport(n, tuple(len(p.word) for p in result.phases), per_phase, (n - 1) * per_phase)
    if not report.holds:
        raise PropertyViolation(f"pair-graph bound violated: {report}")
    return result.word, report
