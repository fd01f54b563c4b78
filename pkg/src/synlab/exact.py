"""Exact reset thresholds by breadth-first search over reachable subsets."""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

from .automaton import Dfa, StateSet, Word, dumps_word, pair_merge_lengths
from .errors import CapacityError, LimitReached, ValidationError

DEFAULT_NODE_BUDGET = 5_000_000
BUDGET_ENV = "SYNLAB_BUDGET_NODES"


def default_node_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_NODE_BUDGET
    try:
        budget = int(raw)
    except ValueError:
        raise ValidationError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if budget < 1:
        raise ValidationError(f"{BUDGET_ENV} must be positive, got {budget}")
    return budget


@dataclass
class SearchStats:
    start_size: int = 0
    nodes_expanded: int = 0
    visited: int = 0
    max_frontier: int = 0
    depth: int = 0
    outcome: str = "pending"

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass(frozen=True)
class ResetCertificate:
    word: Word
    target: int
    stats: SearchStats = field(default_factory=SearchStats, compare=False)

    @property
    def length(self) -> int:
        return len(self.word)

    def dumps(self) -> str:
        return f"{self.length}\n{dumps_word(self.word)}\n"


class SubsetSearch:
    """Single-use BFS from one start subset to any singleton.

    Letters are tried in increasing order and nodes are expanded FIFO, so the
    first singleton generated carries the lexicographically smallest among
    the shortest synchronizing words.
    """

    def __init__(self, dfa: Dfa, budget: int | None = None):
        self.dfa = dfa
        self.budget = default_node_budget() if budget is None else budget
        self.stats = SearchStats()
        self._used = False

    def run(self, start: int, limit: int | None = None) -> tuple[Word, int] | None:
        if self._used:
            raise RuntimeError("SubsetSearch instances are single-use")
        self._used = True
        if start <= 0 or start >> self.dfa.n_states:
            raise ValidationError("start subset must be a nonempty subset of the states")
        if limit is not None and limit < 0:
            raise ValidationError(f"limit must be >= 0, got {limit}")
        stats = self.stats
        stats.start_size = start.bit_count()
        if start & (start - 1) == 0:
            stats.outcome = "found"
            stats.visited = 1
            return (), start.bit_length() - 1

        dfa = self.dfa
        letters = range(dfa.n_letters)
        step = dfa.step_mask
        parent = {start: None}
        frontier = [start]
        depth = 0
        while frontier:
            if limit is not None and depth >= limit:
                stats.outcome = "limit"
                stats.visited = len(parent)
                raise LimitReached(limit, len(frontier))
            stats.max_frontier = max(stats.max_frontier, len(frontier))
            nxt = []
            for mask in frontier:
                stats.nodes_expanded += 1
                for a in letters:
                    child = step(mask, a)
                    if child in parent:
                        continue
                    parent[child] = (mask, a)
                    if child & (child - 1) == 0:
                        stats.depth = depth + 1
                        stats.visited = len(parent)
                        stats.outcome = "found"
                        return self._trace(parent, child), child.bit_length() - 1
                    nxt.append(child)
                if len(parent) > self.budget:
                    stats.visited = len(parent)
                    stats.outcome = "capacity"
                    raise CapacityError(
                        f"subset search exceeded node budget {self.budget} at depth {depth + 1} "
                        f"(frontier size {len(nxt)}, visited {len(parent)})")
            frontier = nxt
            depth += 1
        stats.depth = depth
        stats.visited = len(parent)
        stats.outcome = "unsynchronizable"
        return None

    @staticmethod
    def _trace(parent, node) -> Word:
        letters = []
        while parent[node] is not None:
            node, a = parent[node]
            letters.append(a)
        return tuple(reversed(letters))


def shortest_reset(dfa: Dfa, limit: int | None = None,
                   budget: int | None = None) -> ResetCertificate | None:
    """Exact Syn(A) with a lexicographically least witness, or None."""
    search = SubsetSearch(dfa, budget)
    found = search.run(dfa.full_mask, limit)
    if found is None:
        return None
    word, target = found
    return ResetCertificate(word, target, search.stats)


def shortest_sync_of_set(dfa: Dfa, states: StateSet, limit: int | None = None,
                         budget: int | None = None) -> Word | None:
    if states.n_states != dfa.n_states:
        raise ValidationError("state set belongs to an automaton of a different size")
    found = SubsetSearch(dfa, budget).run(states.bits, limit)
    return None if found is None else found[0]


def pair_sync_table(dfa: Dfa) -> np.ndarray:
    """Symmetric ``n x n`` array of shortest pair-merging lengths (``inf`` if none)."""
    return pair_merge_lengths(dfa)
