"""Complete deterministic automata without start or accepting states.

An automaton is just ``n_letters`` total transformations of the state set
``range(n_states)``.  States and letters are dense integers; words are
tuples of letter indices.  Subsets of states are handled as Python ints
used as bit vectors (bit ``q`` set iff state ``q`` is a member); the
:class:`StateSet` wrapper gives them a friendlier face at API boundaries.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParseError, ValidationError

Word = tuple[int, ...]

_CHUNK = 8
_CHUNK_MASK = (1 << _CHUNK) - 1


def validate(table, n_states: int | None = None, n_letters: int | None = None) -> list[str]:
    """Return the defects of a raw transition table; an empty list means ok.

    ``table[q][a]`` is the target of state ``q`` under letter ``a``.  When
    ``n_states``/``n_letters`` are omitted they are inferred from the table
    (row count and first row width).
    """
    defects = []
    try:
        rows = [list(row) for row in table]
    except TypeError:
        return ["table is not a sequence of rows"]
    if n_states is None:
        n_states = len(rows)
    if n_letters is None:
        n_letters = len(rows[0]) if rows else 0
    if n_states < 1:
        defects.append("automaton needs at least one state")
    if n_letters < 1:
        defects.append("automaton needs at least one letter")
    if len(rows) != n_states:
        defects.append(f"expected {n_states} transition rows, got {len(rows)}")
    for q, row in enumerate(rows):
        if len(row) != n_letters:
            defects.append(f"row {q}: incomplete transition row "
                           f"(expected {n_letters} entries, got {len(row)})")
        for a, target in enumerate(row):
            if isinstance(target, bool) or not isinstance(target, (int, np.integer)):
                defects.append(f"row {q}, letter {a}: non-integer entry {target!r}")
            elif not 0 <= target < n_states:
                defects.append(f"row {q}, letter {a}: state index out of range ({target})")
    return defects


@dataclass(frozen=True)
class Dfa:
    """Total transition table ``delta[q][a]``; immutable once built."""

    n_states: int
    n_letters: int
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        defects = validate(self.delta, self.n_states, self.n_letters)
        if defects:
            raise ValidationError("invalid automaton: " + "; ".join(defects))
        object.__setattr__(self, "delta", tuple(tuple(int(t) for t in row) for row in self.delta))

    @classmethod
    def from_table(cls, table) -> Dfa:
        rows = [tuple(row) for row in table]
        defects = validate(rows)
        if defects:
            raise ValidationError("invalid automaton: " + "; ".join(defects))
        return cls(len(rows), len(rows[0]), tuple(rows))

    @property
    def table(self) -> np.ndarray:
        return np.array(self.delta, dtype=np.int64)

    @cached_property
    def columns(self) -> tuple[tuple[int, ...], ...]:
        """``columns[a][q] == delta[q][a]``; the hot-path layout for stepping."""
        return tuple(tuple(row[a] for row in self.delta) for a in range(self.n_letters))

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n_states) - 1

    @cached_property
    def _chunk_tables(self):
        # tables[a][c][b]: image under letter a of the states 8c + (set bits of b)
        tables = []
        for col in self.columns:
            per_letter = []
            for base in range(0, self.n_states, _CHUNK):
                width = min(_CHUNK, self.n_states - base)
                t = [0] * (1 << width)
                for b in range(1, 1 << width):
                    low = b & -b
                    t[b] = t[b ^ low] | (1 << col[base + low.bit_length() - 1])
                per_letter.append(t)
            tables.append(per_letter)
        return tables

    def step_mask(self, mask: int, letter: int) -> int:
        """Image of the bit-vector subset ``mask`` under a single letter."""
        tables = self._chunk_tables[letter]
        out = 0
        c = 0
        while mask:
            b = mask & _CHUNK_MASK
            if b:
                out |= tables[c][b]
            mask >>= _CHUNK
            c += 1
        return out

    def image_mask(self, mask: int, word: Iterable[int]) -> int:
        for a in word:
            mask = self.step_mask(mask, a)
        return mask

    def check_state(self, q: int) -> None:
        if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or not 0 <= q < self.n_states:
            raise ValidationError(f"state {q!r} out of range [0, {self.n_states})")

    def check_word(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        for i, a in enumerate(w):
            if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or not 0 <= a < self.n_letters:
                raise ValidationError(f"letter {a!r} at position {i} out of range [0, {self.n_letters})")
        return tuple(int(a) for a in w)


@dataclass(frozen=True)
class StateSet:
    """Subset of ``range(n_states)`` stored as a bit vector."""

    n_states: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.n_states:
            raise ValidationError(f"state set {self.bits:#x} exceeds {self.n_states} states")

    @classmethod
    def of(cls, n_states: int, states: Iterable[int]) -> StateSet:
        bits = 0
        for q in states:
            if not 0 <= q < n_states:
                raise ValidationError(f"state {q} out of range [0, {n_states})")
            bits |= 1 << q
        return cls(n_states, bits)

    @classmethod
    def full(cls, n_states: int) -> StateSet:
        return cls(n_states, (1 << n_states) - 1)

    def __contains__(self, q) -> bool:
        return 0 <= q < self.n_states and bool(self.bits >> q & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __repr__(self):
        return f"StateSet({sorted(self)})"


def apply(dfa: Dfa, q: int, w: Sequence[int]) -> int:
    """Fold ``delta`` over ``w`` from state ``q``."""
    dfa.check_state(q)
    delta = dfa.delta
    for a in dfa.check_word(w):
        q = delta[q][a]
    return q


def image(dfa: Dfa, states: StateSet, w: Sequence[int]) -> StateSet:
    """Image of a nonempty state set under ``w``."""
    if states.n_states != dfa.n_states:
        raise ValidationError("state set belongs to an automaton of a different size")
    if not states.bits:
        raise ValidationError("image of the empty state set is undefined")
    return StateSet(dfa.n_states, dfa.image_mask(states.bits, dfa.check_word(w)))


def pair_merge_lengths(dfa: Dfa) -> np.ndarray:
    """Shortest merging word length for every pair of states.

    ``out[p, q]`` is the length of a shortest ``w`` with
    ``apply(p, w) == apply(q, w)`` (``inf`` if none).  One backward BFS over
    the pair automaton seeded from every merged pair.
    """
    n = dfa.n_states
    inverse = []
    for col in dfa.columns:
        inv = [[] for _ in range(n)]
        for q, t in enumerate(col):
            inv[t].append(q)
        inverse.append(inv)
    dist = [[-1] * n for _ in range(n)]
    queue = deque()
    for p in range(n):
        dist[p][p] = 0
        queue.append((p, p))
    while queue:
        p, q = queue.popleft()
        d = dist[p][q] + 1
        for inv in inverse:
            for p2 in inv[p]:
                row = dist[p2]
                for q2 in inv[q]:
                    if row[q2] < 0:
                        row[q2] = d
                        dist[q2][p2] = d
                        queue.append((p2, q2))
    out = np.array(dist, dtype=float)
    out[out < 0] = np.inf
    return out


def is_synchronizing(dfa: Dfa) -> bool:
    """True iff some word maps every state to one state.

    Uses the pairwise criterion: every pair must be mergeable.
    """
    if dfa.n_states == 1:
        return True
    return bool(np.isfinite(pair_merge_lengths(dfa)).all())


def cerny(n: int) -> Dfa:
    """The classical slowly synchronizing family with reset threshold (n-1)^2.

    Letter 0 cycles ``i -> i+1 mod n``; letter 1 sends 0 to 1 and fixes
    every other state.
    """
    if n < 2:
        raise ValidationError(f"Cerny automaton needs n >= 2, got {n}")
    return Dfa(n, 2, tuple(((q + 1) % n, 1 if q == 0 else q) for q in range(n)))


def random_dfa(n_states: int, n_letters: int, rng: random.Random) -> Dfa:
    return Dfa(n_states, n_letters,
               tuple(tuple(rng.randrange(n_states) for _ in range(n_letters))
                     for _ in range(n_states)))


def random_synchronizing_dfa(n_states: int, n_letters: int, rng: random.Random,
                             max_tries: int = 1000) -> Dfa:
    """Rejection-sample a uniformly random synchronizing automaton."""
    for _ in range(max_tries):
        dfa = random_dfa(n_states, n_letters, rng)
        if is_synchronizing(dfa):
            return dfa
    raise ValidationError(f"no synchronizing automaton found in {max_tries} tries")


# -- text format -------------------------------------------------------------

def dumps_dfa(dfa: Dfa) -> str:
    lines = [f"dfa {dfa.n_states} {dfa.n_letters}"]
    lines.extend(" ".join(map(str, row)) for row in dfa.delta)
    return "\n".join(lines) + "\n"


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def loads_dfa(text: str, source: str | None = None) -> Dfa:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty automaton file", source=source)
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "dfa":
        raise ParseError(f"expected header 'dfa <n_states> <n_letters>', got {header!r}", lineno, source)
    try:
        n_states, n_letters = int(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"non-integer size in header {header!r}", lineno, source) from None
    if n_states < 1 or n_letters < 1:
        raise ParseError("automaton sizes must be positive", lineno, source)
    body = lines[1:]
    if len(body) != n_states:
        where = body[n_states][0] if len(body) > n_states else (body[-1][0] if body else lineno)
        raise ParseError(f"expected {n_states} transition rows, got {len(body)}", where, source)
    rows = []
    for lineno, line in body:
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise ParseError(f"non-integer transition entry in {line!r}", lineno, source) from None
        defects = validate([row], 1, n_letters)
        bad = [d for d in defects if "incomplete" in d]
        if bad:
            raise ParseError(f"incomplete transition row (expected {n_letters} entries, got {len(row)})",
                             lineno, source)
        for t in row:
            if not 0 <= t < n_states:
                raise ParseError(f"state index out of range ({t})", lineno, source)
        rows.append(tuple(row))
    return Dfa(n_states, n_letters, tuple(rows))


def dumps_word(w: Sequence[int]) -> str:
    return " ".join(map(str, w))


def loads_word(text: str) -> Word:
    try:
        return tuple(int(tok) for tok in text.split())
    except ValueError:
        raise ParseError(f"word must be whitespace-separated letter indices: {text!r}") from None
