"""Alphabet reduction to {0, 1} with a t-bit codeword per letter.

Every original state ``q`` gets an anchor state.  At an anchor, letter 0
idles and letter 1 arms the selector; the next ``b = ceil(log2 |Sigma|)``
bits spell the letter index (most significant first) and the last one
applies it, landing on the anchor of ``delta(q, a)``.  A selector prefix no
letter index starts with drops back to the anchor of ``q`` unchanged.

A codeword is therefore ``1`` followed by ``b`` selector bits, ``t = b + 1``
letters in all, and ``0^b`` pushes any state onto some anchor.  Every
anchor parses a binary word identically, so a reset word of length ``L``
decodes to a reset word of the original automaton of length at most
``L / t``; conversely ``0^b`` followed by the encoded reset word resets the
binary automaton.  Hence ``t*Syn(A) <= Syn(B) <= t*(1 + Syn(A))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .automaton import Dfa, Word
from .errors import ValidationError


@dataclass(frozen=True)
class BinarizedDfa:
    dfa: Dfa
    t: int
    state_map: tuple[int, ...]
    codewords: tuple[Word, ...]

    @property
    def n_tilde(self) -> int:
        return self.dfa.n_states

    def encode(self, word: Sequence[int]) -> Word:
        return tuple(bit for a in word for bit in self.codewords[a])

    def dumps_sidecar(self) -> str:
        lines = [f"t {self.t}"]
        lines.extend(f"anchor {q} {s}" for q, s in enumerate(self.state_map))
        return "\n".join(lines) + "\n"


def codeword_length(n_letters: int) -> int:
    return (n_letters - 1).bit_length() + 1


def binarize(dfa: Dfa) -> BinarizedDfa:
    sigma = dfa.n_letters
    if sigma < 2:
        raise ValidationError("binarization needs an alphabet of at least two letters")
    b = (sigma - 1).bit_length()
    codes = [format(a, f"0{b}b") for a in range(sigma)]
    # armed selector prefixes shorter than b, shared layout for every anchor
    prefixes = sorted({code[:i] for code in codes for i in range(b)}, key=lambda p: (len(p), p))
    local = {"anchor": 0}
    for p in prefixes:
        local[p] = len(local)
    per_state = len(local)
    letter_of = {code: a for a, code in enumerate(codes)}

    rows = []
    for q in range(dfa.n_states):
        base = q * per_state
        anchor = base
        rows.append((anchor, base + local[""]))
        for p in prefixes:
            row = []
            for bit in "01":
                ext = p + bit
                if len(ext) == b:
                    a = letter_of.get(ext)
                    row.append(anchor if a is None else dfa.delta[q][a] * per_state)
                else:
                    row.append(base + local[ext] if ext in local else anchor)
            rows.append(tuple(row))
    out = Dfa(len(rows), 2, tuple(rows))
    anchors = tuple(q * per_state for q in range(dfa.n_states))
    codewords = tuple((1, *(int(c) for c in code)) for code in codes)
    return BinarizedDfa(out, b + 1, anchors, codewords)


def lift_estimate(x: int, t: int) -> Fraction:
    """Turn an estimate of Syn(B) into one of Syn(A)."""
    if t < 2:
        raise ValidationError(f"codeword length t must be >= 2, got {t}")
    if x < t:
        raise ValidationError(f"estimate {x} is below the codeword length {t}")
    return Fraction(x, t)
