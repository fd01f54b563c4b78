"""Margulis expanders, spectral gaps and pseudorandom walks.

Graphs are regular multigraphs stored as a ``(vertices, degree)`` table of
neighbor slots, so loops and parallel edges keep their multiplicity.
Margulis vertices ``(x, y)`` are numbered ``x * n + y``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .errors import ConvergenceError, ValidationError

MARGULIS_LAMBDA = 5 * math.sqrt(2) / 8
DENSE_CAP = 10_000
REPORT_COLUMNS = ("n", "k", "beta", "trials", "empirical", "bound", "ci_low", "ci_high")


@dataclass(frozen=True, eq=False)
class ExpanderGraph:
    neighbors: np.ndarray
    side: int | None = None

    def __post_init__(self):
        nb = np.asarray(self.neighbors, dtype=np.int64)
        if nb.ndim != 2 or nb.shape[0] < 1 or nb.shape[1] < 1:
            raise ValidationError("neighbor table must be a nonempty 2-d array")
        if nb.min() < 0 or nb.max() >= nb.shape[0]:
            raise ValidationError("neighbor slot points outside the vertex range")
        nb.setflags(write=False)
        object.__setattr__(self, "neighbors", nb)

    @property
    def n_vertices(self) -> int:
        return self.neighbors.shape[0]

    @property
    def degree(self) -> int:
        return self.neighbors.shape[1]

    def coords(self, v: int) -> tuple[int, int]:
        return divmod(int(v), self.side)

    def index(self, x: int, y: int) -> int:
        return (x % self.side) * self.side + (y % self.side)

    def adjacency_counts(self) -> np.ndarray:
        """Integer multigraph adjacency; ``counts[u, v]`` = slots of u pointing at v."""
        counts = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        rows = np.repeat(np.arange(self.n_vertices), self.degree)
        np.add.at(counts, (rows, self.neighbors.ravel()), 1)
        return counts

    def walk_matrix(self) -> np.ndarray:
        return self.adjacency_counts() / self.degree

    def step(self, x: np.ndarray) -> np.ndarray:
        """Apply the walk matrix to a vector without materializing it."""
        return x[self.neighbors].mean(axis=1)


def margulis(n: int) -> ExpanderGraph:
    """8-regular graph on Z_n^2 with slots in the order
    (x+2y, y), (x-2y, y), (x+2y+1, y), (x-2y-1, y),
    (x, y+2x), (x, y-2x), (x, y+2x+1), (x, y-2x-1).
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ValidationError(f"Margulis graph needs an integer n >= 2, got {n!r}")
    x, y = np.divmod(np.arange(n * n), n)
    slots = [
        ((x + 2 * y) % n, y), ((x - 2 * y) % n, y),
        ((x + 2 * y + 1) % n, y), ((x - 2 * y - 1) % n, y),
        (x, (y + 2 * x) % n), (x, (y - 2 * x) % n),
        (x, (y + 2 * x + 1) % n), (x, (y - 2 * x - 1) % n),
    ]
    return ExpanderGraph(np.stack([nx * n + ny for nx, ny in slots], axis=1), side=n)


def complete_with_loops(n: int) -> ExpanderGraph:
    return ExpanderGraph(np.tile(np.arange(n), (n, 1)))


def parallel_two_cycle(degree: int) -> ExpanderGraph:
    return ExpanderGraph(np.array([[1] * degree, [0] * degree]))


@dataclass(frozen=True)
class SpectralEstimate:
    value: float
    method: str
    iterations: int = 0
    residual: float = 0.0


def spectral_lambda(g: ExpanderGraph, method: str = "auto", tol: float = 1e-3,
                    max_iter: int = 100_000, seed: int = 0) -> SpectralEstimate:
    """Second largest eigenvalue magnitude of the walk matrix.

    ``dense`` diagonalizes the symmetrized walk matrix; ``power`` iterates
    the squared walk operator on the complement of the uniform vector.
    ``auto`` picks dense up to ``DENSE_CAP`` vertices.
    """
    if method == "auto":
        method = "dense" if g.n_vertices <= DENSE_CAP else "power"
    if g.n_vertices == 1:
        return SpectralEstimate(0.0, method)
    if method == "dense":
        a = g.walk_matrix()
        ev = np.linalg.eigvalsh((a + a.T) / 2)
        mags = np.sort(np.abs(ev))[::-1]
        return SpectralEstimate(float(min(1.0, mags[1])), "dense")
    if method != "power":
        raise ValidationError(f"unknown method {method!r}")

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(g.n_vertices)
    x -= x.mean()
    x /= np.linalg.norm(x)
    mu = 0.0
    residual = math.inf
    for it in range(1, max_iter + 1):
        ax = g.step(x)
        y = g.step(ax)
        y -= y.mean()
        mu = float(ax @ ax)  # Rayleigh quotient of A^2 at unit x
        residual = float(np.linalg.norm(y - mu * x))
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return SpectralEstimate(0.0, "power", it, 0.0)
        lam = math.sqrt(mu)
        if residual <= tol * max(lam, tol) / 4:
            return SpectralEstimate(min(1.0, lam), "power", it, residual)
        x = y / norm
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations", residual)


# -- walks -------------------------------------------------------------------

def start_bits(g: ExpanderGraph) -> int:
    return max(1, (g.n_vertices - 1).bit_length())


def step_bits(g: ExpanderGraph) -> int:
    d = g.degree
    if d & (d - 1):
        raise ValidationError(f"walk bits need a power-of-two degree, got {d}")
    return d.bit_length() - 1


def bits_required(g: ExpanderGraph, k: int) -> int:
    return start_bits(g) + step_bits(g) * (k - 1)


def bits_from_hex(text: str) -> tuple[int, ...]:
    text = text.lower().removeprefix("0x")
    try:
        value = int(text, 16)
    except ValueError:
        raise ValidationError(f"not a hex string: {text!r}") from None
    return tuple(int(c) for c in format(value, f"0{4 * len(text)}b"))


def _bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


@dataclass(frozen=True)
class WalkSample:
    vertices: tuple[int, ...]
    bits_consumed: int


def walk(g: ExpanderGraph, seed_bits: Sequence[int], k: int) -> WalkSample:
    """Deterministic walk X_1..X_k read off a bit string.

    X_1 is the first ``ceil(log2 V)`` bits as an integer mod V; every step
    then reads the next 3 bits (for degree 8) as a neighbor slot index.
    """
    if k < 1:
        raise ValidationError(f"walk length k must be >= 1, got {k}")
    bits = tuple(seed_bits)
    if any(b not in (0, 1) for b in bits):
        raise ValidationError("seed bits must be 0/1")
    s, per_step = start_bits(g), step_bits(g)
    need = s + per_step * (k - 1)
    if len(bits) < need:
        raise ValidationError(f"walk of {k} vertices needs {need} seed bits, got {len(bits)}")
    v = _bits_to_int(bits[:s]) % g.n_vertices
    out = [v]
    for i in range(k - 1):
        lo = s + per_step * i
        v = int(g.neighbors[v, _bits_to_int(bits[lo:lo + per_step])])
        out.append(v)
    return WalkSample(tuple(out), need)


def walk_bound(lam: float, beta: float, k: int) -> float:
    """Upper bound on Pr[all k walk vertices land in a set of density beta]."""
    return ((1 - lam) * math.sqrt(beta) + lam) ** (k - 1)


@dataclass(frozen=True)
class AmplificationReport:
    n: int
    k: int
    beta: float
    trials: int
    empirical: float
    bound: float
    ci_low: float
    ci_high: float
    std_error: float
    start_bias: float

    def csv_row(self) -> list[str]:
        return [str(self.n), str(self.k), f"{self.beta:.6f}", str(self.trials),
                f"{self.empirical:.6f}", f"{self.bound:.6f}", f"{self.ci_low:.6f}", f"{self.ci_high:.6f}"]


def decode_walks(g: ExpanderGraph, bits: np.ndarray, k: int) -> np.ndarray:
    """Vectorized :func:`walk` over the rows of a ``(trials, bits)`` 0/1 array."""
    s, per_step = start_bits(g), step_bits(g)
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[1] < s + per_step * (k - 1):
        raise ValidationError("not enough bits per row")
    weights = 1 << np.arange(s - 1, -1, -1, dtype=np.int64)
    cur = (bits[:, :s] @ weights) % g.n_vertices
    path = [cur]
    step_w = 1 << np.arange(per_step - 1, -1, -1, dtype=np.int64)
    for i in range(k - 1):
        lo = s + per_step * i
        cur = g.neighbors[cur, bits[:, lo:lo + per_step] @ step_w]
        path.append(cur)
    return np.stack(path, axis=1)


def amplification_experiment(g: ExpanderGraph, bad_set, k: int, trials: int, rng_seed: int,
                             lam: float = MARGULIS_LAMBDA, batch: int = 20_000) -> AmplificationReport:
    """Monte Carlo estimate of Pr[X_1..X_k all in bad_set] against the walk bound."""
    bad = sorted(set(int(v) for v in bad_set))
    if any(not 0 <= v < g.n_vertices for v in bad):
        raise ValidationError("bad set contains a vertex outside the graph")
    beta = len(bad) / g.n_vertices
    # the empty set is accepted as a calibration input
    if bad and not beta < 1:
        raise ValidationError(f"bad-set density must lie in (0, 1), got {beta}")
    if trials < 1 or k < 1:
        raise ValidationError("trials and k must be >= 1")
    mask = np.zeros(g.n_vertices, dtype=bool)
    mask[bad] = True
    rng = np.random.default_rng(rng_seed)
    need = bits_required(g, k)
    hits = 0
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        bits = rng.integers(0, 2, size=(size, need), dtype=np.int8)
        path = decode_walks(g, bits, k)
        hits += int(mask[path].all(axis=1).sum())
        done += size
    p = hits / trials
    ci = binomtest(hits, trials).proportion_ci(confidence_level=0.95, method="wilson")
    codes = 1 << start_bits(g)
    v = g.n_vertices
    bias = max(math.ceil(codes / v) / codes - 1 / v, 1 / v - (codes // v) / codes)
    return AmplificationReport(
        n=g.side if g.side is not None else v, k=k, beta=beta, trials=trials, empirical=p,
        bound=walk_bound(lam, beta, k),
        ci_low=float(ci.low), ci_high=float(ci.high),
        std_error=math.sqrt(p * (1 - p) / trials), start_bias=bias)


def reports_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()
