import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synlab.errors import ValidationError
from synlab.expander import (MARGULIS_LAMBDA, REPORT_COLUMNS, ExpanderGraph, amplification_experiment,
                             bits_from_hex, bits_required, complete_with_loops, decode_walks, margulis,
                             parallel_two_cycle, reports_csv, spectral_lambda, start_bits, walk, walk_bound)


def _slots_by_hand(n, x, y):
    return [((x + 2 * y) % n, y), ((x - 2 * y) % n, y), ((x + 2 * y + 1) % n, y), ((x - 2 * y - 1) % n, y),
            (x, (y + 2 * x) % n), (x, (y - 2 * x) % n), (x, (y + 2 * x + 1) % n), (x, (y - 2 * x - 1) % n)]


def test_origin_slots_n5():
    g = margulis(5)
    assert [g.coords(v) for v in g.neighbors[g.index(0, 0)]] == [
        (0, 0), (0, 0), (1, 0), (4, 0), (0, 0), (0, 0), (0, 1), (0, 4)]


@pytest.mark.parametrize("n", [2, 3, 7, 12])
def test_slots_match_formula(n):
    g = margulis(n)
    for x in range(n):
        for y in range(n):
            assert [g.coords(v) for v in g.neighbors[g.index(x, y)]] == _slots_by_hand(n, x, y)


def test_margulis_rejects_small_n():
    with pytest.raises(ValidationError):
        margulis(1)
    with pytest.raises(ValidationError):
        margulis(2.0)


def test_walk_matrix_rows_are_exact_fractions():
    counts = margulis(4).adjacency_counts()
    for row in counts:
        assert sum(Fraction(int(c), 8) for c in row) == 1


def test_calibration_graphs():
    assert spectral_lambda(complete_with_loops(6), method="dense").value == pytest.approx(0, abs=1e-12)
    assert spectral_lambda(parallel_two_cycle(4), method="dense").value == pytest.approx(1)


def test_lambda_values_below_bound():
    known = {3: 0.5757, 4: 0.6036, 5: 0.6657, 8: 0.7029}
    for n, lam in known.items():
        est = spectral_lambda(margulis(n), method="dense")
        assert est.value == pytest.approx(lam, abs=5e-4)
        assert est.value <= MARGULIS_LAMBDA


@pytest.mark.parametrize("n", [3, 5, 8])
def test_power_iteration_agrees_with_dense(n):
    g = margulis(n)
    dense = spectral_lambda(g, method="dense").value
    power = spectral_lambda(g, method="power", tol=1e-6)
    assert power.method == "power" and power.iterations > 0
    assert power.value == pytest.approx(dense, abs=1e-3)


def test_spectral_unknown_method():
    with pytest.raises(ValidationError):
        spectral_lambda(margulis(3), method="lanczos")


def test_walk_golden():
    g = margulis(5)
    sample = walk(g, bits_from_hex("a5f"), 3)
    assert [g.coords(v) for v in sample.vertices] == [(4, 0), (4, 2), (4, 3)]
    assert sample.bits_consumed == 11 == bits_required(g, 3)


def test_walk_all_zero_bits_stays_at_origin():
    g = margulis(7)
    assert walk(g, [0] * bits_required(g, 5), 5).vertices == (0,) * 5


def test_walk_input_checks():
    g = margulis(5)
    with pytest.raises(ValidationError):
        walk(g, [1, 0], 2)
    with pytest.raises(ValidationError):
        walk(g, [2] * 20, 2)
    with pytest.raises(ValidationError):
        walk(g, [0] * 20, 0)
    with pytest.raises(ValidationError):
        bits_from_hex("xyz")


def test_start_bits():
    assert start_bits(margulis(5)) == 5
    assert start_bits(margulis(4)) == 4
    assert start_bits(margulis(8)) == 6


@settings(max_examples=30)
@given(st.integers(2, 9), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_vectorized_decode_matches_walk(n, k, seed):
    g = margulis(n)
    bits = np.random.default_rng(seed).integers(0, 2, size=(8, bits_required(g, k)))
    paths = decode_walks(g, bits, k)
    for row, path in zip(bits, paths):
        assert tuple(path) == walk(g, row.tolist(), k).vertices


def test_walk_bound_values():
    assert walk_bound(MARGULIS_LAMBDA, 0.5, 1) == 1
    assert walk_bound(0.0, 0.25, 3) == pytest.approx(0.25)
    assert walk_bound(MARGULIS_LAMBDA, 0.5, 2) == pytest.approx((1 - MARGULIS_LAMBDA) / math.sqrt(2) + MARGULIS_LAMBDA)
    assert walk_bound(MARGULIS_LAMBDA, 0.5, 2) < 0.97


def test_amplification_report():
    g = margulis(5)
    bad = list(range(12))
    rep = amplification_experiment(g, bad, 4, 20_000, 1)
    assert rep.beta == pytest.approx(12 / 25)
    assert rep.ci_low <= rep.empirical <= rep.ci_high
    assert rep.empirical <= rep.bound + 3 * rep.std_error
    again = amplification_experiment(g, bad, 4, 20_000, 1)
    assert again == rep
    csv_text = reports_csv([rep])
    assert csv_text.splitlines()[0] == ",".join(REPORT_COLUMNS)


def test_amplification_empty_and_full_sets():
    g = margulis(3)
    assert amplification_experiment(g, [], 3, 1000, 0).empirical == 0
    with pytest.raises(ValidationError):
        amplification_experiment(g, range(9), 3, 1000, 0)
    with pytest.raises(ValidationError):
        amplification_experiment(g, [9], 3, 1000, 0)


def test_graph_validation():
    with pytest.raises(ValidationError):
        ExpanderGraph(np.array([[0, 3]]))
