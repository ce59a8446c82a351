from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moment2d import (
    AtomicMeasure,
    IndexOutOfRangeError,
    MomentTable,
    NegativeDenominatorError,
    carleman_diagnostic,
    check_psd,
    e1,
    e2,
    moment_matrix,
    moments_of_measure,
    monomial_indices,
)

import oracles


def _two_point_measure() -> AtomicMeasure:
    return AtomicMeasure(np.array([[1.0, 1.0], [-1.0, -1.0]]),
                         np.array([0.5, 0.5]))


def test_monomial_order_is_graded_lexicographic():
    assert monomial_indices(1, 1) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert monomial_indices(2, 1) == [(0, 0), (0, 1), (1, 0), (1, 1),
                                      (2, 0), (2, 1)]
    assert monomial_indices(0, 0) == [(0, 0)]


def test_moment_table_entry_and_bounds():
    table = MomentTable(1, 1, np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert table.entry(1, 0) == 3.0
    with pytest.raises(IndexOutOfRangeError):
        table.entry(2, 0)
    with pytest.raises(IndexOutOfRangeError):
        table.entry(0, -1)


def test_moment_table_rejects_bad_shapes_and_values():
    with pytest.raises(ValueError):
        MomentTable(1, 1, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        MomentTable(1, 1, np.array([[1.0, np.inf], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        MomentTable(-1, 0, np.zeros((0, 1)))


def test_atomic_measure_validation():
    with pytest.raises(ValueError):
        AtomicMeasure(np.array([[0.0, 0.0]]), np.array([0.0]))
    with pytest.raises(ValueError):
        AtomicMeasure(np.array([[0.0, 0.0], [1e-12, 0.0]]),
                      np.array([1.0, 1.0]))
    mu = _two_point_measure()
    assert mu.n_atoms == 2
    assert mu.total_mass == pytest.approx(1.0)
    assert mu.sorted().points[0, 0] == -1.0


def test_empty_measure_is_allowed():
    mu = AtomicMeasure(np.zeros((0, 2)), np.zeros(0))
    assert mu.n_atoms == 0
    assert mu.total_mass == 0.0
    table = moments_of_measure(mu, 2, 2)
    assert np.all(table.values == 0.0)


def test_moments_of_measure_matches_direct_summation():
    rng = np.random.default_rng(42)
    for _ in range(5):
        k = rng.integers(1, 5)
        pts = rng.uniform(-2.0, 2.0, size=(k, 2))
        ws = rng.uniform(0.1, 1.0, size=k)
        mu = AtomicMeasure(pts, ws)
        table = moments_of_measure(mu, 5, 4)
        direct = oracles.moments_direct(pts, ws, 5, 4)
        assert np.max(np.abs(table.values - direct)) < 1e-12


def test_moment_matrix_of_two_point_measure():
    table = moments_of_measure(_two_point_measure(), 2, 2)
    gram = moment_matrix(table, 1, 1)
    # Basis order (0,0), (0,1), (1,0), (1,1) on the support {(1,1), (-1,-1)}.
    expected = np.array([[1.0, 0.0, 0.0, 1.0],
                         [0.0, 1.0, 1.0, 0.0],
                         [0.0, 1.0, 1.0, 0.0],
                         [1.0, 0.0, 0.0, 1.0]])
    assert np.max(np.abs(gram - expected)) < 1e-14


def test_moment_matrix_requires_table_coverage():
    table = MomentTable(1, 1, np.eye(2))
    with pytest.raises(IndexOutOfRangeError):
        moment_matrix(table, 1, 1)


def test_check_psd_verdicts():
    ok, min_eig = check_psd(e2().table, 1, 1)
    assert ok
    assert min_eig > -1e-12
    bad = MomentTable(0, 0, np.array([[-1.0]]))
    ok2, min_eig2 = check_psd(bad, 0, 0)
    assert not ok2
    assert min_eig2 == pytest.approx(-1.0)


def test_carleman_two_point_partial_sums():
    # Terms (s_{0,2k} + s_{2,2k})^(-1/(2k)) with all even moments equal 1:
    # k=1 -> 2^(-1/2), k=2 -> 2^(-1/4).
    report = carleman_diagnostic(e2().table, 0, 2)
    assert report.m == 0
    assert report.partial_sums[0] == pytest.approx(2.0 ** -0.5, abs=1e-15)
    assert report.partial_sums[1] == pytest.approx(
        2.0 ** -0.5 + 2.0 ** -0.25, abs=1e-15)
    assert report.verdict == "diverging-trend"


def test_carleman_origin_atom_gives_infinite_terms():
    table = moments_of_measure(e1().measure, 2, 8)
    report = carleman_diagnostic(table, 0, 4)
    assert all(math.isinf(s) for s in report.partial_sums)
    assert report.verdict == "diverging-trend"


def test_carleman_single_variant():
    report = carleman_diagnostic(e2().table, 0, 2, variant="single")
    # s_{0,2k} alone equals 1, so every term is 1.
    assert report.partial_sums == (1.0, 2.0)


def test_carleman_factorial_growth_converges():
    big_k = 10
    vals = np.zeros((3, 2 * big_k + 1))
    for k in range(big_k + 1):
        fact = float(math.factorial(2 * k))
        vals[0, 2 * k] = fact ** 2 * 4.0 ** (2 * k)
        vals[2, 2 * k] = fact ** 2 * 4.0 ** (2 * k)
    table = MomentTable(2, 2 * big_k, vals)
    report = carleman_diagnostic(table, 0, big_k)
    assert report.verdict == "converging-trend"
    # Terms fall like 1/k^2, so the partial sums stay bounded.
    assert report.partial_sums[-1] < 1.0


def test_carleman_negative_denominator_raises():
    bad = MomentTable(2, 2, np.array([[1.0, 0.0, -5.0],
                                      [0.0, 0.0, 0.0],
                                      [1.0, 0.0, 0.0]]))
    with pytest.raises(NegativeDenominatorError):
        carleman_diagnostic(bad, 0, 1)


def test_carleman_window_exceeding_table_raises():
    with pytest.raises(IndexOutOfRangeError):
        carleman_diagnostic(e2().table, 1, 4)


@st.composite
def _atomic_measures(draw):
    k = draw(st.integers(min_value=1, max_value=4))
    coords = draw(st.lists(
        st.tuples(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0)),
        min_size=k, max_size=k))
    pts = np.asarray(coords)
    for i in range(k):
        for j in range(i + 1, k):
            if np.max(np.abs(pts[i] - pts[j])) <= 1e-3:
                pts[j] += 0.1 * (j + 1)
    ws = draw(st.lists(st.floats(0.1, 1.0), min_size=k, max_size=k))
    return AtomicMeasure(pts, np.asarray(ws))


@given(_atomic_measures())
@settings(max_examples=25, deadline=None)
def test_moment_matrix_of_any_measure_is_psd(mu):
    table = moments_of_measure(mu, 4, 4)
    gram = moment_matrix(table, 2, 2)
    eigs = np.linalg.eigvalsh(gram)
    scale = max(1.0, float(np.max(np.abs(gram))))
    assert eigs[0] > -1e-10 * scale


@given(st.integers(0, 3), st.integers(0, 3))
@settings(max_examples=16, deadline=None)
def test_monomial_indices_cover_rectangle(d_m, d_n):
    idx = monomial_indices(d_m, d_n)
    assert len(idx) == (d_m + 1) * (d_n + 1)
    assert len(set(idx)) == len(idx)
    degrees = [m + n for m, n in idx]
    assert degrees == sorted(degrees)
