from __future__ import annotations

import numpy as np
import pytest

from moment2d import (
    AtomicMeasure,
    CommutationViolatedError,
    StructureViolationError,
    FixedPointError,
    MomentTable,
    NotSelfAdjointA2Error,
    NotUnitaryError,
    SamplerSpec,
    SymmetricPair,
    build_isometric_pair,
    canonical_extension,
    determinacy,
    e1,
    e2,
    e3,
    enumerate_commutant_unitaries,
    joint_spectral_measure,
    moments_from_pair,
    moments_of_measure,
    pair_resolvent_of_measure,
    refine_measure,
    solve_canonical,
    verify_solution,
)
from moment2d.linalg import is_unitary

import oracles


def _scalar_pair() -> SymmetricPair:
    return SymmetricPair(dim=1,
                         a1_domain=np.zeros((1, 0), dtype=complex),
                         a1_action=np.zeros((1, 0), dtype=complex),
                         a2_domain=np.eye(1, dtype=complex),
                         a2_action=np.zeros((1, 1), dtype=complex),
                         h00=np.array([1.0 + 0j]),
                         j_matrix=np.eye(1, dtype=complex),
                         a2_selfadjoint=True)


def test_sampler_spec_validation():
    with pytest.raises(ValueError):
        SamplerSpec(kind="haar-random", count=3)
    with pytest.raises(ValueError):
        SamplerSpec(kind="haar-random", count=0, seed=1)
    with pytest.raises(ValueError):
        SamplerSpec(kind="exhaustive-phases", phases=0)
    with pytest.raises(ValueError):
        SamplerSpec(kind="unknown")


def test_commutant_enumeration_structure():
    assert list(enumerate_commutant_unitaries(
        np.zeros((0, 0), dtype=complex), SamplerSpec())) == []
    sampler = SamplerSpec(kind="haar-random", count=3, seed=1)
    # Equal eigenvalues leave the commutant as the full unitary group.
    full = list(enumerate_commutant_unitaries(np.diag([1j, 1j]), sampler))
    assert len(full) == 3
    assert all(is_unitary(u, 1e-10) for u in full)
    assert any(abs(u[0, 1]) > 1e-3 for u in full)
    # Distinct eigenvalues force the commutant to be diagonal.
    split = list(enumerate_commutant_unitaries(np.diag([1j, -1j]), sampler))
    for u in split:
        assert is_unitary(u, 1e-10)
        assert abs(u[0, 1]) < 1e-12 and abs(u[1, 0]) < 1e-12
        assert abs(np.diag([1j, -1j]) @ u - u @ np.diag([1j, -1j])).max() < 1e-12


def test_commutant_enumeration_phases_and_identity():
    phases = list(enumerate_commutant_unitaries(
        np.array([[1j]]), SamplerSpec(kind="exhaustive-phases", phases=4)))
    got = sorted(np.angle(p[0, 0]) % (2 * np.pi) for p in phases)
    want = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
    assert np.allclose(got, want, atol=1e-12)
    only = list(enumerate_commutant_unitaries(np.diag([1j, -1j]), SamplerSpec()))
    assert len(only) == 1
    assert np.array_equal(only[0], np.eye(2))
    with pytest.raises(NotUnitaryError):
        list(enumerate_commutant_unitaries(np.diag([0.5 + 0j, 1j]),
                                           SamplerSpec()))


def test_joint_spectral_measure_frozen_cases():
    flip = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    mu = joint_spectral_measure(flip, flip, np.array([1.0, 0.0], dtype=complex))
    assert np.max(np.abs(mu.points - [[-1.0, -1.0], [1.0, 1.0]])) < 1e-10
    assert np.max(np.abs(mu.weights - [0.5, 0.5])) < 1e-10

    zero = np.zeros((1, 1), dtype=complex)
    mu0 = joint_spectral_measure(zero, zero, np.array([1.0 + 0j]))
    assert mu0.n_atoms == 1
    assert np.max(np.abs(mu0.points[0])) < 1e-12
    assert mu0.weights[0] == pytest.approx(1.0)

    a1 = np.diag([2.0 + 0j, -1.0 + 0j])
    a2 = np.diag([0.5 + 0j, 3.0 + 0j])
    h = np.array([0.6, 0.8], dtype=complex)
    mu2 = joint_spectral_measure(a1, a2, h)
    assert np.max(np.abs(mu2.points - [[-1.0, 3.0], [2.0, 0.5]])) < 1e-10
    assert np.max(np.abs(mu2.weights - [0.64, 0.36])) < 1e-10


def test_joint_spectral_measure_gates():
    flip = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
    with pytest.raises(StructureViolationError):
        joint_spectral_measure(skew, flip, np.array([1.0, 0.0], dtype=complex))
    noncommuting = np.diag([1.0 + 0j, 2.0 + 0j])
    with pytest.raises(CommutationViolatedError):
        joint_spectral_measure(flip, noncommuting,
                               np.array([1.0, 0.0], dtype=complex))
    with pytest.raises(ValueError):
        joint_spectral_measure(flip, flip, np.array([1.0 + 0j]))


def test_canonical_extension_invariants():
    scenario = e3()
    pair = scenario.pair
    iso = build_isometric_pair(pair)
    for phase in (1.0, 1j, -1j):
        ext = canonical_extension(pair, iso, np.array([[phase]], dtype=complex))
        b1 = ext.a1_tilde
        assert np.max(np.abs(b1 - b1.conj().T)) < 1e-9
        # The extension agrees with A1 on its domain.
        assert np.max(np.abs(b1 @ pair.a1_domain - pair.a1_action)) < 1e-8
        b2 = pair.full_matrix(2)
        assert np.max(np.abs(b1 @ b2 - b2 @ b1)) < 1e-8


def test_canonical_extension_gates():
    pair = e3().pair
    iso = build_isometric_pair(pair)
    with pytest.raises(NotUnitaryError):
        canonical_extension(pair, iso, np.array([[0.5 + 0j]]))
    bad = SymmetricPair(dim=1,
                        a1_domain=np.eye(1, dtype=complex),
                        a1_action=np.zeros((1, 1), dtype=complex),
                        a2_domain=np.zeros((1, 0), dtype=complex),
                        a2_action=np.zeros((1, 0), dtype=complex),
                        h00=np.array([1.0 + 0j]),
                        j_matrix=np.eye(1, dtype=complex),
                        a2_selfadjoint=False)
    with pytest.raises(NotSelfAdjointA2Error):
        build_isometric_pair(bad)
    with pytest.raises(NotSelfAdjointA2Error):
        determinacy(bad)


def test_determinacy_matches_defect_indices():
    assert determinacy(e1().pair) is True
    assert determinacy(e2().pair) is True
    assert determinacy(e3().pair) is False
    assert determinacy(_scalar_pair()) is False


def test_verify_solution_reports():
    scenario = e2()
    good = verify_solution(scenario.measure, scenario.table,
                           determinate=True, u2_seed="manual")
    assert good.passed is True
    assert good.max_abs_moment_error < 1e-12
    assert good.degrees_checked == (4, 4)
    assert good.determinate is True
    assert good.u2_seed == "manual"
    bad = verify_solution(e1().measure, scenario.table)
    assert bad.passed is False
    assert bad.max_abs_moment_error == pytest.approx(1.0)


def test_refine_measure_improves_a_perturbed_solution():
    scenario = e2()
    rough = AtomicMeasure(scenario.measure.points + 0.01,
                          scenario.measure.weights * 1.02)
    before = verify_solution(rough, scenario.table).max_abs_moment_error
    refined = refine_measure(rough, scenario.table)
    after = verify_solution(refined, scenario.table).max_abs_moment_error
    assert after < before * 1e-4
    assert after < 1e-9


def test_solve_canonical_determinate_table():
    reports = list(solve_canonical(e2().table))
    assert len(reports) == 1
    report = reports[0]
    assert report.determinate is True
    assert report.u2_seed == "determinate"
    assert report.passed is True
    assert report.max_abs_moment_error < 1e-10
    mu = report.measure
    assert np.max(np.abs(mu.points - [[-1.0, -1.0], [1.0, 1.0]])) < 1e-8
    assert np.max(np.abs(mu.weights - [0.5, 0.5])) < 1e-8


def test_solve_canonical_rejects_truncated_second_operator():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-2, 2, size=(3, 2))
    ws = rng.uniform(0.1, 1, size=3)
    table = moments_of_measure(AtomicMeasure(pts, ws), 2, 2)
    with pytest.raises(NotSelfAdjointA2Error):
        list(solve_canonical(table, d_m=1, d_n=1))


def test_solve_canonical_indeterminate_scalar_family():
    """Empty-domain A1 on a line: each parameter phase moves the single
    atom along the Moebius image of the unit circle."""
    pair = _scalar_pair()
    assert determinacy(pair) is False
    rejected = []
    reports = list(solve_canonical(
        pair, sampler=SamplerSpec(kind="exhaustive-phases", phases=4),
        on_reject=lambda label, exc: rejected.append((label, exc))))
    assert [r.u2_seed for r in reports] == [
        "exhaustive-phases:4:0", "exhaustive-phases:4:1",
        "exhaustive-phases:4:3"]
    atoms = [tuple(np.round(r.measure.points[0], 8)) for r in reports]
    assert atoms == [(0.0, 0.0), (-1.0, 0.0), (1.0, 0.0)]
    assert all(r.passed for r in reports)
    assert all(r.measure.total_mass == pytest.approx(1.0) for r in reports)
    # One phase maps to the extension with eigenvalue one, which has no
    # inverse Cayley image.
    assert len(rejected) == 1
    assert rejected[0][0] == "exhaustive-phases:4:2"
    assert isinstance(rejected[0][1], FixedPointError)


def test_solve_canonical_truncated_jacobi_family():
    scenario = e3()
    reports = list(solve_canonical(
        scenario.pair, sampler=SamplerSpec(kind="exhaustive-phases", phases=4)))
    assert len(reports) == 4
    ref = moments_from_pair(scenario.pair, 2, 2)
    for report in reports:
        assert report.determinate is False
        assert report.passed
        assert report.max_abs_moment_error < 1e-9
        assert report.measure.total_mass == pytest.approx(ref.entry(0, 0),
                                                          abs=1e-9)
    # Distinct parameters give distinct solutions, visible already in the
    # resolvent scalar at one fixed point.
    values = [pair_resolvent_of_measure(r.measure, 1.3j, 0.4 + 0.9j)
              for r in reports]
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            assert abs(values[i] - values[j]) > 1e-6


def test_solve_canonical_haar_reruns_are_identical():
    sampler = SamplerSpec(kind="haar-random", count=3, seed=5)
    first = list(solve_canonical(e3().pair, sampler=sampler))
    second = list(solve_canonical(e3().pair, sampler=sampler))
    assert [r.u2_seed for r in first] == [
        "haar-random:seed=5:0", "haar-random:seed=5:1", "haar-random:seed=5:2"]
    for a, b in zip(first, second):
        assert np.array_equal(a.measure.points, b.measure.points)
        assert np.array_equal(a.measure.weights, b.measure.weights)
        assert a.max_abs_moment_error == b.max_abs_moment_error


def test_solve_canonical_recovers_measures_from_tables():
    rng = np.random.default_rng(21)
    for k in (2, 4):
        pts = rng.uniform(-2, 2, size=(k, 2))
        ws = rng.uniform(0.1, 1, size=k)
        mu = AtomicMeasure(pts, ws)
        table = moments_of_measure(mu, 8, 8)
        reports = list(solve_canonical(table))
        assert len(reports) == 1
        got = reports[0].measure.sorted()
        want = mu.sorted()
        assert got.n_atoms == want.n_atoms
        assert np.max(np.abs(got.points - want.points)) < 1e-7
        assert np.max(np.abs(got.weights - want.weights)) < 1e-7
