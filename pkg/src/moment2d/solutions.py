"""Canonical solutions of the moment problem and their enumeration.

A canonical solution lives inside the state space itself: it is the
joint spectral measure (with respect to the cyclic vector) of a pair of
commuting self-adjoint matrices ``(A1_tilde, A2)`` where ``A1_tilde``
extends the partially defined shift ``A1``.  The extensions are built
from a unitary parameter ``U2`` ranging over the commutant of
``W2 = V2|_{H2}`` via the conjugation factorization of ``W2``; the
inverse Cayley transform turns the extended isometry back into a
Hermitian matrix.  Distinct parameters give distinct solutions, one per
``U2``, and the determinate case (zero defect) yields exactly one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
import scipy.linalg
import scipy.optimize

from .cayley import (ConjugationFactorization, IsometricPair,
                     build_isometric_pair, godich_lutsenko, inverse_cayley)
from .config import (ATOM_MERGE_TOL, CLUSTER_TOL, DEFAULT_TOLERANCES,
                     FIXED_POINT_TOL, STRUCTURE_TOL, SUBSPACE_TOL,
                     WEIGHT_DROP_TOL, Tolerances)
from .errors import (ClusterAmbiguityError, CommutationViolatedError,
                     FixedPointError, NotSelfAdjointA2Error,
                     StructureViolationError)
from .gns import (SymmetricPair, _class_vector_via_pair, build_gns,
                  build_operators)
from .linalg import (as_complex_matrix, haar_unitary, is_hermitian,
                     is_unitary, require_unitary, subspace_residual)
from .moments import AtomicMeasure, MomentTable, moments_of_measure
from .resolvents import pair_resolvent_of_measure

__all__ = [
    "SamplerSpec",
    "CanonicalExtension",
    "SolutionReport",
    "enumerate_commutant_unitaries",
    "canonical_extension",
    "joint_spectral_measure",
    "verify_solution",
    "determinacy",
    "moments_from_pair",
    "refine_measure",
    "solve_canonical",
]

SAMPLER_KINDS = ("identity-only", "haar-random", "exhaustive-phases")


@dataclass(frozen=True)
class SamplerSpec:
    """How to walk the commutant of ``W2``.

    ``identity-only`` emits the identity; ``haar-random`` emits
    ``count`` block-Haar unitaries seeded by ``seed``;
    ``exhaustive-phases`` emits scalar phases ``exp(2 pi i l / phases)``
    per eigenvalue block, over the full Cartesian product (the complete
    finite torus grid when every block is one-dimensional).
    """

    kind: str = "identity-only"
    count: int = 1
    seed: int | None = None
    phases: int = 4

    def __post_init__(self):
        if self.kind not in SAMPLER_KINDS:
            raise ValueError(f"unknown sampler kind {self.kind!r}; "
                             f"expected one of {SAMPLER_KINDS}")
        if self.kind == "haar-random":
            if self.seed is None:
                raise ValueError("haar-random sampler requires a seed")
            if self.count < 1:
                raise ValueError("haar-random sampler requires count >= 1")
        if self.kind == "exhaustive-phases" and self.phases < 1:
            raise ValueError("exhaustive-phases sampler requires phases >= 1")


@dataclass(frozen=True)
class CanonicalExtension:
    """One self-adjoint extension generating a canonical solution.

    ``a1_tilde`` is the Hermitian extension of ``A1``; ``u2_used`` is
    the commutant parameter; ``factorization`` factors ``W2`` into the
    conjugations ``K, L``; ``u24`` is the linear isometry from ``H2``
    coordinates onto ``H4`` given by the conjugation composition.
    """

    a1_tilde: np.ndarray
    u2_used: np.ndarray
    factorization: ConjugationFactorization
    u24: np.ndarray


@dataclass(frozen=True)
class SolutionReport:
    """Verification record for one recovered measure."""

    measure: AtomicMeasure
    max_abs_moment_error: float
    degrees_checked: tuple
    determinate: bool | None
    u2_seed: str | None = None
    passed: bool | None = None


def _cluster_values(values: np.ndarray, tol: float) -> list:
    """Greedy clustering of scalars by distance to cluster centroids."""
    clusters: list[dict] = []
    for i, v in enumerate(values):
        target = None
        for c in clusters:
            if abs(v - c["centroid"]) <= tol:
                target = c
                break
        if target is None:
            clusters.append({"idx": [i], "centroid": v})
        else:
            target["idx"].append(i)
            members = target["idx"]
            target["centroid"] = sum(values[j] for j in members) / len(members)
    return [np.asarray(c["idx"], dtype=int) for c in clusters]


def enumerate_commutant_unitaries(w2: np.ndarray, sampler: SamplerSpec,
                                  cluster_tol: float = CLUSTER_TOL,
                                  structure_tol: float = STRUCTURE_TOL) -> Iterator[np.ndarray]:
    """Stream of unitaries commuting with the unitary ``w2``.

    The commutant of a unitary matrix consists exactly of the block
    operators over its eigenspaces (eigenvalues clustered at
    ``cluster_tol``), so every emitted matrix is unitary and commutes
    with ``w2`` up to rounding.  Deterministic under a fixed sampler.
    An empty ``w2`` yields an empty stream.
    """
    w2 = require_unitary(w2, structure_tol, "W2")
    d = w2.shape[0]
    if d == 0:
        return
    t, z_mat = scipy.linalg.schur(w2, output="complex")
    off = t - np.diag(np.diagonal(t))
    if float(np.linalg.norm(off)) > structure_tol * d:
        raise StructureViolationError("W2 is not normal within tolerance")
    eigvals = np.diagonal(t)
    blocks = _cluster_values(eigvals, cluster_tol)

    def assemble(block_mats: list) -> np.ndarray:
        m = np.zeros((d, d), dtype=complex)
        for idx, mat in zip(blocks, block_mats):
            m[np.ix_(idx, idx)] = mat
        return z_mat @ m @ z_mat.conj().T

    if sampler.kind == "identity-only":
        yield np.eye(d, dtype=complex)
    elif sampler.kind == "haar-random":
        children = np.random.SeedSequence(sampler.seed).spawn(sampler.count)
        for child in children:
            rng = np.random.default_rng(child)
            yield assemble([haar_unitary(len(idx), rng) for idx in blocks])
    else:
        g = sampler.phases
        phases = np.exp(2j * np.pi * np.arange(g) / g)
        for combo in itertools.product(range(g), repeat=len(blocks)):
            yield assemble([phases[l] * np.eye(len(idx), dtype=complex)
                            for l, idx in zip(combo, blocks)])


def canonical_extension(pair: SymmetricPair, iso: IsometricPair,
                        u2: np.ndarray,
                        fixed_tol: float = FIXED_POINT_TOL,
                        structure_tol: float = STRUCTURE_TOL) -> CanonicalExtension:
    """Self-adjoint extension of ``A1`` from a commutant parameter.

    Computes ``W2 = U|_{H2}``, its conjugation factorization ``(K, L)``,
    the linear isometry ``U24 = J o K : H2 -> H4``, and the unitary
    ``V_tilde = V1 (+) (U24 U2)`` whose inverse Cayley transform is the
    returned Hermitian extension.  A ``u2`` leading to a fixed point of
    ``V_tilde`` raises ``FixedPointError`` (that parameter is rejected);
    structural failures (reduction, range of ``U24``, extension or
    commutation property) raise ``StructureViolationError``.
    """
    if not pair.a2_selfadjoint:
        raise NotSelfAdjointA2Error(
            "A2 is not self-adjoint; canonical extensions unavailable",
            defect_a1=pair.defect_index(1), defect_a2=pair.defect_index(2))
    n0 = iso.n0_basis
    ninf = iso.ninf_basis
    u = iso.u_matrix
    d2 = n0.shape[1]
    u2 = as_complex_matrix(u2)
    if u2.shape != (d2, d2):
        raise ValueError(f"U2 has shape {u2.shape}, expected ({d2}, {d2})")
    u2 = require_unitary(u2, structure_tol, "U2")
    w2 = n0.conj().T @ u @ n0
    if d2:
        red = float(np.linalg.norm(u @ n0 - n0 @ w2))
        if red > structure_tol * max(1.0, float(np.linalg.norm(u))):
            raise StructureViolationError(
                f"second Cayley transform does not reduce the defect "
                f"subspace (residual {red:.3e})")
        comm = float(np.linalg.norm(u2 @ w2 - w2 @ u2))
        if comm > structure_tol * max(1.0, float(np.linalg.norm(w2))):
            raise CommutationViolatedError(
                f"U2 does not commute with W2 (residual {comm:.3e})")
    factorization = godich_lutsenko(w2, structure_tol)
    # J o K is linear: x -> J(K x) = j_matrix conj(n0 K conj(x)).
    u24 = pair.j_matrix @ np.conj(n0 @ factorization.k_matrix)
    if d2:
        iso_res = float(np.linalg.norm(u24.conj().T @ u24 - np.eye(d2)))
        if iso_res > structure_tol * d2:
            raise StructureViolationError(
                f"U24 is not isometric (residual {iso_res:.3e})")
        if subspace_residual(ninf, u24) > structure_tol:
            raise StructureViolationError(
                "U24 does not map the defect subspace into H4")
    v_tilde = iso.v_on_space()
    if d2:
        v_tilde = v_tilde + u24 @ u2 @ n0.conj().T
    if not is_unitary(v_tilde, structure_tol * 10):
        raise StructureViolationError("extended isometry is not unitary")
    a1_tilde = inverse_cayley(v_tilde, fixed_tol, structure_tol * 10)
    ext_res = float(np.linalg.norm(a1_tilde @ pair.a1_domain - pair.a1_action))
    scale = max(1.0, float(np.linalg.norm(pair.a1_action)))
    if ext_res > structure_tol * 100 * scale:
        raise StructureViolationError(
            f"extension does not restrict to A1 (residual {ext_res:.3e})")
    a2 = pair.full_matrix(2)
    comm = float(np.linalg.norm(a1_tilde @ a2 - a2 @ a1_tilde))
    comm_scale = max(1.0, float(np.linalg.norm(a1_tilde))
                     * float(np.linalg.norm(a2)))
    if comm > structure_tol * 100 * comm_scale:
        raise StructureViolationError(
            f"extension does not commute with A2 (residual {comm:.3e})")
    return CanonicalExtension(a1_tilde=a1_tilde, u2_used=u2,
                              factorization=factorization, u24=u24)


def joint_spectral_measure(a1: np.ndarray, a2: np.ndarray, h00: np.ndarray,
                           cluster_tol: float = CLUSTER_TOL,
                           weight_drop_tol: float = WEIGHT_DROP_TOL,
                           merge_tol: float = ATOM_MERGE_TOL,
                           structure_tol: float = STRUCTURE_TOL,
                           max_retries: int = 5,
                           combo_seed: int = 1234) -> AtomicMeasure:
    """Joint spectral measure of two commuting Hermitian matrices.

    Diagonalizes a random real combination ``c1 A1 + c2 A2``, clusters
    its eigenvalues, and reads one atom ``(t1, t2)`` per cluster from
    the compressed operators, which must be scalar on the cluster; a
    non-scalar compression means the random combination collided two
    distinct joint eigenvalues, and a fresh combination is drawn (at
    most ``max_retries`` times before ``ClusterAmbiguityError``).
    Weights are ``||P h00||^2``; atoms below ``weight_drop_tol`` are
    dropped and atoms within ``merge_tol`` are merged.
    """
    a1 = as_complex_matrix(a1)
    a2 = as_complex_matrix(a2)
    h = np.asarray(h00, dtype=complex).reshape(-1)
    n = a1.shape[0]
    if a1.shape != (n, n) or a2.shape != (n, n) or h.shape[0] != n:
        raise ValueError("dimension mismatch between operators and h00")
    if not (is_hermitian(a1, structure_tol) and is_hermitian(a2, structure_tol)):
        raise StructureViolationError("operators must be Hermitian")
    op_scale = max(1.0, float(np.linalg.norm(a1)), float(np.linalg.norm(a2)))
    comm = float(np.linalg.norm(a1 @ a2 - a2 @ a1))
    if comm > structure_tol * op_scale * op_scale:
        raise CommutationViolatedError(
            f"operators do not commute (residual {comm:.3e})")
    rng = np.random.default_rng(combo_seed)
    for _ in range(max_retries):
        c = rng.normal(size=2)
        c = c / np.linalg.norm(c)
        m = c[0] * a1 + c[1] * a2
        m = 0.5 * (m + m.conj().T)
        vals, vecs = np.linalg.eigh(m)
        val_scale = 1.0 + (float(np.max(np.abs(vals))) if vals.size else 0.0)
        # Chain clustering along the sorted eigenvalues.
        clusters = []
        start = 0
        for i in range(1, n + 1):
            if i == n or vals[i] - vals[i - 1] > cluster_tol * val_scale:
                clusters.append(np.arange(start, i))
                start = i
        atoms = []
        ok = True
        for idx in clusters:
            s = vecs[:, idx]
            q = len(idx)
            m1 = s.conj().T @ a1 @ s
            m2 = s.conj().T @ a2 @ s
            t1 = float(np.trace(m1).real) / q
            t2 = float(np.trace(m2).real) / q
            res = max(float(np.linalg.norm(m1 - t1 * np.eye(q))),
                      float(np.linalg.norm(m2 - t2 * np.eye(q))))
            if res > merge_tol * op_scale:
                ok = False
                break
            weight = float(np.linalg.norm(s.conj().T @ h) ** 2)
            atoms.append((t1, t2, weight))
        if not ok:
            continue
        kept = [(t1, t2, w) for (t1, t2, w) in atoms if w >= weight_drop_tol]
        merged: list[list[float]] = []
        for t1, t2, w in kept:
            for entry in merged:
                if max(abs(entry[0] - t1), abs(entry[1] - t2)) <= merge_tol:
                    total = entry[2] + w
                    entry[0] = (entry[0] * entry[2] + t1 * w) / total
                    entry[1] = (entry[1] * entry[2] + t2 * w) / total
                    entry[2] = total
                    break
            else:
                merged.append([t1, t2, w])
        points = np.array([[e[0], e[1]] for e in merged], dtype=float)
        weights = np.array([e[2] for e in merged], dtype=float)
        if points.size == 0:
            points = points.reshape(0, 2)
        return AtomicMeasure(points, weights, merge_tol).sorted()
    raise ClusterAmbiguityError(
        f"joint eigenvalue clusters remained ambiguous after "
        f"{max_retries} random combinations")


def verify_solution(measure: AtomicMeasure, table: MomentTable,
                    tol: float = 1e-8, determinate: bool | None = None,
                    u2_seed: str | None = None) -> SolutionReport:
    """Compare a measure's exact moments against a table.

    ``max_abs_moment_error`` is the worst absolute deviation over the
    full stored rectangle; ``passed`` records the comparison with
    ``tol``.
    """
    mom = moments_of_measure(measure, table.max_m, table.max_n)
    err = float(np.max(np.abs(mom.values - table.values)))
    return SolutionReport(measure=measure, max_abs_moment_error=err,
                          degrees_checked=(table.max_m, table.max_n),
                          determinate=determinate, u2_seed=u2_seed,
                          passed=bool(err <= tol))


def determinacy(pair: SymmetricPair) -> bool:
    """Whether the moment problem of the pair has a unique solution.

    With ``A2`` self-adjoint this is equivalent to ``A1`` being
    self-adjoint, i.e. to vanishing defect numbers; here that means the
    domain of ``A1`` spans the whole space.
    """
    if not pair.a2_selfadjoint:
        raise NotSelfAdjointA2Error(
            "determinacy criterion requires A2 self-adjoint",
            defect_a1=pair.defect_index(1), defect_a2=pair.defect_index(2))
    return pair.defect_index(1) == 0


def moments_from_pair(pair: SymmetricPair, max_m: int, max_n: int,
                      domain_tol: float = SUBSPACE_TOL,
                      structure_tol: float = STRUCTURE_TOL) -> MomentTable:
    """Moments ``(A1^m A2^n h00, h00)`` reachable through the domains.

    Rows are added while every chain ``A1^m A2^n h00`` with ``n <=
    max_n`` stays inside the stored domains, up to ``max_m``; the
    result's ``max_m`` reports how far that held (0 when ``h00`` already
    leaves ``D(A1)``).  Values must come out real within tolerance.
    """
    if max_m < 0 or max_n < 0:
        raise ValueError("max_m and max_n must be >= 0")
    rows = []
    for m in range(max_m + 1):
        vecs = [_class_vector_via_pair(pair, m, n, domain_tol)
                for n in range(max_n + 1)]
        if any(v is None for v in vecs):
            break
        rows.append([complex(np.vdot(pair.h00, v)) for v in vecs])
    if not rows:
        raise ValueError("no moment row is reachable: h00 must at least "
                         "support the m = 0 chain")
    values = np.asarray(rows)
    worst = float(np.max(np.abs(values.imag)))
    if worst > structure_tol * (1.0 + float(np.max(np.abs(values)))):
        raise StructureViolationError(
            f"pair moments are not real (max imaginary part {worst:.3e})")
    return MomentTable(len(rows) - 1, max_n, values.real)


def refine_measure(measure: AtomicMeasure, table: MomentTable,
                   max_nfev: int = 200) -> AtomicMeasure:
    """Polish atoms and weights against the table by least squares.

    Gauss-Newton style refinement of the moment residuals with analytic
    Jacobian; weights stay positive through bounds.  Intended as a final
    polish when atoms are already close, where it converges to the
    rounding floor of the moment evaluation.
    """
    k = measure.n_atoms
    if k == 0:
        return measure
    ms = np.arange(table.max_m + 1)
    ns = np.arange(table.max_n + 1)
    target = table.values

    def unpack(x):
        return x[:k], x[k:2 * k], x[2 * k:]

    def residuals(x):
        t1, t2, w = unpack(x)
        p1 = t1[None, :] ** ms[:, None]           # (M+1, k)
        p2 = t2[None, :] ** ns[:, None]           # (N+1, k)
        model = np.einsum("mk,nk,k->mn", p1, p2, w)
        return (model - target).ravel()

    def jacobian(x):
        t1, t2, w = unpack(x)
        p1 = t1[None, :] ** ms[:, None]
        p2 = t2[None, :] ** ns[:, None]
        d1 = ms[:, None] * np.where(ms[:, None] >= 1,
                                    t1[None, :] ** np.maximum(ms[:, None] - 1, 0),
                                    0.0)
        d2 = ns[:, None] * np.where(ns[:, None] >= 1,
                                    t2[None, :] ** np.maximum(ns[:, None] - 1, 0),
                                    0.0)
        jt1 = np.einsum("mk,nk,k->mnk", d1, p2, w)
        jt2 = np.einsum("mk,nk,k->mnk", p1, d2, w)
        jw = np.einsum("mk,nk->mnk", p1, p2)
        size = (table.max_m + 1) * (table.max_n + 1)
        return np.concatenate([jt1.reshape(size, k), jt2.reshape(size, k),
                               jw.reshape(size, k)], axis=1)

    x0 = np.concatenate([measure.points[:, 0], measure.points[:, 1],
                         measure.weights])
    lower = np.concatenate([np.full(2 * k, -np.inf), np.full(k, 1e-14)])
    upper = np.full(3 * k, np.inf)
    result = scipy.optimize.least_squares(
        residuals, x0, jac=jacobian, bounds=(lower, upper), method="trf",
        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    t1, t2, w = unpack(result.x)
    points = np.stack([t1, t2], axis=1)
    return AtomicMeasure(points, w, measure.merge_tol).sorted()


def _selfadjoint_pair_scalar(a1: np.ndarray, a2: np.ndarray, h00: np.ndarray,
                             lam1: complex, lam2: complex) -> complex:
    """Scalar ``((E + lam1 A1)(A1 - lam1)^-1 (E + lam2 A2)(A2 - lam2)^-1
    h00, h00)`` for commuting Hermitian matrices."""
    n = a1.shape[0]
    eye = np.eye(n, dtype=complex)
    r1 = np.linalg.solve(a1 - lam1 * eye, eye + lam1 * a1)
    r2 = np.linalg.solve(a2 - lam2 * eye, eye + lam2 * a2)
    return complex(np.vdot(h00, r1 @ r2 @ h00))


def _cross_validation_points(count: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        re1 = float(rng.uniform(0.25, 2.0)) * (1.0 if rng.integers(2) else -1.0)
        im1 = float(rng.uniform(0.5, 1.5))
        re2 = float(rng.uniform(0.25, 2.0)) * (1.0 if rng.integers(2) else -1.0)
        im2 = float(rng.uniform(0.5, 1.5)) * (1.0 if rng.integers(2) else -1.0)
        points.append((complex(re1, im1), complex(re2, im2)))
    return points


def _sampler_label(sampler: SamplerSpec, idx: int) -> str:
    if sampler.kind == "haar-random":
        return f"haar-random:seed={sampler.seed}:{idx}"
    if sampler.kind == "exhaustive-phases":
        return f"exhaustive-phases:{sampler.phases}:{idx}"
    return f"identity-only:{idx}"


def solve_canonical(source, sampler: SamplerSpec = SamplerSpec(),
                    d_m: int | None = None, d_n: int | None = None,
                    max_n: int | None = None,
                    tolerances: Tolerances = DEFAULT_TOLERANCES,
                    verify_tol: float = 1e-8,
                    refine: bool = False,
                    cross_check: bool = True,
                    cross_points: int = 5,
                    cross_tol: float = 1e-8,
                    cross_seed: int = 777,
                    on_reject: Callable[[str, FixedPointError], None] | None = None) -> Iterator[SolutionReport]:
    """Stream of canonical solutions for a table or an operator pair.

    ``source`` is either a :class:`MomentTable` (the space and shifts
    are built at rectangle ``(d_m, d_n)``, defaulting to the largest the
    table supports) or a :class:`SymmetricPair` (operator-driven path,
    verified against the pair moments reachable through the domains, up
    to column degree ``max_n``).  Each commutant parameter ``U2`` from
    the sampler yields one report; in the determinate case the stream
    holds exactly one report regardless of the sampler.

    Every emitted measure is cross-validated: the scalar pair resolvent
    of the extension equals the atomic-sum kernel of the measure at
    ``cross_points`` random points within ``cross_tol`` (else
    ``StructureViolationError``).  Parameters whose extended isometry
    has a fixed point are skipped after calling ``on_reject(label,
    error)`` when given.  With ``refine`` (table input only) atoms and
    weights are polished against the table before verification.
    """
    if isinstance(source, MomentTable):
        table = source
        if d_m is None:
            d_m = table.max_m // 2
        if d_n is None:
            d_n = table.max_n // 2
        space = build_gns(table, d_m, d_n, tolerances.rank_tol)
        pair = build_operators(space, tolerances.residual_gate,
                               tolerances.subspace_tol,
                               tolerances.structure_tol)
        ref_table = table
        from_table = True
    elif isinstance(source, SymmetricPair):
        pair = source
        from_table = False
    else:
        raise TypeError("source must be a MomentTable or a SymmetricPair")
    if not pair.a2_selfadjoint:
        raise NotSelfAdjointA2Error(
            "A2 is not self-adjoint on this input; canonical solutions "
            "are unavailable (operator-driven input with a self-adjoint "
            "A2 is the supported route)",
            defect_a1=pair.defect_index(1), defect_a2=pair.defect_index(2))
    determinate = pair.defect_index(1) == 0
    iso = build_isometric_pair(pair, tolerances.subspace_tol,
                               tolerances.structure_tol,
                               tolerances.fixed_point_tol)
    if not from_table:
        if max_n is None:
            max_n = 2 * pair.dim
        ref_table = moments_from_pair(pair, 2 * pair.dim, max_n,
                                      tolerances.subspace_tol,
                                      tolerances.structure_tol)
    a2_full = pair.full_matrix(2)
    if determinate:
        stream = iter([np.zeros((0, 0), dtype=complex)])
        labels = iter(["determinate"])
    else:
        w2 = iso.n0_basis.conj().T @ iso.u_matrix @ iso.n0_basis
        stream = enumerate_commutant_unitaries(w2, sampler,
                                               tolerances.cluster_tol,
                                               tolerances.structure_tol)
        labels = (_sampler_label(sampler, i) for i in itertools.count())
    points = _cross_validation_points(cross_points, cross_seed) if cross_check else []
    for u2, label in zip(stream, labels):
        try:
            ext = canonical_extension(pair, iso, u2,
                                      tolerances.fixed_point_tol,
                                      tolerances.structure_tol)
        except FixedPointError as exc:
            if on_reject is not None:
                on_reject(label, exc)
            continue
        measure = joint_spectral_measure(
            ext.a1_tilde, a2_full, pair.h00,
            cluster_tol=tolerances.cluster_tol,
            weight_drop_tol=tolerances.weight_drop_tol,
            merge_tol=tolerances.atom_merge_tol,
            structure_tol=tolerances.structure_tol)
        for lam1, lam2 in points:
            lhs = _selfadjoint_pair_scalar(ext.a1_tilde, a2_full, pair.h00,
                                           lam1, lam2)
            rhs = pair_resolvent_of_measure(measure, lam1, lam2)
            if abs(lhs - rhs) > cross_tol * (1.0 + abs(rhs)):
                raise StructureViolationError(
                    f"resolvent cross-validation failed at ({lam1}, {lam2}): "
                    f"|{lhs} - {rhs}| > {cross_tol}")
        if refine and from_table:
            measure = refine_measure(measure, ref_table)
        yield verify_solution(measure, ref_table, verify_tol,
                              determinate=determinate, u2_seed=label)
