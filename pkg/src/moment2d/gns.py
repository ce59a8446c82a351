"""GNS-style Hilbert space and shift operators built from a moment table.

The localized moment matrix on a degree rectangle is the Gram matrix of
the monomial classes ``h_{m,n}``.  Quotienting by its kernel yields a
finite-dimensional Hilbert space carrying two densely-defined symmetric
shift operators

    A1 h_{m,n} = h_{m+1,n}   on  span{h_{m,n} : m <= d_m - 1},
    A2 h_{m,n} = h_{m,n+1}   on  span{h_{m,n} : n <= d_n - 1},

with cyclic vector ``h_{0,0}`` and the canonical conjugation ``J`` that
fixes every class.  Because the Gram matrix is real, the coordinate
construction below is real, and ``J`` acts as plain entrywise
conjugation (its matrix is the identity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RANK_TOL, RESIDUAL_GATE, STRUCTURE_TOL, SUBSPACE_TOL
from .errors import (DomainCollapseError, InconsistentShiftError,
                     NotPsdError, SingularShiftError)
from .linalg import is_hermitian, orth_columns
from .moments import (MomentTable, carleman_diagnostic, CarlemanReport,
                      moment_matrix, monomial_indices)

__all__ = ["GnsSpace", "SymmetricPair", "build_gns", "build_operators",
           "quasianalytic_vector_check"]


@dataclass(frozen=True)
class GnsSpace:
    """Quotient Hilbert space of monomial classes.

    ``coords`` has one column per monomial (ordered like
    ``monomial_index``); column ``j`` holds the coordinates of the class
    ``h_{m,n}`` in an orthonormal basis of the quotient, so that
    ``coords.T @ coords`` reproduces the Gram matrix.
    """

    d_m: int
    d_n: int
    monomial_index: tuple
    gram: np.ndarray
    rank: int
    coords: np.ndarray
    rank_tol: float

    def index_of(self, m: int, n: int) -> int:
        try:
            return self.monomial_index.index((m, n))
        except ValueError:
            raise KeyError(f"monomial ({m}, {n}) outside rectangle "
                           f"({self.d_m}, {self.d_n})") from None

    def class_vector(self, m: int, n: int) -> np.ndarray:
        """Coordinates of the class ``h_{m,n}``."""
        return self.coords[:, self.index_of(m, n)].copy()


@dataclass(frozen=True)
class SymmetricPair:
    """Two symmetric shift operators on a common finite-dimensional space.

    Each operator is stored as an orthonormal domain basis (``dim x k``)
    together with an action matrix sending domain coordinates to space
    coordinates: ``A (domain @ c) = action @ c``.  ``j_matrix`` is the
    matrix of the antilinear conjugation ``x -> j_matrix @ conj(x)``
    fixing the monomial classes.  ``a2_selfadjoint`` is True iff the
    domain of ``A2`` is the whole space and its action is Hermitian.
    """

    dim: int
    a1_domain: np.ndarray
    a1_action: np.ndarray
    a2_domain: np.ndarray
    a2_action: np.ndarray
    h00: np.ndarray
    j_matrix: np.ndarray
    a2_selfadjoint: bool

    def domain(self, which: int) -> np.ndarray:
        self._check_which(which)
        return self.a1_domain if which == 1 else self.a2_domain

    def action(self, which: int) -> np.ndarray:
        self._check_which(which)
        return self.a1_action if which == 1 else self.a2_action

    def defect_index(self, which: int) -> int:
        """Codimension of the operator's domain."""
        return self.dim - self.domain(which).shape[1]

    def full_matrix(self, which: int) -> np.ndarray:
        """Matrix of the operator when its domain is the whole space."""
        dom = self.domain(which)
        if dom.shape[1] != self.dim:
            raise DomainCollapseError(
                f"operator A{which} is not everywhere defined")
        return self.action(which) @ dom.conj().T

    @staticmethod
    def _check_which(which: int):
        if which not in (1, 2):
            raise ValueError("which must be 1 or 2")


def build_gns(table: MomentTable, d_m: int, d_n: int,
              rank_tol: float = RANK_TOL) -> GnsSpace:
    """Quotient-space coordinates from the localized moment matrix.

    The Gram matrix is eigendecomposed; eigenvalues at or below
    ``rank_tol`` times the largest are treated as kernel, an eigenvalue
    below the negated threshold raises ``NotPsdError``.  Coordinates are
    ``sqrt(lambda) * E^T`` over the retained eigenpairs, so column inner
    products reproduce the Gram entries exactly in exact arithmetic.
    """
    gram = moment_matrix(table, d_m, d_n)
    idx = monomial_indices(d_m, d_n)
    eigvals, eigvecs = np.linalg.eigh(gram)
    scale = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    thresh = rank_tol * scale
    if eigvals.size and float(eigvals[0]) < -thresh:
        raise NotPsdError(
            f"Gram matrix at rectangle ({d_m}, {d_n}) has eigenvalue "
            f"{eigvals[0]:.3e} below -{thresh:.3e}")
    keep = eigvals > thresh
    lam = eigvals[keep]
    vecs = eigvecs[:, keep]
    # Largest eigenvalue first keeps the coordinate rows in a stable,
    # reproducible order.
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vecs = vecs[:, order]
    coords = np.sqrt(lam)[:, None] * vecs.T
    return GnsSpace(d_m=d_m, d_n=d_n, monomial_index=tuple(idx), gram=gram,
                    rank=int(lam.size), coords=coords, rank_tol=rank_tol)


def _shift_operator(space: GnsSpace, which: int, residual_gate: float,
                    subspace_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Domain basis and action matrix of one shift operator."""
    d_m, d_n = space.d_m, space.d_n
    if which == 1:
        kept = [(m, n) for (m, n) in space.monomial_index if m <= d_m - 1]
        shifted = [(m + 1, n) for (m, n) in kept]
    else:
        kept = [(m, n) for (m, n) in space.monomial_index if n <= d_n - 1]
        shifted = [(m, n + 1) for (m, n) in kept]
    cols = [space.index_of(m, n) for (m, n) in kept]
    cols_shifted = [space.index_of(m, n) for (m, n) in shifted]
    dom_vectors = space.coords[:, cols]
    img_vectors = space.coords[:, cols_shifted]
    basis = orth_columns(dom_vectors, subspace_tol)
    if basis.shape[1] == 0:
        raise DomainCollapseError(f"domain of A{which} is zero-dimensional")
    # Solve action @ (basis^H dom) = img in least squares.  The residual
    # measures whether the shift is well defined on the quotient: any
    # kernel combination of domain classes must be annihilated by the
    # shifted columns as well.
    r = basis.conj().T @ dom_vectors
    try:
        action_t, _, _, _ = np.linalg.lstsq(r.T, img_vectors.T, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise SingularShiftError(f"shift solve failed for A{which}: {exc}")
    action = action_t.T
    residual = float(np.linalg.norm(action @ r - img_vectors))
    gate = residual_gate * max(1.0, float(np.linalg.norm(space.gram)))
    if residual > gate:
        raise InconsistentShiftError(
            f"shift A{which} leaves the quotient span: residual "
            f"{residual:.3e} > gate {gate:.3e}")
    return basis, action


def build_operators(space: GnsSpace,
                    residual_gate: float = RESIDUAL_GATE,
                    subspace_tol: float = SUBSPACE_TOL,
                    structure_tol: float = STRUCTURE_TOL) -> SymmetricPair:
    """Symmetric shift pair on the GNS quotient.

    Requires ``d_m >= 1`` and ``d_n >= 1`` so that both shifts have a
    nontrivial domain rectangle.  Raises ``InconsistentShiftError`` when
    a shifted Gram column leaves the retained span (inconsistent
    truncation) and ``DomainCollapseError`` when a domain comes out
    zero-dimensional.
    """
    if space.d_m < 1 or space.d_n < 1:
        raise ValueError("build_operators needs d_m >= 1 and d_n >= 1")
    a1_domain, a1_action = _shift_operator(space, 1, residual_gate,
                                           subspace_tol)
    a2_domain, a2_action = _shift_operator(space, 2, residual_gate,
                                           subspace_tol)
    dim = space.rank
    h00 = space.class_vector(0, 0)
    # Real Gram, real eigendecomposition: the conjugation fixing all
    # classes is entrywise conjugation.
    j_matrix = np.eye(dim, dtype=complex)
    a2_full = a2_domain.shape[1] == dim
    a2_selfadjoint = bool(
        a2_full and is_hermitian(a2_action @ a2_domain.conj().T,
                                 structure_tol))
    return SymmetricPair(dim=dim,
                         a1_domain=a1_domain.astype(complex),
                         a1_action=a1_action.astype(complex),
                         a2_domain=a2_domain.astype(complex),
                         a2_action=a2_action.astype(complex),
                         h00=h00.astype(complex),
                         j_matrix=j_matrix,
                         a2_selfadjoint=a2_selfadjoint)


def _class_vector_via_pair(pair: SymmetricPair, m: int, k: int,
                           tol: float) -> np.ndarray | None:
    """``A1^m A2^k h00`` through the stored actions, or None when the
    chain leaves a domain."""
    x = pair.h00.copy()
    for _ in range(k):
        dom = pair.a2_domain
        c = dom.conj().T @ x
        if np.linalg.norm(x - dom @ c) > tol * max(1.0, np.linalg.norm(x)):
            return None
        x = pair.a2_action @ c
    for _ in range(m):
        dom = pair.a1_domain
        c = dom.conj().T @ x
        if np.linalg.norm(x - dom @ c) > tol * max(1.0, np.linalg.norm(x)):
            return None
        x = pair.a1_action @ c
    return x


def quasianalytic_vector_check(pair: SymmetricPair, table: MomentTable,
                               m: int, big_k: int,
                               variant: str = "pair",
                               cross_check_tol: float = 1e-8,
                               domain_tol: float = SUBSPACE_TOL) -> CarlemanReport:
    """Carleman-type diagnostic re-expressed through operator norms.

    The diagnostic terms are ``||h_{m+1,k} - i h_{m,k}||^(-1/k)`` style
    quantities, and the norm identity

        ||h_{m+1,k} - i h_{m,k}||^2 = s_{2m,2k} + s_{2m+2,2k}

    ties them to the table.  This function evaluates the table-side
    diagnostic and, for every ``k`` reachable through the stored
    operator actions, cross-checks the identity against the coordinates
    built from the pair; a failure raises ``InconsistentShiftError``
    since it signals a quotient inconsistency.
    """
    report = carleman_diagnostic(table, m, big_k, variant=variant)
    for k in range(0, big_k + 1):
        if 2 * k > table.max_n or 2 * m + 2 > table.max_m:
            break
        va = _class_vector_via_pair(pair, m + 1, k, domain_tol)
        vb = _class_vector_via_pair(pair, m, k, domain_tol)
        if va is None or vb is None:
            continue
        lhs = float(np.linalg.norm(va - 1j * vb) ** 2)
        rhs = table.values[2 * m, 2 * k] + table.values[2 * m + 2, 2 * k]
        scale = max(1.0, abs(rhs))
        if abs(lhs - rhs) > cross_check_tol * scale:
            raise InconsistentShiftError(
                f"norm identity failed at (m={m}, k={k}): "
                f"|{lhs:.12e} - {rhs:.12e}| > {cross_check_tol} * {scale:.3e}")
    return report
