"""Cayley transforms, defect subspaces and extension parameters.

For a symmetric operator ``A`` on a finite-dimensional complex space the
Cayley transform ``V = (A + i)(A - i)^{-1}`` is an isometry from
``D(V) = (A - i) D(A)`` onto ``R(V) = (A + i) D(A)``; the defect
subspaces are ``N0(V) = H (-) D(V)`` and ``Ninf(V) = H (-) R(V)``.
Unitary extensions of ``V`` correspond to isometries ``N0 -> Ninf``, and
contraction-valued parameters ``Phi`` produce generalized resolvents via
the extensions ``V (+) Phi`` assembled by :func:`extend_isometry`.

Admissibility of constant parameters
------------------------------------
Not every parameter value is allowed: the *forbidden operator* ``X``
sends ``psi = phi + d`` to ``phi`` for ``psi`` ranging over
``N0 & (Ninf (+) D(A))`` with ``phi`` in ``Ninf`` and ``d`` in ``D(A)``,
and a parameter family ``z -> F(z)`` is admissible when the radial
boundary behaviour of ``F`` reproduces the action of ``X`` only
trivially: no nonzero ``psi`` in the domain of ``X`` may satisfy both
``lim F psi = X psi`` and ``lim ||F psi|| = ||psi||``.  For a *constant*
parameter the limits are the values themselves, so the criterion
collapses to a finite computation:

    F admissible  <=>  { psi in dom X : F psi = X psi and
                         ||F psi|| = ||psi|| } = {0}.

:func:`admissibility_check` implements exactly this as a
kernel-plus-isometric-subspace computation: first the null space of
``F - X`` on ``dom X``, then the subspace of that null space on which
the contraction ``F`` preserves norms (singular value 1).  When the
domain of the operator is the whole space both defect subspaces vanish
and every contraction is trivially admissible; genuinely point-dependent
parameter families outside that shortcut are not supported here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .config import (CONTRACTION_SLACK, FIXED_POINT_TOL, STRUCTURE_TOL,
                     SUBSPACE_TOL)
from .errors import (ContractionViolatedError, EmbeddingLostError,
                     FixedPointError, NoDecompositionError,
                     NotDirectSumError, NotSelfAdjointA2Error,
                     NotSupportedError, StructureViolationError)
from .gns import SymmetricPair
from .linalg import (as_complex_matrix, complement_basis, empty_basis,
                     intersect_subspaces, is_conjugation, is_hermitian,
                     is_unitary, orth_columns, require_unitary,
                     subspace_residual)

__all__ = [
    "CayleyIsometry",
    "IsometricPair",
    "ContractionParameter",
    "ConjugationFactorization",
    "cayley",
    "inverse_cayley",
    "build_isometric_pair",
    "extend_isometry",
    "godich_lutsenko",
    "fixed_subspace",
    "strip_fixed_elements",
    "forbidden_operator",
    "forbidden_operator_from_subspaces",
    "constant_admissibility",
    "admissibility_check",
    "commutation_check",
    "minimal_subspace",
]


@dataclass(frozen=True)
class CayleyIsometry:
    """Isometry data ``(domain, action, range)``.

    ``domain`` is an orthonormal basis of ``D(V)``; ``action`` sends
    ``D(V)``-coordinates to space coordinates, ``V (domain @ c) =
    action @ c``; ``range`` is an orthonormal basis of ``R(V)``.
    """

    domain: np.ndarray
    action: np.ndarray
    range: np.ndarray


@dataclass(frozen=True)
class IsometricPair:
    """Cayley transform of ``A1`` together with the unitary Cayley
    transform ``U`` of the self-adjoint ``A2``.

    The subspaces ``H1 = D(V)``, ``H2 = N0(V)``, ``H3 = R(V)``,
    ``H4 = Ninf(V)`` are all stored as orthonormal column bases; ``U``
    leaves each of them invariant.
    """

    dim: int
    v_domain: np.ndarray
    v_action: np.ndarray
    v_range: np.ndarray
    n0_basis: np.ndarray
    ninf_basis: np.ndarray
    u_matrix: np.ndarray

    @property
    def defect_dim(self) -> int:
        return self.n0_basis.shape[1]

    def v_on_space(self) -> np.ndarray:
        """Matrix acting as ``V`` on ``D(V)`` and as 0 on ``N0``."""
        return self.v_action @ self.v_domain.conj().T

    def operator_domain(self, subspace_tol: float = SUBSPACE_TOL) -> np.ndarray:
        """Orthonormal basis of ``D(A) = (E - V) D(V)``.

        ``V`` has no fixed vectors when it comes from a symmetric ``A``,
        so the map is injective and the basis has ``dim D(V)`` columns.
        """
        return orth_columns(self.v_domain - self.v_action, subspace_tol)


@dataclass(frozen=True)
class ContractionParameter:
    """Contraction-valued extension parameter on the unit disk.

    Either a constant matrix ``N0 -> Ninf`` (in the stored defect bases)
    or a callable ``z -> matrix``.  Evaluation enforces the contraction
    bound: largest singular value at most ``1 + slack``.
    """

    constant: bool
    matrix: np.ndarray | None = None
    evaluator: Callable[[complex], np.ndarray] | None = None
    slack: float = CONTRACTION_SLACK

    @staticmethod
    def const(matrix) -> "ContractionParameter":
        return ContractionParameter(constant=True,
                                    matrix=as_complex_matrix(matrix))

    @staticmethod
    def pointwise(evaluator: Callable[[complex], np.ndarray]) -> "ContractionParameter":
        return ContractionParameter(constant=False, evaluator=evaluator)

    def at(self, z: complex) -> np.ndarray:
        if self.constant:
            value = self.matrix
        else:
            value = as_complex_matrix(self.evaluator(complex(z)))
        if value.size:
            top = float(np.linalg.svd(value, compute_uv=False)[0])
            if top > 1.0 + self.slack:
                raise ContractionViolatedError(
                    f"parameter has singular value {top} > 1 + {self.slack}")
        return value


@dataclass(frozen=True)
class ConjugationFactorization:
    """Two conjugations with ``K o L = W`` (antilinear matrices)."""

    k_matrix: np.ndarray
    l_matrix: np.ndarray


def cayley(pair: SymmetricPair, which: int,
           subspace_tol: float = SUBSPACE_TOL,
           structure_tol: float = STRUCTURE_TOL) -> CayleyIsometry:
    """Cayley transform ``(A + i)(A - i)^{-1}`` of one operator.

    Works with the stored domain basis ``Q`` and action ``T``:
    ``(A - i)(Q c) = (T - iQ) c`` and the transform maps it to
    ``(T + iQ) c``.  Since ``A`` is symmetric, ``||(A - i)x||^2 =
    ||A x||^2 + ||x||^2``, so ``T - iQ`` has full column rank and the
    returned action has orthonormal columns.
    """
    q = pair.domain(which)
    t = pair.action(which)
    n = pair.dim
    if q.shape[1] == 0:
        return CayleyIsometry(domain=empty_basis(n), action=empty_basis(n),
                              range=empty_basis(n))
    if not is_hermitian(q.conj().T @ t, structure_tol):
        raise StructureViolationError(
            f"operator A{which} is not symmetric on its domain")
    minus = t - 1j * q
    plus = t + 1j * q
    dom, r = np.linalg.qr(minus)
    action = scipy.linalg.solve_triangular(r.T, plus.T, lower=True).T
    rng = orth_columns(action, subspace_tol)
    if rng.shape[1] != dom.shape[1]:
        raise StructureViolationError(
            f"Cayley range of A{which} lost dimension "
            f"({rng.shape[1]} != {dom.shape[1]})")
    return CayleyIsometry(domain=dom, action=action, range=rng)


def inverse_cayley(u: np.ndarray, fixed_tol: float = FIXED_POINT_TOL,
                   structure_tol: float = STRUCTURE_TOL) -> np.ndarray:
    """Hermitian matrix ``A = i (U + E)(U - E)^{-1}`` of a unitary ``U``.

    Raises ``FixedPointError`` when ``U`` has an eigenvalue within
    ``fixed_tol`` of 1 (the inverse transform does not exist there).
    """
    u = require_unitary(u, structure_tol, "inverse Cayley input")
    n = u.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    shifted = u - np.eye(n)
    sigma_min = float(np.linalg.svd(shifted, compute_uv=False)[-1])
    if sigma_min <= fixed_tol:
        raise FixedPointError(
            f"unitary has an eigenvalue within {fixed_tol} of 1 "
            f"(sigma_min = {sigma_min:.3e})")
    a = 1j * np.linalg.solve(shifted.T, (u + np.eye(n)).T).T
    return 0.5 * (a + a.conj().T)


def build_isometric_pair(pair: SymmetricPair,
                         subspace_tol: float = SUBSPACE_TOL,
                         structure_tol: float = STRUCTURE_TOL,
                         fixed_tol: float = FIXED_POINT_TOL) -> IsometricPair:
    """Assemble the Cayley isometry of ``A1`` with the unitary ``U`` of
    ``A2`` and verify the structural invariants.

    Checks: ``U`` unitary with no eigenvalue 1, ``U D(V) = D(V)``, ``U``
    leaving ``R(V)`` invariant (hence both defect subspaces), and the
    commutation of ``U`` with ``V`` on ``D(V)``.  Violations raise
    ``StructureViolationError``; a non-self-adjoint ``A2`` raises
    ``NotSelfAdjointA2Error`` with the defect indices attached.
    """
    if not pair.a2_selfadjoint:
        raise NotSelfAdjointA2Error(
            "A2 is not self-adjoint; extension machinery unavailable",
            defect_a1=pair.defect_index(1), defect_a2=pair.defect_index(2))
    iso = cayley(pair, 1, subspace_tol, structure_tol)
    a2 = pair.full_matrix(2)
    n = pair.dim
    eye = np.eye(n)
    u = (a2 + 1j * eye) @ np.linalg.inv(a2 - 1j * eye)
    if not is_unitary(u, structure_tol):
        raise StructureViolationError("Cayley transform of A2 not unitary")
    sigma_min = float(np.linalg.svd(u - eye, compute_uv=False)[-1])
    if sigma_min <= fixed_tol:
        raise StructureViolationError(
            "Cayley transform of A2 has an eigenvalue at 1; A2 is outside "
            "the numerically supported range")
    n0 = complement_basis(iso.domain, subspace_tol)
    ninf = complement_basis(iso.range, subspace_tol)
    if n0.shape[1] != ninf.shape[1]:
        raise StructureViolationError(
            f"defect dimensions differ: {n0.shape[1]} != {ninf.shape[1]}")
    for name, basis in (("D(V)", iso.domain), ("R(V)", iso.range)):
        if basis.shape[1]:
            res = subspace_residual(basis, u @ basis)
            if res > structure_tol:
                raise StructureViolationError(
                    f"U does not leave {name} invariant (residual {res:.3e})")
    if iso.domain.shape[1]:
        v_part = iso.action @ iso.domain.conj().T
        comm = (v_part @ u - u @ v_part) @ iso.domain
        scale = max(1.0, float(np.linalg.norm(u)) * float(np.linalg.norm(v_part)))
        if float(np.linalg.norm(comm)) > structure_tol * scale:
            raise StructureViolationError(
                "U and V do not commute on D(V)")
    return IsometricPair(dim=n, v_domain=iso.domain, v_action=iso.action,
                         v_range=iso.range, n0_basis=n0, ninf_basis=ninf,
                         u_matrix=u)


def extend_isometry(iso: IsometricPair, phi: ContractionParameter,
                    z: complex = 0.0) -> np.ndarray:
    """Full matrix of ``V (+) Phi_z``: acts as ``V`` on ``D(V)`` and as
    ``Phi_z : N0 -> Ninf`` on the defect subspace.

    Unitary precisely when ``Phi_z`` is unitary (square with all
    singular values 1).
    """
    value = phi.at(z)
    n0_dim = iso.n0_basis.shape[1]
    ninf_dim = iso.ninf_basis.shape[1]
    if value.shape != (ninf_dim, n0_dim):
        raise ValueError(
            f"parameter shape {value.shape} does not match defect "
            f"dimensions ({ninf_dim}, {n0_dim})")
    full = iso.v_action @ iso.v_domain.conj().T
    if n0_dim:
        full = full + iso.ninf_basis @ value @ iso.n0_basis.conj().T
    return full


def godich_lutsenko(w: np.ndarray,
                    structure_tol: float = STRUCTURE_TOL) -> ConjugationFactorization:
    """Factor a unitary ``W`` as a product of two conjugations.

    ``L`` is the conjugation whose fixed vectors include an orthonormal
    eigenbasis of ``W`` (entrywise conjugation in that basis) and
    ``K = W o L``.  Both are returned as antilinear matrices ``M`` acting
    as ``x -> M conj(x)``; they satisfy ``K^2 = L^2 = identity`` and
    ``K o L = W``.
    """
    w = require_unitary(w, structure_tol, "factorization input")
    n = w.shape[0]
    if n == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return ConjugationFactorization(k_matrix=empty, l_matrix=empty)
    # Schur of a normal matrix: unitary Z with diagonal T, robust under
    # eigenvalue clustering.
    t, z_mat = scipy.linalg.schur(w, output="complex")
    off = t - np.diag(np.diagonal(t))
    if float(np.linalg.norm(off)) > structure_tol * n:
        raise StructureViolationError("input is not normal within tolerance")
    l_matrix = z_mat @ z_mat.T
    k_matrix = w @ l_matrix
    for name, mat in (("K", k_matrix), ("L", l_matrix)):
        if not is_conjugation(mat, structure_tol):
            raise NoDecompositionError(
                f"factor {name} is not a conjugation within tolerance")
    return ConjugationFactorization(k_matrix=k_matrix, l_matrix=l_matrix)


def fixed_subspace(w: np.ndarray, tol: float = FIXED_POINT_TOL) -> np.ndarray:
    """Orthonormal basis of the eigenvalue-1 subspace of a unitary.

    For unitary ``W`` the singular values of ``W - E`` equal the
    distances ``|lambda - 1|``, so the fixed subspace is the numerical
    null space of ``W - E`` at absolute tolerance ``tol``.
    """
    w = as_complex_matrix(w)
    n = w.shape[0]
    if n == 0:
        return empty_basis(0)
    _, s, vh = np.linalg.svd(w - np.eye(n))
    rank = int(np.sum(s > tol))
    return vh.conj().T[:, rank:]


def strip_fixed_elements(w1: np.ndarray, w2: np.ndarray,
                         h_embed: np.ndarray,
                         fixed_tol: float = FIXED_POINT_TOL,
                         structure_tol: float = STRUCTURE_TOL) -> tuple:
    """Remove the fixed subspaces of two commuting unitaries in turn.

    First strips ``F1 = fix(W1)``, then the fixed subspace of the
    restricted ``W2``.  Returns ``(w1_res, w2_res, basis)`` where
    ``basis`` holds original-space coordinates of the reduced space and
    the restricted matrices act on ``basis``-coordinates.  Raises
    ``EmbeddingLostError`` when ``span(h_embed)`` does not survive.
    """
    w1 = require_unitary(w1, structure_tol, "W1")
    w2 = require_unitary(w2, structure_tol, "W2")
    comm = float(np.linalg.norm(w1 @ w2 - w2 @ w1))
    if comm > structure_tol * max(1.0, float(np.linalg.norm(w1) * np.linalg.norm(w2))):
        raise StructureViolationError("W1 and W2 do not commute")
    basis = np.eye(w1.shape[0], dtype=complex)
    for step in (1, 2):
        w_active = w1 if step == 1 else w2
        fixed = fixed_subspace(w_active, fixed_tol)
        if fixed.shape[1]:
            other = w2 if step == 1 else w1
            if subspace_residual(fixed, other @ fixed) > structure_tol:
                raise StructureViolationError(
                    "fixed subspace is not invariant under the other unitary")
            keep = complement_basis(fixed, structure_tol)
            w1 = keep.conj().T @ w1 @ keep
            w2 = keep.conj().T @ w2 @ keep
            basis = basis @ keep
            for name, w_check in (("W1", w1), ("W2", w2)):
                if not is_unitary(w_check, structure_tol * 10):
                    raise StructureViolationError(
                        f"restricted {name} lost unitarity; subspace did "
                        f"not reduce the pair")
    h_embed = as_complex_matrix(h_embed)
    if h_embed.shape[1]:
        res = subspace_residual(basis, h_embed)
        if res > structure_tol:
            raise EmbeddingLostError(
                f"embedded subspace leaves the reduced space "
                f"(residual {res:.3e})")
    return w1, w2, basis


def forbidden_operator_from_subspaces(n_plus: np.ndarray,
                                      n_minus: np.ndarray,
                                      domain_basis: np.ndarray,
                                      subspace_tol: float = SUBSPACE_TOL,
                                      residual_gate: float = STRUCTURE_TOL) -> tuple:
    """Forbidden operator from defect subspaces and the operator domain.

    ``n_plus`` spans ``N_i``, ``n_minus`` spans ``N_{-i}`` and
    ``domain_basis`` spans ``D(A)``, all as orthonormal columns.  Same
    returns and errors as :func:`forbidden_operator`.
    """
    n = n_plus.shape[0]
    q = domain_basis
    if intersect_subspaces(n_minus, q, subspace_tol).shape[1]:
        raise NotDirectSumError("N_-i and D(A) overlap; sum is not direct")
    ambient = orth_columns(np.hstack([n_minus, q]), subspace_tol)
    psi_basis = intersect_subspaces(n_plus, ambient, subspace_tol)
    p = psi_basis.shape[1]
    if p == 0:
        return psi_basis, empty_basis(n)[:, :0]
    stacked = np.hstack([n_minus, q])
    coeffs, _, _, _ = np.linalg.lstsq(stacked, psi_basis, rcond=None)
    residual = float(np.linalg.norm(stacked @ coeffs - psi_basis))
    if residual > residual_gate * max(1.0, float(np.linalg.norm(psi_basis))):
        raise NoDecompositionError(
            f"decomposition residual {residual:.3e} exceeds gate")
    x_matrix = n_minus @ coeffs[: n_minus.shape[1], :]
    return psi_basis, x_matrix


def forbidden_operator(pair: SymmetricPair, which: int = 1,
                       subspace_tol: float = SUBSPACE_TOL,
                       residual_gate: float = STRUCTURE_TOL) -> tuple:
    """Domain basis and matrix of the forbidden operator ``X``.

    ``dom X = N_i & (N_{-i} (+) D(A))`` where ``N_{+-i}`` are the defect
    subspaces of the chosen operator; ``X psi = phi`` for the unique
    decomposition ``psi = phi + d``.  Returns ``(psi_basis, x_matrix)``
    with ``x_matrix`` holding the image of each ``psi_basis`` column in
    space coordinates.  Raises ``NotDirectSumError`` when the sum is not
    direct and ``NoDecompositionError`` when a decomposition residual
    exceeds the gate.
    """
    iso = cayley(pair, which, subspace_tol)
    n_plus = complement_basis(iso.domain, subspace_tol)    # N_i
    n_minus = complement_basis(iso.range, subspace_tol)    # N_-i
    return forbidden_operator_from_subspaces(
        n_plus, n_minus, pair.domain(which), subspace_tol, residual_gate)


def constant_admissibility(value: np.ndarray, n_plus: np.ndarray,
                           n_minus: np.ndarray, domain_basis: np.ndarray,
                           subspace_tol: float = SUBSPACE_TOL,
                           norm_tol: float = 1e-8) -> bool:
    """Derived admissibility criterion for a constant parameter value.

    ``value`` maps ``N_i`` coordinates (``n_plus`` columns) to ``N_{-i}``
    coordinates (``n_minus`` columns).  Returns False iff some nonzero
    ``psi`` in the forbidden-operator domain satisfies ``F psi = X psi``
    with ``||F psi|| = ||psi||``.
    """
    if n_plus.shape[1] == 0:
        return True
    psi_basis, x_matrix = forbidden_operator_from_subspaces(
        n_plus, n_minus, domain_basis, subspace_tol)
    if psi_basis.shape[1] == 0:
        return True
    # F acting on dom X in space coordinates.
    f_matrix = n_minus @ value @ (n_plus.conj().T @ psi_basis)
    diff = f_matrix - x_matrix
    _, s, vh = np.linalg.svd(diff, full_matrices=True)
    top = float(s[0]) if s.size else 0.0
    null_dim = diff.shape[1] - int(np.sum(s > subspace_tol * max(top, 1.0)))
    if null_dim == 0:
        return True
    kernel = vh.conj().T[:, diff.shape[1] - null_dim:]
    # Norm-preserving directions of F within the kernel: eigenvalue-1
    # subspace of (F B)^H (F B).
    fb = f_matrix @ kernel
    gram = fb.conj().T @ fb
    top_eig = float(np.max(np.linalg.eigvalsh(gram))) if gram.size else 0.0
    return top_eig < (1.0 - norm_tol)


def admissibility_check(pair: SymmetricPair, phi: ContractionParameter,
                        which: int = 1,
                        subspace_tol: float = SUBSPACE_TOL,
                        norm_tol: float = 1e-8) -> bool:
    """Admissibility of an extension parameter for the chosen operator.

    Constant parameters use the criterion derived in the module
    docstring: inadmissible iff some nonzero ``psi`` in the
    forbidden-operator domain has ``F psi = X psi`` with ``||F psi|| =
    ||psi||``.  Non-constant parameters are accepted only through the
    dense-domain shortcut (zero defect); otherwise ``NotSupportedError``.
    """
    defect = pair.defect_index(which)
    if not phi.constant:
        if defect == 0:
            return True
        raise NotSupportedError(
            "pointwise parameter families are only supported when the "
            "operator domain is the whole space")
    if defect == 0:
        value = phi.at(0.0)
        if value.shape != (0, 0):
            raise ValueError("parameter must be 0x0 for zero defect")
        return True
    iso = cayley(pair, which, subspace_tol)
    n_plus = complement_basis(iso.domain, subspace_tol)
    n_minus = complement_basis(iso.range, subspace_tol)
    value = phi.at(0.0)
    if value.shape != (n_minus.shape[1], n_plus.shape[1]):
        raise ValueError(
            f"parameter shape {value.shape} does not match defect "
            f"dimensions ({n_minus.shape[1]}, {n_plus.shape[1]})")
    return constant_admissibility(value, n_plus, n_minus, pair.domain(which),
                                  subspace_tol, norm_tol)


def commutation_check(iso: IsometricPair, phi: ContractionParameter,
                      z: complex = 0.0,
                      tol: float = STRUCTURE_TOL) -> bool:
    """Whether ``(V (+) Phi_z) U = U (V (+) Phi_z)`` within tolerance.

    Checked on full matrices; when ``U D(V) = D(V)`` holds (enforced at
    pair construction) this is equivalent to the commutation of the
    parameter with ``U`` on the defect subspace alone.
    """
    m = extend_isometry(iso, phi, z)
    u = iso.u_matrix
    comm = float(np.linalg.norm(m @ u - u @ m))
    scale = max(1.0, float(np.linalg.norm(m)) * float(np.linalg.norm(u)))
    return comm <= tol * scale


def minimal_subspace(u: np.ndarray, h_embed: np.ndarray,
                     subspace_tol: float = SUBSPACE_TOL) -> np.ndarray:
    """Smallest ``U``-reducing subspace containing ``span(h_embed)``.

    Closes the span under ``U`` and ``U^H`` (Krylov iteration); in
    finite dimension the loop stabilizes after at most ``dim`` rounds.
    """
    u = as_complex_matrix(u)
    basis = orth_columns(as_complex_matrix(h_embed), subspace_tol)
    for _ in range(u.shape[0] + 1):
        grown = orth_columns(
            np.hstack([basis, u @ basis, u.conj().T @ basis]), subspace_tol)
        if grown.shape[1] == basis.shape[1]:
            return basis
        basis = grown
    return basis
