"""Shared linear-algebra helpers.

Subspaces are represented by matrices whose columns form an orthonormal
basis; an empty subspace is an ``(n, 0)`` array.  Antilinear maps on
``C^n`` are represented by a matrix ``M`` acting as ``x -> M @ conj(x)``;
a conjugation is an antilinear involutive isometry, i.e. a unitary ``M``
with ``M @ conj(M) = I`` (equivalently ``M`` unitary symmetric).
"""

from __future__ import annotations

import numpy as np

from .config import SUBSPACE_TOL
from .errors import NotUnitaryError

__all__ = [
    "as_complex_matrix",
    "orth_columns",
    "complement_basis",
    "intersect_subspaces",
    "subspace_contains",
    "subspace_residual",
    "is_hermitian",
    "is_unitary",
    "require_unitary",
    "haar_unitary",
    "apply_antilinear",
    "compose_antilinear_antilinear",
    "compose_linear_antilinear",
    "compose_antilinear_linear",
    "is_conjugation",
    "empty_basis",
]


def as_complex_matrix(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def empty_basis(n: int) -> np.ndarray:
    return np.zeros((n, 0), dtype=complex)


def orth_columns(a: np.ndarray, tol: float = SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of the column space of ``a``.

    Uses an SVD; singular values below ``tol`` times the largest are
    treated as zero.  Returns an ``(n, r)`` matrix with orthonormal
    columns (``r`` may be 0).
    """
    a = as_complex_matrix(a)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if a.shape[1] == 0 or not np.any(a):
        return empty_basis(a.shape[0])
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return empty_basis(a.shape[0])
    rank = int(np.sum(s > tol * s[0]))
    return u[:, :rank]


def complement_basis(basis: np.ndarray, tol: float = SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)``."""
    basis = as_complex_matrix(basis)
    n = basis.shape[0]
    if basis.shape[1] == 0:
        return np.eye(n, dtype=complex)
    u, s, _ = np.linalg.svd(basis, full_matrices=True)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    return u[:, rank:]


def intersect_subspaces(b1: np.ndarray, b2: np.ndarray,
                        tol: float = SUBSPACE_TOL) -> np.ndarray:
    """Orthonormal basis of ``span(b1) & span(b2)``.

    A vector in the intersection is ``b1 @ a = b2 @ c``; the pairs
    ``(a, c)`` form the null space of ``[b1, -b2]``.
    """
    b1 = as_complex_matrix(b1)
    b2 = as_complex_matrix(b2)
    if b1.shape[1] == 0 or b2.shape[1] == 0:
        return empty_basis(b1.shape[0])
    stacked = np.hstack([b1, -b2])
    _, s, vh = np.linalg.svd(stacked, full_matrices=True)
    null_dim = stacked.shape[1] - int(np.sum(s > tol * max(s[0], 1.0)))
    if null_dim == 0:
        return empty_basis(b1.shape[0])
    null_vecs = vh.conj().T[:, stacked.shape[1] - null_dim:]
    vectors = b1 @ null_vecs[: b1.shape[1], :]
    return orth_columns(vectors, tol)


def subspace_residual(basis: np.ndarray, x: np.ndarray) -> float:
    """Norm of the component of ``x`` outside ``span(basis)``, relative
    to ``max(1, ||x||)`` (columnwise worst case for matrices)."""
    basis = as_complex_matrix(basis)
    x = as_complex_matrix(x)
    if x.ndim == 1:
        x = x[:, None]
    proj = basis @ (basis.conj().T @ x) if basis.shape[1] else np.zeros_like(x)
    out = x - proj
    denom = max(1.0, float(np.linalg.norm(x)))
    return float(np.linalg.norm(out)) / denom


def subspace_contains(basis: np.ndarray, x: np.ndarray,
                      tol: float = SUBSPACE_TOL) -> bool:
    return subspace_residual(basis, x) <= tol


def is_hermitian(a: np.ndarray, tol: float) -> bool:
    a = as_complex_matrix(a)
    scale = 1.0 + float(np.linalg.norm(a))
    return float(np.linalg.norm(a - a.conj().T)) <= tol * scale


def is_unitary(u: np.ndarray, tol: float) -> bool:
    u = as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    n = u.shape[0]
    if n == 0:
        return True
    eye = np.eye(n)
    return (float(np.linalg.norm(u.conj().T @ u - eye)) <= tol * n
            and float(np.linalg.norm(u @ u.conj().T - eye)) <= tol * n)


def require_unitary(u: np.ndarray, tol: float, what: str = "matrix") -> np.ndarray:
    u = as_complex_matrix(u)
    if not is_unitary(u, tol):
        raise NotUnitaryError(f"{what} is not unitary within tolerance {tol}")
    return u


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def apply_antilinear(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply the antilinear map represented by ``m`` to ``x``."""
    return as_complex_matrix(m) @ np.conj(x)


def compose_antilinear_antilinear(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Matrix of the *linear* map ``x -> m1 @ conj(m2 @ conj(x))``."""
    return as_complex_matrix(m1) @ np.conj(as_complex_matrix(m2))


def compose_linear_antilinear(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Antilinear matrix of ``x -> a @ (m @ conj(x))``."""
    return as_complex_matrix(a) @ as_complex_matrix(m)


def compose_antilinear_linear(m: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Antilinear matrix of ``x -> m @ conj(a @ x)``."""
    return as_complex_matrix(m) @ np.conj(as_complex_matrix(a))


def is_conjugation(m: np.ndarray, tol: float) -> bool:
    """True iff ``x -> m @ conj(x)`` is an antilinear involutive isometry."""
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    if m.shape[0] == 0:
        return True
    if not is_unitary(m, tol):
        return False
    eye = np.eye(m.shape[0])
    return float(np.linalg.norm(m @ np.conj(m) - eye)) <= tol * m.shape[0]
