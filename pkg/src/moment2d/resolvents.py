"""Generalized resolvents of single operators and commuting pairs.

Point conventions
-----------------
Two coordinate systems are used and converted with the Moebius map
``z = (lam - i)/(lam + i)`` (:func:`cayley_point`):

* ``z``-type points: the open unit disk for Chumakin resolvents, the
  complement of the unit circle for :func:`unitary_moebius`;
* ``lam``-type points: the complex plane without the real axis.  Disks
  of radius ``excluded_radius`` around ``+-i`` are excluded as well; the
  boundary values there are defined only as weak limits, and callers
  who need them must take the limits themselves.

Sign convention
---------------
:func:`pair_resolvent_symmetric` evaluates

    ``(E - 2 [E - z1 (V (+) Phi_{z1})]^{-1}) (E + z2 U)(E - z2 U)^{-1}``

with ``z_j = (lam_j - i)/(lam_j + i)``.  The overall sign is fixed so
that the one-atom measure at the origin gives the scalar value
``1/(lam1 lam2)``, which is the compressed product of resolvent factors
``(E + lam B)(B - lam)^{-1}`` of the in-space self-adjoint extensions;
the ``z``-type pair resolvent of :func:`pair_resolvent_unitary` is the
negative of the ``lam``-type one at corresponding points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cayley import (ContractionParameter, IsometricPair,
                     commutation_check, constant_admissibility,
                     extend_isometry)
from .config import EXCLUDED_RADIUS, PSD_TOL_BASE, STRUCTURE_TOL, SUBSPACE_TOL
from .errors import (AdmissibilityFailedError, CommutationViolatedError,
                     ExcludedPointError, IndexOutOfRangeError,
                     NotSupportedError, PointMismatchError,
                     SingularMatrixError)
from .linalg import as_complex_matrix
from .moments import AtomicMeasure

__all__ = [
    "ResolventSample",
    "TrigMomentTable",
    "cayley_point",
    "inverse_cayley_point",
    "chumakin_resolvent",
    "unitary_moebius",
    "pair_resolvent_unitary",
    "pair_resolvent_symmetric",
    "pair_resolvent_of_measure",
    "correspondence_check",
    "trig_moments_from_resolvent",
]

# Points this close to the real axis (relative to 1 + |lam|) count as real.
REAL_AXIS_TOL = 1e-12


def cayley_point(lam: complex) -> complex:
    """Moebius image ``z = (lam - i)/(lam + i)`` of a spectral point."""
    lam = complex(lam)
    return (lam - 1j) / (lam + 1j)


def inverse_cayley_point(z: complex) -> complex:
    """Inverse map ``lam = i (1 + z)/(1 - z)``."""
    z = complex(z)
    return 1j * (1.0 + z) / (1.0 - z)


def validate_spectral_point(lam: complex, name: str = "lambda",
                            excluded_radius: float = EXCLUDED_RADIUS) -> complex:
    """Check that ``lam`` is non-real and outside the disks around ``+-i``.

    Returns the point as a ``complex``; raises ``ExcludedPointError``
    otherwise.
    """
    lam = complex(lam)
    if not np.isfinite(lam.real) or not np.isfinite(lam.imag):
        raise ExcludedPointError(f"{name} = {lam} is not finite")
    if abs(lam.imag) <= REAL_AXIS_TOL * (1.0 + abs(lam)):
        raise ExcludedPointError(f"{name} = {lam} lies on the real axis")
    for pole, label in ((1j, "i"), (-1j, "-i")):
        if abs(lam - pole) <= excluded_radius:
            raise ExcludedPointError(
                f"{name} = {lam} lies in the excluded neighborhood of {label}")
    return lam


@dataclass(frozen=True)
class ResolventSample:
    """One evaluated resolvent point.

    ``kind`` is ``"u"`` for ``z``-type points (disk/circle-exterior
    coordinates) and ``"s"`` for ``lam``-type points; ``matrix`` is the
    value compressed to the state space and ``scalar`` optionally holds
    the ``(. h00, h00)`` entry.
    """

    kind: str
    p1: complex
    p2: complex
    matrix: np.ndarray
    scalar: complex | None = None

    def __post_init__(self):
        if self.kind not in ("u", "s"):
            raise ValueError(f"sample kind must be 'u' or 's', got {self.kind!r}")
        object.__setattr__(self, "p1", complex(self.p1))
        object.__setattr__(self, "p2", complex(self.p2))
        object.__setattr__(self, "matrix", as_complex_matrix(self.matrix))
        if self.scalar is not None:
            object.__setattr__(self, "scalar", complex(self.scalar))


def chumakin_resolvent(iso: IsometricPair, phi: ContractionParameter,
                       z: complex) -> np.ndarray:
    """Generalized resolvent ``[E - z (V (+) Phi_z)]^{-1}`` for ``|z| < 1``.

    The inverse always exists inside the disk since the extended
    operator is a contraction; ``SingularMatrixError`` is defensive.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise ExcludedPointError(f"z = {z} is not in the open unit disk")
    full = extend_isometry(iso, phi, z)
    eye = np.eye(iso.dim, dtype=complex)
    try:
        return np.linalg.solve(eye - z * full, eye)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"resolvent singular at z = {z}") from exc


def unitary_moebius(u: np.ndarray, z: complex) -> np.ndarray:
    """Matrix Moebius function ``U(z) = (E + z U)(E - z U)^{-1}``.

    Defined off the unit circle; ``|z| = 1`` can hit the spectrum of
    ``U`` and raises ``SingularMatrixError``.
    """
    u = as_complex_matrix(u)
    z = complex(z)
    n = u.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if abs(abs(z) - 1.0) <= 1e-12:
        raise SingularMatrixError(f"z = {z} lies on the unit circle")
    eye = np.eye(n, dtype=complex)
    try:
        return np.linalg.solve(eye - z * u, eye + z * u)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"E - z U singular at z = {z}") from exc


def pair_resolvent_unitary(u1: np.ndarray, u2: np.ndarray,
                           h_embed: np.ndarray, z1: complex, z2: complex,
                           tol: float = STRUCTURE_TOL) -> np.ndarray:
    """Compression of ``U1(z1) U2(z2)`` to the embedded subspace.

    ``h_embed`` is an orthonormal basis of the subspace (identity for
    the whole space); the unitaries must commute within tolerance.
    """
    u1 = as_complex_matrix(u1)
    u2 = as_complex_matrix(u2)
    h = as_complex_matrix(h_embed)
    comm = float(np.linalg.norm(u1 @ u2 - u2 @ u1))
    scale = max(1.0, float(np.linalg.norm(u1)) * float(np.linalg.norm(u2)))
    if comm > tol * scale:
        raise CommutationViolatedError(
            f"extension unitaries do not commute (residual {comm:.3e})")
    m = unitary_moebius(u1, z1) @ unitary_moebius(u2, z2)
    return h.conj().T @ m @ h


def _admissible_via_iso(iso: IsometricPair, phi: ContractionParameter,
                        subspace_tol: float, norm_tol: float) -> bool:
    if not phi.constant:
        if iso.defect_dim == 0:
            return True
        raise NotSupportedError(
            "pointwise parameter families are only supported when the "
            "operator domain is the whole space")
    if iso.defect_dim == 0:
        return True
    value = phi.at(0.0)
    expected = (iso.ninf_basis.shape[1], iso.n0_basis.shape[1])
    if value.shape != expected:
        raise ValueError(
            f"parameter shape {value.shape} does not match defect "
            f"dimensions {expected}")
    return constant_admissibility(value, iso.n0_basis, iso.ninf_basis,
                                  iso.operator_domain(subspace_tol),
                                  subspace_tol, norm_tol)


def pair_resolvent_symmetric(iso: IsometricPair, phi: ContractionParameter,
                             lambda1: complex, lambda2: complex,
                             subspace_tol: float = SUBSPACE_TOL,
                             structure_tol: float = STRUCTURE_TOL,
                             norm_tol: float = 1e-8,
                             excluded_radius: float = EXCLUDED_RADIUS) -> np.ndarray:
    """Generalized resolvent of the symmetric/self-adjoint pair.

    Evaluates the product described in the module docstring at
    ``z_j = (lambda_j - i)/(lambda_j + i)``; for ``lambda1`` in the
    lower half-plane the value is the adjoint of the resolvent at the
    conjugated points.  The parameter must pass the commutation and
    admissibility gates.
    """
    lam1 = validate_spectral_point(lambda1, "lambda1", excluded_radius)
    lam2 = validate_spectral_point(lambda2, "lambda2", excluded_radius)
    if lam1.imag < 0.0:
        m = pair_resolvent_symmetric(iso, phi, lam1.conjugate(),
                                     lam2.conjugate(), subspace_tol,
                                     structure_tol, norm_tol, excluded_radius)
        return m.conj().T
    if not _admissible_via_iso(iso, phi, subspace_tol, norm_tol):
        raise AdmissibilityFailedError(
            "parameter is forbidden for this operator (admissibility "
            "criterion failed)")
    z1 = cayley_point(lam1)
    z2 = cayley_point(lam2)
    if not commutation_check(iso, phi, z1, structure_tol):
        raise CommutationViolatedError(
            "extended isometry does not commute with the second Cayley "
            "transform")
    full = extend_isometry(iso, phi, z1)
    eye = np.eye(iso.dim, dtype=complex)
    try:
        chum = np.linalg.solve(eye - z1 * full, eye)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"resolvent singular at z1 = {z1}") from exc
    return (eye - 2.0 * chum) @ unitary_moebius(iso.u_matrix, z2)


def pair_resolvent_of_measure(measure: AtomicMeasure, lambda1: complex,
                              lambda2: complex,
                              excluded_radius: float = EXCLUDED_RADIUS) -> complex:
    """Scalar pair resolvent of an atomic measure.

    Direct sum of ``w * (1 + lam1 t1)/(t1 - lam1) * (1 + lam2 t2)/(t2 - lam2)``
    over the atoms; this is the value the operator formulas reproduce
    for the measure's joint spectral data.
    """
    lam1 = validate_spectral_point(lambda1, "lambda1", excluded_radius)
    lam2 = validate_spectral_point(lambda2, "lambda2", excluded_radius)
    t1 = measure.points[:, 0]
    t2 = measure.points[:, 1]
    factors = ((1.0 + lam1 * t1) / (t1 - lam1)) * ((1.0 + lam2 * t2) / (t2 - lam2))
    return complex(np.sum(measure.weights * factors))


def correspondence_check(sample_u: ResolventSample, sample_s: ResolventSample,
                         tol: float = STRUCTURE_TOL,
                         match_tol: float = 1e-10,
                         excluded_radius: float = EXCLUDED_RADIUS) -> bool:
    """Whether a ``z``-type and a ``lam``-type sample are negatives of
    each other at corresponding points.

    The points must satisfy ``z_j = (lam_j - i)/(lam_j + i)`` within
    ``match_tol`` and the ``lam`` points must be valid spectral points;
    violations raise ``PointMismatchError``.  Returns True iff
    ``sample_u.matrix = -sample_s.matrix`` within ``tol``.
    """
    if sample_u.kind != "u" or sample_s.kind != "s":
        raise PointMismatchError(
            f"expected kinds ('u', 's'), got ({sample_u.kind!r}, "
            f"{sample_s.kind!r})")
    try:
        lam1 = validate_spectral_point(sample_s.p1, "lambda1", excluded_radius)
        lam2 = validate_spectral_point(sample_s.p2, "lambda2", excluded_radius)
    except ExcludedPointError as exc:
        raise PointMismatchError(str(exc)) from exc
    for z, lam, name in ((sample_u.p1, lam1, "z1"), (sample_u.p2, lam2, "z2")):
        expected = cayley_point(lam)
        if abs(complex(z) - expected) > match_tol * (1.0 + abs(expected)):
            raise PointMismatchError(
                f"{name} = {z} does not match the Moebius image {expected}")
    a = sample_u.matrix
    b = sample_s.matrix
    if a.shape != b.shape:
        raise ValueError(f"sample shapes differ: {a.shape} vs {b.shape}")
    scale = max(1.0, float(np.linalg.norm(b)))
    return float(np.linalg.norm(a + b)) <= tol * scale


@dataclass(frozen=True)
class TrigMomentTable:
    """Trigonometric moments ``c_{j,k}`` on the two-torus.

    ``c_full[order_j + j, order_k + k]`` holds ``c_{j,k}`` for
    ``|j| <= order_j``, ``|k| <= order_k``; the table satisfies the
    conjugate symmetry ``c_{-j,-k} = conj(c_{j,k})`` and ``|c_{j,k}| <=
    c_{0,0}`` with ``c_{0,0}`` real positive.
    """

    order_j: int
    order_k: int
    c_full: np.ndarray

    def __post_init__(self):
        if self.order_j < 0 or self.order_k < 0:
            raise ValueError("orders must be nonnegative")
        c_full = np.asarray(self.c_full, dtype=complex)
        expected = (2 * self.order_j + 1, 2 * self.order_k + 1)
        if c_full.shape != expected:
            raise ValueError(
                f"c_full has shape {c_full.shape}, expected {expected}")
        object.__setattr__(self, "c_full", c_full)
        c00 = c_full[self.order_j, self.order_k]
        if abs(c00.imag) > 1e-10 * (1.0 + abs(c00)) or c00.real <= 0.0:
            raise ValueError(f"c_00 = {c00} must be real positive")
        slack = 1e-8 * (1.0 + c00.real)
        if float(np.max(np.abs(c_full))) > c00.real + slack:
            raise ValueError("some |c_jk| exceeds c_00")
        flipped = np.conj(c_full[::-1, ::-1])
        if float(np.max(np.abs(c_full - flipped))) > slack:
            raise ValueError("conjugate symmetry c_{-j,-k} = conj(c_{j,k}) fails")

    @property
    def mass(self) -> float:
        return float(self.c_full[self.order_j, self.order_k].real)

    @property
    def c(self) -> np.ndarray:
        """The nonnegative-index corner ``c_{j,k}``, ``0 <= j,k``."""
        return self.c_full[self.order_j:, self.order_k:].copy()

    def entry(self, j: int, k: int) -> complex:
        if abs(j) > self.order_j or abs(k) > self.order_k:
            raise IndexOutOfRangeError(
                f"(j, k) = ({j}, {k}) outside order ({self.order_j}, "
                f"{self.order_k})")
        return complex(self.c_full[self.order_j + j, self.order_k + k])

    def block_toeplitz(self) -> np.ndarray:
        """Moment matrix ``M[(j,k),(j',k')] = c_{j-j', k-k'}``.

        Rows are indexed row-major by ``(j, k)`` with ``0 <= j <=
        order_j``, ``0 <= k <= order_k``; PSD iff the table is a
        truncated moment sequence of a positive measure.
        """
        nj, nk = self.order_j + 1, self.order_k + 1
        size = nj * nk
        m = np.zeros((size, size), dtype=complex)
        for j in range(nj):
            for k in range(nk):
                for jp in range(nj):
                    for kp in range(nk):
                        m[j * nk + k, jp * nk + kp] = self.c_full[
                            self.order_j + j - jp, self.order_k + k - kp]
        return 0.5 * (m + m.conj().T)

    def psd_check(self, tol: float | None = None) -> tuple:
        """``(is_psd, min_eigenvalue)`` of the block-Toeplitz matrix."""
        m = self.block_toeplitz()
        eigs = np.linalg.eigvalsh(m)
        min_eig = float(eigs[0])
        if tol is None:
            tol = PSD_TOL_BASE * (1.0 + self.mass)
        return (min_eig >= -tol), min_eig


def trig_moments_from_resolvent(iso: IsometricPair, phi: ContractionParameter,
                                h00: np.ndarray, order_j: int,
                                order_k: int) -> TrigMomentTable:
    """Trigonometric moments carried by a generalized resolvent.

    The scalar function ``((V (+) Phi)(z1)-type products h00, h00)`` is
    rational, and its Taylor coefficients at the origin are ``w_j w_k
    c_{j,k}`` with ``w_0 = 1`` and ``w_j = 2`` otherwise; the ``c_{j,k}``
    are read off exactly as ``(T1^j U^k h00, h00)`` with ``T1 = V (+)
    Phi``.  Entries with one negative index use the adjoint power, which
    matches the minimal unitary extension because the second operator
    leaves the state space invariant.  Only constant parameters are
    supported.
    """
    if not phi.constant:
        raise NotSupportedError(
            "trigonometric moment extraction requires a constant parameter")
    if order_j < 0 or order_k < 0:
        raise ValueError("orders must be nonnegative")
    t1 = extend_isometry(iso, phi, 0.0)
    u2 = iso.u_matrix
    h = np.asarray(h00, dtype=complex).reshape(-1)
    if h.shape[0] != iso.dim:
        raise ValueError(f"h00 has length {h.shape[0]}, expected {iso.dim}")
    # Left vectors p_j with p_j^H = h00^H T1^j.
    lefts = [h]
    for _ in range(order_j):
        lefts.append(t1.conj().T @ lefts[-1])
    # Right vectors U2^k h00 for -order_k <= k <= order_k.
    rights = {0: h}
    for k in range(1, order_k + 1):
        rights[k] = u2 @ rights[k - 1]
        rights[-k] = u2.conj().T @ rights[-(k - 1)]
    c_full = np.zeros((2 * order_j + 1, 2 * order_k + 1), dtype=complex)
    for j in range(order_j + 1):
        for k in range(-order_k, order_k + 1):
            c_full[order_j + j, order_k + k] = np.vdot(lefts[j], rights[k])
    for j in range(1, order_j + 1):
        for k in range(-order_k, order_k + 1):
            c_full[order_j - j, order_k - k] = np.conj(
                c_full[order_j + j, order_k + k])
    return TrigMomentTable(order_j=order_j, order_k=order_k, c_full=c_full)
