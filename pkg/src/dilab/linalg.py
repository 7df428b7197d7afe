"""Deterministic dense complex linear algebra with explicit tolerances.

All downstream constructions reduce to a handful of primitives collected here:
Hermitian square roots, numerically ranked range/kernel bases, unitary
extension of a partial isometry, and the two norms (spectral radius, operator
norm). Everything operates on complex128 ndarrays and never mutates its
arguments.

Determinism contract: identical input bytes give identical output bytes. The
factorizations themselves (LAPACK via numpy) are deterministic per platform;
the residual gauge freedom of singular/eigen vectors is removed by a fixed
phase convention, see :func:`normalize_phase`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CodimensionMismatch,
    EigenFailure,
    NotHermitian,
    NotIsometric,
    NotPSD,
)

# Default tolerances. rank_tol is relative to the largest singular value,
# residual_tol is absolute on operator-norm residuals, purity_margin is the
# spectral-radius gap below 1 required to certify purity.
RANK_TOL = 1e-10
RESIDUAL_TOL = 1e-8
PURITY_MARGIN = 1e-9
ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    rank_tol: float = RANK_TOL
    residual_tol: float = RESIDUAL_TOL
    purity_margin: float = PURITY_MARGIN

    def __post_init__(self) -> None:
        if not (self.rank_tol > 0 and self.residual_tol > 0 and self.purity_margin > 0):
            raise ValueError("tolerances must be positive")


DEFAULT_TOL = Tolerances()


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array and reject non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {m.shape}")
    if m.size and not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    return m


def operator_norm(m) -> float:
    """Largest singular value; 0.0 for an empty matrix."""
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def spectral_radius(m) -> float:
    """max |eigenvalue| of a square matrix; 0.0 for the empty matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("spectral radius needs a square matrix")
    if m.shape[0] == 0:
        return 0.0
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return float(np.max(np.abs(ev)))


def normalize_phase(basis: np.ndarray) -> np.ndarray:
    """Fix the unit-phase freedom of each column.

    The largest-magnitude component of every column is rotated to be real and
    positive (ties broken by lowest index, which argmax already does). This is
    what makes range/kernel bases reproducible byte-for-byte.
    """
    out = np.array(basis, dtype=np.complex128, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        piv = col[i]
        if np.abs(piv) > 0:
            out[:, j] = col * (np.conj(piv) / np.abs(piv))
    return out


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^ambient_dim.

    basis has shape (ambient_dim, dim); dim may be 0, in which case basis is
    an (ambient_dim, 0) array.
    """

    ambient_dim: int
    dim: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.basis.shape != (self.ambient_dim, self.dim):
            raise ValueError(
                f"basis shape {self.basis.shape} does not match "
                f"({self.ambient_dim}, {self.dim})"
            )
        if self.orthonormality_residual() > ORTHO_TOL:
            raise ValueError("basis columns are not orthonormal within 1e-10")

    def orthonormality_residual(self) -> float:
        g = self.basis.conj().T @ self.basis
        return operator_norm(g - np.eye(self.dim))

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


def _numerical_rank(s: np.ndarray, rank_tol: float) -> int:
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > rank_tol * s[0]))


def range_basis(m, tol: Tolerances = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the numerical column space of m.

    Singular values at or below rank_tol * sigma_max are treated as zero.
    Columns come out ordered by descending singular value and phase-fixed.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if m.size == 0:
        return SubspaceBasis(n, 0, np.zeros((n, 0), dtype=np.complex128))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = _numerical_rank(s, tol.rank_tol)
    return SubspaceBasis(n, r, normalize_phase(u[:, :r]))


def kernel_basis(m, tol: Tolerances = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the numerical null space of m.

    Complementary to :func:`range_basis` of the adjoint: dims add up to the
    number of columns under the same rank_tol cut.
    """
    m = as_matrix(m)
    n = m.shape[1]
    if m.size == 0:
        basis = np.eye(n, dtype=np.complex128)
        return SubspaceBasis(n, n, basis)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = _numerical_rank(s, tol.rank_tol)
    return SubspaceBasis(n, n - r, normalize_phase(vh[r:].conj().T))


def complement_basis(sub: SubspaceBasis) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement, deterministically.

    Taken from the trailing left singular vectors of the basis frame, so the
    complement has exact dimension and two calls on the same subspace always
    produce complement vectors in the same order. That fixed order is what
    downstream unitary extensions rely on to pair complements.
    """
    n = sub.ambient_dim
    if sub.dim == 0:
        return SubspaceBasis(n, n, np.eye(n, dtype=np.complex128))
    if sub.dim == n:
        return SubspaceBasis(n, 0, np.zeros((n, 0), dtype=np.complex128))
    u, _, _ = np.linalg.svd(sub.basis, full_matrices=True)
    return SubspaceBasis(n, n - sub.dim, normalize_phase(u[:, sub.dim :]))


def hermitian_sqrt(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues below rank_tol * ||m|| are clipped to zero before rooting, so
    defect operators of near-isometries come out with clean numerical rank.

    Raises NotHermitian if ||m - m*|| exceeds residual_tol and NotPSD if an
    eigenvalue sits below -rank_tol * ||m||.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("square root needs a square matrix")
    if m.shape[0] == 0:
        return m.copy()
    herm_res = operator_norm(m - m.conj().T)
    if herm_res > tol.residual_tol:
        raise NotHermitian(f"Hermitian residual {herm_res:.3e} > {tol.residual_tol:.3e}")
    h = (m + m.conj().T) / 2.0
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    cut = tol.rank_tol * scale
    if w.size and float(w[0]) < -cut:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{cut:.3e}")
    w = np.where(w > cut, w, 0.0)
    root = (v * np.sqrt(w)) @ v.conj().T
    return (root + root.conj().T) / 2.0


def extend_isometry_to_unitary(
    domain: SubspaceBasis,
    codomain: SubspaceBasis,
    action: np.ndarray,
    tol: Tolerances = DEFAULT_TOL,
) -> np.ndarray:
    """Extend an isometry between subspaces to a unitary on the ambient space.

    action is the (codomain.dim x domain.dim) coordinate matrix of the map.
    The orthogonal complements are paired in their deterministic basis order
    (i-th complement vector of the domain goes to the i-th of the codomain),
    which is what pins the extension down to a reproducible unitary.

    Raises CodimensionMismatch when the subspace dimensions differ and
    NotIsometric when action fails the Gram identity within residual_tol.
    """
    if domain.ambient_dim != codomain.ambient_dim:
        raise ValueError("domain and codomain live in different ambient spaces")
    if domain.dim != codomain.dim:
        raise CodimensionMismatch(
            f"domain dim {domain.dim} != codomain dim {codomain.dim}"
        )
    action = as_matrix(action)
    if action.shape != (codomain.dim, domain.dim):
        raise ValueError(
            f"action shape {action.shape} != ({codomain.dim}, {domain.dim})"
        )
    gram = operator_norm(action.conj().T @ action - np.eye(domain.dim))
    if gram > tol.residual_tol:
        raise NotIsometric(f"Gram residual {gram:.3e} > {tol.residual_tol:.3e}")
    dom_c = complement_basis(domain)
    cod_c = complement_basis(codomain)
    w = codomain.basis @ action @ domain.basis.conj().T
    w = w + cod_c.basis @ dom_c.basis.conj().T
    unit_res = operator_norm(w.conj().T @ w - np.eye(domain.ambient_dim))
    if unit_res > tol.residual_tol:
        raise NotIsometric(f"extension unitarity residual {unit_res:.3e}")
    return w
