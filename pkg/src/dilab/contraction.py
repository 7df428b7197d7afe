"""Contractions on C^n: defect operators, purity, and commuting pairs.

A contraction is a square matrix T with operator norm at most 1 (up to the
residual tolerance). Purity here means the powers of the adjoint vanish,
which for a finite matrix is the same as spectral radius strictly below 1;
the certificate reports the spectral radius together with the observed decay
of ||T^{*m}|| so a reviewer can see both routes.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .errors import (
    HypothesisViolated,
    InvalidPowers,
    NotCommuting,
    NotContraction,
)
from .linalg import DEFAULT_TOL, SubspaceBasis, Tolerances

PURE = "Pure"
BORDERLINE = "Borderline"
NOT_PURE = "NotPure"


@dataclass(frozen=True, eq=False)
class Contraction:
    """A contraction with its two defect operators and defect-space bases.

    defect = (I - T*T)^(1/2), codefect = (I - TT*)^(1/2); the bases span the
    numerical ranges of those operators, in deterministic order.
    """

    matrix: np.ndarray = field(repr=False)
    norm: float
    defect: np.ndarray = field(repr=False)
    codefect: np.ndarray = field(repr=False)
    defect_basis: SubspaceBasis
    codefect_basis: SubspaceBasis

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def make_contraction(m, tol: Tolerances = DEFAULT_TOL) -> Contraction:
    """Validate the norm bound and attach defect data.

    Raises NotContraction when ||T|| > 1 + residual_tol.
    """
    m = linalg.as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("contractions must be square")
    nrm = linalg.operator_norm(m)
    if nrm > 1.0 + tol.residual_tol:
        raise NotContraction(f"operator norm {nrm:.12f} > 1 + {tol.residual_tol:.1e}")
    eye = np.eye(m.shape[0], dtype=np.complex128)
    # A tolerated norm overshoot pushes Gram eigenvalues slightly below zero;
    # widen the clipping band just enough to absorb it.
    sq_tol = tol
    overshoot = max(0.0, nrm * nrm - 1.0)
    if overshoot > 0.0:
        gram_scale = max(linalg.operator_norm(eye - m.conj().T @ m), overshoot)
        sq_tol = replace(tol, rank_tol=max(tol.rank_tol, 1.25 * overshoot / gram_scale))
    defect = linalg.hermitian_sqrt(eye - m.conj().T @ m, sq_tol)
    codefect = linalg.hermitian_sqrt(eye - m @ m.conj().T, sq_tol)
    return Contraction(
        matrix=m,
        norm=nrm,
        defect=defect,
        codefect=codefect,
        defect_basis=linalg.range_basis(defect, tol),
        codefect_basis=linalg.range_basis(codefect, tol),
    )


@dataclass(frozen=True)
class PurityCertificate:
    """Spectral radius, adjoint-power decay, and the resulting verdict.

    Verdicts: Pure when sr < 1 - margin, NotPure when sr >= 1, Borderline in
    the band between. decay[m-1] = ||T^{*m}|| and is non-increasing for
    contractions.
    """

    spectral_radius: float
    decay: tuple[float, ...]
    verdict: str
    margin: float

    @property
    def is_pure(self) -> bool:
        return self.verdict == PURE


def _matrix_of(t) -> np.ndarray:
    return t.matrix if isinstance(t, Contraction) else linalg.as_matrix(t)


def certify_pure(t, m_max: int = 25, tol: Tolerances = DEFAULT_TOL) -> PurityCertificate:
    """Certify purity of a contraction via its spectral radius.

    The decay sequence ||T^{*m}||, m = 1..m_max, is reported as a diagnostic;
    the verdict itself is decided by the spectral radius against
    purity_margin.
    """
    m = _matrix_of(t)
    sr = linalg.spectral_radius(m)
    decay = []
    p = np.eye(m.shape[0], dtype=np.complex128)
    adj = m.conj().T
    for _ in range(m_max):
        p = p @ adj
        decay.append(linalg.operator_norm(p))
    if sr < 1.0 - tol.purity_margin:
        verdict = PURE
    elif sr < 1.0:
        verdict = BORDERLINE
    else:
        verdict = NOT_PURE
    return PurityCertificate(sr, tuple(decay), verdict, tol.purity_margin)


def isometric_part(t, adjoint: bool = False, tol: Tolerances = DEFAULT_TOL) -> SubspaceBasis:
    """Basis of the largest subspace on which all powers act isometrically.

    That subspace is the intersection of ker(I - T^{*k} T^k) over k = 1..n;
    n powers always suffice in dimension n. With adjoint=True the adjoint is
    analyzed instead, which is the completely-non-coisometric test.
    """
    m = _matrix_of(t).conj().T if adjoint else _matrix_of(t)
    n = m.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    blocks = []
    p = eye
    for _ in range(n):
        p = p @ m
        blocks.append(eye - p.conj().T @ p)
    stack = np.vstack(blocks) if blocks else eye
    # all Gram defects numerically zero means every power is isometric; the
    # relative rank cut cannot see that (it would rank noise), so decide it
    # here on the absolute scale of the defect blocks
    if linalg.operator_norm(stack) <= tol.rank_tol:
        return SubspaceBasis(n, n, np.eye(n, dtype=np.complex128))
    return linalg.kernel_basis(stack, tol)


def certify_cnc(t, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when no nonzero vector is norm-preserved by every adjoint power."""
    return isometric_part(t, adjoint=True, tol=tol).dim == 0


def certify_cnu(t, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the contraction has no unitary part.

    For a finite matrix a unimodular eigenvalue spans a reducing unitary
    summand, so the test is spectral radius below 1 - purity_margin.
    """
    return linalg.spectral_radius(_matrix_of(t)) < 1.0 - tol.purity_margin


def halmos_mclaughlin_extension(t: Contraction, tol: Tolerances = DEFAULT_TOL) -> Contraction:
    """Embed T into a partial isometry on a doubled space.

    The extension [[T, codefect], [0, 0]] is always a partial isometry and is
    pure exactly when T is.
    """
    n = t.dim
    z = np.zeros((n, 2 * n), dtype=np.complex128)
    top = np.hstack([t.matrix, t.codefect])
    return make_contraction(np.vstack([top, z]), tol)


# ------------------------------------------------------------- commuting pairs

@dataclass(frozen=True, eq=False)
class CommutingPair:
    """Pair of commuting contractions with their product."""

    t1: Contraction
    t2: Contraction
    product: Contraction
    commutator_residual: float

    @property
    def dim(self) -> int:
        return self.t1.dim


def make_commuting_pair(m1, m2, tol: Tolerances = DEFAULT_TOL) -> CommutingPair:
    m1 = linalg.as_matrix(m1)
    m2 = linalg.as_matrix(m2)
    if m1.shape != m2.shape:
        raise ValueError("pair members must share a shape")
    comm = linalg.operator_norm(m1 @ m2 - m2 @ m1)
    if comm > tol.residual_tol:
        raise NotCommuting(f"commutator norm {comm:.3e} > {tol.residual_tol:.1e}")
    return CommutingPair(
        t1=make_contraction(m1, tol),
        t2=make_contraction(m2, tol),
        product=make_contraction(m1 @ m2, tol),
        commutator_residual=comm,
    )


def random_commuting_pure_pair(
    seed: int,
    dim: int,
    shrink: float = 0.9,
    tol: Tolerances = DEFAULT_TOL,
) -> CommutingPair:
    """Draw a commuting pair of strict contractions, reproducibly.

    Both members are degree-<=3 polynomials in one random matrix, which makes
    them commute exactly; rescaling by shrink / max(1, norms) makes them
    strict contractions, hence pure.
    """
    if not 0.0 < shrink < 1.0:
        raise ValueError("shrink must lie in (0, 1)")
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    mats = [np.eye(dim, dtype=np.complex128)]
    for _ in range(3):
        mats.append(mats[-1] @ m)

    def poly() -> np.ndarray:
        c = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        return sum(ck * mk for ck, mk in zip(c, mats))

    t1 = poly()
    t2 = poly()
    s = shrink / max(1.0, linalg.operator_norm(t1), linalg.operator_norm(t2))
    return make_commuting_pair(s * t1, s * t2, tol)


def truncated_shift_pair(n: int, a: int, b: int, tol: Tolerances = DEFAULT_TOL) -> CommutingPair:
    """Pair (J^a, J^b) of powers of the n-dimensional truncated shift.

    J maps e_i to e_{i+1} and kills e_n; valid powers are 1 <= a, b <= n - 1.
    Both members are pure partial isometries and commute exactly.
    """
    if n < 2:
        raise InvalidPowers("shift pairs need n >= 2")
    if not (1 <= a < n and 1 <= b < n):
        raise InvalidPowers(f"powers ({a}, {b}) outside 1..{n - 1}")
    j = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1):
        j[i + 1, i] = 1.0
    return make_commuting_pair(
        np.linalg.matrix_power(j, a), np.linalg.matrix_power(j, b), tol
    )


@dataclass(frozen=True)
class DefectIdentityReport:
    """Residuals of the two structural defect identities of a commuting pair.

    operator_residual checks the operator identity
        T2 (I - T1 T1*) T2* + (I - T2 T2*) = (I - T1 T1*) + T1 (I - T2 T2*) T1*,
    quadratic_residual checks its quadratic-form version
        ||D_{T1*} T2* h||^2 + ||D_{T2*} h||^2 = ||D_{T1*} h||^2 + ||D_{T2*} T1* h||^2
    on every standard basis vector h.
    """

    operator_residual: float
    quadratic_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.operator_residual, self.quadratic_residual)


def check_defect_identities(pair: CommutingPair) -> DefectIdentityReport:
    t1 = pair.t1.matrix
    t2 = pair.t2.matrix
    n = pair.dim
    eye = np.eye(n, dtype=np.complex128)
    g1 = eye - t1 @ t1.conj().T
    g2 = eye - t2 @ t2.conj().T
    op = linalg.operator_norm(t2 @ g1 @ t2.conj().T + g2 - g1 - t1 @ g2 @ t1.conj().T)

    def colsq(m: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(m) ** 2, axis=0)

    d1 = pair.t1.codefect
    d2 = pair.t2.codefect
    lhs = colsq(d1 @ t2.conj().T) + colsq(d2)
    rhs = colsq(d1) + colsq(d2 @ t1.conj().T)
    return DefectIdentityReport(op, float(np.max(np.abs(lhs - rhs))))
