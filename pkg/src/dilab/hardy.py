"""Truncated vector-valued Hardy space models and the dilation isometry.

The degree-<=N section of the Hardy space of C^d-valued analytic functions is
coordinatized by stacked Taylor coefficient blocks, so every multiplication
operator by a linear pencil becomes a block lower-bidiagonal Toeplitz matrix
and all adjoints are exact compressions (the section is co-invariant). No
quadrature appears anywhere; everything is coefficient algebra.

The dilation of a pure contraction T sends h to the coefficient sequence
D_{T*} T^{*k} h. Truncation at degree N loses exactly the tail
||T^{*(N+1)} h||^2 of the norm (telescoping), which the package reports
instead of hiding.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bcl import BCLTriple, PencilSymbol, bcl_symbols, defect_coordinates, verify_unitary_relations
from .contraction import CommutingPair, Contraction, PurityCertificate, certify_pure, make_contraction
from .errors import NotPure, TripleMismatch
from .linalg import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class TruncatedHardy:
    """Shape of a degree-<=N section with fiber C^d."""

    degree: int
    fiber_dim: int

    def __post_init__(self) -> None:
        if self.degree < 0 or self.fiber_dim < 0:
            raise ValueError("degree and fiber_dim must be non-negative")

    @property
    def total_dim(self) -> int:
        return (self.degree + 1) * self.fiber_dim


def multiplication_matrix(symbol: PencilSymbol, degree: int) -> np.ndarray:
    """Matrix of multiplication by c0 + z c1 on the degree-<=N section.

    Block Toeplitz: c0 on the diagonal, c1 on the first subdiagonal.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    d = symbol.dim
    total = (degree + 1) * d
    out = np.zeros((total, total), dtype=np.complex128)
    for k in range(degree + 1):
        out[k * d : (k + 1) * d, k * d : (k + 1) * d] = symbol.c0
        if k:
            out[k * d : (k + 1) * d, (k - 1) * d : k * d] = symbol.c1
    return out


def shift_symbol(fiber_dim: int) -> PencilSymbol:
    """The coordinate multiplier z itself, as a pencil on C^fiber_dim."""
    z = np.zeros((fiber_dim, fiber_dim), dtype=np.complex128)
    return PencilSymbol(c0=z, c1=np.eye(fiber_dim, dtype=np.complex128))


def _as_contraction(t, tol: Tolerances) -> Contraction:
    return t if isinstance(t, Contraction) else make_contraction(t, tol)


def dilation_map_single(t, degree: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Coefficient matrix of the dilation of one pure contraction.

    Row block k is Q* D_{T*} T^{*k} in codefect coordinates; the result has
    shape ((degree+1) * dim defect space) x n. Raises NotPure when the purity
    gate fails.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    t = _as_contraction(t, tol)
    cert = certify_pure(t, m_max=1, tol=tol)
    if not cert.is_pure:
        raise NotPure(
            f"dilation needs a pure contraction; spectral radius "
            f"{cert.spectral_radius:.12f} ({cert.verdict})"
        )
    x = t.codefect_basis.basis.conj().T @ t.codefect
    adj = t.matrix.conj().T
    rows = []
    for _ in range(degree + 1):
        rows.append(x)
        x = x @ adj
    return np.vstack(rows)


@dataclass(frozen=True)
class DilationResiduals:
    """Operator-norm residuals reported with a pair dilation.

    intertwine_* cover coefficient rows 0..N against the exact identities
    (computed with an internal (N+2)-block extension so the boundary row is
    compared honestly); isometry_defect is the operator residual of
    Pi* Pi = I - T^{N+1} T^{*(N+1)}; symbol_product is ||M_Phi M_Psi - M_z||
    on the section.
    """

    intertwine_z: float
    intertwine_phi: float
    intertwine_psi: float
    isometry_defect: float
    symbol_product: float

    @property
    def max_residual(self) -> float:
        return max(
            self.intertwine_z,
            self.intertwine_phi,
            self.intertwine_psi,
            self.isometry_defect,
            self.symbol_product,
        )


@dataclass(frozen=True, eq=False)
class DilationPackage:
    """The truncated dilation of a commuting pair through its triple."""

    space: TruncatedHardy
    pi_v: np.ndarray = field(repr=False)
    m_phi: np.ndarray = field(repr=False)
    m_psi: np.ndarray = field(repr=False)
    m_z: np.ndarray = field(repr=False)
    residuals: DilationResiduals


def dilation_map_pair(
    pair: CommutingPair,
    triple: BCLTriple,
    degree: int,
    tol: Tolerances = DEFAULT_TOL,
) -> DilationPackage:
    """Dilate the pair inside the truncated E-valued Hardy space.

    The defect isometry V sends D_{T*} h (T the product) to
    (D_{T1*} h, D_{T2*} T1* h); applying it blockwise to the dilation of the
    product produces the joint dilation, intertwined with M_Phi, M_Psi, M_z.

    Raises NotPure when the product fails the purity gate and TripleMismatch
    when the triple does not satisfy the defect relations of this pair
    within residual_tol.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    rep = verify_unitary_relations(triple, pair)
    if rep.max_residual > tol.residual_tol:
        raise TripleMismatch(
            f"unitary relations residual {rep.max_residual:.3e} exceeds "
            f"{tol.residual_tol:.1e}"
        )
    t = pair.product
    c = defect_coordinates(pair)
    s = np.vstack([c.x1, c.x2t1])
    w = t.codefect_basis.basis.conj().T @ t.codefect
    vmat = s @ np.linalg.pinv(w, rcond=tol.rank_tol)

    ext = dilation_map_single(t, degree + 1, tol)  # N+2 coefficient blocks
    dt = t.codefect_basis.dim
    blocks = [vmat @ ext[k * dt : (k + 1) * dt, :] for k in range(degree + 2)]
    pi_v = np.vstack(blocks[: degree + 1])

    phi, psi = bcl_symbols(triple)
    fiber = triple.e_dim
    m_phi = multiplication_matrix(phi, degree)
    m_psi = multiplication_matrix(psi, degree)
    m_z = multiplication_matrix(shift_symbol(fiber), degree)

    t1s = pair.t1.matrix.conj().T
    t2s = pair.t2.matrix.conj().T
    ts = t.matrix.conj().T
    rz = rphi = rpsi = 0.0
    for k in range(degree + 1):
        rz = max(rz, linalg.operator_norm(blocks[k] @ ts - blocks[k + 1]))
        rphi = max(
            rphi,
            linalg.operator_norm(
                blocks[k] @ t1s
                - (phi.c0.conj().T @ blocks[k] + phi.c1.conj().T @ blocks[k + 1])
            ),
        )
        rpsi = max(
            rpsi,
            linalg.operator_norm(
                blocks[k] @ t2s
                - (psi.c0.conj().T @ blocks[k] + psi.c1.conj().T @ blocks[k + 1])
            ),
        )

    tail = np.linalg.matrix_power(ts, degree + 1)
    eye = np.eye(pair.dim, dtype=np.complex128)
    gram = linalg.operator_norm(pi_v.conj().T @ pi_v - (eye - tail.conj().T @ tail))
    prod = linalg.operator_norm(m_phi @ m_psi - m_z)

    return DilationPackage(
        space=TruncatedHardy(degree, fiber),
        pi_v=pi_v,
        m_phi=m_phi,
        m_psi=m_psi,
        m_z=m_z,
        residuals=DilationResiduals(rz, rphi, rpsi, gram, prod),
    )


def compression_purity_check(
    symbol: PencilSymbol,
    degree: int,
    m_max: int = 25,
    tol: Tolerances = DEFAULT_TOL,
) -> PurityCertificate:
    """Purity certificate of the adjoint compression of M_symbol to the section.

    The section is co-invariant, so powers of the compression are exact
    compressions of powers; purity of the compression therefore witnesses
    purity of the full multiplication isometry, and its verdict always agrees
    with certify_pure of the constant coefficient c0.
    """
    comp = multiplication_matrix(symbol, degree).conj().T
    return certify_pure(comp, m_max, tol)


@dataclass(frozen=True)
class MinimalityReport:
    """Numerical ranks of the shifted dilation ranges, per truncation degree.

    ranks[k] is the rank of [Pi, M_z Pi, ..., M_z^N Pi] restricted to
    coefficient rows 0..k; expected[k] = (k+1) * dim defect. minimal is True
    when they agree for every k, i.e. the shifted copies of the dilation
    range span each truncated section completely.
    """

    ranks: tuple[int, ...]
    expected: tuple[int, ...]

    @property
    def minimal(self) -> bool:
        return self.ranks == self.expected


def minimality_check(t, degree: int, tol: Tolerances = DEFAULT_TOL) -> MinimalityReport:
    t = _as_contraction(t, tol)
    pi = dilation_map_single(t, degree, tol)
    dc = t.codefect_basis.dim
    mz = multiplication_matrix(shift_symbol(dc), degree)
    cols = []
    cur = pi
    for _ in range(degree + 1):
        cols.append(cur)
        cur = mz @ cur
    stack = np.hstack(cols)
    ranks = []
    expected = []
    for k in range(degree + 1):
        sub = stack[: (k + 1) * dc, :]
        ranks.append(linalg.range_basis(sub, tol).dim)
        expected.append((k + 1) * dc)
    return MinimalityReport(tuple(ranks), tuple(expected))
