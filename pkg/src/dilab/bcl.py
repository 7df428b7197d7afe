"""Unitary triples encoding commuting contraction pairs in defect coordinates.

A triple (E, U, P) consists of E = C^(d1+d2) (coordinates of the two codefect
spaces, stacked), a unitary U on E, and the orthogonal projection P onto the
second summand. The triple is built from a commuting pair by extending the
defect isometry

    (D_{T1*} T2* h, D_{T2*} h)  |->  (D_{T1*} h, D_{T2*} T1* h)

to a unitary; the linear pencils

    Phi(z) = (P + z P_perp) U*,      Psi(z) = U (P_perp + z P)

then multiply to z * I and carry all the structure downstream: their block
decomposition U = [[A, B], [C, D]] governs purity, complete non-coisometry,
wandering subspaces, and the transfer function A + z B (I - z D)^{-1} C.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .contraction import (
    CommutingPair,
    PurityCertificate,
    certify_cnc,
    certify_pure,
)
from .errors import (
    CodimensionMismatch,
    ExtensionFailure,
    HypothesisViolated,
    NearSingularResolvent,
    NotIsometric,
    TripleMismatch,
)
from .linalg import DEFAULT_TOL, Tolerances


@dataclass(frozen=True, eq=False)
class BCLTriple:
    """Unitary U and projection P on E = C^(d1+d2).

    The first d1 coordinates represent the codefect space of the first
    contraction, the last d2 those of the second; P always projects onto the
    second summand.
    """

    e_dim: int
    d1: int
    d2: int
    u: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.e_dim != self.d1 + self.d2:
            raise ValueError("e_dim must equal d1 + d2")
        if self.u.shape != (self.e_dim, self.e_dim):
            raise ValueError(f"u has shape {self.u.shape}, expected square e_dim")
        if self.p.shape != (self.e_dim, self.e_dim):
            raise ValueError(f"p has shape {self.p.shape}, expected square e_dim")

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> None:
        """Check unitarity of U and the canonical form of P."""
        eye = np.eye(self.e_dim, dtype=np.complex128)
        res = linalg.operator_norm(self.u.conj().T @ self.u - eye)
        if res > tol.residual_tol:
            raise TripleMismatch(f"U unitarity residual {res:.3e}")
        canon = canonical_projection(self.d1, self.d2)
        res = linalg.operator_norm(self.p - canon)
        if res > tol.residual_tol:
            raise TripleMismatch(f"P deviates from second-summand projection by {res:.3e}")


def canonical_projection(d1: int, d2: int) -> np.ndarray:
    p = np.zeros((d1 + d2, d1 + d2), dtype=np.complex128)
    for i in range(d1, d1 + d2):
        p[i, i] = 1.0
    return p


@dataclass(frozen=True, eq=False)
class DefectCoordinates:
    """Coordinate matrices of the four defect vectors entering the isometry.

    Rows live in the respective codefect coordinates, columns index the
    standard basis of the underlying space: x1 = Q1* D_{T1*},
    x1t2 = Q1* D_{T1*} T2*, x2 = Q2* D_{T2*}, x2t1 = Q2* D_{T2*} T1*.
    """

    x1: np.ndarray
    x2: np.ndarray
    x1t2: np.ndarray
    x2t1: np.ndarray
    d1: int
    d2: int


def defect_coordinates(pair: CommutingPair) -> DefectCoordinates:
    q1 = pair.t1.codefect_basis.basis.conj().T
    q2 = pair.t2.codefect_basis.basis.conj().T
    x1 = q1 @ pair.t1.codefect
    x2 = q2 @ pair.t2.codefect
    return DefectCoordinates(
        x1=x1,
        x2=x2,
        x1t2=x1 @ pair.t2.matrix.conj().T,
        x2t1=x2 @ pair.t1.matrix.conj().T,
        d1=q1.shape[0],
        d2=q2.shape[0],
    )


def build_complete_bcl_triple(pair: CommutingPair, tol: Tolerances = DEFAULT_TOL) -> BCLTriple:
    """Construct the triple by unitary extension of the defect isometry.

    The defect identity of a commuting pair makes the map isometric from the
    column space of (x1t2; x2) onto that of (x1; x2t1); both spaces sit in
    C^(d1+d2), always with equal codimension there, and the orthogonal
    complements are paired in deterministic basis order.
    """
    c = defect_coordinates(pair)
    mmat = np.vstack([c.x1t2, c.x2])
    nmat = np.vstack([c.x1, c.x2t1])
    domain = linalg.range_basis(mmat, tol)
    codomain = linalg.range_basis(nmat, tol)
    if domain.dim != codomain.dim:
        raise ExtensionFailure(
            f"defect ranks disagree: {domain.dim} vs {codomain.dim}"
        )
    z = nmat @ np.linalg.pinv(mmat, rcond=tol.rank_tol)
    action = codomain.basis.conj().T @ z @ domain.basis
    try:
        u = linalg.extend_isometry_to_unitary(domain, codomain, action, tol)
    except (NotIsometric, CodimensionMismatch) as exc:
        raise ExtensionFailure(str(exc)) from exc
    return BCLTriple(
        e_dim=c.d1 + c.d2,
        d1=c.d1,
        d2=c.d2,
        u=u,
        p=canonical_projection(c.d1, c.d2),
    )


# ------------------------------------------------------------------- symbols

@dataclass(frozen=True, eq=False)
class PencilSymbol:
    """Linear matrix pencil z |-> c0 + z * c1."""

    c0: np.ndarray
    c1: np.ndarray

    def __call__(self, z: complex) -> np.ndarray:
        return self.c0 + z * self.c1

    @property
    def dim(self) -> int:
        return self.c0.shape[0]


def bcl_symbols(triple: BCLTriple) -> tuple[PencilSymbol, PencilSymbol]:
    """The two isometry symbols Phi, Psi of the triple."""
    eye = np.eye(triple.e_dim, dtype=np.complex128)
    p = triple.p
    pperp = eye - p
    ustar = triple.u.conj().T
    phi = PencilSymbol(c0=p @ ustar, c1=pperp @ ustar)
    psi = PencilSymbol(c0=triple.u @ pperp, c1=triple.u @ p)
    return phi, psi


def symbol_product_residual(
    phi: PencilSymbol, psi: PencilSymbol, n_points: int = 8
) -> float:
    """max over unit-circle sample points of ||Phi(z) Psi(z) - z I|| (both orders)."""
    eye = np.eye(phi.dim, dtype=np.complex128)
    worst = 0.0
    for k in range(n_points):
        z = np.exp(2j * np.pi * k / n_points)
        worst = max(
            worst,
            linalg.operator_norm(phi(z) @ psi(z) - z * eye),
            linalg.operator_norm(psi(z) @ phi(z) - z * eye),
        )
    return worst


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Blocks of U with respect to the splitting (first summand, second summand)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray


def block_decomposition(triple: BCLTriple) -> BlockDecomposition:
    d1 = triple.d1
    u = triple.u
    return BlockDecomposition(
        a=u[:d1, :d1], b=u[:d1, d1:], c=u[d1:, :d1], d=u[d1:, d1:]
    )


# ----------------------------------------------------------- residual checks

def _check_dims(triple: BCLTriple, c: DefectCoordinates) -> None:
    if (triple.d1, triple.d2) != (c.d1, c.d2):
        raise TripleMismatch(
            f"triple defect dims ({triple.d1}, {triple.d2}) != "
            f"pair defect dims ({c.d1}, {c.d2})"
        )


@dataclass(frozen=True)
class UnitaryRelationsReport:
    """Operator-norm residuals of the four defect relations tying U to the pair."""

    residuals: tuple[float, float, float, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def verify_unitary_relations(triple: BCLTriple, pair: CommutingPair) -> UnitaryRelationsReport:
    """Residuals of the four block relations, evaluated on the full space.

    In defect coordinates the relations read
        x1   = A x1t2 + B x2          x2   = D* x2t1 + B* x1
        x2t1 = C x1t2 + D x2          x1t2 = C* x2t1 + A* x1
    """
    c = defect_coordinates(pair)
    _check_dims(triple, c)
    bl = block_decomposition(triple)
    r1 = linalg.operator_norm(c.x1 - (bl.a @ c.x1t2 + bl.b @ c.x2))
    r2 = linalg.operator_norm(c.x2t1 - (bl.c @ c.x1t2 + bl.d @ c.x2))
    r3 = linalg.operator_norm(c.x2 - (bl.d.conj().T @ c.x2t1 + bl.b.conj().T @ c.x1))
    r4 = linalg.operator_norm(c.x1t2 - (bl.c.conj().T @ c.x2t1 + bl.a.conj().T @ c.x1))
    return UnitaryRelationsReport((r1, r2, r3, r4))


@dataclass(frozen=True)
class RecurrenceReport:
    """Residuals of the two defect recurrences, per power m = 1..m_max."""

    a_branch: tuple[float, ...]
    d_branch: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(max(self.a_branch), max(self.d_branch))


def verify_recurrence(
    triple: BCLTriple, pair: CommutingPair, m_max: int = 10
) -> RecurrenceReport:
    """Check the closed-form power recurrences of the blocks A and D.

    Branch one:
        A^{*m} x1 = x1 T2^{*m} - sum_{k<m} A^{*k} C* (x2 T1* T2^{*(m-1-k)})
    Branch two:
        D^m x2 = x2 T1^{*m} - sum_{k<m} D^k C (x1 T2* T1^{*(m-1-k)})
    Both are consequences of the four block relations; residuals should sit
    at rounding level for any valid triple.
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    c = defect_coordinates(pair)
    _check_dims(triple, c)
    bl = block_decomposition(triple)
    t1s = pair.t1.matrix.conj().T
    t2s = pair.t2.matrix.conj().T
    n = pair.dim

    def powers(m: np.ndarray, count: int) -> list[np.ndarray]:
        out = [np.eye(m.shape[0], dtype=np.complex128)]
        for _ in range(count):
            out.append(out[-1] @ m)
        return out

    t1p = powers(t1s, m_max)
    t2p = powers(t2s, m_max)
    ap = powers(bl.a.conj().T, m_max)
    dp = powers(bl.d, m_max)
    cstar = bl.c.conj().T

    res_a = []
    res_d = []
    for m in range(1, m_max + 1):
        acc = np.zeros((triple.d1, n), dtype=np.complex128)
        for k in range(m):
            acc = acc + ap[k] @ cstar @ (c.x2t1 @ t2p[m - 1 - k])
        res_a.append(linalg.operator_norm(ap[m] @ c.x1 - (c.x1 @ t2p[m] - acc)))

        acc = np.zeros((triple.d2, n), dtype=np.complex128)
        for k in range(m):
            acc = acc + dp[k] @ bl.c @ (c.x1t2 @ t1p[m - 1 - k])
        res_d.append(linalg.operator_norm(dp[m] @ c.x2 - (c.x2 @ t1p[m] - acc)))
    return RecurrenceReport(tuple(res_a), tuple(res_d))


# --------------------------------------------------------- transfer function

def transfer_function(
    blocks: BlockDecomposition, z: complex, tol: Tolerances = DEFAULT_TOL
) -> np.ndarray:
    """tau(z) = A + z B (I - z D)^{-1} C for z in the open unit disc."""
    if abs(z) >= 1.0:
        raise ValueError("transfer function is defined on the open disc only")
    d_dim = blocks.d.shape[0]
    if d_dim == 0:
        return blocks.a.copy()
    res = np.eye(d_dim, dtype=np.complex128) - z * blocks.d
    # the identity anchors the scale at 1, so an absolute cut is the right gauge
    if np.linalg.svd(res, compute_uv=False)[-1] <= tol.rank_tol:
        raise NearSingularResolvent(f"I - zD numerically singular at z = {z}")
    y = np.linalg.solve(res, blocks.c)
    return blocks.a + z * blocks.b @ y


def transfer_defect_residual(
    blocks: BlockDecomposition, z: complex, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Residual of I - tau(z)* tau(z) = (1 - |z|^2) C* (I - zD)^{-*} (I - zD)^{-1} C.

    The identity encodes unitarity of U through the pencil; it holds exactly
    for every valid block decomposition, so the residual is a numerical
    health check for the triple.
    """
    tau = transfer_function(blocks, z, tol)
    d_dim = blocks.d.shape[0]
    if d_dim == 0:
        y = blocks.c
    else:
        y = np.linalg.solve(np.eye(d_dim, dtype=np.complex128) - z * blocks.d, blocks.c)
    lhs = np.eye(tau.shape[1], dtype=np.complex128) - tau.conj().T @ tau
    rhs = (1.0 - abs(z) ** 2) * (y.conj().T @ y)
    return linalg.operator_norm(lhs - rhs)


# -------------------------------------------------- purity and related routes

def fringe_compressions(triple: BCLTriple) -> tuple[np.ndarray, np.ndarray]:
    """The two corner compressions governing purity of the symbols.

    Returns (A, D*): A is the compression of U to the first summand and
    governs the Psi-side isometry; D* is the adjoint compression to the
    second summand and governs the Phi-side isometry.
    """
    bl = block_decomposition(triple)
    return bl.a, bl.d.conj().T


def certify_bcl_pure(
    triple: BCLTriple, m_max: int = 25, tol: Tolerances = DEFAULT_TOL
) -> tuple[PurityCertificate, PurityCertificate]:
    """Purity certificates for the blocks A and D*.

    Purity transfers: the Psi-side multiplication isometry is pure exactly
    when A is a pure contraction, the Phi-side one exactly when D* is.
    """
    a, dstar = fringe_compressions(triple)
    return certify_pure(a, m_max, tol), certify_pure(dstar, m_max, tol)


def certify_cnc_blocks(
    triple: BCLTriple, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, bool]:
    """Complete non-coisometry of the blocks (A, D*)."""
    a, dstar = fringe_compressions(triple)
    return certify_cnc(a, tol), certify_cnc(dstar, tol)


def wandering_check_symbols(
    triple: BCLTriple, tol: Tolerances = DEFAULT_TOL
) -> tuple[bool, bool]:
    """Wandering-subspace property of the symbol values Phi(0) and Psi(0).

    Each value is checked to be a partial isometry whose cokernel generates
    the whole space under forward orbits: rank [K, XK, ..., X^(e-1)K] = e_dim
    with K a basis of ker X*. Both hold for every complete triple of a pure
    pair; the booleans report each symbol separately.
    """
    phi, psi = bcl_symbols(triple)
    out = []
    eye = np.eye(triple.e_dim, dtype=np.complex128)
    for x in (phi.c0, psi.c0):
        if linalg.operator_norm(x @ x.conj().T @ x - x) > tol.residual_tol:
            out.append(False)
            continue
        ker = linalg.kernel_basis(x.conj().T, tol)
        # for a partial isometry, I - XX* is the projection onto ker X*
        if linalg.operator_norm(ker.projector() - (eye - x @ x.conj().T)) > 1e-8:
            out.append(False)
            continue
        cols = [ker.basis]
        cur = ker.basis
        for _ in range(triple.e_dim - 1):
            cur = x @ cur
            cols.append(cur)
        orbit = np.hstack(cols)
        out.append(linalg.range_basis(orbit, tol).dim == triple.e_dim)
    return out[0], out[1]


# ------------------------------------------------- equal-defect construction

def _polar_unitary(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def build_offdiagonal_triple(pair: CommutingPair, tol: Tolerances = DEFAULT_TOL) -> BCLTriple:
    """Off-diagonal unitary for pairs with equal codefect operators.

    When D_{T1*} = D_{T2*} (within residual_tol) the defect isometry reduces
    to a map D T2* h |-> D T1* h inside one copy of the common defect space;
    extending that map to a unitary u gives the block form

        W = [[0, r], [u, 0]],    r = polar factor of Q1* Q2,

    whose diagonal blocks vanish identically. For bitwise-equal defect bases
    r is exactly the identity. Raises HypothesisViolated when the codefect
    operators differ beyond tolerance.
    """
    diff = linalg.operator_norm(pair.t1.codefect - pair.t2.codefect)
    if diff > tol.residual_tol:
        raise HypothesisViolated(
            f"codefect operators differ by {diff:.3e} > {tol.residual_tol:.1e}"
        )
    q1 = pair.t1.codefect_basis
    q2 = pair.t2.codefect_basis
    if q1.dim != q2.dim:
        raise HypothesisViolated(
            f"codefect ranks differ: {q1.dim} vs {q2.dim}"
        )
    d = q1.dim
    x1t2 = q1.basis.conj().T @ pair.t1.codefect @ pair.t2.matrix.conj().T
    x2t1 = q2.basis.conj().T @ pair.t2.codefect @ pair.t1.matrix.conj().T
    domain = linalg.range_basis(x1t2, tol)
    codomain = linalg.range_basis(x2t1, tol)
    if domain.dim != codomain.dim:
        raise ExtensionFailure(
            f"defect ranks disagree: {domain.dim} vs {codomain.dim}"
        )
    z = x2t1 @ np.linalg.pinv(x1t2, rcond=tol.rank_tol)
    action = codomain.basis.conj().T @ z @ domain.basis
    try:
        u_small = linalg.extend_isometry_to_unitary(domain, codomain, action, tol)
    except (NotIsometric, CodimensionMismatch) as exc:
        raise ExtensionFailure(str(exc)) from exc
    r = _polar_unitary(q1.basis.conj().T @ q2.basis) if d else np.zeros((0, 0), complex)
    w = np.zeros((2 * d, 2 * d), dtype=np.complex128)
    w[:d, d:] = r
    w[d:, :d] = u_small
    return BCLTriple(e_dim=2 * d, d1=d, d2=d, u=w, p=canonical_projection(d, d))
