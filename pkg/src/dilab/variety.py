"""Sampled joint varieties of a triple and von Neumann inequality checks.

The two pencils of a triple cut out a one-dimensional variety in the bidisc:
pairs (z1, z2) with z1 an eigenvalue of Phi(z1 z2) and z2 one of Psi(z1 z2).
Sampling walks a polar grid in the product coordinate w = z1 z2 and reads the
fibers off eigenvalue solves; no polynomial system solving is involved. The
same variety has a second description through eigenvalues of the transfer
function, which cross-validation compares pointwise.

The von Neumann check compares ||p(T1, T2)|| against the sampled supremum of
|p| over the variety, with an explicit slack and a coefficient-based grid
bound separating honest failures from discretization artifacts.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .bcl import (
    BCLTriple,
    BlockDecomposition,
    bcl_symbols,
    transfer_function,
)
from .contraction import CommutingPair
from .errors import EigenFailure
from .linalg import DEFAULT_TOL, Tolerances

PASS = "PASS"
INCONCLUSIVE = "INCONCLUSIVE"
FAIL = "FAIL"

BOUNDARY_RADIUS = 0.999
CROSS_VALIDATION_THRESHOLD = 1e-6
VN_SLACK = 1e-3


@dataclass(frozen=True)
class VarietyGrid:
    """Polar sampling grid in the product coordinate, strictly inside the disc."""

    radii: tuple[float, ...]
    angles: int

    def __post_init__(self) -> None:
        if self.angles < 1:
            raise ValueError("need at least one angle")
        if not self.radii:
            raise ValueError("need at least one radius")
        if any(not 0.0 < r < 1.0 for r in self.radii):
            raise ValueError("radii must lie strictly between 0 and 1")
        if list(self.radii) != sorted(self.radii):
            raise ValueError("radii must be sorted ascending")

    @property
    def size(self) -> int:
        return len(self.radii) * self.angles

    def spacing(self) -> float:
        """Coarsest step between neighbouring grid points."""
        radial = max(
            [self.radii[0]]
            + [b - a for a, b in zip(self.radii, self.radii[1:])]
        )
        angular = max(self.radii) * 2.0 * np.pi / self.angles
        return max(radial, angular)


def disc_grid(n_radii: int = 16, angles: int = 64, r_max: float = BOUNDARY_RADIUS) -> VarietyGrid:
    radii = tuple(float(r) for r in np.linspace(r_max / n_radii, r_max, n_radii))
    return VarietyGrid(radii=radii, angles=angles)


@dataclass(frozen=True)
class VarietyPoint:
    """One sampled point (z1, z2) with w = z1 * z2 and its defining residuals.

    res_phi/res_psi are |det| residuals of the two pencil conditions (None
    for transfer-sampled points); res_tau is the normalized transfer residual
    once cross-validation has run.
    """

    w: complex
    z1: complex
    z2: complex
    res_phi: float | None = None
    res_psi: float | None = None
    res_tau: float | None = None


@dataclass(frozen=True)
class VarietySample:
    points: tuple[VarietyPoint, ...]
    grid: VarietyGrid
    distinguished: bool
    boundary_radius: float


def _sorted_eigvals(m: np.ndarray) -> np.ndarray:
    try:
        ev = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    # round the sort keys so near-ties do not flip order on eps-level noise
    order = np.lexsort((np.round(ev.imag, 10), np.round(ev.real, 10)))
    return ev[order]


def sample_variety(
    triple: BCLTriple, grid: VarietyGrid | None = None, tol: Tolerances = DEFAULT_TOL
) -> VarietySample:
    """Sample the pencil variety over a polar grid of the product coordinate.

    For each grid point w the eigenvalues z1 of Phi(w) are paired with
    z2 = w / z1 (the pencil product identity forces Psi(w) to have exactly
    that eigenvalue); fibers with a numerically zero z1 fall back to the
    symmetric sweep through Psi(w). A point is accepted when both |det|
    residuals sit below residual_tol. Points come out sorted by grid index,
    then by eigenvalue order.
    """
    if grid is None:
        grid = disc_grid()
    phi, psi = bcl_symbols(triple)
    eye = np.eye(triple.e_dim, dtype=np.complex128)
    points: list[VarietyPoint] = []
    for r in grid.radii:
        for j in range(grid.angles):
            w = complex(r * np.exp(2j * np.pi * j / grid.angles))
            phi_w = phi(w)
            psi_w = psi(w)
            z1s = _sorted_eigvals(phi_w)
            if np.all(np.abs(z1s) > tol.rank_tol):
                z1arr = z1s
                z2arr = w / z1s
            else:
                # degenerate fiber: sweep the second pencil symmetrically
                z2s = _sorted_eigvals(psi_w)
                z2arr = z2s[np.abs(z2s) > tol.rank_tol]
                z1arr = w / z2arr
            if z1arr.size == 0:
                continue
            rp = np.abs(
                np.linalg.det(phi_w[None, :, :] - z1arr[:, None, None] * eye[None, :, :])
            )
            rq = np.abs(
                np.linalg.det(psi_w[None, :, :] - z2arr[:, None, None] * eye[None, :, :])
            )
            for idx in range(z1arr.size):
                if rp[idx] <= tol.residual_tol and rq[idx] <= tol.residual_tol:
                    points.append(
                        VarietyPoint(
                            w=w,
                            z1=complex(z1arr[idx]),
                            z2=complex(z2arr[idx]),
                            res_phi=float(rp[idx]),
                            res_psi=float(rq[idx]),
                        )
                    )
    verdict = _distinguished(points, BOUNDARY_RADIUS)
    return VarietySample(
        points=tuple(points),
        grid=grid,
        distinguished=verdict,
        boundary_radius=BOUNDARY_RADIUS,
    )


def sample_transfer_variety(
    blocks: BlockDecomposition, grid: VarietyGrid | None = None, tol: Tolerances = DEFAULT_TOL
) -> tuple[VarietyPoint, ...]:
    """Sample the transfer-function variety: z2 an eigenvalue of tau(z1).

    The grid is walked in the z1 coordinate; each point records w = z1 * z2
    and the raw |det| residual in res_tau.
    """
    if grid is None:
        grid = disc_grid()
    d1 = blocks.a.shape[0]
    if d1 == 0:
        return ()
    eye = np.eye(d1, dtype=np.complex128)
    points: list[VarietyPoint] = []
    for r in grid.radii:
        for j in range(grid.angles):
            z1 = complex(r * np.exp(2j * np.pi * j / grid.angles))
            tau = transfer_function(blocks, z1, tol)
            for z2 in _sorted_eigvals(tau):
                z2 = complex(z2)
                res = float(np.abs(np.linalg.det(tau - z2 * eye)))
                points.append(VarietyPoint(w=z1 * z2, z1=z1, z2=z2, res_tau=res))
    return tuple(points)


@dataclass(frozen=True)
class CrossValidationReport:
    """Agreement of the pencil variety with the transfer variety."""

    max_residual: float
    mean_residual: float
    count: int
    threshold: float

    @property
    def ok(self) -> bool:
        return self.count > 0 and self.max_residual <= self.threshold


def cross_validate_varieties(
    sample: VarietySample,
    blocks: BlockDecomposition,
    tol: Tolerances = DEFAULT_TOL,
    threshold: float = CROSS_VALIDATION_THRESHOLD,
) -> tuple[VarietySample, CrossValidationReport]:
    """Check every interior sampled point against the transfer description.

    For each point with |z1| < 1 the residual is |det(tau(z1) - z2 I)|
    normalized by the product of (1 + |eigenvalue|) factors, so a value near
    zero certifies that z2 is an eigenvalue of tau(z1) regardless of the
    fiber dimension. Returns the sample with res_tau filled in and the
    aggregate report.
    """
    vals: list[float] = []
    updated: list[VarietyPoint] = []
    for pt in sample.points:
        if abs(pt.z1) >= 1.0 - tol.rank_tol:
            updated.append(pt)
            continue
        tau = transfer_function(blocks, pt.z1, tol)
        ev = np.linalg.eigvals(tau)
        num = float(np.prod(np.abs(ev - pt.z2)))
        den = float(np.prod(1.0 + np.abs(ev)))
        res = num / den
        vals.append(res)
        updated.append(replace(pt, res_tau=res))
    if vals:
        report = CrossValidationReport(
            max_residual=float(np.max(vals)),
            mean_residual=float(np.mean(vals)),
            count=len(vals),
            threshold=threshold,
        )
    else:
        report = CrossValidationReport(0.0, 0.0, 0, threshold)
    return replace(sample, points=tuple(updated)), report


def _distinguished(points: list[VarietyPoint], boundary_radius: float) -> bool:
    inside = [p for p in points if abs(p.w) <= boundary_radius + 1e-12]
    if not inside:
        return False
    if any(abs(p.z1) >= 1.0 or abs(p.z2) >= 1.0 for p in inside):
        return False
    # exit trend: the worst modulus over each w-circle must climb toward 1
    by_radius: dict[float, float] = {}
    for p in inside:
        r = round(abs(p.w), 12)
        m = min(abs(p.z1), abs(p.z2))
        by_radius[r] = min(by_radius.get(r, 1.0), m)
    radii = sorted(by_radius)
    worst = [by_radius[r] for r in radii]
    return all(b >= a - 1e-6 for a, b in zip(worst, worst[1:]))


def distinguished_check(
    sample: VarietySample, boundary_radius: float = BOUNDARY_RADIUS
) -> bool:
    """True when the sampled variety stays inside the open bidisc and exits
    through the distinguished boundary (monotone trend of the fiber minima)."""
    return _distinguished(list(sample.points), boundary_radius)


# ------------------------------------------------------------ polynomials

@dataclass(frozen=True, eq=False)
class BivariatePoly:
    """p(z1, z2) = sum_ij coeffs[i, j] z1^i z2^j."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 2 or c.size == 0:
            raise ValueError("coefficient grid must be a non-empty 2-D array")
        object.__setattr__(self, "coeffs", c)

    @property
    def degrees(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def gradient_bound(self) -> float:
        """sum |c_ij| (i + j): a sup bound for |grad p| on the closed bidisc."""
        i = np.arange(self.coeffs.shape[0])[:, None]
        j = np.arange(self.coeffs.shape[1])[None, :]
        return float(np.sum(np.abs(self.coeffs) * (i + j)))


def eval_poly(p: BivariatePoly, z1, z2):
    """Evaluate p at scalars or numpy arrays (broadcasting), by Horner."""
    z1 = np.asarray(z1, dtype=np.complex128)
    z2 = np.asarray(z2, dtype=np.complex128)
    acc = np.zeros(np.broadcast(z1, z2).shape, dtype=np.complex128)
    for row in p.coeffs[::-1]:
        inner = np.zeros_like(acc)
        for c in row[::-1]:
            inner = inner * z2 + c
        acc = acc * z1 + inner
    if acc.shape == ():
        return complex(acc)
    return acc


def eval_poly_matrix(p: BivariatePoly, pair: CommutingPair) -> np.ndarray:
    """p(T1, T2) via cached powers; order is irrelevant since the pair commutes."""
    n = pair.dim
    deg1, deg2 = p.degrees
    t2_pows = [np.eye(n, dtype=np.complex128)]
    for _ in range(deg2):
        t2_pows.append(t2_pows[-1] @ pair.t2.matrix)
    out = np.zeros((n, n), dtype=np.complex128)
    t1_pow = np.eye(n, dtype=np.complex128)
    for i in range(deg1 + 1):
        inner = np.zeros((n, n), dtype=np.complex128)
        for jj in range(deg2 + 1):
            c = p.coeffs[i, jj]
            if c != 0:
                inner = inner + c * t2_pows[jj]
        out = out + t1_pow @ inner
        if i < deg1:
            t1_pow = t1_pow @ pair.t1.matrix
    return out


def random_bivariate_poly(seed: int, max_degree: int = 4) -> BivariatePoly:
    """Random polynomial with independent unit-disc-uniform coefficients."""
    rng = np.random.default_rng(seed)
    shape = (max_degree + 1, max_degree + 1)
    radius = np.sqrt(rng.uniform(size=shape))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=shape)
    return BivariatePoly(radius * np.exp(1j * angle))


# ------------------------------------------------------------- von Neumann

@dataclass(frozen=True)
class VNReport:
    """One polynomial's von Neumann comparison on the sampled variety."""

    lhs: float
    rhs: float
    verdict: str
    slack: float
    grid_bound: float
    grid: VarietyGrid
    note: str


def von_neumann_check(
    pair: CommutingPair,
    triple: BCLTriple,
    poly: BivariatePoly,
    grid: VarietyGrid | None = None,
    vn_slack: float = VN_SLACK,
    tol: Tolerances = DEFAULT_TOL,
    sample: VarietySample | None = None,
) -> VNReport:
    """Compare ||p(T1, T2)|| with the sampled sup of |p| over the variety.

    PASS when lhs <= rhs + vn_slack. When lhs exceeds that but stays within
    the additional coefficient-based grid bound (gradient sup times grid
    spacing), the verdict is INCONCLUSIVE with a refinement hint, so a coarse
    grid can never manufacture a FAIL. The supremum is sampled on
    |w| <= boundary_radius; the closure gap up to the torus is noted, not
    covered.
    """
    if sample is None:
        sample = sample_variety(triple, grid, tol)
    grid = sample.grid
    lhs = linalg.operator_norm(eval_poly_matrix(poly, pair))
    if not sample.points:
        return VNReport(
            lhs=lhs,
            rhs=0.0,
            verdict=INCONCLUSIVE,
            slack=vn_slack,
            grid_bound=0.0,
            grid=grid,
            note="empty variety sample; nothing to compare against",
        )
    z1 = np.array([p.z1 for p in sample.points])
    z2 = np.array([p.z2 for p in sample.points])
    rhs = float(np.max(np.abs(eval_poly(poly, z1, z2))))
    grid_bound = 2.0 * poly.gradient_bound() * grid.spacing()
    note = (
        f"supremum sampled on |w| <= {sample.boundary_radius}; the closure "
        "gap up to the torus is not covered"
    )
    if lhs <= rhs + vn_slack:
        verdict = PASS
    elif lhs <= rhs + vn_slack + grid_bound:
        verdict = INCONCLUSIVE
        note += "; within the grid bound, refine the grid to resolve"
    else:
        verdict = FAIL
    return VNReport(
        lhs=lhs,
        rhs=rhs,
        verdict=verdict,
        slack=vn_slack,
        grid_bound=grid_bound,
        grid=grid,
        note=note,
    )
