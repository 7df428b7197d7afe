"""JSON models shared by the HTTP service and the command line client.

Complex matrices travel as row-major lists of [re, im] pairs so every file
and response is plain JSON with full double precision and no custom types.
"""
from __future__ import annotations

import dataclasses

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .bcl import BCLTriple
from .contraction import PurityCertificate
from .linalg import DEFAULT_TOL, Tolerances
from .variety import VarietyGrid, VarietyPoint

STATUS_OK = "ok"
STATUS_GATE = "gate_failure"
STATUS_NUMERICAL = "numerical_failure"


class CMat(BaseModel):
    """Dense complex matrix; data holds rows*cols entries, row-major."""

    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    data: list[tuple[float, float]]

    @model_validator(mode="after")
    def _sized(self) -> "CMat":
        if len(self.data) != self.rows * self.cols:
            raise ValueError("data length must equal rows * cols")
        return self

    @classmethod
    def from_array(cls, m: np.ndarray) -> "CMat":
        m = np.asarray(m, dtype=np.complex128)
        if m.ndim != 2:
            raise ValueError("expected a 2-D array")
        flat = m.reshape(-1)
        return cls(
            rows=int(m.shape[0]),
            cols=int(m.shape[1]),
            data=[(float(v.real), float(v.imag)) for v in flat],
        )

    def to_array(self) -> np.ndarray:
        arr = np.array(
            [complex(re, im) for re, im in self.data], dtype=np.complex128
        )
        return arr.reshape(self.rows, self.cols)


class Pair(BaseModel):
    t1: CMat
    t2: CMat


class Triple(BaseModel):
    e_dim: int = Field(ge=0)
    d1: int = Field(ge=0)
    d2: int = Field(ge=0)
    u: CMat
    p: CMat

    @classmethod
    def from_triple(cls, t: BCLTriple) -> "Triple":
        return cls(
            e_dim=t.e_dim,
            d1=t.d1,
            d2=t.d2,
            u=CMat.from_array(t.u),
            p=CMat.from_array(t.p),
        )

    def to_triple(self) -> BCLTriple:
        return BCLTriple(
            e_dim=self.e_dim,
            d1=self.d1,
            d2=self.d2,
            u=self.u.to_array(),
            p=self.p.to_array(),
        )


class ToleranceOverrides(BaseModel):
    """Optional per-request tolerance replacements; None keeps the default."""

    rank_tol: float | None = Field(default=None, gt=0)
    residual_tol: float | None = Field(default=None, gt=0)
    purity_margin: float | None = Field(default=None, gt=0)

    def resolve(self) -> Tolerances:
        changes = {
            k: v
            for k, v in (
                ("rank_tol", self.rank_tol),
                ("residual_tol", self.residual_tol),
                ("purity_margin", self.purity_margin),
            )
            if v is not None
        }
        return dataclasses.replace(DEFAULT_TOL, **changes) if changes else DEFAULT_TOL


class PurityCert(BaseModel):
    spectral_radius: float
    decay: list[float]
    verdict: str
    margin: float

    @classmethod
    def from_certificate(cls, c: PurityCertificate) -> "PurityCert":
        return cls(
            spectral_radius=c.spectral_radius,
            decay=list(c.decay),
            verdict=c.verdict,
            margin=c.margin,
        )


class Grid(BaseModel):
    radii: list[float]
    angles: int

    @classmethod
    def from_grid(cls, g: VarietyGrid) -> "Grid":
        return cls(radii=list(g.radii), angles=g.angles)


class Point(BaseModel):
    w_re: float
    w_im: float
    z1_re: float
    z1_im: float
    z2_re: float
    z2_im: float
    res_phi: float | None = None
    res_psi: float | None = None
    res_tau: float | None = None

    @classmethod
    def from_point(cls, p: VarietyPoint) -> "Point":
        return cls(
            w_re=p.w.real,
            w_im=p.w.imag,
            z1_re=p.z1.real,
            z1_im=p.z1.imag,
            z2_re=p.z2.real,
            z2_im=p.z2.imag,
            res_phi=p.res_phi,
            res_psi=p.res_psi,
            res_tau=p.res_tau,
        )


# ------------------------------------------------------------------ requests

class GenRequest(BaseModel):
    kind: str = Field(default="random", pattern="^(random|shift)$")
    seed: int = 0
    dim: int = Field(default=4, ge=1, le=64)
    shrink: float = Field(default=0.9, gt=0, le=1)
    n: int = Field(default=4, ge=2, le=64)
    a: int = Field(default=1, ge=1)
    b: int = Field(default=2, ge=1)


class CertifyRequest(BaseModel):
    pair: Pair
    tolerances: ToleranceOverrides = ToleranceOverrides()


class DilateRequest(BaseModel):
    pair: Pair
    triple: Triple | None = None
    degree: int = Field(default=8, ge=0, le=512)
    include_matrices: bool = False
    tolerances: ToleranceOverrides = ToleranceOverrides()


class VarietyRequest(BaseModel):
    pair: Pair | None = None
    triple: Triple | None = None
    n_radii: int = Field(default=16, ge=1, le=512)
    angles: int = Field(default=64, ge=1, le=4096)
    tolerances: ToleranceOverrides = ToleranceOverrides()

    @model_validator(mode="after")
    def _has_source(self) -> "VarietyRequest":
        if self.pair is None and self.triple is None:
            raise ValueError("provide a pair, a triple, or both")
        return self


class VNRequest(BaseModel):
    pair: Pair
    triple: Triple | None = None
    coeffs: list[list[tuple[float, float]]]
    n_radii: int = Field(default=16, ge=1, le=512)
    angles: int = Field(default=64, ge=1, le=4096)
    vn_slack: float = Field(default=1e-3, gt=0)
    tolerances: ToleranceOverrides = ToleranceOverrides()

    @model_validator(mode="after")
    def _rectangular(self) -> "VNRequest":
        if not self.coeffs or not self.coeffs[0]:
            raise ValueError("coefficient grid must be non-empty")
        width = len(self.coeffs[0])
        if any(len(row) != width for row in self.coeffs):
            raise ValueError("coefficient rows must have equal length")
        return self

    def coeff_array(self) -> np.ndarray:
        return np.array(
            [[complex(re, im) for re, im in row] for row in self.coeffs],
            dtype=np.complex128,
        )


# ----------------------------------------------------------------- responses

class GenResponse(BaseModel):
    status: str
    detail: str | None = None
    pair: Pair | None = None
    dim: int | None = None
    commutator_residual: float | None = None


class CertifyResponse(BaseModel):
    status: str
    detail: str | None = None
    commutator_residual: float | None = None
    cert_t1: PurityCert | None = None
    cert_t2: PurityCert | None = None
    cert_product: PurityCert | None = None
    cnc_t1: bool | None = None
    cnc_t2: bool | None = None
    cnu_t1: bool | None = None
    cnu_t2: bool | None = None
    defect_identity_residual: float | None = None
    triple: Triple | None = None
    relations_residual: float | None = None
    recurrence_residual: float | None = None
    symbol_product_residual: float | None = None
    cert_a: PurityCert | None = None
    cert_dstar: PurityCert | None = None
    cnc_a: bool | None = None
    cnc_dstar: bool | None = None
    wandering_phi: bool | None = None
    wandering_psi: bool | None = None


class DilateResponse(BaseModel):
    status: str
    detail: str | None = None
    degree: int | None = None
    fiber_dim: int | None = None
    total_dim: int | None = None
    intertwine_z: float | None = None
    intertwine_phi: float | None = None
    intertwine_psi: float | None = None
    isometry_defect: float | None = None
    symbol_product: float | None = None
    max_residual: float | None = None
    minimal: bool | None = None
    minimality_ranks: list[int] | None = None
    minimality_expected: list[int] | None = None
    compression_phi: PurityCert | None = None
    compression_psi: PurityCert | None = None
    pi_v: CMat | None = None
    m_phi: CMat | None = None
    m_psi: CMat | None = None
    m_z: CMat | None = None


class VarietyResponse(BaseModel):
    status: str
    detail: str | None = None
    grid: Grid | None = None
    points: list[Point] | None = None
    distinguished: bool | None = None
    boundary_radius: float | None = None
    cross_max_residual: float | None = None
    cross_mean_residual: float | None = None
    cross_count: int | None = None
    cross_ok: bool | None = None


class VNResponse(BaseModel):
    status: str
    detail: str | None = None
    lhs: float | None = None
    rhs: float | None = None
    verdict: str | None = None
    slack: float | None = None
    grid_bound: float | None = None
    grid: Grid | None = None
    note: str | None = None
