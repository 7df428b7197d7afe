"""HTTP facade over the laboratory core.

Every endpoint is a pure request/response computation: no state, no files,
no timestamps, so identical requests produce identical responses. Failures
are reported inside the envelope rather than as transport errors: the
status field is "ok", "gate_failure" (an input violated a mathematical
hypothesis) or "numerical_failure" (a residual or verdict came out bad).
"""
from __future__ import annotations

from fastapi import FastAPI

from . import __version__
from .bcl import (
    bcl_symbols,
    block_decomposition,
    build_complete_bcl_triple,
    certify_bcl_pure,
    certify_cnc_blocks,
    symbol_product_residual,
    verify_recurrence,
    verify_unitary_relations,
    wandering_check_symbols,
)
from .contraction import (
    certify_cnc,
    certify_cnu,
    certify_pure,
    check_defect_identities,
    make_commuting_pair,
    random_commuting_pure_pair,
    truncated_shift_pair,
)
from .errors import (
    CodimensionMismatch,
    EigenFailure,
    ExtensionFailure,
    HypothesisViolated,
    InvalidPowers,
    NearSingularResolvent,
    NotCommuting,
    NotContraction,
    NotHermitian,
    NotIsometric,
    NotPSD,
    NotPure,
    TripleMismatch,
)
from .hardy import compression_purity_check, dilation_map_pair, minimality_check
from .schemas import (
    STATUS_GATE,
    STATUS_NUMERICAL,
    STATUS_OK,
    CertifyRequest,
    CertifyResponse,
    CMat,
    DilateRequest,
    DilateResponse,
    GenRequest,
    GenResponse,
    Grid,
    Pair,
    Point,
    PurityCert,
    Triple,
    VarietyRequest,
    VarietyResponse,
    VNRequest,
    VNResponse,
)
from .variety import (
    FAIL,
    BivariatePoly,
    cross_validate_varieties,
    disc_grid,
    sample_variety,
    von_neumann_check,
)

GATE_ERRORS = (
    NotPure,
    NotContraction,
    NotCommuting,
    HypothesisViolated,
    InvalidPowers,
    TripleMismatch,
    ValueError,
)
NUMERICAL_ERRORS = (
    NearSingularResolvent,
    EigenFailure,
    ExtensionFailure,
    NotIsometric,
    CodimensionMismatch,
    NotPSD,
    NotHermitian,
)

app = FastAPI(title="dilab", version=__version__)


def _status_of(exc: Exception) -> str | None:
    if isinstance(exc, NUMERICAL_ERRORS):
        return STATUS_NUMERICAL
    if isinstance(exc, GATE_ERRORS):
        return STATUS_GATE
    return None


@app.get("/health")
def health() -> dict:
    return {"status": STATUS_OK, "version": __version__}


@app.post("/gen", response_model=GenResponse, response_model_exclude_none=True)
def gen(req: GenRequest) -> GenResponse:
    try:
        if req.kind == "shift":
            pair = truncated_shift_pair(req.n, req.a, req.b)
        else:
            pair = random_commuting_pure_pair(req.seed, req.dim, req.shrink)
    except Exception as exc:
        status = _status_of(exc)
        if status is None:
            raise
        return GenResponse(status=status, detail=str(exc))
    return GenResponse(
        status=STATUS_OK,
        pair=Pair(
            t1=CMat.from_array(pair.t1.matrix), t2=CMat.from_array(pair.t2.matrix)
        ),
        dim=pair.dim,
        commutator_residual=pair.commutator_residual,
    )


@app.post("/certify", response_model=CertifyResponse, response_model_exclude_none=True)
def certify(req: CertifyRequest) -> CertifyResponse:
    tol = req.tolerances.resolve()
    try:
        pair = make_commuting_pair(req.pair.t1.to_array(), req.pair.t2.to_array(), tol)
    except Exception as exc:
        status = _status_of(exc)
        if status is None:
            raise
        return CertifyResponse(status=status, detail=str(exc))
    cert_t1 = certify_pure(pair.t1, tol=tol)
    cert_t2 = certify_pure(pair.t2, tol=tol)
    cert_product = certify_pure(pair.product, tol=tol)
    base = dict(
        commutator_residual=pair.commutator_residual,
        cert_t1=PurityCert.from_certificate(cert_t1),
        cert_t2=PurityCert.from_certificate(cert_t2),
        cert_product=PurityCert.from_certificate(cert_product),
        cnc_t1=certify_cnc(pair.t1, tol),
        cnc_t2=certify_cnc(pair.t2, tol),
        cnu_t1=certify_cnu(pair.t1, tol),
        cnu_t2=certify_cnu(pair.t2, tol),
        defect_identity_residual=check_defect_identities(pair).max_residual,
    )
    failed = [
        name
        for name, cert in (("t1", cert_t1), ("t2", cert_t2))
        if not cert.is_pure
    ]
    if failed:
        return CertifyResponse(
            status=STATUS_GATE,
            detail="purity gate failed for: " + ", ".join(failed),
            **base,
        )
    try:
        triple = build_complete_bcl_triple(pair, tol)
        relations = verify_unitary_relations(triple, pair).max_residual
        recurrence = verify_recurrence(triple, pair).max_residual
        phi, psi = bcl_symbols(triple)
        sym_res = symbol_product_residual(phi, psi)
        cert_a, cert_dstar = certify_bcl_pure(triple, tol=tol)
        cnc_a, cnc_dstar = certify_cnc_blocks(triple, tol)
        wandering_phi, wandering_psi = wandering_check_symbols(triple, tol)
    except Exception as exc:
        status = _status_of(exc)
        if status is None:
            raise
        return CertifyResponse(status=status, detail=str(exc), **base)
    worst = max(relations, recurrence, sym_res)
    status = STATUS_OK
    detail = None
    if worst > tol.residual_tol:
        status = STATUS_NUMERICAL
        detail = (
            f"triple residual {worst:.3e} exceeds {tol.residual_tol:.1e}"
        )
    return CertifyResponse(
        status=status,
        detail=detail,
        triple=Triple.from_triple(triple),
        relations_residual=relations,
        recurrence_residual=recurrence,
        symbol_product_residual=sym_res,
        cert_a=PurityCert.from_certificate(cert_a),
        cert_dstar=PurityCert.from_certificate(cert_dstar),
        cnc_a=cnc_a,
        cnc_dstar=cnc_dstar,
        wandering_phi=wandering_phi,
        wandering_psi=wandering_psi,
        **base,
    )


@app.post("/dilate", response_model=DilateResponse, response_model_exclude_none=True)
def dilate(req: DilateRequest) -> DilateResponse:
    tol = req.tolerances.resolve()
    try:
        pair = make_commuting_pair(req.pair.t1.to_array(), req.pair.t2.to_array(), tol)
        if req.triple is not None:
            triple = req.triple.to_triple()
            triple.validate(tol)
        else:
            triple = build_complete_bcl_triple(pair, tol)
        pkg = dilation_map_pair(pair, triple, req.degree, tol)
        minrep = minimality_check(pair.product, req.degree, tol)
        phi, psi = bcl_symbols(triple)
        comp_phi = compression_purity_check(phi, req.degree, tol=tol)
        comp_psi = compression_purity_check(psi, req.degree, tol=tol)
    except Exception as exc:
        status = _status_of(exc)
        if status is None:
            raise
        return DilateResponse(status=status, detail=str(exc))
    status = STATUS_OK
    detail = None
    if pkg.residuals.max_residual > tol.residual_tol:
        status = STATUS_NUMERICAL
        detail = (
            f"dilation residual {pkg.residuals.max_residual:.3e} exceeds "
            f"{tol.residual_tol:.1e}"
        )
    elif not minrep.minimal:
        status = STATUS_NUMERICAL
        detail = "dilation is not minimal at the sampled truncations"
    out = DilateResponse(
        status=status,
        detail=detail,
        degree=pkg.space.degree,
        fiber_dim=pkg.space.fiber_dim,
        total_dim=pkg.space.total_dim,
        intertwine_z=pkg.residuals.intertwine_z,
        intertwine_phi=pkg.residuals.intertwine_phi,
        intertwine_psi=pkg.residuals.intertwine_psi,
        isometry_defect=pkg.residuals.isometry_defect,
        symbol_product=pkg.residuals.symbol_product,
        max_residual=pkg.residuals.max_residual,
        minimal=minrep.minimal,
        minimality_ranks=list(minrep.ranks),
        minimality_expected=list(minrep.expected),
        compression_phi=PurityCert.from_certificate(comp_phi),
        compression_psi=PurityCert.from_certificate(comp_psi),
    )
    if req.include_matrices:
        out = out.model_copy(
            update=dict(
                pi_v=CMat.from_array(pkg.pi_v),
                m_phi=CMat.from_array(pkg.m_phi),
                m_psi=CMat.from_array(pkg.m_psi),
                m_z=CMat.from_array(pkg.m_z),
            )
        )
    return out


@app.post("/variety", response_model=VarietyResponse, response_model_exclude_none=True)
def variety(req: VarietyRequest) -> VarietyResponse:
    tol = req.tolerances.resolve()
    gate_detail = None
    try:
        if req.pair is not None:
            pair = make_commuting_pair(
                req.pair.t1.to_array(), req.pair.t2.to_array(), tol
            )
            impure = [
                name
                for name, t in (("t1", pair.t1), ("t2", pair.t2))
                if not certify_pure(t, tol=tol).is_pure
            ]
            if impure:
                gate_detail = "purity gate failed for: " + ", ".join(impure)
            if req.triple is not None:
                triple = req.triple.to_triple()
                triple.validate(tol)
                rel = verify_unitary_relations(triple, pair).max_residual
                if rel > tol.residual_tol:
                    raise TripleMismatch(
                        f"triple does not match pair: relations residual {rel:.3e}"
                    )
            else:
                triple = build_complete_bcl_triple(pair, tol)
        else:
            triple = req.triple.to_triple()
            triple.validate(tol)
        grid = disc_grid(req.n_radii, req.angles)
        sample = sample_variety(triple, grid, tol)
        sample, cross = cross_validate_varieties(sample, block_decomposition(triple), tol)
    except Exception as exc:
        status = _status_of(exc)
        if status is None:
            raise
        return VarietyResponse(status=status, detail=str(exc))
    if gate_detail is not None:
        status, detail = STATUS_GATE, gate_detail
    elif not cross.ok:
        status = STATUS_NUMERICAL
        if cross.count == 0:
            detail = "no interior points available for cross-validation"
        else:
            detail = (
                f"cross-validation residual {cross.max_residual:.3e} exceeds "
                f"{cross.threshold:.1e}"
            )
    else:
        status, detail = STATUS_OK, None
    return VarietyResponse(
        status=status,
        detail=detail,
        grid=Grid.from_grid(sample.grid),
        points=[Point.from_point(p) for p in sample.points],
        distinguished=sample.distinguished,
        boundary_radius=sample.boundary_radius,
        cross_max_residual=cross.max_residual,
        cross_mean_residual=cross.mean_residual,
        cross_count=cross.count,
        cross_ok=cross.ok,
    )


@app.post("/vncheck", response_model=VNResponse, response_model_exclude_none=True)
def vncheck(req: VNRequest) -> VNResponse:
    tol = req.tolerances.resolve()
    try:
        pair = make_commuting_pair(req.pair.t1.to_array(), req.pair.t2.to_array(), tol)
        impure = [
            name
            for name, t in (("t1", pair.t1), ("t2", pair.t2))
            if not certify_pure(t, tol=tol).is_pure
        ]
        if impure:
            return VNResponse(
                status=STATUS_GATE,
                detail="purity gate failed for: " + ", ".join(impure),
            )
        if req.triple is not None:
            triple = req.triple.to_triple()
            triple.validate(tol)
            rel = verify_unitary_relations(triple, pair).max_residual
            if rel > tol.residual_tol:
                raise TripleMismatch(
                    f"triple does not match pair: relations residual {rel:.3e}"
                )
        else:
            triple = build_complete_bcl_triple(pair, tol)
        poly = BivariatePoly(req.coeff_array())
        grid = disc_grid(req.n_radii, req.angles)
        report = von_neumann_check(
            pair, triple, poly, grid=grid, vn_slack=req.vn_slack, tol=tol
        )
    except Exception as exc:
        status = _status_of(exc)
        if status is None:
            raise
        return VNResponse(status=status, detail=str(exc))
    status = STATUS_OK
    detail = None
    if report.verdict == FAIL:
        status = STATUS_NUMERICAL
        detail = "operator norm exceeds the sampled supremum beyond the grid bound"
    return VNResponse(
        status=status,
        detail=detail,
        lhs=report.lhs,
        rhs=report.rhs,
        verdict=report.verdict,
        slack=report.slack,
        grid_bound=report.grid_bound,
        grid=Grid.from_grid(report.grid),
        note=report.note,
    )
