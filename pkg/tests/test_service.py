"""Endpoint behavior of the HTTP facade."""
from __future__ import annotations

import numpy as np
import pytest
from fastapi.testclient import TestClient

from dilab import __version__
from dilab.schemas import CMat
from dilab.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def cmat(m) -> dict:
    return CMat.from_array(np.asarray(m, dtype=np.complex128)).model_dump()


def gen_pair(client, **kwargs) -> dict:
    resp = client.post("/gen", json=kwargs)
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "ok"
    return body["pair"]


class TestHealthAndGen:
    def test_health(self, client) -> None:
        resp = client.get("/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "version": __version__}

    def test_gen_random_deterministic(self, client) -> None:
        one = client.post("/gen", json={"seed": 3, "dim": 3})
        two = client.post("/gen", json={"seed": 3, "dim": 3})
        assert one.status_code == 200
        assert one.content == two.content
        body = one.json()
        assert body["status"] == "ok"
        assert body["dim"] == 3
        assert body["pair"]["t1"]["rows"] == 3
        assert body["commutator_residual"] <= 1e-10

    def test_gen_shift(self, client) -> None:
        pair = gen_pair(client, kind="shift", n=3, a=1, b=2)
        t1 = CMat.model_validate(pair["t1"]).to_array()
        assert t1.shape == (3, 3)

    def test_gen_shift_bad_powers_is_gate_failure(self, client) -> None:
        resp = client.post("/gen", json={"kind": "shift", "n": 3, "a": 5, "b": 1})
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "gate_failure"
        assert "pair" not in body

    def test_gen_validation_error(self, client) -> None:
        resp = client.post("/gen", json={"kind": "bogus"})
        assert resp.status_code == 422


class TestCertify:
    def test_ok_flow(self, client) -> None:
        pair = gen_pair(client, seed=7, dim=4)
        resp = client.post("/certify", json={"pair": pair})
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["cert_t1"]["verdict"] == "Pure"
        assert body["cert_t2"]["verdict"] == "Pure"
        assert body["cert_product"]["verdict"] == "Pure"
        assert body["cnu_t1"] and body["cnu_t2"]
        assert body["cnc_t1"] and body["cnc_t2"]
        tri = body["triple"]
        assert tri["e_dim"] == tri["d1"] + tri["d2"]
        assert body["relations_residual"] <= 1e-8
        assert body["recurrence_residual"] <= 1e-8
        assert body["symbol_product_residual"] <= 1e-8
        assert body["defect_identity_residual"] <= 1e-8
        assert body["cert_a"]["verdict"] == "Pure"
        assert body["cert_dstar"]["verdict"] == "Pure"
        assert body["wandering_phi"] and body["wandering_psi"]

    def test_identity_pair_fails_gate_with_certificates(self, client) -> None:
        eye = cmat(np.eye(2))
        resp = client.post("/certify", json={"pair": {"t1": eye, "t2": eye}})
        body = resp.json()
        assert body["status"] == "gate_failure"
        assert "t1" in body["detail"] and "t2" in body["detail"]
        assert body["cert_t1"]["verdict"] == "NotPure"
        assert "triple" not in body

    def test_noncommuting_rejected(self, client) -> None:
        t1 = cmat([[0.0, 0.5], [0.0, 0.0]])
        t2 = cmat([[0.0, 0.0], [0.5, 0.0]])
        resp = client.post("/certify", json={"pair": {"t1": t1, "t2": t2}})
        body = resp.json()
        assert body["status"] == "gate_failure"
        assert "cert_t1" not in body

    def test_expansion_rejected(self, client) -> None:
        big = cmat(2.0 * np.eye(2))
        resp = client.post("/certify", json={"pair": {"t1": big, "t2": big}})
        assert resp.json()["status"] == "gate_failure"


class TestDilate:
    def test_ok_flow(self, client) -> None:
        pair = gen_pair(client, seed=2, dim=3)
        resp = client.post("/dilate", json={"pair": pair, "degree": 4})
        body = resp.json()
        assert body["status"] == "ok"
        assert body["degree"] == 4
        assert body["total_dim"] == 5 * body["fiber_dim"]
        assert body["max_residual"] <= 1e-8
        assert body["minimal"] is True
        assert body["minimality_ranks"] == body["minimality_expected"]
        assert body["compression_phi"]["verdict"] == "Pure"
        assert body["compression_psi"]["verdict"] == "Pure"
        assert "pi_v" not in body

    def test_matrices_on_request(self, client) -> None:
        pair = gen_pair(client, seed=2, dim=3)
        resp = client.post(
            "/dilate", json={"pair": pair, "degree": 3, "include_matrices": True}
        )
        body = resp.json()
        assert body["status"] == "ok"
        pi = CMat.model_validate(body["pi_v"])
        assert pi.rows == body["total_dim"]
        assert pi.cols == 3
        for key in ("m_phi", "m_psi", "m_z"):
            m = CMat.model_validate(body[key])
            assert m.rows == m.cols == body["total_dim"]

    def test_triple_roundtrip_and_corruption(self, client) -> None:
        pair = gen_pair(client, seed=9, dim=3)
        tri = client.post("/certify", json={"pair": pair}).json()["triple"]
        ok = client.post("/dilate", json={"pair": pair, "triple": tri, "degree": 3})
        assert ok.json()["status"] == "ok"
        bad = dict(tri)
        u = CMat.model_validate(tri["u"]).to_array()
        u = u + 0.05
        bad["u"] = cmat(u)
        resp = client.post("/dilate", json={"pair": pair, "triple": bad, "degree": 3})
        assert resp.json()["status"] == "gate_failure"

    def test_unmeetable_residual_tol_trips_match_gate(self, client) -> None:
        pair = gen_pair(client, seed=2, dim=3)
        resp = client.post(
            "/dilate",
            json={"pair": pair, "degree": 4, "tolerances": {"residual_tol": 1e-30}},
        )
        body = resp.json()
        assert body["status"] == "gate_failure"
        assert "commutator" in body["detail"]


class TestVariety:
    def test_from_pair(self, client) -> None:
        pair = gen_pair(client, seed=4, dim=3)
        resp = client.post("/variety", json={"pair": pair, "n_radii": 6, "angles": 12})
        body = resp.json()
        assert body["status"] == "ok"
        assert body["points"]
        assert body["distinguished"] is True
        assert body["cross_ok"] is True
        assert body["cross_count"] == len(body["points"])
        p = body["points"][0]
        w = complex(p["w_re"], p["w_im"])
        z1 = complex(p["z1_re"], p["z1_im"])
        z2 = complex(p["z2_re"], p["z2_im"])
        assert abs(z1 * z2 - w) <= 1e-9

    def test_triple_only(self, client) -> None:
        swap = {
            "e_dim": 2,
            "d1": 1,
            "d2": 1,
            "u": cmat([[0.0, 1.0], [1.0, 0.0]]),
            "p": cmat([[0.0, 0.0], [0.0, 1.0]]),
        }
        resp = client.post("/variety", json={"triple": swap, "n_radii": 4, "angles": 8})
        body = resp.json()
        assert body["status"] == "ok"
        assert body["distinguished"] is True

    def test_impure_pair_gates_but_still_samples(self, client) -> None:
        t1 = cmat(np.diag([1.0, 0.5]))
        t2 = cmat(np.diag([0.5, 0.5]))
        resp = client.post(
            "/variety", json={"pair": {"t1": t1, "t2": t2}, "n_radii": 3, "angles": 4}
        )
        body = resp.json()
        assert body["status"] == "gate_failure"
        assert "t1" in body["detail"]
        assert body["points"]

    def test_mismatched_triple_rejected(self, client) -> None:
        pair = gen_pair(client, seed=4, dim=3)
        other = gen_pair(client, seed=5, dim=3)
        tri = client.post("/certify", json={"pair": other}).json()["triple"]
        resp = client.post("/variety", json={"pair": pair, "triple": tri})
        assert resp.json()["status"] == "gate_failure"

    def test_needs_a_source(self, client) -> None:
        resp = client.post("/variety", json={"n_radii": 4, "angles": 8})
        assert resp.status_code == 422

    def test_degraded_rank_tol_is_numerical_failure(self, client) -> None:
        pair = gen_pair(client, seed=4, dim=3)
        resp = client.post(
            "/variety",
            json={
                "pair": pair,
                "n_radii": 4,
                "angles": 8,
                "tolerances": {"rank_tol": 0.5},
            },
        )
        body = resp.json()
        assert body["status"] == "numerical_failure"
        assert body["detail"]
        assert "points" not in body


class TestVNCheck:
    def test_coordinate_poly_passes(self, client) -> None:
        pair = gen_pair(client, kind="shift", n=2, a=1, b=1)
        resp = client.post(
            "/vncheck", json={"pair": pair, "coeffs": [[[0.0, 0.0]], [[1.0, 0.0]]]}
        )
        body = resp.json()
        assert body["status"] == "ok"
        assert body["verdict"] == "PASS"
        assert abs(body["lhs"] - 1.0) <= 1e-12
        assert body["lhs"] - body["rhs"] < body["slack"]

    def test_impure_pair_gated(self, client) -> None:
        eye = cmat(np.eye(2))
        resp = client.post(
            "/vncheck",
            json={"pair": {"t1": eye, "t2": eye}, "coeffs": [[[1.0, 0.0]]]},
        )
        body = resp.json()
        assert body["status"] == "gate_failure"
        assert "lhs" not in body

    def test_ragged_coeffs_rejected(self, client) -> None:
        pair = gen_pair(client, kind="shift", n=2, a=1, b=1)
        resp = client.post(
            "/vncheck",
            json={"pair": pair, "coeffs": [[[0.0, 0.0]], [[1.0, 0.0], [2.0, 0.0]]]},
        )
        assert resp.status_code == 422

    def test_deterministic(self, client) -> None:
        pair = gen_pair(client, seed=6, dim=3)
        req = {"pair": pair, "coeffs": [[[0.5, 0.0], [0.0, 1.0]]], "n_radii": 4, "angles": 8}
        one = client.post("/vncheck", json=req)
        two = client.post("/vncheck", json=req)
        assert one.content == two.content
        assert one.json()["verdict"] == "PASS"
