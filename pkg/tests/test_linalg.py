from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from dilab import linalg
from dilab.errors import CodimensionMismatch, NotHermitian, NotIsometric, NotPSD
from util import complex_matrix, haar_unitary, random_subspace

seeds = st.integers(min_value=0, max_value=10_000)
dims = st.integers(min_value=1, max_value=8)


# ---------------------------------------------------------------- hermitian_sqrt

def test_hermitian_sqrt_frozen_2x2():
    # Eigenvalues 1 and 3; entries (sqrt3 +- 1)/2, see tests/oracles.
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    r = linalg.hermitian_sqrt(m)
    expected = np.array(
        [
            [1.3660254037844386, 0.3660254037844386],
            [0.3660254037844386, 1.3660254037844386],
        ]
    )
    assert_allclose(r, expected, atol=1e-12)


@settings(deadline=None, max_examples=60)
@given(seed=seeds, n=dims)
def test_hermitian_sqrt_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    b = complex_matrix(rng, n, n)
    m = b.conj().T @ b
    r = linalg.hermitian_sqrt(m)
    assert linalg.operator_norm(r - r.conj().T) <= 1e-12
    assert np.min(np.linalg.eigvalsh((r + r.conj().T) / 2)) >= -1e-10
    assert linalg.operator_norm(r @ r - m) <= linalg.RESIDUAL_TOL * max(
        1.0, linalg.operator_norm(m)
    )


def test_hermitian_sqrt_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        linalg.hermitian_sqrt(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_sqrt_rejects_indefinite():
    with pytest.raises(NotPSD):
        linalg.hermitian_sqrt(np.diag([1.0, -1.0]))


def test_hermitian_sqrt_clips_tiny_negatives():
    r = linalg.hermitian_sqrt(np.diag([1.0, -1e-12]))
    assert_allclose(r, np.diag([1.0, 0.0]), atol=1e-12)


def test_hermitian_sqrt_zero_and_empty():
    assert_allclose(linalg.hermitian_sqrt(np.zeros((3, 3))), np.zeros((3, 3)))
    assert linalg.hermitian_sqrt(np.zeros((0, 0))).shape == (0, 0)


# ------------------------------------------------------------ range / kernel

def test_range_and_kernel_frozen():
    m = np.array([[1.0, 0.0], [0.0, 0.0]])
    ran = linalg.range_basis(m)
    ker = linalg.kernel_basis(m)
    assert ran.dim == 1 and ker.dim == 1
    assert_allclose(ran.basis, np.array([[1.0], [0.0]]), atol=1e-14)
    assert_allclose(ker.basis, np.array([[0.0], [1.0]]), atol=1e-14)


def test_zero_matrix_spaces():
    m = np.zeros((3, 4))
    assert linalg.range_basis(m).dim == 0
    ker = linalg.kernel_basis(m)
    assert ker.dim == 4
    assert_allclose(ker.basis, np.eye(4), atol=1e-14)


@settings(deadline=None, max_examples=60)
@given(seed=seeds, rows=dims, cols=dims, cut=st.integers(min_value=0, max_value=8))
def test_rank_nullity_and_orthonormality(seed, rows, cols, cut):
    rng = np.random.default_rng(seed)
    m = complex_matrix(rng, rows, cols)
    r = min(rows, cols, cut)
    if r < min(rows, cols):
        # project to a rank-r matrix so rank decisions get exercised off the
        # generic full-rank case
        u, s, vh = np.linalg.svd(m)
        m = (u[:, :r] * s[:r]) @ vh[:r]
    ran = linalg.range_basis(m)
    ker = linalg.kernel_basis(m)
    assert ran.dim + ker.dim == cols
    assert ran.dim == linalg.range_basis(m.conj().T).dim
    assert ran.orthonormality_residual() <= 1e-10
    assert ker.orthonormality_residual() <= 1e-10
    # the kernel really annihilates: ||M K|| small relative to sigma_max
    scale = max(1.0, linalg.operator_norm(m))
    assert linalg.operator_norm(m @ ker.basis) <= 1e-8 * scale
    # range projector reproduces the columns
    assert linalg.operator_norm(ran.projector() @ m - m) <= 1e-8 * scale


@settings(deadline=None, max_examples=40)
@given(seed=seeds, rows=dims, cols=dims)
def test_basis_determinism_and_phase(seed, rows, cols):
    rng = np.random.default_rng(seed)
    m = complex_matrix(rng, rows, cols)
    b1 = linalg.range_basis(m).basis
    b2 = linalg.range_basis(m.copy()).basis
    assert b1.tobytes() == b2.tobytes()
    for j in range(b1.shape[1]):
        piv = b1[np.argmax(np.abs(b1[:, j])), j]
        assert abs(piv.imag) <= 1e-14
        assert piv.real > 0


# ------------------------------------------------------- unitary extension

def test_extend_isometry_swap_frozen():
    e1 = linalg.SubspaceBasis(2, 1, np.array([[1.0], [0.0]], dtype=complex))
    e2 = linalg.SubspaceBasis(2, 1, np.array([[0.0], [1.0]], dtype=complex))
    w = linalg.extend_isometry_to_unitary(e1, e2, np.array([[1.0]]))
    assert_allclose(w, np.array([[0.0, 1.0], [1.0, 0.0]]), atol=1e-12)


def test_extend_isometry_trivial_domain():
    triv = linalg.SubspaceBasis(3, 0, np.zeros((3, 0), dtype=complex))
    w = linalg.extend_isometry_to_unitary(triv, triv, np.zeros((0, 0)))
    assert_allclose(w, np.eye(3), atol=1e-12)


def test_extend_isometry_codimension_mismatch():
    d1 = linalg.SubspaceBasis(2, 1, np.array([[1.0], [0.0]], dtype=complex))
    d2 = linalg.SubspaceBasis(2, 2, np.eye(2, dtype=complex))
    with pytest.raises(CodimensionMismatch):
        linalg.extend_isometry_to_unitary(d1, d2, np.zeros((2, 1)))


def test_extend_isometry_rejects_non_isometric_action():
    e1 = linalg.SubspaceBasis(2, 1, np.array([[1.0], [0.0]], dtype=complex))
    e2 = linalg.SubspaceBasis(2, 1, np.array([[0.0], [1.0]], dtype=complex))
    with pytest.raises(NotIsometric):
        linalg.extend_isometry_to_unitary(e1, e2, np.array([[2.0]]))


@settings(deadline=None, max_examples=60)
@given(seed=seeds, n=st.integers(min_value=1, max_value=7), d=st.integers(min_value=0, max_value=7))
def test_extend_isometry_unitary_and_agrees(seed, n, d):
    d = min(d, n)
    rng = np.random.default_rng(seed)
    dom = linalg.SubspaceBasis(n, d, random_subspace(rng, n, d))
    cod = linalg.SubspaceBasis(n, d, random_subspace(rng, n, d))
    act = haar_unitary(rng, d)
    w = linalg.extend_isometry_to_unitary(dom, cod, act)
    assert linalg.operator_norm(w.conj().T @ w - np.eye(n)) <= 1e-10
    assert linalg.operator_norm(w @ dom.basis - cod.basis @ act) <= 1e-10


# ------------------------------------------------------------------- norms

def test_spectral_radius_nilpotent():
    assert linalg.spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) <= 1e-12


def test_norms_of_empty():
    assert linalg.operator_norm(np.zeros((0, 0))) == 0.0
    assert linalg.spectral_radius(np.zeros((0, 0))) == 0.0


@settings(deadline=None, max_examples=60)
@given(seed=seeds, n=dims)
def test_spectral_radius_below_operator_norm(seed, n):
    rng = np.random.default_rng(seed)
    m = complex_matrix(rng, n, n)
    assert linalg.spectral_radius(m) <= linalg.operator_norm(m) + 1e-12


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        linalg.Tolerances(rank_tol=0.0)


def test_as_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        linalg.as_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
