"""Shared helpers for the test suite: seeded random matrix factories."""
from __future__ import annotations

import numpy as np


def complex_matrix(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_matrix(rng, n, n))
    d = np.diag(r)
    return q @ np.diag(d / np.abs(d))


def random_subspace(rng: np.random.Generator, ambient: int, dim: int) -> np.ndarray:
    """Orthonormal (ambient x dim) frame, uniformly distributed."""
    return haar_unitary(rng, ambient)[:, :dim]


def strict_contraction(rng: np.random.Generator, n: int, norm: float = 0.8) -> np.ndarray:
    m = complex_matrix(rng, n, n)
    return m * (norm / np.linalg.norm(m, 2))
