#!/usr/bin/env python3
"""Closed-form derivations for the frozen constants used in the test suite.

Every value asserted verbatim in a test either is trivial (0, 1, a permutation)
or is derived here from first principles, without importing the package under
test. Run this script to regenerate the numbers; copy them into the tests by
hand so the tests stay frozen.
"""
from __future__ import annotations

import math


def sqrt_of_2x2_symmetric() -> None:
    # M = [[2, 1], [1, 2]] has eigenpairs (1, (1,-1)/sqrt2) and (3, (1,1)/sqrt2).
    # sqrt(M) = V diag(1, sqrt3) V^T with V the normalized eigenvectors, so the
    # entries are (sqrt3 + 1)/2 on the diagonal and (sqrt3 - 1)/2 off it.
    d = (math.sqrt(3.0) + 1.0) / 2.0
    o = (math.sqrt(3.0) - 1.0) / 2.0
    print(f"sqrt([[2,1],[1,2]]) diagonal   = {d!r}")
    print(f"sqrt([[2,1],[1,2]]) offdiag    = {o!r}")
    print(f"check (square - M) entry 00    = {d * d + o * o - 2.0!r}")
    print(f"check (square - M) entry 01    = {2 * d * o - 1.0!r}")


def jordan_decay_crossing(lam: float = 0.95, threshold: float = 1e-6) -> None:
    # T = [[lam, 1], [0, lam]]; T^m = [[lam^m, m lam^(m-1)], [0, lam^m]].
    # The 2-norm of an upper triangular [[a, b], [0, c]] is
    # sqrt((s + sqrt(s^2 - 4 a^2 c^2)) / 2) with s = a^2 + b^2 + c^2.
    def norm_of_power(m: int) -> float:
        a = lam**m
        b = m * lam ** (m - 1)
        s = a * a + b * b + a * a
        disc = max(s * s - 4.0 * (a * a) * (a * a), 0.0)
        return math.sqrt((s + math.sqrt(disc)) / 2.0)

    m = 1
    while norm_of_power(m) >= threshold:
        m += 1
    print(f"Jordan(lam={lam}) first m with ||T^m|| < {threshold}: {m}")
    print(f"  ||T^(m-1)|| = {norm_of_power(m - 1)!r}")
    print(f"  ||T^m||     = {norm_of_power(m)!r}")


def scalar_codefect(t: float = 0.5) -> None:
    # For the 1x1 contraction T = t, the codefect is sqrt(1 - t^2).
    print(f"codefect of scalar {t}         = {math.sqrt(1.0 - t * t)!r}")


def scalar_dilation_rows(t: float = 0.5, degree: int = 3) -> None:
    # Coefficient k of the dilation of a scalar t is sqrt(1 - t^2) * conj(t)^k.
    d = math.sqrt(1.0 - t * t)
    rows = [d * t**k for k in range(degree + 1)]
    print(f"dilation rows for t={t}, N={degree}: {rows!r}")
    # Tail defect after truncating at degree N: |t|^(2(N+1)).
    print(f"tail defect                    = {t ** (2 * (degree + 1))!r}")


def swap_variety_fiber(w: float = 0.25) -> None:
    # The swap symbol Phi(w) = [[0, w], [1, 0]] has characteristic polynomial
    # z^2 - w, so the fiber over w is z1 = +-sqrt(w) with z2 = w / z1 = z1.
    r = math.sqrt(w)
    print(f"swap fiber over w={w}: z1 = +-{r!r}, z2 = z1 (diagonal variety)")


def boundary_supremum_gap(radius: float = 0.999) -> None:
    # For p(z1, z2) = z1 on the diagonal variety, the sampled sup over
    # |w| <= radius is sqrt(radius); the operator norm of the shift is 1.
    print(f"1 - sqrt({radius})             = {1.0 - math.sqrt(radius)!r}")


if __name__ == "__main__":
    sqrt_of_2x2_symmetric()
    jordan_decay_crossing()
    scalar_codefect()
    scalar_dilation_rows()
    swap_variety_fiber()
    boundary_supremum_gap()
