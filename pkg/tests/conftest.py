"""Shared test fixtures for eigenacs tests.

Solver tests run against small hand-built loss systems whose exact
eigenpairs are known, so they stay fast and deterministic. Tests that
solve catalog problems at realistic sizes are marked ``slow``.
"""
from __future__ import annotations

import numpy as np
import pytest

from eigenacs.assembly import LossSystem, LossWeights


def make_matrix_system(
    eigenvalues=(1.0, 2.0, 3.0, 4.0, 5.0),
    seed: int = 0,
    eigen_exponent: int = 1,
    carrier_scale: float = -1.0,
) -> LossSystem:
    """Loss system of the matrix eigenproblem (K - mu I) w = 0 with r.w = 1.

    K = V diag(eigenvalues) V^T for a random orthogonal V; the reference
    row is a random vector so no eigenvector is nodal.
    """
    rng = np.random.default_rng(seed)
    n = len(eigenvalues)
    V, _ = np.linalg.qr(rng.standard_normal((n, n)))
    K = V @ np.diag(eigenvalues) @ V.T
    return LossSystem(
        A=K,
        H=carrier_scale * np.eye(n),
        B0=np.zeros((0, n)),
        B1=np.zeros((0, n)),
        r=rng.uniform(0.5, 1.5, size=n) * np.sign(rng.standard_normal(n)),
        y_ref=1.0,
        Q=np.zeros((0, n)),
        weights=LossWeights(),
        phi_interior=np.eye(n),
        interior_weight=1.0,
        u_ref=1.0,
        eigen_exponent=eigen_exponent,
    )


@pytest.fixture
def matrix_system() -> LossSystem:
    return make_matrix_system()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
