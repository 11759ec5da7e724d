"""Discretized loss as stacked least-squares blocks.

For fixed collocation points the four-term loss

    L(mu, w) = |(A + mu H) w|^2 + |(B0 + mu B1) w|^2 + (r.w - y_ref)^2 + |Q w|^2

is a sum of squared row residuals. Quadrature weights and loss weights
are folded into the rows as square roots, so both alternating
subproblems are plain linear least squares over the same blocks.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import DEFAULT_ALPHA_BC, DEFAULT_ALPHA_ORTHO, DEFAULT_ALPHA_REF, RESIDUAL_EPS
from .exceptions import ConfigurationError, NumericalFailureError
from .features import DerivMultiIndex, FeatureBasis, eval_features, evaluate_field, zero_index
from .problems import CollocationSet, ProblemSpec

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossWeights:
    """Trade-off weights of the boundary, reference and orthogonality terms."""

    alpha_bc: float = DEFAULT_ALPHA_BC
    alpha_ref: float = DEFAULT_ALPHA_REF
    alpha_ortho: float = DEFAULT_ALPHA_ORTHO

    def __post_init__(self) -> None:
        for name in ("alpha_bc", "alpha_ref", "alpha_ortho"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"must be non-negative, got {getattr(self, name)}", f"weights.{name}")
        if self.alpha_ref == 0:
            raise ConfigurationError("must be positive to exclude the trivial solution", "weights.alpha_ref")

    @classmethod
    def for_problem(
        cls,
        spec: ProblemSpec,
        alpha_bc: float | None = None,
        alpha_ref: float = DEFAULT_ALPHA_REF,
        alpha_ortho: float = DEFAULT_ALPHA_ORTHO,
    ) -> LossWeights:
        """Weights with an unset ``alpha_bc`` taken from the problem, then the global default."""
        if alpha_bc is None:
            alpha_bc = spec.alpha_bc if spec.alpha_bc is not None else DEFAULT_ALPHA_BC
        return cls(alpha_bc=alpha_bc, alpha_ref=alpha_ref, alpha_ortho=alpha_ortho)

    def as_dict(self) -> dict[str, float]:
        return {"alpha_bc": self.alpha_bc, "alpha_ref": self.alpha_ref, "alpha_ortho": self.alpha_ortho}


@dataclass(frozen=True, eq=False)
class ModeShape:
    """A previously found eigenfunction, possibly over another basis."""

    basis: FeatureBasis
    weights: NDArray[np.float64]

    def evaluate(self, points: ArrayLike) -> NDArray[np.float64]:
        return evaluate_field(self.basis, self.weights, points)


PriorMode = Union[ModeShape, NDArray[np.float64]]


@dataclass(frozen=True, eq=False)
class LossSystem:
    """Cached design-matrix blocks of one strand.

    Row blocks: ``A``/``H`` interior residual (mu-free / mu-carrier),
    ``B0``/``B1`` boundary rows, ``r`` the reference row with target
    ``y_ref`` and ``Q`` the orthogonality rows.
    """

    A: NDArray[np.float64]
    H: NDArray[np.float64]
    B0: NDArray[np.float64]
    B1: NDArray[np.float64]
    r: NDArray[np.float64]
    y_ref: float
    Q: NDArray[np.float64]
    weights: LossWeights
    phi_interior: NDArray[np.float64]
    interior_weight: float
    u_ref: float
    eigen_exponent: int = 1

    @property
    def width(self) -> int:
        return self.A.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0] + self.B0.shape[0] + 1 + self.Q.shape[0]

    @property
    def has_eigen_boundary(self) -> bool:
        return bool(np.any(self.B1))

    def reference_value(self, w: NDArray[np.float64]) -> float:
        """Network output u(x_ref; w)."""
        return float(self.r @ w) / math.sqrt(self.weights.alpha_ref)

    def interior_values(self, w: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.phi_interior @ w

    def summary(self) -> dict[str, Any]:
        return {
            "rows": self.n_rows,
            "width": self.width,
            "orthogonality_rows": self.Q.shape[0],
            "weights": self.weights.as_dict(),
        }


def assemble(
    spec: ProblemSpec,
    basis: FeatureBasis,
    colloc: CollocationSet,
    weights: LossWeights | None = None,
    prior_modes: Sequence[PriorMode] = (),
) -> LossSystem:
    """Evaluate every block of the loss once for a strand's collocation set.

    ``prior_modes`` are already accepted eigenfunctions, either weight
    vectors over ``basis`` or ``ModeShape`` objects that are re-evaluated
    at the interior points.
    """
    if weights is None:
        weights = LossWeights.for_problem(spec)
    if basis.dim != spec.dim:
        raise ConfigurationError(f"basis dimension {basis.dim} does not match problem dimension {spec.dim}",
                                 "basis.dim")

    interior = colloc.interior
    cache: dict[DerivMultiIndex, NDArray[np.float64]] = {}
    root_w = math.sqrt(colloc.interior_weight)
    A = root_w * spec.diff_op.apply(basis, interior, cache)
    H = root_w * spec.carrier_op.apply(basis, interior, cache)
    zero = zero_index(basis.dim)
    phi_interior = cache.get(zero)
    if phi_interior is None:
        phi_interior = eval_features(basis, interior, zero)

    b0_rows: list[NDArray[np.float64]] = []
    b1_rows: list[NDArray[np.float64]] = []
    for bp in colloc.boundary:
        bc = spec.boundary[bp.condition]
        scale = math.sqrt(weights.alpha_bc * bp.weight)
        point_cache: dict[DerivMultiIndex, NDArray[np.float64]] = {}
        b0_rows.append(scale * bc.base_op.apply(basis, bp.points, point_cache))
        if bc.eig_op is not None:
            b1_rows.append(scale * bc.eig_op.apply(basis, bp.points, point_cache))
        else:
            b1_rows.append(np.zeros((len(bp.points), basis.width)))
    B0 = np.vstack(b0_rows) if b0_rows else np.zeros((0, basis.width))
    B1 = np.vstack(b1_rows) if b1_rows else np.zeros((0, basis.width))

    root_ref = math.sqrt(weights.alpha_ref)
    r = root_ref * eval_features(basis, colloc.x_ref.reshape(1, -1))[0]
    y_ref = root_ref * colloc.u_ref

    q_rows: list[NDArray[np.float64]] = []
    root_ortho = math.sqrt(weights.alpha_ortho)
    for mode in prior_modes:
        if isinstance(mode, ModeShape):
            u_j = mode.evaluate(interior)
        else:
            w_j = np.asarray(mode, dtype=np.float64)
            if w_j.shape != (basis.width,):
                raise ConfigurationError(
                    f"prior mode has shape {w_j.shape}, expected ({basis.width},)", "prior_modes"
                )
            u_j = phi_interior @ w_j
        q_rows.append(root_ortho * colloc.interior_weight * (phi_interior.T @ u_j))
    Q = np.vstack(q_rows) if q_rows else np.zeros((0, basis.width))

    for name, block in (("A", A), ("H", H), ("B0", B0), ("B1", B1), ("Q", Q)):
        if not np.all(np.isfinite(block)):
            raise NumericalFailureError(f"non-finite entries in block {name}")

    _LOGGER.debug(
        "%s: assembled %d residual, %d boundary, %d orthogonality rows over %d features",
        spec.name, A.shape[0], B0.shape[0], Q.shape[0], basis.width,
    )
    return LossSystem(
        A=A,
        H=H,
        B0=B0,
        B1=B1,
        r=r,
        y_ref=y_ref,
        Q=Q,
        weights=weights,
        phi_interior=phi_interior,
        interior_weight=colloc.interior_weight,
        u_ref=colloc.u_ref,
        eigen_exponent=spec.eigen_exponent,
    )


def eigen_parts(sys: LossSystem, w: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Stacked mu-free part ``a`` and mu-coefficient ``c`` of the residual and boundary rows."""
    a = np.concatenate([sys.A @ w, sys.B0 @ w])
    c = np.concatenate([sys.H @ w, sys.B1 @ w])
    return a, c


def loss_terms(sys: LossSystem, mu: float, w: ArrayLike) -> dict[str, float]:
    """The four loss contributions at (mu, w)."""
    w = np.asarray(w, dtype=np.float64)
    residual = sys.A @ w + mu * (sys.H @ w)
    boundary = sys.B0 @ w + mu * (sys.B1 @ w)
    reference = float(sys.r @ w) - sys.y_ref
    ortho = sys.Q @ w
    return {
        "pde": float(residual @ residual),
        "boundary": float(boundary @ boundary),
        "reference": reference * reference,
        "orthogonality": float(ortho @ ortho),
    }


def loss_value(sys: LossSystem, mu: float, w: ArrayLike) -> float:
    """Composite loss L(mu, w)."""
    return sum(loss_terms(sys, mu, w).values())


def design_matrix(sys: LossSystem, mu: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Stacked rows [A + mu H; B0 + mu B1; r; Q] and targets [0; 0; y_ref; 0]."""
    G = np.vstack([sys.A + mu * sys.H, sys.B0 + mu * sys.B1, sys.r.reshape(1, -1), sys.Q])
    y = np.zeros(G.shape[0])
    y[sys.A.shape[0] + sys.B0.shape[0]] = sys.y_ref
    return G, y


def relative_residual(sys: LossSystem, mu: float, w: ArrayLike) -> float:
    """|(A + mu H) w| / (|A w| + |mu| |H w| + eps)."""
    w = np.asarray(w, dtype=np.float64)
    aw = sys.A @ w
    hw = sys.H @ w
    num = np.linalg.norm(aw + mu * hw)
    return float(num / (np.linalg.norm(aw) + abs(mu) * np.linalg.norm(hw) + RESIDUAL_EPS))


def weighted_inner(u: NDArray[np.float64], v: NDArray[np.float64], weight: float) -> float:
    """Equal-weight quadrature of u * v."""
    return float(weight * (u @ v))


def quadrature_inner(sys: LossSystem, u: NDArray[np.float64], v: NDArray[np.float64]) -> float:
    """Interior quadrature of u * v."""
    return weighted_inner(u, v, sys.interior_weight)

