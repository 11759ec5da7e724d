"""Frozen random Fourier-feature basis with analytic derivatives.

The hidden layer of the shallow network is a set of cosine features
cos(w_m . x + b_m) whose frequencies and phases are drawn once and never
trained. Only the output weights are unknown, so the network output and
every partial derivative of it are linear in those weights:

    D^a u(x; w) = Phi_a(x) @ w

Each differentiation with respect to coordinate k multiplies a feature
by w_{m,k} and advances its phase by pi/2, which lets us write the
derivative matrices in closed form for any multi-index a.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import MAX_DERIVATIVE_ORDER, SUPPORTED_DIMENSIONS
from .exceptions import ConfigurationError, UnsupportedOrderError


@dataclass(frozen=True)
class DerivMultiIndex:
    """Partial-derivative multi-index, one order per spatial coordinate."""

    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(o < 0 for o in self.orders):
            raise ConfigurationError(f"negative derivative order in {self.orders}")
        if self.order > MAX_DERIVATIVE_ORDER:
            raise UnsupportedOrderError(
                f"total derivative order {self.order} exceeds {MAX_DERIVATIVE_ORDER}"
            )

    @property
    def order(self) -> int:
        """Total order |a|."""
        return sum(self.orders)

    @property
    def dim(self) -> int:
        return len(self.orders)

    @classmethod
    def of(cls, *orders: int) -> DerivMultiIndex:
        return cls(tuple(int(o) for o in orders))


def zero_index(dim: int) -> DerivMultiIndex:
    """Multi-index of the plain (underived) features."""
    return DerivMultiIndex((0,) * dim)


@dataclass(frozen=True, eq=False)
class FeatureBasis:
    """Immutable cosine feature map.

    ``frequencies`` has shape (width, dim) and ``phases`` shape (width,);
    both are read-only arrays with entries in [-bandwidth, bandwidth].
    """

    width: int
    dim: int
    bandwidth: float
    seed: int
    frequencies: NDArray[np.float64]
    phases: NDArray[np.float64]

    def as_dict(self) -> dict[str, Any]:
        """Provenance echo (the matrices are regenerated from the seed)."""
        return {
            "width": self.width,
            "dim": self.dim,
            "bandwidth": self.bandwidth,
            "seed": self.seed,
        }


def build_basis(width: int, dim: int, bandwidth: float, seed: int) -> FeatureBasis:
    """Draw frequencies and phases i.i.d. uniform on [-bandwidth, bandwidth]."""
    if dim not in SUPPORTED_DIMENSIONS:
        raise ConfigurationError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {dim}", "basis.dim")
    if width < 1:
        raise ConfigurationError(f"width must be positive, got {width}", "basis.width")
    if not bandwidth > 0 or not np.isfinite(bandwidth):
        raise ConfigurationError(f"bandwidth must be positive, got {bandwidth}", "basis.bandwidth")

    rng = np.random.default_rng(seed)
    frequencies = rng.uniform(-bandwidth, bandwidth, size=(width, dim))
    phases = rng.uniform(-bandwidth, bandwidth, size=width)
    frequencies.setflags(write=False)
    phases.setflags(write=False)
    return FeatureBasis(
        width=int(width),
        dim=int(dim),
        bandwidth=float(bandwidth),
        seed=int(seed),
        frequencies=frequencies,
        phases=phases,
    )


def _as_points(basis: FeatureBasis, points: ArrayLike) -> NDArray[np.float64]:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1 and basis.dim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] != basis.dim:
        raise ConfigurationError(
            f"points must have shape (N, {basis.dim}), got {pts.shape}", "points"
        )
    return pts


def eval_features(
    basis: FeatureBasis,
    points: ArrayLike,
    alpha: DerivMultiIndex | None = None,
) -> NDArray[np.float64]:
    """Evaluate the N x M matrix of d^alpha cos(w_m . x_n + b_m).

    d^a cos(w.x + b) = (prod_k w_k^a_k) * cos(w.x + b + |a| pi/2); the phase
    shift is applied exactly by cycling through cos, -sin, -cos, sin.
    """
    if alpha is None:
        alpha = zero_index(basis.dim)
    if alpha.dim != basis.dim:
        raise ConfigurationError(
            f"multi-index {alpha.orders} does not match basis dimension {basis.dim}", "alpha"
        )
    pts = _as_points(basis, points)

    arg = pts @ basis.frequencies.T + basis.phases
    shift = alpha.order % 4
    if shift == 0:
        values = np.cos(arg)
    elif shift == 1:
        values = -np.sin(arg)
    elif shift == 2:
        values = -np.cos(arg)
    else:
        values = np.sin(arg)

    if alpha.order:
        scale = np.prod(basis.frequencies ** np.asarray(alpha.orders), axis=1)
        values *= scale
    return values


def evaluate_field(
    basis: FeatureBasis,
    weights: ArrayLike,
    points: ArrayLike,
    alpha: DerivMultiIndex | None = None,
) -> NDArray[np.float64]:
    """Network output (or one of its derivatives) at ``points``."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (basis.width,):
        raise ConfigurationError(f"weights must have shape ({basis.width},), got {w.shape}", "weights")
    return eval_features(basis, points, alpha) @ w
