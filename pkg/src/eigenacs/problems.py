"""Declarative differential eigenvalue problems.

A problem is the residual D(u) + mu * h(u) = 0 on a domain, boundary
residuals B0(u) + mu * B1(u) = 0 on named boundary segments, and the
exponent p linking the linear parameter mu to the physical eigenvalue
lambda = mu ** (1 / p).

Domain geometry follows a small class hierarchy (``Interval``,
``Rectangle``, ``LShape``) behind the abstract ``Domain`` interface, so
sampling, membership and field grids never branch on the domain kind.
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .const import (
    ALPHA_BC_BUCKLING,
    BANDWIDTH_BUCKLING,
    BANDWIDTH_HELMHOLTZ,
    BANDWIDTH_PLATE,
    BOUNDARY_DENSITY_HELMHOLTZ,
    BOUNDARY_DENSITY_PLATE,
    CATALOG_NAMES,
    DEFAULT_U_REF,
    ORACLE_BUCKLING,
    ORACLE_LSHAPE_FD,
    ORACLE_PLATE_SS,
    ORACLE_RECTANGLE_HELMHOLTZ,
    PROBLEM_BUCKLING_FIXED_FIXED,
    PROBLEM_BUCKLING_FIXED_FREE,
    PROBLEM_BUCKLING_FIXED_PIN,
    PROBLEM_BUCKLING_PIN_PIN,
    PROBLEM_HELMHOLTZ_LSHAPE,
    PROBLEM_HELMHOLTZ_SQUARE,
    PROBLEM_PLATE_SS,
    REFERENCE_FIXED,
    REFERENCE_POLICIES,
    REFERENCE_RANDOM,
    SEARCH_BOUNDS_BUCKLING,
    SEARCH_BOUNDS_HELMHOLTZ_LSHAPE,
    SEARCH_BOUNDS_HELMHOLTZ_SQUARE,
    SEARCH_BOUNDS_PLATE,
)
from .exceptions import CatalogError, ConfigurationError
from .features import DerivMultiIndex, FeatureBasis, eval_features

_LOGGER = logging.getLogger(__name__)

_SAMPLE_BATCH = 1024


# ---------------------------------------------------------------------------
# Linear operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearOperatorSpec:
    """Linear differential operator sum_t c_t * D^{a_t}."""

    terms: tuple[tuple[float, DerivMultiIndex], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ConfigurationError("operator needs at least one term")
        dims = {index.dim for _, index in self.terms}
        if len(dims) != 1:
            raise ConfigurationError(f"operator terms mix dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.terms[0][1].dim

    @property
    def max_order(self) -> int:
        return max(index.order for _, index in self.terms)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, Sequence[int]]]) -> LinearOperatorSpec:
        return cls(tuple((float(c), DerivMultiIndex(tuple(int(o) for o in orders))) for c, orders in terms))

    @classmethod
    def identity(cls, dim: int, coefficient: float = 1.0) -> LinearOperatorSpec:
        return cls(((coefficient, DerivMultiIndex((0,) * dim)),))

    def apply(
        self,
        basis: FeatureBasis,
        points: ArrayLike,
        cache: dict[DerivMultiIndex, NDArray[np.float64]] | None = None,
    ) -> NDArray[np.float64]:
        """Operator applied column-wise to the feature matrix at ``points``.

        ``cache`` maps multi-indices to already evaluated matrices for the
        same point set.
        """
        result: NDArray[np.float64] | None = None
        for coefficient, index in self.terms:
            if cache is not None and index in cache:
                values = cache[index]
            else:
                values = eval_features(basis, points, index)
                if cache is not None:
                    cache[index] = values
            term = coefficient * values
            result = term if result is None else result + term
        assert result is not None
        return result

    def as_list(self) -> list[list[Any]]:
        return [[c, list(index.orders)] for c, index in self.terms]


def _d(*orders: int) -> DerivMultiIndex:
    return DerivMultiIndex.of(*orders)


def _op(*terms: tuple[float, DerivMultiIndex]) -> LinearOperatorSpec:
    return LinearOperatorSpec(tuple(terms))


LAPLACIAN_2D = _op((1.0, _d(2, 0)), (1.0, _d(0, 2)))
BIHARMONIC_2D = _op((1.0, _d(4, 0)), (2.0, _d(2, 2)), (1.0, _d(0, 4)))


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySegment:
    """Named piece of the boundary: an endpoint or a straight segment."""

    name: str
    start: tuple[float, ...]
    end: tuple[float, ...] | None = None

    @property
    def is_point(self) -> bool:
        return self.end is None

    @property
    def measure(self) -> float:
        """Length of the segment; endpoints use the counting measure 1."""
        if self.end is None:
            return 1.0
        return math.dist(self.start, self.end)

    def sample(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        start = np.asarray(self.start, dtype=np.float64)
        if self.end is None:
            return np.tile(start, (n, 1))
        end = np.asarray(self.end, dtype=np.float64)
        t = rng.uniform(0.0, 1.0, size=(n, 1))
        return start + t * (end - start)


class Domain(ABC):
    """Abstract problem domain."""

    kind: str = "unknown"
    dim: int = 0

    @property
    @abstractmethod
    def measure(self) -> float:
        """Length (1-D) or area (2-D) of the domain."""

    @property
    @abstractmethod
    def bounding_box(self) -> tuple[tuple[float, float], ...]:
        """Per-coordinate (low, high) bounds."""

    @property
    @abstractmethod
    def boundary_segments(self) -> tuple[BoundarySegment, ...]:
        """Ordered boundary decomposition."""

    @abstractmethod
    def contains(self, points: ArrayLike, closed: bool = False) -> NDArray[np.bool_]:
        """Membership test; ``closed`` includes the boundary."""

    @abstractmethod
    def as_dict(self) -> dict[str, Any]:
        """Serializable description."""

    def segment(self, name: str) -> BoundarySegment:
        for seg in self.boundary_segments:
            if seg.name == name:
                return seg
        valid = ", ".join(s.name for s in self.boundary_segments)
        raise ConfigurationError(f"unknown boundary locus '{name}' for {self.kind} (valid: {valid})", "boundary")

    def sample_interior(self, n: int, rng: np.random.Generator) -> NDArray[np.float64]:
        """Uniform i.i.d. interior points by rejection from the bounding box."""
        lo = np.array([b[0] for b in self.bounding_box])
        hi = np.array([b[1] for b in self.bounding_box])
        accepted: list[NDArray[np.float64]] = []
        count = 0
        while count < n:
            batch = rng.uniform(lo, hi, size=(max(_SAMPLE_BATCH, n), self.dim))
            batch = batch[self.contains(batch)]
            accepted.append(batch)
            count += len(batch)
        return np.concatenate(accepted)[:n]

    def grid(self, resolution: int) -> NDArray[np.float64]:
        """Uniform tensor grid over the bounding box, clipped to the closed domain."""
        axes = [np.linspace(lo, hi, resolution) for lo, hi in self.bounding_box]
        if self.dim == 1:
            points = axes[0].reshape(-1, 1)
        else:
            xx, yy = np.meshgrid(axes[0], axes[1], indexing="xy")
            points = np.column_stack([xx.ravel(), yy.ravel()])
        return points[self.contains(points, closed=True)]

    def midpoint_grid(self, cells: int) -> tuple[NDArray[np.float64], float]:
        """Cell centres of a uniform tensor grid that fall inside the domain.

        Returns the points and the common cell volume, so ``volume * sum(f)``
        is the midpoint rule for the integral of ``f``.
        """
        if cells < 1:
            raise ConfigurationError(f"cells must be positive, got {cells}", "grid.cells")
        axes = []
        volume = 1.0
        for lo, hi in self.bounding_box:
            h = (hi - lo) / cells
            axes.append(lo + h * (np.arange(cells) + 0.5))
            volume *= h
        if self.dim == 1:
            points = axes[0].reshape(-1, 1)
        else:
            xx, yy = np.meshgrid(axes[0], axes[1], indexing="xy")
            points = np.column_stack([xx.ravel(), yy.ravel()])
        return points[self.contains(points)], volume


def _as_2d(points: ArrayLike, dim: int) -> NDArray[np.float64]:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, dim)
    return pts


class Interval(Domain):
    """Closed interval [a, b] with endpoint boundary."""

    kind = "interval"
    dim = 1

    def __init__(self, a: float, b: float) -> None:
        if not b > a:
            raise ConfigurationError(f"interval needs a < b, got ({a}, {b})", "domain")
        self.a = float(a)
        self.b = float(b)

    @property
    def measure(self) -> float:
        return self.b - self.a

    @property
    def bounding_box(self) -> tuple[tuple[float, float], ...]:
        return ((self.a, self.b),)

    @property
    def boundary_segments(self) -> tuple[BoundarySegment, ...]:
        return (BoundarySegment("left", (self.a,)), BoundarySegment("right", (self.b,)))

    def contains(self, points: ArrayLike, closed: bool = False) -> NDArray[np.bool_]:
        x = _as_2d(points, 1)[:, 0]
        if closed:
            return (x >= self.a) & (x <= self.b)
        return (x > self.a) & (x < self.b)

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "bounds": [self.a, self.b], "measure": self.measure}


class Rectangle(Domain):
    """Axis-aligned rectangle [ax, bx] x [ay, by]."""

    kind = "rectangle"
    dim = 2

    def __init__(self, ax: float, bx: float, ay: float, by: float) -> None:
        if not (bx > ax and by > ay):
            raise ConfigurationError(f"rectangle needs ax < bx and ay < by, got ({ax}, {bx}, {ay}, {by})", "domain")
        self.ax, self.bx, self.ay, self.by = float(ax), float(bx), float(ay), float(by)

    @property
    def measure(self) -> float:
        return (self.bx - self.ax) * (self.by - self.ay)

    @property
    def bounding_box(self) -> tuple[tuple[float, float], ...]:
        return ((self.ax, self.bx), (self.ay, self.by))

    @property
    def boundary_segments(self) -> tuple[BoundarySegment, ...]:
        ax, bx, ay, by = self.ax, self.bx, self.ay, self.by
        return (
            BoundarySegment("bottom", (ax, ay), (bx, ay)),
            BoundarySegment("right", (bx, ay), (bx, by)),
            BoundarySegment("top", (bx, by), (ax, by)),
            BoundarySegment("left", (ax, by), (ax, ay)),
        )

    def contains(self, points: ArrayLike, closed: bool = False) -> NDArray[np.bool_]:
        pts = _as_2d(points, 2)
        x, y = pts[:, 0], pts[:, 1]
        if closed:
            return (x >= self.ax) & (x <= self.bx) & (y >= self.ay) & (y <= self.by)
        return (x > self.ax) & (x < self.bx) & (y > self.ay) & (y < self.by)

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "bounds": [self.ax, self.bx, self.ay, self.by], "measure": self.measure}


class LShape(Domain):
    """Square (lo, hi)^2 minus its closed lower-right quadrant.

    With the default (-1, 1) the removed region is [0, 1] x [-1, 0] and
    the re-entrant corner sits at the origin.
    """

    kind = "l_shape"
    dim = 2

    def __init__(self, lo: float = -1.0, hi: float = 1.0) -> None:
        if not hi > lo:
            raise ConfigurationError(f"l_shape needs lo < hi, got ({lo}, {hi})", "domain")
        self.lo = float(lo)
        self.hi = float(hi)
        self.center = 0.5 * (self.lo + self.hi)

    @property
    def measure(self) -> float:
        return 0.75 * (self.hi - self.lo) ** 2

    @property
    def bounding_box(self) -> tuple[tuple[float, float], ...]:
        return ((self.lo, self.hi), (self.lo, self.hi))

    @property
    def boundary_segments(self) -> tuple[BoundarySegment, ...]:
        lo, hi, c = self.lo, self.hi, self.center
        return (
            BoundarySegment("bottom", (lo, lo), (c, lo)),
            BoundarySegment("notch_vertical", (c, lo), (c, c)),
            BoundarySegment("notch_horizontal", (c, c), (hi, c)),
            BoundarySegment("right", (hi, c), (hi, hi)),
            BoundarySegment("top", (hi, hi), (lo, hi)),
            BoundarySegment("left", (lo, hi), (lo, lo)),
        )

    def contains(self, points: ArrayLike, closed: bool = False) -> NDArray[np.bool_]:
        pts = _as_2d(points, 2)
        x, y = pts[:, 0], pts[:, 1]
        lo, hi, c = self.lo, self.hi, self.center
        if closed:
            return (x >= lo) & (x <= hi) & (y >= lo) & (y <= hi) & ~((x > c) & (y < c))
        return (x > lo) & (x < hi) & (y > lo) & (y < hi) & ~((x >= c) & (y <= c))

    def as_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "bounds": [self.lo, self.hi], "measure": self.measure}


def domain_from_dict(data: dict[str, Any]) -> Domain:
    """Build a domain from ``{"kind": ..., "bounds": [...]}``."""
    kind = data.get("kind")
    bounds = [float(v) for v in data.get("bounds", [])]
    if kind == Interval.kind and len(bounds) == 2:
        return Interval(*bounds)
    if kind == Rectangle.kind and len(bounds) == 4:
        return Rectangle(*bounds)
    if kind == LShape.kind and len(bounds) in (0, 2):
        return LShape(*bounds)
    raise ConfigurationError(f"cannot build domain of kind '{kind}' from bounds {bounds}", "problem.domain")


# ---------------------------------------------------------------------------
# Problem specification
# ---------------------------------------------------------------------------

def physical_eigenvalue(mu: float, exponent: int) -> float:
    """lambda = mu ** (1 / p); NaN for negative mu when p is even."""
    if mu >= 0:
        return float(mu ** (1.0 / exponent))
    if exponent % 2:
        return -float((-mu) ** (1.0 / exponent))
    return math.nan


@dataclass(frozen=True)
class BoundaryConditionSpec:
    """Boundary residual B0(u) + mu * B1(u) = 0 on one named segment."""

    base_op: LinearOperatorSpec
    locus: str
    n_points: int = 1
    eig_op: LinearOperatorSpec | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "locus": self.locus,
            "n_points": self.n_points,
            "base_op": self.base_op.as_list(),
            "eig_op": self.eig_op.as_list() if self.eig_op is not None else None,
        }


@dataclass(frozen=True)
class ProblemSpec:
    """Complete description of one eigenvalue problem."""

    name: str
    domain: Domain
    diff_op: LinearOperatorSpec
    carrier_op: LinearOperatorSpec
    boundary: tuple[BoundaryConditionSpec, ...]
    eigen_exponent: int
    search_bounds: tuple[float, float]
    bandwidth: float
    oracle: str | None = None
    # boundary weight used when the run configuration leaves it unset
    alpha_bc: float | None = None

    def __post_init__(self) -> None:
        if self.alpha_bc is not None and not self.alpha_bc >= 0:
            raise ConfigurationError(f"alpha_bc must be non-negative, got {self.alpha_bc}", "problem.alpha_bc")
        lo, hi = self.search_bounds
        if not lo < hi:
            raise ConfigurationError(f"search_bounds need lo < hi, got {self.search_bounds}", "problem.search_bounds")
        if self.eigen_exponent < 1:
            raise ConfigurationError(
                f"eigen_exponent must be a positive integer, got {self.eigen_exponent}", "problem.eigen_exponent"
            )
        if not self.bandwidth > 0:
            raise ConfigurationError(f"bandwidth must be positive, got {self.bandwidth}", "problem.bandwidth")
        ops = [self.diff_op, self.carrier_op]
        for bc in self.boundary:
            ops.append(bc.base_op)
            if bc.eig_op is not None:
                ops.append(bc.eig_op)
            segment = self.domain.segment(bc.locus)
            if bc.n_points < 1 or (segment.is_point and bc.n_points != 1):
                raise ConfigurationError(
                    f"locus '{bc.locus}' cannot take {bc.n_points} points", "problem.boundary.n_points"
                )
        for op in ops:
            if op.dim != self.domain.dim:
                raise ConfigurationError(
                    f"operator of dimension {op.dim} on a {self.domain.dim}-D domain", "problem"
                )

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def has_eigen_boundary(self) -> bool:
        return any(bc.eig_op is not None for bc in self.boundary)

    def physical_eigenvalue(self, mu: float) -> float:
        return physical_eigenvalue(mu, self.eigen_exponent)

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "domain": self.domain.as_dict(),
            "diff_op": self.diff_op.as_list(),
            "carrier_op": self.carrier_op.as_list(),
            "boundary": [bc.as_dict() for bc in self.boundary],
            "eigen_exponent": self.eigen_exponent,
            "search_bounds": list(self.search_bounds),
            "bandwidth": self.bandwidth,
            "oracle": self.oracle,
            "alpha_bc": self.alpha_bc,
        }


def problem_from_dict(data: dict[str, Any]) -> ProblemSpec:
    """Build an inline problem from its JSON description."""
    domain = domain_from_dict(data["domain"])
    boundary = tuple(
        BoundaryConditionSpec(
            base_op=LinearOperatorSpec.from_terms(bc["base_op"]),
            locus=bc["locus"],
            n_points=int(bc.get("n_points", 1)),
            eig_op=LinearOperatorSpec.from_terms(bc["eig_op"]) if bc.get("eig_op") else None,
        )
        for bc in data.get("boundary", [])
    )
    return ProblemSpec(
        name=data.get("name", "inline"),
        domain=domain,
        diff_op=LinearOperatorSpec.from_terms(data["diff_op"]),
        carrier_op=LinearOperatorSpec.from_terms(data["carrier_op"]),
        boundary=boundary,
        eigen_exponent=int(data["eigen_exponent"]),
        search_bounds=(float(data["search_bounds"][0]), float(data["search_bounds"][1])),
        bandwidth=float(data["bandwidth"]),
        oracle=None,
        alpha_bc=float(data["alpha_bc"]) if data.get("alpha_bc") is not None else None,
    )


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------

def _w(order: int) -> LinearOperatorSpec:
    return _op((1.0, _d(order)))


def _buckling(name: str, left: Sequence[int], right: Sequence[int], free_end: bool = False) -> ProblemSpec:
    """Euler column u'''' + mu u'' = 0 on [0, 1], mu = lambda^2.

    ``left``/``right`` list the derivative orders forced to zero at each
    end; a free end adds the shear row u''' + mu u' = 0.
    """
    boundary = [BoundaryConditionSpec(_w(k), "left") for k in left]
    boundary += [BoundaryConditionSpec(_w(k), "right") for k in right]
    if free_end:
        boundary.append(BoundaryConditionSpec(_w(3), "right", eig_op=_w(1)))
    return ProblemSpec(
        name=name,
        domain=Interval(0.0, 1.0),
        diff_op=_w(4),
        carrier_op=_w(2),
        boundary=tuple(boundary),
        eigen_exponent=2,
        search_bounds=SEARCH_BOUNDS_BUCKLING,
        bandwidth=BANDWIDTH_BUCKLING,
        oracle=ORACLE_BUCKLING,
        alpha_bc=ALPHA_BC_BUCKLING,
    )


def _edge_points(segment: BoundarySegment, density: int) -> int:
    return max(1, math.ceil(density * segment.measure))


def _dirichlet_helmholtz(name: str, domain: Domain, search_bounds: tuple[float, float], oracle: str) -> ProblemSpec:
    """Laplace eigenproblem  Lap u + mu u = 0, u = 0 on every edge."""
    boundary = tuple(
        BoundaryConditionSpec(
            LinearOperatorSpec.identity(2), seg.name, _edge_points(seg, BOUNDARY_DENSITY_HELMHOLTZ)
        )
        for seg in domain.boundary_segments
    )
    return ProblemSpec(
        name=name,
        domain=domain,
        diff_op=LAPLACIAN_2D,
        carrier_op=LinearOperatorSpec.identity(2),
        boundary=boundary,
        eigen_exponent=1,
        search_bounds=search_bounds,
        bandwidth=BANDWIDTH_HELMHOLTZ,
        oracle=oracle,
    )


def _plate_ss() -> ProblemSpec:
    """Simply supported plate  Lap^2 w - mu w = 0 on [0,10] x [0,5], mu = lambda^4.

    On a straight simply supported edge with w = 0 the moment condition
    reduces to Lap w = 0, so Poisson's ratio drops out.
    """
    domain = Rectangle(0.0, 10.0, 0.0, 5.0)
    boundary: list[BoundaryConditionSpec] = []
    for seg in domain.boundary_segments:
        n = _edge_points(seg, BOUNDARY_DENSITY_PLATE)
        boundary.append(BoundaryConditionSpec(LinearOperatorSpec.identity(2), seg.name, n))
        boundary.append(BoundaryConditionSpec(LAPLACIAN_2D, seg.name, n))
    return ProblemSpec(
        name=PROBLEM_PLATE_SS,
        domain=domain,
        diff_op=BIHARMONIC_2D,
        carrier_op=LinearOperatorSpec.identity(2, coefficient=-1.0),
        boundary=tuple(boundary),
        eigen_exponent=4,
        search_bounds=SEARCH_BOUNDS_PLATE,
        bandwidth=BANDWIDTH_PLATE,
        oracle=ORACLE_PLATE_SS,
    )


def catalog(name: str) -> ProblemSpec:
    """Return the built-in problem registered under ``name``."""
    if name == PROBLEM_BUCKLING_PIN_PIN:
        return _buckling(name, left=(0, 2), right=(0, 2))
    if name == PROBLEM_BUCKLING_FIXED_FIXED:
        return _buckling(name, left=(0, 1), right=(0, 1))
    if name == PROBLEM_BUCKLING_FIXED_PIN:
        return _buckling(name, left=(0, 1), right=(0, 2))
    if name == PROBLEM_BUCKLING_FIXED_FREE:
        return _buckling(name, left=(0, 1), right=(2,), free_end=True)
    if name == PROBLEM_HELMHOLTZ_SQUARE:
        return _dirichlet_helmholtz(
            name, Rectangle(0.0, 1.0, 0.0, 1.0), SEARCH_BOUNDS_HELMHOLTZ_SQUARE, ORACLE_RECTANGLE_HELMHOLTZ
        )
    if name == PROBLEM_HELMHOLTZ_LSHAPE:
        return _dirichlet_helmholtz(name, LShape(-1.0, 1.0), SEARCH_BOUNDS_HELMHOLTZ_LSHAPE, ORACLE_LSHAPE_FD)
    if name == PROBLEM_PLATE_SS:
        return _plate_ss()
    raise CatalogError(name, CATALOG_NAMES)


# ---------------------------------------------------------------------------
# Collocation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryPoints:
    """Collocation points of one boundary condition."""

    condition: int
    locus: str
    points: NDArray[np.float64]
    weight: float


@dataclass(frozen=True)
class CollocationSet:
    """Monte-Carlo quadrature nodes for one strand."""

    interior: NDArray[np.float64]
    interior_weight: float
    boundary: tuple[BoundaryPoints, ...]
    x_ref: NDArray[np.float64]
    u_ref: float
    seed: int
    reference_policy: str = REFERENCE_RANDOM

    @property
    def n_interior(self) -> int:
        return len(self.interior)

    def as_dict(self) -> dict[str, Any]:
        return {
            "n_interior": self.n_interior,
            "boundary_points": {f"{bp.condition}:{bp.locus}": len(bp.points) for bp in self.boundary},
            "x_ref": self.x_ref.tolist(),
            "u_ref": self.u_ref,
            "seed": self.seed,
            "reference_policy": self.reference_policy,
        }


def sample_collocation(
    spec: ProblemSpec,
    n_interior: int,
    ref_point_policy: str = REFERENCE_RANDOM,
    seed: int = 0,
    *,
    reference_point: Sequence[float] | None = None,
    u_ref: float = DEFAULT_U_REF,
    n_boundary: int | None = None,
    basis_width: int | None = None,
) -> CollocationSet:
    """Sample interior, boundary and reference points for ``spec``.

    Interior points are uniform on the domain with weight |Omega| / N;
    boundary points are uniform along each condition's segment with
    weight |segment| / n. ``n_boundary`` overrides the point count of
    every curve segment.
    """
    if n_interior < 1:
        raise ConfigurationError(f"n_interior must be positive, got {n_interior}", "collocation.n_interior")
    if ref_point_policy not in REFERENCE_POLICIES:
        raise ConfigurationError(
            f"reference policy must be one of {REFERENCE_POLICIES}, got '{ref_point_policy}'",
            "collocation.reference_policy",
        )
    if u_ref == 0:
        raise ConfigurationError("u_ref must be nonzero", "collocation.u_ref")
    if basis_width is not None and n_interior < basis_width:
        _LOGGER.warning(
            "%s: %d interior points for %d features, residual block is underdetermined",
            spec.name, n_interior, basis_width,
        )

    domain = spec.domain
    rng = np.random.default_rng(seed)
    interior = domain.sample_interior(n_interior, rng)

    boundary: list[BoundaryPoints] = []
    for i, bc in enumerate(spec.boundary):
        segment = domain.segment(bc.locus)
        n = bc.n_points
        if n_boundary is not None and not segment.is_point:
            n = n_boundary
        boundary.append(BoundaryPoints(i, bc.locus, segment.sample(n, rng), segment.measure / n))

    if ref_point_policy == REFERENCE_FIXED:
        if reference_point is None:
            raise ConfigurationError("fixed reference policy needs a reference_point", "collocation.reference_point")
        x_ref = np.asarray(reference_point, dtype=np.float64).reshape(domain.dim)
        if not domain.contains(x_ref.reshape(1, -1), closed=True)[0]:
            raise ConfigurationError(f"reference point {x_ref.tolist()} lies outside the domain",
                                     "collocation.reference_point")
    else:
        x_ref = domain.sample_interior(1, rng)[0]

    return CollocationSet(
        interior=interior,
        interior_weight=domain.measure / n_interior,
        boundary=tuple(boundary),
        x_ref=x_ref,
        u_ref=float(u_ref),
        seed=int(seed),
        reference_policy=ref_point_policy,
    )
