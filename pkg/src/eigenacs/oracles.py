"""Reference eigenvalues independent of the solver.

Closed-form spectra for the pinned column, the free-ended column, the
Dirichlet rectangle and the simply supported plate; characteristic-equation
roots for the clamped columns; and a finite-difference eigensolver for the
Dirichlet Laplacian on rectangles and the L-shaped domain.

Nothing in the solver imports this module.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from numpy.typing import NDArray
from scipy.optimize import brentq

from .const import (
    BC_FIXED_FIXED,
    BC_FIXED_FREE,
    BC_FIXED_PIN,
    BC_PIN_PIN,
    BUCKLING_FAMILIES,
    DEFAULT_ORACLE_GRID_H,
    DENSE_EIGH_MAX_UNKNOWNS,
    ORACLE_BUCKLING,
    ORACLE_LSHAPE_FD,
    ORACLE_PLATE_SS,
    ORACLE_RECTANGLE_HELMHOLTZ,
    SOURCE_CHAR_EQUATION,
    SOURCE_CLOSED_FORM,
    SOURCE_FINITE_DIFFERENCE,
)
from .exceptions import OracleError
from .problems import Domain, LShape, Rectangle, catalog, physical_eigenvalue

_LOGGER = logging.getLogger(__name__)

_ROOT_XTOL = 1e-14
_CLAMPED_SCAN_START = 1.0
_CLAMPED_SCAN_STEP = 0.05


@dataclass(frozen=True)
class OracleEntry:
    """One reference eigenvalue with its mode label and provenance."""

    mu: float
    label: str
    source: str


@dataclass
class OracleSpectrum:
    """Ascending reference eigenvalues for one problem."""

    problem: str
    entries: list[OracleEntry]
    eigen_exponent: int = 1
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def mus(self) -> list[float]:
        return [e.mu for e in self.entries]

    def as_dict(self) -> dict[str, Any]:
        return {
            "problem": self.problem,
            "eigen_exponent": self.eigen_exponent,
            "entries": [
                {
                    "mu": e.mu,
                    "lambda_phys": physical_eigenvalue(e.mu, self.eigen_exponent),
                    "label": e.label,
                    "source": e.source,
                }
                for e in self.entries
            ],
            "metadata": self.metadata,
        }


def _check_index(name: str, value: int) -> None:
    if value < 1:
        raise OracleError(f"{name} must be at least 1, got {value}")


# ---------------------------------------------------------------------------
# Euler columns on [0, 1]
# ---------------------------------------------------------------------------

def _tan_root(k: int) -> float:
    """k-th positive root of tan x = x, bracketed in (k pi, k pi + pi/2)."""
    lo = k * math.pi
    hi = lo + 0.5 * math.pi
    return float(brentq(lambda x: math.sin(x) - x * math.cos(x), lo, hi, xtol=_ROOT_XTOL))


def clamped_characteristic(x: float) -> float:
    """Determinant of the clamped-clamped column, zero at x = sqrt(mu)."""
    return 2.0 * (1.0 - math.cos(x)) - x * math.sin(x)


def _clamped_roots(count: int) -> list[float]:
    """Lowest positive roots of the clamped determinant.

    Symmetric (x = 2 k pi) and antisymmetric (tan(x/2) = x/2) roots
    interleave, so sign changes are scanned instead of trusting either
    closed form alone.
    """
    roots: list[float] = []
    a = _CLAMPED_SCAN_START
    fa = clamped_characteristic(a)
    while len(roots) < count:
        b = a + _CLAMPED_SCAN_STEP
        fb = clamped_characteristic(b)
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(float(brentq(clamped_characteristic, a, b, xtol=_ROOT_XTOL)))
        a, fa = b, fb
    return roots[:count]


def buckling_oracle(bc_family: str, k: int) -> float:
    """k-th buckling eigenvalue mu_k = lambda_k^2 of the unit column."""
    _check_index("k", k)
    if bc_family == BC_PIN_PIN:
        return (k * math.pi) ** 2
    if bc_family == BC_FIXED_FREE:
        return ((2 * k - 1) * math.pi / 2) ** 2
    if bc_family == BC_FIXED_PIN:
        return _tan_root(k) ** 2
    if bc_family == BC_FIXED_FIXED:
        return _clamped_roots(k)[-1] ** 2
    raise OracleError(f"unknown buckling family '{bc_family}'")


def buckling_spectrum(bc_family: str, count: int) -> list[OracleEntry]:
    _check_index("count", count)
    source = SOURCE_CLOSED_FORM if bc_family in (BC_PIN_PIN, BC_FIXED_FREE) else SOURCE_CHAR_EQUATION
    if bc_family == BC_FIXED_FIXED:
        return [OracleEntry(x * x, f"k={k}", source) for k, x in enumerate(_clamped_roots(count), start=1)]
    return [OracleEntry(buckling_oracle(bc_family, k), f"k={k}", source) for k in range(1, count + 1)]


# ---------------------------------------------------------------------------
# Rectangles
# ---------------------------------------------------------------------------

def rectangle_helmholtz_oracle(ax: float, bx: float, ay: float, by: float, m: int, n: int) -> float:
    """Dirichlet Laplacian eigenvalue pi^2 (m^2/Lx^2 + n^2/Ly^2)."""
    _check_index("m", m)
    _check_index("n", n)
    lx, ly = bx - ax, by - ay
    return math.pi ** 2 * (m * m / (lx * lx) + n * n / (ly * ly))


def plate_ss_oracle(a: float, b: float, m: int, n: int) -> float:
    """Simply supported plate eigenvalue ((m pi/a)^2 + (n pi/b)^2)^2."""
    _check_index("m", m)
    _check_index("n", n)
    return ((m * math.pi / a) ** 2 + (n * math.pi / b) ** 2) ** 2


def _lowest_pairs(count: int, value: Any) -> list[OracleEntry]:
    # modes with m or n above count always have count smaller modes below them
    _check_index("count", count)
    pairs = [(value(m, n), m, n) for m in range(1, count + 1) for n in range(1, count + 1)]
    pairs.sort()
    return [OracleEntry(mu, f"({m},{n})", SOURCE_CLOSED_FORM) for mu, m, n in pairs[:count]]


def rectangle_helmholtz_spectrum(ax: float, bx: float, ay: float, by: float, count: int) -> list[OracleEntry]:
    return _lowest_pairs(count, lambda m, n: rectangle_helmholtz_oracle(ax, bx, ay, by, m, n))


def plate_ss_spectrum(a: float, b: float, count: int) -> list[OracleEntry]:
    return _lowest_pairs(count, lambda m, n: plate_ss_oracle(a, b, m, n))


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def _cells(length: float, grid_h: float, what: str) -> int:
    n = round(length / grid_h)
    if n < 2 or abs(n * grid_h - length) > 1e-9 * length:
        raise OracleError(f"grid_h={grid_h} does not divide the {what} length {length}")
    return n


def _lap1d(n: int) -> scipy.sparse.spmatrix:
    v = np.ones(n)
    return scipy.sparse.diags([-v[1:], 2 * v, -v[1:]], [-1, 0, 1], format="csr")


def _fd_grid(domain: Domain, grid_h: float) -> tuple[int, int, NDArray[np.bool_]]:
    """Interior node counts and the mask of unknowns strictly inside ``domain``."""
    if isinstance(domain, Rectangle):
        nx = _cells(domain.bx - domain.ax, grid_h, "x")
        ny = _cells(domain.by - domain.ay, grid_h, "y")
        return nx - 1, ny - 1, np.ones((ny - 1) * (nx - 1), dtype=bool)
    if isinstance(domain, LShape):
        n = _cells(domain.hi - domain.lo, grid_h, "side")
        c = _cells(domain.center - domain.lo, grid_h, "notch")
        idx = np.arange(1, n)
        ii, jj = np.meshgrid(idx, idx, indexing="xy")
        removed = (ii >= c) & (jj <= c)
        return n - 1, n - 1, ~removed.ravel()
    raise OracleError(f"no finite-difference oracle for domain kind '{domain.kind}'")


def fd_dirichlet_eigenvalues(domain: Domain, grid_h: float, count: int) -> NDArray[np.float64]:
    """Smallest ``count`` eigenvalues of the 5-point Dirichlet Laplacian.

    Nodes outside the open domain are eliminated, which imposes u = 0 on
    every boundary node including the notch edges of the L-shape.
    """
    _check_index("count", count)
    if not grid_h > 0:
        raise OracleError(f"grid_h must be positive, got {grid_h}")
    nx, ny, mask = _fd_grid(domain, grid_h)
    lap = scipy.sparse.kron(scipy.sparse.eye(ny), _lap1d(nx)) + scipy.sparse.kron(_lap1d(ny), scipy.sparse.eye(nx))
    keep = np.flatnonzero(mask)
    K = lap.tocsr()[keep][:, keep] / (grid_h * grid_h)
    unknowns = K.shape[0]
    if count > unknowns:
        raise OracleError(f"grid_h={grid_h} leaves {unknowns} unknowns, cannot resolve {count} modes")

    if unknowns <= DENSE_EIGH_MAX_UNKNOWNS or count >= unknowns - 1:
        values = scipy.linalg.eigh(K.toarray(), eigvals_only=True, subset_by_index=[0, count - 1])
    else:
        values = scipy.sparse.linalg.eigsh(K.tocsc(), k=count, sigma=0.0, which="LM", return_eigenvectors=False)
    values = np.sort(np.asarray(values, dtype=np.float64))
    _LOGGER.debug("FD %s h=%g: %d unknowns, lowest %.10g", domain.kind, grid_h, unknowns, values[0])
    return values


def lshape_fd_oracle(
    grid_h: float = DEFAULT_ORACLE_GRID_H, count: int = 1, domain: LShape | None = None
) -> OracleSpectrum:
    """Richardson-extrapolated FD eigenvalues on the L-shape over grids h and h/2.

    ``(4 fine - coarse) / 3`` cancels the O(h^2) term; the distance to the
    fine-grid value is reported as the error estimate. The re-entrant
    corner degrades the actual order, so the estimate is indicative only.
    """
    domain = domain or LShape()
    coarse = fd_dirichlet_eigenvalues(domain, grid_h, count)
    fine = fd_dirichlet_eigenvalues(domain, grid_h / 2, count)
    extrapolated = (4.0 * fine - coarse) / 3.0
    entries = [
        OracleEntry(float(mu), f"k={k}", SOURCE_FINITE_DIFFERENCE) for k, mu in enumerate(extrapolated, start=1)
    ]
    return OracleSpectrum(
        problem=ORACLE_LSHAPE_FD,
        entries=entries,
        eigen_exponent=1,
        metadata={
            "grid_h": grid_h,
            "fine_grid_h": grid_h / 2,
            "extrapolation": "richardson_h2",
            "coarse": coarse.tolist(),
            "fine": fine.tolist(),
            "error_estimate": np.abs(extrapolated - fine).tolist(),
        },
    )


# ---------------------------------------------------------------------------
# Catalog dispatch
# ---------------------------------------------------------------------------

def reference_spectrum(name: str, count: int, grid_h: float | None = None) -> OracleSpectrum:
    """Lowest ``count`` reference eigenvalues of a catalog problem."""
    spec = catalog(name)
    _check_index("count", count)
    domain = spec.domain
    metadata: dict[str, Any] = {}
    if spec.oracle == ORACLE_BUCKLING:
        entries = buckling_spectrum(BUCKLING_FAMILIES[name], count)
        metadata["bc_family"] = BUCKLING_FAMILIES[name]
    elif spec.oracle == ORACLE_RECTANGLE_HELMHOLTZ and isinstance(domain, Rectangle):
        entries = rectangle_helmholtz_spectrum(domain.ax, domain.bx, domain.ay, domain.by, count)
    elif spec.oracle == ORACLE_PLATE_SS and isinstance(domain, Rectangle):
        entries = plate_ss_spectrum(domain.bx - domain.ax, domain.by - domain.ay, count)
    elif spec.oracle == ORACLE_LSHAPE_FD and isinstance(domain, LShape):
        fd = lshape_fd_oracle(grid_h or DEFAULT_ORACLE_GRID_H, count, domain)
        entries, metadata = fd.entries, fd.metadata
    else:
        raise OracleError(f"problem '{name}' has no reference oracle")
    return OracleSpectrum(problem=name, entries=entries, eigen_exponent=spec.eigen_exponent, metadata=metadata)
