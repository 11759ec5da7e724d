"""Multi-strand eigenpair discovery.

Each generation draws one frozen basis, seeds a population of ACS strands
with initial eigenvalue guesses spread over the search interval, clusters
what they converge to and accepts the distinct, well-resolved modes.
Accepted eigenfunctions enter the orthogonality rows of every later
generation, steering new strands away from modes already found.
"""
from __future__ import annotations

import logging
import math
import time
from collections.abc import MutableMapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from numpy.typing import NDArray

from .assembly import LossWeights, ModeShape, assemble, weighted_inner
from .const import (
    DEFAULT_ACCEPT_RESIDUAL_TOL,
    DEFAULT_BASIS_SEED,
    DEFAULT_CLUSTER_REL_TOL,
    DEFAULT_COLLOCATION_SEED,
    DEFAULT_MAX_GENERATIONS,
    DEFAULT_MAX_RESPAWNS,
    DEFAULT_N_INTERIOR,
    DEFAULT_ORTHO_TOL,
    DEFAULT_POPULATION_SEED,
    DEFAULT_STRANDS,
    DEFAULT_TARGET_MODES,
    DEFAULT_U_REF,
    DEFAULT_WIDTH,
    OVERLAP_GRID_CELLS,
    REFERENCE_FIXED,
    REFERENCE_POLICIES,
    REFERENCE_RANDOM,
    REJECT_DEGENERATE,
    REJECT_DUPLICATE,
    REJECT_HIGH_RESIDUAL,
    REJECT_SUSPECT_REFERENCE,
    REJECTION_CAUSES,
    STATUS_DEGENERATE,
)
from .exceptions import ConfigurationError, NumericalFailureError
from .features import FeatureBasis, build_basis
from .problems import CollocationSet, ProblemSpec, sample_collocation
from .solver import ACSConfig, EigenpairEstimate, run_acs

_LOGGER = logging.getLogger(__name__)

# SeedSequence spawn-key namespaces
_KEY_BASIS = 0
_KEY_MU0 = 1
_KEY_COLLOCATION = 2


class _StrandLoggerAdapter(logging.LoggerAdapter):
    """Logger adapter that prefixes messages with generation and strand."""

    def process(self, msg: str, kwargs: MutableMapping[str, Any]) -> tuple[str, MutableMapping[str, Any]]:
        return f"[g{self.extra['generation']}/s{self.extra['strand']}] {msg}", kwargs


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisConfig:
    """Feature basis settings; ``bandwidth=None`` takes the problem default."""

    width: int = DEFAULT_WIDTH
    bandwidth: float | None = None
    seed: int = DEFAULT_BASIS_SEED

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ConfigurationError(f"must be positive, got {self.width}", "basis.width")
        if self.bandwidth is not None and not self.bandwidth > 0:
            raise ConfigurationError(f"must be positive, got {self.bandwidth}", "basis.bandwidth")

    def resolve_bandwidth(self, spec: ProblemSpec) -> float:
        return spec.bandwidth if self.bandwidth is None else self.bandwidth

    def as_dict(self) -> dict[str, Any]:
        return {"width": self.width, "bandwidth": self.bandwidth, "seed": self.seed}


@dataclass(frozen=True)
class CollocationConfig:
    """Collocation sampling settings shared by every strand."""

    n_interior: int = DEFAULT_N_INTERIOR
    n_boundary: int | None = None
    reference_policy: str = REFERENCE_RANDOM
    reference_point: tuple[float, ...] | None = None
    u_ref: float = DEFAULT_U_REF
    seed: int = DEFAULT_COLLOCATION_SEED

    def __post_init__(self) -> None:
        if self.n_interior < 1:
            raise ConfigurationError(f"must be positive, got {self.n_interior}", "collocation.n_interior")
        if self.n_boundary is not None and self.n_boundary < 1:
            raise ConfigurationError(f"must be positive, got {self.n_boundary}", "collocation.n_boundary")
        if self.reference_policy not in REFERENCE_POLICIES:
            raise ConfigurationError(
                f"must be one of {REFERENCE_POLICIES}, got '{self.reference_policy}'",
                "collocation.reference_policy",
            )
        if self.reference_policy == REFERENCE_FIXED and self.reference_point is None:
            raise ConfigurationError("required by the fixed reference policy", "collocation.reference_point")
        if self.u_ref == 0:
            raise ConfigurationError("must be nonzero", "collocation.u_ref")

    def sample(self, spec: ProblemSpec, seed: int, basis_width: int | None = None) -> CollocationSet:
        return sample_collocation(
            spec,
            self.n_interior,
            self.reference_policy,
            seed,
            reference_point=self.reference_point,
            u_ref=self.u_ref,
            n_boundary=self.n_boundary,
            basis_width=basis_width,
        )

    def as_dict(self) -> dict[str, Any]:
        return {
            "n_interior": self.n_interior,
            "n_boundary": self.n_boundary,
            "reference_policy": self.reference_policy,
            "reference_point": list(self.reference_point) if self.reference_point is not None else None,
            "u_ref": self.u_ref,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class PopulationConfig:
    """Generation loop, clustering and acceptance policy."""

    strands_per_generation: int = DEFAULT_STRANDS
    max_generations: int = DEFAULT_MAX_GENERATIONS
    target_modes: int = DEFAULT_TARGET_MODES
    cluster_rel_tol: float = DEFAULT_CLUSTER_REL_TOL
    accept_residual_tol: float = DEFAULT_ACCEPT_RESIDUAL_TOL
    ortho_tol: float = DEFAULT_ORTHO_TOL
    max_respawns: int = DEFAULT_MAX_RESPAWNS
    seed: int = DEFAULT_POPULATION_SEED

    def __post_init__(self) -> None:
        for name in ("strands_per_generation", "max_generations", "target_modes"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"must be at least 1, got {getattr(self, name)}", f"population.{name}")
        if not 0 < self.cluster_rel_tol < 1:
            raise ConfigurationError(f"must lie in (0, 1), got {self.cluster_rel_tol}", "population.cluster_rel_tol")
        for name in ("accept_residual_tol", "ortho_tol"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"must be positive, got {getattr(self, name)}", f"population.{name}")
        if self.max_respawns < 0:
            raise ConfigurationError(f"must be non-negative, got {self.max_respawns}", "population.max_respawns")

    def as_dict(self) -> dict[str, Any]:
        return {
            "strands_per_generation": self.strands_per_generation,
            "max_generations": self.max_generations,
            "target_modes": self.target_modes,
            "cluster_rel_tol": self.cluster_rel_tol,
            "accept_residual_tol": self.accept_residual_tol,
            "ortho_tol": self.ortho_tol,
            "max_respawns": self.max_respawns,
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass
class SpectrumReport:
    """Accepted modes (ascending mu) plus rejection and timing diagnostics."""

    problem: str
    modes: list[EigenpairEstimate]
    rejected: dict[str, int]
    generations_used: int
    strand_wall_times: list[float] = field(default_factory=list)
    total_wall_time: float = 0.0
    provenance: dict[str, Any] = field(default_factory=dict)
    strands_run: int = 0
    respawns: int = 0

    @property
    def mus(self) -> list[float]:
        return [m.mu for m in self.modes]

    def as_dict(self, include_weights: bool = False) -> dict[str, Any]:
        return {
            "problem": self.problem,
            "modes": [m.as_dict(include_weights=include_weights) for m in self.modes],
            "rejected": dict(self.rejected),
            "generations_used": self.generations_used,
            "strands_run": self.strands_run,
            "respawns": self.respawns,
            "timing": {
                "strand_wall_times": list(self.strand_wall_times),
                "total_wall_time": self.total_wall_time,
            },
            "provenance": self.provenance,
        }


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _seed(*key: int) -> int:
    return int(np.random.SeedSequence(entropy=key[0], spawn_key=key[1:]).generate_state(1)[0])


def stratified_guesses(bounds: tuple[float, float], n: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """One uniform draw in each of ``n`` equal sub-intervals of ``bounds``."""
    lo, hi = bounds
    step = (hi - lo) / n
    return lo + (np.arange(n) + rng.uniform(0.0, 1.0, size=n)) * step


def _same_mu(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b))


def cluster_estimates(
    estimates: Sequence[EigenpairEstimate], cluster_rel_tol: float
) -> list[list[EigenpairEstimate]]:
    """Single-linkage clusters of estimates by eigenvalue.

    Estimates are stably sorted by mu; consecutive values within the
    relative tolerance are chained into one cluster.
    """
    ordered = sorted(estimates, key=lambda e: e.mu)
    clusters: list[list[EigenpairEstimate]] = []
    for est in ordered:
        if clusters and _same_mu(clusters[-1][-1].mu, est.mu, cluster_rel_tol):
            clusters[-1].append(est)
        else:
            clusters.append([est])
    return clusters


@dataclass
class _Deflation:
    """Accepted eigenfunctions normalised to unit norm on a midpoint grid."""

    points: NDArray[np.float64]
    weight: float
    shapes: list[ModeShape] = field(default_factory=list)
    values: list[NDArray[np.float64]] = field(default_factory=list, repr=False)

    @classmethod
    def for_domain(cls, spec: ProblemSpec, cells: int = OVERLAP_GRID_CELLS) -> _Deflation:
        points, weight = spec.domain.midpoint_grid(cells)
        return cls(points, weight)

    def _norm(self, u: NDArray[np.float64]) -> float:
        return math.sqrt(max(weighted_inner(u, u, self.weight), 0.0))

    def overlap(self, est: EigenpairEstimate) -> float:
        """Largest normalised inner product of the estimate with a stored mode."""
        if not self.values:
            return 0.0
        u = est.evaluate(self.points)
        norm_u = self._norm(u)
        if norm_u == 0 or not math.isfinite(norm_u):
            return 0.0
        return max(abs(weighted_inner(u, v, self.weight)) / norm_u for v in self.values)

    def add(self, est: EigenpairEstimate) -> bool:
        """Store the estimate's eigenfunction; False if it vanishes on the grid."""
        u = est.evaluate(self.points)
        norm = self._norm(u)
        if norm == 0 or not math.isfinite(norm):
            _LOGGER.warning("mode at mu=%.10g has zero norm on the overlap grid, not deflated", est.mu)
            return False
        assert est.basis is not None
        self.shapes.append(ModeShape(est.basis, est.weights / norm))
        self.values.append(u / norm)
        return True


def _failed_estimate(mu0: float, meta: dict[str, Any]) -> EigenpairEstimate:
    return EigenpairEstimate(
        mu=math.nan,
        lambda_phys=math.nan,
        weights=np.zeros(0),
        loss_history=[],
        iterations=0,
        status=STATUS_DEGENERATE,
        mu0=mu0,
        meta=meta,
    )


# ---------------------------------------------------------------------------
# Generation loop
# ---------------------------------------------------------------------------

def _run_strand(
    spec: ProblemSpec,
    basis: FeatureBasis,
    colloc_cfg: CollocationConfig,
    weights: LossWeights,
    acs_cfg: ACSConfig,
    deflation: tuple[ModeShape, ...],
    master_seed: int,
    generation: int,
    strand: int,
    mu0: float,
    max_respawns: int,
) -> tuple[EigenpairEstimate, int]:
    """Run one strand, respawning on failure; returns (estimate, attempts)."""
    log = _StrandLoggerAdapter(_LOGGER, {"generation": generation, "strand": strand})
    est: EigenpairEstimate | None = None
    attempt = 0
    for attempt in range(max_respawns + 1):
        seed = _seed(master_seed, _KEY_COLLOCATION, colloc_cfg.seed, generation, strand, attempt)
        meta = {"generation": generation, "strand": strand, "attempt": attempt, "collocation_seed": seed}
        colloc = colloc_cfg.sample(spec, seed, basis_width=basis.width if attempt == 0 else None)
        try:
            sys = assemble(spec, basis, colloc, weights, deflation)
        except NumericalFailureError as err:
            log.warning("assembly failed: %s", err)
            est = _failed_estimate(mu0, meta)
        else:
            est = run_acs(sys, mu0, acs_cfg, logger=log)
            est.basis = basis
            est.meta.update(meta)
            est.meta["x_ref"] = colloc.x_ref.tolist()
        if est.ok and not est.suspect_reference:
            break
        if attempt < max_respawns:
            log.warning(
                "%s from mu0=%.6g (suspect reference: %s), respawning",
                est.status, mu0, est.suspect_reference,
            )
    assert est is not None
    log.info("%s: mu=%.10g loss=%.3e residual=%.3e", est.status, est.mu, est.final_loss, est.residual)
    return est, attempt + 1


def run_population(
    spec: ProblemSpec,
    basis_cfg: BasisConfig | None = None,
    acs_cfg: ACSConfig | None = None,
    pop_cfg: PopulationConfig | None = None,
    *,
    collocation: CollocationConfig | None = None,
    weights: LossWeights | None = None,
    threads: int = 1,
    provenance: dict[str, Any] | None = None,
) -> SpectrumReport:
    """Discover up to ``target_modes`` distinct eigenpairs of ``spec``.

    Results are gathered in strand order before clustering, so the report
    depends only on the seeds and never on ``threads``.
    """
    basis_cfg = basis_cfg or BasisConfig()
    acs_cfg = acs_cfg or ACSConfig()
    pop_cfg = pop_cfg or PopulationConfig()
    colloc_cfg = collocation or CollocationConfig()
    weights = weights or LossWeights.for_problem(spec)
    if threads < 1:
        raise ConfigurationError(f"must be at least 1, got {threads}", "threads")

    start = time.perf_counter()
    bandwidth = basis_cfg.resolve_bandwidth(spec)
    rejected = dict.fromkeys(REJECTION_CAUSES, 0)
    modes: list[EigenpairEstimate] = []
    deflation = _Deflation.for_domain(spec)
    wall_times: list[float] = []
    strands_run = 0
    respawns = 0
    generation = 0
    tol = pop_cfg.cluster_rel_tol

    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for generation in range(1, pop_cfg.max_generations + 1):
            basis = build_basis(
                basis_cfg.width, spec.dim, bandwidth, _seed(pop_cfg.seed, _KEY_BASIS, basis_cfg.seed, generation)
            )
            mu_rng = np.random.default_rng(_seed(pop_cfg.seed, _KEY_MU0, generation))
            guesses = stratified_guesses(spec.search_bounds, pop_cfg.strands_per_generation, mu_rng)
            snapshot = tuple(deflation.shapes)

            def strand_job(i: int, basis: FeatureBasis = basis, snapshot: tuple[ModeShape, ...] = snapshot,
                           generation: int = generation, guesses: NDArray[np.float64] = guesses,
                           ) -> tuple[EigenpairEstimate, int]:
                return _run_strand(
                    spec, basis, colloc_cfg, weights, acs_cfg, snapshot,
                    pop_cfg.seed, generation, i, float(guesses[i]), pop_cfg.max_respawns,
                )

            indices = range(pop_cfg.strands_per_generation)
            if executor is None:
                outcomes = [strand_job(i) for i in indices]
            else:
                outcomes = list(executor.map(strand_job, indices))

            candidates: list[EigenpairEstimate] = []
            for est, attempts in outcomes:
                strands_run += attempts
                respawns += attempts - 1
                wall_times.append(est.wall_time)
                if not est.ok:
                    rejected[REJECT_DEGENERATE] += 1
                elif est.suspect_reference:
                    rejected[REJECT_SUSPECT_REFERENCE] += 1
                else:
                    candidates.append(est)

            accepted_now = 0
            for cluster in cluster_estimates(candidates, tol):
                rep = min(cluster, key=lambda e: e.final_loss)
                rejected[REJECT_DUPLICATE] += len(cluster) - 1
                if rep.residual > pop_cfg.accept_residual_tol:
                    rejected[REJECT_HIGH_RESIDUAL] += 1
                    continue
                overlap = deflation.overlap(rep)
                known = next((m for m in modes if _same_mu(m.mu, rep.mu, tol)), None)
                if known is not None:
                    if overlap < pop_cfg.ortho_tol:
                        known.meta["multiplicity"] = known.meta.get("multiplicity", 1) + 1
                        deflation.add(rep)
                        _LOGGER.info("mode at mu=%.10g gains an orthogonal partner", known.mu)
                    else:
                        rejected[REJECT_DUPLICATE] += 1
                    continue
                if len(modes) >= pop_cfg.target_modes:
                    break
                if overlap >= pop_cfg.ortho_tol:
                    rejected[REJECT_DUPLICATE] += 1
                    continue
                rep.meta["multiplicity"] = 1
                modes.append(rep)
                deflation.add(rep)
                accepted_now += 1

            modes.sort(key=lambda e: e.mu)
            _LOGGER.info(
                "%s generation %d: %d candidates, %d accepted, %d/%d modes",
                spec.name, generation, len(candidates), accepted_now, len(modes), pop_cfg.target_modes,
            )
            if len(modes) >= pop_cfg.target_modes:
                break
    finally:
        if executor is not None:
            executor.shutdown()

    if not modes:
        _LOGGER.warning("%s: no eigenpair accepted after %d generations, rejections %s",
                        spec.name, generation, rejected)

    if provenance is None:
        provenance = {
            "problem": spec.as_dict(),
            "basis": replace(basis_cfg, bandwidth=bandwidth).as_dict(),
            "collocation": colloc_cfg.as_dict(),
            "weights": weights.as_dict(),
            "acs": acs_cfg.as_dict(),
            "population": pop_cfg.as_dict(),
        }
    return SpectrumReport(
        problem=spec.name,
        modes=modes,
        rejected=rejected,
        generations_used=generation,
        strand_wall_times=wall_times,
        total_wall_time=time.perf_counter() - start,
        provenance=provenance,
        strands_run=strands_run,
        respawns=respawns,
    )
