"""JSON run configuration.

Every section is validated with a voluptuous schema that materializes its
defaults, so the resulting ``RunConfig`` echoes the effective value of
every tunable back into the reports.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import voluptuous as vol

from .assembly import LossWeights
from .const import (
    DEFAULT_ACCEPT_RESIDUAL_TOL,
    DEFAULT_ALPHA_ORTHO,
    DEFAULT_ALPHA_REF,
    DEFAULT_BASIS_SEED,
    DEFAULT_CLUSTER_REL_TOL,
    DEFAULT_COLLOCATION_SEED,
    DEFAULT_FIELD_GRID,
    DEFAULT_GD_BETA1,
    DEFAULT_GD_BETA2,
    DEFAULT_GD_LR,
    DEFAULT_GD_STEPS,
    DEFAULT_LOSS_TOL,
    DEFAULT_MAX_GENERATIONS,
    DEFAULT_MAX_ITERS,
    DEFAULT_MAX_RESPAWNS,
    DEFAULT_MU_TOL,
    DEFAULT_N_INTERIOR,
    DEFAULT_ORACLE_GRID_H,
    DEFAULT_ORTHO_TOL,
    DEFAULT_POPULATION_SEED,
    DEFAULT_STRANDS,
    DEFAULT_SVD_CUTOFF,
    DEFAULT_TARGET_MODES,
    DEFAULT_TIKHONOV,
    DEFAULT_U_REF,
    DEFAULT_WIDTH,
    MODE_POPULATION,
    REFERENCE_POLICIES,
    REFERENCE_RANDOM,
    RUN_MODES,
)
from .exceptions import ConfigurationError
from .population import BasisConfig, CollocationConfig, PopulationConfig
from .problems import ProblemSpec, catalog, problem_from_dict
from .solver import ACSConfig, GDConfig

_POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
_SEED = vol.All(vol.Coerce(int), vol.Range(min=0))
_NON_NEGATIVE = vol.All(vol.Coerce(float), vol.Range(min=0))
_POSITIVE = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
_UNIT_OPEN = vol.All(vol.Coerce(float), vol.Range(min=0, max=1, min_included=False, max_included=False))
_UNIT_HALF_OPEN = vol.All(vol.Coerce(float), vol.Range(min=0, max=1, max_included=False))

BASIS_SCHEMA = vol.Schema({
    vol.Optional("width", default=DEFAULT_WIDTH): _POSITIVE_INT,
    vol.Optional("bandwidth", default=None): vol.Any(None, _POSITIVE),
    vol.Optional("seed", default=DEFAULT_BASIS_SEED): _SEED,
})

COLLOCATION_SCHEMA = vol.Schema({
    vol.Optional("n_interior", default=DEFAULT_N_INTERIOR): _POSITIVE_INT,
    vol.Optional("n_boundary", default=None): vol.Any(None, _POSITIVE_INT),
    vol.Optional("reference_policy", default=REFERENCE_RANDOM): vol.In(REFERENCE_POLICIES),
    vol.Optional("reference_point", default=None): vol.Any(None, [vol.Coerce(float)]),
    vol.Optional("u_ref", default=DEFAULT_U_REF): vol.Coerce(float),
    vol.Optional("seed", default=DEFAULT_COLLOCATION_SEED): _SEED,
})

WEIGHTS_SCHEMA = vol.Schema({
    vol.Optional("alpha_bc", default=None): vol.Any(None, _NON_NEGATIVE),
    vol.Optional("alpha_ref", default=DEFAULT_ALPHA_REF): _POSITIVE,
    vol.Optional("alpha_ortho", default=DEFAULT_ALPHA_ORTHO): _NON_NEGATIVE,
})

ACS_SCHEMA = vol.Schema({
    vol.Optional("max_iters", default=DEFAULT_MAX_ITERS): _POSITIVE_INT,
    vol.Optional("loss_tol", default=DEFAULT_LOSS_TOL): _NON_NEGATIVE,
    vol.Optional("tikhonov", default=DEFAULT_TIKHONOV): _NON_NEGATIVE,
    vol.Optional("svd_cutoff", default=DEFAULT_SVD_CUTOFF): _NON_NEGATIVE,
    vol.Optional("mu_tol", default=DEFAULT_MU_TOL): _NON_NEGATIVE,
})

POPULATION_SCHEMA = vol.Schema({
    vol.Optional("strands_per_generation", default=DEFAULT_STRANDS): _POSITIVE_INT,
    vol.Optional("max_generations", default=DEFAULT_MAX_GENERATIONS): _POSITIVE_INT,
    vol.Optional("target_modes", default=DEFAULT_TARGET_MODES): _POSITIVE_INT,
    vol.Optional("cluster_rel_tol", default=DEFAULT_CLUSTER_REL_TOL): _UNIT_OPEN,
    vol.Optional("accept_residual_tol", default=DEFAULT_ACCEPT_RESIDUAL_TOL): _POSITIVE,
    vol.Optional("ortho_tol", default=DEFAULT_ORTHO_TOL): _POSITIVE,
    vol.Optional("max_respawns", default=DEFAULT_MAX_RESPAWNS): vol.All(vol.Coerce(int), vol.Range(min=0)),
    vol.Optional("seed", default=DEFAULT_POPULATION_SEED): _SEED,
})

GD_SCHEMA = vol.Schema({
    vol.Optional("lr", default=DEFAULT_GD_LR): _NON_NEGATIVE,
    vol.Optional("beta1", default=DEFAULT_GD_BETA1): _UNIT_HALF_OPEN,
    vol.Optional("beta2", default=DEFAULT_GD_BETA2): _UNIT_HALF_OPEN,
    vol.Optional("steps", default=DEFAULT_GD_STEPS): vol.All(vol.Coerce(int), vol.Range(min=0)),
    vol.Optional("time_budget", default=None): vol.Any(None, _POSITIVE),
})

OUTPUT_SCHEMA = vol.Schema({
    vol.Optional("directory", default=None): vol.Any(None, str),
    vol.Optional("emit_fields", default=False): vol.Boolean(),
    vol.Optional("field_grid", default=DEFAULT_FIELD_GRID): vol.All(vol.Coerce(int), vol.Range(min=2)),
    vol.Optional("compare_oracle", default=True): vol.Boolean(),
    vol.Optional("oracle_grid_h", default=DEFAULT_ORACLE_GRID_H): _POSITIVE,
})

RUN_SCHEMA = vol.Schema({
    vol.Required("problem"): vol.Any(str, dict),
    vol.Optional("mode", default=MODE_POPULATION): vol.In(RUN_MODES),
    vol.Optional("mu0", default=None): vol.Any(None, vol.Coerce(float)),
    vol.Optional("basis", default=dict): BASIS_SCHEMA,
    vol.Optional("collocation", default=dict): COLLOCATION_SCHEMA,
    vol.Optional("weights", default=dict): WEIGHTS_SCHEMA,
    vol.Optional("acs", default=dict): ACS_SCHEMA,
    vol.Optional("population", default=dict): POPULATION_SCHEMA,
    vol.Optional("gd", default=dict): GD_SCHEMA,
    vol.Optional("output", default=dict): OUTPUT_SCHEMA,
})


@dataclass(frozen=True)
class OutputConfig:
    """Where and what the command-line front end writes."""

    directory: str | None = None
    emit_fields: bool = False
    field_grid: int = DEFAULT_FIELD_GRID
    compare_oracle: bool = True
    oracle_grid_h: float = DEFAULT_ORACLE_GRID_H

    def as_dict(self) -> dict[str, Any]:
        return {
            "directory": self.directory,
            "emit_fields": self.emit_fields,
            "field_grid": self.field_grid,
            "compare_oracle": self.compare_oracle,
            "oracle_grid_h": self.oracle_grid_h,
        }


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with every default materialized."""

    problem: ProblemSpec
    problem_key: str | None = None
    mode: str = MODE_POPULATION
    mu0: float | None = None
    basis: BasisConfig = field(default_factory=BasisConfig)
    collocation: CollocationConfig = field(default_factory=CollocationConfig)
    weights: LossWeights = field(default_factory=LossWeights)
    acs: ACSConfig = field(default_factory=ACSConfig)
    population: PopulationConfig = field(default_factory=PopulationConfig)
    gd: GDConfig = field(default_factory=GDConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def initial_mu(self) -> float:
        """Single-strand start: explicit ``mu0`` or the lower search bound."""
        return self.problem.search_bounds[0] if self.mu0 is None else self.mu0

    def as_dict(self) -> dict[str, Any]:
        """Provenance echo of every effective setting."""
        basis = replace(self.basis, bandwidth=self.basis.resolve_bandwidth(self.problem))
        return {
            "problem_key": self.problem_key,
            "problem": self.problem.as_dict(),
            "mode": self.mode,
            "mu0": self.initial_mu,
            "basis": basis.as_dict(),
            "collocation": self.collocation.as_dict(),
            "weights": self.weights.as_dict(),
            "acs": self.acs.as_dict(),
            "population": self.population.as_dict(),
            "gd": self.gd.as_dict(),
            "output": self.output.as_dict(),
        }


def _path(err: vol.Invalid) -> str:
    return ".".join(str(p) for p in err.path) or "config"


def parse_config(data: Any) -> RunConfig:
    """Validate a decoded JSON document and build a ``RunConfig``."""
    try:
        conf = RUN_SCHEMA(data)
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        raise ConfigurationError(first.error_message, _path(first)) from err
    except vol.Invalid as err:
        raise ConfigurationError(err.error_message, _path(err)) from err

    problem_key: str | None = None
    if isinstance(conf["problem"], str):
        problem_key = conf["problem"]
        problem = catalog(problem_key)
    else:
        try:
            problem = problem_from_dict(conf["problem"])
        except (KeyError, TypeError, ValueError, IndexError) as err:
            raise ConfigurationError(f"invalid inline problem ({err})", "problem") from err

    colloc = dict(conf["collocation"])
    if colloc["reference_point"] is not None:
        colloc["reference_point"] = tuple(colloc["reference_point"])

    return RunConfig(
        problem=problem,
        problem_key=problem_key,
        mode=conf["mode"],
        mu0=conf["mu0"],
        basis=BasisConfig(**conf["basis"]),
        collocation=CollocationConfig(**colloc),
        weights=LossWeights.for_problem(problem, **conf["weights"]),
        acs=ACSConfig(**conf["acs"]),
        population=PopulationConfig(**conf["population"]),
        gd=GDConfig(**conf["gd"]),
        output=OutputConfig(**conf["output"]),
    )


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigurationError(f"not valid JSON ({err.msg} at line {err.lineno})", str(path)) from err
    return parse_config(data)
