"""eigenacs: differential eigenvalue problems by alternating convex search.

A shallow network with a frozen random cosine feature layer turns the
physics-informed eigenvalue loss into a biconvex problem in the output
weights and the eigenvalue parameter. Alternating closed-form updates of
the two blocks decrease the loss monotonically.

Problems supported:
  - Euler column buckling (pinned, clamped, clamped-pinned, free end)
  - Dirichlet Helmholtz on the unit square and the L-shaped domain
  - Simply supported thin plate vibration
"""
from .assembly import LossSystem, LossWeights, ModeShape, assemble, design_matrix, loss_terms, loss_value
from .config import RunConfig, load_config, parse_config
from .exceptions import (
    CatalogError,
    ConfigurationError,
    DegenerateDirectionError,
    EigenAcsError,
    NumericalFailureError,
    OracleError,
    UnsupportedOrderError,
)
from .features import DerivMultiIndex, FeatureBasis, build_basis, eval_features, evaluate_field
from .oracles import (
    OracleSpectrum,
    buckling_oracle,
    fd_dirichlet_eigenvalues,
    lshape_fd_oracle,
    plate_ss_oracle,
    rectangle_helmholtz_oracle,
    reference_spectrum,
)
from .population import (
    BasisConfig,
    CollocationConfig,
    PopulationConfig,
    SpectrumReport,
    cluster_estimates,
    run_population,
)
from .problems import (
    BoundaryConditionSpec,
    CollocationSet,
    Domain,
    Interval,
    LinearOperatorSpec,
    LShape,
    ProblemSpec,
    Rectangle,
    catalog,
    problem_from_dict,
    sample_collocation,
)
from .solver import (
    ACSConfig,
    EigenpairEstimate,
    GDConfig,
    gd_baseline,
    run_acs,
    update_mu,
    update_weights,
)

__version__ = "0.1.0"

__all__ = [
    "ACSConfig",
    "BasisConfig",
    "BoundaryConditionSpec",
    "CatalogError",
    "CollocationConfig",
    "CollocationSet",
    "ConfigurationError",
    "DegenerateDirectionError",
    "DerivMultiIndex",
    "Domain",
    "EigenAcsError",
    "EigenpairEstimate",
    "FeatureBasis",
    "GDConfig",
    "Interval",
    "LShape",
    "LinearOperatorSpec",
    "LossSystem",
    "LossWeights",
    "ModeShape",
    "NumericalFailureError",
    "OracleError",
    "OracleSpectrum",
    "PopulationConfig",
    "ProblemSpec",
    "Rectangle",
    "RunConfig",
    "SpectrumReport",
    "UnsupportedOrderError",
    "assemble",
    "buckling_oracle",
    "build_basis",
    "catalog",
    "cluster_estimates",
    "design_matrix",
    "eval_features",
    "evaluate_field",
    "fd_dirichlet_eigenvalues",
    "gd_baseline",
    "load_config",
    "loss_terms",
    "loss_value",
    "lshape_fd_oracle",
    "parse_config",
    "plate_ss_oracle",
    "problem_from_dict",
    "rectangle_helmholtz_oracle",
    "reference_spectrum",
    "run_acs",
    "run_population",
    "sample_collocation",
    "update_mu",
    "update_weights",
]
