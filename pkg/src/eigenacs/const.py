"""Constants for the eigenacs solver.

Defaults, catalog keys and status names shared by the solver modules,
the configuration layer and the command-line front end.
"""
import math
from typing import Final

# Feature basis
MAX_DERIVATIVE_ORDER: Final = 4
SUPPORTED_DIMENSIONS: Final = (1, 2)
DEFAULT_WIDTH: Final = 500
DEFAULT_BASIS_SEED: Final = 0

# Catalog keys
PROBLEM_BUCKLING_PIN_PIN: Final = "buckling_pin_pin"
PROBLEM_BUCKLING_FIXED_FIXED: Final = "buckling_fixed_fixed"
PROBLEM_BUCKLING_FIXED_PIN: Final = "buckling_fixed_pin"
PROBLEM_BUCKLING_FIXED_FREE: Final = "buckling_fixed_free"
PROBLEM_HELMHOLTZ_SQUARE: Final = "helmholtz_square"
PROBLEM_HELMHOLTZ_LSHAPE: Final = "helmholtz_lshape"
PROBLEM_PLATE_SS: Final = "plate_ss"

CATALOG_NAMES: Final = (
    PROBLEM_BUCKLING_PIN_PIN,
    PROBLEM_BUCKLING_FIXED_FIXED,
    PROBLEM_BUCKLING_FIXED_PIN,
    PROBLEM_BUCKLING_FIXED_FREE,
    PROBLEM_HELMHOLTZ_SQUARE,
    PROBLEM_HELMHOLTZ_LSHAPE,
    PROBLEM_PLATE_SS,
)

# Buckling boundary-condition families (oracle keys)
BC_PIN_PIN: Final = "pin_pin"
BC_FIXED_FIXED: Final = "fixed_fixed"
BC_FIXED_PIN: Final = "fixed_pin"
BC_FIXED_FREE: Final = "fixed_free"

BUCKLING_FAMILIES: Final = {
    PROBLEM_BUCKLING_PIN_PIN: BC_PIN_PIN,
    PROBLEM_BUCKLING_FIXED_FIXED: BC_FIXED_FIXED,
    PROBLEM_BUCKLING_FIXED_PIN: BC_FIXED_PIN,
    PROBLEM_BUCKLING_FIXED_FREE: BC_FIXED_FREE,
}

# Oracle families
ORACLE_BUCKLING: Final = "buckling"
ORACLE_RECTANGLE_HELMHOLTZ: Final = "rectangle_helmholtz"
ORACLE_LSHAPE_FD: Final = "lshape_fd"
ORACLE_PLATE_SS: Final = "plate_ss"

SOURCE_CLOSED_FORM: Final = "closed_form"
SOURCE_CHAR_EQUATION: Final = "char_equation"
SOURCE_FINITE_DIFFERENCE: Final = "finite_difference"

# Boundary weight of the buckling columns, whose interior rows carry fourth
# derivatives
ALPHA_BC_BUCKLING: Final = 1e5

# Per-problem feature bandwidths (half-width of the uniform sampling interval)
BANDWIDTH_BUCKLING: Final = 1.0
BANDWIDTH_HELMHOLTZ: Final = 8.0 * math.pi
BANDWIDTH_PLATE: Final = math.pi

# Initial-guess brackets for the linear eigenvalue parameter
SEARCH_BOUNDS_BUCKLING: Final = (1.0, 60.0)
SEARCH_BOUNDS_HELMHOLTZ_SQUARE: Final = (10.0, 150.0)
SEARCH_BOUNDS_HELMHOLTZ_LSHAPE: Final = (5.0, 100.0)
SEARCH_BOUNDS_PLATE: Final = (0.1, 10.0)

# Boundary collocation density (points per unit length of a curve segment)
BOUNDARY_DENSITY_HELMHOLTZ: Final = 60
BOUNDARY_DENSITY_PLATE: Final = 20

# Collocation
DEFAULT_N_INTERIOR: Final = 800
DEFAULT_U_REF: Final = 1.0
DEFAULT_COLLOCATION_SEED: Final = 0
REFERENCE_RANDOM: Final = "random"
REFERENCE_FIXED: Final = "fixed"
REFERENCE_POLICIES: Final = (REFERENCE_RANDOM, REFERENCE_FIXED)

# Loss weights
DEFAULT_ALPHA_BC: Final = 100.0
DEFAULT_ALPHA_REF: Final = 1.0
DEFAULT_ALPHA_ORTHO: Final = 100.0

# Alternating convex search
DEFAULT_MAX_ITERS: Final = 200
DEFAULT_LOSS_TOL: Final = 1e-10
DEFAULT_TIKHONOV: Final = 0.0
DEFAULT_MU_TOL: Final = 1e-9
DEFAULT_SVD_CUTOFF: Final = 1e-12
DEGENERATE_CURVATURE: Final = 1e-300
SUSPECT_REFERENCE_FRACTION: Final = 0.5
RESIDUAL_EPS: Final = 1e-300

# Gradient-descent baseline (adaptive moments)
DEFAULT_GD_LR: Final = 1e-3
DEFAULT_GD_BETA1: Final = 0.9
DEFAULT_GD_BETA2: Final = 0.999
DEFAULT_GD_STEPS: Final = 20000
GD_DIVERGENCE_FACTOR: Final = 1e12

# Population search
DEFAULT_STRANDS: Final = 16
DEFAULT_MAX_GENERATIONS: Final = 10
DEFAULT_TARGET_MODES: Final = 4
DEFAULT_CLUSTER_REL_TOL: Final = 1e-3
DEFAULT_ACCEPT_RESIDUAL_TOL: Final = 1e-3
DEFAULT_ORTHO_TOL: Final = 1e-2
# Midpoint grid (cells per axis) for overlaps between accepted modes
OVERLAP_GRID_CELLS: Final = 128
DEFAULT_MAX_RESPAWNS: Final = 1
DEFAULT_POPULATION_SEED: Final = 0

# Strand statuses
STATUS_CONVERGED: Final = "converged"
STATUS_MAX_ITERS: Final = "max_iters"
STATUS_DEGENERATE: Final = "degenerate"
STATUS_DIVERGED: Final = "diverged"

# Rejection causes in a spectrum report
REJECT_DUPLICATE: Final = "duplicate"
REJECT_DEGENERATE: Final = "degenerate"
REJECT_HIGH_RESIDUAL: Final = "high_residual"
REJECT_SUSPECT_REFERENCE: Final = "suspect_reference"

REJECTION_CAUSES: Final = (
    REJECT_DUPLICATE,
    REJECT_DEGENERATE,
    REJECT_HIGH_RESIDUAL,
    REJECT_SUSPECT_REFERENCE,
)

# Finite-difference oracle
DEFAULT_ORACLE_GRID_H: Final = 1.0 / 32.0
DENSE_EIGH_MAX_UNKNOWNS: Final = 2500

# Run modes and output
MODE_SINGLE: Final = "single"
MODE_POPULATION: Final = "population"
RUN_MODES: Final = (MODE_SINGLE, MODE_POPULATION)
DEFAULT_FIELD_GRID: Final = 64

REPORT_FILE: Final = "report.json"
COMPARE_FILE: Final = "compare.json"
ORACLE_FILE: Final = "oracle.json"
LOSS_HISTORY_FILE: Final = "loss_history.csv"
LOSS_HISTORY_HEADER: Final = ("iter", "half_step", "loss")

ENV_OUT_DIR: Final = "EIGENACS_OUT_DIR"
ENV_THREADS: Final = "EIGENACS_THREADS"
