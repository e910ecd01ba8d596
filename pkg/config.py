"""
Configuration constants for the bilocal network checker.
Centralizes all tolerances, thresholds, and settings.
"""
import math

# Numerical tolerances
HERMITIAN_TOL = 1e-10  # Max |M - M^dagger| entry accepted as Hermitian
PARAM_TOL = 1e-12  # Normalization / positivity slack on state parameters
TRACE_TOL = 1e-10  # Unit-trace and eigenvalue-sum checks
PSD_TOL = 1e-10  # Smallest eigenvalue still counted as nonnegative
VERDICT_TOL = 1e-9  # Values within this of a threshold are "boundary"
RADICAND_TOL = 1e-12  # Negative radicands down to -RADICAND_TOL are clamped to 0
BRANCH_PROB_FLOOR = 1e-14  # Swap branches below this probability are null
DEGENERATE_TOL = 1e-14  # W and N1 at or below this are degenerate

# Jacobi eigen-solver
JACOBI_OFFDIAG_TOL = 1e-12  # Off-diagonal Frobenius norm stopping value
JACOBI_MAX_SWEEPS = 100

# Bilocal optimizer
GOLDEN_STEP = 1e-8  # Final bracket width of each golden-section refinement
COORDINATE_GRID_POINTS = 12  # Coarse grid per coordinate before refinement
MAX_COORDINATE_SWEEPS = 25  # Sweep cap per start
SWEEP_IMPROVEMENT_TOL = 1e-13  # Stop once a full sweep gains less than this
START_THETAS = (math.pi / 4, 3 * math.pi / 4)
START_PHI_PATTERNS = ((0.0, math.pi), (math.pi, 0.0))
CANONICAL_THETA = math.pi / 4
CANONICAL_PHIS = (0.0, math.pi)

# Visibility thresholds for Werner pairs
V_BILOC = 0.5
V_LOC = 1 / math.sqrt(2)

# Steering comparison slice
FIG4_P = 0.24
FIG4_Q = 0.0

# Hidden nonlocality filter
HIDDEN_FILTER_EPS = 1e-3

# Monte-Carlo property runs
MONTE_CARLO_SEED = 20160713
MONTE_CARLO_CHUNK = 10_000

# Output formatting
REPORT_SIG_DIGITS = 12
CSV_FLOAT_FORMAT = "%.12g"
AXIS_DECIMALS = 12  # Grid values are rounded to this many decimals

# Environment
OUTPUT_DIR_ENV = "BILOCAL_OUTPUT_DIR"  # Default directory for scan output

# CLI exit codes
EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1  # Unexpected failure inside the checker
EXIT_INPUT_ERROR = 2
EXIT_IO_ERROR = 3
