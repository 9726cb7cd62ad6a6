# constants.py
"""
Numerical constants, tolerances and published reference values for the laboratory
"""

# ===== Propagation =====

ISOMETRY_TOLERANCE = 1e-12     # |Σp - 1| allowed after a full propagation
ISOMETRY_DRIFT_PER_ELEMENT = 1e-15   # |Σp - 1| allowed per element on long circuits
RESIDUAL_AMPLITUDE_TOLERANCE = 1e-12

# ===== Fisher information =====

FISHER_BIN_FLOOR = 1e-14       # bins below this probability are screened
FISHER_SLOPE_FLOOR = 1e-12     # screened bins may not carry a larger |dp|

# ===== θ→0 extrapolation =====

DEFAULT_THETA_GRID = (1e-2, 5e-3, 2.5e-3)
EXTRAPOLATION_ORDER = 2        # F(θ) is even in θ, so the error series is in θ²
EXTRAPOLATION_TOLERANCE = 1e-6
GRID_RATIO_TOLERANCE = 1e-9

# ===== Flux cross-check =====

FLUX_TOLERANCE = 1e-9

# ===== Circuit size guards =====

MIN_OUTER_SPLITTERS = 2
MIN_INNER_SPLITTERS = 2
FULL_SIZE_GUARD = 10**6        # N·M
FISHER_SIMULATION_MAX_N = 8
FISHER_SIMULATION_MAX_M = 16

# ===== Asymptotic regime (M >> N >> 1) =====

ASYMPTOTIC_MIN_N = 10
ASYMPTOTIC_MIN_M_OVER_N = 10

# ===== Reduced protocol =====

REDUCED_OUTER_TRANSMISSION = 4 / 5
REDUCED_INNER_TRANSMISSION = 1 / 2
REDUCED_INNER_SPLITTERS = 2

# ===== Repetition planning =====

DEFAULT_ERROR_TARGET = 0.05

# ===== Published values and their tolerances =====

PUBLISHED_F_REF = 4.0
PUBLISHED_F_ZERO_THETA1 = 8 / 5
PUBLISHED_F_ONE_THETA1 = 8 / 5
PUBLISHED_F_ONE_THETA2 = 2 / 5
PUBLISHED_P_D0_ZERO = 1 / 25
PUBLISHED_P_D0_ONE = 0.0
PUBLISHED_N_GAMMA = 74
PUBLISHED_CONTRIBUTION_SUM = 9 / 20
PUBLISHED_D_VIO = 33.3

F_REF_TOLERANCE = 1e-9
F_LIMIT_TOLERANCE = 1e-6
F_CURVE_TOLERANCE = 1e-9
P_D0_TOLERANCE = 1e-12
D_VIO_TOLERANCE = 1e-9
POSTSELECTED_ZERO_TOLERANCE = 1e-12

F_REF_CHECK_THETAS = (0.05, 0.3, 0.7, 1.2)
THETA1_CURVE_POINTS = (0.05, 0.1, 0.2, 0.3)

# ===== CLI =====

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

TABLE_SIGNIFICANT_DIGITS = 6
CSV_FLOAT_FORMAT = "%.17g"
