"""This module contains configuration constants used across the framework"""

TOOL_VERSION = "0.3.0"

# Degree ceiling for every sweep.
MAX_DEGREE = 8

# Čech parameters (k, M) when none are given on the command line.
DEFAULT_CECH_K = 3
DEFAULT_CECH_M = 3

# Randomized nilradical samples
DEFAULT_SEED = 20240611
DEFAULT_TRIALS = 8
# Sample coefficients are drawn from {-SAMPLE_RANGE..SAMPLE_RANGE} without 0.
SAMPLE_RANGE = 7

# Number of extra degrees a localization rank may take to reach its plateau.
DEFAULT_WINDOW = 6

# Verification scan for the w-presentation Hilbert function.
DEFAULT_UD_CHECK_DEGREE = 3

# Gröbner resource ceilings
MAX_BASIS_SIZE = 4000
MAX_PAIRS = 400000

# Cache config
CACHE_ENV_VAR = "PSLAB_CACHE"
DEFAULT_CACHE_DIR = ".cache"

# Exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_LIMIT = 3
EXIT_INVARIANT_VIOLATION = 4

# Error records longer than this are shortened before logging.
ERROR_MESSAGE_LIMIT = 1000

# The limit on how many degree tasks a single run processes
MAX_TASK_COUNT = 100
