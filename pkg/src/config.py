"""Environment-driven configuration and numeric constants."""

import os

from dotenv import load_dotenv

_ = load_dotenv()

# Logging level for the CLI (DEBUG, INFO, WARNING, ...)
FLEXBLOCK_LOG = os.getenv("FLEXBLOCK_LOG", "INFO").upper()

# Default number of concurrent sweep runs
FLEXBLOCK_JOBS = int(os.getenv("FLEXBLOCK_JOBS", "1"))

# Base directory for relative profile paths (None = scenario file's directory)
FLEXBLOCK_DATA_DIR = os.getenv("FLEXBLOCK_DATA_DIR") or None

# Absolute tolerance on per-unit energy balance residuals (MWh)
BALANCE_TOL = 1e-9

# Absolute tolerance on the electric power balance (MW)
POWER_BALANCE_TOL = 1e-6

# Lower heating value of hydrogen
H2_LHV_KWH_PER_KG = 33.33

# Ridge added to the QP Hessian before factorization
QP_RIDGE = 1e-10

DEFAULT_STEP_MINUTES = 5
DEFAULT_RUN_HOURS = 336
