"""
Configuration constants for qws.

Every tolerance, cap and naming constant used by the package lives here.
All code references these constants rather than hardcoded numbers.
"""

import os

from .errors import ParameterError

# Version
__version__ = "1.0.0"

# Naming
PACKAGE_CODE = "qws"
PACKAGE_FULL_NAME = "Quantum Walk Spectra"
THREADS_ENV_VAR = "QWS_THREADS"

# Graph input
ALLOW_PARALLEL_EDGES = False  # parallel edges rejected unless a caller opts in
COMMENT_PREFIX = "#"

# Desk-scale cap for dense |A| x |A| operators
MAX_DENSE_DIMENSION = 4096

# Weight scheme validation
WEIGHT_TOL = 1e-10      # normalization / detailed balance
C_PRIME_TOL = 1e-10     # relative spread of c' across vertices

# Matrices and spectra
SUPPORT_TOL = 1e-12     # positive support threshold on floating matrices
CLUSTER_TOL = 1e-7      # eigenvalue clustering into multiplicities
RESIDUAL_TOL = 1e-8     # ||Mv - lambda v|| <= RESIDUAL_TOL * ||M||_2
OPERATOR_TOL = 1e-10    # entrywise operator identities
SPECTRUM_TOL = 1e-7     # multiset comparison of spectra
SUPPORT_SPECTRUM_TOL = 1e-6
RANK_TOL = 1e-9         # relative singular value cutoff for rank / null space
ZERO_VECTOR_TOL = 1e-10

# Quantum graph
ALPHA_CAP = 1e6
ROOT_TOL = 1e-6
ROOT_WIDTH = 1e-9

# Zeta poles and output
ZERO_POLE_TOL = 1e-6
CSV_DIGITS = 17
SVG_SIZE_PX = 600
SVG_HASH_SALT = "qws"


def thread_count() -> int:
    """Worker cap for corpus runs: $QWS_THREADS, else the number of cores."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ParameterError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
        if value < 1:
            raise ParameterError(f"{THREADS_ENV_VAR} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1
