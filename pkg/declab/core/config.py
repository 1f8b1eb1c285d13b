# declab/core/config.py
# Global configuration for declab: environment switches and numerical defaults.

import os

from dotenv import load_dotenv

load_dotenv()

# =====================================
# Environment switches
# =====================================

# VERBOSE:
# When True, services log every refinement step and every job they run.
# Example uses:
#   - Watch quadrature doublings converge
#   - See which family member achieved a maximum ratio
VERBOSE = os.getenv("DECLAB_VERBOSE", "0") == "1"

LOG_LEVEL = os.getenv("DECLAB_LOG_LEVEL", "WARNING").upper()

# Parallelism cap for grid sweeps and job lists
THREADS = max(1, int(os.getenv("DECLAB_THREADS", str(os.cpu_count() or 1))))

# Report database (unset -> runs are not recorded)
DATABASE_URL = os.getenv("DECLAB_DB") or None

# Optional override for the frozen envelope table
ENVELOPES_PATH = os.getenv("DECLAB_ENVELOPES") or None

# Rule "stable" rows pass when measured/frozen - 1 stays within this band
ENVELOPE_STABILITY = 0.05

VERSION = "0.4.0"

# =====================================
# Weights
# =====================================
WEIGHT_EXPONENT = 100.0        # w_B(x) = (1 + |x - c|/R)^(-100)
WEIGHT_EXTENT_FACTOR = 8.0     # weighted integrals never reach past the 8x square
WEIGHT_CUTOFF = 1e-16          # w^s below this is treated as tail

# =====================================
# Quadrature
# =====================================
MAX_SPACING = 0.25             # grid spacing cap for sampled fields
QUAD_TOLERANCE = 1e-8          # relative sup-norm change between doublings
QUAD_MAX_DOUBLINGS = 20
QUAD_ORDER = 16                # Gauss-Legendre nodes per panel
QUAD_CHUNK = 2_000_000         # points x nodes evaluated per block

# =====================================
# Bounds
# =====================================
DEPTH_SCAN_MAX = 64
NCHOICE_SCAN_MAX = 1_000_000
TAU_GRID_POINTS = 1000
TAU_GRID_MAX = 0.25

# =====================================
# Lattice & correlations
# =====================================
INTEGER_GUARD = 2 ** 62
BRUTE_MAX_POINTS = 12
HASH_MAX_POINTS = 5000
HASH_SHARD_SIZE = 4_000_000    # keys materialised per shard of lambda_1
DFT_RESIDUAL = 1e-6
