# declab/models/__init__.py
# Centralized imports for all schemas and the run log table

# Geometry
from .geometry_model import Interval, SquareRegion, WeightKind, OrientedBox, GridSpec, UNIT_INTERVAL

# Curves and densities
from .curve_model import CurveSpec, DensityFunction, PARABOLA, ZERO, ONE

# Sampled fields
from .field_model import SampledField, NormMode

# Experiments
from .experiment_model import ExperimentSpec, BilinearSpec, RatioReport

# Bounds
from .bound_model import BoundLedger, LadderParams, ExponentProfile

# Lattice and correlations
from .lattice_model import LatticeCircle, ArcAssignment, CorrelationResult, ExpSumSpec

# Runs
from .run_model import RunConfig, RunRecord
