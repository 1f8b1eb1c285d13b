# declab/__init__.py
# Numerical laboratory for effective l^2 L^p decoupling constants and lattice-circle correlations.

from declab.core.config import VERSION

__version__ = VERSION
