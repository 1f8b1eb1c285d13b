# declab/core/suite_config.py
# Desk-scale suites shared by the CLI defaults and the slow tests.

from fractions import Fraction

DELTAS = [Fraction(1, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 32)]
NUS = [Fraction(1, 4), Fraction(1, 8)]
P_VALUES = [4.5, 5.0, 5.5]

# products of primes = 1 mod 4 grow N
R_SUITE = [1, 2, 5, 25, 325, 1105]

FAMILY_DRAWS = 32
DEFAULT_SEED = 7

# bounds table defaults: p in {4.1, ..., 5.9}, delta in {2^-8, ..., 2^-64}
BOUNDS_P_GRID = [round(4.1 + 0.2 * k, 10) for k in range(10)]
BOUNDS_LOG2_INV_DELTA = [8, 16, 32, 64]

# circle ladder defaults
LADDER_C0 = Fraction(1, 128)

# frozen bound constants C', C'', C''' are measured on this grid with C = 2, kappa = 1
CONSTANTS_LOG2_INV_DELTA = [32, 64, 128, 256, 512, 1024]
CONSTANTS_C = 2.0
