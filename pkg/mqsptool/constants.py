"""Constants for the mqsptool package."""

from fractions import Fraction

VERSION = "1.0.0"

# stored coefficients below this Frobenius norm are dropped (float backend)
TAU_TRUNC: float = 1e-10

# evaluation points must satisfy ||z| - 1| <= TORUS_TOL
TORUS_TOL: float = 1e-12

# special-unitary tolerance for sequence entries
UNITARY_TOL: float = 1e-10

# unitarity / det residual allowed for sampled polynomial checks
POLY_UNITARY_TOL: float = 1e-8

# overflow coefficients allowed when peeling one primitive factor
PEEL_TOL: float = 1e-6

# float decomposition limits
HAAH_MAX_DEGREE: int = 64
HAAH_WARN_DEGREE: int = 32

# extra random torus samples for univariate and bivariate checks
UNI_RANDOM_SAMPLES: int = 16
BI_RANDOM_SAMPLES: int = 10
BI_GRID_MIN: int = 5

# non-commuting checks
NC_MAX_WORDS: int = 4096
NC_SAMPLE_DIMS: list[int] = [1, 2, 3]
NC_SAMPLES_PER_DIM: int = 10
NC_DET_RTOL: float = 1e-8

# corner obstruction threshold (float backend)
CORNER_TOL: float = 1e-10

# seed used by checks that sample random torus points
CHECK_SEED: int = 20240229

# exit codes
EXIT_OK: int = 0
EXIT_USAGE: int = 1
EXIT_FAILED: int = 2
EXIT_INCONCLUSIVE: int = 3

# variable labels of the two-variable products
VARIABLES: list[str] = ["a", "b"]

# bracketed coefficients of the 2+2 counterexample, with A = F = 1
# each value is (real part, imaginary part)
F22_COEFFICIENTS: dict[str, tuple[Fraction, Fraction]] = {
    "A": (Fraction(1), Fraction(0)),
    "B": (Fraction(-122, 37), Fraction(-8, 37)),
    "C": (Fraction(114, 37), Fraction(56, 37)),
    "D": (Fraction(362, 111), Fraction(-248, 111)),
    "E": (Fraction(692, 111), Fraction(-719, 222)),
    "F": (Fraction(1), Fraction(0)),
    "G": (Fraction(-122, 37), Fraction(-66, 37)),
    "H": (Fraction(56, 37), Fraction(114, 37)),
    "I": (Fraction(362, 111), Fraction(-418, 111)),
}

# |A| = F22_SCALE_RATIONAL * sqrt(F22_SCALE_RADICAND)
F22_SCALE_RATIONAL = Fraction(6, 25)
F22_SCALE_RADICAND = Fraction(37, 493)

# family solver defaults
FAMILY_GRID_SIZE: int = 21
FAMILY_GRID_RADIUS: float = 15.0
FAMILY_MAX_ITER: int = 100
FAMILY_DEDUP_TOL: float = 1e-6
FAMILY_LINE_TOL: float = 1e-10
FAMILY_PARALLEL_TOL: float = 1e-9

# gradient search defaults
SEARCH_LEARNING_RATE: float = 0.05
SEARCH_MAX_ITER: int = 20000
SEARCH_THRESHOLD: float = 1e-12
SEARCH_RESTARTS: int = 10
SEARCH_MATCH_TOL: float = 1e-6
SEARCH_CORNER_TOL: float = 1e-4

# survey draws at most this many attempts per requested converged sample
SURVEY_ATTEMPT_FACTOR: int = 5
