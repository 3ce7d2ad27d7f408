# pytdpt/constants.py

# --- Unit Conversion ---
# Atomic units of time per femtosecond.
FS_TO_AU = 41.3413745758

# --- Propagation Limits ---
MAX_ORDER = 32
MIN_GRID_POINTS = 16
MIN_POINTS_PER_SIGMA = 4

# --- Tolerances ---
IMAGINARY_RESIDUE_TOL = 1e-12
STATIONARY_AGREEMENT_TOL = 1e-11

# Density share allowed in the two edge cells before a run is aborted.
EDGE_CELL_LIMIT = 1e-8
# Density share allowed in the outer band before a warning is emitted.
BOUNDARY_BAND_FRACTION = 0.10
BOUNDARY_BAND_LIMIT = 1e-6

# --- Oracle Capacity Guards ---
CLOSED_FORM_MAX_STEPS = 8
CLOSED_FORM_MAX_ORDER = 5
ENUMERATION_MAX_TERMS = 10_000_000
ANNIHILATION_MAX_STEPS = 4
ANNIHILATION_MAX_TWO_M = 8
ANNIHILATION_MAX_GRID = 16
PYRAMID_MAX_TWO_M = 12
MAX_COUNT_BITS = 63
MAX_BRACKET_BITS = 4096

# --- Scenarios ---
SCENARIOS = ['single', 'dt_k_sweep', 'gradient_sweep', 'chirp_sweep']
PULSE_VARIANTS = ['unchirped', 'chirped', 'constant']
ERF_FORMS = ['consistent', 'published']

# --- Output ---
CSV_FLOAT_FORMAT = '%.16e'
MANIFEST_NAME = 'manifest.json'

# --- CLI Exit Codes ---
EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_GUARD_ERROR = 2
