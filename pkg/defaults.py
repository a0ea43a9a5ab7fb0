# Solver stopping rules
FIT_TOL = 1e-7
DESIGN_TOL = 1e-7
MAX_ITER = 50000

# SVD sweeps before giving up
SVD_MAX_SWEEPS = 10000

# Singular values below this fraction of the largest one count as zero.
RANK_THRESHOLD = 1e-6

# Weights above this fraction of the largest weight form the support.
ACTIVITY_THRESHOLD = 1e-8

# Concentration used for "trace" entries, in ppm.
TRACE_CONCENTRATION = 1e-6

# Tolerance on unit column norms of ingested ingredient tables.
UNIT_NORM_TOLERANCE = 1e-9

PERCEPT_MIN = 0.0
PERCEPT_MAX = 100.0

CV_FOLDS = 5
CV_LAMBDA_GRID = '1e-2:1e6:log9'

REGULARIZERS = ['l1', 'l2sq', 'none']
