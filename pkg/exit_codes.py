SUCCESS = 0
INPUT_ERROR = 2
SOLVER_ERROR = 3
CONFIG_ERROR = 4
