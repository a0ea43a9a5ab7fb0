TOOL_NAME = 'olfact'
TOOL_VERSION = '1.0.0'

LOG_FILE = 'olfact.log'

# synth-data output files
COMPOUNDS_FILE = 'compounds.csv'
PERCEPTS_FILE = 'percepts.csv'
DICTIONARY_FILE = 'dictionary.csv'
GROUND_TRUTH_FILE = 'ground_truth_map.json'
MALODOR_FILE_TEMPLATE = 'malodor_{}.csv'
HIDDEN_FILE = 'hidden.csv'
COVER_FILE = 'cover.csv'
INGREDIENTS_FILE = 'ingredients.csv'
SCENARIO_FILE = 'scenario.json'
INPUT_MIXTURE_FILE = 'input_mixture.csv'
TARGET_FILE = 'target.csv'

META_SUFFIX = '.meta.json'
