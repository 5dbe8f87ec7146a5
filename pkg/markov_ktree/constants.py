# Numerical Tolerances
NORMALIZATION_TOL = 1e-9
IDENTITY_TOL = 1e-9
POINTWISE_TOL = 1e-12
SCORE_TOL = 1e-9
TIE_TOL = 1e-12

# Table Configuration
DEFAULT_TABLE_CAP = 20
DEFAULT_PSEUDOCOUNT = 0.0

# Oracle Configuration
ORACLE_CAPS = {1: 9, 2: 9, 3: 8}
ORACLE_CAP_FALLBACK = 7
DEFAULT_ORACLE_TRIALS = 50
DEFAULT_ORACLE_MAX_N = 8

# Randomized Checks
DEFAULT_SEED = 0
DEFAULT_INVARIANCE_TRIALS = 5
ORDER_SAMPLING_ATTEMPTS = 40

# Output
MODEL_FILENAME = "model.json"
KTREE_DOT_FILENAME = "ktree.dot"
CLIQUE_TREE_DOT_FILENAME = "clique_tree.dot"
REPORT_FILENAME = "report.json"
