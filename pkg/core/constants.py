"""
Improvement Game Constants

Limits, tolerances and defaults shared by the solvers, learners and CLI.
Environment overrides are read once, at import.
"""

import os

# =========================
# NUMERIC TOLERANCE
# =========================

# Strict-gain comparisons and Y_{x,v} membership
GAIN_TOLERANCE = 1e-9

# Weight-decay checks on the bandit reduction
WEIGHT_TOLERANCE = 1e-9

# =========================
# SETTINGS & POLICIES
# =========================

SETTINGS = (
    "binary",
    "multiclass-full",
    "multiclass-bandit",
    "weighted-full",
)

TIE_POLICIES = (
    "adversarial",
    "lexicographic-min",
    "seeded-random",
)

DEFAULT_TIE_POLICY = "lexicographic-min"
DEFAULT_SEED = 0

# Learner / adversary registry names (CLI and game-config files)
LEARNERS = (
    "isoa",
    "multiclass-isoa",
    "bisoa",
    "weighted-isoa",
    "reduction",
    "baseline",
    "soa",
    "constant",
)

ADVERSARIES = (
    "tree",
    "exhaustive",
    "random",
)

DEFAULT_LEARNER = {
    "binary": "isoa",
    "multiclass-full": "multiclass-isoa",
    "multiclass-bandit": "bisoa",
    "weighted-full": "weighted-isoa",
}

# =========================
# SEARCH LIMITS
# =========================

# Tree enumeration is exhaustive; keep it at desk scale
MAX_ENUMERATION_DEPTH = 4
MAX_ENUMERATION_NODES = 6

# Fixed-width bound for oracle masks. Masks are Python ints, so everything
# outside the oracle grows past it freely.
MASK_WIDTH = 64

# Exact minimax oracle
MAX_ORACLE_NODES = 8
MAX_ORACLE_HYPOTHESES = MASK_WIDTH
MAX_ORACLE_PUBLICATIONS = 256

# Bandit reduction expert pool
MAX_EXPERT_POOL = int(os.getenv("IMPROVE_POOL_LIMIT", 4096))

# Entries per memo cache (dimension caches, oracle, exhaustive adversary)
MEMO_LIMIT = int(os.getenv("IMPROVE_MEMO_LIMIT", 2_000_000))

# Sentinel above every finite dimension / game value
UNBOUNDED = 1 << 30

# =========================
# GENERATOR
# =========================

# Costs are drawn on this grid, in units of the label value gap
COST_GRID_STEP = 0.25
