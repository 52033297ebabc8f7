import os
import logging

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.environ.get("BIT_DATA_DIR", os.path.join(BASE_DIR, "data"))

# total term evaluations a single command may spend
BUDGET = int(os.environ.get("BIT_BUDGET", 10**8))

# subset sweeps go exhaustive below this many nonempty subsets, sampled above it
SAMPLE_SIZE = int(os.environ.get("BIT_SAMPLE_SIZE", 512))
SEED = int(os.environ.get("BIT_SEED", 20240601))

API_KEY = os.environ.get("BIT_API_KEY") or None

LOG_LEVEL_NAME = os.environ.get("BIT_LOG_LEVEL", "INFO").upper()
try:
    LOG_LEVEL = getattr(logging, LOG_LEVEL_NAME)
    if not isinstance(LOG_LEVEL, int):
        raise AttributeError(LOG_LEVEL_NAME)
except AttributeError:
    LOG_LEVEL = logging.INFO
