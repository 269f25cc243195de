import os

from dotenv import load_dotenv

load_dotenv()

# --- Tolerances ---
EPSILON = float(os.getenv("BILLIARDS_EPSILON", "1e-9"))
RAY_T_MIN = float(os.getenv("BILLIARDS_RAY_T_MIN", "1e-12"))
IET_EPSILON = float(os.getenv("BILLIARDS_IET_EPSILON", "1e-12"))
PROBE_EPSILON = float(os.getenv("BILLIARDS_PROBE_EPSILON", "1e-10"))

# --- Analysis defaults ---
MAX_DENOMINATOR = int(os.getenv("BILLIARDS_MAX_DENOMINATOR", "10000"))
DEFAULT_BACKEND = os.getenv("BILLIARDS_BACKEND", "exact").strip().lower()
DEFAULT_HORIZON = int(os.getenv("BILLIARDS_HORIZON", "10000"))
PROBE_DEPTH = int(os.getenv("BILLIARDS_PROBE_DEPTH", "1"))
GAP_FACTOR = float(os.getenv("BILLIARDS_GAP_FACTOR", "50"))

# --- Experiments ---
DEFAULT_SEED = int(os.getenv("BILLIARDS_SEED", "20240601"))
SEARCH_WORKERS = int(os.getenv("BILLIARDS_SEARCH_WORKERS", "1"))

# --- Logging ---
LOG_FILE = os.getenv("BILLIARDS_LOG_FILE", "")
LOG_LEVEL = os.getenv("BILLIARDS_LOG_LEVEL", "INFO").upper()
LOG_ROTATE_WHEN = os.getenv("BILLIARDS_LOG_ROTATE_WHEN", "midnight")
