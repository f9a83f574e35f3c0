# metric_graphs/settings.py
import os
from pathlib import Path

from dotenv import load_dotenv

# Base dirs
BASE_DIR = Path(__file__).resolve().parent          # metric_graphs/
PROJECT_ROOT = BASE_DIR.parent                      # repo root

# Load .env from repo root if present
env_path = PROJECT_ROOT / ".env"
if env_path.exists():
    load_dotenv(dotenv_path=env_path)

METADATA_DIR = Path(os.getenv("METRIC_GRAPHS_METADATA_DIR", PROJECT_ROOT / "metadata"))

# Equality policy for distances
EQ_TOL = float(os.getenv("METRIC_GRAPHS_EQ_TOL", "1e-9"))
SCALE_MODE = os.getenv("METRIC_GRAPHS_SCALE_MODE", "absolute").strip().lower()

# Perturbation / matching
MAX_ATTEMPTS = int(os.getenv("METRIC_GRAPHS_MAX_ATTEMPTS", 64))
BOTTLENECK_CAP = int(os.getenv("METRIC_GRAPHS_BOTTLENECK_CAP", 512))
BRUTEFORCE_CAP = int(os.getenv("METRIC_GRAPHS_BRUTEFORCE_CAP", 8))

# Seed fallback for every randomized command
DEFAULT_SEED = int(os.getenv("METRIC_GRAPHS_SEED", "0"))

LOG_LEVEL = os.getenv("METRIC_GRAPHS_LOG_LEVEL", "WARNING").upper()
SHOW_PROGRESS = os.getenv("METRIC_GRAPHS_PROGRESS", "0") in ("1", "True", "true", "TRUE")
