"""
Configuration settings for the CUE chaos laboratory
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Project paths
BASE_DIR = Path(__file__).parent
DATA_DIR = Path(os.getenv("LAB_DATA_DIR", BASE_DIR / "data"))
DATA_DIR.mkdir(parents=True, exist_ok=True)
OUTPUT_DIR = Path(os.getenv("LAB_OUTPUT_DIR", BASE_DIR / "results"))
SYMBOL_CORPUS_PATH = Path(os.getenv("SYMBOL_CORPUS_PATH", BASE_DIR / "data" / "symbol_corpus.txt"))
EXPERIMENTS_PATH = Path(os.getenv("EXPERIMENTS_PATH", BASE_DIR / "experiments.ini"))

# Database configuration (run ledger)
DATABASE_URL = os.getenv("DATABASE_URL", f"sqlite:///{DATA_DIR}/lab.db")

# Reproducibility
MASTER_SEED = int(os.getenv("MASTER_SEED", 20240601))
WORKERS = int(os.getenv("WORKERS", 1))
BLOCK_SIZE = int(os.getenv("BLOCK_SIZE", 512))
QUIET = os.getenv("LAB_QUIET", "0") == "1"

# Field evaluation
GRID_SIZE = int(os.getenv("GRID_SIZE", 4096))

# Numerical tolerances
SINGULAR_TAIL = int(os.getenv("SINGULAR_TAIL", 2 ** 16))
FOURIER_TOL = float(os.getenv("FOURIER_TOL", 1e-10))
FOURIER_MAX_POINTS = int(os.getenv("FOURIER_MAX_POINTS", 2 ** 20))
NEWTON_GROWTH_LIMIT = float(os.getenv("NEWTON_GROWTH_LIMIT", 1e12))
DET_CONSISTENCY_TOL = float(os.getenv("DET_CONSISTENCY_TOL", 1e-8))
CONTOUR_TOL = float(os.getenv("CONTOUR_TOL", 1e-6))
CONTOUR_MAX_POINTS = int(os.getenv("CONTOUR_MAX_POINTS", 2 ** 22))

# Statistical pass thresholds
SE_BANDS = float(os.getenv("SE_BANDS", 4.0))
KS_ALPHA = float(os.getenv("KS_ALPHA", 0.01))
MIN_ESS = float(os.getenv("MIN_ESS", 30))
MIN_KS_SIZE = 50

# Barrier / decomposition defaults
BARRIER_GAMMA_OFFSET = float(os.getenv("BARRIER_GAMMA_OFFSET", 0.2))
BARRIER_L = int(os.getenv("BARRIER_L", 2))
BARRIER_M = int(os.getenv("BARRIER_M", 16))
BARRIER_DELTA = float(os.getenv("BARRIER_DELTA", 0.2))

# Mesoscopic window of the two-point scaling regression
CK_WINDOW_LOW = float(os.getenv("CK_WINDOW_LOW", 8))  # in units of 1/N
CK_WINDOW_HIGH = float(os.getenv("CK_WINDOW_HIGH", 0.25))

# Remainder bound for the truncated cosine sum
LOGSUM_BOUND = float(os.getenv("LOGSUM_BOUND", 3.0))
