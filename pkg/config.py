"""
Configuration management for the decision-boundary topology toolkit.
Library defaults live as class constants; environment variables only steer
non-numeric behaviour (worker count, output location, verbosity).
"""

import os
import sys
from pathlib import Path
from typing import Optional
from dotenv import load_dotenv

# Load .env file if it exists
load_dotenv()


def _positive_int(raw: str) -> Optional[int]:
    """Parse a worker count; None when it is not a positive integer."""
    try:
        value = int(raw)
    except (TypeError, ValueError):
        return None
    return value if value >= 1 else None


class Config:
    """Central configuration class for the LVR toolkit."""

    # Paths
    BASE_DIR = Path(__file__).parent
    FIXTURES_DIR = BASE_DIR / "fixtures"
    SPECS_DIR = FIXTURES_DIR / "specs"
    TABLES_DIR = FIXTURES_DIR / "complexity_tables"
    OUTPUT_DIR = Path(os.getenv("LVR_OUTPUT_DIR", str(BASE_DIR / "output")))

    # Neighborhood graph
    K_NEIGHBORS = 5       # local scale rho uses the k-th opposite-class neighbor
    NEIGHBOR_CAP = 20     # candidate cross-class neighbors per point

    # Scale grids: (start, stop, steps)
    PLAIN_GRID = (0.0, 10.0, 100)
    SCALED_GRID = (0.5, 1.5, 100)

    # Filtration / homology
    MAX_DIM = 2
    MAX_HOM_DIM = 1
    CONVENTION = "nontrivial-h0"
    ENGINE = "gudhi"

    # Model selection
    SELECT_M = 5

    # Rendering
    RENDER_FRAMES = 20

    # Runtime (never changes results)
    THREADS_RAW = os.getenv("LVR_THREADS", "1")
    THREADS = _positive_int(THREADS_RAW)
    VERBOSE = os.getenv("LVR_VERBOSE", "false").lower() == "true"

    @classmethod
    def validate(cls) -> bool:
        """Validate the environment-driven settings."""
        errors = []

        if cls.THREADS is None:
            errors.append(f"LVR_THREADS must be a positive integer, got {cls.THREADS_RAW!r}.")

        if not cls.FIXTURES_DIR.exists():
            errors.append(f"Fixtures directory is missing: {cls.FIXTURES_DIR}")

        if errors:
            for error in errors:
                print(f"❌ Config Error: {error}", file=sys.stderr)
            return False

        return True

    @classmethod
    def ensure_directories(cls):
        """Create required directories if they don't exist."""
        cls.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)

    @classmethod
    def grid_for(cls, mode: str) -> tuple[float, float, int]:
        """Default (start, stop, steps) grid for a filtration mode."""
        return cls.PLAIN_GRID if mode == "plain" else cls.SCALED_GRID

    @classmethod
    def get_spec_path(cls, shape: str) -> Path:
        """Path of the shipped JSON spec for a synthetic shape."""
        return cls.SPECS_DIR / f"{shape.replace('-', '_')}.json"


if __name__ == "__main__":
    # Quick validation test
    Config.ensure_directories()
    if Config.validate():
        print("✅ Configuration is valid!")
    else:
        print("❌ Configuration has errors. Please check your .env file.")
