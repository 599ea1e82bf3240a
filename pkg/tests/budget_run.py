"""
Time one pipeline run on 1000 points per class and report peak memory.

Run as a separate process so the peak resident size belongs to this run
alone: `python tests/budget_run.py <mode>` prints one JSON line.
"""

import json
import resource
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from config import Config  # noqa: E402
from src.persistence import ScaleGrid  # noqa: E402
from src.pipeline import PipelineSettings, run_pipeline  # noqa: E402
from src.pointcloud import LabeledPointCloud  # noqa: E402

PER_CLASS = 1000


def disk_and_annulus(seed: int = 0) -> LabeledPointCloud:
    """Area-uniform unit disk (class 0) inside an annulus 1.2..2 (class 1)."""
    rng = np.random.default_rng(seed)
    inner = np.concatenate([np.zeros(PER_CLASS), np.full(PER_CLASS, 1.2)])
    outer = np.concatenate([np.ones(PER_CLASS), np.full(PER_CLASS, 2.0)])
    radii = np.sqrt(rng.random(2 * PER_CLASS) * (outer ** 2 - inner ** 2) + inner ** 2)
    angles = rng.uniform(0.0, 2.0 * np.pi, 2 * PER_CLASS)
    points = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    return LabeledPointCloud(points, np.repeat([0, 1], PER_CLASS))


def main(mode: str):
    cloud = disk_and_annulus()
    grid = ScaleGrid(*Config.grid_for(mode))
    begin = time.perf_counter()
    result = run_pipeline(cloud, PipelineSettings(mode=mode), grid)
    seconds = time.perf_counter() - begin
    # ru_maxrss is in kilobytes on Linux
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    print(json.dumps({"mode": mode, "seconds": seconds, "peak_mb": peak_mb, "pairs": len(result.diagram)}))


if __name__ == "__main__":
    main(sys.argv[1])
